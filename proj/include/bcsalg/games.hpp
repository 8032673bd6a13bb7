#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bcsalg/model.hpp"
#include "bcsalg/present.hpp"
#include "bcsalg/reps.hpp"
#include "bcsalg/zalgebra.hpp"

namespace bcsalg {

inline constexpr int kMaxGameContext = 12;

/// The nonlocal game of a BCS with contexts: questions are context indices,
/// answers are assignments to the question's variables (little-endian codes
/// over the declared variable order), and (i,j,a,b) wins iff both answers
/// satisfy their contexts and agree on the shared variables.
struct NonlocalGame {
    std::vector<std::vector<std::string>> question_vars;
    std::vector<std::vector<std::uint32_t>> satisfying; // sorted per question

    int questions() const { return (int)question_vars.size(); }
    std::uint32_t answers(int i) const {
        return std::uint32_t(1) << question_vars[(std::size_t)i].size();
    }
    bool is_satisfying_answer(int i, std::uint32_t a) const {
        const auto &s = satisfying[(std::size_t)i];
        return std::binary_search(s.begin(), s.end(), a);
    }
    bool consistent(int i, int j, std::uint32_t a, std::uint32_t b) const {
        const auto &vi = question_vars[(std::size_t)i];
        const auto &vj = question_vars[(std::size_t)j];
        for (std::size_t p = 0; p < vi.size(); ++p) {
            auto it = std::find(vj.begin(), vj.end(), vi[p]);
            if (it == vj.end()) {
                continue;
            }
            std::size_t q = (std::size_t)(it - vj.begin());
            if (((a >> p) & 1) != ((b >> q) & 1)) {
                return false;
            }
        }
        return true;
    }
    bool wins(int i, int j, std::uint32_t a, std::uint32_t b) const {
        return is_satisfying_answer(i, a) && is_satisfying_answer(j, b) &&
               consistent(i, j, a, b);
    }
    std::vector<std::array<std::uint32_t, 4>> winning_quadruples() const {
        std::vector<std::array<std::uint32_t, 4>> out;
        for (int i = 0; i < questions(); ++i) {
            for (int j = 0; j < questions(); ++j) {
                for (std::uint32_t a : satisfying[(std::size_t)i]) {
                    for (std::uint32_t b : satisfying[(std::size_t)j]) {
                        if (consistent(i, j, a, b)) {
                            out.push_back({(std::uint32_t)i, (std::uint32_t)j, a, b});
                        }
                    }
                }
            }
        }
        return out;
    }
    friend bool operator==(const NonlocalGame &, const NonlocalGame &) = default;
};

inline NonlocalGame build_game(const Bcs &b) {
    NonlocalGame g;
    for (const auto &ctx : b.contexts) {
        int k = (int)ctx.vars.size();
        if (k > kMaxGameContext) {
            throw ResourceError("context too large for an answer table: " + std::to_string(k));
        }
        std::vector<std::uint32_t> sat;
        for (std::uint32_t idx = 0; idx < (std::uint32_t(1) << k); ++idx) {
            if (context_satisfying(ctx, detail::context_assignment(ctx.vars, idx))) {
                sat.push_back(idx);
            }
        }
        g.question_vars.push_back(ctx.vars);
        g.satisfying.push_back(std::move(sat));
    }
    return g;
}

struct PadResult {
    Bcs system;
    std::vector<std::string> ancillas;
};

/// Equalize context sizes by adjoining shared ancilla variables constrained to
/// +1; the padded system's algebra is unchanged up to isomorphism.
inline PadResult pad(const Bcs &b) {
    PadResult out;
    out.system = b;
    if (b.contexts.empty()) {
        return out;
    }
    std::size_t beta = 0, alpha = SIZE_MAX;
    for (const auto &ctx : b.contexts) {
        beta = std::max(beta, ctx.vars.size());
        alpha = std::min(alpha, ctx.vars.size());
    }
    std::size_t need = beta - alpha;
    int counter = 1;
    for (std::size_t i = 0; i < need; ++i) {
        std::string name;
        do {
            name = "y" + std::to_string(counter++);
        } while (out.system.has_var(name));
        out.ancillas.push_back(name);
        out.system.vars.push_back(name);
    }
    Relation plus_one = Relation::of_members(1, {{+1}});
    for (auto &ctx : out.system.contexts) {
        std::size_t deficit = beta - ctx.vars.size();
        for (std::size_t j = 0; j < deficit; ++j) {
            const std::string &y = out.ancillas[j];
            ctx.vars.push_back(y);
            ctx.constraints.emplace_back(Scope{Term::variable(y)}, plus_one);
        }
    }
    validate(out.system);
    return out;
}

/// Conversion of a uniform-context BCS into a synchronous game, along with
/// both generator maps of the isomorphism.
struct SyncConversion {
    SynchronousGame game;
    std::vector<std::vector<std::string>> question_vars;
    std::map<std::string, int> var_question; // first question containing x

    /// e^i_a maps to the context projection Pi_{U_i,a}.
    AlgebraElement e_image(int i, std::uint32_t a) const {
        const auto &vars = question_vars[(std::size_t)i];
        return projection_of_assignment(vars, detail::context_assignment(vars, a));
    }
    /// x reconstructs from any question containing it: sum_a a(x) e^i_a.
    /// Returned as the list of (answer, sign) pairs for question i.
    std::vector<std::pair<std::uint32_t, Sign>> observable_expansion(
        const std::string &x) const {
        int i = var_question.at(x);
        const auto &vars = question_vars[(std::size_t)i];
        std::size_t p =
            (std::size_t)(std::find(vars.begin(), vars.end(), x) - vars.begin());
        std::vector<std::pair<std::uint32_t, Sign>> out;
        for (std::uint32_t a = 0; a < (std::uint32_t(1) << vars.size()); ++a) {
            out.push_back({a, ((a >> p) & 1) ? -1 : +1});
        }
        return out;
    }
};

inline SyncConversion to_synchronous(const Bcs &b) {
    if (b.contexts.empty()) {
        throw std::invalid_argument("no contexts to convert");
    }
    std::size_t m = b.contexts[0].vars.size();
    for (const auto &ctx : b.contexts) {
        if (ctx.vars.size() != m) {
            throw std::invalid_argument("context sizes are not uniform; pad the system first");
        }
    }
    for (const auto &v : b.vars) {
        bool found = false;
        for (const auto &ctx : b.contexts) {
            if (ctx.has_var(v)) {
                found = true;
                break;
            }
        }
        if (!found) {
            throw std::invalid_argument("variable outside every context: " + v);
        }
    }
    NonlocalGame ng = build_game(b);
    int ell = ng.questions();
    SyncConversion out;
    out.game = SynchronousGame(ell, 1 << m);
    out.question_vars = ng.question_vars;
    for (int i = 0; i < ell; ++i) {
        for (const auto &v : ng.question_vars[(std::size_t)i]) {
            out.var_question.emplace(v, i);
        }
    }
    for (int i = 0; i < ell; ++i) {
        for (int j = 0; j < ell; ++j) {
            for (std::uint32_t a : ng.satisfying[(std::size_t)i]) {
                for (std::uint32_t bb : ng.satisfying[(std::size_t)j]) {
                    if (ng.consistent(i, j, a, bb)) {
                        out.game.set_win(i, j, (int)a, (int)bb, true);
                    }
                }
            }
        }
    }
    return out;
}

inline std::string sync_bcs_var(int i, int a) {
    return "x" + std::to_string(i) + "_" + std::to_string(a);
}

struct FromSynchronous {
    Bcs system;
    // e^i_a maps to (1 - x_{ia})/2 in the constraint system's algebra.
    std::map<std::pair<int, int>, std::string> var_of_answer;
};

/// The constraint system of a synchronous game: one variable per
/// (question, answer), forbidden AND-pairs wherever the rule loses, and one
/// exactly-one-true constraint per question.
inline FromSynchronous from_synchronous(const SynchronousGame &g) {
    if (!g.is_synchronous()) {
        throw std::invalid_argument("rule table violates the synchronous condition");
    }
    if (g.answers > kMaxArity) {
        throw ResourceError("answer set too large for the exactly-one relation");
    }
    FromSynchronous out;
    std::vector<std::string> vars;
    for (int i = 0; i < g.questions; ++i) {
        for (int a = 0; a < g.answers; ++a) {
            vars.push_back(sync_bcs_var(i, a));
            out.var_of_answer[{i, a}] = vars.back();
        }
    }
    Relation nand = Relation::full(2);
    nand.table[index_of_tuple({-1, -1})] = 0;
    std::vector<Constraint> cs;
    for (int i = 0; i < g.questions; ++i) {
        for (int j = i; j < g.questions; ++j) {
            for (int a = 0; a < g.answers; ++a) {
                int b0 = (i == j) ? a + 1 : 0;
                for (int bb = b0; bb < g.answers; ++bb) {
                    if (!g.wins(i, j, a, bb) || !g.wins(j, i, bb, a)) {
                        cs.emplace_back(Scope{Term::variable(sync_bcs_var(i, a)),
                                              Term::variable(sync_bcs_var(j, bb))},
                                        nand);
                    }
                }
            }
        }
        // A losing diagonal cell (i,i,a,a) forbids the answer outright.
        for (int a = 0; a < g.answers; ++a) {
            if (!g.wins(i, i, a, a)) {
                cs.emplace_back(Scope{Term::variable(sync_bcs_var(i, a)),
                                      Term::variable(sync_bcs_var(i, a))},
                                nand);
            }
        }
    }
    for (int i = 0; i < g.questions; ++i) {
        Scope s;
        for (int a = 0; a < g.answers; ++a) {
            s.push_back(Term::variable(sync_bcs_var(i, a)));
        }
        cs.emplace_back(std::move(s), Relation::exactly_one_true(g.answers));
    }
    out.system = default_contexts(vars, cs);
    return out;
}

struct Strategy {
    enum Kind { Deterministic, Quantum } kind = Deterministic;
    Assignment assignment; // Deterministic: answer with the restriction per question
    MatrixRep rep;         // Quantum: measurements from a verified representation

    static Strategy deterministic(Assignment phi) {
        Strategy s;
        s.kind = Deterministic;
        s.assignment = std::move(phi);
        return s;
    }
    static Strategy quantum(MatrixRep r) {
        Strategy s;
        s.kind = Quantum;
        s.rep = std::move(r);
        return s;
    }
};

/// Winning probability under the uniform question-pair distribution.
/// Quantum strategies share the maximally entangled state: Alice measures the
/// context projections, Bob their transposes, so
/// p(a,b|i,j) = Tr(rho(Pi_{U_i,a}) rho(Pi_{U_j,b})) / d.
inline double strategy_value(const Bcs &b, const NonlocalGame &g, const Strategy &s,
                             double tol = kDefaultTol) {
    int ell = g.questions();
    if (ell == 0) {
        return 1.0;
    }
    if (s.kind == Strategy::Deterministic) {
        std::vector<std::uint32_t> answer((std::size_t)ell, 0);
        for (int i = 0; i < ell; ++i) {
            std::uint32_t a = 0;
            const auto &vars = g.question_vars[(std::size_t)i];
            for (std::size_t p = 0; p < vars.size(); ++p) {
                auto it = s.assignment.find(vars[p]);
                if (it == s.assignment.end()) {
                    throw std::invalid_argument("strategy assignment misses " + vars[p]);
                }
                if (it->second == -1) {
                    a |= (1u << p);
                }
            }
            answer[(std::size_t)i] = a;
        }
        long wins = 0;
        for (int i = 0; i < ell; ++i) {
            for (int j = 0; j < ell; ++j) {
                if (g.wins(i, j, answer[(std::size_t)i], answer[(std::size_t)j])) {
                    ++wins;
                }
            }
        }
        return (double)wins / ((double)ell * (double)ell);
    }

    VerifyReport vr = verify_rep(build_algebra(b, PresentationForm::Constraints), s.rep, tol);
    if (!vr.pass) {
        throw std::invalid_argument("strategy rejected: representation fails verification");
    }
    int d = s.rep.dim;
    Mat id = Mat::Identity(d, d);
    std::vector<std::vector<Mat>> povm((std::size_t)ell);
    for (int i = 0; i < ell; ++i) {
        const auto &vars = g.question_vars[(std::size_t)i];
        Mat total = Mat::Zero(d, d);
        for (std::uint32_t a = 0; a < g.answers(i); ++a) {
            Mat proj = id;
            for (std::size_t p = 0; p < vars.size(); ++p) {
                Sign v = (a >> p) & 1 ? -1 : +1;
                proj = proj * (0.5 * (id + (double)v * s.rep.image(vars[p])));
            }
            povm[(std::size_t)i].push_back(proj);
            total += proj;
        }
        if ((total - id).norm() > tol) {
            throw std::invalid_argument("strategy rejected: measurements of question " +
                                        std::to_string(i) + " are not normalized");
        }
    }
    double value = 0;
    for (int i = 0; i < ell; ++i) {
        for (int j = 0; j < ell; ++j) {
            for (std::uint32_t a : g.satisfying[(std::size_t)i]) {
                for (std::uint32_t bb : g.satisfying[(std::size_t)j]) {
                    if (g.consistent(i, j, a, bb)) {
                        value += (povm[(std::size_t)i][a] * povm[(std::size_t)j][bb])
                                     .trace()
                                     .real() /
                                 d;
                    }
                }
            }
        }
    }
    return value / ((double)ell * (double)ell);
}

} // namespace bcsalg

#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bcsalg/model.hpp"
#include "bcsalg/zalgebra.hpp"

namespace bcsalg {

enum class PresentationForm { Contexts, Constraints, Polynomial, Synchronous };

inline std::string form_name(PresentationForm f) {
    switch (f) {
        case PresentationForm::Contexts: return "contexts";
        case PresentationForm::Constraints: return "constraints";
        case PresentationForm::Polynomial: return "polynomial";
        case PresentationForm::Synchronous: return "synchronous";
    }
    return "?";
}

/// A required-to-vanish element, living in the subalgebra of the context it is
/// attached to.
struct VanishingEntry {
    int context = 0;
    AlgebraElement element;
    friend bool operator==(const VanishingEntry &, const VanishingEntry &) = default;
};

/// Generators-and-relations data for a BCS algebra (three equivalent forms) or
/// a synchronous algebra.
struct Presentation {
    PresentationForm form = PresentationForm::Contexts;
    std::vector<std::string> generators;
    std::vector<std::string> involutions;                    // x* = x, x^2 = 1
    std::set<std::pair<std::string, std::string>> commutations; // unordered pairs
    std::vector<std::vector<std::string>> context_vars;
    std::vector<VanishingEntry> vanishing;

    // Synchronous-form relations: e* = e = e^2, sum over each partition = 1,
    // and the listed products vanish.
    std::vector<std::string> projections;
    std::vector<std::vector<std::string>> partitions;
    std::vector<std::pair<std::string, std::string>> orthogonal;

    friend bool operator==(const Presentation &, const Presentation &) = default;
};

namespace detail {

inline std::pair<std::string, std::string> norm_pair(const std::string &a, const std::string &b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

inline Assignment context_assignment(const std::vector<std::string> &vars, std::uint32_t idx) {
    Assignment phi;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        phi[vars[i]] = (idx & (1u << i)) ? -1 : +1;
    }
    return phi;
}

} // namespace detail

/// The presentation of A_con(B): involutive self-adjoint generators that
/// commute within each context, no vanishing relations.
inline Presentation build_acon(const Bcs &b) {
    Presentation p;
    p.form = PresentationForm::Contexts;
    p.generators = b.vars;
    p.involutions = b.vars;
    for (const auto &ctx : b.contexts) {
        p.context_vars.push_back(ctx.vars);
        for (std::size_t i = 0; i < ctx.vars.size(); ++i) {
            for (std::size_t j = i + 1; j < ctx.vars.size(); ++j) {
                p.commutations.insert(detail::norm_pair(ctx.vars[i], ctx.vars[j]));
            }
        }
    }
    return p;
}

/// The BCS algebra A(B) in one of its three equivalent forms. All vanishing
/// elements are embedded into their context subalgebra.
inline Presentation build_algebra(const Bcs &b, PresentationForm form) {
    if (form == PresentationForm::Synchronous) {
        throw std::invalid_argument("synchronous form is built from a game, not a Bcs");
    }
    Presentation p = build_acon(b);
    p.form = form;
    for (std::size_t ci = 0; ci < b.contexts.size(); ++ci) {
        const Context &ctx = b.contexts[(std::size_t)ci];
        int k = (int)ctx.vars.size();
        if (k > kMaxArity) {
            throw ResourceError("context too large for symbolic work: " + std::to_string(k));
        }
        switch (form) {
            case PresentationForm::Contexts: {
                if (k == 0) {
                    break;
                }
                for (std::uint32_t idx = 0; idx < (std::uint32_t(1) << k); ++idx) {
                    Assignment phi = detail::context_assignment(ctx.vars, idx);
                    if (!context_satisfying(ctx, phi)) {
                        p.vanishing.push_back(
                            {(int)ci, projection_of_assignment(ctx.vars, phi)});
                    }
                }
                break;
            }
            case PresentationForm::Constraints: {
                for (const auto &c : ctx.constraints) {
                    for (auto &tp : constraint_nonsat_projections(c)) {
                        p.vanishing.push_back({(int)ci, tp.element.embedded(ctx.vars)});
                    }
                }
                break;
            }
            case PresentationForm::Polynomial: {
                for (const auto &c : ctx.constraints) {
                    AlgebraElement pr =
                        indicator_poly(c.relation, default_slots(c.relation.arity));
                    AlgebraElement at = eval_scope_poly(pr, c.scope);
                    AlgebraElement rel =
                        AlgebraElement::one(at.varset()) + at; // 1 + P_R(S) = 0
                    p.vanishing.push_back({(int)ci, rel.embedded(ctx.vars)});
                }
                break;
            }
            case PresentationForm::Synchronous:
                break;
        }
    }
    return p;
}

/// Per context, the set of assignments whose projections lie in the ideal
/// generated by the vanishing elements of that context. In a commutative
/// context subalgebra this is the union of the supports of the value
/// functions.
struct VanishingSet {
    std::vector<std::vector<std::string>> context_vars;
    std::vector<std::set<std::uint32_t>> vanishing;

    friend bool operator==(const VanishingSet &, const VanishingSet &) = default;
};

inline VanishingSet vanishing_set_of(const Presentation &p) {
    VanishingSet vs;
    vs.context_vars = p.context_vars;
    vs.vanishing.assign(p.context_vars.size(), {});
    for (const auto &entry : p.vanishing) {
        const auto &cv = p.context_vars[(std::size_t)entry.context];
        AlgebraElement e = entry.element.embedded(cv).converted(Basis::Projection);
        for (std::uint32_t idx = 0; idx < e.coeffs().size(); ++idx) {
            if (!e.coeff(idx).is_zero()) {
                vs.vanishing[(std::size_t)entry.context].insert(idx);
            }
        }
    }
    return vs;
}

inline VanishingSet vanishing_set(const Bcs &b, PresentationForm form) {
    return vanishing_set_of(build_algebra(b, form));
}

/// A satisfying assignment is exactly a sign vector annihilating every
/// vanishing element (a one-dimensional representation).
inline bool annihilates_all(const Presentation &p, const Assignment &phi) {
    for (const auto &entry : p.vanishing) {
        if (!entry.element.value_at(phi).is_zero()) {
            return false;
        }
    }
    return true;
}

/// Synchronous game data: questions 0..questions-1, answers 0..answers-1, and
/// the full win table.
struct SynchronousGame {
    int questions = 0;
    int answers = 0;
    std::vector<char> win; // index ((i*Q + j)*A + a)*A + b

    SynchronousGame() = default;
    SynchronousGame(int q, int a) : questions(q), answers(a) {
        if (q < 1 || a < 1) {
            throw std::invalid_argument("game needs at least one question and answer");
        }
        std::size_t cells = (std::size_t)q * (std::size_t)q * (std::size_t)a * (std::size_t)a;
        if (cells > (std::size_t(1) << 28)) {
            throw ResourceError("win table too large");
        }
        win.assign(cells, 0);
    }

    std::size_t cell(int i, int j, int a, int b) const {
        return (((std::size_t)i * (std::size_t)questions + (std::size_t)j) * (std::size_t)answers +
                (std::size_t)a) *
                   (std::size_t)answers +
               (std::size_t)b;
    }
    bool wins(int i, int j, int a, int b) const { return win[cell(i, j, a, b)] != 0; }
    void set_win(int i, int j, int a, int b, bool w) { win[cell(i, j, a, b)] = w ? 1 : 0; }

    bool is_synchronous() const {
        for (int i = 0; i < questions; ++i) {
            for (int a = 0; a < answers; ++a) {
                for (int b = 0; b < answers; ++b) {
                    if (a != b && wins(i, i, a, b)) {
                        return false;
                    }
                }
            }
        }
        return true;
    }

    friend bool operator==(const SynchronousGame &, const SynchronousGame &) = default;
};

inline std::string sync_generator_name(int i, int a) {
    return "e" + std::to_string(i) + "_" + std::to_string(a);
}

/// The synchronous algebra of a game: projections e^i_a, each question's
/// answers summing to 1, and e^i_a e^j_b = 0 whenever (i,j,a,b) loses.
inline Presentation synchronous_presentation(const SynchronousGame &g) {
    if (!g.is_synchronous()) {
        throw std::invalid_argument("rule table violates the synchronous condition");
    }
    Presentation p;
    p.form = PresentationForm::Synchronous;
    for (int i = 0; i < g.questions; ++i) {
        std::vector<std::string> part;
        for (int a = 0; a < g.answers; ++a) {
            std::string name = sync_generator_name(i, a);
            p.generators.push_back(name);
            p.projections.push_back(name);
            part.push_back(name);
        }
        p.partitions.push_back(std::move(part));
    }
    for (int i = 0; i < g.questions; ++i) {
        for (int j = 0; j < g.questions; ++j) {
            for (int a = 0; a < g.answers; ++a) {
                for (int b = 0; b < g.answers; ++b) {
                    if (!g.wins(i, j, a, b)) {
                        p.orthogonal.push_back(
                            {sync_generator_name(i, a), sync_generator_name(j, b)});
                    }
                }
            }
        }
    }
    return p;
}

/// Finitely presented group as plain text data. All generators are
/// involutions, so relator words need no inverses.
struct GroupPresentation {
    std::vector<std::string> generators;
    std::vector<std::vector<std::string>> relators;
    std::vector<std::string> notes;

    std::string text() const {
        std::string out;
        for (const auto &n : notes) {
            out += "# " + n + "\n";
        }
        out += "< ";
        for (std::size_t i = 0; i < generators.size(); ++i) {
            out += (i ? ", " : "") + generators[i];
        }
        out += " |\n";
        for (std::size_t i = 0; i < relators.size(); ++i) {
            out += "  ";
            for (std::size_t j = 0; j < relators[i].size(); ++j) {
                out += (j ? " " : "") + relators[i][j];
            }
            out += i + 1 < relators.size() ? ",\n" : "\n";
        }
        out += ">\n";
        return out;
    }
};

/// The solution group of the F2-linear system Ax=b: generators X and a
/// central involution J, with row relators x^{A_i} = J^{b_i}.
inline GroupPresentation solution_group(const std::vector<std::vector<int>> &a,
                                        const std::vector<int> &rhs) {
    std::size_t m = a.size();
    if (rhs.size() != m) {
        throw std::invalid_argument("matrix/vector size mismatch");
    }
    std::size_t n = m == 0 ? 0 : a[0].size();
    GroupPresentation g;
    for (std::size_t j = 0; j < n; ++j) {
        g.generators.push_back("x" + std::to_string(j + 1));
    }
    g.generators.push_back("J");
    g.relators.push_back({"J", "J"});
    for (std::size_t j = 0; j < n; ++j) {
        g.relators.push_back({g.generators[j], g.generators[j]});
    }
    for (std::size_t j = 0; j < n; ++j) {
        g.relators.push_back({g.generators[j], "J", g.generators[j], "J"});
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (a[i].size() != n) {
            throw std::invalid_argument("ragged matrix");
        }
        std::vector<std::size_t> support;
        for (std::size_t j = 0; j < n; ++j) {
            if (a[i][j] % 2 != 0) {
                support.push_back(j);
            }
        }
        for (std::size_t s = 0; s < support.size(); ++s) {
            for (std::size_t t = s + 1; t < support.size(); ++t) {
                g.relators.push_back({g.generators[support[s]], g.generators[support[t]],
                                      g.generators[support[s]], g.generators[support[t]]});
            }
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<std::string> w;
        for (std::size_t j = 0; j < n; ++j) {
            if (a[i][j] % 2 != 0) {
                w.push_back(g.generators[j]);
            }
        }
        if (rhs[i] % 2 != 0) {
            w.push_back("J");
        }
        if (!w.empty()) {
            g.relators.push_back(std::move(w));
        }
    }
    g.notes.push_back("BCS algebra = complex group algebra of this presentation modulo J = -1");
    return g;
}

struct ForceCommuteResult {
    Bcs system;
    bool added = false;
    std::string ancilla;
};

/// Make x and y commute by adjoining a fresh ancilla z and the relation
/// x y z = 1 in a new context {x, y, z}. No-op when they already share a
/// context.
inline ForceCommuteResult force_commute(const Bcs &b, const std::string &x,
                                        const std::string &y) {
    b.var_index(x);
    b.var_index(y);
    if (x == y) {
        throw std::invalid_argument("force_commute needs two distinct variables");
    }
    for (const auto &ctx : b.contexts) {
        if (ctx.has_var(x) && ctx.has_var(y)) {
            return {b, false, ""};
        }
    }
    int n = 1;
    std::string z;
    do {
        z = "z" + std::to_string(n++);
    } while (b.has_var(z));
    ForceCommuteResult out;
    out.system = b;
    out.system.vars.push_back(z);
    Context ctx;
    ctx.vars = {x, y, z};
    ctx.constraints.emplace_back(scope_of_vars(ctx.vars), Relation::parity(3, +1));
    out.system.contexts.push_back(std::move(ctx));
    out.added = true;
    out.ancilla = z;
    validate(out.system);
    return out;
}

} // namespace bcsalg

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bcsalg/model.hpp"
#include "bcsalg/present.hpp"
#include "bcsalg/zalgebra.hpp"

namespace bcsalg {

/// A pp-definition of a target relation: a defining system over the language,
/// on interface variables x1..xk plus ancillas, whose projection onto the
/// interface equals the target.
struct GadgetDefinition {
    Relation target;
    Bcs system; // vars: x1..xk first, then ancillas

    std::vector<std::string> interface_vars() const {
        return std::vector<std::string>(system.vars.begin(),
                                        system.vars.begin() + target.arity);
    }
    std::vector<std::string> ancilla_vars() const {
        return std::vector<std::string>(system.vars.begin() + target.arity,
                                        system.vars.end());
    }
};

/// Projection check by enumeration: (a1..ak) in target iff some extension to
/// the ancillas satisfies the defining system.
inline bool gadget_valid(const GadgetDefinition &g) {
    int k = g.target.arity;
    int total = (int)g.system.vars.size();
    if (total > 20) {
        throw ResourceError("gadget too large for projection enumeration");
    }
    if (total < k) {
        return false;
    }
    int y = total - k;
    for (std::uint32_t a = 0; a < (std::uint32_t(1) << k); ++a) {
        bool witnessed = false;
        for (std::uint32_t w = 0; w < (std::uint32_t(1) << y) && !witnessed; ++w) {
            Assignment phi;
            for (int i = 0; i < k; ++i) {
                phi[g.system.vars[(std::size_t)i]] = (a & (1u << i)) ? -1 : +1;
            }
            for (int i = 0; i < y; ++i) {
                phi[g.system.vars[(std::size_t)(k + i)]] = (w & (1u << i)) ? -1 : +1;
            }
            witnessed = is_satisfying(g.system, phi);
        }
        if (witnessed != g.target.contains(a)) {
            return false;
        }
    }
    return true;
}

/// Self-definition: the single-constraint gadget over the relation itself.
inline GadgetDefinition self_gadget(const Relation &r) {
    GadgetDefinition g;
    g.target = r;
    std::vector<std::string> vars;
    for (int i = 1; i <= r.arity; ++i) {
        vars.push_back("x" + std::to_string(i));
    }
    g.system = default_contexts(vars, {Constraint(scope_of_vars(vars), r)});
    return g;
}

enum class SearchStatus { Found, NotFound, Budget };

struct GadgetSearchResult {
    SearchStatus status = SearchStatus::NotFound;
    std::optional<GadgetDefinition> gadget;
    std::size_t nodes = 0;
};

/// Exhaustive pp-definability search in canonical order: ancilla count, then
/// constraint count, then lexicographic over (relation index, scope). Scopes
/// range over interface variables, ancillas, and the two constants, with
/// repetition. The first system whose projection equals the target wins;
/// running out of budget is reported as unknown, distinct from not-found.
inline GadgetSearchResult pp_define_search(const std::vector<Relation> &language,
                                           const Relation &target, int max_ancillas,
                                           int max_constraints,
                                           std::size_t budget = 2'000'000) {
    GadgetSearchResult result;
    int k = target.arity;
    if (k + max_ancillas > kMaxArity) {
        throw ResourceError("interface plus ancillas exceeds the arity cap");
    }
    bool out_of_budget = false;
    for (int y = 0; y <= max_ancillas && !out_of_budget; ++y) {
        int nv = k + y;
        std::vector<std::string> vars;
        for (int i = 1; i <= k; ++i) {
            vars.push_back("x" + std::to_string(i));
        }
        for (int i = 1; i <= y; ++i) {
            vars.push_back("y" + std::to_string(i));
        }
        std::uint32_t space = std::uint32_t(1) << nv;
        // Target lifted over the ancillas, as a mask on the full space.
        std::vector<char> lifted(space, 0);
        for (std::uint32_t idx = 0; idx < space; ++idx) {
            if (target.contains(idx & ((1u << k) - 1))) {
                lifted[idx] = 1;
            }
        }

        // Candidate constraints: term order x1..xk, y1..yy, +1, -1; scope
        // odometer with the leftmost slot most significant.
        struct Candidate {
            Constraint constraint;
            std::vector<char> sat; // satisfying mask over the full space
        };
        std::vector<Candidate> candidates;
        std::vector<Term> terms;
        for (const auto &v : vars) {
            terms.push_back(Term::variable(v));
        }
        terms.push_back(Term::of_const(+1));
        terms.push_back(Term::of_const(-1));
        for (std::size_t ri = 0; ri < language.size(); ++ri) {
            const Relation &r = language[ri];
            std::vector<std::size_t> odo((std::size_t)r.arity, 0);
            while (true) {
                Scope s;
                for (std::size_t p = 0; p < odo.size(); ++p) {
                    s.push_back(terms[odo[p]]);
                }
                Candidate cand{Constraint(s, r), std::vector<char>(space, 0)};
                bool nontrivial = false, useful = true;
                for (std::uint32_t idx = 0; idx < space; ++idx) {
                    Assignment phi;
                    for (int i = 0; i < nv; ++i) {
                        phi[vars[(std::size_t)i]] = (idx & (1u << i)) ? -1 : +1;
                    }
                    bool ok = r.contains(eval_scope_assignment(phi, s));
                    cand.sat[idx] = ok ? 1 : 0;
                    if (!ok) {
                        nontrivial = true;
                        if (lifted[idx]) {
                            useful = false; // would cut a target row
                        }
                    }
                }
                if (nontrivial && useful) {
                    candidates.push_back(std::move(cand));
                }
                // advance odometer (leftmost most significant)
                int p = (int)odo.size() - 1;
                while (p >= 0 && odo[(std::size_t)p] + 1 == terms.size()) {
                    odo[(std::size_t)p] = 0;
                    --p;
                }
                if (p < 0) {
                    break;
                }
                ++odo[(std::size_t)p];
            }
        }

        // Iterative deepening on the constraint count keeps the canonical
        // (size, then lex) order; a chosen constraint must strictly shrink
        // the current solution set, otherwise a smaller system would exist.
        std::vector<char> full(space, 1);
        auto project_ok = [&](const std::vector<char> &z, bool *exact) {
            *exact = true;
            for (std::uint32_t a = 0; a < (std::uint32_t(1) << k); ++a) {
                bool any = false;
                for (std::uint32_t w = 0; w < (std::uint32_t(1) << y) && !any; ++w) {
                    any = z[a | (w << k)] != 0;
                }
                if (any != target.contains(a)) {
                    if (target.contains(a)) {
                        return false; // lost a target row for good
                    }
                    *exact = false;
                }
            }
            return true;
        };
        std::vector<int> chosen;
        // A chosen constraint must strictly shrink the solution set: at the
        // minimal size every constraint contributes, so this keeps the
        // canonical first hit while pruning.
        std::function<bool(int, const std::vector<char> &, int)> dfs =
            [&](int first, const std::vector<char> &z, int remaining) -> bool {
            for (int ci = first; ci < (int)candidates.size(); ++ci) {
                if (++result.nodes >= budget) {
                    out_of_budget = true;
                    return false;
                }
                std::vector<char> nz(space);
                bool shrunk = false;
                for (std::uint32_t idx = 0; idx < space; ++idx) {
                    nz[idx] = z[idx] & candidates[(std::size_t)ci].sat[idx];
                    if (nz[idx] != z[idx]) {
                        shrunk = true;
                    }
                }
                if (!shrunk) {
                    continue;
                }
                bool exact = false;
                if (!project_ok(nz, &exact)) {
                    continue;
                }
                chosen.push_back(ci);
                if (exact) {
                    if (remaining == 1) {
                        return true;
                    }
                    // exact before full depth: a smaller system already covers
                    // this; skip rather than emit a padded one
                } else if (remaining > 1 && dfs(ci + 1, nz, remaining - 1)) {
                    return true;
                }
                chosen.pop_back();
                if (out_of_budget) {
                    return false;
                }
            }
            return false;
        };

        bool exact0 = false;
        if (project_ok(full, &exact0) && exact0) {
            // The empty system already projects to the target.
            GadgetDefinition g;
            g.target = target;
            g.system = default_contexts(vars, {});
            result.status = SearchStatus::Found;
            result.gadget = g;
            return result;
        }
        for (int size = 1; size <= max_constraints && !out_of_budget; ++size) {
            chosen.clear();
            if (dfs(0, full, size)) {
                std::vector<Constraint> cs;
                for (int ci : chosen) {
                    cs.push_back(candidates[(std::size_t)ci].constraint);
                }
                GadgetDefinition g;
                g.target = target;
                g.system = default_contexts(vars, cs);
                if (!gadget_valid(g)) {
                    throw std::logic_error("search produced an invalid gadget");
                }
                result.status = SearchStatus::Found;
                result.gadget = g;
                return result;
            }
        }
    }
    result.status = out_of_budget ? SearchStatus::Budget : SearchStatus::NotFound;
    return result;
}

/// The generator-image maps of the definability reduction: iota includes the
/// original generators into the reduced system, pi maps every generator of
/// the reduced system back into a context subalgebra of the original.
struct HomPair {
    struct Image {
        int context = -1; // context of the original system, -1 for plain generators
        AlgebraElement element;
        friend bool operator==(const Image &, const Image &) = default;
    };
    std::map<std::string, std::string> iota;
    std::map<std::string, Image> pi;

    struct Choice {
        int context = 0;
        Assignment phi; // assignment to U_i
        Assignment h;   // chosen extension to the ancillas
        friend bool operator==(const Choice &, const Choice &) = default;
    };
    std::vector<Choice> choices;

    friend bool operator==(const HomPair &, const HomPair &) = default;
};

struct ApplyResult {
    Bcs reduced;
    HomPair hom;
};

/// Replace every constraint by its gadget instance with fresh per-occurrence
/// ancillas, and construct the homomorphism pair: h_phi is the
/// lexicographically-first satisfying extension for satisfying phi (all +1
/// otherwise), and pi(y) = sum_phi h_phi(y) Pi_{U_i,phi}.
inline ApplyResult apply_gadgets(const Bcs &b,
                                 const std::map<Relation, GadgetDefinition> &gadgets) {
    ApplyResult out;
    out.reduced.vars = b.vars;
    for (const auto &x : b.vars) {
        out.hom.iota[x] = x;
        int home = -1;
        for (std::size_t ci = 0; ci < b.contexts.size(); ++ci) {
            if (b.contexts[ci].has_var(x)) {
                home = (int)ci;
                break;
            }
        }
        out.hom.pi[x] = {home, AlgebraElement::generator({x}, x)};
    }
    for (std::size_t ci = 0; ci < b.contexts.size(); ++ci) {
        const Context &ctx = b.contexts[ci];
        Context nctx;
        nctx.vars = ctx.vars;
        std::vector<std::string> ancillas;
        for (std::size_t cj = 0; cj < ctx.constraints.size(); ++cj) {
            const Constraint &c = ctx.constraints[cj];
            auto git = gadgets.find(c.relation);
            if (git == gadgets.end()) {
                throw std::invalid_argument("no gadget for a relation of context " +
                                            std::to_string(ci));
            }
            const GadgetDefinition &g = git->second;
            if (!gadget_valid(g)) {
                throw std::invalid_argument("gadget for context " + std::to_string(ci) +
                                            " fails its projection check");
            }
            // term map: interface var p -> scope term p, ancilla -> fresh name
            std::map<std::string, Term> tmap;
            auto iface = g.interface_vars();
            for (int p = 0; p < (int)iface.size(); ++p) {
                tmap[iface[(std::size_t)p]] = c.scope[(std::size_t)p];
            }
            for (const auto &yv : g.ancilla_vars()) {
                std::string fresh =
                    std::to_string(ci) + "." + std::to_string(cj) + "." + yv;
                while (out.reduced.has_var(fresh)) {
                    fresh = "_" + fresh;
                }
                tmap[yv] = Term::variable(fresh);
                out.reduced.vars.push_back(fresh);
                nctx.vars.push_back(fresh);
                ancillas.push_back(fresh);
            }
            for (const auto &gc : g.system.all_constraints()) {
                Scope ns;
                for (const auto &t : gc.scope) {
                    ns.push_back(t.is_const ? t : tmap.at(t.var));
                }
                nctx.constraints.emplace_back(std::move(ns), gc.relation);
            }
        }
        // Choice functions and pi for this context's ancillas.
        int uk = (int)ctx.vars.size();
        int yk = (int)ancillas.size();
        if (uk + yk > 20) {
            throw ResourceError("context plus ancillas too large for choice search");
        }
        std::vector<std::pair<Assignment, Assignment>> choice_rows;
        for (std::uint32_t a = 0; a < (std::uint32_t(1) << uk); ++a) {
            Assignment phi = detail::context_assignment(ctx.vars, a);
            bool sat = context_satisfying(ctx, phi);
            Assignment h;
            for (const auto &yv : ancillas) {
                h[yv] = +1;
            }
            if (sat && yk > 0) {
                // lexicographically-first satisfying extension
                bool found = false;
                for (std::uint64_t w = 0; w < (std::uint64_t(1) << yk) && !found; ++w) {
                    Assignment ext = phi;
                    for (int i = 0; i < yk; ++i) {
                        ext[ancillas[(std::size_t)i]] =
                            ((w >> (yk - 1 - i)) & 1) ? -1 : +1;
                    }
                    if (context_satisfying(nctx, ext)) {
                        for (const auto &yv : ancillas) {
                            h[yv] = ext[yv];
                        }
                        found = true;
                    }
                }
                if (!found) {
                    throw std::logic_error("gadget lost a satisfying assignment");
                }
            }
            HomPair::Choice choice;
            choice.context = (int)ci;
            choice.phi = phi;
            choice.h = h;
            out.hom.choices.push_back(choice);
            choice_rows.push_back({phi, h});
        }
        for (const auto &yv : ancillas) {
            AlgebraElement img(ctx.vars, Basis::Projection);
            for (std::uint32_t a = 0; a < (std::uint32_t(1) << uk); ++a) {
                img.coeff(a) = Rational(choice_rows[a].second.at(yv));
            }
            out.hom.pi[yv] = {(int)ci, img.converted(Basis::Monomial)};
        }
        out.reduced.contexts.push_back(std::move(nctx));
    }
    validate(out.reduced);
    return out;
}

struct HomReport {
    bool pass = false;
    bool commutation_structural = false; // all images share one context algebra
    std::vector<std::string> failures;
};

/// Symbolic verification of the homomorphism pair, entirely inside context
/// subalgebras: pi o iota = id, pi images are involutions, pi kills the
/// reduced system's vanishing projections, and iota's images of vanishing
/// projections vanish (every extension of a non-satisfying assignment is
/// non-satisfying).
inline HomReport verify_hom_pair(const Bcs &b, const Bcs &reduced, const HomPair &h) {
    HomReport rep;
    if (b.contexts.size() != reduced.contexts.size()) {
        rep.failures.push_back("context counts differ");
        return rep;
    }
    // (1) pi o iota = id on generators
    for (const auto &x : b.vars) {
        auto it = h.iota.find(x);
        if (it == h.iota.end()) {
            rep.failures.push_back("iota misses " + x);
            continue;
        }
        auto pit = h.pi.find(it->second);
        if (pit == h.pi.end()) {
            rep.failures.push_back("pi misses " + it->second);
            continue;
        }
        auto [a, bb] = lift_common(pit->second.element,
                                   AlgebraElement::generator({x}, x));
        if (!(a == bb)) {
            rep.failures.push_back("pi(iota(" + x + ")) != " + x);
        }
    }
    // (2) involutions, and images confined to one context subalgebra each
    rep.commutation_structural = true;
    for (const auto &[gen, img] : h.pi) {
        AlgebraElement sq = img.element * img.element;
        if (!(sq == AlgebraElement::one(img.element.varset()))) {
            rep.failures.push_back("pi(" + gen + ")^2 != 1");
        }
        if (img.context >= 0) {
            const auto &cv = b.contexts[(std::size_t)img.context].vars;
            for (const auto &v : img.element.varset()) {
                bool inside = std::find(cv.begin(), cv.end(), v) != cv.end() || v == gen;
                if (!inside) {
                    rep.commutation_structural = false;
                }
            }
        }
    }
    // (3) pi kills the vanishing projections of every reduced context
    for (std::size_t ci = 0; ci < reduced.contexts.size(); ++ci) {
        const Context &rctx = reduced.contexts[(std::size_t)ci];
        const Context &octx = b.contexts[(std::size_t)ci];
        int rk = (int)rctx.vars.size();
        if (rk > 20) {
            throw ResourceError("reduced context too large for symbolic verification");
        }
        bool vars_ok = true;
        for (const auto &v : octx.vars) {
            if (!rctx.has_var(v)) {
                rep.failures.push_back("reduced context " + std::to_string(ci) +
                                       " dropped variable " + v);
                vars_ok = false;
            }
        }
        if (!vars_ok) {
            continue;
        }
        for (std::uint32_t a = 0; a < (std::uint32_t(1) << rk); ++a) {
            Assignment tphi = detail::context_assignment(rctx.vars, a);
            if (context_satisfying(rctx, tphi)) {
                continue;
            }
            AlgebraElement prod = AlgebraElement::one(octx.vars);
            bool have_all = true;
            for (const auto &z : rctx.vars) {
                auto pit = h.pi.find(z);
                if (pit == h.pi.end()) {
                    rep.failures.push_back("pi misses " + z);
                    have_all = false;
                    break;
                }
                AlgebraElement img = pit->second.element.embedded(octx.vars);
                AlgebraElement factor =
                    Rational(1, 2) *
                    (AlgebraElement::one(octx.vars) +
                     (tphi.at(z) == -1 ? -img : img));
                prod = prod * factor;
            }
            if (!have_all || prod.is_zero()) {
                continue;
            }
            Assignment phi0;
            for (const auto &v : octx.vars) {
                phi0[v] = tphi.at(v);
            }
            if (context_satisfying(octx, phi0)) {
                rep.failures.push_back("pi image of a non-satisfying projection of reduced "
                                       "context " +
                                       std::to_string(ci) +
                                       " survives over a satisfying restriction");
                continue;
            }
            AlgebraElement expect = phi0.empty()
                                        ? AlgebraElement::one(octx.vars)
                                        : projection_of_assignment(octx.vars, phi0);
            if (!(prod == expect)) {
                rep.failures.push_back(
                    "pi image in reduced context " + std::to_string(ci) +
                    " is neither 0 nor the projection of its restriction");
            }
        }
    }
    // (4) iota well-defined: extensions of non-satisfying assignments stay
    // non-satisfying
    for (std::size_t ci = 0; ci < b.contexts.size(); ++ci) {
        const Context &octx = b.contexts[(std::size_t)ci];
        const Context &rctx = reduced.contexts[(std::size_t)ci];
        int uk = (int)octx.vars.size();
        int yk = (int)rctx.vars.size() - uk;
        if (yk < 0) {
            rep.failures.push_back("reduced context " + std::to_string(ci) +
                                   " lost variables");
            continue;
        }
        for (std::uint32_t a = 0; a < (std::uint32_t(1) << uk); ++a) {
            Assignment phi = detail::context_assignment(octx.vars, a);
            if (context_satisfying(octx, phi)) {
                continue;
            }
            for (std::uint32_t w = 0; w < (std::uint32_t(1) << yk); ++w) {
                Assignment ext = phi;
                for (int i = 0; i < yk; ++i) {
                    ext[rctx.vars[(std::size_t)(uk + i)]] = (w & (1u << i)) ? -1 : +1;
                }
                if (context_satisfying(rctx, ext)) {
                    rep.failures.push_back("a non-satisfying assignment of context " +
                                           std::to_string(ci) +
                                           " has a satisfying extension");
                    break;
                }
            }
        }
    }
    rep.pass = rep.failures.empty();
    return rep;
}

} // namespace bcsalg

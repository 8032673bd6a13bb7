#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bcsalg/common.hpp"
#include "bcsalg/model.hpp"

namespace bcsalg {

struct ClassFlags {
    bool bijunctive = false;
    bool horn = false;
    bool dual_horn = false;
    bool linear = false;
    bool zero_valid = false;
    bool one_valid = false;

    bool any_schaefer() const { return bijunctive || horn || dual_horn || linear; }
    ClassFlags operator&(const ClassFlags &o) const {
        return {bijunctive && o.bijunctive, horn && o.horn,      dual_horn && o.dual_horn,
                linear && o.linear,         zero_valid && o.zero_valid,
                one_valid && o.one_valid};
    }
    friend bool operator==(const ClassFlags &, const ClassFlags &) = default;
};

inline ClassFlags all_flags() { return {true, true, true, true, true, true}; }

/// Closure-based classification. In the mask encoding (bit = TRUE = -1):
/// logical AND of tuples is bitwise AND, OR is bitwise OR, coordinatewise
/// majority and XOR are the bit operations, so the polymorphism tests are
/// direct bit arithmetic on member indices.
inline ClassFlags classify_relation(const Relation &r) {
    ClassFlags f;
    auto members = r.member_indices();
    std::uint32_t top = (std::uint32_t(1) << r.arity) - 1;
    f.zero_valid = r.contains((std::uint32_t)0);
    f.one_valid = r.contains(top);

    f.horn = true; // closed under logical AND (max in the +-1 order)
    f.dual_horn = true;
    for (std::size_t i = 0; i < members.size() && (f.horn || f.dual_horn); ++i) {
        for (std::size_t j = i + 1; j < members.size(); ++j) {
            if (f.horn && !r.contains(members[i] & members[j])) {
                f.horn = false;
            }
            if (f.dual_horn && !r.contains(members[i] | members[j])) {
                f.dual_horn = false;
            }
            if (!f.horn && !f.dual_horn) {
                break;
            }
        }
    }

    f.bijunctive = true; // closed under coordinatewise majority
    for (std::size_t i = 0; i < members.size() && f.bijunctive; ++i) {
        for (std::size_t j = i + 1; j < members.size() && f.bijunctive; ++j) {
            for (std::size_t l = j + 1; l < members.size(); ++l) {
                std::uint32_t maj = (members[i] & members[j]) | (members[i] & members[l]) |
                                    (members[j] & members[l]);
                if (!r.contains(maj)) {
                    f.bijunctive = false;
                    break;
                }
            }
        }
    }

    f.linear = true; // empty or a coset: {r0 ^ r} closed under XOR
    if (!members.empty()) {
        std::uint32_t r0 = members[0];
        for (std::size_t i = 0; i < members.size() && f.linear; ++i) {
            for (std::size_t j = i; j < members.size(); ++j) {
                if (!r.contains(r0 ^ (members[i] ^ r0) ^ (members[j] ^ r0))) {
                    f.linear = false;
                    break;
                }
            }
        }
    }
    return f;
}

// ---------------------------------------------------------------------------
// Certificates: the defining system in the class's shape.

struct CoordLiteral {
    int coord = 0;
    Sign satsign = -1; // the coordinate value making the literal true
    bool positive() const { return satsign == -1; }
    friend bool operator==(const CoordLiteral &, const CoordLiteral &) = default;
};
using CoordClause = std::vector<CoordLiteral>;

struct ParityEquation {
    std::vector<int> coords;
    Sign rhs = +1;
    friend bool operator==(const ParityEquation &, const ParityEquation &) = default;
};

enum class CnfShape { Bijunctive, Horn, DualHorn };

namespace detail {

inline bool clause_satisfied(const CoordClause &cl, std::uint32_t tuple) {
    for (const auto &lit : cl) {
        Sign v = (tuple & (1u << lit.coord)) ? -1 : +1;
        if (v == lit.satsign) {
            return true;
        }
    }
    return false;
}

inline bool clause_entailed(const CoordClause &cl, const std::vector<std::uint32_t> &members) {
    for (std::uint32_t m : members) {
        if (!clause_satisfied(cl, m)) {
            return false;
        }
    }
    return true;
}

inline bool shape_ok(const CoordClause &cl, CnfShape shape) {
    int pos = 0, neg = 0;
    for (const auto &lit : cl) {
        (lit.positive() ? pos : neg) += 1;
    }
    switch (shape) {
        case CnfShape::Bijunctive: return cl.size() <= 2;
        case CnfShape::Horn: return pos <= 1;
        case CnfShape::DualHorn: return neg <= 1;
    }
    return false;
}

inline bool subsumes(const CoordClause &small, const CoordClause &big) {
    for (const auto &lit : small) {
        if (std::find(big.begin(), big.end(), lit) == big.end()) {
            return false;
        }
    }
    return true;
}

} // namespace detail

/// All minimal entailed clauses of the given shape whose conjunction equals R,
/// or nullopt when the relation is not definable in that shape. This is the
/// definitional check: a shape-CNF for R exists iff the conjunction of every
/// entailed shape-clause cuts R out exactly.
inline std::optional<std::vector<CoordClause>> cnf_certificate(const Relation &r,
                                                               CnfShape shape) {
    if (r.arity > 10) {
        throw ResourceError("certificate reconstruction capped at arity 10");
    }
    auto members = r.member_indices();
    int k = r.arity;
    std::vector<CoordClause> minimal;
    std::vector<char> conj(std::size_t(1) << k, 1);
    // Subsets in increasing-popcount order so subsumption pruning works.
    std::vector<std::uint32_t> subsets;
    for (std::uint32_t t = 0; t < (std::uint32_t(1) << k); ++t) {
        subsets.push_back(t);
    }
    std::sort(subsets.begin(), subsets.end(), [](std::uint32_t a, std::uint32_t b) {
        int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
        return pa != pb ? pa < pb : a < b;
    });
    for (std::uint32_t t : subsets) {
        int sz = __builtin_popcount(t);
        std::vector<int> coords;
        for (int i = 0; i < k; ++i) {
            if (t & (1u << i)) {
                coords.push_back(i);
            }
        }
        for (std::uint32_t pol = 0; pol < (std::uint32_t(1) << sz); ++pol) {
            CoordClause cl;
            for (int i = 0; i < sz; ++i) {
                cl.push_back({coords[(std::size_t)i], (pol & (1u << i)) ? -1 : +1});
            }
            if (!detail::shape_ok(cl, shape) || !detail::clause_entailed(cl, members)) {
                continue;
            }
            bool redundant = false;
            for (const auto &prev : minimal) {
                if (detail::subsumes(prev, cl)) {
                    redundant = true;
                    break;
                }
            }
            if (redundant) {
                continue;
            }
            minimal.push_back(cl);
            for (std::uint32_t idx = 0; idx < conj.size(); ++idx) {
                if (conj[idx] && !detail::clause_satisfied(cl, idx)) {
                    conj[idx] = 0;
                }
            }
        }
    }
    for (std::uint32_t idx = 0; idx < conj.size(); ++idx) {
        if ((conj[idx] != 0) != r.contains(idx)) {
            return std::nullopt;
        }
    }
    return minimal;
}

/// Defining parity equations for an affine relation, or nullopt. For empty
/// relations the certificate is the inconsistent equation with empty support
/// and rhs -1.
inline std::optional<std::vector<ParityEquation>> linear_certificate(const Relation &r) {
    auto members = r.member_indices();
    int k = r.arity;
    if (members.empty()) {
        return std::vector<ParityEquation>{{{}, -1}};
    }
    std::uint32_t r0 = members[0];
    // Row-reduce the difference set to a basis of the direction space.
    std::vector<std::uint32_t> basis;
    for (std::uint32_t m : members) {
        std::uint32_t d = m ^ r0;
        for (std::uint32_t b : basis) {
            std::uint32_t low = b & (~b + 1);
            if (d & low) {
                d ^= b;
            }
        }
        if (d) {
            basis.push_back(d);
        }
    }
    if ((std::size_t(1) << basis.size()) != members.size()) {
        return std::nullopt;
    }
    // Parity checks: vectors h orthogonal to every basis element.
    std::vector<ParityEquation> eqs;
    for (std::uint32_t h = 1; h < (std::uint32_t(1) << k); ++h) {
        bool orth = true;
        for (std::uint32_t b : basis) {
            if (__builtin_popcount(h & b) % 2 != 0) {
                orth = false;
                break;
            }
        }
        if (!orth) {
            continue;
        }
        // Keep only pivot-free rows of a reduced dual basis to avoid
        // emitting all 2^(k-dim) checks.
        bool reduced = true;
        for (const auto &prev : eqs) {
            std::uint32_t pm = 0;
            for (int c : prev.coords) {
                pm |= (1u << c);
            }
            std::uint32_t low = pm & (~pm + 1);
            if (h & low) {
                reduced = false;
                break;
            }
        }
        if (!reduced) {
            continue;
        }
        ParityEquation eq;
        for (int i = 0; i < k; ++i) {
            if (h & (1u << i)) {
                eq.coords.push_back(i);
            }
        }
        eq.rhs = (__builtin_popcount(h & r0) % 2 == 0) ? +1 : -1;
        eqs.push_back(std::move(eq));
        // Verify each member satisfies it (defensive during construction).
    }
    // Final exactness check.
    for (std::uint32_t idx = 0; idx < (std::uint32_t(1) << k); ++idx) {
        bool sat = true;
        for (const auto &eq : eqs) {
            std::uint32_t hm = 0;
            for (int c : eq.coords) {
                hm |= (1u << c);
            }
            Sign v = (__builtin_popcount(idx & hm) % 2 == 0) ? +1 : -1;
            if (v != eq.rhs) {
                sat = false;
                break;
            }
        }
        if (sat != r.contains(idx)) {
            return std::nullopt;
        }
    }
    return eqs;
}

// ---------------------------------------------------------------------------
// Specialization: plug scope constants into the relation and merge repeated
// variables, leaving a relation over the scope's distinct variables.

struct SpecializedSystem {
    std::vector<std::pair<std::vector<std::string>, Relation>> items;
    bool contradiction = false; // some all-constant constraint fails
};

inline SpecializedSystem specialize(const Bcs &b) {
    SpecializedSystem out;
    for (const auto &c : b.all_constraints()) {
        std::vector<std::string> xs = scope_vars(c.scope);
        if (xs.empty()) {
            Assignment none;
            if (!c.relation.contains(eval_scope_assignment(none, c.scope))) {
                out.contradiction = true;
            }
            continue;
        }
        int k = (int)xs.size();
        Relation spec = Relation::empty(k);
        for (std::uint32_t idx = 0; idx < (std::uint32_t(1) << k); ++idx) {
            Assignment phi;
            for (int i = 0; i < k; ++i) {
                phi[xs[(std::size_t)i]] = (idx & (1u << i)) ? -1 : +1;
            }
            if (c.relation.contains(eval_scope_assignment(phi, c.scope))) {
                spec.table[idx] = 1;
            }
        }
        out.items.push_back({std::move(xs), std::move(spec)});
    }
    return out;
}

/// Conjunction of per-relation flags across the whole system (after constant
/// specialization).
inline ClassFlags classify_bcs(const Bcs &b) {
    ClassFlags f = all_flags();
    for (const auto &[xs, r] : specialize(b).items) {
        f = f & classify_relation(r);
    }
    return f;
}

struct NotSchaeferError : std::runtime_error {
    NotSchaeferError() : std::runtime_error("no tractable class applies to this system") {}
};

namespace detail {

struct NamedClause {
    std::vector<std::pair<int, Sign>> lits; // (variable index, satisfying sign)
};

/// 2SAT decision via implication-graph strongly connected components.
inline bool two_sat_decide(int n, const std::vector<NamedClause> &clauses,
                           const std::vector<std::pair<int, Sign>> &units) {
    // literal id: 2*v for (v = +1), 2*v+1 for (v = -1)
    auto lid = [](int v, Sign s) { return 2 * v + (s == -1 ? 1 : 0); };
    int m = 2 * n;
    std::vector<std::vector<int>> adj((std::size_t)m);
    auto imply = [&](int a, int b) { adj[(std::size_t)a].push_back(b); };
    for (const auto &cl : clauses) {
        if (cl.lits.empty()) {
            return false;
        }
        if (cl.lits.size() == 1) {
            auto [v, s] = cl.lits[0];
            imply(lid(v, -s), lid(v, s));
        } else {
            auto [v1, s1] = cl.lits[0];
            auto [v2, s2] = cl.lits[1];
            imply(lid(v1, -s1), lid(v2, s2));
            imply(lid(v2, -s2), lid(v1, s1));
        }
    }
    for (auto [v, s] : units) {
        imply(lid(v, -s), lid(v, s));
    }
    // Tarjan SCC, iterative.
    std::vector<int> idx((std::size_t)m, -1), low((std::size_t)m, 0), comp((std::size_t)m, -1);
    std::vector<char> onstk((std::size_t)m, 0);
    std::vector<int> stk;
    int counter = 0, ncomp = 0;
    for (int s0 = 0; s0 < m; ++s0) {
        if (idx[(std::size_t)s0] != -1) {
            continue;
        }
        std::vector<std::pair<int, std::size_t>> call{{s0, 0}};
        while (!call.empty()) {
            auto &[u, ei] = call.back();
            if (ei == 0) {
                idx[(std::size_t)u] = low[(std::size_t)u] = counter++;
                stk.push_back(u);
                onstk[(std::size_t)u] = 1;
            }
            if (ei < adj[(std::size_t)u].size()) {
                int v = adj[(std::size_t)u][ei++];
                if (idx[(std::size_t)v] == -1) {
                    call.push_back({v, 0});
                } else if (onstk[(std::size_t)v]) {
                    low[(std::size_t)u] = std::min(low[(std::size_t)u], idx[(std::size_t)v]);
                }
            } else {
                if (low[(std::size_t)u] == idx[(std::size_t)u]) {
                    while (true) {
                        int w = stk.back();
                        stk.pop_back();
                        onstk[(std::size_t)w] = 0;
                        comp[(std::size_t)w] = ncomp;
                        if (w == u) {
                            break;
                        }
                    }
                    ++ncomp;
                }
                int child = u;
                call.pop_back();
                if (!call.empty()) {
                    int pu = call.back().first;
                    low[(std::size_t)pu] = std::min(low[(std::size_t)pu], low[(std::size_t)child]);
                }
            }
        }
    }
    for (int v = 0; v < n; ++v) {
        if (comp[(std::size_t)(2 * v)] == comp[(std::size_t)(2 * v + 1)]) {
            return false;
        }
    }
    return true;
}

/// Horn (forced = -1) or dual-Horn (forced = +1) decision by unit
/// propagation toward the pointwise-minimal model.
inline bool horn_decide(int n, const std::vector<NamedClause> &clauses,
                        const std::vector<std::pair<int, Sign>> &units, Sign forced) {
    std::vector<char> in((std::size_t)n, 0); // var currently assigned `forced`
    std::vector<NamedClause> all = clauses;
    for (auto [v, s] : units) {
        all.push_back({{{v, s}}});
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto &cl : all) {
            bool sat = false;
            int head = -1; // the unique literal with satsign == forced, if any
            for (auto [v, s] : cl.lits) {
                if (s == forced) {
                    if (in[(std::size_t)v]) {
                        sat = true;
                        break;
                    }
                    head = v;
                } else if (!in[(std::size_t)v]) {
                    sat = true; // still satisfied by this literal at the fixpoint
                    break;
                }
            }
            if (sat) {
                continue;
            }
            if (head < 0) {
                return false; // every literal falsified by the minimal model
            }
            if (!in[(std::size_t)head]) {
                in[(std::size_t)head] = 1;
                changed = true;
            }
        }
    }
    return true;
}

/// F2 linear consistency for parity constraints (support, rhs) plus units.
inline bool linear_decide(int n, const std::vector<std::pair<std::vector<int>, Sign>> &eqs,
                          const std::vector<std::pair<int, Sign>> &units) {
    std::vector<std::vector<char>> rows;
    auto add_row = [&](const std::vector<int> &coords, Sign rhs) {
        std::vector<char> row((std::size_t)n + 1, 0);
        for (int c : coords) {
            row[(std::size_t)c] ^= 1;
        }
        row[(std::size_t)n] = rhs == -1 ? 1 : 0;
        rows.push_back(std::move(row));
    };
    for (const auto &[coords, rhs] : eqs) {
        add_row(coords, rhs);
    }
    for (auto [v, s] : units) {
        add_row({v}, s);
    }
    std::size_t rank = 0;
    for (int col = 0; col < n && rank < rows.size(); ++col) {
        std::size_t piv = rank;
        while (piv < rows.size() && !rows[piv][(std::size_t)col]) {
            ++piv;
        }
        if (piv == rows.size()) {
            continue;
        }
        std::swap(rows[piv], rows[rank]);
        for (std::size_t r2 = 0; r2 < rows.size(); ++r2) {
            if (r2 != rank && rows[r2][(std::size_t)col]) {
                for (int c2 = col; c2 <= n; ++c2) {
                    rows[r2][(std::size_t)c2] ^= rows[rank][(std::size_t)c2];
                }
            }
        }
        ++rank;
    }
    for (const auto &row : rows) {
        bool allzero = true;
        for (int c = 0; c < n; ++c) {
            if (row[(std::size_t)c]) {
                allzero = false;
                break;
            }
        }
        if (allzero && row[(std::size_t)n]) {
            return false;
        }
    }
    return true;
}

} // namespace detail

/// Polynomial-time satisfiability for Schaefer-class systems. Dispatches on
/// the classification, then pins the lexicographically-first witness by
/// greedy fixing with the class decision procedure. Throws NotSchaeferError
/// when no tractable class applies.
inline std::optional<Assignment> solve_schaefer(const Bcs &b) {
    SpecializedSystem spec = specialize(b);
    if (spec.contradiction) {
        return std::nullopt;
    }
    ClassFlags flags = all_flags();
    for (const auto &[xs, r] : spec.items) {
        flags = flags & classify_relation(r);
    }
    if (!flags.any_schaefer()) {
        throw NotSchaeferError();
    }
    int n = (int)b.vars.size();
    std::map<std::string, int> vid;
    for (int i = 0; i < n; ++i) {
        vid[b.vars[(std::size_t)i]] = i;
    }

    std::function<bool(const std::vector<std::pair<int, Sign>> &)> decide;
    std::vector<detail::NamedClause> clauses;
    std::vector<std::pair<std::vector<int>, Sign>> parities;
    auto compile_cnf = [&](CnfShape shape) {
        for (const auto &[xs, r] : spec.items) {
            auto cert = cnf_certificate(r, shape);
            if (!cert) {
                throw std::logic_error("classification and certificate disagree");
            }
            for (const auto &cl : *cert) {
                detail::NamedClause nc;
                for (const auto &lit : cl) {
                    nc.lits.push_back({vid[xs[(std::size_t)lit.coord]], lit.satsign});
                }
                clauses.push_back(std::move(nc));
            }
        }
    };
    if (flags.bijunctive) {
        compile_cnf(CnfShape::Bijunctive);
        decide = [&](const std::vector<std::pair<int, Sign>> &units) {
            return detail::two_sat_decide(n, clauses, units);
        };
    } else if (flags.horn) {
        compile_cnf(CnfShape::Horn);
        decide = [&](const std::vector<std::pair<int, Sign>> &units) {
            return detail::horn_decide(n, clauses, units, -1);
        };
    } else if (flags.dual_horn) {
        compile_cnf(CnfShape::DualHorn);
        decide = [&](const std::vector<std::pair<int, Sign>> &units) {
            return detail::horn_decide(n, clauses, units, +1);
        };
    } else {
        for (const auto &[xs, r] : spec.items) {
            auto cert = linear_certificate(r);
            if (!cert) {
                throw std::logic_error("classification and certificate disagree");
            }
            for (const auto &eq : *cert) {
                std::vector<int> coords;
                for (int c : eq.coords) {
                    coords.push_back(vid[xs[(std::size_t)c]]);
                }
                parities.push_back({std::move(coords), eq.rhs});
            }
        }
        decide = [&](const std::vector<std::pair<int, Sign>> &units) {
            return detail::linear_decide(n, parities, units);
        };
    }

    std::vector<std::pair<int, Sign>> fixed;
    if (!decide(fixed)) {
        return std::nullopt;
    }
    for (int v = 0; v < n; ++v) {
        fixed.push_back({v, +1});
        if (!decide(fixed)) {
            fixed.back().second = -1;
        }
    }
    Assignment phi;
    for (auto [v, s] : fixed) {
        phi[b.vars[(std::size_t)v]] = s;
    }
    if (!is_satisfying(b, phi)) {
        throw std::logic_error("schaefer witness failed validation");
    }
    return phi;
}

} // namespace bcsalg

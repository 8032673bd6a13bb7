#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "bcsalg/common.hpp"

namespace bcsalg {

inline constexpr int kMaxArity = 16;
inline constexpr int kDefaultBruteForceCap = 24;

/// A boolean relation of arity k: a subset of {+-1}^k stored as a full
/// membership table of 2^k entries, indexed as in index_of_tuple.
struct Relation {
    int arity = 0;
    std::vector<char> table; // table[idx] != 0 iff the tuple is a member

    Relation() = default;
    Relation(int k, std::vector<char> t) : arity(k), table(std::move(t)) {
        check_shape();
    }

    static Relation empty(int k) {
        Relation r;
        r.arity = k;
        r.table.assign(std::size_t(1) << k, 0);
        r.check_shape();
        return r;
    }
    static Relation full(int k) {
        Relation r = empty(k);
        std::fill(r.table.begin(), r.table.end(), 1);
        return r;
    }
    /// Members from an explicit list of sign tuples.
    static Relation of_members(int k, const std::vector<std::vector<Sign>> &members) {
        Relation r = empty(k);
        for (const auto &m : members) {
            if ((int)m.size() != k) {
                throw std::invalid_argument("relation member has wrong arity");
            }
            r.table[index_of_tuple(m)] = 1;
        }
        return r;
    }
    /// Tuples whose coordinate product equals rhs.
    static Relation parity(int k, Sign rhs) {
        Relation r = empty(k);
        for (std::uint32_t idx = 0; idx < r.table.size(); ++idx) {
            int prod = (__builtin_popcount(idx) % 2 == 0) ? +1 : -1;
            r.table[idx] = (prod == rhs) ? 1 : 0;
        }
        return r;
    }
    /// Tuples with exactly one coordinate equal to -1.
    static Relation exactly_one_true(int k) {
        Relation r = empty(k);
        for (std::uint32_t idx = 0; idx < r.table.size(); ++idx) {
            r.table[idx] = (__builtin_popcount(idx) == 1) ? 1 : 0;
        }
        return r;
    }
    /// Disjunction of literals; sat_signs[i] is the value of coordinate i that
    /// makes literal i true.
    static Relation clause(const std::vector<Sign> &sat_signs) {
        int k = (int)sat_signs.size();
        Relation r = empty(k);
        for (std::uint32_t idx = 0; idx < r.table.size(); ++idx) {
            auto t = tuple_of_index(idx, k);
            for (int i = 0; i < k; ++i) {
                if (t[(std::size_t)i] == sat_signs[(std::size_t)i]) {
                    r.table[idx] = 1;
                    break;
                }
            }
        }
        return r;
    }

    bool contains(std::uint32_t idx) const { return table[idx] != 0; }
    bool contains(const std::vector<Sign> &t) const {
        if ((int)t.size() != arity) {
            throw std::invalid_argument("tuple arity mismatch");
        }
        return contains(index_of_tuple(t));
    }
    std::size_t member_count() const {
        std::size_t n = 0;
        for (char c : table) {
            n += (c != 0);
        }
        return n;
    }
    std::vector<std::uint32_t> member_indices() const {
        std::vector<std::uint32_t> out;
        for (std::uint32_t idx = 0; idx < table.size(); ++idx) {
            if (table[idx]) {
                out.push_back(idx);
            }
        }
        return out;
    }

    friend bool operator==(const Relation &a, const Relation &b) {
        return a.arity == b.arity && a.table == b.table;
    }
    friend auto operator<=>(const Relation &a, const Relation &b) = default;

  private:
    void check_shape() const {
        if (arity < 1 || arity > kMaxArity) {
            throw ResourceError("relation arity out of range [1," +
                                std::to_string(kMaxArity) + "]: " + std::to_string(arity));
        }
        if (table.size() != (std::size_t(1) << arity)) {
            throw std::invalid_argument("relation table has wrong size");
        }
    }
};

/// One entry of a scope: a variable name or a sign constant.
struct Term {
    bool is_const = false;
    Sign constant = +1;
    std::string var;

    static Term variable(std::string name) {
        Term t;
        t.is_const = false;
        t.var = std::move(name);
        return t;
    }
    static Term of_const(Sign s) {
        if (!is_sign(s)) {
            throw std::invalid_argument("constant term must be +-1");
        }
        Term t;
        t.is_const = true;
        t.constant = s;
        return t;
    }
    friend bool operator==(const Term &, const Term &) = default;
    friend auto operator<=>(const Term &, const Term &) = default;
};

/// Ordered sequence of terms; repeats are allowed.
using Scope = std::vector<Term>;

inline Scope scope_of_vars(const std::vector<std::string> &names) {
    Scope s;
    s.reserve(names.size());
    for (const auto &n : names) {
        s.push_back(Term::variable(n));
    }
    return s;
}

/// The distinct variables of a scope, in order of first occurrence.
inline std::vector<std::string> scope_vars(const Scope &s) {
    std::vector<std::string> out;
    for (const auto &t : s) {
        if (!t.is_const && std::find(out.begin(), out.end(), t.var) == out.end()) {
            out.push_back(t.var);
        }
    }
    return out;
}

struct Constraint {
    Scope scope;
    Relation relation;

    Constraint() = default;
    Constraint(Scope s, Relation r) : scope(std::move(s)), relation(std::move(r)) {
        if ((int)scope.size() != relation.arity) {
            throw std::invalid_argument("scope length differs from relation arity");
        }
    }
    friend bool operator==(const Constraint &, const Constraint &) = default;
};

/// A block of jointly measurable variables together with the constraints that
/// live on them.
struct Context {
    std::vector<std::string> vars;
    std::vector<Constraint> constraints;

    bool has_var(const std::string &v) const {
        return std::find(vars.begin(), vars.end(), v) != vars.end();
    }
    friend bool operator==(const Context &, const Context &) = default;
};

/// A boolean constraint system with contexts.
struct Bcs {
    std::vector<std::string> vars;
    std::vector<Context> contexts;

    int var_index(const std::string &v) const {
        auto it = std::find(vars.begin(), vars.end(), v);
        if (it == vars.end()) {
            throw std::invalid_argument("unknown variable: " + v);
        }
        return (int)(it - vars.begin());
    }
    bool has_var(const std::string &v) const {
        return std::find(vars.begin(), vars.end(), v) != vars.end();
    }
    std::vector<Constraint> all_constraints() const {
        std::vector<Constraint> out;
        for (const auto &c : contexts) {
            out.insert(out.end(), c.constraints.begin(), c.constraints.end());
        }
        return out;
    }
    friend bool operator==(const Bcs &, const Bcs &) = default;
};

using Assignment = std::map<std::string, Sign>;

inline void validate(const Bcs &b) {
    std::set<std::string> seen;
    for (const auto &v : b.vars) {
        if (!seen.insert(v).second) {
            throw std::invalid_argument("duplicate variable name: " + v);
        }
    }
    for (const auto &ctx : b.contexts) {
        for (const auto &u : ctx.vars) {
            if (!seen.count(u)) {
                throw std::invalid_argument("context variable not declared: " + u);
            }
        }
        for (const auto &c : ctx.constraints) {
            if ((int)c.scope.size() != c.relation.arity) {
                throw std::invalid_argument("scope length differs from relation arity");
            }
            for (const auto &t : c.scope) {
                if (!t.is_const && !ctx.has_var(t.var)) {
                    throw std::invalid_argument("scope variable outside its context: " + t.var);
                }
            }
        }
    }
}

/// phi(S): constants map to themselves, variables through phi.
inline std::vector<Sign> eval_scope_assignment(const Assignment &phi, const Scope &s) {
    std::vector<Sign> out;
    out.reserve(s.size());
    for (const auto &t : s) {
        if (t.is_const) {
            out.push_back(t.constant);
        } else {
            auto it = phi.find(t.var);
            if (it == phi.end()) {
                throw std::invalid_argument("scope variable unbound in assignment: " + t.var);
            }
            out.push_back(it->second);
        }
    }
    return out;
}

inline bool satisfies(const Assignment &phi, const Constraint &c) {
    return c.relation.contains(eval_scope_assignment(phi, c.scope));
}

/// True iff phi satisfies every constraint in every context. phi must be total
/// on b.vars.
inline bool is_satisfying(const Bcs &b, const Assignment &phi) {
    for (const auto &v : b.vars) {
        if (!phi.count(v)) {
            throw std::invalid_argument("assignment does not cover variable: " + v);
        }
    }
    for (const auto &ctx : b.contexts) {
        for (const auto &c : ctx.constraints) {
            if (!satisfies(phi, c)) {
                return false;
            }
        }
    }
    return true;
}

/// Satisfying restriction test for a single context: phi is an assignment to
/// ctx.vars (at least).
inline bool context_satisfying(const Context &ctx, const Assignment &phi) {
    for (const auto &c : ctx.constraints) {
        if (!satisfies(phi, c)) {
            return false;
        }
    }
    return true;
}

namespace detail {

/// Assignments are enumerated in lexicographic order over b.vars, with +1
/// before -1: index bit (n-1-i) carries variable i.
inline Assignment assignment_of_rank(const std::vector<std::string> &vars, std::uint64_t rank) {
    Assignment phi;
    int n = (int)vars.size();
    for (int i = 0; i < n; ++i) {
        bool neg = (rank >> (n - 1 - i)) & 1;
        phi[vars[(std::size_t)i]] = neg ? -1 : +1;
    }
    return phi;
}

} // namespace detail

/// Lexicographically-first satisfying assignment, or nullopt. Enumeration may
/// be partitioned across workers; the winner is the minimal rank regardless of
/// partitioning.
inline std::optional<Assignment> brute_force_sat(const Bcs &b,
                                                 int max_vars = kDefaultBruteForceCap,
                                                 int workers = 1) {
    int n = (int)b.vars.size();
    if (n > max_vars) {
        throw ResourceError("brute force over " + std::to_string(n) + " variables exceeds cap " +
                            std::to_string(max_vars));
    }
    std::uint64_t total = std::uint64_t(1) << n;
    auto scan = [&](std::uint64_t lo, std::uint64_t hi) -> std::uint64_t {
        for (std::uint64_t r = lo; r < hi; ++r) {
            if (is_satisfying(b, detail::assignment_of_rank(b.vars, r))) {
                return r;
            }
        }
        return UINT64_MAX;
    };
    std::uint64_t best = UINT64_MAX;
    if (workers <= 1 || total < 1024) {
        best = scan(0, total);
    } else {
        int w = std::min<int>(workers, 64);
        std::vector<std::uint64_t> found((std::size_t)w, UINT64_MAX);
        std::vector<std::thread> pool;
        std::uint64_t chunk = (total + (std::uint64_t)w - 1) / (std::uint64_t)w;
        for (int i = 0; i < w; ++i) {
            std::uint64_t lo = chunk * (std::uint64_t)i;
            std::uint64_t hi = std::min(total, lo + chunk);
            pool.emplace_back([&, i, lo, hi] { found[(std::size_t)i] = scan(lo, hi); });
        }
        for (auto &t : pool) {
            t.join();
        }
        best = *std::min_element(found.begin(), found.end());
    }
    if (best == UINT64_MAX) {
        return std::nullopt;
    }
    return detail::assignment_of_rank(b.vars, best);
}

/// One context per constraint, holding exactly the variables of its scope.
inline Bcs default_contexts(std::vector<std::string> vars, const std::vector<Constraint> &cs) {
    Bcs b;
    b.vars = std::move(vars);
    for (const auto &c : cs) {
        Context ctx;
        ctx.vars = scope_vars(c.scope);
        for (const auto &v : ctx.vars) {
            if (!b.has_var(v)) {
                throw std::invalid_argument("constraint references undeclared variable: " + v);
            }
        }
        ctx.constraints.push_back(c);
        b.contexts.push_back(std::move(ctx));
    }
    validate(b);
    return b;
}

/// Replace each context by the single constraint whose relation is the
/// satisfying set of that context.
inline Bcs contexts_to_constraints(const Bcs &b) {
    Bcs out;
    out.vars = b.vars;
    for (const auto &ctx : b.contexts) {
        int k = (int)ctx.vars.size();
        if (k > kMaxArity) {
            throw ResourceError("context too large to flatten into one relation: " +
                                std::to_string(k));
        }
        Relation r = Relation::empty(std::max(k, 1));
        if (k == 0) {
            // A variable-free context is vacuously satisfiable unless some
            // all-constant constraint fails.
            Assignment none;
            bool ok = context_satisfying(ctx, none);
            Context nc;
            if (!ok) {
                nc.vars = {};
                // Encode the contradiction on a borrowed variable if possible.
                if (b.vars.empty()) {
                    throw std::invalid_argument("contradictory constant context in empty system");
                }
                nc.vars = {b.vars[0]};
                nc.constraints.emplace_back(scope_of_vars(nc.vars), Relation::empty(1));
            }
            out.contexts.push_back(std::move(nc));
            continue;
        }
        for (std::uint32_t idx = 0; idx < (std::uint32_t(1) << k); ++idx) {
            Assignment phi;
            for (int i = 0; i < k; ++i) {
                phi[ctx.vars[(std::size_t)i]] = (idx & (1u << i)) ? -1 : +1;
            }
            if (context_satisfying(ctx, phi)) {
                r.table[idx] = 1;
            }
        }
        Context nc;
        nc.vars = ctx.vars;
        nc.constraints.emplace_back(scope_of_vars(ctx.vars), std::move(r));
        out.contexts.push_back(std::move(nc));
    }
    return out;
}

/// The Mermin-Peres magic square: nine variables in a 3x3 grid, row products
/// +1, column products -1, one context per constraint.
inline Bcs gen_magic_square() {
    std::vector<std::string> vars;
    for (int i = 1; i <= 9; ++i) {
        vars.push_back("x" + std::to_string(i));
    }
    auto line = [&](int a, int bq, int c, Sign rhs) {
        return Constraint(Scope{Term::variable(vars[(std::size_t)a - 1]),
                                Term::variable(vars[(std::size_t)bq - 1]),
                                Term::variable(vars[(std::size_t)c - 1])},
                          Relation::parity(3, rhs));
    };
    std::vector<Constraint> cs;
    cs.push_back(line(1, 2, 3, +1));
    cs.push_back(line(4, 5, 6, +1));
    cs.push_back(line(7, 8, 9, +1));
    cs.push_back(line(1, 4, 7, -1));
    cs.push_back(line(2, 5, 8, -1));
    cs.push_back(line(3, 6, 9, -1));
    return default_contexts(vars, cs);
}

/// Simple undirected graph on vertices 0..n-1.
struct Graph {
    int n = 0;
    std::set<std::pair<int, int>> edges; // normalized u < v

    static Graph complete(int n) {
        Graph g;
        g.n = n;
        for (int u = 0; u < n; ++u) {
            for (int v = u + 1; v < n; ++v) {
                g.edges.insert({u, v});
            }
        }
        return g;
    }
    void add_edge(int u, int v) {
        if (u == v || u < 0 || v < 0 || u >= n || v >= n) {
            throw std::invalid_argument("bad edge");
        }
        edges.insert({std::min(u, v), std::max(u, v)});
    }
    bool adjacent(int u, int v) const {
        if (u == v) {
            return false;
        }
        return edges.count({std::min(u, v), std::max(u, v)}) > 0;
    }
};

inline std::string graph_hom_var(int u, int a) {
    return "x" + std::to_string(u) + "_" + std::to_string(a);
}

/// The graph homomorphism system: variables x_{ua}, forbidden-pair constraints
/// and one exactly-one-true constraint per vertex of G.
inline Bcs gen_graph_hom(const Graph &g, const Graph &h) {
    if (g.n < 1 || h.n < 1) {
        throw std::invalid_argument("graphs must be nonempty");
    }
    if (h.n > kMaxArity) {
        throw ResourceError("target graph too large: exactly-one relation arity " +
                            std::to_string(h.n));
    }
    std::vector<std::string> vars;
    for (int u = 0; u < g.n; ++u) {
        for (int a = 0; a < h.n; ++a) {
            vars.push_back(graph_hom_var(u, a));
        }
    }
    auto forbidden = [&](int u, int a, int v, int bb) {
        if (u == v) {
            return a != bb;
        }
        return g.adjacent(u, v) && !h.adjacent(a, bb);
    };
    Relation nand = Relation::full(2);
    nand.table[index_of_tuple({-1, -1})] = 0;
    std::vector<Constraint> cs;
    // Unordered pair enumeration; (u,a) strictly before (v,b).
    for (int u = 0; u < g.n; ++u) {
        for (int v = u; v < g.n; ++v) {
            for (int a = 0; a < h.n; ++a) {
                int b0 = (u == v) ? a + 1 : 0;
                for (int bb = b0; bb < h.n; ++bb) {
                    if (forbidden(u, a, v, bb)) {
                        cs.emplace_back(Scope{Term::variable(graph_hom_var(u, a)),
                                              Term::variable(graph_hom_var(v, bb))},
                                        nand);
                    }
                }
            }
        }
    }
    for (int u = 0; u < g.n; ++u) {
        Scope s;
        for (int a = 0; a < h.n; ++a) {
            s.push_back(Term::variable(graph_hom_var(u, a)));
        }
        cs.emplace_back(std::move(s), Relation::exactly_one_true(h.n));
    }
    return default_contexts(vars, cs);
}

/// BCS of the F2-linear system Ax=b: one context per row over its support,
/// carrying the parity relation with right-hand side (-1)^{b_i}.
inline Bcs gen_linear(const std::vector<std::vector<int>> &a, const std::vector<int> &rhs) {
    std::size_t m = a.size();
    if (rhs.size() != m) {
        throw std::invalid_argument("matrix/vector size mismatch");
    }
    std::size_t n = m == 0 ? 0 : a[0].size();
    std::vector<std::string> vars;
    for (std::size_t j = 0; j < n; ++j) {
        vars.push_back("x" + std::to_string(j + 1));
    }
    std::vector<Constraint> cs;
    for (std::size_t i = 0; i < m; ++i) {
        if (a[i].size() != n) {
            throw std::invalid_argument("ragged matrix");
        }
        Scope s;
        for (std::size_t j = 0; j < n; ++j) {
            if (a[i][j] % 2 != 0) {
                s.push_back(Term::variable(vars[j]));
            }
        }
        if (s.empty()) {
            if (rhs[i] % 2 == 0) {
                continue; // 0 = 0, trivially true
            }
            if (vars.empty()) {
                throw std::invalid_argument("inconsistent empty row in variable-free system");
            }
            cs.emplace_back(Scope{Term::variable(vars[0])}, Relation::empty(1));
            continue;
        }
        Sign want = (rhs[i] % 2 == 0) ? +1 : -1;
        int k = (int)s.size();
        cs.emplace_back(std::move(s), Relation::parity(k, want));
    }
    return default_contexts(vars, cs);
}

} // namespace bcsalg

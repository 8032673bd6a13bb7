#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "bcsalg/model.hpp"
#include "bcsalg/present.hpp"
#include "bcsalg/rational.hpp"
#include "bcsalg/zalgebra.hpp"

namespace bcsalg {

/// A signed word over the generators of a presentation; the empty word is the
/// identity.
struct Word {
    int sign = +1;
    std::vector<std::string> letters;

    friend bool operator==(const Word &, const Word &) = default;

    std::string str() const {
        std::string out = sign < 0 ? "-" : "";
        if (letters.empty()) {
            return out + "1";
        }
        for (std::size_t i = 0; i < letters.size(); ++i) {
            out += (i ? " " : "") + letters[i];
        }
        return out;
    }
};

/// One rewrite step. Kinds:
///   Cancel  - delete the equal adjacent pair at pos
///   Swap    - exchange the adjacent pair at pos (shared-context commutation)
///   Relator - replace the matched subword at pos by rule `rule`'s replacement
///   Cite    - exchange the adjacent pair at pos using earlier fact `rule`,
///             multiplying the sign by that fact's sign
struct RewriteStep {
    enum Kind { Cancel, Swap, Relator, Cite };
    Kind kind = Cancel;
    int pos = 0;
    int rule = -1;
};

struct Certificate {
    Word start;
    Word result;
    std::vector<RewriteStep> steps;
};

/// A certified commutation fact: u w = sign * w u.
struct CommFact {
    Word u;
    Word w;
    int sign = +1;
    Certificate cert;
    int depth = 0; // search layers used to find the certificate
};

struct RewriteOptions {
    int depth = 12;              // BFS layers
    int max_word_len = 0;        // 0 = seed length + 4, clamped to [8,12]
    std::size_t max_nodes = 1'200'000;
};

namespace rw {

inline constexpr int kMaxLetters = 31;
inline constexpr int kMaxLen = 12;

struct Rule {
    std::vector<int> match;
    std::vector<int> replace;
    int sign = +1;
};

/// Rewrite tables derived deterministically from a presentation: primitive
/// commutations from contexts, substitution rules from monomial relators
/// (all rotations and reversals, split at every prefix).
struct System {
    std::vector<std::string> names;
    std::map<std::string, int> ids;
    std::vector<std::vector<char>> prim;
    std::vector<Rule> rules;
    std::vector<std::vector<int>> rules_by_first;
    std::vector<int> component; // union-find over relator supports

    int id_of(const std::string &name) const {
        auto it = ids.find(name);
        if (it == ids.end()) {
            throw std::invalid_argument("word letter is not a generator: " + name);
        }
        return it->second;
    }
    int find_comp(int x) const {
        while (component[(std::size_t)x] != x) {
            x = component[(std::size_t)x];
        }
        return x;
    }
};

inline System build_system(const Presentation &p) {
    System s;
    if ((int)p.generators.size() > kMaxLetters) {
        throw ResourceError("rewriting supports at most " + std::to_string(kMaxLetters) +
                            " generators");
    }
    s.names = p.generators;
    for (std::size_t i = 0; i < s.names.size(); ++i) {
        s.ids[s.names[i]] = (int)i;
    }
    int n = (int)s.names.size();
    s.prim.assign((std::size_t)n, std::vector<char>((std::size_t)n, 0));
    for (const auto &[a, b] : p.commutations) {
        auto ia = s.ids.find(a);
        auto ib = s.ids.find(b);
        if (ia == s.ids.end() || ib == s.ids.end()) {
            continue;
        }
        s.prim[(std::size_t)ia->second][(std::size_t)ib->second] = 1;
        s.prim[(std::size_t)ib->second][(std::size_t)ia->second] = 1;
    }
    s.component.resize((std::size_t)n);
    for (int i = 0; i < n; ++i) {
        s.component[(std::size_t)i] = i;
    }
    auto unite = [&](int a, int b) {
        a = s.find_comp(a);
        b = s.find_comp(b);
        if (a != b) {
            s.component[(std::size_t)std::max(a, b)] = std::min(a, b);
        }
    };

    // Monomial relators: vanishing elements of the shape 1 + c*z_m with
    // c = +-1 encode the relation z_m = -c.
    std::set<std::pair<std::vector<int>, int>> oriented;
    for (const auto &entry : p.vanishing) {
        const AlgebraElement e = entry.element.converted(Basis::Monomial);
        std::vector<std::uint32_t> nz;
        for (std::uint32_t m = 0; m < e.coeffs().size(); ++m) {
            if (!e.coeff(m).is_zero()) {
                nz.push_back(m);
            }
        }
        if (nz.size() != 2 || nz[0] != 0) {
            continue;
        }
        const Rational &c0 = e.coeff(0);
        const Rational &cm = e.coeff(nz[1]);
        if (!(c0 == Rational(1)) || !(cm == Rational(1) || cm == Rational(-1))) {
            continue;
        }
        int sign = cm == Rational(1) ? -1 : +1; // z_m = -c
        std::vector<int> letters;
        const auto &cv = e.varset();
        for (std::size_t i = 0; i < cv.size(); ++i) {
            if (nz[1] & (1u << i)) {
                letters.push_back(s.id_of(cv[i]));
            }
        }
        for (std::size_t i = 1; i < letters.size(); ++i) {
            unite(letters[0], letters[i]);
        }
        std::size_t k = letters.size();
        for (std::size_t r = 0; r < k; ++r) {
            std::vector<int> rot;
            for (std::size_t i = 0; i < k; ++i) {
                rot.push_back(letters[(r + i) % k]);
            }
            oriented.insert({rot, sign});
            std::vector<int> rev(rot.rbegin(), rot.rend());
            oriented.insert({rev, sign});
        }
    }
    std::set<std::tuple<std::vector<int>, std::vector<int>, int>> dedup;
    for (const auto &[w, sign] : oriented) {
        for (std::size_t j = 1; j <= w.size(); ++j) {
            std::vector<int> match(w.begin(), w.begin() + (std::ptrdiff_t)j);
            std::vector<int> replace(w.rbegin(), w.rbegin() + (std::ptrdiff_t)(w.size() - j));
            dedup.insert({std::move(match), std::move(replace), sign});
        }
    }
    s.rules_by_first.assign((std::size_t)n, {});
    for (const auto &[match, replace, sign] : dedup) {
        s.rules.push_back({match, replace, sign});
        s.rules_by_first[(std::size_t)match[0]].push_back((int)s.rules.size() - 1);
    }
    return s;
}

/// Packed state: 12 slots of 5 bits (letter id + 1, 0 = empty) plus a sign
/// bit at position 62.
inline std::uint64_t pack(const std::vector<int> &letters, int sign) {
    std::uint64_t st = 0;
    for (std::size_t i = 0; i < letters.size(); ++i) {
        st |= (std::uint64_t)(letters[i] + 1) << (5 * i);
    }
    if (sign < 0) {
        st |= (std::uint64_t)1 << 62;
    }
    return st;
}

inline void unpack(std::uint64_t st, std::vector<int> &letters, int &sign) {
    letters.clear();
    for (int i = 0; i < kMaxLen; ++i) {
        int code = (int)((st >> (5 * i)) & 31u);
        if (code == 0) {
            break;
        }
        letters.push_back(code - 1);
    }
    sign = (st >> 62) & 1 ? -1 : +1;
}

struct SearchHit {
    std::uint64_t state = 0;
    int depth = 0;
    bool found = false;
};

struct Search {
    const System &sys;
    RewriteOptions opts;
    int cap;
    std::unordered_map<std::uint64_t, std::pair<std::uint64_t, std::uint32_t>> parent;
    bool exhausted_all = true; // nothing was cut off by depth/len/budget

    Search(const System &s, const RewriteOptions &o, std::size_t seed_len) : sys(s), opts(o) {
        cap = opts.max_word_len;
        if (cap == 0) {
            cap = std::clamp((int)seed_len + 4, 8, kMaxLen);
        }
        cap = std::min(cap, kMaxLen);
    }

    static std::uint32_t pack_step(RewriteStep::Kind k, int pos, int rule) {
        return (std::uint32_t)k | ((std::uint32_t)pos << 2) | ((std::uint32_t)(rule + 1) << 7);
    }
    static RewriteStep unpack_step(std::uint32_t st) {
        RewriteStep out;
        out.kind = (RewriteStep::Kind)(st & 3u);
        out.pos = (int)((st >> 2) & 31u);
        out.rule = (int)(st >> 7) - 1;
        return out;
    }

    /// Breadth-first closure from seed. If stop_on_empty, returns on the first
    /// identity-word state. Otherwise runs to closure/budget and returns the
    /// minimal word reached (length, then letter-lexicographic, then sign).
    SearchHit run(const std::vector<int> &seed, int seed_sign, bool stop_on_empty) {
        parent.clear();
        exhausted_all = true;
        std::uint64_t start = pack(seed, seed_sign);
        if ((int)seed.size() > cap) {
            throw std::invalid_argument("seed word longer than rewrite length cap");
        }
        std::deque<std::uint64_t> frontier{start};
        parent.emplace(start, std::make_pair(start, UINT32_MAX));
        SearchHit best{start, 0, false};
        if (seed.empty()) {
            return {start, 0, true};
        }
        std::vector<int> cur, nxt;
        int sign = +1;
        std::uint64_t best_state = start;
        auto better = [&](std::uint64_t a, std::uint64_t b) {
            std::vector<int> wa, wb;
            int sa, sb;
            unpack(a, wa, sa);
            unpack(b, wb, sb);
            if (wa.size() != wb.size()) {
                return wa.size() < wb.size();
            }
            if (wa != wb) {
                return wa < wb;
            }
            return sa > sb; // prefer +1
        };
        std::size_t nodes = 1;
        for (int depth = 0; depth < opts.depth && !frontier.empty(); ++depth) {
            std::deque<std::uint64_t> next;
            for (std::uint64_t st : frontier) {
                unpack(st, cur, sign);
                auto push = [&](RewriteStep::Kind kind, int pos, int rule,
                               const std::vector<int> &w, int sg) -> std::optional<SearchHit> {
                    std::uint64_t ns = pack(w, sg);
                    if (parent.count(ns)) {
                        return std::nullopt;
                    }
                    if (nodes >= opts.max_nodes) {
                        exhausted_all = false;
                        return std::nullopt;
                    }
                    ++nodes;
                    parent.emplace(ns, std::make_pair(st, pack_step(kind, pos, rule)));
                    next.push_back(ns);
                    if (better(ns, best_state)) {
                        best_state = ns;
                    }
                    if (w.empty()) {
                        return SearchHit{ns, depth + 1, true};
                    }
                    return std::nullopt;
                };
                int len = (int)cur.size();
                for (int pos = 0; pos + 1 < len; ++pos) {
                    if (cur[(std::size_t)pos] == cur[(std::size_t)pos + 1]) {
                        nxt = cur;
                        nxt.erase(nxt.begin() + pos, nxt.begin() + pos + 2);
                        if (auto hit = push(RewriteStep::Cancel, pos, -1, nxt, sign)) {
                            if (stop_on_empty) {
                                return *hit;
                            }
                        }
                    }
                    if (sys.prim[(std::size_t)cur[(std::size_t)pos]]
                                [(std::size_t)cur[(std::size_t)pos + 1]]) {
                        nxt = cur;
                        std::swap(nxt[(std::size_t)pos], nxt[(std::size_t)pos + 1]);
                        push(RewriteStep::Swap, pos, -1, nxt, sign);
                    }
                }
                for (int pos = 0; pos < len; ++pos) {
                    for (int ri : sys.rules_by_first[(std::size_t)cur[(std::size_t)pos]]) {
                        const Rule &r = sys.rules[(std::size_t)ri];
                        int m = (int)r.match.size();
                        if (pos + m > len) {
                            continue;
                        }
                        if (len - m + (int)r.replace.size() > cap) {
                            exhausted_all = false;
                            continue;
                        }
                        bool ok = true;
                        for (int i = 1; i < m; ++i) {
                            if (cur[(std::size_t)(pos + i)] != r.match[(std::size_t)i]) {
                                ok = false;
                                break;
                            }
                        }
                        if (!ok) {
                            continue;
                        }
                        nxt.assign(cur.begin(), cur.begin() + pos);
                        nxt.insert(nxt.end(), r.replace.begin(), r.replace.end());
                        nxt.insert(nxt.end(), cur.begin() + pos + m, cur.end());
                        if (auto hit =
                                push(RewriteStep::Relator, pos, ri, nxt, sign * r.sign)) {
                            if (stop_on_empty) {
                                return *hit;
                            }
                        }
                    }
                }
            }
            frontier = std::move(next);
        }
        if (!frontier.empty()) {
            exhausted_all = false;
        }
        best.state = best_state;
        best.found = false;
        return best;
    }

    std::vector<RewriteStep> extract_steps(std::uint64_t state) const {
        std::vector<RewriteStep> steps;
        std::uint64_t cur = state;
        while (true) {
            auto it = parent.find(cur);
            if (it == parent.end() || it->second.second == UINT32_MAX) {
                break;
            }
            steps.push_back(unpack_step(it->second.second));
            cur = it->second.first;
        }
        std::reverse(steps.begin(), steps.end());
        return steps;
    }
};

inline std::vector<int> word_ids(const System &s, const Word &w) {
    std::vector<int> out;
    out.reserve(w.letters.size());
    for (const auto &l : w.letters) {
        out.push_back(s.id_of(l));
    }
    return out;
}

inline Word make_word(const System &s, const std::vector<int> &ids, int sign) {
    Word w;
    w.sign = sign;
    for (int id : ids) {
        w.letters.push_back(s.names[(std::size_t)id]);
    }
    return w;
}

} // namespace rw

struct NormalFormResult {
    Word word;
    bool complete = false; // the whole reachable set was explored
    Certificate cert;
};

/// Breadth-first rewriting up to `depth` steps; returns the minimal word
/// reached (length, then lexicographic over the generator order) with a
/// replayable certificate. `complete` is false when depth, length cap or node
/// budget cut the search off.
inline NormalFormResult normal_form(const Word &w, const Presentation &p,
                                    const RewriteOptions &opts = {}) {
    rw::System sys = rw::build_system(p);
    rw::Search search(sys, opts, w.letters.size());
    auto seed = rw::word_ids(sys, w);
    auto hit = search.run(seed, +1, false);
    std::vector<int> letters;
    int sign;
    rw::unpack(hit.state, letters, sign);
    NormalFormResult out;
    out.word = rw::make_word(sys, letters, sign * w.sign);
    out.complete = search.exhausted_all;
    out.cert.start = w;
    out.cert.result = out.word;
    out.cert.steps = search.extract_steps(hit.state);
    return out;
}

/// Searches for a derivation of u w rev(u) rev(w) -> -1, which certifies
/// u w = - w u. Absence within budget is unknown, not refutation.
inline std::optional<Certificate> anticommute_certificate(const Word &u, const Word &w,
                                                          const Presentation &p,
                                                          const RewriteOptions &opts = {}) {
    rw::System sys = rw::build_system(p);
    const std::vector<int> ui = rw::word_ids(sys, u);
    const std::vector<int> wi = rw::word_ids(sys, w);
    std::vector<int> seed = ui;
    seed.insert(seed.end(), wi.begin(), wi.end());
    seed.insert(seed.end(), ui.rbegin(), ui.rend());
    seed.insert(seed.end(), wi.rbegin(), wi.rend());
    rw::Search search(sys, opts, seed.size());
    auto hit = search.run(seed, +1, true);
    if (!hit.found) {
        return std::nullopt;
    }
    std::vector<int> letters;
    int sign;
    rw::unpack(hit.state, letters, sign);
    if (sign != -1) {
        return std::nullopt; // derived that they commute instead
    }
    Certificate cert;
    cert.start = rw::make_word(sys, seed, +1);
    cert.result = Word{-1, {}};
    cert.steps = search.extract_steps(hit.state);
    return cert;
}

/// Independent replay of a certificate against the presentation's rewrite
/// tables. Cited facts must appear earlier in `facts` and are checked by
/// position. No search happens here.
inline bool check_certificate(const Presentation &p, const std::vector<CommFact> &facts,
                              const Certificate &cert, std::string *why = nullptr) {
    rw::System sys = rw::build_system(p);
    auto fail = [&](const std::string &msg) {
        if (why) {
            *why = msg;
        }
        return false;
    };
    std::vector<int> cur;
    try {
        cur = rw::word_ids(sys, cert.start);
    } catch (const std::exception &e) {
        return fail(e.what());
    }
    int sign = cert.start.sign;
    for (std::size_t si = 0; si < cert.steps.size(); ++si) {
        const RewriteStep &st = cert.steps[si];
        int len = (int)cur.size();
        switch (st.kind) {
            case RewriteStep::Cancel: {
                if (st.pos + 1 >= len || cur[(std::size_t)st.pos] != cur[(std::size_t)st.pos + 1]) {
                    return fail("cancel step does not apply at step " + std::to_string(si));
                }
                cur.erase(cur.begin() + st.pos, cur.begin() + st.pos + 2);
                break;
            }
            case RewriteStep::Swap: {
                if (st.pos + 1 >= len) {
                    return fail("swap position out of range");
                }
                int a = cur[(std::size_t)st.pos], b = cur[(std::size_t)st.pos + 1];
                if (!sys.prim[(std::size_t)a][(std::size_t)b]) {
                    return fail("swap pair does not share a context at step " +
                                std::to_string(si));
                }
                std::swap(cur[(std::size_t)st.pos], cur[(std::size_t)st.pos + 1]);
                break;
            }
            case RewriteStep::Relator: {
                if (st.rule < 0 || st.rule >= (int)sys.rules.size()) {
                    return fail("unknown rule id");
                }
                const rw::Rule &r = sys.rules[(std::size_t)st.rule];
                int m = (int)r.match.size();
                if (st.pos + m > len) {
                    return fail("rule match out of range");
                }
                for (int i = 0; i < m; ++i) {
                    if (cur[(std::size_t)(st.pos + i)] != r.match[(std::size_t)i]) {
                        return fail("rule match mismatch at step " + std::to_string(si));
                    }
                }
                std::vector<int> nxt(cur.begin(), cur.begin() + st.pos);
                nxt.insert(nxt.end(), r.replace.begin(), r.replace.end());
                nxt.insert(nxt.end(), cur.begin() + st.pos + m, cur.end());
                cur = std::move(nxt);
                sign *= r.sign;
                break;
            }
            case RewriteStep::Cite: {
                if (st.rule < 0 || st.rule >= (int)facts.size()) {
                    return fail("cited fact out of range");
                }
                const CommFact &f = facts[(std::size_t)st.rule];
                if (f.u.letters.size() != 1 || f.w.letters.size() != 1) {
                    return fail("only single-letter facts can be cited");
                }
                if (st.pos + 1 >= len) {
                    return fail("cite position out of range");
                }
                int a = sys.id_of(f.u.letters[0]);
                int b = sys.id_of(f.w.letters[0]);
                int x = cur[(std::size_t)st.pos], y = cur[(std::size_t)st.pos + 1];
                if (!((x == a && y == b) || (x == b && y == a))) {
                    return fail("cited fact does not match the pair at step " +
                                std::to_string(si));
                }
                std::swap(cur[(std::size_t)st.pos], cur[(std::size_t)st.pos + 1]);
                sign *= f.sign;
                break;
            }
        }
    }
    std::vector<int> want;
    try {
        want = rw::word_ids(sys, cert.result);
    } catch (const std::exception &e) {
        return fail(e.what());
    }
    if (cur != want || sign != cert.result.sign) {
        return fail("replay ended at " + rw::make_word(sys, cur, sign).str() +
                    " instead of " + cert.result.str());
    }
    return true;
}

/// Verifies a list of facts in dependency order: fact i may only cite facts
/// 0..i-1, and each certificate must replay to (-1)^expected on the standard
/// seed u w rev(u) rev(w).
inline bool check_facts(const Presentation &p, const std::vector<CommFact> &facts,
                        std::string *why = nullptr) {
    for (std::size_t i = 0; i < facts.size(); ++i) {
        const CommFact &f = facts[i];
        Word seed;
        seed.sign = +1;
        seed.letters = f.u.letters;
        seed.letters.insert(seed.letters.end(), f.w.letters.begin(), f.w.letters.end());
        seed.letters.insert(seed.letters.end(), f.u.letters.rbegin(), f.u.letters.rend());
        seed.letters.insert(seed.letters.end(), f.w.letters.rbegin(), f.w.letters.rend());
        if (!(f.cert.start == seed) || !(f.cert.result == Word{f.sign, {}})) {
            if (why) {
                *why = "fact " + std::to_string(i) + " has a non-standard claim";
            }
            return false;
        }
        for (const auto &st : f.cert.steps) {
            if (st.kind == RewriteStep::Cite && st.rule >= (int)i) {
                if (why) {
                    *why = "fact " + std::to_string(i) + " cites a later fact";
                }
                return false;
            }
        }
        std::vector<CommFact> prefix(facts.begin(), facts.begin() + (std::ptrdiff_t)i);
        if (!check_certificate(p, prefix, f.cert, why)) {
            return false;
        }
    }
    return true;
}

/// Linear system over monomial traces, kept for inspection and for numerical
/// soundness checks against representations.
struct TraceSystem {
    std::vector<std::vector<std::string>> monomials; // canonical words, index = variable
    struct Equation {
        std::vector<std::pair<int, Rational>> terms; // (variable, coefficient)
        Rational rhs;
        std::string origin;
    };
    std::vector<Equation> equations;
};

enum class TraceStatus { Infeasible, Unknown };

struct TraceReport {
    TraceStatus status = TraceStatus::Unknown;
    std::string log;
    TraceSystem system;
    std::vector<CommFact> facts;
    int max_fact_depth = 0;
};

struct TraceOptions {
    int depth = 12;  // BFS layers for certificate searches
    int maxlen = 4;  // longest monomial tracked as a trace variable
    RewriteOptions rewrite{};      // budget per anticommutation search
    RewriteOptions canon{4, 0, 6'000}; // budget per canonicalization search
};

namespace detail {

struct TraceEngine {
    const Bcs &b;
    TraceOptions opts;
    Presentation pres;
    rw::System sys;
    std::vector<CommFact> facts;
    std::map<std::pair<int, int>, std::optional<int>> fact_index; // pair -> facts index
    std::map<std::vector<int>, std::tuple<int, std::vector<int>, bool>> canon_cache;
    std::vector<std::vector<int>> vars;     // canonical words (ids)
    std::map<std::vector<int>, int> var_of; // canonical word -> variable
    TraceSystem system;
    std::string log;
    int max_depth = 0;

    TraceEngine(const Bcs &bcs, const TraceOptions &o)
        : b(bcs), opts(o), pres(build_algebra(bcs, PresentationForm::Polynomial)),
          sys(rw::build_system(pres)) {}

    /// sign of x y vs y x: +1/-1 when known, nullopt otherwise.
    std::optional<int> pair_sign(int x, int y) {
        if (x == y) {
            return +1;
        }
        if (sys.prim[(std::size_t)x][(std::size_t)y]) {
            return +1;
        }
        auto key = std::minmax(x, y);
        auto it = fact_index.find(key);
        if (it != fact_index.end()) {
            if (!it->second) {
                return std::nullopt;
            }
            return facts[(std::size_t)*it->second].sign;
        }
        if (sys.find_comp(x) != sys.find_comp(y)) {
            fact_index[key] = std::nullopt; // different relator components
            return std::nullopt;
        }
        std::vector<int> seed{key.first, key.second, key.first, key.second};
        rw::Search search(sys, opts.rewrite, seed.size());
        auto hit = search.run(seed, +1, true);
        if (!hit.found) {
            fact_index[key] = std::nullopt;
            return std::nullopt;
        }
        std::vector<int> letters;
        int sign;
        rw::unpack(hit.state, letters, sign);
        CommFact f;
        f.u = rw::make_word(sys, {key.first}, +1);
        f.w = rw::make_word(sys, {key.second}, +1);
        f.sign = sign;
        f.depth = hit.depth;
        f.cert.start = rw::make_word(sys, seed, +1);
        f.cert.result = Word{sign, {}};
        f.cert.steps = search.extract_steps(hit.state);
        facts.push_back(std::move(f));
        fact_index[key] = (int)facts.size() - 1;
        max_depth = std::max(max_depth, hit.depth);
        log += "certified: " + facts.back().u.str() + " " + facts.back().w.str() + " = " +
               (sign < 0 ? "-" : "+") + " " + facts.back().w.str() + " " +
               facts.back().u.str() + "  (depth " + std::to_string(hit.depth) + ")\n";
        return sign;
    }

    /// Canonical form of a monomial word under rotations plus certified
    /// rewrites: (sign, word, zero_forced).
    std::tuple<int, std::vector<int>, bool> canonical(const std::vector<int> &word) {
        auto it = canon_cache.find(word);
        if (it != canon_cache.end()) {
            return it->second;
        }
        int best_sign = +1;
        std::vector<int> best = word;
        bool zero = false;
        bool have = false;
        std::size_t k = word.size();
        for (std::size_t r = 0; r < std::max<std::size_t>(k, 1); ++r) {
            std::vector<int> rot;
            for (std::size_t i = 0; i < k; ++i) {
                rot.push_back(word[(r + i) % k]);
            }
            rw::Search search(sys, opts.canon, rot.size());
            auto hit = search.run(rot, +1, false);
            std::vector<int> letters;
            int sign;
            rw::unpack(hit.state, letters, sign);
            if (!have || letters.size() < best.size() ||
                (letters.size() == best.size() && letters < best)) {
                best = letters;
                best_sign = sign;
                have = true;
            } else if (letters == best && sign != best_sign) {
                zero = true;
            }
        }
        auto out = std::make_tuple(best_sign, best, zero);
        canon_cache[word] = out;
        if (best != word) {
            log += "identify: tau(" + rw::make_word(sys, word, 1).str() + ") = " +
                   (best_sign < 0 ? "-" : "") + "tau(" + rw::make_word(sys, best, 1).str() +
                   ")\n";
        }
        return out;
    }

    int var_for(const std::vector<int> &canonical_word) {
        auto it = var_of.find(canonical_word);
        if (it != var_of.end()) {
            return it->second;
        }
        int idx = (int)vars.size();
        vars.push_back(canonical_word);
        var_of[canonical_word] = idx;
        return idx;
    }

    TraceReport run() {
        TraceReport report;
        log += "trace feasibility over " + std::to_string(pres.generators.size()) +
               " generators, " + std::to_string(b.contexts.size()) + " contexts\n";

        // (ii) context relations: tau(Pi_{U_i,phi}) = 0 for non-satisfying phi.
        struct Row {
            std::map<int, Rational> coeffs;
            Rational rhs;
            std::string origin;
            bool anticommute = false;
            int var = -1;
        };
        std::vector<Row> rows;
        std::set<std::vector<int>> zero_forced;
        for (std::size_t ci = 0; ci < b.contexts.size(); ++ci) {
            const Context &ctx = b.contexts[ci];
            int k = (int)ctx.vars.size();
            if (k == 0) {
                continue;
            }
            if (k > opts.maxlen) {
                log += "context " + std::to_string(ci) + " has " + std::to_string(k) +
                       " variables > maxlen " + std::to_string(opts.maxlen) +
                       "; its relations are not encoded\n";
                continue;
            }
            std::vector<int> ids;
            for (const auto &v : ctx.vars) {
                ids.push_back(sys.id_of(v));
            }
            int nonsat = 0;
            for (std::uint32_t a = 0; a < (std::uint32_t(1) << k); ++a) {
                Assignment phi = bcsalg::detail::context_assignment(ctx.vars, a);
                if (context_satisfying(ctx, phi)) {
                    continue;
                }
                ++nonsat;
                Row row;
                row.rhs = Rational(0);
                Rational base(1, std::int64_t(1) << k);
                for (std::uint32_t m = 0; m < (std::uint32_t(1) << k); ++m) {
                    int lam = 1;
                    std::vector<int> mono;
                    for (int i = 0; i < k; ++i) {
                        if (m & (1u << i)) {
                            mono.push_back(ids[(std::size_t)i]);
                            lam *= (a & (1u << i)) ? -1 : +1;
                        }
                    }
                    Rational c = lam == 1 ? base : -base;
                    auto [csign, cword, zforce] = canonical(mono);
                    if (zforce) {
                        zero_forced.insert(cword);
                    }
                    if (csign < 0) {
                        c = -c;
                    }
                    if (cword.empty()) {
                        row.rhs -= c; // constant term moves to the right side
                    } else {
                        row.coeffs[var_for(cword)] += c;
                    }
                }
                row.origin = "context " + std::to_string(ci) + " projection";
                rows.push_back(std::move(row));
            }
            log += "context " + std::to_string(ci) + ": " + std::to_string(nonsat) +
                   " vanishing projections encoded\n";
        }

        for (const auto &w : zero_forced) {
            Row row;
            if (w.empty()) {
                row.rhs = Rational(1); // 1 = -1 was derived, so 0 = 1
            } else {
                row.coeffs[var_for(w)] = Rational(1);
                row.rhs = Rational(0);
            }
            row.origin = "degenerate rewrite (both signs reachable)";
            rows.push_back(std::move(row));
        }

        // (i) anticommutation: tau(m) = 0 when some generator g has
        // g m = - m g, certified letter by letter.
        std::size_t var_count_snapshot = vars.size();
        for (std::size_t vi = 0; vi < var_count_snapshot; ++vi) {
            const std::vector<int> mono = vars[vi];
            if ((int)mono.size() > opts.maxlen || mono.empty()) {
                continue;
            }
            for (int g = 0; g < (int)sys.names.size(); ++g) {
                int prod = 1;
                bool known = true;
                for (int letter : mono) {
                    auto s = pair_sign(letter, g);
                    if (!s) {
                        known = false;
                        break;
                    }
                    prod *= *s;
                }
                if (!known || prod != -1) {
                    continue;
                }
                int fid = emit_monomial_fact(mono, g);
                Row row;
                row.coeffs[(int)vi] = Rational(1);
                row.rhs = Rational(0);
                row.origin = "anticommutes with " + sys.names[(std::size_t)g];
                row.anticommute = true;
                row.var = (int)vi;
                rows.push_back(std::move(row));
                log += "tau(" + rw::make_word(sys, mono, 1).str() + ") = 0  (anticommutes with " +
                       sys.names[(std::size_t)g] + ", fact " + std::to_string(fid) + ")\n";
                break;
            }
        }

        // Assemble and eliminate.
        system.monomials.clear();
        for (const auto &w : vars) {
            std::vector<std::string> names;
            for (int id : w) {
                names.push_back(sys.names[(std::size_t)id]);
            }
            system.monomials.push_back(std::move(names));
        }
        for (const auto &row : rows) {
            TraceSystem::Equation eq;
            for (const auto &[v, c] : row.coeffs) {
                if (!c.is_zero()) {
                    eq.terms.push_back({v, c});
                }
            }
            eq.rhs = row.rhs;
            eq.origin = row.origin;
            system.equations.push_back(std::move(eq));
        }

        auto dense = [&](const std::vector<Row> &rs) {
            std::vector<std::vector<Rational>> m;
            for (const auto &row : rs) {
                std::vector<Rational> r(vars.size() + 1, Rational(0));
                for (const auto &[v, c] : row.coeffs) {
                    r[(std::size_t)v] = c;
                }
                r[vars.size()] = row.rhs;
                m.push_back(std::move(r));
            }
            return m;
        };
        auto consistent = [&](std::vector<std::vector<Rational>> m,
                              std::map<int, Rational> *forced) {
            std::size_t ncols = vars.size();
            std::size_t rank = 0;
            for (std::size_t col = 0; col < ncols && rank < m.size(); ++col) {
                std::size_t piv = rank;
                while (piv < m.size() && m[piv][col].is_zero()) {
                    ++piv;
                }
                if (piv == m.size()) {
                    continue;
                }
                std::swap(m[piv], m[rank]);
                Rational inv = Rational(1) / m[rank][col];
                for (auto &x : m[rank]) {
                    x *= inv;
                }
                for (std::size_t r2 = 0; r2 < m.size(); ++r2) {
                    if (r2 != rank && !m[r2][col].is_zero()) {
                        Rational f = m[r2][col];
                        for (std::size_t c2 = col; c2 <= ncols; ++c2) {
                            m[r2][c2] -= f * m[rank][c2];
                        }
                    }
                }
                ++rank;
            }
            for (const auto &row : m) {
                bool allzero = true;
                for (std::size_t c = 0; c < ncols; ++c) {
                    if (!row[c].is_zero()) {
                        allzero = false;
                        break;
                    }
                }
                if (allzero && !row[ncols].is_zero()) {
                    return false;
                }
            }
            if (forced) {
                for (const auto &row : m) {
                    int nz = -1;
                    bool single = true;
                    for (std::size_t c = 0; c < ncols; ++c) {
                        if (!row[c].is_zero()) {
                            if (nz >= 0) {
                                single = false;
                                break;
                            }
                            nz = (int)c;
                        }
                    }
                    if (single && nz >= 0 && row[(std::size_t)nz] == Rational(1)) {
                        (*forced)[nz] = row[ncols];
                    }
                }
            }
            return true;
        };

        bool ok = consistent(dense(rows), nullptr);
        if (ok) {
            report.status = TraceStatus::Unknown;
            log += "linear system consistent: UNKNOWN (relaxation is sound, not complete)\n";
        } else {
            report.status = TraceStatus::Infeasible;
            log += "linear system inconsistent: INFEASIBLE (no tracial state)\n";
            // Mirror the contradiction: every zeroed variable that the
            // remaining relations force to a non-zero value.
            for (const auto &row : rows) {
                if (!row.anticommute) {
                    continue;
                }
                std::vector<Row> others;
                for (const auto &r2 : rows) {
                    if (!(r2.anticommute && r2.var == row.var)) {
                        others.push_back(r2);
                    }
                }
                std::map<int, Rational> forced;
                if (consistent(dense(others), &forced)) {
                    auto it = forced.find(row.var);
                    if (it != forced.end() && !it->second.is_zero()) {
                        log += "contradiction: relations force tau(" +
                               rw::make_word(sys, vars[(std::size_t)row.var], 1).str() +
                               ") = " + it->second.str() + " but " + row.origin +
                               " forces tau = 0\n";
                    }
                }
            }
        }
        report.log = log;
        report.system = std::move(system);
        report.facts = facts;
        report.max_fact_depth = max_depth;
        return report;
    }

    /// Composed certificate for g m = (-1) m g from per-letter facts: walk g
    /// through rev(m) cancelling as we go.
    int emit_monomial_fact(const std::vector<int> &mono, int g) {
        if (mono.size() == 1) {
            auto key = std::minmax(mono[0], g);
            auto idx = fact_index.at(key);
            return idx ? *idx : -1;
        }
        CommFact f;
        f.u = rw::make_word(sys, mono, +1);
        f.w = rw::make_word(sys, {g}, +1);
        f.sign = -1;
        std::vector<int> word = mono;
        word.push_back(g);
        word.insert(word.end(), mono.rbegin(), mono.rend());
        word.push_back(g);
        f.cert.start = rw::make_word(sys, word, +1);
        f.cert.result = Word{-1, {}};
        // Invariant entering round t: the word is mono[0..t) g mono[t-1..0] g,
        // with g at index t. Swapping g left exposes the equal pair.
        std::size_t k = mono.size();
        int depth = 0;
        for (std::size_t t = k; t >= 1; --t) {
            int letter = mono[t - 1];
            RewriteStep swap_step;
            swap_step.pos = (int)t - 1;
            if (sys.prim[(std::size_t)letter][(std::size_t)g]) {
                swap_step.kind = RewriteStep::Swap;
                swap_step.rule = -1;
            } else {
                swap_step.kind = RewriteStep::Cite;
                auto idx = fact_index.at(std::minmax(letter, g));
                swap_step.rule = *idx;
                depth = std::max(depth, facts[(std::size_t)*idx].depth);
            }
            f.cert.steps.push_back(swap_step);
            RewriteStep cancel_step;
            cancel_step.kind = RewriteStep::Cancel;
            cancel_step.pos = (int)t;
            f.cert.steps.push_back(cancel_step);
        }
        RewriteStep final_cancel;
        final_cancel.kind = RewriteStep::Cancel;
        final_cancel.pos = 0;
        f.cert.steps.push_back(final_cancel);
        f.depth = depth;
        facts.push_back(std::move(f));
        return (int)facts.size() - 1;
    }
};

} // namespace detail

/// Builds the trace-feasibility relaxation for A(B) and reports INFEASIBLE
/// (definitely no tracial state) or UNKNOWN.
inline TraceReport trace_feasibility(const Bcs &b, const TraceOptions &opts = {}) {
    detail::TraceEngine engine(b, opts);
    return engine.run();
}

} // namespace bcsalg

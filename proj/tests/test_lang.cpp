#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "bcsalg/lang.hpp"
#include "bcsalg/present.hpp"
#include "testutil.hpp"

using namespace bcsalg;

namespace {

/// Definitional check: a shape-CNF for R exists iff the conjunction of all
/// entailed shape-clauses equals R. Enumerated from scratch, independently of
/// the library's certificate construction.
bool definable_by_shape(const Relation &r, CnfShape shape) {
    int k = r.arity;
    auto members = r.member_indices();
    std::vector<char> conj(std::size_t(1) << k, 1);
    for (std::uint32_t t = 0; t < (std::uint32_t(1) << k); ++t) {
        std::vector<int> coords;
        for (int i = 0; i < k; ++i) {
            if (t & (1u << i)) {
                coords.push_back(i);
            }
        }
        int sz = (int)coords.size();
        for (std::uint32_t pol = 0; pol < (std::uint32_t(1) << sz); ++pol) {
            CoordClause cl;
            int positives = 0, negatives = 0;
            for (int i = 0; i < sz; ++i) {
                Sign sat = (pol & (1u << i)) ? -1 : +1;
                cl.push_back({coords[(std::size_t)i], sat});
                (sat == -1 ? positives : negatives) += 1;
            }
            bool ok = false;
            switch (shape) {
                case CnfShape::Bijunctive: ok = sz <= 2; break;
                case CnfShape::Horn: ok = positives <= 1; break;
                case CnfShape::DualHorn: ok = negatives <= 1; break;
            }
            if (!ok) {
                continue;
            }
            bool entailed = true;
            for (std::uint32_t m : members) {
                bool sat_here = false;
                for (const auto &lit : cl) {
                    Sign v = (m & (1u << lit.coord)) ? -1 : +1;
                    if (v == lit.satsign) {
                        sat_here = true;
                        break;
                    }
                }
                if (!sat_here) {
                    entailed = false;
                    break;
                }
            }
            if (!entailed) {
                continue;
            }
            for (std::uint32_t idx = 0; idx < conj.size(); ++idx) {
                if (!conj[idx]) {
                    continue;
                }
                bool sat_here = false;
                for (const auto &lit : cl) {
                    Sign v = (idx & (1u << lit.coord)) ? -1 : +1;
                    if (v == lit.satsign) {
                        sat_here = true;
                        break;
                    }
                }
                if (!sat_here) {
                    conj[idx] = 0;
                }
            }
        }
    }
    for (std::uint32_t idx = 0; idx < conj.size(); ++idx) {
        if ((conj[idx] != 0) != r.contains(idx)) {
            return false;
        }
    }
    return true;
}

/// Affine check from the definition: closed under ternary coordinatewise
/// products.
bool affine_by_definition(const Relation &r) {
    auto members = r.member_indices();
    for (std::uint32_t a : members) {
        for (std::uint32_t b : members) {
            for (std::uint32_t c : members) {
                if (!r.contains(a ^ b ^ c)) {
                    return false;
                }
            }
        }
    }
    return true;
}

} // namespace

TEST_CASE("classification of the running examples") {
    auto f = classify_relation(Relation::of_members(2, {{-1, -1}}));
    REQUIRE(f.bijunctive);
    REQUIRE(f.horn);
    REQUIRE(f.dual_horn);
    REQUIRE(f.linear);
    REQUIRE(f.one_valid);
    REQUIRE_FALSE(f.zero_valid);

    f = classify_relation(Relation::clause({-1, -1, -1}));
    REQUIRE_FALSE(f.bijunctive);
    REQUIRE_FALSE(f.horn);
    REQUIRE(f.dual_horn);
    REQUIRE_FALSE(f.linear);

    f = classify_relation(Relation::parity(3, +1));
    REQUIRE(f.linear);
    REQUIRE_FALSE(f.bijunctive);
    REQUIRE_FALSE(f.horn);
    REQUIRE_FALSE(f.dual_horn);
}

TEST_CASE("classification of systems") {
    auto f = classify_bcs(gen_magic_square());
    REQUIRE(f.linear);
    REQUIRE_FALSE(f.bijunctive);
    REQUIRE_FALSE(f.horn);
    REQUIRE_FALSE(f.dual_horn);

    f = classify_bcs(gen_graph_hom(Graph::complete(2), Graph::complete(3)));
    REQUIRE_FALSE(f.any_schaefer());

    Bcs empty;
    empty.vars = {"x"};
    REQUIRE(classify_bcs(empty) == all_flags());
}

TEST_CASE("closure classification matches the definitional check, k <= 3") {
    for (int k = 1; k <= 3; ++k) {
        for (std::uint32_t code = 0; code < (std::uint32_t(1) << (1 << k)); ++code) {
            Relation r = Relation::empty(k);
            for (std::uint32_t idx = 0; idx < (std::uint32_t(1) << k); ++idx) {
                r.table[idx] = (code >> idx) & 1;
            }
            ClassFlags f = classify_relation(r);
            REQUIRE(f.bijunctive == definable_by_shape(r, CnfShape::Bijunctive));
            REQUIRE(f.horn == definable_by_shape(r, CnfShape::Horn));
            REQUIRE(f.dual_horn == definable_by_shape(r, CnfShape::DualHorn));
            REQUIRE(f.linear == affine_by_definition(r));
            // certificates exist exactly when the class applies
            REQUIRE(f.bijunctive == cnf_certificate(r, CnfShape::Bijunctive).has_value());
            REQUIRE(f.horn == cnf_certificate(r, CnfShape::Horn).has_value());
            REQUIRE(f.dual_horn == cnf_certificate(r, CnfShape::DualHorn).has_value());
            REQUIRE(f.linear == linear_certificate(r).has_value());
        }
    }
}

TEST_CASE("class solvers agree with brute force") {
    std::mt19937 rng(53);
    using IC = testutil::InstanceClass;
    for (IC cls : {IC::Bijunctive, IC::Horn, IC::DualHorn, IC::Linear}) {
        for (int trial = 0; trial < 120; ++trial) {
            Bcs b = testutil::random_class_instance(rng, cls);
            auto fast = solve_schaefer(b);
            auto slow = brute_force_sat(b);
            REQUIRE(fast.has_value() == slow.has_value());
            if (fast) {
                REQUIRE(is_satisfying(b, *fast));
                REQUIRE(*fast == *slow); // both are lexicographically first
            }
        }
    }
}

TEST_CASE("magic square is refuted by rank") {
    REQUIRE_FALSE(solve_schaefer(gen_magic_square()).has_value());
}

TEST_CASE("implication chains") {
    // x1, x1 -> x2 -> x3 -> x4 as 2SAT clauses
    std::vector<Constraint> cs;
    cs.emplace_back(Scope{Term::variable("x1")}, Relation::clause({-1}));
    for (int i = 1; i < 4; ++i) {
        cs.emplace_back(Scope{Term::variable("x" + std::to_string(i)),
                              Term::variable("x" + std::to_string(i + 1))},
                        Relation::clause({+1, -1}));
    }
    Bcs chain = default_contexts(testutil::var_names(4), cs);
    auto w = solve_schaefer(chain);
    REQUIRE(w.has_value());
    REQUIRE(*w == *brute_force_sat(chain));
    for (const auto &[v, s] : *w) {
        REQUIRE(s == -1);
    }
}

TEST_CASE("non-Schaefer systems are rejected") {
    REQUIRE_THROWS_AS(solve_schaefer(gen_graph_hom(Graph::complete(2), Graph::complete(3))),
                      NotSchaeferError);
}

TEST_CASE("unsatisfiable tractable systems have empty satisfying sets, algebraically") {
    std::mt19937 rng(59);
    using IC = testutil::InstanceClass;
    int seen = 0;
    for (int trial = 0; trial < 400 && seen < 20; ++trial) {
        IC cls = trial % 2 ? IC::Horn : IC::Bijunctive;
        Bcs b = testutil::random_class_instance(rng, cls, 8, 12);
        if (solve_schaefer(b).has_value()) {
            continue;
        }
        ++seen;
        // merge everything into a single context and inspect its vanishing set
        Bcs merged;
        merged.vars = b.vars;
        Context all;
        all.vars = b.vars;
        all.constraints = b.all_constraints();
        merged.contexts.push_back(all);
        auto vs = vanishing_set(merged, PresentationForm::Contexts);
        REQUIRE(vs.vanishing[0].size() == (std::size_t(1) << b.vars.size()));
    }
    REQUIRE(seen > 0);
}

TEST_CASE("constants specialize away before classification") {
    // parity with a pinned constant is still linear; AND with constant scope
    // shrinks to a unary relation
    Constraint c(Scope{Term::variable("x"), Term::of_const(-1), Term::variable("y")},
                 Relation::parity(3, +1));
    Bcs b = default_contexts({"x", "y"}, {c});
    auto f = classify_bcs(b);
    REQUIRE(f.linear);
    auto spec = specialize(b);
    REQUIRE(spec.items.size() == 1);
    REQUIRE(spec.items[0].second.arity == 2);
    REQUIRE(spec.items[0].second.member_count() == 2);
}

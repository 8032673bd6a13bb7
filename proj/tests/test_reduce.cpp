#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "bcsalg/reduce.hpp"
#include "bcsalg/reps.hpp"
#include "testutil.hpp"

using namespace bcsalg;

namespace {

Relation z_and_relation() {
    Relation zand = Relation::empty(3);
    for (std::uint32_t idx = 0; idx < 8; ++idx) {
        auto t = tuple_of_index(idx, 3);
        bool land = t[0] == -1 && t[1] == -1;
        if (t[2] == (land ? -1 : +1)) {
            zand.table[idx] = 1;
        }
    }
    return zand;
}

} // namespace

TEST_CASE("pp-definition search finds the textbook gadgets") {
    auto lang = testutil::three_sat_clauses();

    // z = x AND y from clauses, no ancillas
    auto res = pp_define_search(lang, z_and_relation(), 0, 4);
    REQUIRE(res.status == SearchStatus::Found);
    REQUIRE(res.gadget->ancilla_vars().empty());
    REQUIRE(res.gadget->system.all_constraints().size() == 3);
    REQUIRE(gadget_valid(*res.gadget));

    // ternary parity needs the four odd-row-excluding clauses
    auto parity = pp_define_search(lang, Relation::parity(3, +1), 0, 4);
    REQUIRE(parity.status == SearchStatus::Found);
    REQUIRE(parity.gadget->ancilla_vars().empty());
    REQUIRE(parity.gadget->system.all_constraints().size() == 4);

    // self-definition from the singleton language
    Relation odd = Relation::parity(3, -1);
    auto self = pp_define_search({odd}, odd, 0, 2);
    REQUIRE(self.status == SearchStatus::Found);
    REQUIRE(self.gadget->system.all_constraints().size() == 1);
}

TEST_CASE("search distinguishes exhaustion from budget") {
    auto lang = testutil::three_sat_clauses();
    // parity is not definable from clauses with a single constraint
    auto res = pp_define_search(lang, Relation::parity(3, +1), 0, 3);
    REQUIRE(res.status == SearchStatus::NotFound);
    auto tiny = pp_define_search(lang, Relation::parity(3, +1), 0, 4, 10);
    REQUIRE(tiny.status == SearchStatus::Budget);
}

TEST_CASE("applying self-definitions is the identity reduction") {
    Bcs ms = gen_magic_square();
    std::map<Relation, GadgetDefinition> gadgets;
    gadgets[Relation::parity(3, +1)] = self_gadget(Relation::parity(3, +1));
    gadgets[Relation::parity(3, -1)] = self_gadget(Relation::parity(3, -1));
    ApplyResult ar = apply_gadgets(ms, gadgets);
    REQUIRE(ar.reduced == ms);
    for (const auto &x : ms.vars) {
        REQUIRE(ar.hom.iota.at(x) == x);
        auto [a, b] = lift_common(ar.hom.pi.at(x).element,
                                  AlgebraElement::generator({x}, x));
        REQUIRE(a == b);
    }
    REQUIRE(verify_hom_pair(ms, ar.reduced, ar.hom).pass);
}

TEST_CASE("the magic square reduces to an unsatisfiable 3SAT system") {
    auto lang = testutil::three_sat_clauses();
    std::map<Relation, GadgetDefinition> gadgets;
    gadgets[Relation::parity(3, +1)] =
        *pp_define_search(lang, Relation::parity(3, +1), 0, 4).gadget;
    gadgets[Relation::parity(3, -1)] =
        *pp_define_search(lang, Relation::parity(3, -1), 0, 4).gadget;
    Bcs ms = gen_magic_square();
    ApplyResult ar = apply_gadgets(ms, gadgets);
    REQUIRE(ar.reduced.vars.size() == 9);
    REQUIRE(ar.reduced.all_constraints().size() == 24);
    REQUIRE_FALSE(classify_bcs(ar.reduced).any_schaefer());
    REQUIRE_FALSE(brute_force_sat(ar.reduced).has_value());
    HomReport hr = verify_hom_pair(ms, ar.reduced, ar.hom);
    REQUIRE(hr.pass);
    REQUIRE(hr.commutation_structural);
}

TEST_CASE("ancilla images live in the original context subalgebra") {
    // define AND(x,y) by z = x AND y with the ancilla pinned true
    Relation target = Relation::of_members(2, {{-1, -1}});
    GadgetDefinition g;
    g.target = target;
    g.system = default_contexts(
        {"x1", "x2", "y1"},
        {Constraint(Scope{Term::variable("x1"), Term::variable("x2"),
                          Term::variable("y1")},
                    z_and_relation()),
         Constraint(Scope{Term::variable("y1")}, Relation::of_members(1, {{-1}}))});
    REQUIRE(gadget_valid(g));

    Bcs and_sys = default_contexts(
        {"a", "b"},
        {Constraint(Scope{Term::variable("a"), Term::variable("b")}, target)});
    std::map<Relation, GadgetDefinition> gadgets;
    gadgets[target] = g;
    ApplyResult ar = apply_gadgets(and_sys, gadgets);
    REQUIRE(ar.reduced.vars.size() == 3);
    const std::string &anc = ar.reduced.vars[2];
    const auto &img = ar.hom.pi.at(anc);
    REQUIRE(img.element.varset() == std::vector<std::string>{"a", "b"});
    REQUIRE(img.element * img.element == AlgebraElement::one({"a", "b"}));
    REQUIRE(verify_hom_pair(and_sys, ar.reduced, ar.hom).pass);
}

TEST_CASE("corrupted choice functions fail the third check") {
    auto lang = testutil::three_sat_clauses();
    Relation target = Relation::of_members(2, {{-1, -1}});
    GadgetDefinition g;
    g.target = target;
    g.system = default_contexts(
        {"x1", "x2", "y1"},
        {Constraint(Scope{Term::variable("x1"), Term::variable("x2"),
                          Term::variable("y1")},
                    z_and_relation()),
         Constraint(Scope{Term::variable("y1")}, Relation::of_members(1, {{-1}}))});
    Bcs and_sys = default_contexts(
        {"a", "b"},
        {Constraint(Scope{Term::variable("a"), Term::variable("b")}, target)});
    std::map<Relation, GadgetDefinition> gadgets;
    gadgets[target] = g;
    ApplyResult ar = apply_gadgets(and_sys, gadgets);

    HomPair corrupted = ar.hom;
    // Make h_phi the all-+1 extension even for the satisfying row (a,b) =
    // (-1,-1), a non-satisfying extension of a satisfying assignment.
    const std::string &anc = ar.reduced.vars[2];
    AlgebraElement img(std::vector<std::string>{"a", "b"}, Basis::Projection);
    for (std::uint32_t idx = 0; idx < 4; ++idx) {
        img.coeff(idx) = Rational(1);
    }
    corrupted.pi[anc] = {0, img.converted(Basis::Monomial)};
    HomReport hr = verify_hom_pair(and_sys, ar.reduced, corrupted);
    REQUIRE_FALSE(hr.pass);
}

TEST_CASE("satisfiability transfers through reductions") {
    std::mt19937 rng(79);
    auto lang = testutil::three_sat_clauses();
    std::map<Relation, GadgetDefinition> cache;
    int done = 0;
    for (int trial = 0; trial < 60 && done < 25; ++trial) {
        Bcs b = testutil::random_bcs(rng, 5, 3, 3, 3);
        std::map<Relation, GadgetDefinition> gadgets;
        bool all = true;
        for (const auto &c : b.all_constraints()) {
            if (cache.count(c.relation)) {
                gadgets[c.relation] = cache[c.relation];
                continue;
            }
            auto res = pp_define_search(lang, c.relation, 1, 6, 400'000);
            if (res.status != SearchStatus::Found) {
                all = false;
                break;
            }
            cache[c.relation] = *res.gadget;
            gadgets[c.relation] = *res.gadget;
        }
        if (!all) {
            continue;
        }
        ++done;
        ApplyResult ar = apply_gadgets(b, gadgets);
        if (ar.reduced.vars.size() > 16) {
            continue;
        }
        REQUIRE(brute_force_sat(b).has_value() ==
                brute_force_sat(ar.reduced).has_value());
        REQUIRE(verify_hom_pair(b, ar.reduced, ar.hom).pass);
        for (const auto &[gen, img] : ar.hom.pi) {
            REQUIRE(img.element * img.element ==
                    AlgebraElement::one(img.element.varset()));
        }
    }
    REQUIRE(done > 0);
}

TEST_CASE("missing gadgets are rejected") {
    Bcs ms = gen_magic_square();
    std::map<Relation, GadgetDefinition> gadgets;
    gadgets[Relation::parity(3, +1)] = self_gadget(Relation::parity(3, +1));
    REQUIRE_THROWS_AS(apply_gadgets(ms, gadgets), std::invalid_argument);
}

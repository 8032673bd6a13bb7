#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "bcsalg/present.hpp"
#include "testutil.hpp"

using namespace bcsalg;

TEST_CASE("free presentation of the contextual algebra") {
    Bcs ms = gen_magic_square();
    Presentation p = build_acon(ms);
    REQUIRE(p.generators.size() == 9);
    REQUIRE(p.involutions.size() == 9);
    REQUIRE(p.commutations.size() == 18); // six triples, three pairs each
    REQUIRE(p.vanishing.empty());

    Presentation pair = build_acon(testutil::two_clause_example());
    REQUIRE_FALSE(pair.commutations.count({"x1", "x4"}));
    REQUIRE(pair.commutations.count({"x2", "x3"}));

    // one big context: complete commutation graph
    Bcs single;
    single.vars = testutil::var_names(5);
    Context ctx;
    ctx.vars = single.vars;
    single.contexts.push_back(ctx);
    REQUIRE(build_acon(single).commutations.size() == 10);
}

TEST_CASE("algebra forms") {
    auto and_sys = default_contexts(
        {"z1", "z2"},
        {Constraint(Scope{Term::variable("z1"), Term::variable("z2")},
                    Relation::of_members(2, {{-1, -1}}))});
    Presentation poly = build_algebra(and_sys, PresentationForm::Polynomial);
    REQUIRE(poly.vanishing.size() == 1);
    REQUIRE(poly.vanishing[0].element.dump() ==
            "3/2 + 1/2*z1 + 1/2*z2 - 1/2*z1*z2");

    auto trivial = default_contexts(
        {"x"}, {Constraint(Scope{Term::variable("x")}, Relation::full(1))});
    REQUIRE(build_algebra(trivial, PresentationForm::Constraints).vanishing.empty());

    Presentation ctxform = build_algebra(gen_magic_square(), PresentationForm::Contexts);
    REQUIRE(ctxform.vanishing.size() == 6 * 4);
}

TEST_CASE("vanishing sets coincide across the three forms") {
    Bcs ms = gen_magic_square();
    auto vs1 = vanishing_set(ms, PresentationForm::Contexts);
    auto vs2 = vanishing_set(ms, PresentationForm::Constraints);
    auto vs3 = vanishing_set(ms, PresentationForm::Polynomial);
    REQUIRE(vs1 == vs2);
    REQUIRE(vs2 == vs3);
    for (const auto &set : vs1.vanishing) {
        REQUIRE(set.size() == 4);
    }

    auto trivial = default_contexts(
        {"x"}, {Constraint(Scope{Term::variable("x")}, Relation::full(1))});
    for (auto form : {PresentationForm::Contexts, PresentationForm::Constraints,
                      PresentationForm::Polynomial}) {
        REQUIRE(vanishing_set(trivial, form).vanishing[0].empty());
    }

    auto contradictory = default_contexts(
        {"x"}, {Constraint(Scope{Term::variable("x")}, Relation::empty(1))});
    for (auto form : {PresentationForm::Contexts, PresentationForm::Constraints,
                      PresentationForm::Polynomial}) {
        REQUIRE(vanishing_set(contradictory, form).vanishing[0].size() == 2);
    }
}

TEST_CASE("vanishing sets coincide on random systems") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 60; ++trial) {
        Bcs b = testutil::random_bcs(rng, 8, 4, 4, 4);
        auto vs1 = vanishing_set(b, PresentationForm::Contexts);
        auto vs2 = vanishing_set(b, PresentationForm::Constraints);
        auto vs3 = vanishing_set(b, PresentationForm::Polynomial);
        REQUIRE(vs1 == vs2);
        REQUIRE(vs2 == vs3);
    }
}

TEST_CASE("sign vectors annihilating the relations are the satisfying assignments") {
    std::mt19937 rng(43);
    for (int trial = 0; trial < 30; ++trial) {
        Bcs b = testutil::random_bcs(rng, 8);
        Presentation p = build_algebra(b, PresentationForm::Contexts);
        for (std::uint32_t code = 0; code < (std::uint32_t(1) << b.vars.size()); ++code) {
            Assignment phi = detail::assignment_of_rank(b.vars, code);
            REQUIRE(annihilates_all(p, phi) == is_satisfying(b, phi));
        }
    }
}

TEST_CASE("linear systems have monomial polynomial relations") {
    Bcs ms = gen_magic_square();
    Presentation poly = build_algebra(ms, PresentationForm::Polynomial);
    for (const auto &entry : poly.vanishing) {
        const AlgebraElement e = entry.element.converted(Basis::Monomial);
        int nonconst = 0;
        for (std::uint32_t m = 1; m < e.coeffs().size(); ++m) {
            if (!e.coeff(m).is_zero()) {
                ++nonconst;
            }
        }
        REQUIRE(nonconst == 1);
    }
}

TEST_CASE("synchronous presentations") {
    SynchronousGame g(1, 2);
    g.set_win(0, 0, 0, 0, true);
    g.set_win(0, 0, 1, 1, true);
    Presentation p = synchronous_presentation(g);
    REQUIRE(p.form == PresentationForm::Synchronous);
    REQUIRE(p.generators.size() == 2);
    REQUIRE(p.partitions.size() == 1);
    REQUIRE(p.orthogonal.size() == 2); // e0 e1 and e1 e0

    SynchronousGame bad(1, 2);
    bad.set_win(0, 0, 0, 1, true);
    REQUIRE_THROWS_AS(synchronous_presentation(bad), std::invalid_argument);

    // lambda = 1 off-diagonal leaves only the synchronicity products
    SynchronousGame loose(2, 2);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    loose.set_win(i, j, a, b, i == j ? a == b : true);
                }
            }
        }
    }
    REQUIRE(synchronous_presentation(loose).orthogonal.size() == 4);
}

TEST_CASE("solution group of the magic square") {
    std::vector<std::vector<int>> a(6, std::vector<int>(9, 0));
    const int lines[6][3] = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8},
                             {0, 3, 6}, {1, 4, 7}, {2, 5, 8}};
    std::vector<int> rhs;
    for (int i = 0; i < 6; ++i) {
        for (int j : lines[i]) {
            a[(std::size_t)i][(std::size_t)j] = 1;
        }
        rhs.push_back(i < 3 ? 0 : 1);
    }
    GroupPresentation g = solution_group(a, rhs);
    REQUIRE(g.generators.size() == 10);
    // J^2, nine x^2, nine centrality, 18 commutations, six rows
    REQUIRE(g.relators.size() == 1 + 9 + 9 + 18 + 6);
    std::string text = g.text();
    REQUIRE(text.find("x1 x2 x3") != std::string::npos);
    REQUIRE(text.find("x1 x4 x7 J") != std::string::npos);

    GroupPresentation free = solution_group(std::vector<std::vector<int>>{}, {});
    REQUIRE(free.generators == std::vector<std::string>{"J"});

    GroupPresentation unit = solution_group({{1}}, {1});
    bool has_xj = false;
    for (const auto &r : unit.relators) {
        has_xj = has_xj || (r == std::vector<std::string>{"x1", "J"});
    }
    REQUIRE(has_xj);
}

TEST_CASE("forcing two variables to commute") {
    Bcs pair = testutil::two_clause_example();
    auto fc = force_commute(pair, "x1", "x4");
    REQUIRE(fc.added);
    REQUIRE(fc.system.vars.size() == 5);
    const Context &added = fc.system.contexts.back();
    REQUIRE(added.vars == std::vector<std::string>{"x1", "x4", fc.ancilla});
    auto vs = vanishing_set(fc.system, PresentationForm::Contexts);
    REQUIRE(vs.vanishing.back().size() == 4); // odd-parity assignments

    // the ancilla equals the product in every one-dimensional representation
    for (std::uint32_t code = 0; code < 32; ++code) {
        Assignment phi = detail::assignment_of_rank(fc.system.vars, code);
        if (is_satisfying(fc.system, phi)) {
            REQUIRE(phi.at(fc.ancilla) == phi.at("x1") * phi.at("x4"));
        }
    }

    auto noop = force_commute(pair, "x2", "x3");
    REQUIRE_FALSE(noop.added);
    REQUIRE(noop.system == pair);
}

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "bcsalg/games.hpp"
#include "testutil.hpp"

using namespace bcsalg;

TEST_CASE("game construction") {
    Bcs ms = gen_magic_square();
    NonlocalGame g = build_game(ms);
    REQUIRE(g.questions() == 6);
    for (int i = 0; i < 6; ++i) {
        REQUIRE(g.answers(i) == 8);
        REQUIRE(g.satisfying[(std::size_t)i].size() == 4);
    }
    // rows and columns share exactly one variable; count one pair's winners
    int winners = 0;
    for (std::uint32_t a = 0; a < 8; ++a) {
        for (std::uint32_t b = 0; b < 8; ++b) {
            if (g.wins(0, 3, a, b)) {
                ++winners;
            }
        }
    }
    REQUIRE(winners == 8); // 4 x 4 satisfying pairs, half agree on the shared cell

    // single context: the diagonal rule
    auto and_sys = default_contexts(
        {"x", "y"},
        {Constraint(Scope{Term::variable("x"), Term::variable("y")},
                    Relation::of_members(2, {{-1, -1}}))});
    NonlocalGame g1 = build_game(and_sys);
    for (std::uint32_t a = 0; a < 4; ++a) {
        for (std::uint32_t b = 0; b < 4; ++b) {
            REQUIRE(g1.wins(0, 0, a, b) == (a == b && a == 3));
        }
    }

    // disjoint contexts: consistency is vacuous
    auto two = default_contexts(
        {"x", "y"},
        {Constraint(Scope{Term::variable("x")}, Relation::full(1)),
         Constraint(Scope{Term::variable("y")}, Relation::full(1))});
    NonlocalGame g2 = build_game(two);
    for (std::uint32_t a = 0; a < 2; ++a) {
        for (std::uint32_t b = 0; b < 2; ++b) {
            REQUIRE(g2.wins(0, 1, a, b));
        }
    }
}

TEST_CASE("padding") {
    Bcs ms = gen_magic_square();
    PadResult pr = pad(ms);
    REQUIRE(pr.ancillas.empty());
    REQUIRE(pr.system == ms);

    auto uneven = default_contexts(
        {"a", "b", "c"},
        {Constraint(Scope{Term::variable("a")}, Relation::full(1)),
         Constraint(Scope{Term::variable("a"), Term::variable("b"), Term::variable("c")},
                    Relation::parity(3, +1))});
    PadResult pr2 = pad(uneven);
    REQUIRE(pr2.ancillas.size() == 2);
    for (const auto &ctx : pr2.system.contexts) {
        REQUIRE(ctx.vars.size() == 3);
    }
    // satisfying assignments extend with the ancillas pinned to +1
    auto w = brute_force_sat(pr2.system);
    REQUIRE(w.has_value());
    for (const auto &y : pr2.ancillas) {
        REQUIRE((*w).at(y) == +1);
    }
}

TEST_CASE("padding preserves satisfiability") {
    std::mt19937 rng(67);
    for (int trial = 0; trial < 50; ++trial) {
        Bcs b = testutil::random_bcs(rng, 7);
        PadResult pr = pad(b);
        auto before = brute_force_sat(b);
        auto after = brute_force_sat(pr.system);
        REQUIRE(before.has_value() == after.has_value());
        if (after) {
            for (const auto &y : pr.ancillas) {
                REQUIRE((*after).at(y) == +1);
            }
            Assignment restricted;
            for (const auto &v : b.vars) {
                restricted[v] = (*after).at(v);
            }
            REQUIRE(is_satisfying(b, restricted));
        }
    }
}

TEST_CASE("synchronous conversion of the magic square") {
    Bcs padded = pad(gen_magic_square()).system;
    SyncConversion sc = to_synchronous(padded);
    REQUIRE(sc.game.questions == 6);
    REQUIRE(sc.game.answers == 8);
    REQUIRE(sc.game.is_synchronous());

    // generator maps against the two-qubit representation
    MatrixRep rep = magic_square_pauli_rep();
    int d = rep.dim;
    Mat id = Mat::Identity(d, d);
    for (int i = 0; i < sc.game.questions; ++i) {
        Mat sum = Mat::Zero(d, d);
        for (std::uint32_t a = 0; a < 8; ++a) {
            Mat e = evaluate_element(sc.e_image(i, a), rep);
            REQUIRE((e - e.adjoint()).norm() <= 1e-9);
            REQUIRE((e * e - e).norm() <= 1e-9);
            sum += e;
        }
        REQUIRE((sum - id).norm() <= 1e-9);
    }
    for (const auto &x : padded.vars) {
        int qi = sc.var_question.at(x);
        Mat recon = Mat::Zero(d, d);
        for (auto [a, sgn] : sc.observable_expansion(x)) {
            recon += (double)sgn * evaluate_element(sc.e_image(qi, a), rep);
        }
        REQUIRE((recon - rep.image(x)).norm() <= 1e-9);
    }

    // orthogonality across losing pairs
    for (int i = 0; i < sc.game.questions; ++i) {
        for (int j = 0; j < sc.game.questions; ++j) {
            for (int a = 0; a < 8; ++a) {
                for (int b = 0; b < 8; ++b) {
                    if (!sc.game.wins(i, j, a, b)) {
                        Mat prod = evaluate_element(sc.e_image(i, (std::uint32_t)a), rep) *
                                   evaluate_element(sc.e_image(j, (std::uint32_t)b), rep);
                        REQUIRE(prod.norm() <= 1e-9);
                    }
                }
            }
        }
    }
}

TEST_CASE("synchronous conversion rejects bad inputs") {
    auto uneven = default_contexts(
        {"a", "b"},
        {Constraint(Scope{Term::variable("a")}, Relation::full(1)),
         Constraint(Scope{Term::variable("a"), Term::variable("b")}, Relation::full(2))});
    REQUIRE_THROWS_AS(to_synchronous(uneven), std::invalid_argument);

    Bcs orphan = default_contexts(
        {"a", "b"}, {Constraint(Scope{Term::variable("a")}, Relation::full(1))});
    REQUIRE_THROWS_AS(to_synchronous(orphan), std::invalid_argument);
}

TEST_CASE("the reverse construction reproduces the graph homomorphism system") {
    for (auto [gn, hn] : {std::pair{2, 2}, {3, 2}, {3, 3}}) {
        Graph g = Graph::complete(gn), h = Graph::complete(hn);
        SynchronousGame game = testutil::graph_hom_game(g, h);
        FromSynchronous fs = from_synchronous(game);
        REQUIRE(fs.system == gen_graph_hom(g, h));
    }

    // |I|=1, |O|=2, diagonal rule: two variables, exactly one true
    SynchronousGame tiny(1, 2);
    tiny.set_win(0, 0, 0, 0, true);
    tiny.set_win(0, 0, 1, 1, true);
    FromSynchronous fs = from_synchronous(tiny);
    REQUIRE(fs.system.vars.size() == 2);
    auto w = brute_force_sat(fs.system);
    REQUIRE(w.has_value());
}

TEST_CASE("reverse construction matches deterministic solvability") {
    std::mt19937 rng(71);
    for (int trial = 0; trial < 40; ++trial) {
        int q = std::uniform_int_distribution<int>(1, 3)(rng);
        int a = std::uniform_int_distribution<int>(2, 3)(rng);
        SynchronousGame game(q, a);
        for (int i = 0; i < q; ++i) {
            for (int j = 0; j < q; ++j) {
                for (int x = 0; x < a; ++x) {
                    for (int y = 0; y < a; ++y) {
                        bool win = i == j ? x == y
                                          : std::uniform_int_distribution<int>(0, 2)(rng) > 0;
                        game.set_win(i, j, x, y, win);
                    }
                }
            }
        }
        // a deterministic perfect strategy is an answer per question winning
        // every pair
        bool perfect = false;
        std::vector<int> pick((std::size_t)q, 0);
        std::function<bool(int)> go = [&](int i) -> bool {
            if (i == q) {
                return true;
            }
            for (int x = 0; x < a; ++x) {
                bool ok = true;
                for (int j = 0; j < i && ok; ++j) {
                    ok = game.wins(i, j, x, pick[(std::size_t)j]) &&
                         game.wins(j, i, pick[(std::size_t)j], x);
                }
                ok = ok && game.wins(i, i, x, x);
                if (ok) {
                    pick[(std::size_t)i] = x;
                    if (go(i + 1)) {
                        return true;
                    }
                }
            }
            return false;
        };
        perfect = go(0);
        FromSynchronous fs = from_synchronous(game);
        REQUIRE(brute_force_sat(fs.system).has_value() == perfect);
    }
}

TEST_CASE("strategy values") {
    Bcs ms = gen_magic_square();
    NonlocalGame g = build_game(ms);

    double qv = strategy_value(ms, g, Strategy::quantum(magic_square_pauli_rep()));
    REQUIRE(std::abs(qv - 1.0) <= 1e-9);

    double best = 0;
    for (std::uint32_t code = 0; code < 512; ++code) {
        Assignment phi = detail::assignment_of_rank(ms.vars, code);
        best = std::max(best, strategy_value(ms, g, Strategy::deterministic(phi)));
    }
    REQUIRE(best == Catch::Approx(25.0 / 36.0).epsilon(1e-12));
    REQUIRE(best <= 1.0 - 1.0 / 36.0);

    auto lin = gen_linear({{1, 1, 1}, {0, 1, 1}, {1, 1, 0}}, {1, 0, 0});
    auto w = brute_force_sat(lin);
    REQUIRE(std::abs(strategy_value(lin, build_game(lin), Strategy::deterministic(*w)) -
                     1.0) <= 1e-12);

    MatrixRep broken = magic_square_pauli_rep();
    broken.images["x1"] = -broken.images["x1"];
    REQUIRE_THROWS_AS(strategy_value(ms, g, Strategy::quantum(broken)),
                      std::invalid_argument);
}

TEST_CASE("deterministic perfection characterizes satisfiability") {
    std::mt19937 rng(73);
    for (int trial = 0; trial < 25; ++trial) {
        Bcs b = testutil::random_bcs(rng, 7);
        NonlocalGame g = build_game(b);
        bool sat = brute_force_sat(b).has_value();
        bool perfect = false;
        for (std::uint32_t code = 0; code < (std::uint32_t(1) << b.vars.size()) && !perfect;
             ++code) {
            Assignment phi = detail::assignment_of_rank(b.vars, code);
            perfect = strategy_value(b, g, Strategy::deterministic(phi)) == 1.0;
        }
        REQUIRE(perfect == sat);
    }
}

TEST_CASE("verified strategies never lose synchronous pairs") {
    Bcs ms = gen_magic_square();
    MatrixRep rep = magic_square_pauli_rep();
    int d = rep.dim;
    Mat id = Mat::Identity(d, d);
    NonlocalGame g = build_game(ms);
    for (int i = 0; i < g.questions(); ++i) {
        const auto &vars = g.question_vars[(std::size_t)i];
        for (std::uint32_t a = 0; a < g.answers(i); ++a) {
            for (std::uint32_t b = 0; b < g.answers(i); ++b) {
                if (a == b) {
                    continue;
                }
                Mat pa = id, pb = id;
                for (std::size_t p = 0; p < vars.size(); ++p) {
                    pa = pa * (0.5 * (id + ((a >> p) & 1 ? -1.0 : 1.0) * rep.image(vars[p])));
                    pb = pb * (0.5 * (id + ((b >> p) & 1 ? -1.0 : 1.0) * rep.image(vars[p])));
                }
                REQUIRE(std::abs((pa * pb).trace().real()) <= 1e-9);
            }
        }
    }
}

// Acceptance suite: one test per criterion, each printing a pass/fail line.

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <iostream>
#include <random>

#include "bcsalg/games.hpp"
#include "bcsalg/json_io.hpp"
#include "bcsalg/lang.hpp"
#include "bcsalg/model.hpp"
#include "bcsalg/present.hpp"
#include "bcsalg/reduce.hpp"
#include "bcsalg/reps.hpp"
#include "bcsalg/trace.hpp"
#include "testutil.hpp"

using namespace bcsalg;

namespace {

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

void report(int criterion, bool ok, const std::string &what, double secs) {
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << what
              << " (" << secs << " s)" << std::endl;
}

} // namespace

TEST_CASE("criterion 1: magic square classical infeasibility") {
    Stopwatch sw;
    Bcs ms = gen_magic_square();
    bool brute_unsat = !brute_force_sat(ms).has_value();
    bool rank_unsat = !solve_schaefer(ms).has_value();
    bool oracle_unsat = !testutil::oracle_sat(ms).has_value();
    double secs = sw.seconds();
    bool ok = brute_unsat && rank_unsat && oracle_unsat && secs < 1.0;
    report(1, ok, "512-assignment enumeration and F2 elimination agree on UNSAT", secs);
    REQUIRE(ok);
}

TEST_CASE("criterion 2: magic square quantum witness") {
    Stopwatch sw;
    Bcs ms = gen_magic_square();
    auto rep = pauli_search(ms, 2);
    bool ok = rep.has_value() && rep->dim == 4;
    if (ok) {
        for (auto form : {PresentationForm::Contexts, PresentationForm::Constraints,
                          PresentationForm::Polynomial}) {
            ok = ok && verify_rep(build_algebra(ms, form), *rep, 1e-9).pass;
        }
        for (const auto &ctx : ms.contexts) {
            JointSpectrum js = joint_spectrum(*rep, ctx.vars);
            for (const auto &[idx, rank] : js.points) {
                ok = ok &&
                     context_satisfying(ctx, detail::context_assignment(ctx.vars, idx));
            }
            ok = ok && js.total_rank() == rep->dim;
        }
        NonlocalGame g = build_game(ms);
        double value = strategy_value(ms, g, Strategy::quantum(*rep), 1e-9);
        ok = ok && std::abs(value - 1.0) <= 1e-9;
    }
    double secs = sw.seconds();
    ok = ok && secs < 5.0;
    report(2, ok, "dim-4 Pauli witness verifies in all forms, spectra satisfy, value 1.0",
           secs);
    REQUIRE(ok);
}

TEST_CASE("criterion 3: presentation equivalence on random systems") {
    Stopwatch sw;
    std::mt19937 rng(101);
    bool ok = true;
    for (int trial = 0; trial < 200; ++trial) {
        Bcs b = testutil::random_bcs(rng, 8, 5, 4, 4);
        auto vs1 = vanishing_set(b, PresentationForm::Contexts);
        auto vs2 = vanishing_set(b, PresentationForm::Constraints);
        auto vs3 = vanishing_set(b, PresentationForm::Polynomial);
        ok = ok && vs1 == vs2 && vs2 == vs3;
    }
    double secs = sw.seconds();
    ok = ok && secs < 30.0;
    report(3, ok, "three vanishing sets coincide exactly on 200 random systems", secs);
    REQUIRE(ok);
}

TEST_CASE("criterion 4: algebra identities") {
    Stopwatch sw;
    std::mt19937 rng(103);
    bool ok = true;

    // A pool of 100 random scopes (25 per arity) over four variables, with
    // constants and repetitions.
    auto vars = testutil::var_names(4);
    std::map<int, std::vector<Scope>> pool;
    for (int arity = 1; arity <= 4; ++arity) {
        for (int i = 0; i < 25; ++i) {
            Scope s;
            for (int p = 0; p < arity; ++p) {
                int pick = std::uniform_int_distribution<int>(0, 5)(rng);
                if (pick >= 4) {
                    s.push_back(Term::of_const(pick == 4 ? +1 : -1));
                } else {
                    s.push_back(Term::variable(vars[(std::size_t)pick]));
                }
            }
            pool[arity].push_back(std::move(s));
        }
    }
    auto check_identity = [&](const Relation &r, const Scope &s) {
        if (scope_vars(s).empty()) {
            return true; // no projections over an all-constant scope
        }
        Constraint c(s, r);
        AlgebraElement at = eval_scope_poly(indicator_poly(r, default_slots(r.arity)), s);
        AlgebraElement sum = AlgebraElement::zero(at.varset());
        for (const auto &tp : constraint_nonsat_projections(c)) {
            sum = sum + tp.element.embedded(at.varset());
        }
        return AlgebraElement::one(at.varset()) + at == Rational(2) * sum;
    };
    // every relation of arity <= 3, against every pool scope of its arity
    for (int arity = 1; arity <= 3; ++arity) {
        for (std::uint64_t code = 0; code < (std::uint64_t(1) << (1 << arity)); ++code) {
            Relation r = Relation::empty(arity);
            for (std::uint32_t idx = 0; idx < (std::uint32_t(1) << arity); ++idx) {
                r.table[idx] = (code >> idx) & 1;
            }
            for (const Scope &s : pool[arity]) {
                ok = ok && check_identity(r, s);
            }
        }
    }
    // every arity-4 relation, cycling through the pool
    for (std::uint64_t code = 0; code < (std::uint64_t(1) << 16); ++code) {
        Relation r = Relation::empty(4);
        for (std::uint32_t idx = 0; idx < 16; ++idx) {
            r.table[idx] = (code >> idx) & 1;
        }
        ok = ok && check_identity(r, pool[4][(std::size_t)(code % 25)]);
    }

    // Walsh round-trip, exact, on 1000 random elements with k <= 10
    for (int trial = 0; trial < 1000; ++trial) {
        int k = std::uniform_int_distribution<int>(1, 10)(rng);
        AlgebraElement e(testutil::var_names(k), Basis::Monomial);
        for (std::uint32_t m = 0; m < (std::uint32_t(1) << k); ++m) {
            e.coeff(m) = Rational(std::uniform_int_distribution<int>(-40, 40)(rng),
                                  std::uniform_int_distribution<int>(1, 12)(rng));
        }
        ok = ok && e.converted(Basis::Projection).converted(Basis::Monomial) == e;
    }
    double secs = sw.seconds();
    ok = ok && secs < 30.0;
    report(4, ok, "1 + P_R(S) = 2 sum of projections for every relation of arity <= 4; "
                  "Walsh round-trip exact",
           secs);
    REQUIRE(ok);
}

TEST_CASE("criterion 5: synchronous correspondence") {
    Stopwatch sw;
    bool ok = true;
    Bcs padded = pad(gen_magic_square()).system;
    SyncConversion sc = to_synchronous(padded);
    MatrixRep rep = magic_square_pauli_rep();
    int d = rep.dim;
    Mat id = Mat::Identity(d, d);
    for (int i = 0; i < sc.game.questions; ++i) {
        Mat sum = Mat::Zero(d, d);
        for (std::uint32_t a = 0; a < (std::uint32_t)sc.game.answers; ++a) {
            Mat e = evaluate_element(sc.e_image(i, a), rep);
            ok = ok && (e - e.adjoint()).norm() <= 1e-9 && (e * e - e).norm() <= 1e-9;
            sum += e;
            for (int j = 0; j < sc.game.questions; ++j) {
                for (std::uint32_t b = 0; b < (std::uint32_t)sc.game.answers; ++b) {
                    if (!sc.game.wins(i, j, (int)a, (int)b)) {
                        Mat f = evaluate_element(sc.e_image(j, b), rep);
                        ok = ok && (e * f).norm() <= 1e-9;
                    }
                }
            }
        }
        ok = ok && (sum - id).norm() <= 1e-9;
    }
    for (const auto &x : padded.vars) {
        Mat recon = Mat::Zero(d, d);
        int qi = sc.var_question.at(x);
        for (auto [a, sgn] : sc.observable_expansion(x)) {
            recon += (double)sgn * evaluate_element(sc.e_image(qi, a), rep);
        }
        ok = ok && (recon - rep.image(x)).norm() <= 1e-9;
    }
    for (auto [gn, hn] : {std::pair{2, 2}, {3, 2}, {3, 3}}) {
        Graph g = Graph::complete(gn), h = Graph::complete(hn);
        ok = ok &&
             from_synchronous(testutil::graph_hom_game(g, h)).system == gen_graph_hom(g, h);
    }
    double secs = sw.seconds();
    report(5, ok, "synchronous maps verify on the dim-4 rep; reverse construction "
                  "reproduces the graph homomorphism system",
           secs);
    REQUIRE(ok);
}

TEST_CASE("criterion 6: Schaefer classification and solvers") {
    Stopwatch sw;
    bool ok = true;
    // exhaustive agreement on all 256 arity-3 relations (and smaller arities)
    for (int k = 1; k <= 3; ++k) {
        for (std::uint32_t code = 0; code < (std::uint32_t(1) << (1 << k)); ++code) {
            Relation r = Relation::empty(k);
            for (std::uint32_t idx = 0; idx < (std::uint32_t(1) << k); ++idx) {
                r.table[idx] = (code >> idx) & 1;
            }
            ClassFlags f = classify_relation(r);
            ok = ok && f.bijunctive == cnf_certificate(r, CnfShape::Bijunctive).has_value();
            ok = ok && f.horn == cnf_certificate(r, CnfShape::Horn).has_value();
            ok = ok && f.dual_horn == cnf_certificate(r, CnfShape::DualHorn).has_value();
            ok = ok && f.linear == linear_certificate(r).has_value();
        }
    }
    std::mt19937 rng(107);
    using IC = testutil::InstanceClass;
    for (IC cls : {IC::Bijunctive, IC::Horn, IC::DualHorn, IC::Linear}) {
        for (int trial = 0; trial < 1000; ++trial) {
            Bcs b = testutil::random_class_instance(rng, cls, 12, 10);
            auto fast = solve_schaefer(b);
            auto slow = brute_force_sat(b);
            ok = ok && fast.has_value() == slow.has_value();
            if (fast) {
                ok = ok && is_satisfying(b, *fast);
            }
        }
    }
    double secs = sw.seconds();
    ok = ok && secs < 120.0;
    report(6, ok, "closure classification matches CNF reconstruction on all arity-3 "
                  "relations; 1000 random instances per class agree with brute force",
           secs);
    REQUIRE(ok);
}

TEST_CASE("criterion 7: reduction pipeline") {
    Stopwatch sw;
    bool ok = true;
    auto lang = testutil::three_sat_clauses();
    auto even = pp_define_search(lang, Relation::parity(3, +1), 0, 4);
    auto odd = pp_define_search(lang, Relation::parity(3, -1), 0, 4);
    ok = ok && even.status == SearchStatus::Found && even.gadget->ancilla_vars().empty();
    ok = ok && odd.status == SearchStatus::Found && odd.gadget->ancilla_vars().empty();
    Bcs ms = gen_magic_square();
    std::map<Relation, GadgetDefinition> gadgets;
    gadgets[Relation::parity(3, +1)] = *even.gadget;
    gadgets[Relation::parity(3, -1)] = *odd.gadget;
    ApplyResult ar = apply_gadgets(ms, gadgets);
    HomReport hr = verify_hom_pair(ms, ar.reduced, ar.hom);
    ok = ok && hr.pass;
    ok = ok && !brute_force_sat(ar.reduced).has_value();
    auto rep = pauli_search(ms, 2);
    ok = ok && rep.has_value();
    if (ok) {
        std::map<std::string, AlgebraElement> pi;
        for (const auto &[gen, img] : ar.hom.pi) {
            pi.emplace(gen, img.element);
        }
        MatrixRep rep2 =
            transport_rep(build_algebra(ms, PresentationForm::Contexts), *rep, pi, 1e-9);
        ok = ok &&
             verify_rep(build_algebra(ar.reduced, PresentationForm::Contexts), rep2, 1e-9)
                 .pass;
        double value = strategy_value(ar.reduced, build_game(ar.reduced),
                                      Strategy::quantum(rep2), 1e-9);
        ok = ok && std::abs(value - 1.0) <= 1e-9;
    }
    double secs = sw.seconds();
    ok = ok && secs < 60.0;
    report(7, ok, "3SAT gadgets found, homomorphism pair verified, UNSAT transfers, "
                  "transported rep wins the game",
           secs);
    REQUIRE(ok);
}

TEST_CASE("criterion 8: tracial obstruction") {
    Stopwatch sw;
    bool ok = true;
    TraceReport linked = trace_feasibility(testutil::double_square_with_link());
    ok = ok && linked.status == TraceStatus::Infeasible;
    ok = ok && linked.log.find("tau(x21) = 1/2") != std::string::npos;
    ok = ok && linked.log.find("tau(x21) = 0") != std::string::npos;
    Presentation lp =
        build_algebra(testutil::double_square_with_link(), PresentationForm::Polynomial);
    ok = ok && check_facts(lp, linked.facts);

    Bcs ms = gen_magic_square();
    TraceReport single = trace_feasibility(ms);
    ok = ok && single.status == TraceStatus::Unknown;

    // soundness: the normalized matrix trace of the dim-4 witness satisfies
    // every generated equation
    MatrixRep rep = magic_square_pauli_rep();
    int d = rep.dim;
    for (const auto &eq : single.system.equations) {
        double lhs = 0;
        for (const auto &[vi, coeff] : eq.terms) {
            Mat prod = Mat::Identity(d, d);
            for (const auto &letter : single.system.monomials[(std::size_t)vi]) {
                prod = prod * rep.image(letter);
            }
            lhs += coeff.to_double() * prod.trace().real() / d;
        }
        ok = ok && std::abs(lhs - eq.rhs.to_double()) <= 1e-9;
    }
    double secs = sw.seconds();
    ok = ok && secs < 120.0;
    std::cout << "    minimal certificate depth that succeeds: " << linked.max_fact_depth
              << " (default budget depth 12)" << std::endl;
    report(8, ok, "linked squares INFEASIBLE with the tau(x21) clash; single square "
                  "UNKNOWN; equations sound against the dim-4 trace",
           secs);
    REQUIRE(ok);
}

TEST_CASE("criterion 9: padding invariance") {
    Stopwatch sw;
    bool ok = true;
    std::mt19937 rng(109);
    for (int trial = 0; trial < 100; ++trial) {
        Bcs b = testutil::random_bcs(rng, 7);
        PadResult pr = pad(b);
        auto before = brute_force_sat(b);
        auto after = brute_force_sat(pr.system);
        ok = ok && before.has_value() == after.has_value();
        if (after) {
            for (const auto &y : pr.ancillas) {
                ok = ok && after->at(y) == +1;
            }
            // the witness restricted to the original variables satisfies it
            Assignment restricted;
            for (const auto &v : b.vars) {
                restricted[v] = after->at(v);
            }
            ok = ok && is_satisfying(b, restricted);
            // and as a 1x1 representation the ancilla images are exactly 1
            MatrixRep r = MatrixRep::from_assignment(*after);
            ok = ok &&
                 verify_rep(build_algebra(pr.system, PresentationForm::Contexts), r, 1e-12)
                     .pass;
            for (const auto &y : pr.ancillas) {
                ok = ok && std::abs(r.image(y)(0, 0).real() - 1.0) <= 1e-9;
            }
        }
    }
    // matrix case: a short context beside the magic square gets padded, and
    // any verified representation is forced to send the ancillas to identity
    Bcs ext = gen_magic_square();
    ext.vars.push_back("x10");
    Context extra;
    extra.vars = {"x10"};
    extra.constraints.emplace_back(Scope{Term::variable("x10")},
                                   Relation::of_members(1, {{+1}}));
    ext.contexts.push_back(extra);
    PadResult pr = pad(ext);
    ok = ok && pr.ancillas.size() == 2;
    MatrixRep rep = magic_square_pauli_rep();
    Mat id = Mat::Identity(4, 4);
    rep.images["x10"] = id;
    for (const auto &y : pr.ancillas) {
        rep.images[y] = id;
    }
    Presentation pp = build_algebra(pr.system, PresentationForm::Contexts);
    ok = ok && verify_rep(pp, rep, 1e-9).pass;
    for (const auto &y : pr.ancillas) {
        ok = ok && (rep.image(y) - id).norm() <= 1e-9;
    }
    MatrixRep bad = rep;
    bad.images[pr.ancillas[0]] = -id;
    ok = ok && !verify_rep(pp, bad, 1e-9).pass;
    double secs = sw.seconds();
    report(9, ok, "padding preserves satisfiability on 100 random systems and pins the "
                  "ancillas to +1 in verified representations",
           secs);
    REQUIRE(ok);
}

// Command-line front end for the BCS algebra toolkit.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "bcsalg/games.hpp"
#include "bcsalg/json_io.hpp"
#include "bcsalg/lang.hpp"
#include "bcsalg/model.hpp"
#include "bcsalg/present.hpp"
#include "bcsalg/reduce.hpp"
#include "bcsalg/reps.hpp"
#include "bcsalg/trace.hpp"
#include "bcsalg/zalgebra.hpp"

using namespace bcsalg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFails = 1;
constexpr int kExitUsage = 2;
constexpr int kExitUnknown = 3;

int workers_from_env() {
    const char *raw = std::getenv("BCS_WORKERS");
    if (!raw) {
        return 1;
    }
    int w = std::atoi(raw);
    return w >= 1 ? w : 1;
}

PresentationForm parse_form(const std::string &name) {
    if (name == "contexts") {
        return PresentationForm::Contexts;
    }
    if (name == "constraints") {
        return PresentationForm::Constraints;
    }
    if (name == "polynomial") {
        return PresentationForm::Polynomial;
    }
    throw std::invalid_argument("unknown form: " + name +
                                " (expected contexts|constraints|polynomial)");
}

void emit(const json &j, const std::string &out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        write_json_file(out_path, j);
    }
}

void emit_text(const std::string &text, const std::string &out_path) {
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_text_file(out_path, text);
    }
}

/// Two magic squares sharing nothing except the link x21 = x11 AND x12; the
/// showcase system whose algebra has representations but no tracial state.
Bcs double_square_with_link() {
    std::vector<std::string> vars;
    for (int s = 1; s <= 2; ++s) {
        for (int i = 1; i <= 9; ++i) {
            vars.push_back("x" + std::to_string(s) + std::to_string(i));
        }
    }
    auto v = [](int s, int i) { return "x" + std::to_string(s) + std::to_string(i); };
    std::vector<Constraint> cs;
    const int lines[6][3] = {{1, 2, 3}, {4, 5, 6}, {7, 8, 9},
                             {1, 4, 7}, {2, 5, 8}, {3, 6, 9}};
    for (int s = 1; s <= 2; ++s) {
        for (int c = 0; c < 6; ++c) {
            cs.emplace_back(Scope{Term::variable(v(s, lines[c][0])),
                                  Term::variable(v(s, lines[c][1])),
                                  Term::variable(v(s, lines[c][2]))},
                            Relation::parity(3, c < 3 ? +1 : -1));
        }
    }
    Relation zand = Relation::empty(3);
    for (std::uint32_t idx = 0; idx < 8; ++idx) {
        auto t = tuple_of_index(idx, 3);
        bool land = t[0] == -1 && t[1] == -1;
        if (t[2] == (land ? -1 : +1)) {
            zand.table[idx] = 1;
        }
    }
    cs.emplace_back(Scope{Term::variable(v(1, 1)), Term::variable(v(1, 2)),
                          Term::variable(v(2, 1))},
                    zand);
    return default_contexts(vars, cs);
}

std::vector<Relation> three_sat_clauses() {
    std::vector<Relation> out;
    for (int s1 : {-1, +1}) {
        for (int s2 : {-1, +1}) {
            for (int s3 : {-1, +1}) {
                out.push_back(Relation::clause({(Sign)s1, (Sign)s2, (Sign)s3}));
            }
        }
    }
    return out;
}

int demo_magic_square(double tol) {
    std::cout << "== magic square ==\n";
    Bcs ms = gen_magic_square();
    bool bf_unsat = !brute_force_sat(ms, kDefaultBruteForceCap, workers_from_env());
    bool lin_unsat = !solve_schaefer(ms);
    std::cout << "classical satisfiability: brute force " << (bf_unsat ? "UNSAT" : "SAT")
              << ", linear solver " << (lin_unsat ? "UNSAT" : "SAT") << "\n";
    auto rep = pauli_search(ms, 2);
    if (!rep) {
        std::cout << "pauli search failed to find a two-qubit witness\n";
        return kExitFails;
    }
    bool forms_ok = true;
    for (auto form : {PresentationForm::Contexts, PresentationForm::Constraints,
                      PresentationForm::Polynomial}) {
        forms_ok = forms_ok && verify_rep(build_algebra(ms, form), *rep, tol).pass;
    }
    std::cout << "dim-4 representation verified in all three forms: "
              << (forms_ok ? "yes" : "NO") << "\n";
    NonlocalGame g = build_game(ms);
    double value = strategy_value(ms, g, Strategy::quantum(*rep), tol);
    std::cout << "quantum game value: " << value << "\n";
    bool ok = bf_unsat && lin_unsat && forms_ok && std::abs(value - 1.0) <= 1e-9;
    return ok ? kExitOk : kExitFails;
}

int demo_reduction(double tol) {
    std::cout << "== definability reduction to 3SAT ==\n";
    auto lang = three_sat_clauses();
    auto even = pp_define_search(lang, Relation::parity(3, +1), 0, 4);
    auto odd = pp_define_search(lang, Relation::parity(3, -1), 0, 4);
    if (even.status != SearchStatus::Found || odd.status != SearchStatus::Found) {
        std::cout << "gadget search failed\n";
        return kExitFails;
    }
    std::cout << "parity gadgets found: " << even.gadget->system.contexts.size() << " and "
              << odd.gadget->system.contexts.size() << " clauses, no ancillas\n";
    Bcs ms = gen_magic_square();
    std::map<Relation, GadgetDefinition> gadgets;
    gadgets[Relation::parity(3, +1)] = *even.gadget;
    gadgets[Relation::parity(3, -1)] = *odd.gadget;
    auto applied = apply_gadgets(ms, gadgets);
    std::cout << "reduced system: " << applied.reduced.vars.size() << " variables, "
              << applied.reduced.all_constraints().size() << " clauses\n";
    auto hom = verify_hom_pair(ms, applied.reduced, applied.hom);
    std::cout << "homomorphism pair verification: " << (hom.pass ? "pass" : "FAIL") << "\n";
    bool unsat = !brute_force_sat(applied.reduced);
    std::cout << "reduced system classically: " << (unsat ? "UNSAT" : "SAT") << "\n";
    auto rep = pauli_search(ms, 2);
    std::map<std::string, AlgebraElement> pi;
    for (const auto &[gen, img] : applied.hom.pi) {
        pi.emplace(gen, img.element);
    }
    auto rep2 = transport_rep(build_algebra(ms, PresentationForm::Contexts), *rep, pi, tol);
    bool rep_ok =
        verify_rep(build_algebra(applied.reduced, PresentationForm::Contexts), rep2, tol).pass;
    double value = strategy_value(applied.reduced, build_game(applied.reduced),
                                  Strategy::quantum(rep2), tol);
    std::cout << "transported dim-4 representation verifies: " << (rep_ok ? "yes" : "NO")
              << ", game value " << value << "\n";
    bool ok = hom.pass && unsat && rep_ok && std::abs(value - 1.0) <= 1e-9;
    return ok ? kExitOk : kExitFails;
}

int demo_tracial(int depth, int maxlen) {
    std::cout << "== tracial obstruction ==\n";
    TraceOptions opts;
    opts.depth = depth;
    opts.maxlen = maxlen;
    Bcs linked = double_square_with_link();
    auto rep = trace_feasibility(linked, opts);
    std::cout << rep.log;
    std::cout << "two linked squares: "
              << (rep.status == TraceStatus::Infeasible ? "INFEASIBLE" : "UNKNOWN") << "\n";
    auto single = trace_feasibility(gen_magic_square(), opts);
    std::cout << "single square: "
              << (single.status == TraceStatus::Unknown ? "UNKNOWN" : "INFEASIBLE") << "\n";
    bool ok = rep.status == TraceStatus::Infeasible && single.status == TraceStatus::Unknown;
    return ok ? kExitOk : kExitFails;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"BCS algebra toolkit: constraint systems, their algebras, games, "
                 "reductions, representations and trace obstructions"};
    app.require_subcommand(1);

    std::string in_path, in_path2, in_path3, out_path, form_name = "contexts";
    std::string assignment_path, rep_path, gadgets_path;
    double tol = kDefaultTol;
    int depth = 12, maxlen = 4, max_vars = kDefaultBruteForceCap, qubits = 2, context_id = -1;
    int max_ancillas = 0, max_constraints = 4;

    auto *parse_cmd = app.add_subcommand("parse", "validate a BCS file");
    parse_cmd->add_option("file", in_path)->required();

    auto *solve_cmd = app.add_subcommand("solve", "decide satisfiability (class solver, "
                                                  "brute-force fallback)");
    solve_cmd->add_option("file", in_path)->required();
    solve_cmd->add_option("--max-vars", max_vars, "brute force variable cap");

    auto *classify_cmd = app.add_subcommand("classify", "Schaefer class flags and "
                                                        "defining-CNF certificates");
    classify_cmd->add_option("file", in_path)->required();
    classify_cmd->add_option("-o,--output", out_path);

    auto *algebra_cmd = app.add_subcommand("algebra", "emit a presentation of the algebra");
    algebra_cmd->add_option("file", in_path)->required();
    algebra_cmd->add_option("--form", form_name, "contexts|constraints|polynomial");
    algebra_cmd->add_option("-o,--output", out_path);

    auto *vanishing_cmd = app.add_subcommand("vanishing", "per-context vanishing sets");
    vanishing_cmd->add_option("file", in_path)->required();
    vanishing_cmd->add_option("--form", form_name);
    vanishing_cmd->add_option("-o,--output", out_path);

    auto *game_cmd = app.add_subcommand("game", "the nonlocal game of the system");
    game_cmd->add_option("file", in_path)->required();
    game_cmd->add_option("-o,--output", out_path);

    auto *pad_cmd = app.add_subcommand("pad", "equalize context sizes with forced ancillas");
    pad_cmd->add_option("file", in_path)->required();
    pad_cmd->add_option("-o,--output", out_path);

    auto *sync_cmd = app.add_subcommand("sync", "synchronous game conversions");
    sync_cmd->require_subcommand(1);
    auto *sync_to = sync_cmd->add_subcommand("to", "BCS -> synchronous game + maps");
    sync_to->add_option("file", in_path)->required();
    sync_to->add_option("-o,--output", out_path);
    auto *sync_from = sync_cmd->add_subcommand("from", "synchronous game -> BCS");
    sync_from->add_option("file", in_path)->required();
    sync_from->add_option("-o,--output", out_path);

    auto *sgroup_cmd = app.add_subcommand("sgroup", "solution group of a linear system");
    sgroup_cmd->add_option("file", in_path)->required();
    sgroup_cmd->add_option("-o,--output", out_path);

    auto *verify_cmd = app.add_subcommand("verify-rep", "check a matrix representation");
    verify_cmd->add_option("file", in_path)->required();
    verify_cmd->add_option("rep", rep_path)->required();
    verify_cmd->add_option("--form", form_name);
    verify_cmd->add_option("--tol", tol);

    auto *spectrum_cmd = app.add_subcommand("spectrum", "joint spectra per context");
    spectrum_cmd->add_option("file", in_path)->required();
    spectrum_cmd->add_option("rep", rep_path)->required();
    spectrum_cmd->add_option("--context", context_id, "restrict to one context");
    spectrum_cmd->add_option("--tol", tol);
    spectrum_cmd->add_option("-o,--output", out_path);

    auto *pauli_cmd = app.add_subcommand("pauli-search", "search signed Pauli-word "
                                                         "representations of a linear system");
    pauli_cmd->add_option("file", in_path)->required();
    pauli_cmd->add_option("--qubits", qubits)->required();
    pauli_cmd->add_option("--tol", tol);
    pauli_cmd->add_option("-o,--output", out_path);

    auto *reduce_cmd = app.add_subcommand("reduce", "apply pp-definability gadgets");
    reduce_cmd->add_option("file", in_path)->required();
    reduce_cmd->add_option("--gadgets", gadgets_path, "gadget list file, or 3sat to search "
                                                      "clause gadgets")
        ->required();
    reduce_cmd->add_option("--max-ancillas", max_ancillas);
    reduce_cmd->add_option("--max-constraints", max_constraints);
    reduce_cmd->add_option("-o,--output", out_path);

    auto *vhom_cmd = app.add_subcommand("verify-hom", "check a homomorphism pair");
    vhom_cmd->add_option("file", in_path)->required();
    vhom_cmd->add_option("reduced", in_path2)->required();
    vhom_cmd->add_option("hom", in_path3)->required();

    auto *transport_cmd = app.add_subcommand("transport", "push a representation through pi");
    transport_cmd->add_option("file", in_path)->required();
    transport_cmd->add_option("rep", rep_path)->required();
    transport_cmd->add_option("hom", in_path3)->required();
    transport_cmd->add_option("--tol", tol);
    transport_cmd->add_option("-o,--output", out_path);

    auto *value_cmd = app.add_subcommand("strategy-value", "value of a strategy for the game");
    value_cmd->add_option("file", in_path)->required();
    value_cmd->add_option("--assignment", assignment_path);
    value_cmd->add_option("--rep", rep_path);
    value_cmd->add_option("--tol", tol);

    auto *trace_cmd = app.add_subcommand("trace-check", "trace-feasibility relaxation");
    trace_cmd->add_option("file", in_path)->required();
    trace_cmd->add_option("--depth", depth);
    trace_cmd->add_option("--maxlen", maxlen);
    trace_cmd->add_option("-o,--output", out_path);

    auto *demo_cmd = app.add_subcommand("demo", "run the showcase pipelines");
    std::string which = "all";
    demo_cmd->add_option("which", which, "magic-square|reduction|tracial|all");
    demo_cmd->add_option("--tol", tol);
    demo_cmd->add_option("--depth", depth);
    demo_cmd->add_option("--maxlen", maxlen);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*parse_cmd) {
            Bcs b = bcs_from_json(read_json_file(in_path));
            std::cout << "ok: " << b.vars.size() << " variables, " << b.contexts.size()
                      << " contexts, " << b.all_constraints().size() << " constraints\n";
            return kExitOk;
        }
        if (*solve_cmd) {
            Bcs b = bcs_from_json(read_json_file(in_path));
            std::optional<Assignment> witness;
            bool via_class = true;
            try {
                witness = solve_schaefer(b);
            } catch (const NotSchaeferError &) {
                via_class = false;
                witness = brute_force_sat(b, max_vars, workers_from_env());
            }
            if (witness) {
                json out = {{"status", "SAT"},
                            {"witness", assignment_to_json(*witness)},
                            {"method", via_class ? "class solver" : "brute force"}};
                std::cout << out.dump(2) << "\n";
            } else {
                std::cout << json{{"status", "UNSAT"},
                                  {"method", via_class ? "class solver" : "brute force"}}
                                 .dump(2)
                          << "\n";
            }
            return kExitOk;
        }
        if (*classify_cmd) {
            Bcs b = bcs_from_json(read_json_file(in_path));
            ClassFlags flags = classify_bcs(b);
            json rels = json::array();
            for (const auto &[xs, r] : specialize(b).items) {
                ClassFlags f = classify_relation(r);
                json entry{{"vars", xs}, {"flags", flags_to_json(f)}};
                json certs = json::object();
                auto emit_cnf = [&](const char *key, CnfShape shape) {
                    if (auto cert = cnf_certificate(r, shape)) {
                        json clauses = json::array();
                        for (const auto &cl : *cert) {
                            json lits = json::array();
                            for (const auto &lit : cl) {
                                std::string name = xs[(std::size_t)lit.coord];
                                lits.push_back(lit.positive() ? name : "-" + name);
                            }
                            clauses.push_back(json{{"type", "clause"}, {"literals", lits}});
                        }
                        certs[key] = std::move(clauses);
                    }
                };
                if (f.bijunctive) {
                    emit_cnf("bijunctive", CnfShape::Bijunctive);
                }
                if (f.horn) {
                    emit_cnf("horn", CnfShape::Horn);
                }
                if (f.dual_horn) {
                    emit_cnf("dual_horn", CnfShape::DualHorn);
                }
                if (f.linear) {
                    if (auto cert = linear_certificate(r)) {
                        json eqs = json::array();
                        for (const auto &eq : *cert) {
                            json sup = json::array();
                            for (int c : eq.coords) {
                                sup.push_back(xs[(std::size_t)c]);
                            }
                            eqs.push_back(json{{"type", "linear"},
                                               {"support", sup},
                                               {"rhs", (int)eq.rhs}});
                        }
                        certs["linear"] = std::move(eqs);
                    }
                }
                entry["certificates"] = std::move(certs);
                rels.push_back(std::move(entry));
            }
            emit(json{{"flags", flags_to_json(flags)}, {"relations", rels}}, out_path);
            return kExitOk;
        }
        if (*algebra_cmd) {
            Bcs b = bcs_from_json(read_json_file(in_path));
            emit(presentation_to_json(build_algebra(b, parse_form(form_name))), out_path);
            return kExitOk;
        }
        if (*vanishing_cmd) {
            Bcs b = bcs_from_json(read_json_file(in_path));
            emit(vanishing_set_to_json(vanishing_set(b, parse_form(form_name))), out_path);
            return kExitOk;
        }
        if (*game_cmd) {
            Bcs b = bcs_from_json(read_json_file(in_path));
            emit(game_to_json(build_game(b)), out_path);
            return kExitOk;
        }
        if (*pad_cmd) {
            Bcs b = bcs_from_json(read_json_file(in_path));
            emit(bcs_to_json(pad(b).system), out_path);
            return kExitOk;
        }
        if (*sync_to) {
            Bcs b = bcs_from_json(read_json_file(in_path));
            SyncConversion sc = to_synchronous(b);
            json maps = json::object();
            json e_to_bcs = json::array();
            for (int i = 0; i < sc.game.questions; ++i) {
                for (std::uint32_t a = 0; a < (std::uint32_t)sc.game.answers; ++a) {
                    json e = element_to_json(sc.e_image(i, a));
                    e["generator"] = sync_generator_name(i, (int)a);
                    e_to_bcs.push_back(std::move(e));
                }
            }
            maps["e_to_bcs"] = std::move(e_to_bcs);
            json x_to_sync = json::object();
            for (const auto &[x, qi] : sc.var_question) {
                json terms = json::array();
                for (auto [a, sgn] : sc.observable_expansion(x)) {
                    terms.push_back(json::array({sync_generator_name(qi, (int)a), (int)sgn}));
                }
                x_to_sync[x] = json{{"question", qi}, {"sum", std::move(terms)}};
            }
            maps["x_to_sync"] = std::move(x_to_sync);
            emit(json{{"game", sync_game_to_json(sc.game)},
                      {"question_vars", sc.question_vars},
                      {"maps", std::move(maps)}},
                 out_path);
            return kExitOk;
        }
        if (*sync_from) {
            SynchronousGame g = sync_game_from_json(read_json_file(in_path));
            FromSynchronous fs = from_synchronous(g);
            emit(bcs_to_json(fs.system), out_path);
            return kExitOk;
        }
        if (*sgroup_cmd) {
            Bcs b = bcs_from_json(read_json_file(in_path));
            std::map<std::string, int> vid;
            for (std::size_t i = 0; i < b.vars.size(); ++i) {
                vid[b.vars[i]] = (int)i;
            }
            std::vector<std::vector<int>> a;
            std::vector<int> rhs;
            for (const auto &[xs, r] : specialize(b).items) {
                auto cert = linear_certificate(r);
                if (!cert) {
                    throw std::invalid_argument("sgroup needs a linear system");
                }
                for (const auto &eq : *cert) {
                    std::vector<int> row(b.vars.size(), 0);
                    for (int c : eq.coords) {
                        row[(std::size_t)vid[xs[(std::size_t)c]]] = 1;
                    }
                    a.push_back(std::move(row));
                    rhs.push_back(eq.rhs == -1 ? 1 : 0);
                }
            }
            emit_text(solution_group(a, rhs).text(), out_path);
            return kExitOk;
        }
        if (*verify_cmd) {
            Bcs b = bcs_from_json(read_json_file(in_path));
            MatrixRep r = rep_from_json(read_json_file(rep_path));
            VerifyReport vr = verify_rep(build_algebra(b, parse_form(form_name)), r, tol);
            json out{{"pass", vr.pass},
                     {"tol", vr.tol},
                     {"max_hermiticity", vr.max_hermiticity},
                     {"max_involution", vr.max_involution},
                     {"max_commutator", vr.max_commutator},
                     {"max_vanishing", vr.max_vanishing},
                     {"failures", vr.failures}};
            std::cout << out.dump(2) << "\n";
            return vr.pass ? kExitOk : kExitFails;
        }
        if (*spectrum_cmd) {
            Bcs b = bcs_from_json(read_json_file(in_path));
            MatrixRep r = rep_from_json(read_json_file(rep_path));
            json out = json::array();
            for (std::size_t ci = 0; ci < b.contexts.size(); ++ci) {
                if (context_id >= 0 && (int)ci != context_id) {
                    continue;
                }
                JointSpectrum js = joint_spectrum(r, b.contexts[ci].vars, tol);
                json points = json::array();
                for (const auto &[idx, rank] : js.points) {
                    json row = json::array();
                    for (Sign s : tuple_of_index(idx, (int)js.vars.size())) {
                        row.push_back((int)s);
                    }
                    points.push_back(json{{"assignment", row}, {"rank", rank}});
                }
                out.push_back(json{{"context", ci}, {"vars", js.vars}, {"points", points}});
            }
            emit(out, out_path);
            return kExitOk;
        }
        if (*pauli_cmd) {
            Bcs b = bcs_from_json(read_json_file(in_path));
            PauliSearchOptions opts;
            opts.tol = tol;
            auto rep = pauli_search(b, qubits, opts);
            if (!rep) {
                std::cout << "no signed Pauli-word representation on " << qubits
                          << " qubit(s)\n";
                return kExitFails;
            }
            emit(rep_to_json(*rep), out_path);
            return kExitOk;
        }
        if (*reduce_cmd) {
            Bcs b = bcs_from_json(read_json_file(in_path));
            std::map<Relation, GadgetDefinition> gadgets;
            if (gadgets_path == "3sat") {
                std::vector<Relation> lang;
                for (int s1 : {-1, +1}) {
                    for (int s2 : {-1, +1}) {
                        for (int s3 : {-1, +1}) {
                            lang.push_back(Relation::clause({(Sign)s1, (Sign)s2, (Sign)s3}));
                        }
                    }
                }
                for (const auto &[xs, r] : specialize(b).items) {
                    if (gadgets.count(r)) {
                        continue;
                    }
                    auto res = pp_define_search(lang, r, max_ancillas, max_constraints);
                    if (res.status == SearchStatus::Budget) {
                        std::cout << "gadget search ran out of budget\n";
                        return kExitUnknown;
                    }
                    if (res.status != SearchStatus::Found) {
                        std::cout << "no gadget found within bounds for a relation\n";
                        return kExitFails;
                    }
                    gadgets[r] = *res.gadget;
                }
                // apply to the original constraint relations, not specialized
                for (const auto &c : b.all_constraints()) {
                    if (!gadgets.count(c.relation)) {
                        auto res =
                            pp_define_search(lang, c.relation, max_ancillas, max_constraints);
                        if (res.status == SearchStatus::Budget) {
                            return kExitUnknown;
                        }
                        if (res.status != SearchStatus::Found) {
                            return kExitFails;
                        }
                        gadgets[c.relation] = *res.gadget;
                    }
                }
            } else {
                for (const auto &gj : read_json_file(gadgets_path)) {
                    GadgetDefinition g = gadget_from_json(gj);
                    gadgets[g.target] = g;
                }
            }
            ApplyResult ar = apply_gadgets(b, gadgets);
            json out{{"system", bcs_to_json(ar.reduced)},
                     {"hom", hom_pair_to_json(ar.hom)}};
            emit(out, out_path);
            return kExitOk;
        }
        if (*vhom_cmd) {
            Bcs b = bcs_from_json(read_json_file(in_path));
            Bcs reduced = bcs_from_json(read_json_file(in_path2));
            HomPair h = hom_pair_from_json(read_json_file(in_path3));
            HomReport hr = verify_hom_pair(b, reduced, h);
            json out{{"pass", hr.pass},
                     {"commutation_structural", hr.commutation_structural},
                     {"failures", hr.failures}};
            std::cout << out.dump(2) << "\n";
            return hr.pass ? kExitOk : kExitFails;
        }
        if (*transport_cmd) {
            Bcs b = bcs_from_json(read_json_file(in_path));
            MatrixRep r = rep_from_json(read_json_file(rep_path));
            HomPair h = hom_pair_from_json(read_json_file(in_path3));
            std::map<std::string, AlgebraElement> pi;
            for (const auto &[gen, img] : h.pi) {
                pi.emplace(gen, img.element);
            }
            MatrixRep out =
                transport_rep(build_algebra(b, PresentationForm::Contexts), r, pi, tol);
            emit(rep_to_json(out), out_path);
            return kExitOk;
        }
        if (*value_cmd) {
            Bcs b = bcs_from_json(read_json_file(in_path));
            NonlocalGame g = build_game(b);
            Strategy s;
            if (!assignment_path.empty()) {
                s = Strategy::deterministic(
                    assignment_from_json(read_json_file(assignment_path)));
            } else if (!rep_path.empty()) {
                s = Strategy::quantum(rep_from_json(read_json_file(rep_path)));
            } else {
                throw std::invalid_argument("strategy-value needs --assignment or --rep");
            }
            double value = strategy_value(b, g, s, tol);
            std::cout << json{{"value", value}}.dump(2) << "\n";
            return kExitOk;
        }
        if (*trace_cmd) {
            Bcs b = bcs_from_json(read_json_file(in_path));
            TraceOptions opts;
            opts.depth = depth;
            opts.maxlen = maxlen;
            TraceReport tr = trace_feasibility(b, opts);
            emit_text(tr.log, out_path);
            if (tr.status == TraceStatus::Infeasible) {
                std::cout << "INFEASIBLE: no tracial state\n";
                return kExitOk;
            }
            std::cout << "UNKNOWN: relaxation is consistent at this budget\n";
            return kExitUnknown;
        }
        if (*demo_cmd) {
            int rc = kExitOk;
            if (which == "magic-square" || which == "all") {
                rc = std::max(rc, demo_magic_square(tol));
            }
            if (which == "reduction" || which == "all") {
                rc = std::max(rc, demo_reduction(tol));
            }
            if (which == "tracial" || which == "all") {
                rc = std::max(rc, demo_tracial(depth, maxlen));
            }
            return rc;
        }
    } catch (const BudgetExceeded &e) {
        std::cerr << "unknown within budget: " << e.what() << "\n";
        return kExitUnknown;
    } catch (const ResourceError &e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

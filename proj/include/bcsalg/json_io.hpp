#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "bcsalg/games.hpp"
#include "bcsalg/lang.hpp"
#include "bcsalg/model.hpp"
#include "bcsalg/present.hpp"
#include "bcsalg/reduce.hpp"
#include "bcsalg/reps.hpp"
#include "bcsalg/zalgebra.hpp"

namespace bcsalg {

using json = nlohmann::ordered_json;

// Sign values in files may use the +-1 convention or 0/1 (1 = TRUE). A
// relation-level scan decides: any 0 means 0/1, any -1 means +-1, all-ones
// defaults to +-1 (all FALSE).

namespace jio {

inline Sign normalize_sign(int raw, bool zero_one) {
    if (zero_one) {
        if (raw == 1) {
            return -1;
        }
        if (raw == 0) {
            return +1;
        }
        throw std::invalid_argument("sign out of range in 0/1 convention");
    }
    if (raw == 1 || raw == -1) {
        return (Sign)raw;
    }
    throw std::invalid_argument("sign must be +-1 (or use the 0/1 convention throughout)");
}

inline bool detect_zero_one(const json &members) {
    bool any_zero = false;
    for (const auto &row : members) {
        for (const auto &v : row) {
            int raw = v.get<int>();
            if (raw == 0) {
                any_zero = true;
            } else if (raw == -1) {
                return false;
            }
        }
    }
    return any_zero;
}

inline Term parse_term(const std::string &s) {
    if (s == "+1" || s == "1") {
        return Term::of_const(+1);
    }
    if (s == "-1") {
        return Term::of_const(-1);
    }
    if (s.empty()) {
        throw std::invalid_argument("empty scope term");
    }
    return Term::variable(s);
}

inline std::string term_str(const Term &t) {
    if (t.is_const) {
        return t.constant == +1 ? "+1" : "-1";
    }
    return t.var;
}

} // namespace jio

inline json relation_to_json(const Relation &r) {
    json members = json::array();
    for (std::uint32_t idx : r.member_indices()) {
        json row = json::array();
        for (Sign s : tuple_of_index(idx, r.arity)) {
            row.push_back((int)s);
        }
        members.push_back(std::move(row));
    }
    return json{{"type", "table"}, {"arity", r.arity}, {"members", std::move(members)}};
}

inline Relation relation_from_json(const json &j) {
    std::string type = j.value("type", "table");
    if (type == "table") {
        int arity = j.at("arity").get<int>();
        const json &members = j.at("members");
        bool zero_one = jio::detect_zero_one(members);
        std::vector<std::vector<Sign>> rows;
        for (const auto &row : members) {
            std::vector<Sign> t;
            for (const auto &v : row) {
                t.push_back(jio::normalize_sign(v.get<int>(), zero_one));
            }
            rows.push_back(std::move(t));
        }
        return Relation::of_members(arity, rows);
    }
    if (type == "clause") {
        // literals: "x" (true when x = -1) or "-x" (true when x = +1);
        // constants fold into fixed-satisfaction coordinates.
        std::vector<Sign> satsigns;
        for (const auto &lit : j.at("literals")) {
            std::string s = lit.get<std::string>();
            bool negated = !s.empty() && s[0] == '-' && s != "-1";
            satsigns.push_back(negated ? +1 : -1);
        }
        return Relation::clause(satsigns);
    }
    if (type == "linear") {
        int k = (int)j.at("support").size();
        int raw = j.at("rhs").get<int>();
        // rhs is read in the +-1 convention; a literal 0 normalizes to +1.
        if (raw != -1 && raw != 0 && raw != 1) {
            throw std::invalid_argument("linear rhs must be +-1 (or 0)");
        }
        return Relation::parity(k, raw == -1 ? -1 : +1);
    }
    throw std::invalid_argument("unknown relation type: " + type);
}

/// The scope of a clause/linear relation is implied by its literals/support;
/// table relations need an explicit scope.
inline Constraint constraint_from_json(const json &j) {
    const json &rel = j.at("relation");
    std::string type = rel.value("type", "table");
    Relation r = relation_from_json(rel);
    Scope s;
    if (j.contains("scope")) {
        for (const auto &t : j.at("scope")) {
            s.push_back(jio::parse_term(t.get<std::string>()));
        }
    } else if (type == "clause") {
        for (const auto &lit : rel.at("literals")) {
            std::string raw = lit.get<std::string>();
            if (!raw.empty() && raw[0] == '-' && raw != "-1") {
                raw = raw.substr(1);
            }
            s.push_back(jio::parse_term(raw));
        }
    } else if (type == "linear") {
        for (const auto &v : rel.at("support")) {
            s.push_back(jio::parse_term(v.get<std::string>()));
        }
    } else {
        throw std::invalid_argument("table relation constraint needs a scope");
    }
    return Constraint(std::move(s), std::move(r));
}

inline json constraint_to_json(const Constraint &c) {
    json scope = json::array();
    for (const auto &t : c.scope) {
        scope.push_back(jio::term_str(t));
    }
    return json{{"scope", std::move(scope)}, {"relation", relation_to_json(c.relation)}};
}

inline json bcs_to_json(const Bcs &b) {
    json contexts = json::array();
    for (const auto &ctx : b.contexts) {
        json cs = json::array();
        for (const auto &c : ctx.constraints) {
            cs.push_back(constraint_to_json(c));
        }
        contexts.push_back(json{{"vars", ctx.vars}, {"constraints", std::move(cs)}});
    }
    return json{{"vars", b.vars}, {"contexts", std::move(contexts)}};
}

inline Bcs bcs_from_json(const json &j) {
    std::vector<std::string> vars = j.at("vars").get<std::vector<std::string>>();
    if (!j.contains("contexts")) {
        std::vector<Constraint> cs;
        if (j.contains("constraints")) {
            for (const auto &cj : j.at("constraints")) {
                cs.push_back(constraint_from_json(cj));
            }
        }
        return default_contexts(vars, cs);
    }
    Bcs b;
    b.vars = std::move(vars);
    for (const auto &cj : j.at("contexts")) {
        Context ctx;
        ctx.vars = cj.at("vars").get<std::vector<std::string>>();
        if (cj.contains("constraints")) {
            for (const auto &cc : cj.at("constraints")) {
                ctx.constraints.push_back(constraint_from_json(cc));
            }
        }
        b.contexts.push_back(std::move(ctx));
    }
    validate(b);
    return b;
}

inline json assignment_to_json(const Assignment &phi) {
    json out = json::object();
    for (const auto &[v, s] : phi) {
        out[v] = (int)s;
    }
    return out;
}

inline Assignment assignment_from_json(const json &j) {
    Assignment phi;
    for (auto it = j.begin(); it != j.end(); ++it) {
        int raw = it.value().get<int>();
        phi[it.key()] = jio::normalize_sign(raw, raw == 0);
    }
    return phi;
}

inline json element_to_json(const AlgebraElement &e) {
    return json{{"vars", e.varset()}, {"element", e.dump()}};
}

inline AlgebraElement element_from_json(const json &j) {
    return parse_element(j.at("element").get<std::string>(),
                         j.at("vars").get<std::vector<std::string>>());
}

inline json presentation_to_json(const Presentation &p) {
    json commut = json::array();
    for (const auto &[a, b] : p.commutations) {
        commut.push_back(json::array({a, b}));
    }
    json vanishing = json::array();
    for (const auto &v : p.vanishing) {
        json e = element_to_json(v.element);
        e["context"] = v.context;
        vanishing.push_back(std::move(e));
    }
    json out{{"form", form_name(p.form)},
             {"generators", p.generators},
             {"involutions", p.involutions},
             {"commutations", std::move(commut)},
             {"contexts", p.context_vars},
             {"vanishing", std::move(vanishing)}};
    if (p.form == PresentationForm::Synchronous) {
        out["projections"] = p.projections;
        out["partitions"] = p.partitions;
        json orth = json::array();
        for (const auto &[a, b] : p.orthogonal) {
            orth.push_back(json::array({a, b}));
        }
        out["orthogonal"] = std::move(orth);
    }
    return out;
}

inline Presentation presentation_from_json(const json &j) {
    Presentation p;
    std::string form = j.at("form").get<std::string>();
    if (form == "contexts") {
        p.form = PresentationForm::Contexts;
    } else if (form == "constraints") {
        p.form = PresentationForm::Constraints;
    } else if (form == "polynomial") {
        p.form = PresentationForm::Polynomial;
    } else if (form == "synchronous") {
        p.form = PresentationForm::Synchronous;
    } else {
        throw std::invalid_argument("unknown presentation form: " + form);
    }
    p.generators = j.at("generators").get<std::vector<std::string>>();
    p.involutions = j.at("involutions").get<std::vector<std::string>>();
    for (const auto &pr : j.at("commutations")) {
        p.commutations.insert({pr[0].get<std::string>(), pr[1].get<std::string>()});
    }
    p.context_vars = j.at("contexts").get<std::vector<std::vector<std::string>>>();
    for (const auto &v : j.at("vanishing")) {
        p.vanishing.push_back({v.at("context").get<int>(), element_from_json(v)});
    }
    if (j.contains("projections")) {
        p.projections = j.at("projections").get<std::vector<std::string>>();
        p.partitions = j.at("partitions").get<std::vector<std::vector<std::string>>>();
        for (const auto &pr : j.at("orthogonal")) {
            p.orthogonal.push_back({pr[0].get<std::string>(), pr[1].get<std::string>()});
        }
    }
    return p;
}

inline json vanishing_set_to_json(const VanishingSet &vs) {
    json contexts = json::array();
    for (std::size_t i = 0; i < vs.context_vars.size(); ++i) {
        json rows = json::array();
        for (std::uint32_t idx : vs.vanishing[i]) {
            json row = json::array();
            for (Sign s : tuple_of_index(idx, (int)vs.context_vars[i].size())) {
                row.push_back((int)s);
            }
            rows.push_back(std::move(row));
        }
        contexts.push_back(json{{"vars", vs.context_vars[i]}, {"vanishing", std::move(rows)}});
    }
    return json{{"contexts", std::move(contexts)}};
}

inline VanishingSet vanishing_set_from_json(const json &j) {
    VanishingSet vs;
    for (const auto &cj : j.at("contexts")) {
        vs.context_vars.push_back(cj.at("vars").get<std::vector<std::string>>());
        std::set<std::uint32_t> set;
        for (const auto &row : cj.at("vanishing")) {
            std::vector<Sign> t;
            for (const auto &v : row) {
                t.push_back(jio::normalize_sign(v.get<int>(), false));
            }
            set.insert(index_of_tuple(t));
        }
        vs.vanishing.push_back(std::move(set));
    }
    return vs;
}

inline json matrix_to_json(const Mat &m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int jx = 0; jx < m.cols(); ++jx) {
            row.push_back(json::array({m(i, jx).real(), m(i, jx).imag()}));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Mat matrix_from_json(const json &j) {
    int rows = (int)j.size();
    int cols = rows ? (int)j[0].size() : 0;
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if ((int)j[i].size() != cols) {
            throw std::invalid_argument("ragged matrix in file");
        }
        for (int c = 0; c < cols; ++c) {
            m(i, c) = std::complex<double>(j[i][c][0].get<double>(), j[i][c][1].get<double>());
        }
    }
    return m;
}

inline json rep_to_json(const MatrixRep &r) {
    json images = json::object();
    for (const auto &[name, m] : r.images) {
        images[name] = matrix_to_json(m);
    }
    return json{{"dim", r.dim}, {"images", std::move(images)}};
}

inline MatrixRep rep_from_json(const json &j) {
    MatrixRep r;
    r.dim = j.at("dim").get<int>();
    for (auto it = j.at("images").begin(); it != j.at("images").end(); ++it) {
        Mat m = matrix_from_json(it.value());
        if (m.rows() != r.dim || m.cols() != r.dim) {
            throw std::invalid_argument("image of " + it.key() + " has wrong shape");
        }
        r.images[it.key()] = std::move(m);
    }
    return r;
}

inline json game_to_json(const NonlocalGame &g) {
    json sat = json::array();
    for (const auto &s : g.satisfying) {
        sat.push_back(s);
    }
    json winning = json::array();
    for (const auto &q : g.winning_quadruples()) {
        winning.push_back(json::array({q[0], q[1], q[2], q[3]}));
    }
    json answers = json::array();
    for (int i = 0; i < g.questions(); ++i) {
        answers.push_back(g.answers(i));
    }
    return json{{"questions", g.question_vars},
                {"answers", std::move(answers)},
                {"satisfying", std::move(sat)},
                {"winning", std::move(winning)}};
}

inline NonlocalGame game_from_json(const json &j) {
    NonlocalGame g;
    g.question_vars = j.at("questions").get<std::vector<std::vector<std::string>>>();
    for (const auto &s : j.at("satisfying")) {
        g.satisfying.push_back(s.get<std::vector<std::uint32_t>>());
    }
    if (g.satisfying.size() != g.question_vars.size()) {
        throw std::invalid_argument("satisfying sets do not match questions");
    }
    return g;
}

inline json sync_game_to_json(const SynchronousGame &g) {
    json winning = json::array();
    for (int i = 0; i < g.questions; ++i) {
        for (int jq = 0; jq < g.questions; ++jq) {
            for (int a = 0; a < g.answers; ++a) {
                for (int b = 0; b < g.answers; ++b) {
                    if (g.wins(i, jq, a, b)) {
                        winning.push_back(json::array({i, jq, a, b}));
                    }
                }
            }
        }
    }
    return json{{"questions", g.questions}, {"answers", g.answers},
                {"winning", std::move(winning)}};
}

inline SynchronousGame sync_game_from_json(const json &j) {
    SynchronousGame g(j.at("questions").get<int>(), j.at("answers").get<int>());
    for (const auto &q : j.at("winning")) {
        g.set_win(q[0].get<int>(), q[1].get<int>(), q[2].get<int>(), q[3].get<int>(), true);
    }
    return g;
}

inline json gadget_to_json(const GadgetDefinition &g) {
    return json{{"target", relation_to_json(g.target)}, {"system", bcs_to_json(g.system)}};
}

inline GadgetDefinition gadget_from_json(const json &j) {
    GadgetDefinition g;
    g.target = relation_from_json(j.at("target"));
    g.system = bcs_from_json(j.at("system"));
    return g;
}

inline json hom_pair_to_json(const HomPair &h) {
    json iota = json::object();
    for (const auto &[a, b] : h.iota) {
        iota[a] = b;
    }
    json pi = json::object();
    for (const auto &[g, img] : h.pi) {
        json e = element_to_json(img.element);
        e["context"] = img.context;
        pi[g] = std::move(e);
    }
    json choices = json::array();
    for (const auto &c : h.choices) {
        choices.push_back(json{{"context", c.context},
                               {"phi", assignment_to_json(c.phi)},
                               {"h", assignment_to_json(c.h)}});
    }
    return json{{"iota", std::move(iota)}, {"pi", std::move(pi)},
                {"choices", std::move(choices)}};
}

inline HomPair hom_pair_from_json(const json &j) {
    HomPair h;
    for (auto it = j.at("iota").begin(); it != j.at("iota").end(); ++it) {
        h.iota[it.key()] = it.value().get<std::string>();
    }
    for (auto it = j.at("pi").begin(); it != j.at("pi").end(); ++it) {
        h.pi[it.key()] = {it.value().at("context").get<int>(), element_from_json(it.value())};
    }
    for (const auto &cj : j.at("choices")) {
        h.choices.push_back({cj.at("context").get<int>(),
                             assignment_from_json(cj.at("phi")),
                             assignment_from_json(cj.at("h"))});
    }
    return h;
}

inline json flags_to_json(const ClassFlags &f) {
    return json{{"bijunctive", f.bijunctive}, {"horn", f.horn},
                {"dual_horn", f.dual_horn},   {"linear", f.linear},
                {"zero_valid", f.zero_valid}, {"one_valid", f.one_valid}};
}

inline json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const std::exception &e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    return j;
}

inline void write_json_file(const std::string &path, const json &j) {
    std::ofstream out(path);
    if (!out) {
        throw std::invalid_argument("cannot open " + path + " for writing");
    }
    out << j.dump(2) << "\n";
}

inline void write_text_file(const std::string &path, const std::string &text) {
    std::ofstream out(path);
    if (!out) {
        throw std::invalid_argument("cannot open " + path + " for writing");
    }
    out << text;
}

} // namespace bcsalg

#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bcsalg/common.hpp"
#include "bcsalg/model.hpp"
#include "bcsalg/rational.hpp"

namespace bcsalg {

enum class Basis {
    Monomial,   // coefficients of square-free monomials, indexed by subset mask
    Projection, // value function on sign vectors, indexed as index_of_tuple
};

/// An element of the commutative *-algebra C Z_2^S for an ordered variable set
/// S, |S| <= 16, with exact rational coefficients. The two bases are related
/// by the Walsh-Hadamard transform.
class AlgebraElement {
  public:
    AlgebraElement() = default;
    AlgebraElement(std::vector<std::string> varset, Basis basis)
        : vars_(std::move(varset)), basis_(basis) {
        if ((int)vars_.size() > kMaxArity) {
            throw ResourceError("algebra varset too large: " + std::to_string(vars_.size()));
        }
        coeffs_.assign(std::size_t(1) << vars_.size(), Rational(0));
    }

    static AlgebraElement zero(std::vector<std::string> varset) {
        return AlgebraElement(std::move(varset), Basis::Monomial);
    }
    static AlgebraElement one(std::vector<std::string> varset) {
        AlgebraElement e(std::move(varset), Basis::Monomial);
        e.coeffs_[0] = Rational(1);
        return e;
    }
    static AlgebraElement constant(std::vector<std::string> varset, const Rational &c) {
        AlgebraElement e(std::move(varset), Basis::Monomial);
        e.coeffs_[0] = c;
        return e;
    }
    /// The generator z_name inside C Z_2^varset.
    static AlgebraElement generator(std::vector<std::string> varset, const std::string &name) {
        AlgebraElement e(std::move(varset), Basis::Monomial);
        e.coeffs_[std::size_t(1) << e.index_of(name)] = Rational(1);
        return e;
    }

    const std::vector<std::string> &varset() const { return vars_; }
    Basis basis() const { return basis_; }
    const std::vector<Rational> &coeffs() const { return coeffs_; }
    Rational &coeff(std::uint32_t idx) { return coeffs_[idx]; }
    const Rational &coeff(std::uint32_t idx) const { return coeffs_[idx]; }
    int dim() const { return (int)vars_.size(); }

    int index_of(const std::string &name) const {
        auto it = std::find(vars_.begin(), vars_.end(), name);
        if (it == vars_.end()) {
            throw std::invalid_argument("variable not in algebra varset: " + name);
        }
        return (int)(it - vars_.begin());
    }

    bool is_zero() const {
        for (const auto &c : coeffs_) {
            if (!c.is_zero()) {
                return false;
            }
        }
        return true;
    }

    /// Walsh-Hadamard change of basis; exact, involutive up to the 2^-k factor.
    AlgebraElement converted(Basis target) const {
        if (target == basis_) {
            return *this;
        }
        AlgebraElement out = *this;
        out.basis_ = target;
        fwht(out.coeffs_);
        if (target == Basis::Monomial) {
            Rational scale(1, std::int64_t(1) << vars_.size());
            for (auto &c : out.coeffs_) {
                c *= scale;
            }
        }
        return out;
    }

    /// Embed into a larger varset (missing variables act as identity factors).
    AlgebraElement embedded(const std::vector<std::string> &superset) const {
        std::vector<int> pos;
        pos.reserve(vars_.size());
        for (const auto &v : vars_) {
            auto it = std::find(superset.begin(), superset.end(), v);
            if (it == superset.end()) {
                throw std::invalid_argument("embedding target misses variable: " + v);
            }
            pos.push_back((int)(it - superset.begin()));
        }
        AlgebraElement out(superset, Basis::Monomial);
        const AlgebraElement &src = basis_ == Basis::Monomial ? *this : converted(Basis::Monomial);
        for (std::uint32_t m = 0; m < src.coeffs_.size(); ++m) {
            if (src.coeffs_[m].is_zero()) {
                continue;
            }
            std::uint32_t big = 0;
            for (std::size_t i = 0; i < pos.size(); ++i) {
                if (m & (1u << i)) {
                    big |= (1u << pos[(std::size_t)i]);
                }
            }
            out.coeffs_[big] = src.coeffs_[m];
        }
        return basis_ == Basis::Monomial ? out : out.converted(Basis::Projection);
    }

    /// Exact evaluation of the value function at a full assignment to varset.
    Rational value_at(const Assignment &phi) const {
        if (basis_ == Basis::Projection) {
            std::uint32_t idx = 0;
            for (std::size_t i = 0; i < vars_.size(); ++i) {
                auto it = phi.find(vars_[i]);
                if (it == phi.end()) {
                    throw std::invalid_argument("assignment misses variable: " + vars_[i]);
                }
                if (it->second == -1) {
                    idx |= (1u << i);
                }
            }
            return coeffs_[idx];
        }
        Rational total(0);
        for (std::uint32_t m = 0; m < coeffs_.size(); ++m) {
            if (coeffs_[m].is_zero()) {
                continue;
            }
            int sgn = 1;
            for (std::size_t i = 0; i < vars_.size(); ++i) {
                if (m & (1u << i)) {
                    auto it = phi.find(vars_[i]);
                    if (it == phi.end()) {
                        throw std::invalid_argument("assignment misses variable: " + vars_[i]);
                    }
                    sgn *= it->second;
                }
            }
            total += sgn == 1 ? coeffs_[m] : -coeffs_[m];
        }
        return total;
    }

    friend AlgebraElement operator+(const AlgebraElement &a, const AlgebraElement &b) {
        check_compatible(a, b);
        AlgebraElement bb = b.basis_ == a.basis_ ? b : b.converted(a.basis_);
        AlgebraElement out = a;
        for (std::size_t i = 0; i < out.coeffs_.size(); ++i) {
            out.coeffs_[i] += bb.coeffs_[i];
        }
        return out;
    }
    friend AlgebraElement operator-(const AlgebraElement &a, const AlgebraElement &b) {
        return a + (-b);
    }
    AlgebraElement operator-() const {
        AlgebraElement out = *this;
        for (auto &c : out.coeffs_) {
            c = -c;
        }
        return out;
    }
    friend AlgebraElement operator*(const Rational &s, const AlgebraElement &a) {
        AlgebraElement out = a;
        for (auto &c : out.coeffs_) {
            c *= s;
        }
        return out;
    }
    /// Ring product. Pointwise in the projection basis; equivalently symmetric
    /// difference of monomials (z^2 = 1).
    friend AlgebraElement operator*(const AlgebraElement &a, const AlgebraElement &b) {
        check_compatible(a, b);
        AlgebraElement pa = a.converted(Basis::Projection);
        AlgebraElement pb = b.converted(Basis::Projection);
        for (std::size_t i = 0; i < pa.coeffs_.size(); ++i) {
            pa.coeffs_[i] *= pb.coeffs_[i];
        }
        return pa.converted(a.basis_);
    }

    friend bool operator==(const AlgebraElement &a, const AlgebraElement &b) {
        if (a.vars_ != b.vars_) {
            return false;
        }
        if (a.basis_ == b.basis_) {
            return a.coeffs_ == b.coeffs_;
        }
        return a.coeffs_ == b.converted(a.basis_).coeffs_;
    }

    /// Canonical text form: monomials in increasing mask order, e.g.
    /// "1/2 + 1/2*x + 1/2*y - 1/2*x*y".
    std::string dump() const {
        const AlgebraElement &m = basis_ == Basis::Monomial ? *this : converted(Basis::Monomial);
        std::string out;
        bool first = true;
        for (std::uint32_t mask = 0; mask < m.coeffs_.size(); ++mask) {
            const Rational &c = m.coeffs_[mask];
            if (c.is_zero()) {
                continue;
            }
            Rational mag = c.num() < 0 ? -c : c;
            std::string term;
            std::string monos;
            for (std::size_t i = 0; i < vars_.size(); ++i) {
                if (mask & (1u << i)) {
                    if (!monos.empty()) {
                        monos += "*";
                    }
                    monos += vars_[i];
                }
            }
            if (monos.empty()) {
                term = mag.str();
            } else if (mag == Rational(1)) {
                term = monos;
            } else {
                term = mag.str() + "*" + monos;
            }
            if (first) {
                out = (c.num() < 0 ? "-" : "") + term;
                first = false;
            } else {
                out += (c.num() < 0 ? " - " : " + ") + term;
            }
        }
        return first ? "0" : out;
    }

  private:
    static void check_compatible(const AlgebraElement &a, const AlgebraElement &b) {
        if (a.vars_ != b.vars_) {
            throw std::invalid_argument("algebra varset mismatch; embed into a common varset first");
        }
    }
    static void fwht(std::vector<Rational> &v) {
        std::size_t n = v.size();
        for (std::size_t len = 1; len < n; len <<= 1) {
            for (std::size_t i = 0; i < n; i += len << 1) {
                for (std::size_t j = i; j < i + len; ++j) {
                    Rational x = v[j];
                    Rational y = v[j + len];
                    v[j] = x + y;
                    v[j + len] = x - y;
                }
            }
        }
    }

    std::vector<std::string> vars_;
    std::vector<Rational> coeffs_;
    Basis basis_ = Basis::Monomial;
};

/// Lift two elements into the union varset (left order first, then the
/// right's extra variables).
inline std::pair<AlgebraElement, AlgebraElement> lift_common(const AlgebraElement &a,
                                                             const AlgebraElement &b) {
    std::vector<std::string> u = a.varset();
    for (const auto &v : b.varset()) {
        if (std::find(u.begin(), u.end(), v) == u.end()) {
            u.push_back(v);
        }
    }
    return {a.embedded(u), b.embedded(u)};
}

/// The central projection Pi_phi for a partial assignment phi, embedded in
/// C Z_2^S: the product over assigned variables of (1 + phi(x) x)/2.
inline AlgebraElement projection_of_assignment(const std::vector<std::string> &s,
                                               const Assignment &phi) {
    if (phi.empty()) {
        throw std::invalid_argument("projection of an empty assignment");
    }
    for (const auto &[v, sgn] : phi) {
        if (std::find(s.begin(), s.end(), v) == s.end()) {
            throw std::invalid_argument("assignment variable outside varset: " + v);
        }
        if (!is_sign(sgn)) {
            throw std::invalid_argument("assignment value must be +-1");
        }
    }
    AlgebraElement e(s, Basis::Projection);
    for (std::uint32_t idx = 0; idx < (std::uint32_t(1) << s.size()); ++idx) {
        bool match = true;
        for (std::size_t i = 0; i < s.size() && match; ++i) {
            auto it = phi.find(s[i]);
            if (it != phi.end()) {
                Sign coord = (idx & (1u << i)) ? -1 : +1;
                match = coord == it->second;
            }
        }
        if (match) {
            e.coeff(idx) = Rational(1);
        }
    }
    return e.converted(Basis::Monomial);
}

/// P_R: the element whose value function is -1 on members of R and +1 off
/// them, returned in the monomial basis over the given slot names.
inline AlgebraElement indicator_poly(const Relation &r, std::vector<std::string> slots) {
    if ((int)slots.size() != r.arity) {
        throw std::invalid_argument("slot count differs from arity");
    }
    AlgebraElement e(std::move(slots), Basis::Projection);
    for (std::uint32_t idx = 0; idx < (std::uint32_t(1) << r.arity); ++idx) {
        e.coeff(idx) = Rational(r.contains(idx) ? -1 : 1);
    }
    return e.converted(Basis::Monomial);
}

inline std::vector<std::string> default_slots(int k) {
    std::vector<std::string> slots;
    for (int i = 1; i <= k; ++i) {
        slots.push_back("_" + std::to_string(i));
    }
    return slots;
}

/// Evaluation of a slot polynomial at a scope: slot i is replaced by the i-th
/// scope term, constants fold into the coefficient and repeated variables
/// cancel via z^2 = 1. The result lives over the scope's distinct variables.
inline AlgebraElement eval_scope_poly(const AlgebraElement &p, const Scope &s) {
    if ((int)s.size() != p.dim()) {
        throw std::invalid_argument("scope length differs from slot count");
    }
    std::vector<std::string> out_vars = scope_vars(s);
    AlgebraElement out(out_vars, Basis::Monomial);
    const AlgebraElement m = p.converted(Basis::Monomial);
    for (std::uint32_t mask = 0; mask < (std::uint32_t(1) << p.dim()); ++mask) {
        const Rational &c = m.coeff(mask);
        if (c.is_zero()) {
            continue;
        }
        int sgn = 1;
        std::uint32_t target = 0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!(mask & (1u << i))) {
                continue;
            }
            const Term &t = s[i];
            if (t.is_const) {
                sgn *= t.constant;
            } else {
                auto it = std::find(out_vars.begin(), out_vars.end(), t.var);
                target ^= (1u << (it - out_vars.begin()));
            }
        }
        out.coeff(target) += sgn == 1 ? c : -c;
    }
    return out;
}

/// A projection together with the assignment it represents.
struct TaggedProjection {
    Assignment tag;
    AlgebraElement element;
};

/// All Pi_{C,phi} for assignments phi to the scope variables of C with
/// phi(S) not in R.
inline std::vector<TaggedProjection> constraint_nonsat_projections(const Constraint &c) {
    std::vector<std::string> xs = scope_vars(c.scope);
    std::vector<TaggedProjection> out;
    if (xs.empty()) {
        // All-constant scope: there is nothing to project onto; the constraint
        // either holds or contradicts, which contexts_to_constraints handles.
        return out;
    }
    for (std::uint32_t idx = 0; idx < (std::uint32_t(1) << xs.size()); ++idx) {
        Assignment phi;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            phi[xs[i]] = (idx & (1u << i)) ? -1 : +1;
        }
        if (!c.relation.contains(eval_scope_assignment(phi, c.scope))) {
            out.push_back({phi, projection_of_assignment(xs, phi)});
        }
    }
    return out;
}

namespace detail {

inline Rational parse_rational(const std::string &tok) {
    auto slash = tok.find('/');
    if (slash == std::string::npos) {
        return Rational(std::stoll(tok));
    }
    return Rational(std::stoll(tok.substr(0, slash)), std::stoll(tok.substr(slash + 1)));
}

} // namespace detail

/// Parse the canonical dump format back into an element over the given varset.
inline AlgebraElement parse_element(const std::string &text,
                                    const std::vector<std::string> &varset) {
    AlgebraElement out(varset, Basis::Monomial);
    std::string t = text;
    // split into signed terms
    std::vector<std::pair<int, std::string>> terms;
    std::size_t i = 0;
    int sign = 1;
    while (i < t.size()) {
        while (i < t.size() && std::isspace((unsigned char)t[i])) {
            ++i;
        }
        if (i >= t.size()) {
            break;
        }
        if (t[i] == '+') {
            sign = 1;
            ++i;
            continue;
        }
        if (t[i] == '-') {
            sign = -1;
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < t.size() && t[j] != '+' && t[j] != '-' && !std::isspace((unsigned char)t[j])) {
            ++j;
        }
        terms.push_back({sign, t.substr(i, j - i)});
        sign = 1;
        i = j;
    }
    for (auto &[sgn, body] : terms) {
        if (body == "0") {
            continue;
        }
        Rational c(sgn);
        std::uint32_t mask = 0;
        std::size_t p = 0;
        bool first_factor = true;
        while (p < body.size()) {
            auto star = body.find('*', p);
            std::string factor = body.substr(p, star == std::string::npos ? std::string::npos
                                                                          : star - p);
            bool numeric = !factor.empty() &&
                           (std::isdigit((unsigned char)factor[0]) || factor[0] == '-');
            if (numeric && first_factor) {
                c *= detail::parse_rational(factor);
            } else {
                auto it = std::find(varset.begin(), varset.end(), factor);
                if (it == varset.end()) {
                    throw std::invalid_argument("unknown variable in element dump: " + factor);
                }
                mask ^= (1u << (it - varset.begin()));
            }
            first_factor = false;
            if (star == std::string::npos) {
                break;
            }
            p = star + 1;
        }
        out.coeff(mask) += c;
    }
    return out;
}

} // namespace bcsalg

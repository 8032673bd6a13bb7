#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bcsalg/lang.hpp"
#include "bcsalg/model.hpp"
#include "bcsalg/present.hpp"
#include "bcsalg/zalgebra.hpp"

namespace bcsalg {

using Mat = Eigen::MatrixXcd;

inline constexpr double kDefaultTol = 1e-9;
inline constexpr double kDefaultRankTol = 1e-7; // times dimension

/// Assignment of complex d x d matrices to generators. Nothing is assumed:
/// verification against a presentation is explicit.
struct MatrixRep {
    int dim = 0;
    std::map<std::string, Mat> images;

    const Mat &image(const std::string &name) const {
        auto it = images.find(name);
        if (it == images.end()) {
            throw std::invalid_argument("representation misses generator: " + name);
        }
        return it->second;
    }
    bool has(const std::string &name) const { return images.count(name) > 0; }

    static MatrixRep from_assignment(const Assignment &phi) {
        MatrixRep r;
        r.dim = 1;
        for (const auto &[v, s] : phi) {
            r.images[v] = Mat::Constant(1, 1, std::complex<double>((double)s, 0.0));
        }
        return r;
    }

    friend bool operator==(const MatrixRep &a, const MatrixRep &b) {
        if (a.dim != b.dim || a.images.size() != b.images.size()) {
            return false;
        }
        for (const auto &[k, m] : a.images) {
            auto it = b.images.find(k);
            if (it == b.images.end() || it->second.rows() != m.rows() ||
                it->second.cols() != m.cols() || it->second != m) {
                return false;
            }
        }
        return true;
    }
};

/// Substitute matrices into a monomial-basis element; the images of a context
/// commute (within tolerance) so the factor order is immaterial there.
inline Mat evaluate_element(const AlgebraElement &e, const MatrixRep &r) {
    const AlgebraElement m = e.converted(Basis::Monomial);
    int d = r.dim;
    Mat total = Mat::Zero(d, d);
    for (std::uint32_t mask = 0; mask < m.coeffs().size(); ++mask) {
        const Rational &c = m.coeff(mask);
        if (c.is_zero()) {
            continue;
        }
        Mat prod = Mat::Identity(d, d);
        for (std::size_t i = 0; i < m.varset().size(); ++i) {
            if (mask & (1u << i)) {
                prod = prod * r.image(m.varset()[i]);
            }
        }
        total += std::complex<double>(c.to_double(), 0.0) * prod;
    }
    return total;
}

struct VerifyReport {
    bool pass = false;
    double tol = kDefaultTol;
    double max_hermiticity = 0;
    double max_involution = 0;
    double max_commutator = 0;
    double max_vanishing = 0;
    double max_projection = 0; // synchronous form: e* = e = e^2
    double max_partition = 0;  // synchronous form: sum_a e^i_a = 1
    double max_orthogonal = 0; // synchronous form: e^i_a e^j_b = 0
    std::vector<std::string> failures;
};

/// Frobenius-norm deviations of all defining relations of a presentation
/// under a matrix assignment; passes iff every deviation is at most tol.
inline VerifyReport verify_rep(const Presentation &p, const MatrixRep &r,
                               double tol = kDefaultTol) {
    VerifyReport rep;
    rep.tol = tol;
    int d = r.dim;
    if (d < 1) {
        throw std::invalid_argument("representation has no dimension");
    }
    for (const auto &g : p.generators) {
        const Mat &x = r.image(g);
        if (x.rows() != d || x.cols() != d) {
            throw std::invalid_argument("image of " + g + " has wrong shape");
        }
    }
    Mat id = Mat::Identity(d, d);
    auto track = [&](double &slot, double v, const std::string &what) {
        slot = std::max(slot, v);
        if (v > tol) {
            rep.failures.push_back(what + " deviates by " + std::to_string(v));
        }
    };
    for (const auto &g : p.involutions) {
        const Mat &x = r.image(g);
        track(rep.max_hermiticity, (x - x.adjoint()).norm(), "hermiticity of " + g);
        track(rep.max_involution, (x * x - id).norm(), "involution of " + g);
    }
    for (const auto &[a, b] : p.commutations) {
        const Mat &x = r.image(a);
        const Mat &y = r.image(b);
        track(rep.max_commutator, (x * y - y * x).norm(), "commutator [" + a + "," + b + "]");
    }
    for (std::size_t i = 0; i < p.vanishing.size(); ++i) {
        Mat v = evaluate_element(p.vanishing[i].element, r);
        track(rep.max_vanishing, v.norm(),
              "vanishing element " + std::to_string(i) + " (context " +
                  std::to_string(p.vanishing[i].context) + ")");
    }
    for (const auto &e : p.projections) {
        const Mat &x = r.image(e);
        track(rep.max_projection, (x - x.adjoint()).norm(), "self-adjointness of " + e);
        track(rep.max_projection, (x * x - x).norm(), "idempotence of " + e);
    }
    for (const auto &part : p.partitions) {
        Mat sum = Mat::Zero(d, d);
        for (const auto &e : part) {
            sum += r.image(e);
        }
        track(rep.max_partition, (sum - id).norm(), "answer projections do not sum to 1");
    }
    for (const auto &[a, b] : p.orthogonal) {
        track(rep.max_orthogonal, (r.image(a) * r.image(b)).norm(),
              "orthogonality " + a + "*" + b);
    }
    rep.pass = rep.failures.empty();
    return rep;
}

/// The joint spectrum of a commuting family: sign vectors v with
/// psi(Pi_v) != 0, with ranks from singular values.
struct JointSpectrum {
    std::vector<std::string> vars;
    std::map<std::uint32_t, int> points; // answer index -> rank

    int total_rank() const {
        int t = 0;
        for (const auto &[idx, rk] : points) {
            t += rk;
        }
        return t;
    }
};

inline JointSpectrum joint_spectrum(const MatrixRep &r, const std::vector<std::string> &vars,
                                    double tol = kDefaultTol,
                                    double rank_tol = kDefaultRankTol) {
    int d = r.dim;
    if ((int)vars.size() > kMaxArity) {
        throw ResourceError("context too large for joint spectrum");
    }
    for (std::size_t i = 0; i < vars.size(); ++i) {
        for (std::size_t j = i + 1; j < vars.size(); ++j) {
            const Mat &x = r.image(vars[i]);
            const Mat &y = r.image(vars[j]);
            if ((x * y - y * x).norm() > tol) {
                throw std::invalid_argument("images do not commute: " + vars[i] + ", " +
                                            vars[j]);
            }
        }
    }
    JointSpectrum js;
    js.vars = vars;
    double threshold = rank_tol * d;
    Mat id = Mat::Identity(d, d);
    for (std::uint32_t idx = 0; idx < (std::uint32_t(1) << vars.size()); ++idx) {
        Mat proj = id;
        for (std::size_t i = 0; i < vars.size(); ++i) {
            Sign v = (idx & (1u << i)) ? -1 : +1;
            proj = proj * (0.5 * (id + (double)v * r.image(vars[i])));
        }
        Eigen::JacobiSVD<Mat> svd(proj);
        int rank = 0;
        for (int s = 0; s < svd.singularValues().size(); ++s) {
            if (svd.singularValues()[s] > threshold) {
                ++rank;
            }
        }
        if (rank > 0) {
            js.points[idx] = rank;
        }
    }
    return js;
}

// ---------------------------------------------------------------------------
// Pauli-word search for linear systems.

namespace pauli {

/// A signed Pauli word s * X^a Z^b on q qubits, a,b in F2^q. Hermitian and
/// squaring to +1 exactly when a.b is even; +-i prefactors are not accepted.
struct PauliWord {
    std::uint32_t x = 0;
    std::uint32_t z = 0;
    int sign = +1;
};

inline int dot2(std::uint32_t a, std::uint32_t b) { return __builtin_popcount(a & b) & 1; }

/// Symplectic inner product: 0 iff the words commute.
inline int symplectic(std::uint32_t x1, std::uint32_t z1, std::uint32_t x2, std::uint32_t z2) {
    return (dot2(x1, z2) + dot2(z1, x2)) & 1;
}

inline Mat pauli_matrix(int qubits, const PauliWord &w) {
    int d = 1 << qubits;
    Mat m = Mat::Zero(d, d);
    for (int col = 0; col < d; ++col) {
        int row = col ^ (int)w.x;
        double phase = dot2(w.z, (std::uint32_t)col) ? -1.0 : 1.0;
        m(row, col) = std::complex<double>(w.sign * phase, 0.0);
    }
    return m;
}

} // namespace pauli

struct PauliSearchOptions {
    std::size_t max_candidates = std::size_t(1) << 24;
    double tol = kDefaultTol;
};

/// Searches signed Pauli words on q qubits satisfying a linear system's
/// algebra relations: product constraints become F2-linear equations, context
/// commutativity becomes vanishing symplectic forms, and signs are fixed by a
/// final F2 solve with standard phase bookkeeping. Deterministic: candidates
/// are enumerated lexicographically and the first verified assignment wins.
inline std::optional<MatrixRep> pauli_search(const Bcs &b, int qubits,
                                             const PauliSearchOptions &opts = {}) {
    if (qubits < 0 || qubits > 4) {
        throw ResourceError("pauli search supports 0..4 qubits");
    }
    int n = (int)b.vars.size();
    std::map<std::string, int> vid;
    for (int i = 0; i < n; ++i) {
        vid[b.vars[(std::size_t)i]] = i;
    }
    // Each constraint must be a monomial relation: a single parity equation.
    struct Product {
        std::vector<int> support;
        int rhs_bit; // 1 encodes product = -1
    };
    std::vector<Product> products;
    for (const auto &[xs, r] : specialize(b).items) {
        auto cert = linear_certificate(r);
        if (!cert) {
            throw std::invalid_argument("pauli search needs linear constraints");
        }
        for (const auto &eq : *cert) {
            Product pr;
            for (int c : eq.coords) {
                pr.support.push_back(vid[xs[(std::size_t)c]]);
            }
            std::sort(pr.support.begin(), pr.support.end());
            pr.rhs_bit = eq.rhs == -1 ? 1 : 0;
            if (pr.support.empty() && pr.rhs_bit) {
                return std::nullopt; // contradictory constant constraint
            }
            if (!pr.support.empty()) {
                products.push_back(std::move(pr));
            }
        }
    }
    std::vector<std::pair<int, int>> comm_pairs;
    for (const auto &ctx : b.contexts) {
        for (std::size_t i = 0; i < ctx.vars.size(); ++i) {
            for (std::size_t j = i + 1; j < ctx.vars.size(); ++j) {
                comm_pairs.push_back({vid[ctx.vars[i]], vid[ctx.vars[j]]});
            }
        }
    }

    int q2 = 2 * qubits;
    int nbits = n * q2; // unknown (x|z) vectors, variable-major
    // Nullspace basis of the homogeneous product equations over F2.
    std::vector<std::vector<char>> rows;
    for (const auto &pr : products) {
        for (int c = 0; c < q2; ++c) {
            std::vector<char> row((std::size_t)nbits, 0);
            for (int v : pr.support) {
                row[(std::size_t)(v * q2 + c)] ^= 1;
            }
            rows.push_back(std::move(row));
        }
    }
    std::vector<int> pivot_col;
    std::size_t rank = 0;
    for (int col = 0; col < nbits && rank < rows.size(); ++col) {
        std::size_t piv = rank;
        while (piv < rows.size() && !rows[piv][(std::size_t)col]) {
            ++piv;
        }
        if (piv == rows.size()) {
            continue;
        }
        std::swap(rows[piv], rows[rank]);
        for (std::size_t r2 = 0; r2 < rows.size(); ++r2) {
            if (r2 != rank && rows[r2][(std::size_t)col]) {
                for (int c2 = 0; c2 < nbits; ++c2) {
                    rows[r2][(std::size_t)c2] ^= rows[rank][(std::size_t)c2];
                }
            }
        }
        pivot_col.push_back(col);
        ++rank;
    }
    std::vector<int> free_cols;
    for (int col = 0; col < nbits; ++col) {
        if (std::find(pivot_col.begin(), pivot_col.end(), col) == pivot_col.end()) {
            free_cols.push_back(col);
        }
    }
    if (free_cols.size() > 40 ||
        (std::size_t(1) << std::min<std::size_t>(free_cols.size(), 40)) > opts.max_candidates) {
        throw ResourceError("pauli search space exceeds the candidate budget");
    }
    // Basis vector for each free column.
    std::vector<std::vector<char>> basis;
    for (int fc : free_cols) {
        std::vector<char> vec((std::size_t)nbits, 0);
        vec[(std::size_t)fc] = 1;
        for (std::size_t rr = 0; rr < rank; ++rr) {
            if (rows[rr][(std::size_t)fc]) {
                vec[(std::size_t)pivot_col[rr]] ^= 1;
            }
        }
        basis.push_back(std::move(vec));
    }

    Presentation check = build_algebra(b, PresentationForm::Polynomial);
    std::uint64_t total = std::uint64_t(1) << free_cols.size();
    std::vector<pauli::PauliWord> words((std::size_t)n);
    for (std::uint64_t t = 0; t < total; ++t) {
        std::vector<char> sol((std::size_t)nbits, 0);
        for (std::size_t j = 0; j < basis.size(); ++j) {
            if ((t >> j) & 1) {
                for (int c = 0; c < nbits; ++c) {
                    sol[(std::size_t)c] ^= basis[j][(std::size_t)c];
                }
            }
        }
        for (int v = 0; v < n; ++v) {
            std::uint32_t xm = 0, zm = 0;
            for (int qb = 0; qb < qubits; ++qb) {
                if (sol[(std::size_t)(v * q2 + qb)]) {
                    xm |= (1u << qb);
                }
                if (sol[(std::size_t)(v * q2 + qubits + qb)]) {
                    zm |= (1u << qb);
                }
            }
            words[(std::size_t)v] = {xm, zm, +1};
        }
        bool ok = true;
        for (int v = 0; v < n && ok; ++v) {
            ok = pauli::dot2(words[(std::size_t)v].x, words[(std::size_t)v].z) == 0;
        }
        for (const auto &[a, bb] : comm_pairs) {
            if (!ok) {
                break;
            }
            ok = pauli::symplectic(words[(std::size_t)a].x, words[(std::size_t)a].z,
                                   words[(std::size_t)bb].x, words[(std::size_t)bb].z) == 0;
        }
        if (!ok) {
            continue;
        }
        // Sign system: product over each support accumulates a phase from
        // moving X parts past Z parts; the signs must absorb it.
        std::vector<std::vector<char>> srows;
        for (const auto &pr : products) {
            std::uint32_t ax = 0, az = 0;
            int phase = 0;
            for (int v : pr.support) {
                phase ^= pauli::dot2(az, words[(std::size_t)v].x);
                ax ^= words[(std::size_t)v].x;
                az ^= words[(std::size_t)v].z;
            }
            // product = (-1)^phase X^ax Z^az and ax = az = 0 by construction
            std::vector<char> row((std::size_t)n + 1, 0);
            for (int v : pr.support) {
                row[(std::size_t)v] ^= 1;
            }
            row[(std::size_t)n] = (char)((pr.rhs_bit ^ phase) & 1);
            srows.push_back(std::move(row));
        }
        // Solve for sign bits, lexicographically first (free signs positive).
        std::vector<int> spiv;
        std::size_t srank = 0;
        bool feasible = true;
        for (int col = 0; col < n && srank < srows.size(); ++col) {
            std::size_t piv = srank;
            while (piv < srows.size() && !srows[piv][(std::size_t)col]) {
                ++piv;
            }
            if (piv == srows.size()) {
                continue;
            }
            std::swap(srows[piv], srows[srank]);
            for (std::size_t r2 = 0; r2 < srows.size(); ++r2) {
                if (r2 != srank && srows[r2][(std::size_t)col]) {
                    for (int c2 = col; c2 <= n; ++c2) {
                        srows[r2][(std::size_t)c2] ^= srows[srank][(std::size_t)c2];
                    }
                }
            }
            spiv.push_back(col);
            ++srank;
        }
        for (const auto &row : srows) {
            bool allzero = true;
            for (int c = 0; c < n; ++c) {
                if (row[(std::size_t)c]) {
                    allzero = false;
                    break;
                }
            }
            if (allzero && row[(std::size_t)n]) {
                feasible = false;
                break;
            }
        }
        if (!feasible) {
            continue;
        }
        std::vector<char> sbits((std::size_t)n, 0);
        for (std::size_t rr = 0; rr < srank; ++rr) {
            sbits[(std::size_t)spiv[rr]] = srows[rr][(std::size_t)n];
        }
        MatrixRep rep;
        rep.dim = 1 << qubits;
        for (int v = 0; v < n; ++v) {
            pauli::PauliWord w = words[(std::size_t)v];
            w.sign = sbits[(std::size_t)v] ? -1 : +1;
            rep.images[b.vars[(std::size_t)v]] = pauli::pauli_matrix(qubits, w);
        }
        if (verify_rep(check, rep, opts.tol).pass) {
            return rep;
        }
    }
    return std::nullopt;
}

/// Compose a verified representation of the source presentation with a
/// generator-image map (the pi of a homomorphism pair): each target generator
/// becomes the matrix of its image element.
inline MatrixRep transport_rep(const Presentation &source, const MatrixRep &r,
                               const std::map<std::string, AlgebraElement> &pi,
                               double tol = kDefaultTol) {
    VerifyReport vr = verify_rep(source, r, tol);
    if (!vr.pass) {
        throw std::invalid_argument("transport rejected: input representation fails "
                                    "verification on its presentation");
    }
    MatrixRep out;
    out.dim = r.dim;
    for (const auto &[gen, elem] : pi) {
        out.images[gen] = evaluate_element(elem, r);
    }
    return out;
}

/// The standard two-qubit observables verifying the magic square: rows
/// multiply to +1, columns to -1, with x9 the product of the diagonal pair.
inline MatrixRep magic_square_pauli_rep() {
    MatrixRep r;
    r.dim = 4;
    Mat I2 = Mat::Identity(2, 2);
    Mat X(2, 2), Z(2, 2), Y(2, 2);
    X << 0, 1, 1, 0;
    Z << 1, 0, 0, -1;
    Y << std::complex<double>(0, 0), std::complex<double>(0, -1), std::complex<double>(0, 1),
        std::complex<double>(0, 0);
    auto kron = [](const Mat &a, const Mat &b) {
        Mat out(a.rows() * b.rows(), a.cols() * b.cols());
        for (int i = 0; i < a.rows(); ++i) {
            for (int j = 0; j < a.cols(); ++j) {
                out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
            }
        }
        return out;
    };
    r.images["x1"] = kron(I2, Z);
    r.images["x2"] = kron(Z, I2);
    r.images["x3"] = kron(Z, Z);
    r.images["x4"] = kron(X, I2);
    r.images["x5"] = kron(I2, X);
    r.images["x6"] = kron(X, X);
    r.images["x7"] = -kron(X, Z);
    r.images["x8"] = -kron(Z, X);
    r.images["x9"] = kron(Y, Y);
    return r;
}

} // namespace bcsalg

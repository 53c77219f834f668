#pragma once

// Internal-space algebra for coined lattice walks: projector pairs, coin sets,
// gamma forms, axis rotations, and the certification checks that decide whether
// a set gives an unbiased walk with a relativistic continuum limit.

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qwalk/axes.hpp"
#include "qwalk/matrix.hpp"
#include "qwalk/report.hpp"

namespace qwalk {

// Complementary pair P+ + P- = I built from a Hermitian involution P+ - P-.
struct ProjectorPair {
    Matrix plus;
    Matrix minus;
};

// Internal-space data for one walk: one Hermitian involution (delta) per
// lattice axis, plus an optional coin generator q for the mass term.
// delta_a = P+_a - P-_a selects the shift direction along axis a; the coin is
// exp(-i theta q).
struct CoinSet {
    int dim = 0;
    std::vector<Matrix> deltas;
    std::optional<Matrix> q;
};

// gamma0 = q and gamma_a = q * delta_a. For a certified set gamma0^2 = I,
// gamma_a^2 = -I, and all pairs anticommute.
struct GammaSet {
    Matrix g0;
    std::vector<Matrix> gs;
};

// One operator of a generalized walk: U = sum_s (shift by s) (x) a_s.
struct FamilyOp {
    std::array<int, 3> shift{0, 0, 0};
    Matrix a;
};

struct GeneralizedWalkSpec {
    int dim = 0;
    std::vector<FamilyOp> ops;
};

inline void require_coin_set_shape(const CoinSet& set, const std::string& where) {
    if (set.dim < 1) throw std::invalid_argument(where + ": dim must be positive");
    if (set.deltas.empty() || set.deltas.size() > 3)
        throw std::invalid_argument(where + ": set must carry 1 to 3 deltas");
    for (const Matrix& d : set.deltas)
        if (d.rows() != set.dim || d.cols() != set.dim)
            throw std::invalid_argument(where + ": delta dimension mismatch");
    if (set.q && (set.q->rows() != set.dim || set.q->cols() != set.dim))
        throw std::invalid_argument(where + ": q dimension mismatch");
}

// Splits a Hermitian involution into its +1/-1 eigenprojectors (I +- delta)/2.
inline ProjectorPair projectors_from_delta(const Matrix& delta, double tol = kDefaultTol) {
    const double res = involution_residual(delta);
    if (res > tol)
        throw std::invalid_argument("projectors_from_delta: not a Hermitian involution, residual " +
                                    std::to_string(res));
    const Matrix id = identity(delta.rows());
    return {(id + delta) / 2.0, (id - delta) / 2.0};
}

// d=2 set for walks on the line: delta = sigma_x, q = sigma_z.
inline CoinSet make_line_set() {
    CoinSet s;
    s.dim = 2;
    s.deltas = {pauli(0)};
    s.q = pauli(2);
    return s;
}

// d=2 massless three-axis set: the Pauli triple. No fourth Hermitian involution
// anticommutes with all three (see min_extra_involution_residual), so this set
// carries no mass term.
inline CoinSet make_weyl_set() {
    CoinSet s;
    s.dim = 2;
    s.deltas = {pauli(0), pauli(1), pauli(2)};
    return s;
}

// d=4 three-axis set with mass: delta_a = [[0, sigma_a], [sigma_a, 0]],
// q = diag(1, 1, -1, -1). Smallest dimension admitting three mutually
// anticommuting deltas plus an anticommuting traceless q.
inline CoinSet make_dirac_set() {
    CoinSet s;
    s.dim = 4;
    s.deltas.reserve(3);
    for (int i = 0; i < 3; ++i) {
        Matrix d = Matrix::Zero(4, 4);
        d.block(0, 2, 2, 2) = pauli(i);
        d.block(2, 0, 2, 2) = pauli(i);
        s.deltas.push_back(std::move(d));
    }
    Matrix q = Matrix::Zero(4, 4);
    q(0, 0) = q(1, 1) = 1.0;
    q(2, 2) = q(3, 3) = -1.0;
    s.q = std::move(q);
    return s;
}

// d=2 line set whose coin exp(-i (pi/2) q) equals the Hadamard gate times the
// global phase -i: delta = sigma_z, q = (sigma_x + sigma_z)/sqrt(2). q does not
// anticommute with delta, so this drives the standard Hadamard walk rather
// than a relativistic limit.
inline CoinSet make_hadamard_set() {
    CoinSet s;
    s.dim = 2;
    s.deltas = {pauli(2)};
    s.q = (pauli(0) + pauli(2)) / std::numbers::sqrt2;
    return s;
}

// Change of internal basis: every matrix maps to u m u^dag.
inline CoinSet conjugate_set(const CoinSet& set, const Matrix& u, double tol = kDefaultTol) {
    require_coin_set_shape(set, "conjugate_set");
    if (u.rows() != set.dim || u.cols() != set.dim)
        throw std::invalid_argument("conjugate_set: unitary dimension mismatch");
    const double res = unitarity_residual(u);
    if (res > tol)
        throw std::invalid_argument("conjugate_set: matrix is not unitary, residual " +
                                    std::to_string(res));
    CoinSet out;
    out.dim = set.dim;
    out.deltas.reserve(set.deltas.size());
    for (const Matrix& d : set.deltas) out.deltas.push_back(u * d * u.adjoint());
    if (set.q) out.q = u * (*set.q) * u.adjoint();
    return out;
}

// gamma forms of a massive set. Requires q.
inline GammaSet to_gamma(const CoinSet& set) {
    require_coin_set_shape(set, "to_gamma");
    if (!set.q) throw std::invalid_argument("to_gamma: set has no coin generator q");
    GammaSet g;
    g.g0 = *set.q;
    g.gs.reserve(set.deltas.size());
    for (const Matrix& d : set.deltas) g.gs.push_back((*set.q) * d);
    return g;
}

// Clifford relations of the gamma form: g0^2 = I, g_a^2 = -I, and every pair
// anticommutes. Holds exactly when q and the deltas are mutually
// anticommuting involutions.
inline CertReport check_gamma_relations(const CoinSet& set, double tol = kDefaultTol) {
    const GammaSet g = to_gamma(set);
    const Matrix id = identity(set.dim);
    const int na = static_cast<int>(g.gs.size());
    std::vector<std::pair<std::string, double>> details;
    details.emplace_back("g0^2 - I", operator_norm(Matrix(g.g0 * g.g0 - id)));
    for (int a = 0; a < na; ++a) {
        const Matrix& ga = g.gs[static_cast<std::size_t>(a)];
        details.emplace_back(std::string("g") + axis_name(Axis(a)) + "^2 + I",
                             operator_norm(Matrix(ga * ga + id)));
        details.emplace_back(std::string("{g0, g") + axis_name(Axis(a)) + "}",
                             operator_norm(Matrix(g.g0 * ga + ga * g.g0)));
        for (int b = a + 1; b < na; ++b) {
            const Matrix& gb = g.gs[static_cast<std::size_t>(b)];
            details.emplace_back(std::string("{g") + axis_name(Axis(a)) + ", g" + axis_name(Axis(b)) + "}",
                                 operator_norm(Matrix(ga * gb + gb * ga)));
        }
    }
    return make_report("gamma_relations", tol, std::move(details));
}

// Equal-norm condition over all axis pairs: P^s_i P^t_j P^s_i = P^s_i / 2 for
// i != j and every sign choice, plus per-axis trace balance tr P+ = tr P-.
// Together these make the walk unbiased along every axis.
inline CertReport check_equal_norm(const CoinSet& set, double tol = kDefaultTol) {
    require_coin_set_shape(set, "check_equal_norm");
    if (set.deltas.size() < 2)
        throw std::invalid_argument("check_equal_norm: needs at least two deltas");
    const int na = static_cast<int>(set.deltas.size());
    const Matrix id = identity(set.dim);
    std::vector<std::pair<std::string, double>> details;
    std::vector<std::array<Matrix, 2>> pairs(static_cast<std::size_t>(na));
    for (int a = 0; a < na; ++a)
        pairs[static_cast<std::size_t>(a)] = {(id + set.deltas[static_cast<std::size_t>(a)]) / 2.0,
                                              (id - set.deltas[static_cast<std::size_t>(a)]) / 2.0};
    const char sign_char[2] = {'+', '-'};
    for (int i = 0; i < na; ++i) {
        for (int j = 0; j < na; ++j) {
            if (i == j) continue;
            for (int si = 0; si < 2; ++si) {
                for (int sj = 0; sj < 2; ++sj) {
                    const Matrix& pi = pairs[static_cast<std::size_t>(i)][static_cast<std::size_t>(si)];
                    const Matrix& pj = pairs[static_cast<std::size_t>(j)][static_cast<std::size_t>(sj)];
                    const double res = operator_norm(Matrix(pi * pj * pi - pi / 2.0));
                    std::string label = std::string("P") + sign_char[si] + axis_name(Axis(i)) + " P" +
                                        sign_char[sj] + axis_name(Axis(j)) + " P" + sign_char[si] +
                                        axis_name(Axis(i)) + " - P" + sign_char[si] + axis_name(Axis(i)) +
                                        "/2";
                    details.emplace_back(std::move(label), res);
                }
            }
        }
    }
    for (int a = 0; a < na; ++a) {
        const Complex tp = pairs[static_cast<std::size_t>(a)][0].trace();
        const Complex tm = pairs[static_cast<std::size_t>(a)][1].trace();
        details.emplace_back(std::string("tr P+") + axis_name(Axis(a)) + " - tr P-" + axis_name(Axis(a)),
                             std::abs(tp - tm));
    }
    return make_report("equal_norm", tol, std::move(details));
}

// Pairwise anticommutators of the deltas, extended by {q, delta_a} when q is
// present. Vanishing anticommutators are equivalent to the equal-norm
// condition and give the squared generator its diagonal form.
inline CertReport check_anticommuting(const CoinSet& set, double tol = kDefaultTol) {
    require_coin_set_shape(set, "check_anticommuting");
    const int na = static_cast<int>(set.deltas.size());
    std::vector<std::pair<std::string, double>> details;
    for (int i = 0; i < na; ++i) {
        for (int j = i + 1; j < na; ++j) {
            const double res = operator_norm(
                anticommutator(set.deltas[static_cast<std::size_t>(i)], set.deltas[static_cast<std::size_t>(j)]));
            details.emplace_back(std::string("{d") + axis_name(Axis(i)) + ",d" + axis_name(Axis(j)) + "}",
                                 res);
        }
    }
    if (set.q) {
        for (int i = 0; i < na; ++i) {
            const double res =
                operator_norm(anticommutator(*set.q, set.deltas[static_cast<std::size_t>(i)]));
            details.emplace_back(std::string("{q,d") + axis_name(Axis(i)) + "}", res);
        }
    }
    return make_report("anticommuting", tol, std::move(details));
}

// Parity covariance q P+_a q = P-_a per axis: conjugating by q swaps every
// projector pair, so q implements the internal half of a parity reflection.
inline CertReport check_parity_covariance(const CoinSet& set, double tol = kDefaultTol) {
    require_coin_set_shape(set, "check_parity_covariance");
    if (!set.q) throw std::invalid_argument("check_parity_covariance: set has no coin generator q");
    const Matrix& q = *set.q;
    const Matrix id = identity(set.dim);
    std::vector<std::pair<std::string, double>> details;
    details.emplace_back("q involution", involution_residual(q));
    for (std::size_t a = 0; a < set.deltas.size(); ++a) {
        const Matrix plus = (id + set.deltas[a]) / 2.0;
        const Matrix minus = (id - set.deltas[a]) / 2.0;
        const double res = operator_norm(Matrix(q * plus * q - minus));
        details.emplace_back(std::string("q P+") + axis_name(Axis(static_cast<int>(a))) + " q - P-" +
                                 axis_name(Axis(static_cast<int>(a))),
                             res);
    }
    return make_report("parity_covariance", tol, std::move(details));
}

// Rotates the axis assignment: delta'_a = sum_b r(b, a) delta_b, q unchanged.
// r must be orthogonal; the rotated set is re-certified (involutions and
// pairwise anticommutators) before it is returned.
inline CoinSet rotate_deltas(const CoinSet& set, const Eigen::Matrix3d& r, double tol = kDefaultTol) {
    require_coin_set_shape(set, "rotate_deltas");
    if (set.deltas.size() != 3)
        throw std::invalid_argument("rotate_deltas: needs exactly three deltas");
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(r.transpose() * r - Eigen::Matrix3d::Identity());
    const double orth = svd.singularValues()(0);
    if (orth > tol)
        throw std::invalid_argument("rotate_deltas: matrix is not orthogonal, residual " +
                                    std::to_string(orth));
    CoinSet out;
    out.dim = set.dim;
    out.q = set.q;
    out.deltas.assign(3, Matrix::Zero(set.dim, set.dim));
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            out.deltas[static_cast<std::size_t>(a)] += r(b, a) * set.deltas[static_cast<std::size_t>(b)];
    for (const Matrix& d : out.deltas) {
        const double res = involution_residual(d);
        if (res > tol)
            throw std::runtime_error("rotate_deltas: rotated delta failed certification, residual " +
                                     std::to_string(res));
    }
    const CertReport anti = check_anticommuting(out, tol);
    if (!anti.pass)
        throw std::runtime_error("rotate_deltas: rotated set failed anticommutation, residual " +
                                 std::to_string(anti.residual_max));
    return out;
}

// Unitarity conditions for a generalized displacement family {(shift_s, a_s)}:
// sum_s a_s a_s^dag = I and, for every nonzero relative displacement v,
// sum over pairs with shift_j - shift_l = v of a_j a_l^dag = 0.
inline CertReport check_generalized_unitarity(const GeneralizedWalkSpec& spec,
                                              double tol = kDefaultTol) {
    if (spec.dim < 1) throw std::invalid_argument("check_generalized_unitarity: dim must be positive");
    if (spec.ops.empty()) throw std::invalid_argument("check_generalized_unitarity: no operators");
    std::map<std::array<int, 3>, int> seen;
    for (const FamilyOp& op : spec.ops) {
        if (op.a.rows() != spec.dim || op.a.cols() != spec.dim)
            throw std::invalid_argument("check_generalized_unitarity: operator dimension mismatch");
        if (++seen[op.shift] > 1)
            throw std::invalid_argument("check_generalized_unitarity: duplicate displacement");
    }
    std::vector<std::pair<std::string, double>> details;
    Matrix total = Matrix::Zero(spec.dim, spec.dim);
    for (const FamilyOp& op : spec.ops) total += op.a * op.a.adjoint();
    details.emplace_back("sum a a^dag - I", operator_norm(Matrix(total - identity(spec.dim))));
    std::map<std::array<int, 3>, Matrix> cross;
    for (const FamilyOp& oj : spec.ops) {
        for (const FamilyOp& ol : spec.ops) {
            const std::array<int, 3> v{oj.shift[0] - ol.shift[0], oj.shift[1] - ol.shift[1],
                                       oj.shift[2] - ol.shift[2]};
            if (v == std::array<int, 3>{0, 0, 0}) continue;
            auto it = cross.try_emplace(v, Matrix::Zero(spec.dim, spec.dim)).first;
            it->second += oj.a * ol.a.adjoint();
        }
    }
    for (const auto& [v, m] : cross) {
        const std::string label = "cross (" + std::to_string(v[0]) + "," + std::to_string(v[1]) + "," +
                                  std::to_string(v[2]) + ")";
        details.emplace_back(label, operator_norm(m));
    }
    return make_report("generalized_unitarity", tol, std::move(details));
}

// Eight-operator body-centered family of a three-axis set: for each sign
// vector s, a_s = P^sx_X P^sy_Y P^sz_Z exp(-i theta q) displacing by s. A
// certified set makes this family pass check_generalized_unitarity.
inline GeneralizedWalkSpec bcc_operator_family(const CoinSet& set, double theta,
                                               double tol = kDefaultTol) {
    require_coin_set_shape(set, "bcc_operator_family");
    if (set.deltas.size() != 3)
        throw std::invalid_argument("bcc_operator_family: needs exactly three deltas");
    if (theta != 0.0 && !set.q)
        throw std::invalid_argument("bcc_operator_family: nonzero theta needs a coin generator q");
    std::array<ProjectorPair, 3> pairs;
    for (int a = 0; a < 3; ++a)
        pairs[static_cast<std::size_t>(a)] = projectors_from_delta(set.deltas[static_cast<std::size_t>(a)], tol);
    Matrix coin = identity(set.dim);
    if (theta != 0.0) {
        const double qres = involution_residual(*set.q);
        if (qres > tol)
            throw std::invalid_argument("bcc_operator_family: q is not a Hermitian involution");
        coin = involution_phase_exp(-theta, *set.q);
    }
    GeneralizedWalkSpec spec;
    spec.dim = set.dim;
    spec.ops.reserve(8);
    for (int sx : {+1, -1}) {
        for (int sy : {+1, -1}) {
            for (int sz : {+1, -1}) {
                FamilyOp op;
                op.shift = {sx, sy, sz};
                const Matrix& px = (sx > 0) ? pairs[0].plus : pairs[0].minus;
                const Matrix& py = (sy > 0) ? pairs[1].plus : pairs[1].minus;
                const Matrix& pz = (sz > 0) ? pairs[2].plus : pairs[2].minus;
                op.a = px * py * pz * coin;
                spec.ops.push_back(std::move(op));
            }
        }
    }
    return spec;
}

struct ExtraInvolutionScan {
    double residual = 0.0;        // min over candidates of max_a ||{q(n), sigma_a}||
    Eigen::Vector3d direction{0, 0, 0};
};

// Searches d=2 for a fourth Hermitian involution anticommuting with the Pauli
// triple. Candidates n.sigma cover every traceless Hermitian involution up to
// sign; the remaining involutions +-I give anticommutator norm 2 outright.
// The minimum of max_a ||{n.sigma, sigma_a}|| over the sphere is 2/sqrt(3)
// (attained at n = (1,1,1)/sqrt(3)), so no such involution exists and a mass
// term forces d = 4.
inline ExtraInvolutionScan min_extra_involution_residual(double coarse_deg = 1.0) {
    if (coarse_deg <= 0.0 || coarse_deg > 30.0)
        throw std::invalid_argument("min_extra_involution_residual: coarse_deg out of range");
    const std::array<Matrix, 3> sig = {pauli(0), pauli(1), pauli(2)};
    auto objective = [&sig](double theta, double phi) {
        const Eigen::Vector3d n(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                                std::cos(theta));
        const Matrix q = n.x() * sig[0] + n.y() * sig[1] + n.z() * sig[2];
        double worst = 0.0;
        for (const Matrix& s : sig) worst = std::max(worst, operator_norm(anticommutator(q, s)));
        return std::make_pair(worst, n);
    };
    const double deg = std::numbers::pi / 180.0;
    double best = std::numeric_limits<double>::infinity();
    double best_theta = 0.0, best_phi = 0.0;
    Eigen::Vector3d best_n(0, 0, 1);
    double step = coarse_deg * deg;
    for (double theta = 0.0; theta <= std::numbers::pi + 0.5 * step; theta += step) {
        for (double phi = 0.0; phi < 2.0 * std::numbers::pi; phi += step) {
            const auto [val, n] = objective(theta, phi);
            if (val < best) {
                best = val;
                best_theta = theta;
                best_phi = phi;
                best_n = n;
            }
        }
    }
    for (int round = 0; round < 2; ++round) {
        const double fine = step / 10.0;
        const double t0 = best_theta, p0 = best_phi;
        for (double theta = t0 - step; theta <= t0 + step + 0.5 * fine; theta += fine) {
            for (double phi = p0 - step; phi <= p0 + step + 0.5 * fine; phi += fine) {
                const auto [val, n] = objective(theta, phi);
                if (val < best) {
                    best = val;
                    best_theta = theta;
                    best_phi = phi;
                    best_n = n;
                }
            }
        }
        step = fine;
    }
    return {best, best_n};
}

}  // namespace qwalk

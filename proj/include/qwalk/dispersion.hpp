#pragma once

// Dispersion analysis: eigenfrequencies of the one-step momentum block, the
// continuum branches, the scaling of lattice corrections, direction
// anisotropy, and an interferometric phase-shift estimate in SI units.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qwalk/fit.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {

// Walk eigenfrequencies at one momentum: the eigenphases of u(k) mapped by
// lambda = exp(-i omega dt). Sorted ascending, omega in (-pi/dt, pi/dt].
inline std::vector<double> walk_dispersion(const StepOperator& op, std::array<double, 3> k) {
    const Matrix u = momentum_block(op, k);
    Eigen::ComplexEigenSolver<Matrix> es(u);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("walk_dispersion: eigensolver failed");
    const double dt = op.params.dt;
    std::vector<double> omega(static_cast<std::size_t>(u.rows()));
    for (Eigen::Index j = 0; j < u.rows(); ++j) {
        double w = -std::arg(es.eigenvalues()(j)) / dt;
        if (w <= -std::numbers::pi / dt) w = std::numbers::pi / dt;
        omega[static_cast<std::size_t>(j)] = w;
    }
    std::sort(omega.begin(), omega.end());
    return omega;
}

// Continuum branches at one momentum: +-sqrt(mass^2 + |k|^2), each with
// multiplicity d/2, sorted ascending.
inline std::vector<double> dirac_dispersion(int d, double mass, std::array<double, 3> k, int dims) {
    if (d < 2 || d % 2 != 0) throw std::invalid_argument("dirac_dispersion: d must be even and >= 2");
    if (dims != 1 && dims != 3) throw std::invalid_argument("dirac_dispersion: dims must be 1 or 3");
    if (!(mass >= 0.0)) throw std::invalid_argument("dirac_dispersion: mass must be nonnegative");
    double k2 = 0.0;
    for (int a = 0; a < dims; ++a) k2 += k[static_cast<std::size_t>(a)] * k[static_cast<std::size_t>(a)];
    const double e = std::sqrt(mass * mass + k2);
    std::vector<double> omega(static_cast<std::size_t>(d));
    for (int j = 0; j < d / 2; ++j) omega[static_cast<std::size_t>(j)] = -e;
    for (int j = d / 2; j < d; ++j) omega[static_cast<std::size_t>(j)] = e;
    return omega;
}

struct DispersionRow {
    std::array<double, 3> k{0.0, 0.0, 0.0};
    std::vector<double> omega_walk;
    std::vector<double> omega_dirac;
    std::vector<double> residual;  // |omega_walk - omega_dirac| branch by branch
};

inline DispersionRow dispersion_row(const StepOperator& op, std::array<double, 3> k) {
    DispersionRow row;
    row.k = k;
    row.omega_walk = walk_dispersion(op, k);
    row.omega_dirac = dirac_dispersion(op.set.dim, op.params.mass, k, op.params.dims);
    row.residual.resize(row.omega_walk.size());
    for (std::size_t j = 0; j < row.omega_walk.size(); ++j)
        row.residual[j] = std::abs(row.omega_walk[j] - row.omega_dirac[j]);
    return row;
}

inline std::vector<DispersionRow> dispersion_table(const StepOperator& op,
                                                   const std::vector<std::array<double, 3>>& ks) {
    std::vector<DispersionRow> rows;
    rows.reserve(ks.size());
    for (const auto& k : ks) rows.push_back(dispersion_row(op, k));
    return rows;
}

struct CorrectionScaling {
    PowerLawFit fit;
    std::vector<std::pair<double, double>> points;  // (|k|, |omega_walk^2 - omega_dirac^2|)
};

// Fits |omega_walk(k)^2 - (mass^2 + |k|^2)| ~ prefactor * |k|^exponent along one
// direction, using the top walk branch. Needs at least three magnitudes.
inline CorrectionScaling correction_scaling(const StepOperator& op, std::array<double, 3> direction,
                                            const std::vector<double>& magnitudes) {
    if (magnitudes.size() < 3)
        throw std::invalid_argument("correction_scaling: need at least three magnitudes");
    double dn = 0.0;
    for (int a = 0; a < op.params.dims; ++a)
        dn += direction[static_cast<std::size_t>(a)] * direction[static_cast<std::size_t>(a)];
    dn = std::sqrt(dn);
    if (!(dn > 0.0)) throw std::invalid_argument("correction_scaling: zero direction");
    CorrectionScaling out;
    std::vector<double> xs, ys;
    for (double mag : magnitudes) {
        if (!(mag > 0.0)) throw std::invalid_argument("correction_scaling: magnitudes must be positive");
        std::array<double, 3> k{0.0, 0.0, 0.0};
        for (int a = 0; a < op.params.dims; ++a)
            k[static_cast<std::size_t>(a)] = direction[static_cast<std::size_t>(a)] / dn * mag;
        const std::vector<double> w = walk_dispersion(op, k);
        const double e2 = op.params.mass * op.params.mass + mag * mag;
        const double r = std::abs(w.back() * w.back() - e2);
        if (r < 1e-300)
            throw std::runtime_error("correction_scaling: residual vanished, nothing to fit");
        out.points.emplace_back(mag, r);
        xs.push_back(mag);
        ys.push_back(r);
    }
    out.fit = fit_power_law(xs, ys);
    return out;
}

namespace detail {

inline std::array<double, 3> scaled_direction(std::array<double, 3> dir, double mag, int dims,
                                              const std::string& where) {
    double dn = 0.0;
    for (int a = 0; a < dims; ++a) dn += dir[static_cast<std::size_t>(a)] * dir[static_cast<std::size_t>(a)];
    dn = std::sqrt(dn);
    if (!(dn > 0.0)) throw std::invalid_argument(where + ": zero direction");
    std::array<double, 3> k{0.0, 0.0, 0.0};
    for (int a = 0; a < dims; ++a) k[static_cast<std::size_t>(a)] = dir[static_cast<std::size_t>(a)] / dn * mag;
    return k;
}

}  // namespace detail

// Largest branchwise gap between the walk frequencies along two directions at
// equal |k|. Zero for an isotropic dispersion.
inline double anisotropy(const StepOperator& op, double k_mag, std::array<double, 3> dir_a,
                         std::array<double, 3> dir_b) {
    if (!(k_mag >= 0.0)) throw std::invalid_argument("anisotropy: k_mag must be nonnegative");
    const auto ka = detail::scaled_direction(dir_a, k_mag, op.params.dims, "anisotropy");
    const auto kb = detail::scaled_direction(dir_b, k_mag, op.params.dims, "anisotropy");
    const std::vector<double> wa = walk_dispersion(op, ka);
    const std::vector<double> wb = walk_dispersion(op, kb);
    double worst = 0.0;
    for (std::size_t j = 0; j < wa.size(); ++j) worst = std::max(worst, std::abs(wa[j] - wb[j]));
    return worst;
}

// Continuum counterpart of anisotropy; identically zero because the branches
// depend on |k| alone. Computed from the branch values, not assumed.
inline double continuum_anisotropy(int d, double mass, int dims, double k_mag,
                                   std::array<double, 3> dir_a, std::array<double, 3> dir_b) {
    const auto ka = detail::scaled_direction(dir_a, k_mag, dims, "continuum_anisotropy");
    const auto kb = detail::scaled_direction(dir_b, k_mag, dims, "continuum_anisotropy");
    const std::vector<double> wa = dirac_dispersion(d, mass, ka, dims);
    const std::vector<double> wb = dirac_dispersion(d, mass, kb, dims);
    double worst = 0.0;
    for (std::size_t j = 0; j < wa.size(); ++j) worst = std::max(worst, std::abs(wa[j] - wb[j]));
    return worst;
}

// SI constants for the laboratory estimate.
inline constexpr double kHbarSI = 1.054571817e-34;        // J s
inline constexpr double kSpeedOfLightSI = 299792458.0;    // m / s
inline constexpr double kNeutronMassSI = 1.67492749804e-27;  // kg
inline constexpr double kPlanckLengthSI = 1.616e-35;      // m

// Slow massive particle traversing a path of length L with momentum p = m v.
// The nonrelativistic estimate applies, so v must stay below c/10.
struct InterferometerScenario {
    double p = 0.0;   // kg m / s
    double v = 0.0;   // m / s
    double L = 0.0;   // m
    double dx = 0.0;  // m
};

inline void validate(const InterferometerScenario& s) {
    if (!(s.p > 0.0) || !(s.v > 0.0) || !(s.L > 0.0) || !(s.dx > 0.0))
        throw std::invalid_argument("InterferometerScenario: all quantities must be positive");
    if (!(s.v < 0.1 * kSpeedOfLightSI))
        throw std::invalid_argument("InterferometerScenario: v must stay nonrelativistic (< c/10)");
}

// Accumulated phase difference (radians) between the lattice and continuum
// dispersion over the flight path: delta_phi = c p^2 dx L / (v hbar^2).
inline double phase_shift_estimate(const InterferometerScenario& s) {
    validate(s);
    return kSpeedOfLightSI * s.p * s.p * s.dx * s.L / (s.v * kHbarSI * kHbarSI);
}

}  // namespace qwalk

#pragma once

// Continuum reference dynamics in natural units (hbar = c = 1): the
// momentum-space generator H(k) = -k . delta + mass q, exact evolution under
// it fiber by fiber, a central-difference helper, and the walk-vs-continuum
// convergence scan.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qwalk/fit.hpp"
#include "qwalk/lattice.hpp"
#include "qwalk/operator_algebra.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {

struct ContinuumParams {
    int dims = 1;
    double mass = 0.0;
};

inline ContinuumParams make_continuum_params(int dims, double mass) {
    if (dims != 1 && dims != 3)
        throw std::invalid_argument("make_continuum_params: dims must be 1 or 3");
    if (!(mass >= 0.0)) throw std::invalid_argument("make_continuum_params: mass must be nonnegative");
    return {dims, mass};
}

// H(k) = -sum_a k_a delta_a + mass q. For a certified set
// H(k)^2 = (mass^2 + |k|^2) I, which the tests assert. A massless set may omit
// q; a nonzero mass requires it.
inline Matrix dirac_generator(const CoinSet& set, const ContinuumParams& cp,
                              std::array<double, 3> k) {
    require_coin_set_shape(set, "dirac_generator");
    if (static_cast<int>(set.deltas.size()) != cp.dims)
        throw std::invalid_argument("dirac_generator: need one delta per axis");
    if (cp.mass != 0.0 && !set.q)
        throw std::invalid_argument("dirac_generator: nonzero mass needs a coin generator q");
    Matrix h = Matrix::Zero(set.dim, set.dim);
    for (int a = 0; a < cp.dims; ++a) h -= k[static_cast<std::size_t>(a)] * set.deltas[static_cast<std::size_t>(a)];
    if (cp.mass != 0.0) h += cp.mass * (*set.q);
    return h;
}

// Evolves a state for physical time t under exp(-i H(k) t), diagonalizing
// H(k) on every momentum fiber. Input in either representation; the result
// comes back in the representation it arrived in.
inline LatticeState dirac_evolve(const CoinSet& set, const ContinuumParams& cp, double dx,
                                 LatticeState state, double t) {
    require_coin_set_shape(set, "dirac_evolve");
    if (state.dims != cp.dims) throw std::invalid_argument("dirac_evolve: dims mismatch");
    if (state.d != set.dim) throw std::invalid_argument("dirac_evolve: internal dimension mismatch");
    if (!(dx > 0.0)) throw std::invalid_argument("dirac_evolve: dx must be positive");
    const Rep rep_in = state.rep;
    LatticeState s = (rep_in == Rep::Position) ? to_momentum(state) : std::move(state);
    const int n = s.n;
    const int d = s.d;
    parallel_for(s.sites(), [&](std::int64_t begin, std::int64_t end) {
        Vector v(d);
        for (std::int64_t site = begin; site < end; ++site) {
            std::array<double, 3> k{0.0, 0.0, 0.0};
            k[0] = k_for_bin(static_cast<int>(site % n), n, dx);
            if (s.dims == 3) {
                k[1] = k_for_bin(static_cast<int>((site / n) % n), n, dx);
                k[2] = k_for_bin(static_cast<int>(site / (static_cast<std::int64_t>(n) * n)), n, dx);
            }
            const Matrix h = dirac_generator(set, cp, k);
            Eigen::SelfAdjointEigenSolver<Matrix> es(h);
            Eigen::Map<Vector> fiber(&s.amps[static_cast<std::size_t>(site * d)], d);
            v.noalias() = es.eigenvectors().adjoint() * fiber;
            for (int c = 0; c < d; ++c)
                v(c) *= std::polar(1.0, -es.eigenvalues()(c) * t);
            fiber.noalias() = es.eigenvectors() * v;
        }
    });
    return (rep_in == Rep::Position) ? to_position(s) : s;
}

// Central difference (psi(x + dx) - psi(x - dx)) / (2 dx) along one axis,
// periodic wrap. Second-order accurate on smooth data.
inline LatticeState difference_derivative(const LatticeState& s, Axis axis, double dx) {
    if (s.rep != Rep::Position)
        throw std::invalid_argument("difference_derivative: position representation required");
    if (!(dx > 0.0)) throw std::invalid_argument("difference_derivative: dx must be positive");
    const int a = static_cast<int>(axis);
    if (a < 0 || a >= s.dims)
        throw std::invalid_argument("difference_derivative: axis out of range for dims");
    const int n = s.n;
    const int d = s.d;
    std::int64_t stride = 1;
    for (int i = 0; i < a; ++i) stride *= n;
    LatticeState out = make_lattice_state(s.dims, s.n, s.d, s.rep);
    parallel_for(s.sites(), [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t site = begin; site < end; ++site) {
            const int coord = static_cast<int>((site / stride) % n);
            const std::int64_t fwd = site + (coord == n - 1 ? -(n - 1) * stride : stride);
            const std::int64_t back = site + (coord == 0 ? (n - 1) * stride : -stride);
            for (int c = 0; c < d; ++c)
                out.at(site, c) = (s.at(fwd, c) - s.at(back, c)) / (2.0 * dx);
        }
    });
    return out;
}

// Number of walk steps covering physical time t; throws when t is not an
// integer multiple of dt (relative slack 1e-9).
inline int steps_for_time(double dt, double t) {
    if (!(dt > 0.0)) throw std::invalid_argument("steps_for_time: dt must be positive");
    if (t < 0.0) throw std::invalid_argument("steps_for_time: t must be nonnegative");
    const double raw = t / dt;
    const double rounded = std::round(raw);
    if (std::abs(raw - rounded) > 1e-9 * std::max(1.0, std::abs(raw)))
        throw std::invalid_argument("steps_for_time: time is not commensurate with dt");
    return static_cast<int>(rounded);
}

struct ConvergenceRow {
    double dx = 0.0;
    int steps = 0;
    double error = 0.0;
};

struct ConvergenceResult {
    std::vector<ConvergenceRow> rows;
    double fitted_order = 0.0;
};

// One walk-vs-continuum refinement study. Level l uses n = base_n 2^l,
// dx = box_length / n, steps = base_steps 2^l, so every level reaches the same
// physical time base_steps * box_length / base_n.
struct ConvergenceScanSpec {
    int dims = 1;
    CoinSet set;
    double mass = 0.0;
    double box_length = 0.0;
    int base_n = 0;
    int base_steps = 0;
    int levels = 0;
    double sigma = 0.0;
    std::array<double, 3> k0{0.0, 0.0, 0.0};
    Vector spinor;
};

// Error per level is the global-phase-aligned L2 distance between the walked
// packet and the continuum-evolved packet at the matched physical time;
// fitted_order is the log-log slope of error against dx.
inline ConvergenceResult convergence_scan(const ConvergenceScanSpec& spec) {
    if (spec.levels < 2) throw std::invalid_argument("convergence_scan: need at least two levels");
    if (spec.base_n < 2) throw std::invalid_argument("convergence_scan: base_n too small");
    if (spec.base_steps < 1) throw std::invalid_argument("convergence_scan: base_steps must be positive");
    if (!(spec.box_length > 0.0))
        throw std::invalid_argument("convergence_scan: box_length must be positive");
    const ContinuumParams cp = make_continuum_params(spec.dims, spec.mass);
    ConvergenceResult result;
    std::vector<double> dxs, errs;
    for (int level = 0; level < spec.levels; ++level) {
        const int n = spec.base_n << level;
        const int steps = spec.base_steps << level;
        const double dx = spec.box_length / n;
        const WalkParams params = make_walk_params(spec.dims, n, dx, spec.mass);
        const double t = steps * params.dt;
        std::array<double, 3> center{0.0, 0.0, 0.0};
        for (int a = 0; a < spec.dims; ++a) center[static_cast<std::size_t>(a)] = spec.box_length / 2.0;
        const LatticeState packet =
            gaussian_packet(params, center, spec.sigma, spec.k0, spec.spinor);
        const LatticeState start = to_momentum(packet);
        LatticeState walked = start;
        const StepOperator op = make_step_operator(params, spec.set);
        evolve(op, walked, steps);
        const LatticeState reference = dirac_evolve(spec.set, cp, dx, start, t);
        const Complex ov = inner_product(reference, walked);
        const double nw = l2_norm(walked), nr = l2_norm(reference);
        const double err2 = std::max(0.0, nw * nw + nr * nr - 2.0 * std::abs(ov));
        const double err = std::sqrt(err2);
        result.rows.push_back({dx, steps, err});
        dxs.push_back(dx);
        errs.push_back(std::max(err, 1e-300));
    }
    result.fitted_order = fit_power_law(dxs, errs).exponent;
    return result;
}

}  // namespace qwalk

#pragma once

// The walk engine. One step is U = S_{a0} S_{a1} S_{a2} C where
// C = exp(-i theta q), S_a = (shift_a by +1) P+_a + (shift_a by -1) P-_a, and
// axis_order lists the factors left to right, so the rightmost acts first and
// the coin is always the first operation of a step. Both representations
// implement the same operator; in momentum space each k-fiber picks up
// exp(+i k_a dx delta_a) per axis because a right shift multiplies bin k by
// exp(+i k dx).

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qwalk/axes.hpp"
#include "qwalk/lattice.hpp"
#include "qwalk/operator_algebra.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/random.hpp"
#include "qwalk/report.hpp"

namespace qwalk {

struct StepOperator {
    WalkParams params;
    CoinSet set;
    AxisOrder axis_order = kDefaultAxisOrder;
    Matrix coin;                       // exp(-i theta q); identity when theta == 0
    std::vector<ProjectorPair> pairs;  // one per axis, order X, Y, Z
};

// Validates what a unitary local step requires: one Hermitian-involution delta
// per axis, pairwise anticommutation across axes, and a Hermitian-involution q
// whenever theta is nonzero. Relativistic-structure conditions (equal norm,
// parity covariance) are separate certifications and are not forced here.
inline StepOperator make_step_operator(const WalkParams& params, CoinSet set,
                                       AxisOrder axis_order = kDefaultAxisOrder,
                                       double tol = kDefaultTol) {
    require_coin_set_shape(set, "make_step_operator");
    if (static_cast<int>(set.deltas.size()) != params.dims)
        throw std::invalid_argument("make_step_operator: need one delta per lattice axis");
    {
        std::array<bool, 3> seen{false, false, false};
        for (Axis a : axis_order) {
            const int i = static_cast<int>(a);
            if (i < 0 || i > 2 || seen[static_cast<std::size_t>(i)])
                throw std::invalid_argument("make_step_operator: axis_order must be a permutation");
            seen[static_cast<std::size_t>(i)] = true;
        }
    }
    StepOperator op;
    op.params = params;
    op.axis_order = axis_order;
    op.pairs.reserve(set.deltas.size());
    for (const Matrix& d : set.deltas) op.pairs.push_back(projectors_from_delta(d, tol));
    if (params.dims == 3) {
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = i + 1; j < 3; ++j) {
                const double res = operator_norm(anticommutator(set.deltas[i], set.deltas[j]));
                if (res > tol)
                    throw std::invalid_argument(
                        "make_step_operator: deltas must anticommute across axes, residual " +
                        std::to_string(res));
            }
    }
    if (params.theta != 0.0) {
        if (!set.q)
            throw std::invalid_argument("make_step_operator: nonzero theta needs a coin generator q");
        const double qres = involution_residual(*set.q);
        if (qres > tol)
            throw std::invalid_argument("make_step_operator: q is not a Hermitian involution, residual " +
                                        std::to_string(qres));
        op.coin = involution_phase_exp(-params.theta, *set.q);
    } else {
        op.coin = identity(set.dim);
    }
    op.set = std::move(set);
    return op;
}

namespace detail {

inline void require_walk_state(const StepOperator& op, const LatticeState& s, Rep rep,
                               const std::string& where) {
    if (s.rep != rep) throw std::invalid_argument(where + ": wrong representation");
    if (s.dims != op.params.dims || s.n != op.params.n || s.d != op.set.dim)
        throw std::invalid_argument(where + ": state does not match the step operator");
}

// One conditional-shift stage along `axis`, gather form:
// out(x) = P+ in(x - 1_a) + P- in(x + 1_a).
inline void shift_stage(const StepOperator& op, int axis, LatticeState& s) {
    const int n = s.n;
    const int d = s.d;
    const Matrix& plus = op.pairs[static_cast<std::size_t>(axis)].plus;
    const Matrix& minus = op.pairs[static_cast<std::size_t>(axis)].minus;
    std::int64_t stride = 1;
    for (int i = 0; i < axis; ++i) stride *= n;
    LatticeState out = make_lattice_state(s.dims, s.n, s.d, s.rep);
    parallel_for(s.sites(), [&](std::int64_t begin, std::int64_t end) {
        Vector acc(d);
        for (std::int64_t site = begin; site < end; ++site) {
            const int coord = static_cast<int>((site / stride) % n);
            const std::int64_t back = site + (coord == 0 ? (n - 1) * stride : -stride);
            const std::int64_t fwd = site + (coord == n - 1 ? -(n - 1) * stride : stride);
            Eigen::Map<const Vector> vb(&s.amps[static_cast<std::size_t>(back * d)], d);
            Eigen::Map<const Vector> vf(&s.amps[static_cast<std::size_t>(fwd * d)], d);
            acc.noalias() = plus * vb;
            acc.noalias() += minus * vf;
            Eigen::Map<Vector>(&out.amps[static_cast<std::size_t>(site * d)], d) = acc;
        }
    });
    s.amps.swap(out.amps);
}

}  // namespace detail

// One step in the position representation. Norm is preserved to roundoff.
inline void step_position(const StepOperator& op, LatticeState& s) {
    detail::require_walk_state(op, s, Rep::Position, "step_position");
    if (op.params.theta != 0.0) apply_sitewise(op.coin, s);
    for (int idx = op.params.dims - 1; idx >= 0; --idx) {
        const int axis = (op.params.dims == 1) ? 0 : static_cast<int>(op.axis_order[static_cast<std::size_t>(idx)]);
        detail::shift_stage(op, axis, s);
    }
}

// One step in the momentum representation: every k-fiber is multiplied by the
// same block as momentum_block(op, k).
inline void step_momentum(const StepOperator& op, LatticeState& s) {
    detail::require_walk_state(op, s, Rep::Momentum, "step_momentum");
    const int n = s.n;
    const int d = s.d;
    std::vector<double> cos_tab(static_cast<std::size_t>(n)), sin_tab(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
        const double phi = 2.0 * std::numbers::pi * signed_bin(m, n) / n;  // k dx of bin m
        cos_tab[static_cast<std::size_t>(m)] = std::cos(phi);
        sin_tab[static_cast<std::size_t>(m)] = std::sin(phi);
    }
    const bool coin_on = op.params.theta != 0.0;
    parallel_for(s.sites(), [&](std::int64_t begin, std::int64_t end) {
        Vector v(d), w(d);
        for (std::int64_t site = begin; site < end; ++site) {
            Eigen::Map<Vector> fiber(&s.amps[static_cast<std::size_t>(site * d)], d);
            v = fiber;
            if (coin_on) {
                w.noalias() = op.coin * v;
                v.swap(w);
            }
            int bins[3] = {static_cast<int>(site % n), 0, 0};
            if (s.dims == 3) {
                bins[1] = static_cast<int>((site / n) % n);
                bins[2] = static_cast<int>(site / (static_cast<std::int64_t>(n) * n));
            }
            for (int idx = op.params.dims - 1; idx >= 0; --idx) {
                const int axis =
                    (op.params.dims == 1) ? 0 : static_cast<int>(op.axis_order[static_cast<std::size_t>(idx)]);
                const int m = bins[axis];
                const Complex isin(0.0, sin_tab[static_cast<std::size_t>(m)]);
                const double c = cos_tab[static_cast<std::size_t>(m)];
                w.noalias() = op.set.deltas[static_cast<std::size_t>(axis)] * v;
                v = c * v + isin * w;
            }
            fiber = v;
        }
    });
}

// Applies `steps` walk steps in the state's own representation.
inline void evolve(const StepOperator& op, LatticeState& s, int steps) {
    if (steps < 0) throw std::invalid_argument("evolve: steps must be nonnegative");
    for (int i = 0; i < steps; ++i) {
        if (s.rep == Rep::Position)
            step_position(op, s);
        else
            step_momentum(op, s);
    }
}

// The d x d block the step applies to one momentum fiber:
// u(k) = prod_axes exp(+i k_a dx delta_a) * exp(-i theta q), leftmost factor
// axis_order[0]. Defined for |k_a| dx <= pi.
inline Matrix momentum_block(const StepOperator& op, std::array<double, 3> k) {
    Matrix u = op.coin;
    for (int idx = op.params.dims - 1; idx >= 0; --idx) {
        const int axis =
            (op.params.dims == 1) ? 0 : static_cast<int>(op.axis_order[static_cast<std::size_t>(idx)]);
        const double phi = k[static_cast<std::size_t>(axis)] * op.params.dx;
        if (std::abs(phi) > std::numbers::pi * (1.0 + 1e-12))
            throw std::invalid_argument("momentum_block: |k dx| exceeds pi");
        u = involution_phase_exp(phi, op.set.deltas[static_cast<std::size_t>(axis)]) * u;
    }
    return u;
}

// Parity invariance of the full step on random states: with the internal half
// q and the spatial reflection r, checks step(r q psi) = r q step(psi). Exact
// for any set whose q swaps every projector pair.
inline CertReport check_parity_invariance(const StepOperator& op, int trials = 20,
                                          double tol = kDefaultTol, std::uint64_t seed = 12345) {
    if (trials < 1) throw std::invalid_argument("check_parity_invariance: trials must be positive");
    if (!op.set.q)
        throw std::invalid_argument("check_parity_invariance: set has no coin generator q");
    Rng rng(seed);
    const Matrix& q = *op.set.q;
    auto parity_op = [&](const LatticeState& s) {
        LatticeState t = parity_reflect(s);
        apply_sitewise(q, t);
        return t;
    };
    std::vector<std::pair<std::string, double>> details;
    for (int t = 0; t < trials; ++t) {
        LatticeState psi = random_lattice_state(op.params.dims, op.params.n, op.set.dim, rng);
        LatticeState lhs = parity_op(psi);
        step_position(op, lhs);
        LatticeState rhs = psi;
        step_position(op, rhs);
        rhs = parity_op(rhs);
        details.emplace_back("state " + std::to_string(t), l2_distance(lhs, rhs));
    }
    return make_report("parity_invariance", tol, std::move(details));
}

}  // namespace qwalk

#pragma once

// Wavefunctions on periodic 1-D / 3-D grids with an internal spin index, plus
// the position<->momentum transforms and the standard state constructors.
//
// Layout: amps[site * d + c] with site = (z * n + y) * n + x, so the internal
// index runs fastest and x fastest among the axes. Momentum states reuse the
// layout; bin m on an axis carries k = 2 pi m~ / (n dx) with the signed index
// m~ = m for m <= n/2 and m - n otherwise, so k dx always lies in (-pi, pi].
//
// Conventions: a plane wave of momentum k has position amplitudes proportional
// to exp(-i k . x), and to_momentum projects onto those waves,
// psi~(k) = n^(-dims/2) sum_x exp(+i k . x) psi(x). A single lattice shift to
// the right therefore multiplies momentum amplitudes by exp(+i k dx).

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "qwalk/axes.hpp"
#include "qwalk/fft.hpp"
#include "qwalk/matrix.hpp"
#include "qwalk/parallel.hpp"

namespace qwalk {

// Walk discretization in natural units hbar = c = 1: dt = dx and
// theta = mass * dx per axis step.
struct WalkParams {
    int dims = 1;
    int n = 0;
    double dx = 0.0;
    double dt = 0.0;
    double mass = 0.0;
    double theta = 0.0;
};

inline WalkParams make_walk_params(int dims, int n, double dx, double mass) {
    if (dims != 1 && dims != 3) throw std::invalid_argument("make_walk_params: dims must be 1 or 3");
    if (n < 2 || !is_power_of_two(n))
        throw std::invalid_argument("make_walk_params: n must be a power of two >= 2");
    if (!(dx > 0.0)) throw std::invalid_argument("make_walk_params: dx must be positive");
    if (!(mass >= 0.0)) throw std::invalid_argument("make_walk_params: mass must be nonnegative");
    WalkParams p;
    p.dims = dims;
    p.n = n;
    p.dx = dx;
    p.dt = dx;
    p.mass = mass;
    p.theta = mass * dx;
    return p;
}

enum class Rep { Position, Momentum };

struct LatticeState {
    Rep rep = Rep::Position;
    int dims = 1;
    int n = 0;
    int d = 0;
    std::vector<Complex> amps;

    std::int64_t sites() const {
        std::int64_t s = n;
        for (int i = 1; i < dims; ++i) s *= n;
        return s;
    }
    Complex& at(std::int64_t site, int c) { return amps[static_cast<std::size_t>(site * d + c)]; }
    const Complex& at(std::int64_t site, int c) const {
        return amps[static_cast<std::size_t>(site * d + c)];
    }
};

inline LatticeState make_lattice_state(int dims, int n, int d, Rep rep = Rep::Position) {
    if (dims != 1 && dims != 3) throw std::invalid_argument("make_lattice_state: dims must be 1 or 3");
    if (n < 2 || !is_power_of_two(n))
        throw std::invalid_argument("make_lattice_state: n must be a power of two >= 2");
    if (d < 1) throw std::invalid_argument("make_lattice_state: d must be positive");
    LatticeState s;
    s.rep = rep;
    s.dims = dims;
    s.n = n;
    s.d = d;
    s.amps.assign(static_cast<std::size_t>(s.sites()) * static_cast<std::size_t>(d), Complex(0.0, 0.0));
    return s;
}

inline void require_same_shape(const LatticeState& a, const LatticeState& b, const std::string& where) {
    if (a.dims != b.dims || a.n != b.n || a.d != b.d || a.rep != b.rep)
        throw std::invalid_argument(where + ": state shape or representation mismatch");
}

inline std::int64_t flat_site(const LatticeState& s, int x, int y = 0, int z = 0) {
    if (s.dims == 1) return x;
    return (static_cast<std::int64_t>(z) * s.n + y) * s.n + x;
}

// Signed momentum index of storage bin m: m for m <= n/2, m - n otherwise.
inline int signed_bin(int m, int n) { return (m <= n / 2) ? m : m - n; }

// Storage bin of the signed index, inverse of signed_bin.
inline int bin_of_signed(int ms, int n) { return (ms % n + n) % n; }

// Momentum carried by storage bin m on one axis.
inline double k_for_bin(int m, int n, double dx) {
    return 2.0 * std::numbers::pi * signed_bin(m, n) / (n * dx);
}

// Nearest grid bin to momentum k (ties resolve toward +pi/dx at the edge).
inline int bin_for_k(double k, int n, double dx) {
    double ms = std::round(k * n * dx / (2.0 * std::numbers::pi));
    int m = static_cast<int>(ms) % n;
    if (m < 0) m += n;
    return m;
}

inline double l2_norm(const LatticeState& s) {
    double acc = 0.0;
    for (const Complex& a : s.amps) acc += std::norm(a);
    return std::sqrt(acc);
}

inline Complex inner_product(const LatticeState& a, const LatticeState& b) {
    require_same_shape(a, b, "inner_product");
    Complex acc(0.0, 0.0);
    for (std::size_t i = 0; i < a.amps.size(); ++i) acc += std::conj(a.amps[i]) * b.amps[i];
    return acc;
}

inline double l2_distance(const LatticeState& a, const LatticeState& b) {
    require_same_shape(a, b, "l2_distance");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.amps.size(); ++i) acc += std::norm(a.amps[i] - b.amps[i]);
    return std::sqrt(acc);
}

inline void normalize(LatticeState& s) {
    const double norm = l2_norm(s);
    if (norm == 0.0) throw std::invalid_argument("normalize: zero state");
    for (Complex& a : s.amps) a /= norm;
}

// Applies one internal-space matrix at every site.
inline void apply_sitewise(const Matrix& m, LatticeState& s) {
    if (m.rows() != s.d || m.cols() != s.d)
        throw std::invalid_argument("apply_sitewise: matrix dimension mismatch");
    const int d = s.d;
    parallel_for(s.sites(), [&](std::int64_t begin, std::int64_t end) {
        Vector v(d);
        for (std::int64_t site = begin; site < end; ++site) {
            Eigen::Map<Vector> fiber(&s.amps[static_cast<std::size_t>(site * d)], d);
            v.noalias() = m * fiber;
            fiber = v;
        }
    });
}

namespace detail {

inline int axis_extent_checked(const LatticeState& s, Axis axis, const std::string& where) {
    const int a = static_cast<int>(axis);
    if (a < 0 || a >= s.dims) throw std::invalid_argument(where + ": axis out of range for dims");
    return a;
}

}  // namespace detail

// Cyclic shift by one site along an axis: dir=+1 sends site x to x+1.
// A pure relabeling, so norms are preserved exactly.
inline LatticeState shift(const LatticeState& s, Axis axis, int dir) {
    if (s.rep != Rep::Position) throw std::invalid_argument("shift: position representation required");
    if (dir != 1 && dir != -1) throw std::invalid_argument("shift: dir must be +1 or -1");
    const int a = detail::axis_extent_checked(s, axis, "shift");
    LatticeState out = make_lattice_state(s.dims, s.n, s.d, s.rep);
    const int n = s.n;
    const int d = s.d;
    const int nz = (s.dims == 3) ? n : 1;
    const int ny = (s.dims == 3) ? n : 1;
    parallel_for(nz, [&](std::int64_t zb, std::int64_t ze) {
        for (int z = static_cast<int>(zb); z < static_cast<int>(ze); ++z) {
            for (int y = 0; y < ny; ++y) {
                for (int x = 0; x < n; ++x) {
                    int src[3] = {x, y, z};
                    src[a] = (src[a] - dir + n) % n;
                    const std::int64_t to = flat_site(s, x, y, z);
                    const std::int64_t from = flat_site(s, src[0], src[1], src[2]);
                    for (int c = 0; c < d; ++c) out.at(to, c) = s.at(from, c);
                }
            }
        }
    });
    return out;
}

// Reflection through the origin site, x -> -x on every axis. Self-inverse. In
// the momentum representation the same index map sends k to -k.
inline LatticeState parity_reflect(const LatticeState& s) {
    LatticeState out = make_lattice_state(s.dims, s.n, s.d, s.rep);
    const int n = s.n;
    const int d = s.d;
    const int nz = (s.dims == 3) ? n : 1;
    const int ny = (s.dims == 3) ? n : 1;
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < n; ++x) {
                const std::int64_t to = flat_site(s, x, y, z);
                const std::int64_t from =
                    flat_site(s, (n - x) % n, (n - y) % n, (n - z) % n);
                for (int c = 0; c < d; ++c) out.at(to, c) = s.at(from, c);
            }
    return out;
}

namespace detail {

// Runs the length-n transform along every axis line of every component.
inline void transform_lines(LatticeState& s, int sign) {
    const int n = s.n;
    const int d = s.d;
    const FftPlan plan(n, sign);
    for (int a = 0; a < s.dims; ++a) {
        std::int64_t stride = 1;
        for (int i = 0; i < a; ++i) stride *= n;
        // Base sites with coordinate 0 on axis a, spanning the other axes.
        std::vector<std::int64_t> bases;
        const int nz = (s.dims == 3) ? n : 1;
        const int ny = (s.dims == 3) ? n : 1;
        for (int z = 0; z < nz; ++z)
            for (int y = 0; y < ny; ++y)
                for (int x = 0; x < n; ++x) {
                    int coord[3] = {x, y, z};
                    if (coord[a] != 0) continue;
                    bases.push_back(flat_site(s, x, y, z));
                }
        const std::int64_t lines = static_cast<std::int64_t>(bases.size()) * d;
        parallel_for(lines, [&](std::int64_t begin, std::int64_t end) {
            std::vector<Complex> scratch(static_cast<std::size_t>(n));
            for (std::int64_t l = begin; l < end; ++l) {
                const std::int64_t base = bases[static_cast<std::size_t>(l / d)];
                const int c = static_cast<int>(l % d);
                for (int j = 0; j < n; ++j)
                    scratch[static_cast<std::size_t>(j)] = s.at(base + j * stride, c);
                plan.transform(scratch.data());
                for (int j = 0; j < n; ++j)
                    s.at(base + j * stride, c) = scratch[static_cast<std::size_t>(j)];
            }
        });
    }
    const double scale = std::pow(static_cast<double>(n), -0.5 * s.dims);
    for (Complex& a : s.amps) a *= scale;
}

}  // namespace detail

// Unitary map to momentum amplitudes psi~(k) = n^(-dims/2) sum_x e^{+i k.x} psi(x).
inline LatticeState to_momentum(const LatticeState& s) {
    if (s.rep != Rep::Position)
        throw std::invalid_argument("to_momentum: position representation required");
    LatticeState out = s;
    detail::transform_lines(out, +1);
    out.rep = Rep::Momentum;
    return out;
}

// Inverse of to_momentum.
inline LatticeState to_position(const LatticeState& s) {
    if (s.rep != Rep::Momentum)
        throw std::invalid_argument("to_position: momentum representation required");
    LatticeState out = s;
    detail::transform_lines(out, -1);
    out.rep = Rep::Position;
    return out;
}

// Unit-norm state concentrated on one site.
inline LatticeState delta_state(int dims, int n, std::array<int, 3> site, const Vector& spinor) {
    LatticeState s = make_lattice_state(dims, n, static_cast<int>(spinor.size()));
    for (int a = 0; a < dims; ++a)
        if (site[static_cast<std::size_t>(a)] < 0 || site[static_cast<std::size_t>(a)] >= n)
            throw std::invalid_argument("delta_state: site out of range");
    const double norm = spinor.norm();
    if (norm == 0.0) throw std::invalid_argument("delta_state: zero spinor");
    const std::int64_t flat = flat_site(s, site[0], (dims == 3) ? site[1] : 0, (dims == 3) ? site[2] : 0);
    for (int c = 0; c < s.d; ++c) s.at(flat, c) = spinor(c) / norm;
    return s;
}

// Exact grid plane wave. kbins are signed momentum indices per axis; the
// position amplitudes are exp(-i k . x) spinor / sqrt(n^dims).
inline LatticeState plane_wave(int dims, int n, std::array<int, 3> kbins, const Vector& spinor) {
    LatticeState s = make_lattice_state(dims, n, static_cast<int>(spinor.size()));
    const double norm = spinor.norm();
    if (norm == 0.0) throw std::invalid_argument("plane_wave: zero spinor");
    const Vector phi = spinor / norm;
    const int nz = (dims == 3) ? n : 1;
    const int ny = (dims == 3) ? n : 1;
    const double scale = std::pow(static_cast<double>(n), -0.5 * dims);
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < n; ++x) {
                long sum = static_cast<long>(kbins[0]) * x;
                if (dims == 3) sum += static_cast<long>(kbins[1]) * y + static_cast<long>(kbins[2]) * z;
                const double phase = -2.0 * std::numbers::pi * static_cast<double>(sum) / n;
                const Complex amp = std::polar(scale, phase);
                const std::int64_t site = flat_site(s, x, y, z);
                for (int c = 0; c < s.d; ++c) s.at(site, c) = amp * phi(c);
            }
    return s;
}

// Normalized Gaussian packet: envelope exp(-|x - center|^2 / (4 sigma^2))
// (minimum-image distances), carrier exp(-i k0 . x), constant spinor. Its
// momentum amplitudes peak at the grid momentum nearest +k0 with width
// approximately 1/(2 sigma).
inline LatticeState gaussian_packet(const WalkParams& p, std::array<double, 3> center, double sigma,
                                    std::array<double, 3> k0, const Vector& spinor) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_packet: sigma must be positive");
    const double snorm = spinor.norm();
    if (snorm == 0.0) throw std::invalid_argument("gaussian_packet: zero spinor");
    const Vector phi = spinor / snorm;
    LatticeState s = make_lattice_state(p.dims, p.n, static_cast<int>(spinor.size()));
    const double length = p.n * p.dx;
    const int nz = (p.dims == 3) ? p.n : 1;
    const int ny = (p.dims == 3) ? p.n : 1;
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < p.n; ++x) {
                const double coord[3] = {x * p.dx, y * p.dx, z * p.dx};
                double r2 = 0.0;
                double kdotx = 0.0;
                for (int a = 0; a < p.dims; ++a) {
                    const double rel = std::remainder(coord[a] - center[static_cast<std::size_t>(a)], length);
                    r2 += rel * rel;
                    kdotx += k0[static_cast<std::size_t>(a)] * coord[a];
                }
                const Complex amp = std::polar(std::exp(-r2 / (4.0 * sigma * sigma)), -kdotx);
                const std::int64_t site = flat_site(s, x, y, z);
                for (int c = 0; c < s.d; ++c) s.at(site, c) = amp * phi(c);
            }
    normalize(s);
    return s;
}

// Unit-norm state with independent Gaussian amplitudes, for property sweeps.
inline LatticeState random_lattice_state(int dims, int n, int d, std::mt19937_64& rng,
                                         Rep rep = Rep::Position) {
    LatticeState s = make_lattice_state(dims, n, d, rep);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (Complex& a : s.amps) a = Complex(gauss(rng), gauss(rng));
    normalize(s);
    return s;
}

}  // namespace qwalk

#pragma once

// Seeded random objects used by property tests and certification sweeps.
// Everything draws from a caller-owned std::mt19937_64 so runs are reproducible.

#include <cmath>
#include <random>

#include "qwalk/matrix.hpp"

namespace qwalk {

using Rng = std::mt19937_64;

// Haar-distributed unitary: QR of a complex Ginibre matrix with the R diagonal
// phase normalized.
inline Matrix random_unitary(int d, Rng& rng) {
    if (d < 1) throw std::invalid_argument("random_unitary: d must be positive");
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix z(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) z(i, j) = Complex(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < d; ++j) {
        const Complex rjj = r(j, j);
        const double mag = std::abs(rjj);
        q.col(j) *= (mag > 0.0) ? rjj / mag : Complex(1.0, 0.0);
    }
    return q;
}

// Uniform rotation in SO(3): QR of a real Gaussian matrix, determinant fixed to +1.
inline Eigen::Matrix3d random_rotation(Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::Matrix3d z;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) z(i, j) = gauss(rng);
    Eigen::HouseholderQR<Eigen::Matrix3d> qr(z);
    Eigen::Matrix3d q = qr.householderQ();
    const Eigen::Matrix3d r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < 3; ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    if (q.determinant() < 0.0) q.col(2) = -q.col(2);
    return q;
}

// Uniform direction on the unit sphere.
inline Eigen::Vector3d random_unit_vector(Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::Vector3d v;
    do {
        v = Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
    } while (v.norm() < 1e-12);
    return v.normalized();
}

// Unit-norm complex vector with Gaussian components.
inline Vector random_state_vector(int n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("random_state_vector: n must be positive");
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = Complex(gauss(rng), gauss(rng));
    const double norm = v.norm();
    if (norm == 0.0) return random_state_vector(n, rng);
    return v / norm;
}

}  // namespace qwalk

#pragma once

// Small dense complex matrices for internal (spin) spaces, plus the residual
// helpers every certification check is built on. Internal dimensions here are
// tiny (2..8), so exact-ish JacobiSVD is the right tool for operator norms.

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace qwalk {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Default certification tolerance, in operator norm.
inline constexpr double kDefaultTol = 1e-12;

inline Matrix identity(Eigen::Index d) { return Matrix::Identity(d, d); }

// Operator norm (largest singular value).
inline double operator_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }
inline Matrix anticommutator(const Matrix& a, const Matrix& b) { return a * b + b * a; }

inline void require_square(const Matrix& m, const std::string& name) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw std::invalid_argument(name + ": square matrix required");
}

// max(||M - M^dag||, ||M^2 - I||); zero iff M is a Hermitian involution.
inline double involution_residual(const Matrix& m) {
    require_square(m, "involution_residual");
    const double herm = operator_norm(Matrix(m - m.adjoint()));
    const double invo = operator_norm(Matrix(m * m - identity(m.rows())));
    return std::max(herm, invo);
}

inline bool is_hermitian_involution(const Matrix& m, double tol = kDefaultTol) {
    return involution_residual(m) <= tol;
}

// ||U U^dag - I||.
inline double unitarity_residual(const Matrix& u) {
    require_square(u, "unitarity_residual");
    return operator_norm(Matrix(u * u.adjoint() - identity(u.rows())));
}

// exp(i phi M) for a Hermitian involution M, via the closed form
// cos(phi) I + i sin(phi) M. The caller guarantees M^2 = I.
inline Matrix involution_phase_exp(double phi, const Matrix& m) {
    require_square(m, "involution_phase_exp");
    return std::cos(phi) * identity(m.rows()) + Complex(0.0, std::sin(phi)) * m;
}

// 2x2 constants. sigma(0..2) are the Pauli matrices x, y, z.
inline Matrix pauli(int i) {
    Matrix m(2, 2);
    switch (i) {
        case 0: m << 0, 1, 1, 0; break;
        case 1: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
        case 2: m << 1, 0, 0, -1; break;
        default: throw std::invalid_argument("pauli: index must be 0, 1, or 2");
    }
    return m;
}

}  // namespace qwalk

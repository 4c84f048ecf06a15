#pragma once

// Ground-field-generic dense linear algebra.
//
// Vectors and matrices are Eigen dynamic types parameterised by the ground
// field (Real or Complex). Inner products follow the Dirac convention:
// conjugate-linear in the first argument, so inner(u, v) = sum conj(u_i) v_i.
// Every function here is pure; values are never mutated in place.

#include <complex>
#include <concepts>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qsem {

using Real = double;
using Complex = std::complex<double>;

template <class F>
concept Field = std::same_as<F, Real> || std::same_as<F, Complex>;

template <Field F>
using Vector = Eigen::Matrix<F, Eigen::Dynamic, 1>;

template <Field F>
using Matrix = Eigen::Matrix<F, Eigen::Dynamic, Eigen::Dynamic>;

using RealVector = Vector<Real>;
using RealMatrix = Matrix<Real>;
using ComplexVector = Vector<Complex>;
using ComplexMatrix = Matrix<Complex>;

enum class FieldTag { kReal, kComplex };

template <Field F>
inline constexpr FieldTag kFieldTag =
    std::same_as<F, Real> ? FieldTag::kReal : FieldTag::kComplex;

// Default tolerances. Every operation that takes a tolerance accepts an
// override.
namespace tol {
inline constexpr double kOrthonormal = 1e-10;
inline constexpr double kResidual = 1e-9;
inline constexpr double kRank = 1e-8;
inline constexpr double kPsd = 1e-9;
}  // namespace tol

inline Real conj(Real x) noexcept { return x; }
inline Complex conj(Complex z) noexcept { return std::conj(z); }

template <Field F>
F inner(const Vector<F>& u, const Vector<F>& v);

// Entry (i, j) = u_i * conj(v_j).
template <Field F>
Matrix<F> outer(const Vector<F>& u, const Vector<F>& v);

template <Field F>
Matrix<F> adjoint(const Matrix<F>& m);

// Modified Gram-Schmidt with one reorthogonalisation pass. Vectors whose
// residual norm after both passes is <= tol are dropped; output order
// follows input order.
template <Field F>
std::vector<Vector<F>> gram_schmidt(std::span<const Vector<F>> vs,
                                    double tol = tol::kOrthonormal);

template <Field F>
struct HermitianEigen {
  Eigen::VectorXd values;  // ascending
  Matrix<F> vectors;       // column k pairs with values[k]
};

// Self-adjointness is checked as max |M_ij - conj(M_ji)| <= tol * max(1, max|M_ij|).
template <Field F>
bool is_hermitian(const Matrix<F>& m, double tol = tol::kOrthonormal);

template <Field F>
HermitianEigen<F> hermitian_eig(const Matrix<F>& m,
                                double tol = tol::kOrthonormal);

template <Field F>
struct Svd {
  Matrix<F> u;                     // m x r, orthonormal columns
  Eigen::VectorXd singular_values; // r = min(m, n), descending
  Matrix<F> v;                     // n x r, orthonormal columns
};

// Thin SVD with M = U * diag(sigma) * adjoint(V).
template <Field F>
Svd<F> svd(const Matrix<F>& m);

template <Field F>
Matrix<F> commutator(const Matrix<F>& a, const Matrix<F>& b);

template <Field F>
Matrix<F> identity(std::size_t n) {
  return Matrix<F>::Identity(static_cast<Eigen::Index>(n),
                             static_cast<Eigen::Index>(n));
}

// Kronecker product with row-major composite index (a * n + b).
template <Field F>
Matrix<F> kron(const Matrix<F>& a, const Matrix<F>& b);

template <Field F>
Vector<F> kron(const Vector<F>& a, const Vector<F>& b);

template <Field F>
Vector<F> basis_vector(std::size_t dim, std::size_t index) {
  Vector<F> e = Vector<F>::Zero(static_cast<Eigen::Index>(dim));
  e(static_cast<Eigen::Index>(index)) = F{1};
  return e;
}

// Largest absolute entry; the scale used by tolerance checks.
template <Field F>
double max_abs(const Matrix<F>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace qsem

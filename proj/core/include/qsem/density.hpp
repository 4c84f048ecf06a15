#pragma once

// Density matrices (mixed states), the Born rule, positivity, the Loewner
// order, graded hyponymy and partial traces.

#include <cstddef>
#include <span>

#include "qsem/numkernel.hpp"

namespace qsem::density {

// Self-adjoint, positive semidefinite, unit trace. Construction validates
// all three and throws InvalidArgument otherwise.
template <Field F>
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix<F> m, double tol = tol::kPsd);

  static DensityMatrix pure(const Vector<F>& psi);
  static DensityMatrix maximally_mixed(std::size_t dim);

  [[nodiscard]] const Matrix<F>& matrix() const noexcept { return matrix_; }
  [[nodiscard]] std::size_t dim() const noexcept {
    return static_cast<std::size_t>(matrix_.rows());
  }
  [[nodiscard]] double min_eigenvalue() const noexcept { return min_eig_; }

 private:
  Matrix<F> matrix_;
  double min_eig_ = 0.0;
};

template <Field F>
struct HyponymyReport {
  double grade = 0.0;    // k in [0, 1]
  double trace_e = 0.0;  // size of the error term
  Matrix<F> d;           // positive part of B - A
  Matrix<F> e;           // negative part of B - A, negated
};

// rho = sum_j (w_j / sum w) |psi_j><psi_j| with each psi_j normalised.
template <Field F>
DensityMatrix<F> from_ensemble(std::span<const double> weights,
                               std::span<const Vector<F>> states);

// |<phi|psi>|^2 for unit vectors.
template <Field F>
double born_probability(const Vector<F>& psi, const Vector<F>& phi,
                        double tol = tol::kRank);

template <Field F>
bool is_positive(const Matrix<F>& m, double tol = tol::kPsd);

// A <= B iff B - A is positive.
template <Field F>
bool loewner_leq(const Matrix<F>& a, const Matrix<F>& b, double tol = tol::kPsd);

// Splits B - A = D - E into positive and negative spectral parts so that
// A + D = B + E, and grades k = max(0, 1 - tr E).
template <Field F>
HyponymyReport<F> hyponymy_grade(const DensityMatrix<F>& a,
                                 const DensityMatrix<F>& b);

enum class Keep { kFirst, kSecond };

struct FactorDims {
  std::size_t first = 0;
  std::size_t second = 0;
};

// Composite index is row-major: idx = a * second + b.
template <Field F>
DensityMatrix<F> partial_trace(const DensityMatrix<F>& rho, FactorDims dims,
                               Keep keep);

// Uniform ensemble over the normalised context vectors.
template <Field F>
DensityMatrix<F> word_density(std::span<const Vector<F>> contexts);

template <Field F>
DensityMatrix<F> tensor_product(const DensityMatrix<F>& a,
                                const DensityMatrix<F>& b);

template <Field F>
double trace_real(const Matrix<F>& m) {
  return std::real(m.trace());
}

}  // namespace qsem::density

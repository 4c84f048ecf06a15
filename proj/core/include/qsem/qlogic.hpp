#pragma once

// Quantum logic of subspaces: meet, join, orthocomplement, projectors,
// inclusion and the conditional A' v (A ^ B).
//
// Subspaces are stored as orthonormal bases (ambient_dim x rank). The zero
// subspace has an empty basis. Projectors are derived on demand.

#include <cstddef>
#include <span>
#include <vector>

#include "qsem/numkernel.hpp"

namespace qsem::qlogic {

template <Field F>
class Subspace {
 public:
  static Subspace zero(std::size_t ambient_dim);
  static Subspace whole(std::size_t ambient_dim);
  // Columns must be orthonormal within tol::kOrthonormal.
  static Subspace from_orthonormal(Matrix<F> basis);

  [[nodiscard]] std::size_t ambient_dim() const noexcept { return ambient_dim_; }
  [[nodiscard]] std::size_t rank() const noexcept {
    return static_cast<std::size_t>(basis_.cols());
  }
  [[nodiscard]] bool is_zero() const noexcept { return rank() == 0; }
  [[nodiscard]] const Matrix<F>& basis() const noexcept { return basis_; }
  [[nodiscard]] std::vector<Vector<F>> basis_vectors() const;

 private:
  Subspace(std::size_t ambient_dim, Matrix<F> basis)
      : ambient_dim_(ambient_dim), basis_(std::move(basis)) {}

  std::size_t ambient_dim_;
  Matrix<F> basis_;
};

template <Field F>
class Projector {
 public:
  explicit Projector(Matrix<F> matrix) : matrix_(std::move(matrix)) {}

  [[nodiscard]] const Matrix<F>& matrix() const noexcept { return matrix_; }
  [[nodiscard]] std::size_t ambient_dim() const noexcept {
    return static_cast<std::size_t>(matrix_.rows());
  }
  [[nodiscard]] Vector<F> apply(const Vector<F>& v) const;
  [[nodiscard]] bool is_idempotent(double tol = tol::kResidual) const;
  [[nodiscard]] bool is_self_adjoint(double tol = tol::kOrthonormal) const;

 private:
  Matrix<F> matrix_;
};

// Orthonormal basis for the span of vs; residuals <= tol count as dependent.
template <Field F>
Subspace<F> span_of(std::size_t ambient_dim, std::span<const Vector<F>> vs,
                    double tol = tol::kRank);

template <Field F>
Subspace<F> join(const Subspace<F>& s, const Subspace<F>& t,
                 double tol = tol::kRank);

// complement(join(complement(s), complement(t))).
template <Field F>
Subspace<F> meet(const Subspace<F>& s, const Subspace<F>& t,
                 double tol = tol::kRank);

template <Field F>
Subspace<F> complement(const Subspace<F>& s);

template <Field F>
Projector<F> projector_of(const Subspace<F>& s);

// |P v|.
template <Field F>
double similarity(const Vector<F>& v, const Subspace<F>& s);

// s <= t iff |P_t P_s - P_s|_F <= tol.
template <Field F>
bool leq(const Subspace<F>& s, const Subspace<F>& t, double tol = tol::kRank);

template <Field F>
Subspace<F> conditional(const Subspace<F>& a, const Subspace<F>& b,
                        double tol = tol::kRank);

// a minus its projection onto span(negs).
template <Field F>
Vector<F> negate_vector(const Vector<F>& a, std::span<const Vector<F>> negs,
                        double tol = tol::kRank);

// Equality as projectors, max-entry difference <= tol.
template <Field F>
bool same_subspace(const Subspace<F>& s, const Subspace<F>& t,
                   double tol = tol::kResidual);

}  // namespace qsem::qlogic

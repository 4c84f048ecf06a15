#include "qsem/qlogic.hpp"

#include <string>

#include "qsem/errors.hpp"

namespace qsem::qlogic {

namespace {

template <Field F>
void require_same_ambient(const Subspace<F>& s, const Subspace<F>& t,
                          const char* op) {
  if (s.ambient_dim() != t.ambient_dim()) {
    throw DimensionError(std::string(op) + ": ambient dimension mismatch (" +
                         std::to_string(s.ambient_dim()) + " vs " +
                         std::to_string(t.ambient_dim()) + ")");
  }
}

}  // namespace

template <Field F>
Subspace<F> Subspace<F>::zero(std::size_t ambient_dim) {
  if (ambient_dim == 0) throw InvalidArgument("Subspace: ambient_dim must be > 0");
  return Subspace(ambient_dim, Matrix<F>(static_cast<Eigen::Index>(ambient_dim), 0));
}

template <Field F>
Subspace<F> Subspace<F>::whole(std::size_t ambient_dim) {
  if (ambient_dim == 0) throw InvalidArgument("Subspace: ambient_dim must be > 0");
  return Subspace(ambient_dim, identity<F>(ambient_dim));
}

template <Field F>
Subspace<F> Subspace<F>::from_orthonormal(Matrix<F> basis) {
  if (basis.rows() == 0) throw InvalidArgument("Subspace: ambient_dim must be > 0");
  const Matrix<F> gram = basis.adjoint() * basis;
  const Matrix<F> eye = Matrix<F>::Identity(gram.rows(), gram.cols());
  if (gram.size() > 0 && (gram - eye).cwiseAbs().maxCoeff() > tol::kOrthonormal) {
    throw InvalidArgument("Subspace: basis columns are not orthonormal");
  }
  const auto n = static_cast<std::size_t>(basis.rows());
  return Subspace(n, std::move(basis));
}

template <Field F>
std::vector<Vector<F>> Subspace<F>::basis_vectors() const {
  std::vector<Vector<F>> out;
  out.reserve(rank());
  for (Eigen::Index k = 0; k < basis_.cols(); ++k) out.push_back(basis_.col(k));
  return out;
}

template <Field F>
Vector<F> Projector<F>::apply(const Vector<F>& v) const {
  if (v.size() != matrix_.cols()) throw DimensionError("Projector::apply: dimension mismatch");
  return matrix_ * v;
}

template <Field F>
bool Projector<F>::is_idempotent(double tol) const {
  if (matrix_.size() == 0) return true;
  return ((matrix_ * matrix_) - matrix_).cwiseAbs().maxCoeff() <= tol;
}

template <Field F>
bool Projector<F>::is_self_adjoint(double tol) const {
  if (matrix_.size() == 0) return true;
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

template <Field F>
Subspace<F> span_of(std::size_t ambient_dim, std::span<const Vector<F>> vs,
                    double tol) {
  for (const auto& v : vs) {
    if (static_cast<std::size_t>(v.size()) != ambient_dim) {
      throw DimensionError("span: vector of dimension " + std::to_string(v.size()) +
                           " in ambient dimension " + std::to_string(ambient_dim));
    }
  }
  const auto q = gram_schmidt<F>(vs, tol);
  Matrix<F> basis(static_cast<Eigen::Index>(ambient_dim),
                  static_cast<Eigen::Index>(q.size()));
  for (std::size_t k = 0; k < q.size(); ++k) {
    basis.col(static_cast<Eigen::Index>(k)) = q[k];
  }
  return Subspace<F>::from_orthonormal(std::move(basis));
}

template <Field F>
Subspace<F> join(const Subspace<F>& s, const Subspace<F>& t, double tol) {
  require_same_ambient(s, t, "join");
  auto vs = s.basis_vectors();
  auto more = t.basis_vectors();
  vs.insert(vs.end(), more.begin(), more.end());
  return span_of<F>(s.ambient_dim(), vs, tol);
}

template <Field F>
Subspace<F> meet(const Subspace<F>& s, const Subspace<F>& t, double tol) {
  require_same_ambient(s, t, "meet");
  return complement(join(complement(s), complement(t), tol));
}

template <Field F>
Subspace<F> complement(const Subspace<F>& s) {
  const std::size_t n = s.ambient_dim();
  if (s.rank() == 0) return Subspace<F>::whole(n);
  if (s.rank() == n) return Subspace<F>::zero(n);
  // I - P is itself a projector: its eigenvalues are 0 or 1, and the
  // eigenvectors for 1 span the complement.
  const Matrix<F> q = identity<F>(n) - projector_of(s).matrix();
  const auto eig = hermitian_eig<F>(q, tol::kResidual);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    if (eig.values(k) > 0.5) keep.push_back(k);
  }
  Matrix<F> basis(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    basis.col(static_cast<Eigen::Index>(c)) = eig.vectors.col(keep[c]);
  }
  return Subspace<F>::from_orthonormal(std::move(basis));
}

template <Field F>
Projector<F> projector_of(const Subspace<F>& s) {
  return Projector<F>(s.basis() * s.basis().adjoint());
}

template <Field F>
double similarity(const Vector<F>& v, const Subspace<F>& s) {
  if (static_cast<std::size_t>(v.size()) != s.ambient_dim()) {
    throw DimensionError("similarity: dimension mismatch");
  }
  if (s.is_zero()) return 0.0;
  // |P v| = |B^H v| for orthonormal B.
  return (s.basis().adjoint() * v).norm();
}

template <Field F>
bool leq(const Subspace<F>& s, const Subspace<F>& t, double tol) {
  require_same_ambient(s, t, "leq");
  const Matrix<F> ps = projector_of(s).matrix();
  const Matrix<F> pt = projector_of(t).matrix();
  return (pt * ps - ps).norm() <= tol;
}

template <Field F>
Subspace<F> conditional(const Subspace<F>& a, const Subspace<F>& b, double tol) {
  require_same_ambient(a, b, "conditional");
  return join(complement(a), meet(a, b, tol), tol);
}

template <Field F>
Vector<F> negate_vector(const Vector<F>& a, std::span<const Vector<F>> negs,
                        double tol) {
  if (negs.empty()) return a;
  const auto n = span_of<F>(static_cast<std::size_t>(a.size()), negs, tol);
  if (n.is_zero()) return a;
  // Two projection passes keep the residual orthogonal to machine precision.
  Vector<F> r = a - n.basis() * (n.basis().adjoint() * a);
  r -= n.basis() * (n.basis().adjoint() * r);
  return r;
}

template <Field F>
bool same_subspace(const Subspace<F>& s, const Subspace<F>& t, double tol) {
  if (s.ambient_dim() != t.ambient_dim()) return false;
  if (s.rank() != t.rank()) return false;
  const Matrix<F> diff = projector_of(s).matrix() - projector_of(t).matrix();
  return diff.size() == 0 || diff.cwiseAbs().maxCoeff() <= tol;
}

#define QSEM_INSTANTIATE(F)                                                        \
  template class Subspace<F>;                                                      \
  template class Projector<F>;                                                     \
  template Subspace<F> span_of<F>(std::size_t, std::span<const Vector<F>>, double);\
  template Subspace<F> join<F>(const Subspace<F>&, const Subspace<F>&, double);    \
  template Subspace<F> meet<F>(const Subspace<F>&, const Subspace<F>&, double);    \
  template Subspace<F> complement<F>(const Subspace<F>&);                          \
  template Projector<F> projector_of<F>(const Subspace<F>&);                       \
  template double similarity<F>(const Vector<F>&, const Subspace<F>&);             \
  template bool leq<F>(const Subspace<F>&, const Subspace<F>&, double);            \
  template Subspace<F> conditional<F>(const Subspace<F>&, const Subspace<F>&,      \
                                      double);                                     \
  template Vector<F> negate_vector<F>(const Vector<F>&, std::span<const Vector<F>>,\
                                      double);                                     \
  template bool same_subspace<F>(const Subspace<F>&, const Subspace<F>&, double);

QSEM_INSTANTIATE(Real)
QSEM_INSTANTIATE(Complex)

#undef QSEM_INSTANTIATE

}  // namespace qsem::qlogic

#include "qsem/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qsem/errors.hpp"

namespace qsem {

namespace {

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* op) {
  if (a != b) {
    throw DimensionError(std::string(op) + ": dimension mismatch (" +
                         std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

void require_square(Eigen::Index rows, Eigen::Index cols, const char* op) {
  if (rows != cols) {
    throw DimensionError(std::string(op) + ": matrix is not square (" +
                         std::to_string(rows) + "x" + std::to_string(cols) +
                         ")");
  }
}

}  // namespace

template <Field F>
F inner(const Vector<F>& u, const Vector<F>& v) {
  require_same_dim(u.size(), v.size(), "inner");
  // Eigen's dot conjugates its left operand.
  return u.dot(v);
}

template <Field F>
Matrix<F> outer(const Vector<F>& u, const Vector<F>& v) {
  return u * v.adjoint();
}

template <Field F>
Matrix<F> adjoint(const Matrix<F>& m) {
  return m.adjoint();
}

template <Field F>
std::vector<Vector<F>> gram_schmidt(std::span<const Vector<F>> vs, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("gram_schmidt: tol must be > 0");
  std::vector<Vector<F>> basis;
  if (vs.empty()) return basis;
  const Eigen::Index dim = vs.front().size();
  for (const auto& v : vs) {
    require_same_dim(dim, v.size(), "gram_schmidt");
    Vector<F> r = v;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) r -= q.dot(r) * q;
    }
    const double norm = r.norm();
    if (norm <= tol) continue;
    basis.push_back(r / norm);
  }
  return basis;
}

template <Field F>
bool is_hermitian(const Matrix<F>& m, double tol) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  const double scale = std::max(1.0, max_abs<F>(m));
  const Matrix<F> diff = m - m.adjoint();
  return diff.cwiseAbs().maxCoeff() <= tol * scale;
}

template <Field F>
HermitianEigen<F> hermitian_eig(const Matrix<F>& m, double tol) {
  require_square(m.rows(), m.cols(), "hermitian_eig");
  if (!is_hermitian<F>(m, tol)) {
    throw InvalidArgument("hermitian_eig: matrix is not self-adjoint");
  }
  if (m.size() == 0) return {Eigen::VectorXd(0), Matrix<F>(0, 0)};
  const Matrix<F> sym = (m + m.adjoint()) / F{2};
  Eigen::SelfAdjointEigenSolver<Matrix<F>> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericError("hermitian_eig: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

template <Field F>
Svd<F> svd(const Matrix<F>& m) {
  const Eigen::Index r = std::min(m.rows(), m.cols());
  if (r == 0) {
    return {Matrix<F>(m.rows(), 0), Eigen::VectorXd(0), Matrix<F>(m.cols(), 0)};
  }
  Eigen::BDCSVD<Matrix<F>> solver(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

template <Field F>
Matrix<F> commutator(const Matrix<F>& a, const Matrix<F>& b) {
  require_square(a.rows(), a.cols(), "commutator");
  require_square(b.rows(), b.cols(), "commutator");
  require_same_dim(a.rows(), b.rows(), "commutator");
  return a * b - b * a;
}

template <Field F>
Matrix<F> kron(const Matrix<F>& a, const Matrix<F>& b) {
  Matrix<F> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

template <Field F>
Vector<F> kron(const Vector<F>& a, const Vector<F>& b) {
  Vector<F> out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

#define QSEM_INSTANTIATE(F)                                                   \
  template F inner<F>(const Vector<F>&, const Vector<F>&);                    \
  template Matrix<F> outer<F>(const Vector<F>&, const Vector<F>&);            \
  template Matrix<F> adjoint<F>(const Matrix<F>&);                            \
  template std::vector<Vector<F>> gram_schmidt<F>(std::span<const Vector<F>>, \
                                                  double);                    \
  template bool is_hermitian<F>(const Matrix<F>&, double);                    \
  template HermitianEigen<F> hermitian_eig<F>(const Matrix<F>&, double);      \
  template Svd<F> svd<F>(const Matrix<F>&);                                   \
  template Matrix<F> commutator<F>(const Matrix<F>&, const Matrix<F>&);       \
  template Matrix<F> kron<F>(const Matrix<F>&, const Matrix<F>&);             \
  template Vector<F> kron<F>(const Vector<F>&, const Vector<F>&);

QSEM_INSTANTIATE(Real)
QSEM_INSTANTIATE(Complex)

#undef QSEM_INSTANTIATE

}  // namespace qsem

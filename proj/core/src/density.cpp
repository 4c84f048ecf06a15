#include "qsem/density.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qsem/errors.hpp"

namespace qsem::density {

template <Field F>
DensityMatrix<F>::DensityMatrix(Matrix<F> m, double tol) : matrix_(std::move(m)) {
  if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols()) {
    throw InvalidArgument("DensityMatrix: matrix must be square and non-empty");
  }
  if (!is_hermitian<F>(matrix_, tol::kOrthonormal)) {
    throw InvalidArgument("DensityMatrix: matrix is not self-adjoint");
  }
  const F tr = matrix_.trace();
  if (std::abs(tr - F{1}) > tol) {
    throw InvalidArgument("DensityMatrix: trace is " + std::to_string(std::real(tr)) +
                          ", expected 1");
  }
  min_eig_ = hermitian_eig<F>(matrix_, tol::kOrthonormal).values(0);
  if (min_eig_ < -tol) {
    throw InvalidArgument("DensityMatrix: not positive semidefinite (min eigenvalue " +
                          std::to_string(min_eig_) + ")");
  }
}

template <Field F>
DensityMatrix<F> DensityMatrix<F>::pure(const Vector<F>& psi) {
  const double norm = psi.norm();
  if (psi.size() == 0 || norm == 0.0) {
    throw InvalidArgument("DensityMatrix::pure: zero state");
  }
  const Vector<F> unit = psi / norm;
  return DensityMatrix(outer<F>(unit, unit));
}

template <Field F>
DensityMatrix<F> DensityMatrix<F>::maximally_mixed(std::size_t dim) {
  if (dim == 0) throw InvalidArgument("DensityMatrix: dim must be > 0");
  return DensityMatrix(identity<F>(dim) / F(static_cast<double>(dim)));
}

template <Field F>
DensityMatrix<F> from_ensemble(std::span<const double> weights,
                               std::span<const Vector<F>> states) {
  if (states.empty()) throw InvalidArgument("from_ensemble: empty ensemble");
  if (weights.size() != states.size()) {
    throw InvalidArgument("from_ensemble: weights and states differ in length");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidArgument("from_ensemble: negative weight");
    total += w;
  }
  if (!(total > 0.0)) throw InvalidArgument("from_ensemble: weights sum to zero");
  const Eigen::Index n = states.front().size();
  Matrix<F> rho = Matrix<F>::Zero(n, n);
  for (std::size_t j = 0; j < states.size(); ++j) {
    if (states[j].size() != n) throw DimensionError("from_ensemble: mixed dimensions");
    const double norm = states[j].norm();
    if (norm == 0.0) throw InvalidArgument("from_ensemble: zero state vector");
    const Vector<F> unit = states[j] / norm;
    rho += F(weights[j] / total) * outer<F>(unit, unit);
  }
  return DensityMatrix<F>(std::move(rho));
}

template <Field F>
double born_probability(const Vector<F>& psi, const Vector<F>& phi, double tol) {
  if (std::abs(psi.norm() - 1.0) > tol || std::abs(phi.norm() - 1.0) > tol) {
    throw InvalidArgument("born_probability: inputs must be unit vectors");
  }
  const double p = std::norm(inner<F>(phi, psi));
  return std::clamp(p, 0.0, 1.0);
}

template <Field F>
bool is_positive(const Matrix<F>& m, double tol) {
  if (m.rows() != m.cols()) throw DimensionError("is_positive: matrix is not square");
  if (!is_hermitian<F>(m, std::max(tol, tol::kOrthonormal))) {
    throw InvalidArgument("is_positive: matrix is not self-adjoint");
  }
  if (m.size() == 0) return true;
  return hermitian_eig<F>(m, std::max(tol, tol::kOrthonormal)).values(0) >= -tol;
}

template <Field F>
bool loewner_leq(const Matrix<F>& a, const Matrix<F>& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("loewner_leq: shape mismatch");
  }
  return is_positive<F>(b - a, tol);
}

template <Field F>
HyponymyReport<F> hyponymy_grade(const DensityMatrix<F>& a,
                                 const DensityMatrix<F>& b) {
  if (a.dim() != b.dim()) throw DimensionError("hyponymy_grade: dimension mismatch");
  const auto eig = hermitian_eig<F>(b.matrix() - a.matrix(), tol::kOrthonormal);
  const auto n = static_cast<Eigen::Index>(a.dim());
  HyponymyReport<F> report;
  report.d = Matrix<F>::Zero(n, n);
  report.e = Matrix<F>::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double lambda = eig.values(k);
    const Vector<F> v = eig.vectors.col(k);
    if (lambda > 0.0) {
      report.d += F(lambda) * outer<F>(v, v);
    } else if (lambda < 0.0) {
      report.e += F(-lambda) * outer<F>(v, v);
      report.trace_e += -lambda;
    }
  }
  report.grade = std::clamp(1.0 - report.trace_e, 0.0, 1.0);
  return report;
}

template <Field F>
DensityMatrix<F> partial_trace(const DensityMatrix<F>& rho, FactorDims dims,
                               Keep keep) {
  const std::size_t m = dims.first;
  const std::size_t n = dims.second;
  if (m == 0 || n == 0 || m * n != rho.dim()) {
    throw DimensionError("partial_trace: dimension " + std::to_string(rho.dim()) +
                         " does not factor as " + std::to_string(m) + "x" +
                         std::to_string(n));
  }
  const auto& r = rho.matrix();
  const auto mi = static_cast<Eigen::Index>(m);
  const auto ni = static_cast<Eigen::Index>(n);
  Matrix<F> out;
  if (keep == Keep::kFirst) {
    out = Matrix<F>::Zero(mi, mi);
    for (Eigen::Index a = 0; a < mi; ++a)
      for (Eigen::Index a2 = 0; a2 < mi; ++a2)
        for (Eigen::Index b = 0; b < ni; ++b) out(a, a2) += r(a * ni + b, a2 * ni + b);
  } else {
    out = Matrix<F>::Zero(ni, ni);
    for (Eigen::Index b = 0; b < ni; ++b)
      for (Eigen::Index b2 = 0; b2 < ni; ++b2)
        for (Eigen::Index a = 0; a < mi; ++a) out(b, b2) += r(a * ni + b, a * ni + b2);
  }
  return DensityMatrix<F>(std::move(out));
}

template <Field F>
DensityMatrix<F> word_density(std::span<const Vector<F>> contexts) {
  if (contexts.empty()) throw InvalidArgument("word_density: empty context list");
  const std::vector<double> weights(contexts.size(), 1.0);
  return from_ensemble<F>(weights, contexts);
}

template <Field F>
DensityMatrix<F> tensor_product(const DensityMatrix<F>& a, const DensityMatrix<F>& b) {
  return DensityMatrix<F>(kron<F>(a.matrix(), b.matrix()));
}

#define QSEM_INSTANTIATE(F)                                                          \
  template class DensityMatrix<F>;                                                   \
  template DensityMatrix<F> from_ensemble<F>(std::span<const double>,                \
                                             std::span<const Vector<F>>);            \
  template double born_probability<F>(const Vector<F>&, const Vector<F>&, double);   \
  template bool is_positive<F>(const Matrix<F>&, double);                            \
  template bool loewner_leq<F>(const Matrix<F>&, const Matrix<F>&, double);          \
  template HyponymyReport<F> hyponymy_grade<F>(const DensityMatrix<F>&,              \
                                               const DensityMatrix<F>&);             \
  template DensityMatrix<F> partial_trace<F>(const DensityMatrix<F>&, FactorDims,    \
                                             Keep);                                  \
  template DensityMatrix<F> word_density<F>(std::span<const Vector<F>>);             \
  template DensityMatrix<F> tensor_product<F>(const DensityMatrix<F>&,               \
                                              const DensityMatrix<F>&);

QSEM_INSTANTIATE(Real)
QSEM_INSTANTIATE(Complex)

#undef QSEM_INSTANTIATE

}  // namespace qsem::density

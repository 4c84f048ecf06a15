#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "qsem/errors.hpp"
#include "qsem/numkernel.hpp"
#include "test_util.hpp"

namespace qsem {
namespace {

using testing::random_hermitian;
using testing::random_matrix;
using testing::random_vector;

RealVector rv(std::initializer_list<double> xs) {
  RealVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

TEST(Inner, ThreeVectorExample) {
  EXPECT_EQ(inner<Real>(rv({1, 0, -2}), rv({2, -1, 3})), -4.0);
}

TEST(Inner, OrthogonalBasisVectors) {
  EXPECT_EQ(inner<Real>(basis_vector<Real>(3, 0), basis_vector<Real>(3, 1)), 0.0);
}

TEST(Inner, ProjectionOfDiagonal) {
  const double h = std::sqrt(2.0) / 2.0;
  EXPECT_NEAR(inner<Real>(rv({h, h}), rv({1, 0})), h, 1e-15);
}

TEST(Inner, ConjugateLinearInFirstArgument) {
  ComplexVector u(2), v(2);
  u << Complex(0, 1), Complex(1, 0);
  v << Complex(1, 0), Complex(0, 0);
  // conj(i) * 1 = -i
  EXPECT_EQ(inner<Complex>(u, v), Complex(0, -1));
}

TEST(Inner, DimensionMismatchThrows) {
  EXPECT_THROW(inner<Real>(rv({1, 2}), rv({1, 2, 3})), DimensionError);
}

template <class F>
class FieldTest : public ::testing::Test {};
using Fields = ::testing::Types<Real, Complex>;
TYPED_TEST_SUITE(FieldTest, Fields);

TYPED_TEST(FieldTest, ConjugateSymmetry) {
  using F = TypeParam;
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = testing::random_index(1, 10);
    const Vector<F> u = random_vector<F>(n);
    const Vector<F> v = random_vector<F>(n);
    EXPECT_LE(std::abs(inner<F>(u, v) - conj(inner<F>(v, u))), 1e-12);
  }
}

TYPED_TEST(FieldTest, TraceOfOuterIsInner) {
  using F = TypeParam;
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = testing::random_index(1, 8);
    const Vector<F> u = random_vector<F>(n);
    const Vector<F> v = random_vector<F>(n);
    EXPECT_LE(std::abs(outer<F>(u, v).trace() - inner<F>(v, u)), 1e-12);
  }
}

TYPED_TEST(FieldTest, AdjointInvolutionAndProductRule) {
  using F = TypeParam;
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix<F> a = random_matrix<F>(3, 4);
    const Matrix<F> b = random_matrix<F>(4, 2);
    EXPECT_EQ(adjoint<F>(adjoint<F>(a)), a);
    EXPECT_LE(max_abs<F>(adjoint<F>(a * b) - adjoint<F>(b) * adjoint<F>(a)), 1e-12);
  }
}

TYPED_TEST(FieldTest, EigenReconstruction) {
  using F = TypeParam;
  for (std::size_t n = 1; n <= 16; ++n) {
    const Matrix<F> m = random_hermitian<F>(n);
    const auto eig = hermitian_eig<F>(m);
    Matrix<F> rebuilt = Matrix<F>::Zero(m.rows(), m.cols());
    for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
      const Vector<F> vk = eig.vectors.col(k);
      rebuilt += eig.values(k) * outer<F>(vk, vk);
      EXPECT_LE((m * vk - eig.values(k) * vk).norm(), 1e-9 * m.norm());
    }
    EXPECT_LE(max_abs<F>(rebuilt - m), 1e-9 * m.norm());
    const Matrix<F> gram = eig.vectors.adjoint() * eig.vectors;
    EXPECT_LE(max_abs<F>(gram - identity<F>(n)), 1e-10);
    for (Eigen::Index k = 1; k < eig.values.size(); ++k) {
      EXPECT_LE(eig.values(k - 1), eig.values(k));
    }
  }
}

TYPED_TEST(FieldTest, GramSchmidtRandom) {
  using F = TypeParam;
  std::vector<Vector<F>> vs;
  for (int i = 0; i < 3; ++i) vs.push_back(random_vector<F>(5));
  const auto q = gram_schmidt<F>(vs);
  ASSERT_EQ(q.size(), 3u);
  Matrix<F> qm(5, 3);
  for (int i = 0; i < 3; ++i) qm.col(i) = q[static_cast<std::size_t>(i)];
  EXPECT_LE(max_abs<F>(Matrix<F>(qm.adjoint() * qm) - identity<F>(3)), 1e-10);
  // Same span: every input is reproduced by its projection onto Q.
  for (const auto& v : vs) EXPECT_LE((qm * (qm.adjoint() * v) - v).norm(), 1e-10 * v.norm());
}

TYPED_TEST(FieldTest, SvdReconstruction) {
  using F = TypeParam;
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix<F> m = random_matrix<F>(testing::random_index(1, 6), testing::random_index(1, 6));
    const auto s = svd<F>(m);
    const Matrix<F> rebuilt = s.u * s.singular_values.template cast<F>().asDiagonal() * s.v.adjoint();
    EXPECT_LE(max_abs<F>(rebuilt - m), 1e-9 * m.norm());
    const auto r = s.singular_values.size();
    EXPECT_LE(max_abs<F>(Matrix<F>(s.u.adjoint() * s.u) - identity<F>(static_cast<std::size_t>(r))),
              1e-10);
    EXPECT_LE(max_abs<F>(Matrix<F>(s.v.adjoint() * s.v) - identity<F>(static_cast<std::size_t>(r))),
              1e-10);
  }
}

TYPED_TEST(FieldTest, SvdOfPsdMatchesEigenvalues) {
  using F = TypeParam;
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = testing::random_index(1, 8);
    const Matrix<F> a = random_matrix<F>(n, n);
    const Matrix<F> psd = (a * a.adjoint() + (a * a.adjoint()).adjoint()) / 2.0;
    const auto eig = hermitian_eig<F>(psd);
    const auto s = svd<F>(psd);
    for (Eigen::Index k = 0; k < s.singular_values.size(); ++k) {
      // eigenvalues ascending, singular values descending
      EXPECT_NEAR(s.singular_values(k), eig.values(eig.values.size() - 1 - k), 1e-9 * psd.norm());
    }
  }
}

TEST(Outer, ThreeByThreeExample) {
  RealMatrix expected(3, 3);
  expected << 2, -1, 3, 0, 0, 0, -4, 2, -6;
  EXPECT_EQ(outer<Real>(rv({1, 0, -2}), rv({2, -1, 3})), expected);
}

TEST(Outer, AxisProjector) {
  RealMatrix expected(2, 2);
  expected << 1, 0, 0, 0;
  EXPECT_EQ(outer<Real>(rv({1, 0}), rv({1, 0})), expected);
}

TEST(Outer, ZeroVector) {
  EXPECT_EQ(outer<Real>(RealVector::Zero(3), rv({1, 2})), RealMatrix::Zero(3, 2));
}

TEST(Outer, ConjugatesSecondFactor) {
  ComplexVector u(1), v(1);
  u << Complex(1, 0);
  v << Complex(0, 1);
  EXPECT_EQ(outer<Complex>(u, v)(0, 0), Complex(0, -1));
}

TEST(Adjoint, Examples) {
  RealMatrix sym(2, 2);
  sym << 1, 2, 2, 5;
  EXPECT_EQ(adjoint<Real>(sym), sym);

  ComplexMatrix m(2, 2);
  m << Complex(0, 0), Complex(0, 1), Complex(0, 0), Complex(0, 0);
  ComplexMatrix expected(2, 2);
  expected << Complex(0, 0), Complex(0, 0), Complex(0, -1), Complex(0, 0);
  EXPECT_EQ(adjoint<Complex>(m), expected);

  EXPECT_EQ(adjoint<Real>(identity<Real>(3)), identity<Real>(3));
}

TEST(GramSchmidt, OrthonormalInputPreserved) {
  const std::vector<RealVector> vs{basis_vector<Real>(3, 0), basis_vector<Real>(3, 1)};
  const auto q = gram_schmidt<Real>(vs);
  ASSERT_EQ(q.size(), 2u);
  EXPECT_LE((q[0] - vs[0]).norm(), 1e-15);
  EXPECT_LE((q[1] - vs[1]).norm(), 1e-15);
}

TEST(GramSchmidt, DependentDuplicateDropped) {
  const RealVector v = rv({1, 2, 2});
  const std::vector<RealVector> vs{v, 2.0 * v};
  const auto q = gram_schmidt<Real>(vs);
  ASSERT_EQ(q.size(), 1u);
  EXPECT_LE((q[0] - v / 3.0).norm(), 1e-15);
}

TEST(GramSchmidt, EmptyInput) {
  EXPECT_TRUE(gram_schmidt<Real>(std::vector<RealVector>{}).empty());
}

TEST(GramSchmidt, MixedDimensionsThrow) {
  const std::vector<RealVector> vs{rv({1, 0}), rv({1, 0, 0})};
  EXPECT_THROW(gram_schmidt<Real>(vs), DimensionError);
}

TEST(HermitianEig, Examples) {
  RealMatrix d = RealMatrix::Zero(3, 3);
  d.diagonal() << 3, 1, 2;
  auto eig = hermitian_eig<Real>(d);
  EXPECT_NEAR(eig.values(0), 1, 1e-14);
  EXPECT_NEAR(eig.values(1), 2, 1e-14);
  EXPECT_NEAR(eig.values(2), 3, 1e-14);

  RealMatrix x(2, 2);
  x << 0, 1, 1, 0;
  eig = hermitian_eig<Real>(x);
  EXPECT_NEAR(eig.values(0), -1, 1e-14);
  EXPECT_NEAR(eig.values(1), 1, 1e-14);

  eig = hermitian_eig<Real>(identity<Real>(4));
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(eig.values(k), 1, 1e-14);
}

TEST(HermitianEig, RejectsNonHermitianAndNonSquare) {
  RealMatrix m(2, 2);
  m << 0, 1, 0, 0;
  EXPECT_THROW(hermitian_eig<Real>(m), InvalidArgument);
  EXPECT_THROW(hermitian_eig<Real>(RealMatrix::Zero(2, 3)), DimensionError);
}

TEST(Svd, RankOneOuterProduct) {
  const RealMatrix m = outer<Real>(rv({1, 2, 3}), rv({-1, 0.5}));
  const auto s = svd<Real>(m);
  int above = 0;
  for (Eigen::Index k = 0; k < s.singular_values.size(); ++k) {
    if (s.singular_values(k) > 1e-10) ++above;
  }
  EXPECT_EQ(above, 1);
}

TEST(Svd, Diagonal) {
  RealMatrix d = RealMatrix::Zero(2, 2);
  d.diagonal() << 2, 1;
  const auto s = svd<Real>(d);
  EXPECT_NEAR(s.singular_values(0), 2, 1e-14);
  EXPECT_NEAR(s.singular_values(1), 1, 1e-14);
}

TEST(Commutator, Examples) {
  const RealMatrix a = random_matrix<Real>(3, 3);
  EXPECT_EQ(commutator<Real>(a, a), RealMatrix::Zero(3, 3));

  RealMatrix d1 = RealMatrix::Zero(3, 3), d2 = RealMatrix::Zero(3, 3);
  d1.diagonal() << 1, 2, 3;
  d2.diagonal() << -4, 5, 0.5;
  EXPECT_EQ(commutator<Real>(d1, d2), RealMatrix::Zero(3, 3));

  RealMatrix x(2, 2), z(2, 2), expected(2, 2);
  x << 0, 1, 1, 0;
  z << 1, 0, 0, -1;
  // XZ = ((0,-1),(1,0)), ZX = ((0,1),(-1,0))
  expected << 0, -2, 2, 0;
  EXPECT_EQ(commutator<Real>(x, z), expected);
}

TEST(Commutator, ShapeMismatchThrows) {
  EXPECT_THROW(commutator<Real>(RealMatrix::Zero(2, 2), RealMatrix::Zero(3, 3)), DimensionError);
  EXPECT_THROW(commutator<Real>(RealMatrix::Zero(2, 3), RealMatrix::Zero(2, 3)), DimensionError);
}

TEST(Kron, RowMajorCompositeIndex) {
  const RealVector a = rv({1, 2});
  const RealVector b = rv({3, 5, 7});
  const RealVector k = kron<Real>(a, b);
  ASSERT_EQ(k.size(), 6);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_EQ(k(i * 3 + j), a(i) * b(j));
  }
}

}  // namespace
}  // namespace qsem

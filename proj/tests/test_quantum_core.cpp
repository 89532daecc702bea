#include <array>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "cavphase/quantum_core.hpp"

namespace cavphase {
namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = {d(rng), d(rng)};
  return m;
}

TEST(SpaceLayout, DigitsRoundTripRowMajor) {
  const SpaceLayout layout({2, 4, 3});
  EXPECT_EQ(layout.total_dim(), 24);
  EXPECT_EQ(layout.stride(0), 12);
  EXPECT_EQ(layout.stride(1), 3);
  EXPECT_EQ(layout.stride(2), 1);
  for (Eigen::Index i = 0; i < layout.total_dim(); ++i) {
    const std::vector<int> d = layout.digits(i);
    EXPECT_EQ(layout.index(d), i);
    EXPECT_EQ(d[0] * 12 + d[1] * 3 + d[2], i);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(layout.digit(i, k), d[k]);
  }
}

TEST(SpaceLayout, RejectsBadDims) {
  EXPECT_THROW(SpaceLayout({2, 0}), std::invalid_argument);
}

TEST(Annihilation, TruncatedLadder) {
  const Matrix a2 = annihilation(2);
  EXPECT_EQ(a2.rows(), 2);
  EXPECT_EQ(a2(0, 1), Complex(1.0));
  EXPECT_EQ(a2(0, 0), Complex(0.0));
  EXPECT_EQ(a2(1, 0), Complex(0.0));
  EXPECT_EQ(a2(1, 1), Complex(0.0));

  const Matrix a3 = annihilation(3);
  EXPECT_NEAR(a3(0, 1).real(), 1.0, 1e-15);
  EXPECT_NEAR(a3(1, 2).real(), std::sqrt(2.0), 1e-15);
  EXPECT_EQ((a3.array() != Complex(0.0)).count(), 2);

  const Matrix number = a2.adjoint() * a2;
  Vector one(2);
  one << 0.0, 1.0;
  EXPECT_NEAR((number * one - one).norm(), 0.0, 1e-15);
}

TEST(Embed, IdentityStaysIdentity) {
  const SpaceLayout layout({2, 4, 4});
  for (std::size_t k = 0; k < 3; ++k) {
    const Operator e = embed(Matrix::Identity(layout.dim(k), layout.dim(k)), k, layout);
    EXPECT_EQ(e.matrix(), Matrix::Identity(32, 32));
  }
}

TEST(Embed, TransitionMatchesIndexArithmetic) {
  const SpaceLayout layout({2, 4});
  const Operator e = embed(transition(4, 2, 3), 1, layout);
  EXPECT_EQ((e.matrix().array() != Complex(0.0)).count(), 2);
  for (int c = 0; c < 2; ++c) EXPECT_EQ(e.matrix()(c * 4 + 2, c * 4 + 3), Complex(1.0));
}

TEST(Embed, CavityLoweringOnVacuumTarget) {
  const SpaceLayout layout({2, 4});
  const std::array<int, 2> in{1, 0}, out{0, 0};
  const StateVector psi = embed(annihilation(2), 0, layout).apply(basis_state(layout, in));
  EXPECT_NEAR((psi.amplitudes() - basis_state(layout, out).amplitudes()).norm(), 0.0, 1e-15);
}

TEST(Embed, MatchesKroneckerProducts) {
  std::mt19937_64 rng(7);
  const SpaceLayout layout({2, 3, 2});
  const Matrix a = random_matrix(3, 3, rng);
  const Matrix expected = kron(kron(Matrix::Identity(2, 2), a), Matrix::Identity(2, 2));
  EXPECT_NEAR((embed(a, 1, layout).matrix() - expected).norm(), 0.0, 1e-13);

  const Matrix x = random_matrix(2, 2, rng), y = random_matrix(3, 3, rng);
  const Matrix kxy = kron(x, y);
  ASSERT_EQ(kxy.rows(), 6);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) EXPECT_EQ(kxy(i * 3 + k, j * 3 + l), x(i, j) * y(k, l));
}

// Multi-subsystem embedding against a direct element-by-element definition.
TEST(Embed, NonAdjacentSubsystemsInGivenOrder) {
  std::mt19937_64 rng(11);
  const SpaceLayout layout({2, 3, 4, 2});
  const std::array<std::size_t, 2> subs{3, 1};  // local basis row-major over (sub 3, sub 1)
  const Matrix local = random_matrix(6, 6, rng);
  const Operator e = embed(local, subs, layout);
  const Eigen::Index d = layout.total_dim();
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const auto di = layout.digits(i), dj = layout.digits(j);
      Complex expected = 0.0;
      if (di[0] == dj[0] && di[2] == dj[2]) {
        expected = local(di[3] * 3 + di[1], dj[3] * 3 + dj[1]);
      }
      ASSERT_EQ(e.matrix()(i, j), expected) << i << "," << j;
    }
  }
}

TEST(ApplyLocal, MatchesEmbeddedProduct) {
  std::mt19937_64 rng(13);
  const SpaceLayout layout({3, 4, 4, 2});
  for (const std::vector<std::size_t>& subs :
       {std::vector<std::size_t>{0}, std::vector<std::size_t>{2}, std::vector<std::size_t>{0, 3},
        std::vector<std::size_t>{2, 0}, std::vector<std::size_t>{1, 2, 3}}) {
    Eigen::Index ld = 1;
    for (std::size_t s : subs) ld *= layout.dim(s);
    const Matrix local = random_matrix(ld, ld, rng);
    const Matrix rows = random_matrix(layout.total_dim(), 5, rng);
    Matrix applied = rows;
    apply_local(applied, local, subs, layout);
    const Matrix expected = embed(local, subs, layout).matrix() * rows;
    EXPECT_NEAR((applied - expected).cwiseAbs().maxCoeff(), 0.0, 1e-12);
  }
}

TEST(Fidelity, PureStates) {
  const SpaceLayout layout({2});
  const std::array<int, 1> zero{0}, one{1};
  const StateVector s0 = basis_state(layout, zero), s1 = basis_state(layout, one);
  EXPECT_NEAR(fidelity_pure(s0, s0), 1.0, 1e-15);
  EXPECT_NEAR(fidelity_pure(s0, s1), 0.0, 1e-15);
  Vector plus(2);
  plus << 1.0, 1.0;
  EXPECT_NEAR(fidelity_pure(s0, StateVector(layout, plus).normalized()), 0.5, 1e-15);
}

TEST(Fidelity, MixedStates) {
  std::mt19937_64 rng(17);
  const SpaceLayout layout({2, 3});
  const StateVector psi(layout, random_matrix(6, 1, rng).col(0));
  const StateVector n = psi.normalized();
  EXPECT_NEAR(fidelity_mixed(n, DensityMatrix::from_pure(n)), 1.0, 1e-14);
  EXPECT_NEAR(fidelity_mixed(n, DensityMatrix::maximally_mixed(layout)), 1.0 / 6.0, 1e-15);
}

TEST(PartialTrace, KeepEverythingIsIdentity) {
  std::mt19937_64 rng(19);
  const SpaceLayout layout({2, 3});
  const StateVector psi = StateVector(layout, random_matrix(6, 1, rng).col(0)).normalized();
  const DensityMatrix rho = DensityMatrix::from_pure(psi);
  const std::array<std::size_t, 2> keep{0, 1};
  EXPECT_NEAR((partial_trace(rho, keep).matrix() - rho.matrix()).norm(), 0.0, 1e-15);
}

TEST(PartialTrace, ProductFactorizes) {
  std::mt19937_64 rng(23);
  const Matrix ma = random_matrix(2, 2, rng), mb = random_matrix(3, 3, rng);
  const Matrix ra = (ma * ma.adjoint()) / (ma * ma.adjoint()).trace();
  const Matrix rb = (mb * mb.adjoint()) / (mb * mb.adjoint()).trace();
  const DensityMatrix rho(SpaceLayout({2, 3}), kron(ra, rb));
  const std::array<std::size_t, 1> a{0}, b{1};
  EXPECT_NEAR((partial_trace(rho, a).matrix() - ra).norm(), 0.0, 1e-14);
  EXPECT_NEAR((partial_trace(rho, b).matrix() - rb).norm(), 0.0, 1e-14);
}

TEST(PartialTrace, BellStateIsMaximallyMixed) {
  const SpaceLayout layout({2, 2});
  Vector v = Vector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  const std::array<std::size_t, 1> keep{1};
  const DensityMatrix r = partial_trace(DensityMatrix::from_pure(StateVector(layout, v)), keep);
  EXPECT_NEAR((r.matrix() - 0.5 * Matrix::Identity(2, 2)).norm(), 0.0, 1e-15);
}

TEST(DensityMatrix, DiagnosticsOfKnownMatrix) {
  Matrix m(2, 2);
  m << 0.75, 0.5, 0.5, 0.25;  // eigenvalues (1 +- sqrt(5/4)) / 2
  const DensityDiagnostics d = DensityMatrix(SpaceLayout({2}), m).diagnostics();
  EXPECT_NEAR(d.trace.real(), 1.0, 1e-15);
  EXPECT_NEAR(d.min_eigenvalue, (1.0 - std::sqrt(1.25)) / 2.0, 1e-14);
  EXPECT_EQ(d.hermiticity_error, 0.0);
}

TEST(Operator, HermiticityError) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = {1.0, 2.0};
  m(1, 0) = {1.0, -2.0};
  const Operator h(SpaceLayout({2}), m);
  EXPECT_EQ(h.hermiticity_error(), 0.0);
  m(1, 0) = 0.0;
  EXPECT_NEAR(Operator(SpaceLayout({2}), m).hermiticity_error(), std::sqrt(5.0), 1e-15);
}

}  // namespace
}  // namespace cavphase

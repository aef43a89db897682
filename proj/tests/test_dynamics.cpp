#include "descon/dynamics.hpp"

#include "descon/scenario.hpp"
#include "descon/verify.hpp"

#include <gtest/gtest.h>

namespace {

using descon::Matrix;
using descon::Rng;
using descon::SystemModel;
using descon::Vector;

SystemModel cv_system(int horizon) {
  descon::ScenarioConfig cfg;
  cfg.horizon = horizon;
  return descon::make_system(cfg);
}

TEST(SystemModel, RejectsSingularTransition) {
  std::vector<Matrix> fs{Matrix::Zero(2, 2)};
  EXPECT_THROW(SystemModel(std::move(fs), Matrix::Identity(2, 2)), std::invalid_argument);
}

TEST(SystemModel, RejectsBadNoiseShape) {
  std::vector<Matrix> fs{Matrix::Identity(2, 2)};
  EXPECT_THROW(SystemModel(fs, Matrix::Identity(3, 3)), std::invalid_argument);
  Matrix indefinite = Matrix::Identity(2, 2);
  indefinite(1, 1) = -1.0;
  EXPECT_THROW(SystemModel(fs, indefinite), std::invalid_argument);
}

TEST(SystemModel, BlockDiagonalBuilderPlacesBlocks) {
  Rng rng(3);
  const Matrix q0 = descon::random_spd(rng, 2, 10);
  const Matrix q1 = descon::random_spd(rng, 2, 10);
  const SystemModel sys = SystemModel::with_block_diagonal_noise(
      {Matrix::Identity(2, 2), Matrix::Identity(2, 2)}, {q0, q1});
  EXPECT_NEAR(descon::max_abs(sys.noise_block(0, 0) - q0), 0.0, 1e-14);
  EXPECT_NEAR(descon::max_abs(sys.noise_block(1, 1) - q1), 0.0, 1e-14);
  EXPECT_NEAR(descon::max_abs(sys.noise_block(0, 1)), 0.0, 1e-14);
}

TEST(TransitionProduct, IdentityWhenStepsCoincide) {
  const SystemModel sys = cv_system(5);
  for (int k = 0; k <= 5; ++k)
    EXPECT_NEAR(
        descon::max_abs(descon::transition_product(sys, k, k) - Matrix::Identity(4, 4)), 0.0,
        1e-15);
}

TEST(TransitionProduct, CvTwoStepsCouplesPositionVelocity) {
  const SystemModel sys = cv_system(5);
  const Matrix f = descon::cv_transition(1.0);
  const Matrix expected = f * f;
  const Matrix psi = descon::transition_product(sys, 1, 3);
  EXPECT_NEAR(descon::max_abs(psi - expected), 0.0, 1e-14);
  EXPECT_NEAR(psi(0, 1), 2.0, 1e-14);  // position picks up 2*dt of velocity
}

TEST(TransitionProduct, ComposesAcrossIntermediateSteps) {
  Rng rng(5);
  const SystemModel sys = descon::random_system(rng, 3, 8);
  for (int trial = 0; trial < 30; ++trial) {
    const int j = static_cast<int>(rng() % 9);
    const int k = j + static_cast<int>(rng() % static_cast<std::uint64_t>(9 - j));
    const int t = k + static_cast<int>(rng() % static_cast<std::uint64_t>(9 - k));
    const Matrix lhs =
        descon::transition_product(sys, k, t) * descon::transition_product(sys, j, k);
    const Matrix rhs = descon::transition_product(sys, j, t);
    EXPECT_LE(descon::max_abs(lhs - rhs), 1e-10 * (1.0 + descon::max_abs(rhs)));
  }
}

TEST(TransitionProduct, RejectsReversedRange) {
  const SystemModel sys = cv_system(5);
  EXPECT_THROW(descon::transition_product(sys, 3, 2), std::invalid_argument);
}

TEST(StackedPsi, TerminalStepIsSingleIdentity) {
  const SystemModel sys = cv_system(5);
  const Matrix psi = descon::stacked_psi(sys, 5);
  ASSERT_EQ(psi.cols(), 4);
  EXPECT_NEAR(descon::max_abs(psi - Matrix::Identity(4, 4)), 0.0, 1e-15);
}

TEST(StackedPsi, PenultimateStepIsTransitionThenIdentity) {
  const SystemModel sys = cv_system(5);
  const Matrix psi = descon::stacked_psi(sys, 4);
  ASSERT_EQ(psi.cols(), 8);
  EXPECT_NEAR(descon::max_abs(psi.leftCols(4) - sys.transition(4)), 0.0, 1e-14);
  EXPECT_NEAR(descon::max_abs(psi.rightCols(4) - Matrix::Identity(4, 4)), 0.0, 1e-15);
}

TEST(StackedPsi, FirstBlockIsFullHorizonPower) {
  const SystemModel sys = cv_system(50);
  const Matrix psi = descon::stacked_psi(sys, 1);
  ASSERT_EQ(psi.cols(), 4 * 50);
  Matrix power = Matrix::Identity(4, 4);
  for (int i = 0; i < 49; ++i) power = descon::cv_transition(1.0) * power;
  EXPECT_LE(descon::max_abs(psi.leftCols(4) - power), 1e-10 * (1.0 + descon::max_abs(power)));
}

TEST(Selectors, FullAndTailSelection) {
  const SystemModel sys = cv_system(4);
  EXPECT_NEAR(descon::max_abs(descon::selector_m(sys, 1) - Matrix::Identity(16, 16)), 0.0, 1e-15);
  const Matrix m_last = descon::selector_m(sys, 4);
  ASSERT_EQ(m_last.rows(), 4);
  ASSERT_EQ(m_last.cols(), 16);
  EXPECT_NEAR(descon::max_abs(m_last.rightCols(4) - Matrix::Identity(4, 4)), 0.0, 1e-15);
  EXPECT_NEAR(descon::max_abs(m_last.leftCols(12)), 0.0, 1e-15);
}

TEST(Selectors, DenseSelectorMatchesSlicing) {
  Rng rng(9);
  const SystemModel sys = descon::random_system(rng, 3, 6);
  const Vector stacked = descon::normal_vector(rng, 18);
  for (int k = 1; k <= 6; ++k) {
    const Vector direct = descon::noise_tail(sys, k, stacked);
    const Vector via_matrix = descon::selector_m(sys, k) * stacked;
    EXPECT_NEAR((direct - via_matrix).norm(), 0.0, 1e-14);
  }
}

TEST(Selectors, LeadingIdentityShape) {
  const SystemModel sys = cv_system(4);
  const Matrix g = descon::selector_g(sys, 2);
  ASSERT_EQ(g.rows(), 4);
  ASSERT_EQ(g.cols(), 12);
  EXPECT_NEAR(descon::max_abs(g.leftCols(4) - Matrix::Identity(4, 4)), 0.0, 1e-15);
  EXPECT_NEAR(descon::max_abs(g.rightCols(8)), 0.0, 1e-15);
}

TEST(NoiseCoverSlice, FullSliceIsWholeShape) {
  Rng rng(13);
  const SystemModel sys = descon::random_system(rng, 2, 5);
  EXPECT_NEAR(
      descon::max_abs(descon::noise_cover_slice(sys, 1) - sys.stacked_noise_shape()), 0.0, 1e-15);
}

TEST(NoiseCoverSlice, BlockDiagonalTerminalSliceIsLastBlock) {
  const SystemModel sys = cv_system(6);
  EXPECT_NEAR(descon::max_abs(descon::noise_cover_slice(sys, 6) - sys.step_noise_shape(5)), 0.0,
              1e-15);
}

TEST(NoiseCoverSlice, MatchesExplicitSubmatrixAndStaysSpd) {
  Rng rng(17);
  const SystemModel sys = descon::random_system(rng, 3, 6);
  for (int k = 1; k <= 6; ++k) {
    const Matrix slice = descon::noise_cover_slice(sys, k);
    const Eigen::Index len = 3 * (6 - k + 1);
    const Matrix expected = sys.stacked_noise_shape().block(18 - len, 18 - len, len, len);
    EXPECT_NEAR(descon::max_abs(slice - expected), 0.0, 1e-15);
    EXPECT_GT(descon::min_eigenvalue(slice), 0.0);
  }
}

TEST(ResidualZeta, EmptyAndSingleTerm) {
  const SystemModel sys = cv_system(5);
  EXPECT_NEAR(descon::residual_zeta(sys, 3, 3, {}).norm(), 0.0, 1e-15);
  Rng rng(19);
  const Vector w = descon::normal_vector(rng, 4);
  EXPECT_NEAR((descon::residual_zeta(sys, 2, 3, {w}) - w).norm(), 0.0, 1e-14);
  EXPECT_THROW(descon::residual_zeta(sys, 2, 4, {w}), std::invalid_argument);
}

// Closed-form two-point recursion against plain forward iteration.
TEST(ResidualZeta, ClosedFormMatchesForwardIteration) {
  Rng rng(23);
  const SystemModel sys = descon::random_system(rng, 3, 7);
  for (int trial = 0; trial < 10; ++trial) {
    const int k = static_cast<int>(rng() % 7);
    const int t = k + 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(7 - k));
    const Vector xk = descon::normal_vector(rng, 3);
    std::vector<Vector> noises;
    for (int j = k; j < t; ++j) noises.push_back(descon::normal_vector(rng, 3));

    Vector x = xk;
    for (int j = k; j < t; ++j)
      x = sys.transition(j) * x + noises[static_cast<std::size_t>(j - k)];

    const Vector closed =
        descon::transition_product(sys, k, t) * xk + descon::residual_zeta(sys, k, t, noises);
    EXPECT_LE((closed - x).norm(), 1e-9 * (1.0 + x.norm()));
  }
}

}  // namespace

#include "descon/constraint.hpp"

#include "descon/scenario.hpp"
#include "descon/verify.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using descon::BlockConstraint;
using descon::DestinationConstraint;
using descon::Matrix;
using descon::Rng;
using descon::Vector;

TEST(DestinationConstraint, RejectsRankDeficientRows) {
  Matrix d(2, 3);
  d << 1.0, 2.0, 3.0, 2.0, 4.0, 6.0;
  EXPECT_THROW(DestinationConstraint(d, Vector::Zero(2)), std::invalid_argument);
  EXPECT_THROW(DestinationConstraint(Matrix::Identity(3, 2), Vector::Zero(3)),
               std::invalid_argument);
}

TEST(BlockConstraintLayout, LeftBlockIsZero) {
  Matrix d(1, 2);
  d << 1.0, -1.0;
  Vector rhs(1);
  rhs << 3.0;
  const BlockConstraint bc(DestinationConstraint(d, rhs));
  ASSERT_EQ(bc.matrix().rows(), 1);
  ASSERT_EQ(bc.matrix().cols(), 4);
  EXPECT_NEAR(descon::max_abs(bc.matrix().leftCols(2)), 0.0, 1e-15);
  EXPECT_NEAR(descon::max_abs(bc.matrix().rightCols(2) - d), 0.0, 1e-15);
}

TEST(Pseudoinverse, RowSelectorAndSquareCase) {
  Matrix row(1, 2);
  row << 1.0, 0.0;
  Matrix expected(2, 1);
  expected << 1.0, 0.0;
  EXPECT_NEAR(descon::max_abs(descon::pseudoinverse(row) - expected), 0.0, 1e-14);

  Rng rng(3);
  Matrix square;
  while (true) {
    square = descon::normal_matrix(rng, 3, 3);
    Eigen::FullPivLU<Matrix> lu(square);
    if (lu.isInvertible()) break;
  }
  EXPECT_LE(descon::max_abs(descon::pseudoinverse(square) - square.inverse()),
            1e-9 * (1.0 + descon::max_abs(square.inverse())));
}

TEST(Pseudoinverse, RightInverseOnRandomWideMatrices) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix d = descon::normal_matrix(rng, 3, 4);
    const Matrix pinv = descon::pseudoinverse(d);
    EXPECT_LE(descon::max_abs(d * pinv - Matrix::Identity(3, 3)), 1e-10);
  }
}

TEST(Pseudoinverse, RejectsRankDeficient) {
  Matrix d(2, 3);
  d << 1.0, 0.0, 0.0, 1.0, 0.0, 0.0;
  EXPECT_THROW(descon::pseudoinverse(d), std::invalid_argument);
}

TEST(Projector, IdentityWeightGivesOrthogonalProjector) {
  Rng rng(7);
  const DestinationConstraint dc = descon::random_destination(rng, 2, 3);
  const BlockConstraint bc(dc);
  const Matrix& db = bc.matrix();
  const Matrix a = descon::projector(Matrix::Identity(6, 6), bc);
  const Matrix expected =
      Matrix::Identity(6, 6) -
      db.transpose() * (db * db.transpose()).inverse() * db;
  EXPECT_LE(descon::max_abs(a - expected), 1e-10);
}

TEST(Projector, AnnihilatesConstraintAndIsIdempotent) {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const DestinationConstraint dc = descon::random_destination(rng, 2, 4);
    const BlockConstraint bc(dc);
    const Matrix w = descon::random_spd(rng, 8, 1e4);
    const Matrix a = descon::projector(w, bc);
    const double scale = 1.0 + descon::max_abs(a);
    EXPECT_LE(descon::max_abs(bc.matrix() * a), 1e-10 * scale);
    EXPECT_LE(descon::max_abs(a * a - a), 1e-9 * scale);
  }
}

// Feasible points are fixed points of the decomposition.
TEST(Projector, DecompositionFixesFeasiblePoints) {
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const DestinationConstraint dc = descon::random_destination(rng, 2, 4);
    const BlockConstraint bc(dc);
    const Matrix w = descon::random_spd(rng, 8, 1e4);
    const Matrix a = descon::projector(w, bc);
    const Matrix dagger = descon::pseudoinverse(bc.matrix());
    const Vector d = descon::normal_vector(rng, 2);
    // x = D^+ d + (I - D^+ D) z is a generic feasible point.
    const Vector z = descon::normal_vector(rng, 8);
    const Vector x =
        dagger * d + (Matrix::Identity(8, 8) - dagger * bc.matrix()) * z;
    const Vector recombined = a * x + (Matrix::Identity(8, 8) - a) * (dagger * d);
    EXPECT_LE((recombined - x).norm(), 1e-9 * (1.0 + x.norm()));
  }
}

TEST(Projector, RejectsIndefiniteWeight) {
  Rng rng(17);
  const BlockConstraint bc(descon::random_destination(rng, 1, 2));
  Matrix w = Matrix::Identity(4, 4);
  w(0, 0) = -1.0;
  EXPECT_THROW(descon::projector(w, bc), std::invalid_argument);
}

TEST(HeadingConstraint, VerticalArrivalZeroesEastVelocity) {
  const DestinationConstraint dc = descon::heading_constraint(12000.0, 0.0, descon::kPi / 2.0);
  Matrix row3(1, 4);
  row3 << 0.0, 1.0, 0.0, 0.0;
  EXPECT_LE(descon::max_abs(dc.matrix().row(2) - row3), 1e-15);
  Vector d(3);
  d << 12000.0, 0.0, 0.0;
  EXPECT_NEAR((dc.rhs() - d).norm(), 0.0, 1e-12);
}

TEST(HeadingConstraint, LevelArrivalZeroesNorthVelocity) {
  const DestinationConstraint dc = descon::heading_constraint(12000.0, 0.0, 0.0);
  Matrix row3(1, 4);
  row3 << 0.0, 0.0, 0.0, -1.0;
  EXPECT_LE(descon::max_abs(dc.matrix().row(2) - row3), 1e-15);
}

TEST(HeadingConstraint, DiagonalArrivalTiesVelocityComponents) {
  const double theta = descon::kPi / 4.0;
  const DestinationConstraint dc = descon::heading_constraint(100.0, 50.0, theta);
  const double c = std::sqrt(0.5);
  Matrix row3(1, 4);
  row3 << 0.0, c, 0.0, -c;
  EXPECT_LE(descon::max_abs(dc.matrix().row(2) - row3), 1e-12);
  // Any state satisfying the constraint must have vy/vx = tan(theta).
  Vector x(4);
  x << 100.0, 7.0, 50.0, 7.0 * std::tan(theta);
  EXPECT_LE((dc.matrix() * x - dc.rhs()).norm(), 1e-12);
}

TEST(HeadingConstraint, FullRankAcrossAllAngles) {
  for (double deg = 0.0; deg < 360.0; deg += 7.5) {
    const DestinationConstraint dc =
        descon::heading_constraint(1.0, 2.0, deg * descon::kPi / 180.0);
    Eigen::ColPivHouseholderQR<Matrix> qr(dc.matrix());
    EXPECT_EQ(qr.rank(), 3);
  }
}

}  // namespace

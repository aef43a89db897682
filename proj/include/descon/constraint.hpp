#pragma once

#include "descon/matrix_utils.hpp"

#include <cmath>
#include <utility>

namespace descon {

/// Linear terminal condition D x_N = d with full-row-rank D.
class DestinationConstraint {
 public:
  DestinationConstraint(Matrix d_matrix, Vector d_vector)
      : d_(std::move(d_matrix)), rhs_(std::move(d_vector)) {
    if (d_.rows() < 1 || d_.rows() > d_.cols())
      throw std::invalid_argument("DestinationConstraint: need 1 <= rows <= cols");
    if (rhs_.size() != d_.rows())
      throw std::invalid_argument("DestinationConstraint: right-hand side has wrong size");
    Eigen::ColPivHouseholderQR<Matrix> qr(d_);
    if (qr.rank() != d_.rows())
      throw std::invalid_argument("DestinationConstraint: matrix must have full row rank");
  }

  const Matrix& matrix() const { return d_; }
  const Vector& rhs() const { return rhs_; }
  Eigen::Index rows() const { return d_.rows(); }
  Eigen::Index dim() const { return d_.cols(); }

 private:
  Matrix d_;
  Vector rhs_;
};

/// The same condition expressed on the combined (current, terminal) state:
/// [0 D] acting on a 2n vector.
class BlockConstraint {
 public:
  explicit BlockConstraint(const DestinationConstraint& dc)
      : block_(Matrix::Zero(dc.rows(), 2 * dc.dim())) {
    block_.rightCols(dc.dim()) = dc.matrix();
  }

  const Matrix& matrix() const { return block_; }
  Eigen::Index rows() const { return block_.rows(); }
  Eigen::Index dim() const { return block_.cols(); }

 private:
  Matrix block_;
};

/// Minimum-norm right inverse A^T (A A^T)^{-1} of a full-row-rank matrix.
inline Matrix pseudoinverse(const Matrix& a) {
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  if (qr.rank() != a.rows())
    throw std::invalid_argument("pseudoinverse: matrix must have full row rank");
  return a.transpose() *
         spd_solve(a * a.transpose(), Matrix::Identity(a.rows(), a.rows()), "pseudoinverse");
}

/// Oblique projector I - W D^T (D W D^T)^{-1} D onto the null space of the
/// block constraint, weighted by a positive definite W. Annihilated by D and
/// idempotent.
inline Matrix projector(const Matrix& w, const BlockConstraint& bc) {
  if (w.rows() != w.cols() || w.rows() != bc.dim())
    throw std::invalid_argument("projector: weight size must match the block constraint");
  if (!is_symmetric(w, 1e-8))
    throw std::invalid_argument("projector: weight must be symmetric");
  const Matrix ws = symmetrized(w);
  {
    Eigen::LLT<Matrix> llt(ws);
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument("projector: weight must be positive definite");
  }
  const Matrix& db = bc.matrix();
  Eigen::LLT<Matrix> gram(symmetrized(db * ws * db.transpose()));
  if (gram.info() != Eigen::Success)
    throw std::runtime_error(
        "projector: D W D^T is singular; check weight definiteness and constraint rank");
  return Matrix::Identity(ws.rows(), ws.rows()) - ws * db.transpose() * gram.solve(db);
}

/// Destination constraint for the planar (x, vx, y, vy) state: arrival
/// position plus an arrival-heading row. The heading row uses (sin, -cos)
/// coefficients so every angle, including 0, is well defined.
inline DestinationConstraint heading_constraint(double dest_x, double dest_y, double theta) {
  Matrix d = Matrix::Zero(3, 4);
  d(0, 0) = 1.0;
  d(1, 2) = 1.0;
  d(2, 1) = std::sin(theta);
  d(2, 3) = -std::cos(theta);
  Vector rhs(3);
  rhs << dest_x, dest_y, 0.0;
  return DestinationConstraint(std::move(d), std::move(rhs));
}

}  // namespace descon

#pragma once

#include "descon/constraint.hpp"
#include "descon/dynamics.hpp"

#include <limits>
#include <utility>

namespace descon {

/// Blocks of the 2n x 2n metric weighting the combined (current, terminal)
/// state. The combined matrix [[w1, w2], [w2^T, w3]] must be positive
/// semidefinite and w3 positive definite (both within tolerance); only w2 and
/// w3 enter the reconstructed model's coefficients.
struct WeightBlocks {
  Matrix w1;
  Matrix w2;
  Matrix w3;

  WeightBlocks(Matrix w1_, Matrix w2_, Matrix w3_, double tol = 1e-8)
      : w1(std::move(w1_)), w2(std::move(w2_)), w3(std::move(w3_)) {
    const Eigen::Index n = w2.rows();
    if (w2.cols() != n || w1.rows() != n || w1.cols() != n || w3.rows() != n || w3.cols() != n)
      throw std::invalid_argument("WeightBlocks: blocks must be square and equally sized");
    if (!is_symmetric(w1, 1e-8) || !is_symmetric(w3, 1e-8))
      throw std::invalid_argument("WeightBlocks: diagonal blocks must be symmetric");
    w1 = symmetrized(w1);
    w3 = symmetrized(w3);
    const Vector ev3 = symmetric_eigenvalues(w3);
    if (ev3.minCoeff() < -tol * (1.0 + std::max(0.0, ev3.maxCoeff())))
      throw std::invalid_argument("WeightBlocks: w3 must be positive definite");
    const Vector evf = symmetric_eigenvalues(full());
    if (evf.minCoeff() < -tol * (1.0 + std::max(0.0, evf.maxCoeff())))
      throw std::invalid_argument("WeightBlocks: combined matrix must be positive semidefinite");
  }

  Eigen::Index dim() const { return w2.rows(); }

  Matrix full() const {
    const Eigen::Index n = dim();
    Matrix f(2 * n, 2 * n);
    f.topLeftCorner(n, n) = w1;
    f.topRightCorner(n, n) = w2;
    f.bottomLeftCorner(n, n) = w2.transpose();
    f.bottomRightCorner(n, n) = w3;
    return f;
  }

  /// Strictly positive definite combined matrix: pads w1 with
  /// rel_eps * trace(w1)/n when the combined matrix is only semidefinite.
  /// The constraint gain depends on w2 and w3 alone, so the reconstructed
  /// model is unchanged by the padding.
  Matrix full_spd(double rel_eps = 1e-9) const {
    Matrix f = full();
    const Vector ev = symmetric_eigenvalues(f);
    if (ev.minCoeff() > 1e-12 * (1.0 + std::max(0.0, ev.maxCoeff()))) return f;
    double eps = rel_eps * w1.trace() / static_cast<double>(dim());
    if (!(eps > 0.0)) eps = rel_eps;
    f.topLeftCorner(dim(), dim()) += eps * Matrix::Identity(dim(), dim());
    return f;
  }

  /// Unoptimized weights: w2 = w3 = I (w1 chosen so the combined matrix is
  /// positive definite).
  static WeightBlocks identity(Eigen::Index n) {
    return WeightBlocks(2.0 * Matrix::Identity(n, n), Matrix::Identity(n, n),
                        Matrix::Identity(n, n));
  }
};

/// Weight built from the stacked noise cover; it minimizes (in the
/// semidefinite order) the per-step noise cover of the constrained model over
/// all positive definite weights.
inline WeightBlocks optimal_weight(const SystemModel& sys, int k) {
  detail::check_step_range(sys, k, "optimal_weight");
  const Eigen::Index n = sys.dim();
  const Matrix qw = noise_cover_slice(sys, k);
  const Matrix psi = stacked_psi(sys, k);
  Matrix w2 = qw.topRows(n) * psi.transpose();
  Matrix w3 = symmetrized(psi * qw * psi.transpose());
  return WeightBlocks(sys.step_noise_shape(k - 1), std::move(w2), std::move(w3));
}

/// Constraint gain B = w2 D^T (D w3 D^T)^{-1} D shared by the model
/// coefficients and the noise-cover formulas.
inline Matrix constraint_gain(const DestinationConstraint& dc, const WeightBlocks& w) {
  if (dc.dim() != w.dim())
    throw std::invalid_argument("constraint_gain: constraint and weight dimensions disagree");
  const Matrix& d = dc.matrix();
  Eigen::LLT<Matrix> gram(symmetrized(d * w.w3 * d.transpose()));
  if (gram.info() != Eigen::Success)
    throw std::runtime_error("constraint_gain: D w3 D^T is singular");
  return w.w2 * d.transpose() * gram.solve(d);
}

/// Shape of the ellipsoid covering the one-step process noise injected by the
/// constrained model at step k. Symmetric positive semidefinite; may be
/// singular (it vanishes at the final step when D is invertible).
inline Matrix process_noise_shape(const SystemModel& sys, const DestinationConstraint& dc,
                                  const WeightBlocks& w, int k) {
  detail::check_step_range(sys, k, "process_noise_shape");
  if (dc.dim() != sys.dim())
    throw std::invalid_argument("process_noise_shape: constraint dimension mismatch");
  const Eigen::Index n = sys.dim();
  const Matrix b = constraint_gain(dc, w);
  Matrix h = -b * stacked_psi(sys, k);
  h.leftCols(n) += Matrix::Identity(n, n);
  return symmetrized(h * noise_cover_slice(sys, k) * h.transpose());
}

/// Whether a final-step weight keeps the reconstructed model consistent with
/// the terminal condition: D (w2 - w3) D^T must vanish.
inline bool terminal_condition_check(const WeightBlocks& w, const DestinationConstraint& dc) {
  if (dc.dim() != w.dim())
    throw std::invalid_argument("terminal_condition_check: dimension mismatch");
  const Matrix& d = dc.matrix();
  const Matrix t2 = d * w.w2 * d.transpose();
  const Matrix t3 = d * w.w3 * d.transpose();
  const double scale = 1.0 + std::max(max_abs(t2), max_abs(t3));
  return max_abs(t2 - t3) <= 1e-9 * scale;
}

/// Random strictly feasible weight, for use as a competitor in optimality
/// checks. Condition number is capped so margins computed against it stay
/// meaningful in double precision.
inline WeightBlocks random_feasible_weight(Rng& rng, const SystemModel& sys, int k) {
  detail::check_step_range(sys, k, "random_feasible_weight");
  const Eigen::Index n = sys.dim();
  const Matrix s = random_spd(rng, 2 * n, 1e6);
  return WeightBlocks(s.topLeftCorner(n, n), s.topRightCorner(n, n),
                      s.bottomRightCorner(n, n));
}

}  // namespace descon

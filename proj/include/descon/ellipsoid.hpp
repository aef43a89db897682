#pragma once

#include "descon/matrix_utils.hpp"

#include <numeric>
#include <vector>

namespace descon {

enum class RadialMode { uniform_ball, boundary };

/// Bounded uncertainty set: a center plus every offset E r with ||r|| <= 1,
/// where E E^T equals the shape matrix. Rank-deficient shapes are legal and
/// flagged as degenerate; membership then also requires the offset to lie in
/// the column space of the shape.
class Ellipsoid {
 public:
  // Relative eigenvalue cutoff below which a direction counts as collapsed.
  static constexpr double kRankTol = 1e-12;

  Ellipsoid(Vector center, Matrix shape, double eig_tol = 1e-8)
      : center_(std::move(center)), shape_(std::move(shape)) {
    if (shape_.rows() != shape_.cols() || shape_.rows() != center_.size())
      throw std::invalid_argument("Ellipsoid: center and shape dimensions disagree");
    if (!is_symmetric(shape_))
      throw std::invalid_argument("Ellipsoid: shape matrix must be symmetric");
    shape_ = symmetrized(shape_);
    const Vector ev = symmetric_eigenvalues(shape_);
    const double lam_max = std::max(0.0, ev.maxCoeff());
    if (ev.minCoeff() < -eig_tol * (1.0 + lam_max))
      throw std::invalid_argument("Ellipsoid: shape matrix must be positive semidefinite");
    degenerate_ = lam_max <= 0.0 || ev.minCoeff() <= kRankTol * lam_max;
  }

  const Vector& center() const { return center_; }
  const Matrix& shape() const { return shape_; }
  Eigen::Index dim() const { return center_.size(); }
  bool degenerate() const { return degenerate_; }

 private:
  Vector center_;
  Matrix shape_;
  bool degenerate_ = false;
};

/// Image of an ellipsoid under x -> U x + b. The shape maps congruently, so
/// the result is again an ellipsoid.
inline Ellipsoid affine_map(const Ellipsoid& e, const Matrix& u, const Vector& b) {
  if (u.cols() != e.dim() || b.size() != u.rows())
    throw std::invalid_argument("affine_map: dimension mismatch");
  return Ellipsoid(u * e.center() + b, symmetrized(u * e.shape() * u.transpose()));
}

/// Membership test. Uses the pseudoinverse quadratic form; for degenerate
/// shapes the offset must additionally lie in the shape's column space.
inline bool contains(const Ellipsoid& e, const Vector& x, double tol = 1e-9) {
  if (x.size() != e.dim()) throw std::invalid_argument("contains: dimension mismatch");
  const Vector r = x - e.center();
  Eigen::SelfAdjointEigenSolver<Matrix> es(e.shape());
  if (es.info() != Eigen::Success) throw std::runtime_error("contains: eigendecomposition failed");
  const Vector& ev = es.eigenvalues();
  const double cutoff = Ellipsoid::kRankTol * std::max(0.0, ev.maxCoeff());
  const Vector proj = es.eigenvectors().transpose() * r;
  double quad = 0.0;
  double null_sq = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] > cutoff)
      quad += proj[i] * proj[i] / ev[i];
    else
      null_sq += proj[i] * proj[i];
  }
  return std::sqrt(null_sq) <= tol * (1.0 + r.norm()) && quad <= 1.0 + tol;
}

/// Cholesky-style factor L with L L^T equal to the input. Positive definite
/// input yields the classic lower-triangular factor; semidefinite input falls
/// back to a diagonally pivoted factorization and returns an n x rank factor.
/// Indefinite input is rejected.
inline Matrix factorize(const Matrix& p, double psd_tol = 1e-8) {
  if (!is_symmetric(p)) throw std::invalid_argument("factorize: input must be symmetric");
  const Matrix s = symmetrized(p);
  const Eigen::Index n = s.rows();
  const double scale = max_abs(s);
  const double recon_tol = 1e-10 * (1.0 + scale);

  Eigen::LLT<Matrix> llt(s);
  if (llt.info() == Eigen::Success) {
    Matrix l = llt.matrixL();
    if (max_abs(s - l * l.transpose()) <= recon_tol) return l;
  }

  // Outer-product elimination with diagonal pivoting, truncated at the
  // numerical rank. The permuted factor is mapped back to the original row
  // order before returning.
  Matrix a = s;
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  const double stop_tol = 1e-11 * scale;
  Eigen::Index rank = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::Index piv = j;
    for (Eigen::Index i = j + 1; i < n; ++i)
      if (a(i, i) > a(piv, piv)) piv = i;
    if (a(piv, piv) <= stop_tol) {
      for (Eigen::Index i = j; i < n; ++i)
        if (a(i, i) < -psd_tol * (1.0 + scale))
          throw std::invalid_argument("factorize: input is indefinite");
      break;
    }
    if (piv != j) {
      a.row(j).swap(a.row(piv));
      a.col(j).swap(a.col(piv));
      std::swap(perm[static_cast<std::size_t>(j)], perm[static_cast<std::size_t>(piv)]);
    }
    const double root = std::sqrt(a(j, j));
    a(j, j) = root;
    for (Eigen::Index i = j + 1; i < n; ++i) a(i, j) /= root;
    // Full-block update keeps the trailing block symmetric, so later
    // row/column swaps cannot pull stale entries into the factor.
    for (Eigen::Index c = j + 1; c < n; ++c)
      for (Eigen::Index i = j + 1; i < n; ++i) a(i, c) -= a(i, j) * a(c, j);
    ++rank;
  }
  Matrix l = Matrix::Zero(n, rank);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= std::min(i, rank - 1); ++j)
      l(perm[static_cast<std::size_t>(i)], j) = a(i, j);
  if (max_abs(s - l * l.transpose()) > recon_tol)
    throw std::invalid_argument("factorize: input is indefinite");
  return l;
}

/// A <= B in the positive semidefinite ordering, within a relative tolerance
/// on the smallest eigenvalue of B - A.
inline bool loewner_leq(const Matrix& a, const Matrix& b, double tol = 1e-8) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
    throw std::invalid_argument("loewner_leq: need square matrices of equal size");
  const double sym_tol = 1e-8;
  if (!is_symmetric(a, sym_tol) || !is_symmetric(b, sym_tol))
    throw std::invalid_argument("loewner_leq: inputs must be symmetric");
  const double scale = 1.0 + max_abs_eigenvalue(b);
  return min_eigenvalue(symmetrized(b) - symmetrized(a)) >= -tol * scale;
}

/// Draw a point of the ellipsoid: uniform over its volume, or uniform on its
/// boundary (the rank-r sub-sphere when the shape is degenerate).
inline Vector sample_point(const Ellipsoid& e, Rng& rng, RadialMode mode) {
  const Matrix l = factorize(e.shape());
  const Eigen::Index r = l.cols();
  if (mode == RadialMode::uniform_ball && r < e.dim())
    throw std::invalid_argument("sample_point: uniform_ball requires a positive definite shape");
  if (r == 0) return e.center();
  Vector dir = normal_vector(rng, r);
  double nrm = dir.norm();
  while (nrm == 0.0) {
    dir = normal_vector(rng, r);
    nrm = dir.norm();
  }
  dir /= nrm;
  const double radius =
      mode == RadialMode::boundary
          ? 1.0
          : std::pow(uniform_unit(rng), 1.0 / static_cast<double>(e.dim()));
  return e.center() + l * (radius * dir);
}

}  // namespace descon

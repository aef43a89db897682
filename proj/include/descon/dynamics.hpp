#pragma once

#include "descon/matrix_utils.hpp"

#include <utility>
#include <vector>

namespace descon {

/// Linear time-varying system over a fixed horizon, with a single ellipsoid
/// shape bounding the whole stacked process-noise vector (w_0, ..., w_{N-1}).
class SystemModel {
 public:
  SystemModel(std::vector<Matrix> transitions, Matrix stacked_noise_shape)
      : transitions_(std::move(transitions)),
        stacked_noise_shape_(std::move(stacked_noise_shape)) {
    if (transitions_.empty())
      throw std::invalid_argument("SystemModel: at least one transition matrix required");
    dim_ = transitions_.front().rows();
    for (const Matrix& f : transitions_) {
      if (f.rows() != dim_ || f.cols() != dim_)
        throw std::invalid_argument("SystemModel: transition dimensions disagree");
      Eigen::FullPivLU<Matrix> lu(f);
      lu.setThreshold(1e-12);
      if (!lu.isInvertible())
        throw std::invalid_argument("SystemModel: transition matrix is singular");
    }
    const Eigen::Index total = dim_ * horizon();
    if (stacked_noise_shape_.rows() != total || stacked_noise_shape_.cols() != total)
      throw std::invalid_argument("SystemModel: stacked noise shape has wrong size");
    if (!is_symmetric(stacked_noise_shape_))
      throw std::invalid_argument("SystemModel: stacked noise shape must be symmetric");
    stacked_noise_shape_ = symmetrized(stacked_noise_shape_);
    Eigen::LLT<Matrix> llt(stacked_noise_shape_);
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument("SystemModel: stacked noise shape must be positive definite");
  }

  static SystemModel with_block_diagonal_noise(std::vector<Matrix> transitions,
                                               const std::vector<Matrix>& step_noise) {
    if (transitions.size() != step_noise.size())
      throw std::invalid_argument("SystemModel: one noise block per transition required");
    if (transitions.empty())
      throw std::invalid_argument("SystemModel: at least one transition matrix required");
    const Eigen::Index n = transitions.front().rows();
    const Eigen::Index total = n * static_cast<Eigen::Index>(transitions.size());
    Matrix q = Matrix::Zero(total, total);
    for (std::size_t i = 0; i < step_noise.size(); ++i) {
      if (step_noise[i].rows() != n || step_noise[i].cols() != n)
        throw std::invalid_argument("SystemModel: noise block dimensions disagree");
      q.block(static_cast<Eigen::Index>(i) * n, static_cast<Eigen::Index>(i) * n, n, n) =
          step_noise[i];
    }
    return SystemModel(std::move(transitions), std::move(q));
  }

  static SystemModel time_invariant(const Matrix& f, const Matrix& step_noise, int horizon) {
    if (horizon < 1) throw std::invalid_argument("SystemModel: horizon must be >= 1");
    return with_block_diagonal_noise(
        std::vector<Matrix>(static_cast<std::size_t>(horizon), f),
        std::vector<Matrix>(static_cast<std::size_t>(horizon), step_noise));
  }

  int horizon() const { return static_cast<int>(transitions_.size()); }
  Eigen::Index dim() const { return dim_; }

  const Matrix& transition(int k) const {
    if (k < 0 || k >= horizon())
      throw std::invalid_argument("SystemModel: transition index out of range");
    return transitions_[static_cast<std::size_t>(k)];
  }

  const Matrix& stacked_noise_shape() const { return stacked_noise_shape_; }

  /// Block (i, j) of the stacked noise shape, 0 <= i, j < horizon.
  Matrix noise_block(int i, int j) const {
    if (i < 0 || j < 0 || i >= horizon() || j >= horizon())
      throw std::invalid_argument("SystemModel: noise block index out of range");
    return stacked_noise_shape_.block(i * dim_, j * dim_, dim_, dim_);
  }

  Matrix step_noise_shape(int k) const { return noise_block(k, k); }

 private:
  std::vector<Matrix> transitions_;
  Matrix stacked_noise_shape_;
  Eigen::Index dim_ = 0;
};

namespace detail {
inline void check_step_range(const SystemModel& sys, int k, const char* what) {
  if (k < 1 || k > sys.horizon())
    throw std::invalid_argument(std::string(what) + ": step must be in 1..horizon");
}
}  // namespace detail

/// Composite transition taking the state at step `from` to the state at step
/// `to`; identity when from == to.
inline Matrix transition_product(const SystemModel& sys, int from, int to) {
  if (from < 0 || to > sys.horizon() || from > to)
    throw std::invalid_argument("transition_product: need 0 <= from <= to <= horizon");
  Matrix psi = Matrix::Identity(sys.dim(), sys.dim());
  for (int j = from; j < to; ++j) psi = sys.transition(j) * psi;
  return psi;
}

/// Horizontal stack of the composite transitions reaching the horizon from
/// steps k..N; the last block is the identity.
inline Matrix stacked_psi(const SystemModel& sys, int k) {
  detail::check_step_range(sys, k, "stacked_psi");
  const Eigen::Index n = sys.dim();
  const int last = sys.horizon();
  Matrix out(n, n * (last - k + 1));
  Matrix cur = Matrix::Identity(n, n);
  for (int i = last; i >= k; --i) {
    out.middleCols(static_cast<Eigen::Index>(i - k) * n, n) = cur;
    if (i > k) cur = cur * sys.transition(i - 1);
  }
  return out;
}

/// [I 0 ... 0] with one block per noise term remaining from step k on.
inline Matrix selector_g(const SystemModel& sys, int k) {
  detail::check_step_range(sys, k, "selector_g");
  const Eigen::Index n = sys.dim();
  Matrix g = Matrix::Zero(n, n * (sys.horizon() - k + 1));
  g.leftCols(n) = Matrix::Identity(n, n);
  return g;
}

/// Dense form of the tail selector picking noise blocks k-1..N-1 out of the
/// stacked vector. Computation paths slice directly; this form exists for
/// diagnostics and cross-checks.
inline Matrix selector_m(const SystemModel& sys, int k) {
  detail::check_step_range(sys, k, "selector_m");
  const Eigen::Index n = sys.dim();
  const Eigen::Index rows = n * (sys.horizon() - k + 1);
  Matrix m = Matrix::Zero(rows, n * sys.horizon());
  m.middleCols(static_cast<Eigen::Index>(k - 1) * n, rows) =
      Matrix::Identity(rows, rows);
  return m;
}

/// Tail noise blocks k-1..N-1 of a stacked vector.
inline Vector noise_tail(const SystemModel& sys, int k, const Vector& stacked) {
  detail::check_step_range(sys, k, "noise_tail");
  const Eigen::Index n = sys.dim();
  if (stacked.size() != n * sys.horizon())
    throw std::invalid_argument("noise_tail: stacked vector has wrong size");
  return stacked.tail(n * (sys.horizon() - k + 1));
}

/// Shape of the ellipsoid covering the tail noise vector (w_{k-1},...,w_{N-1}):
/// the trailing principal block of the stacked noise shape.
inline Matrix noise_cover_slice(const SystemModel& sys, int k) {
  detail::check_step_range(sys, k, "noise_cover_slice");
  const Eigen::Index len = sys.dim() * (sys.horizon() - k + 1);
  return sys.stacked_noise_shape().bottomRightCorner(len, len);
}

/// Accumulated noise between two steps: sum of composite transitions applied
/// to w_from..w_{to-1}; zero when from == to.
inline Vector residual_zeta(const SystemModel& sys, int from, int to,
                            const std::vector<Vector>& noises) {
  if (from < 0 || to > sys.horizon() || from > to)
    throw std::invalid_argument("residual_zeta: need 0 <= from <= to <= horizon");
  if (noises.size() != static_cast<std::size_t>(to - from))
    throw std::invalid_argument("residual_zeta: expected exactly to-from noise vectors");
  Vector zeta = Vector::Zero(sys.dim());
  for (int j = from; j < to; ++j) {
    const Vector& w = noises[static_cast<std::size_t>(j - from)];
    if (w.size() != sys.dim())
      throw std::invalid_argument("residual_zeta: noise vector has wrong dimension");
    zeta += transition_product(sys, j + 1, to) * w;
  }
  return zeta;
}

}  // namespace descon

#pragma once

#include "descon/ellipsoid.hpp"
#include "descon/weights.hpp"

#include <utility>
#include <vector>

namespace descon {

/// Coefficients of one step of the destination-constrained model:
///   x_k = f_bar x_{k-1} + d_bar + xi w_{k-1} + sum_j phis[j] w_{k+j}.
/// The step references future noise terms, so a whole stacked draw must exist
/// before any step is applied.
struct ReconstructedStep {
  Matrix f_bar;
  Vector d_bar;
  Matrix xi;
  std::vector<Matrix> phis;  // coefficients of w_k .. w_{N-1}
  Matrix gain;               // B: the constraint gain the coefficients share
};

/// One stacked draw of the whole noise vector (w_0, ..., w_{N-1}).
struct NoiseDraw {
  Vector w0;

  static NoiseDraw zero(const SystemModel& sys) {
    return {Vector::Zero(sys.dim() * sys.horizon())};
  }

  Vector block(Eigen::Index n, int j) const { return w0.segment(j * n, n); }
};

enum class TrajectoryKind { constrained, relaxed };

/// State history, one row per step (row 0 is the start state), SI units.
struct Trajectory {
  Matrix states;
  TrajectoryKind kind;
};

/// Chooses the weight used at each step of a constrained rollout.
class WeightPolicy {
 public:
  static WeightPolicy optimal() { return WeightPolicy(Mode::optimal); }
  static WeightPolicy identity() { return WeightPolicy(Mode::identity); }
  static WeightPolicy custom(std::vector<WeightBlocks> per_step) {
    WeightPolicy p(Mode::custom);
    p.custom_ = std::move(per_step);
    return p;
  }

  WeightBlocks at(const SystemModel& sys, int k) const {
    detail::check_step_range(sys, k, "WeightPolicy::at");
    switch (mode_) {
      case Mode::optimal:
        return optimal_weight(sys, k);
      case Mode::identity:
        return WeightBlocks::identity(sys.dim());
      case Mode::custom:
        if (custom_.size() != static_cast<std::size_t>(sys.horizon()))
          throw std::invalid_argument("WeightPolicy: need one custom weight per step");
        return custom_[static_cast<std::size_t>(k - 1)];
    }
    throw std::logic_error("WeightPolicy: unreachable");
  }

 private:
  enum class Mode { optimal, identity, custom };
  explicit WeightPolicy(Mode m) : mode_(m) {}
  Mode mode_;
  std::vector<WeightBlocks> custom_;
};

/// Assemble the step-k coefficients of the constrained model from a weight.
inline ReconstructedStep build_step(const SystemModel& sys, const DestinationConstraint& dc,
                                    const WeightBlocks& w, int k) {
  detail::check_step_range(sys, k, "build_step");
  if (dc.dim() != sys.dim())
    throw std::invalid_argument("build_step: constraint dimension mismatch");
  const Eigen::Index n = sys.dim();
  const int last = sys.horizon();
  Matrix b = constraint_gain(dc, w);
  Matrix xi = Matrix::Identity(n, n) - b * transition_product(sys, k, last);
  Matrix f_bar = xi * sys.transition(k - 1);
  Vector d_bar = b * (pseudoinverse(dc.matrix()) * dc.rhs());
  std::vector<Matrix> phis;
  phis.reserve(static_cast<std::size_t>(last - k));
  for (int j = k; j < last; ++j) phis.push_back(-b * transition_product(sys, j + 1, last));
  return {std::move(f_bar), std::move(d_bar), std::move(xi), std::move(phis), std::move(b)};
}

/// Advance the state one step, consuming the draw's slices w_{k-1}..w_{N-1}.
inline Vector apply_step(const Vector& x_prev, const ReconstructedStep& rs,
                         const NoiseDraw& draw, int k) {
  const Eigen::Index n = rs.xi.rows();
  if (x_prev.size() != n) throw std::invalid_argument("apply_step: state dimension mismatch");
  const Eigen::Index expected = n * (static_cast<Eigen::Index>(k) +
                                     static_cast<Eigen::Index>(rs.phis.size()));
  if (draw.w0.size() != expected)
    throw std::invalid_argument("apply_step: noise draw has wrong size for this step");
  Vector x = rs.f_bar * x_prev + rs.d_bar + rs.xi * draw.block(n, k - 1);
  for (std::size_t i = 0; i < rs.phis.size(); ++i)
    x += rs.phis[i] * draw.block(n, k + static_cast<int>(i));
  return x;
}

/// Roll the constrained model from x0 to the horizon under one stacked draw.
inline Trajectory rollout(const SystemModel& sys, const DestinationConstraint& dc,
                          const WeightPolicy& policy, const Vector& x0, const NoiseDraw& draw) {
  if (x0.size() != sys.dim()) throw std::invalid_argument("rollout: start state has wrong size");
  if (draw.w0.size() != sys.dim() * sys.horizon())
    throw std::invalid_argument("rollout: noise draw has wrong size");
  Matrix states(sys.horizon() + 1, sys.dim());
  states.row(0) = x0.transpose();
  Vector x = x0;
  for (int k = 1; k <= sys.horizon(); ++k) {
    const ReconstructedStep rs = build_step(sys, dc, policy.at(sys, k), k);
    x = apply_step(x, rs, draw, k);
    states.row(k) = x.transpose();
  }
  return {std::move(states), TrajectoryKind::constrained};
}

/// Roll the plain model x_k = F_{k-1} x_{k-1} + w_{k-1} under the same draw.
inline Trajectory rollout_unconstrained(const SystemModel& sys, const Vector& x0,
                                        const NoiseDraw& draw) {
  if (x0.size() != sys.dim())
    throw std::invalid_argument("rollout_unconstrained: start state has wrong size");
  if (draw.w0.size() != sys.dim() * sys.horizon())
    throw std::invalid_argument("rollout_unconstrained: noise draw has wrong size");
  Matrix states(sys.horizon() + 1, sys.dim());
  states.row(0) = x0.transpose();
  Vector x = x0;
  for (int k = 1; k <= sys.horizon(); ++k) {
    x = sys.transition(k - 1) * x + draw.block(sys.dim(), k - 1);
    states.row(k) = x.transpose();
  }
  return {std::move(states), TrajectoryKind::relaxed};
}

/// Draw one stacked noise vector from the system's bounding ellipsoid.
inline NoiseDraw draw_noise(const SystemModel& sys, Rng& rng, RadialMode mode) {
  const Ellipsoid cover(Vector::Zero(sys.dim() * sys.horizon()), sys.stacked_noise_shape());
  return {sample_point(cover, rng, mode)};
}

inline bool noise_draw_contained(const SystemModel& sys, const NoiseDraw& draw,
                                 double tol = 1e-9) {
  const Ellipsoid cover(Vector::Zero(sys.dim() * sys.horizon()), sys.stacked_noise_shape());
  return contains(cover, draw.w0, tol);
}

}  // namespace descon

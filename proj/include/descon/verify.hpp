#pragma once

#include "descon/reconstruct.hpp"

#include <array>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace descon {

/// Machine-checkable result of one property check. Margins are normalized so
/// that the report passes exactly when every margin is >= -tolerance:
/// semidefinite-order margins are divided by the spectral scale of the
/// dominating side, and equality-residual checks enter as
/// -tolerance * (rel_err / eq_tol).
struct VerificationReport {
  int proposition = 0;
  std::string scenario;
  double tolerance = 1e-8;
  std::vector<double> margins;
  bool pass = false;
};

inline VerificationReport finalize_report(int proposition, std::string scenario, double tol,
                                          std::vector<double> margins) {
  bool pass = true;
  for (double m : margins) pass = pass && m >= -tol;
  return {proposition, std::move(scenario), tol, std::move(margins), pass};
}

inline double equality_margin(double rel_err, double eq_tol, double report_tol) {
  return -report_tol * (rel_err / eq_tol);
}

/// Normalized margin of A <= B in the semidefinite order.
inline double loewner_margin(const Matrix& a, const Matrix& b) {
  return min_eigenvalue(symmetrized(b - a)) / (1.0 + max_abs_eigenvalue(b));
}

inline double relative_error(const Matrix& actual, const Matrix& expected) {
  return max_abs(actual - expected) / (1.0 + max_abs(expected));
}

/// Weighted projection onto {x : Dblock x = d} solved through the stationarity
/// system [[W^{-1}, Dblock^T], [Dblock, 0]] — deliberately a different route
/// than the projector-based closed form below, so the two can cross-check.
inline Vector project_onto_constraint_kkt(const Matrix& w, const BlockConstraint& bc,
                                          const Vector& d, const Vector& x) {
  const Eigen::Index n2 = x.size();
  const Eigen::Index m = bc.rows();
  if (w.rows() != n2 || w.cols() != n2 || bc.dim() != n2 || d.size() != m)
    throw std::invalid_argument("project_onto_constraint_kkt: dimension mismatch");
  const Matrix winv = spd_solve(w, Matrix::Identity(n2, n2), "project_onto_constraint_kkt");
  Matrix kkt = Matrix::Zero(n2 + m, n2 + m);
  kkt.topLeftCorner(n2, n2) = winv;
  kkt.topRightCorner(n2, m) = bc.matrix().transpose();
  kkt.bottomLeftCorner(m, n2) = bc.matrix();
  Vector rhs(n2 + m);
  rhs.head(n2) = winv * x;
  rhs.tail(m) = d;
  Eigen::FullPivLU<Matrix> lu(kkt);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible())
    throw std::runtime_error("project_onto_constraint_kkt: singular KKT system");
  return lu.solve(rhs).head(n2);
}

/// Closed-form counterpart assembled from the oblique projector.
inline Vector project_onto_constraint_closed(const Matrix& w, const BlockConstraint& bc,
                                             const Vector& d, const Vector& x) {
  const Matrix a = projector(w, bc);
  return a * x + (Matrix::Identity(a.rows(), a.cols()) - a) * (pseudoinverse(bc.matrix()) * d);
}

/// Random nonsingular-transition system with a random positive definite
/// stacked noise shape; used to randomize property checks.
inline SystemModel random_system(Rng& rng, int n, int horizon, double cond_cap = 1e4) {
  std::vector<Matrix> transitions;
  transitions.reserve(static_cast<std::size_t>(horizon));
  for (int k = 0; k < horizon; ++k) {
    Matrix f;
    while (true) {
      f = Matrix::Identity(n, n) + 0.5 * normal_matrix(rng, n, n);
      Eigen::FullPivLU<Matrix> lu(f);
      lu.setThreshold(1e-9);
      if (lu.isInvertible()) break;
    }
    transitions.push_back(std::move(f));
  }
  return SystemModel(std::move(transitions),
                     random_spd(rng, static_cast<Eigen::Index>(n) * horizon, cond_cap));
}

/// Random full-row-rank destination constraint with a random right-hand side.
inline DestinationConstraint random_destination(Rng& rng, int m, int n) {
  while (true) {
    Matrix d = normal_matrix(rng, m, n);
    Eigen::ColPivHouseholderQR<Matrix> qr(d);
    if (qr.rank() == m) return DestinationConstraint(std::move(d), normal_vector(rng, m));
  }
}

/// Proposition 1 oracle check: the KKT solve and the projector closed form
/// must agree on random weighted projections. Margins are -rel_err per
/// instance.
inline VerificationReport check_projection_oracle(Rng& rng, int instances_per_case = 100,
                                                  double tol = 1e-8) {
  const std::array<std::pair<int, int>, 3> cases{{{2, 1}, {4, 3}, {4, 4}}};
  std::vector<double> margins;
  margins.reserve(cases.size() * static_cast<std::size_t>(instances_per_case));
  for (const auto& [n, m] : cases) {
    for (int i = 0; i < instances_per_case; ++i) {
      const Matrix w = random_spd(rng, 2 * n, 1e6);
      const DestinationConstraint dc = random_destination(rng, m, n);
      const BlockConstraint bc(dc);
      const Vector d = normal_vector(rng, m);
      const Vector x = normal_vector(rng, 2 * n);
      const Vector via_kkt = project_onto_constraint_kkt(w, bc, d, x);
      const Vector closed = project_onto_constraint_closed(w, bc, d, x);
      margins.push_back(-(via_kkt - closed).norm() / (1.0 + closed.norm()));
    }
  }
  return finalize_report(
      1, "random combined-state projections, (state,constraint) dims {(2,1),(4,3),(4,4)}", tol,
      std::move(margins));
}

/// Proposition 2 check at one step: no feasible weight produces a smaller
/// noise cover than the candidate (default: the optimal weight). The optimal
/// weight itself is always evaluated as competitor #0.
inline VerificationReport check_optimality(const SystemModel& sys,
                                           const DestinationConstraint& dc, int k,
                                           int num_competitors, Rng& rng, double tol = 1e-8,
                                           const WeightBlocks* candidate = nullptr) {
  const WeightBlocks best = optimal_weight(sys, k);
  const Matrix q_candidate = process_noise_shape(sys, dc, candidate ? *candidate : best, k);
  std::vector<double> margins;
  margins.reserve(static_cast<std::size_t>(num_competitors) + 1);
  margins.push_back(loewner_margin(q_candidate, process_noise_shape(sys, dc, best, k)));
  for (int i = 0; i < num_competitors; ++i) {
    const WeightBlocks competitor = random_feasible_weight(rng, sys, k);
    margins.push_back(loewner_margin(q_candidate, process_noise_shape(sys, dc, competitor, k)));
  }
  std::ostringstream scenario;
  scenario << "weight optimality at step " << k << ", " << num_competitors
           << " random competitors";
  return finalize_report(2, scenario.str(), tol, std::move(margins));
}

/// Proposition 3 check: at every step the constrained model's noise cover sits
/// below the unconstrained one, and the gap equals the explicit rank-m
/// correction (checked entrywise at 1e-9 relative).
inline VerificationReport check_cover_shrinkage(const SystemModel& sys,
                                                const DestinationConstraint& dc,
                                                double tol = 1e-8) {
  std::vector<double> margins;
  margins.reserve(2 * static_cast<std::size_t>(sys.horizon()));
  const Matrix& d = dc.matrix();
  for (int k = 1; k <= sys.horizon(); ++k) {
    const WeightBlocks w = optimal_weight(sys, k);
    const Matrix q_eta = process_noise_shape(sys, dc, w, k);
    const Matrix q_prev = sys.step_noise_shape(k - 1);
    margins.push_back(loewner_margin(q_eta, q_prev));
    const Matrix cross = d * w.w2.transpose();
    const Matrix gap = symmetrized(
        cross.transpose() * spd_solve(d * w.w3 * d.transpose(), cross, "check_cover_shrinkage"));
    margins.push_back(equality_margin(relative_error(q_prev - q_eta, gap), 1e-9, tol));
  }
  std::ostringstream scenario;
  scenario << "noise cover vs unconstrained model, horizon " << sys.horizon();
  return finalize_report(3, scenario.str(), tol, std::move(margins));
}

/// Proposition 4 check for a time-invariant system with an invertible
/// terminal constraint matrix: the optimal noise cover shrinks monotonically,
/// matches its closed form, and vanishes at the final step.
inline VerificationReport check_monotone_shrinkage(const Matrix& f, const Matrix& q,
                                                   const Matrix& d_matrix, int horizon,
                                                   double tol = 1e-8) {
  if (d_matrix.rows() != d_matrix.cols())
    throw std::invalid_argument(
        "check_monotone_shrinkage: terminal constraint matrix must be square and invertible");
  {
    Eigen::FullPivLU<Matrix> lu(d_matrix);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible())
      throw std::invalid_argument(
          "check_monotone_shrinkage: terminal constraint matrix must be square and invertible");
  }
  const SystemModel sys = SystemModel::time_invariant(f, q, horizon);
  const DestinationConstraint dc(d_matrix, Vector::Zero(d_matrix.rows()));

  std::vector<Matrix> covers;
  covers.reserve(static_cast<std::size_t>(horizon));
  for (int k = 1; k <= horizon; ++k)
    covers.push_back(process_noise_shape(sys, dc, optimal_weight(sys, k), k));

  std::vector<double> margins;
  for (int k = 1; k < horizon; ++k)
    margins.push_back(loewner_margin(covers[static_cast<std::size_t>(k)],
                                     covers[static_cast<std::size_t>(k - 1)]));

  // Closed form: Q - Q (F^{N-k})^T (sum_{i=k}^{N} F^{N-i} Q (F^{N-i})^T)^{-1} F^{N-k} Q.
  for (int k = 1; k <= horizon; ++k) {
    Matrix sum = Matrix::Zero(q.rows(), q.cols());
    Matrix power = Matrix::Identity(q.rows(), q.cols());  // F^{N-i}, from i = N down to k
    for (int i = horizon; i >= k; --i) {
      sum += power * q * power.transpose();
      if (i > k) power = f * power;
    }
    const Matrix cross = power * q;  // F^{N-k} Q
    const Matrix closed =
        symmetrized(q - cross.transpose() *
                            spd_solve(sum, cross, "check_monotone_shrinkage"));
    margins.push_back(equality_margin(
        relative_error(covers[static_cast<std::size_t>(k - 1)], closed), 1e-8, tol));
  }

  margins.push_back(-max_abs(covers.back()) / (1.0 + max_abs(q)));

  std::ostringstream scenario;
  scenario << "monotone cover shrinkage, time-invariant " << q.rows() << "-dim system, horizon "
           << horizon;
  return finalize_report(4, scenario.str(), tol, std::move(margins));
}

/// Per-step scalar comparison of two weight choices; log-determinants are
/// reported only when both covers are nonsingular.
struct TraceComparison {
  int k = 0;
  double trace_a = 0.0;
  double trace_b = 0.0;
  std::optional<double> logdet_a;
  std::optional<double> logdet_b;
};

inline std::vector<TraceComparison> compare_traces(const SystemModel& sys,
                                                   const DestinationConstraint& dc,
                                                   const WeightPolicy& policy_a,
                                                   const WeightPolicy& policy_b) {
  std::vector<TraceComparison> out;
  out.reserve(static_cast<std::size_t>(sys.horizon()));
  for (int k = 1; k <= sys.horizon(); ++k) {
    const Matrix qa = process_noise_shape(sys, dc, policy_a.at(sys, k), k);
    const Matrix qb = process_noise_shape(sys, dc, policy_b.at(sys, k), k);
    TraceComparison cmp;
    cmp.k = k;
    cmp.trace_a = qa.trace();
    cmp.trace_b = qb.trace();
    const Vector eva = symmetric_eigenvalues(qa);
    const Vector evb = symmetric_eigenvalues(qb);
    const double cut_a = 1e-12 * (1.0 + std::max(0.0, eva.maxCoeff()));
    const double cut_b = 1e-12 * (1.0 + std::max(0.0, evb.maxCoeff()));
    if (eva.minCoeff() > cut_a && evb.minCoeff() > cut_b) {
      cmp.logdet_a = eva.array().log().sum();
      cmp.logdet_b = evb.array().log().sum();
    }
    out.push_back(cmp);
  }
  return out;
}

}  // namespace descon

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace descon {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Rng = std::mt19937_64;

inline Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_symmetric(const Matrix& m, double rel_tol = 1e-12) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m - m.transpose()) <= rel_tol * (1.0 + max_abs(m));
}

inline Vector symmetric_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(m), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalue computation failed");
  return es.eigenvalues();
}

inline double min_eigenvalue(const Matrix& m) { return symmetric_eigenvalues(m).minCoeff(); }

inline double max_abs_eigenvalue(const Matrix& m) {
  const Vector ev = symmetric_eigenvalues(m);
  return std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()));
}

/// Solve S X = B for symmetric positive definite S; throws otherwise.
inline Matrix spd_solve(const Matrix& s, const Matrix& b, const char* what) {
  Eigen::LLT<Matrix> llt(symmetrized(s));
  if (llt.info() != Eigen::Success)
    throw std::runtime_error(std::string(what) + ": matrix is not positive definite");
  return llt.solve(b);
}

// 53-bit uniform draw in [0, 1); bit-stable across standard library implementations.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Standard normal via the Marsaglia polar method.
inline double normal_unit(Rng& rng) {
  while (true) {
    const double u = 2.0 * uniform_unit(rng) - 1.0;
    const double v = 2.0 * uniform_unit(rng) - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

inline Vector normal_vector(Rng& rng, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal_unit(rng);
  return v;
}

inline Matrix normal_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal_unit(rng);
  return m;
}

/// Random symmetric positive definite matrix with condition number capped near cond_cap.
inline Matrix random_spd(Rng& rng, Eigen::Index n, double cond_cap = 1e6) {
  const Matrix g = normal_matrix(rng, n, n);
  Matrix s = symmetrized(g * g.transpose());
  const double lam_max = std::max(max_abs_eigenvalue(s), 1e-30);
  s += (lam_max / cond_cap) * Matrix::Identity(n, n);
  return symmetrized(s);
}

}  // namespace descon

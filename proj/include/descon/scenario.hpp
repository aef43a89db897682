#pragma once

#include "descon/reconstruct.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace descon {

inline constexpr double kPi = 3.14159265358979323846;

enum class WeightMode { optimal, identity };

/// Planar flight scenario: almost-constant-velocity kinematics with an
/// acceleration-scaled noise shape, a destination, and an arrival heading.
/// State ordering is (x, vx, y, vy) in SI units.
struct ScenarioConfig {
  int horizon = 50;
  double dt = 1.0;     // seconds
  double accel = 9.8;  // m/s^2, scales the noise shape
  std::array<double, 4> x0{0.0, 240.0, 10000.0, 0.0};
  double dest_x = 12000.0;  // m
  double dest_y = 0.0;      // m
  double theta_deg = 90.0;  // arrival heading, degrees clockwise from east
  int trajectory_count = 8;
  std::uint64_t seed = 42;
  WeightMode weight_mode = WeightMode::optimal;
  RadialMode radial_mode = RadialMode::uniform_ball;
  bool emit_relaxed = false;      // also roll out the unconstrained model
  bool compare_identity = false;  // add a batch with identity weights
  std::vector<std::array<double, 2>> origins;       // per-set start positions
  std::vector<std::array<double, 2>> destinations;  // per-set destinations
  std::optional<Matrix> q_step;  // overrides the per-step noise shape (4x4)
  std::optional<Matrix> q_full;  // overrides the whole stacked noise shape
  std::string label = "trajectories";

  void validate() const {
    if (horizon < 1) throw std::invalid_argument("config: scenario.horizon must be >= 1");
    if (!(dt > 0.0)) throw std::invalid_argument("config: scenario.dt must be positive");
    if (trajectory_count < 1)
      throw std::invalid_argument("config: run.trajectories must be >= 1");
    if (!origins.empty() && !destinations.empty())
      throw std::invalid_argument(
          "config: scenario.origins and scenario.destinations cannot both be set");
    if (q_step && (q_step->rows() != 4 || q_step->cols() != 4))
      throw std::invalid_argument("config: noise.q_step must be a 4x4 matrix");
    if (q_full) {
      const Eigen::Index total = 4 * static_cast<Eigen::Index>(horizon);
      if (q_full->rows() != total || q_full->cols() != total)
        throw std::invalid_argument("config: noise.q_full must be 4*horizon square");
    }
  }
};

inline Matrix cv_transition(double dt) {
  Matrix f = Matrix::Identity(4, 4);
  f(0, 1) = dt;
  f(2, 3) = dt;
  return f;
}

inline Matrix cv_noise_block(double dt, double accel) {
  Matrix q = Matrix::Zero(4, 4);
  const double a = dt * dt * dt / 3.0;
  const double b = dt * dt / 2.0;
  q(0, 0) = a;
  q(0, 1) = b;
  q(1, 0) = b;
  q(1, 1) = dt;
  q.bottomRightCorner(2, 2) = q.topLeftCorner(2, 2);
  return accel * accel * q;
}

inline SystemModel make_system(const ScenarioConfig& c) {
  c.validate();
  const Matrix f = cv_transition(c.dt);
  if (c.q_full)
    return SystemModel(std::vector<Matrix>(static_cast<std::size_t>(c.horizon), f), *c.q_full);
  const Matrix q = c.q_step ? *c.q_step : cv_noise_block(c.dt, c.accel);
  return SystemModel::time_invariant(f, q, c.horizon);
}

inline double theta_radians(const ScenarioConfig& c) { return c.theta_deg * kPi / 180.0; }

inline DestinationConstraint make_constraint(const ScenarioConfig& c, double dest_x,
                                             double dest_y) {
  return heading_constraint(dest_x, dest_y, theta_radians(c));
}

inline DestinationConstraint make_constraint(const ScenarioConfig& c) {
  return make_constraint(c, c.dest_x, c.dest_y);
}

inline ScenarioConfig preset(const std::string& name) {
  ScenarioConfig c;
  c.label = name;
  if (name == "fig2") {
    c.emit_relaxed = true;
  } else if (name == "fig3") {
    c.theta_deg = 0.0;
    c.emit_relaxed = true;
  } else if (name == "fig8") {
    c.compare_identity = true;
  } else if (name == "fig9") {
    c.trajectory_count = 5;
    c.origins = {{{0.0, 10000.0}, {-2000.0, 6000.0}, {2000.0, 14000.0}}};
  } else if (name == "fig10") {
    c.trajectory_count = 5;
    c.destinations = {{{9000.0, 0.0}, {12000.0, 0.0}, {15000.0, 0.0}}};
  } else {
    throw std::invalid_argument("unknown preset: " + name);
  }
  return c;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<double> parse_numbers(const std::string& value, const std::string& key) {
  std::istringstream in(value);
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  if (!in.eof()) throw std::invalid_argument("config: cannot parse numbers for " + key);
  return out;
}

inline std::vector<std::array<double, 2>> parse_pairs(const std::string& value,
                                                      const std::string& key) {
  std::vector<std::array<double, 2>> out;
  std::istringstream groups(value);
  std::string group;
  while (std::getline(groups, group, ';')) {
    const auto nums = parse_numbers(group, key);
    if (nums.size() != 2)
      throw std::invalid_argument("config: " + key + " entries must be 'x y' pairs");
    out.push_back({nums[0], nums[1]});
  }
  return out;
}

inline bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("config: " + key + " must be true or false");
}

inline Matrix parse_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open matrix file " + path.string());
  std::vector<double> values;
  double v;
  while (in >> v) values.push_back(v);
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(double(values.size()))));
  if (n * n != static_cast<Eigen::Index>(values.size()))
    throw std::invalid_argument("config: matrix file " + path.string() + " is not square");
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = values[static_cast<std::size_t>(i * n + j)];
  return m;
}

}  // namespace detail

/// Flat key=value config with dotted section keys; '#' starts a comment.
inline ScenarioConfig parse_config(std::istream& in, ScenarioConfig base = ScenarioConfig{}) {
  ScenarioConfig c = std::move(base);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: missing '=' on line " + std::to_string(line_no));
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));

    if (key == "scenario.horizon") {
      c.horizon = std::stoi(value);
    } else if (key == "scenario.dt") {
      c.dt = std::stod(value);
    } else if (key == "scenario.accel") {
      c.accel = std::stod(value);
    } else if (key == "scenario.x0") {
      const auto nums = detail::parse_numbers(value, key);
      if (nums.size() != 4)
        throw std::invalid_argument("config: scenario.x0 needs 4 values (x vx y vy)");
      for (int i = 0; i < 4; ++i) c.x0[static_cast<std::size_t>(i)] = nums[static_cast<std::size_t>(i)];
    } else if (key == "scenario.dest") {
      const auto nums = detail::parse_numbers(value, key);
      if (nums.size() != 2) throw std::invalid_argument("config: scenario.dest needs 2 values");
      c.dest_x = nums[0];
      c.dest_y = nums[1];
    } else if (key == "scenario.theta_deg") {
      c.theta_deg = std::stod(value);
    } else if (key == "scenario.origins") {
      c.origins = detail::parse_pairs(value, key);
    } else if (key == "scenario.destinations") {
      c.destinations = detail::parse_pairs(value, key);
    } else if (key == "run.trajectories") {
      c.trajectory_count = std::stoi(value);
    } else if (key == "run.seed") {
      c.seed = std::stoull(value);
    } else if (key == "run.weight_mode") {
      if (value == "optimal")
        c.weight_mode = WeightMode::optimal;
      else if (value == "identity")
        c.weight_mode = WeightMode::identity;
      else
        throw std::invalid_argument("config: run.weight_mode must be optimal or identity");
    } else if (key == "run.radial_mode") {
      if (value == "uniform_ball")
        c.radial_mode = RadialMode::uniform_ball;
      else if (value == "boundary")
        c.radial_mode = RadialMode::boundary;
      else
        throw std::invalid_argument("config: run.radial_mode must be uniform_ball or boundary");
    } else if (key == "run.relaxed") {
      c.emit_relaxed = detail::parse_bool(value, key);
    } else if (key == "run.compare_identity") {
      c.compare_identity = detail::parse_bool(value, key);
    } else if (key == "noise.q_step") {
      const auto nums = detail::parse_numbers(value, key);
      if (nums.size() != 16)
        throw std::invalid_argument("config: noise.q_step needs 16 values (row-major 4x4)");
      Matrix q(4, 4);
      for (Eigen::Index i = 0; i < 4; ++i)
        for (Eigen::Index j = 0; j < 4; ++j) q(i, j) = nums[static_cast<std::size_t>(i * 4 + j)];
      c.q_step = q;
    } else if (key == "noise.q_full") {
      c.q_full = detail::parse_matrix_file(value);
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

inline ScenarioConfig load_config(const std::filesystem::path& path,
                                  ScenarioConfig base = ScenarioConfig{}) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path.string());
  ScenarioConfig c = parse_config(in, std::move(base));
  if (c.label == "trajectories") c.label = path.stem().string();
  return c;
}

}  // namespace descon

#pragma once

#include "descon/io.hpp"
#include "descon/scenario.hpp"

#include <filesystem>
#include <utility>

namespace descon {

// Seed-stream tags: 0 primary constrained batch, 1 relaxed batch, 2 identity
// comparison batch; 10+ are reserved for verification sweeps.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

/// All trajectories a config asks for, labeled and id'd in emission order.
inline std::vector<LabeledTrajectory> simulate_trajectories(const ScenarioConfig& cfg) {
  cfg.validate();
  const SystemModel sys = make_system(cfg);

  struct SetSpec {
    Vector x0;
    DestinationConstraint dc;
  };
  std::vector<SetSpec> sets;
  Vector base_x0(4);
  base_x0 << cfg.x0[0], cfg.x0[1], cfg.x0[2], cfg.x0[3];
  if (!cfg.origins.empty()) {
    for (const auto& o : cfg.origins) {
      Vector x0 = base_x0;
      x0[0] = o[0];
      x0[2] = o[1];
      sets.push_back({std::move(x0), make_constraint(cfg)});
    }
  } else if (!cfg.destinations.empty()) {
    for (const auto& d : cfg.destinations)
      sets.push_back({base_x0, make_constraint(cfg, d[0], d[1])});
  } else {
    sets.push_back({base_x0, make_constraint(cfg)});
  }

  const WeightPolicy primary = cfg.weight_mode == WeightMode::identity
                                   ? WeightPolicy::identity()
                                   : WeightPolicy::optimal();

  std::vector<LabeledTrajectory> out;
  long next_id = 0;
  for (const auto& set : sets) {
    for (int i = 0; i < cfg.trajectory_count; ++i) {
      Rng rng = make_rng(cfg.seed, 0, static_cast<std::uint64_t>(next_id));
      const NoiseDraw draw = draw_noise(sys, rng, cfg.radial_mode);
      out.push_back({next_id, "constrained", rollout(sys, set.dc, primary, set.x0, draw).states});
      ++next_id;
    }
  }
  if (cfg.compare_identity) {
    for (const auto& set : sets) {
      for (int i = 0; i < cfg.trajectory_count; ++i) {
        Rng rng = make_rng(cfg.seed, 2, static_cast<std::uint64_t>(next_id));
        const NoiseDraw draw = draw_noise(sys, rng, cfg.radial_mode);
        out.push_back({next_id, "constrained",
                       rollout(sys, set.dc, WeightPolicy::identity(), set.x0, draw).states});
        ++next_id;
      }
    }
  }
  if (cfg.emit_relaxed) {
    for (const auto& set : sets) {
      for (int i = 0; i < cfg.trajectory_count; ++i) {
        Rng rng = make_rng(cfg.seed, 1, static_cast<std::uint64_t>(next_id));
        const NoiseDraw draw = draw_noise(sys, rng, cfg.radial_mode);
        out.push_back({next_id, "relaxed", rollout_unconstrained(sys, set.x0, draw).states});
        ++next_id;
      }
    }
  }
  return out;
}

struct SimulateResult {
  std::filesystem::path csv;
  int trajectory_count = 0;
};

/// Write one CSV per run: <out_dir>/<label>.csv with the exact schema header.
inline SimulateResult run_simulate(const ScenarioConfig& cfg,
                                   const std::filesystem::path& out_dir) {
  const auto trajectories = simulate_trajectories(cfg);
  std::filesystem::create_directories(out_dir);
  const auto path = out_dir / (cfg.label + ".csv");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + path.string());
  write_trajectory_csv(out, trajectories, cfg.dt);
  out.flush();
  if (!out) throw std::runtime_error("cannot write output file " + path.string());
  return {path, static_cast<int>(trajectories.size())};
}

/// One verification report per requested proposition id.
/// w2_perturbation != 1 injects a corrupted candidate weight into the
/// optimality check (fault-injection hook for testing the failure path).
inline VerificationReport verify_proposition(const ScenarioConfig& cfg, int prop,
                                             double w2_perturbation = 1.0) {
  switch (prop) {
    case 1: {
      Rng rng = make_rng(cfg.seed, 10);
      return check_projection_oracle(rng);
    }
    case 2: {
      Rng rng = make_rng(cfg.seed, 11);
      std::vector<double> margins;
      const std::array<std::pair<int, int>, 4> combos{{{2, 3}, {2, 6}, {4, 3}, {4, 6}}};
      for (const auto& [n, horizon] : combos) {
        const SystemModel sys = random_system(rng, n, horizon);
        const DestinationConstraint dc = random_destination(rng, std::max(1, n - 1), n);
        const int per_step = (50 + horizon - 1) / horizon;
        for (int k = 1; k <= horizon; ++k) {
          WeightBlocks candidate = optimal_weight(sys, k);
          candidate.w2 *= w2_perturbation;
          const auto rep = check_optimality(sys, dc, k, per_step, rng, 1e-8,
                                            w2_perturbation == 1.0 ? nullptr : &candidate);
          margins.insert(margins.end(), rep.margins.begin(), rep.margins.end());
        }
      }
      return finalize_report(
          2, "weight optimality over random systems, dims {2,4} x horizons {3,6}", 1e-8,
          std::move(margins));
    }
    case 3:
      return check_cover_shrinkage(make_system(cfg), make_constraint(cfg));
    case 4: {
      const Matrix f1 = Matrix::Identity(1, 1);
      const Matrix q1 = Matrix::Identity(1, 1);
      const auto scalar = check_monotone_shrinkage(f1, q1, Matrix::Identity(1, 1), 5);
      Matrix f2 = Matrix::Identity(2, 2);
      f2(0, 1) = cfg.dt;
      const Matrix q2 = cv_noise_block(cfg.dt, cfg.accel).topLeftCorner(2, 2);
      const auto planar = check_monotone_shrinkage(f2, q2, Matrix::Identity(2, 2), 10);
      std::vector<double> margins = scalar.margins;
      margins.insert(margins.end(), planar.margins.begin(), planar.margins.end());
      return finalize_report(4, "monotone cover shrinkage, scalar and planar CV block", 1e-8,
                             std::move(margins));
    }
    default:
      throw std::invalid_argument("verify: propositions must be within 1..4");
  }
}

/// Exit-code semantics: 0 when all requested reports pass, 1 otherwise.
inline int run_verify(const ScenarioConfig& cfg, const std::vector<int>& props,
                      const std::filesystem::path& out_dir, double w2_perturbation = 1.0) {
  if (props.empty()) throw std::invalid_argument("verify: no propositions requested");
  std::filesystem::create_directories(out_dir);
  bool all_pass = true;
  for (int p : props) {
    const VerificationReport rep = verify_proposition(cfg, p, w2_perturbation);
    write_report(out_dir / ("prop" + std::to_string(p) + ".json"), rep);
    all_pass = all_pass && rep.pass;
  }
  return all_pass ? 0 : 1;
}

/// Render each CSV as a position-plane figure plus two velocity figures.
/// The destination marker is taken from the constrained trajectories'
/// terminal positions.
inline void emit_plot(const std::vector<std::filesystem::path>& csvs,
                      const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  for (const auto& csv : csvs) {
    std::ifstream in(csv);
    if (!in) throw std::runtime_error("cannot open csv " + csv.string());
    const auto rows = read_trajectory_csv(in);

    std::optional<std::array<double, 2>> marker;
    {
      std::map<long, TrajectorySample> terminal;
      for (const auto& r : rows)
        if (r.kind == "constrained") {
          auto it = terminal.find(r.id);
          if (it == terminal.end() || r.k > it->second.k) terminal[r.id] = r;
        }
      if (!terminal.empty()) {
        double sx = 0, sy = 0;
        for (const auto& [id, r] : terminal) {
          sx += r.x;
          sy += r.y;
        }
        marker = {{sx / static_cast<double>(terminal.size()),
                   sy / static_cast<double>(terminal.size())}};
      }
    }

    const std::string stem = csv.stem().string();
    const auto write_one = [&](const std::string& suffix, auto&& writer) {
      const auto path = out_dir / (stem + suffix);
      std::ofstream out(path);
      if (!out) throw std::runtime_error("cannot open svg " + path.string());
      writer(out);
      if (!out) throw std::runtime_error("cannot write svg " + path.string());
    };
    write_one("_xy.svg", [&](std::ostream& out) { write_xy_svg(out, rows, marker); });
    write_one("_vx.svg", [&](std::ostream& out) { write_velocity_svg(out, rows, true); });
    write_one("_vy.svg", [&](std::ostream& out) { write_velocity_svg(out, rows, false); });
  }
}

}  // namespace descon

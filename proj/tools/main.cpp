#include "descon/runner.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

// Exit codes: 0 success / all reports pass, 1 verification failure,
// 2 configuration error.
constexpr int kExitOk = 0;
constexpr int kExitVerifyFailure = 1;
constexpr int kExitConfigError = 2;

struct CommonArgs {
  std::string config_path;
  std::string preset_name;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_given = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "flat key=value config file");
  cmd->add_option("--preset", args.preset_name, "fig2|fig3|fig8|fig9|fig10");
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "random seed")->each([&](const std::string&) {
    args.seed_given = true;
  });
}

descon::ScenarioConfig resolve_config(const CommonArgs& args) {
  descon::ScenarioConfig cfg;
  if (!args.preset_name.empty()) cfg = descon::preset(args.preset_name);
  if (!args.config_path.empty()) cfg = descon::load_config(args.config_path, std::move(cfg));
  if (args.seed_given) cfg.seed = args.seed;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"destination-constrained trajectory modeling and verification"};
  app.require_subcommand(1);

  CommonArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "generate trajectory ensembles as CSV");
  add_common(simulate, sim_args);

  CommonArgs verify_args;
  std::vector<int> props{1, 2, 3, 4};
  double perturb_w2 = 1.0;
  auto* verify = app.add_subcommand("verify", "run property checks and write JSON reports");
  add_common(verify, verify_args);
  verify->add_option("--props", props, "subset of propositions 1..4 to check");
  verify
      ->add_option("--perturb-w2", perturb_w2,
                   "scale the candidate w2 block (fault injection; default 1 = off)")
      ->group("");

  CommonArgs plot_args;
  std::vector<std::string> csv_paths;
  auto* plot = app.add_subcommand("plot", "render trajectory CSVs as SVG figures");
  add_common(plot, plot_args);
  plot->add_option("csv", csv_paths, "trajectory CSV files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (simulate->parsed()) {
      const auto cfg = resolve_config(sim_args);
      const auto result = descon::run_simulate(cfg, sim_args.out_dir);
      std::cout << "wrote " << result.trajectory_count << " trajectories to "
                << result.csv.string() << '\n';
      return kExitOk;
    }
    if (verify->parsed()) {
      for (int p : props)
        if (p < 1 || p > 4) throw std::invalid_argument("verify: --props entries must be 1..4");
      const auto cfg = resolve_config(verify_args);
      const int rc = descon::run_verify(cfg, props, verify_args.out_dir, perturb_w2);
      for (int p : props)
        std::cout << "report: "
                  << (std::filesystem::path(verify_args.out_dir) /
                      ("prop" + std::to_string(p) + ".json"))
                         .string()
                  << '\n';
      return rc == 0 ? kExitOk : kExitVerifyFailure;
    }
    if (plot->parsed()) {
      std::vector<std::filesystem::path> paths;
      if (csv_paths.empty() && !plot_args.preset_name.empty())
        paths.push_back(std::filesystem::path(plot_args.out_dir) /
                        (plot_args.preset_name + ".csv"));
      for (const auto& p : csv_paths) paths.emplace_back(p);
      if (paths.empty()) throw std::invalid_argument("plot: no CSV inputs given");
      descon::emit_plot(paths, plot_args.out_dir);
      for (const auto& p : paths)
        std::cout << "plotted " << p.string() << '\n';
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
  return kExitConfigError;
}

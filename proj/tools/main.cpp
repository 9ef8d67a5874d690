#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "seesim/config.hpp"
#include "seesim/partitions.hpp"
#include "seesim/runner.hpp"

namespace {

int print_partitions(int k, bool proper) {
  auto parts = proper ? seesim::enumerate_proper_partitions(k) : seesim::enumerate_partitions(k);
  for (const auto& p : parts) {
    std::string line;
    for (size_t b = 0; b < p.blocks.size(); ++b) {
      if (b) line += "|";
      line += "{";
      for (size_t i = 0; i < p.blocks[b].size(); ++i) {
        if (i) line += ",";
        line += std::to_string(p.blocks[b][i]);
      }
      line += "}";
    }
    std::cout << line << "\n";
  }
  std::cout << "count=" << parts.size() << "\n";
  return 0;
}

seesim::ExperimentConfig load(const std::string& config_path, std::uint64_t* seed_override) {
  seesim::ExperimentConfig cfg = seesim::parse_config(config_path);
  if (seed_override) cfg.seed = *seed_override;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and verifier for derivative processes of semilinear "
               "stochastic evolution equations"};
  app.require_subcommand(1);

  int k = 0;
  bool proper = false;
  auto* sub_partitions = app.add_subcommand("partitions", "enumerate set partitions");
  sub_partitions->add_option("--k", k, "ground-set size")->required();
  sub_partitions->add_flag("--proper", proper, "exclude the single-block partition");

  std::string config_path, out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;

  auto add_common = [&](CLI::App* sub, bool needs_out) {
    sub->add_option("--config", config_path, "experiment config file")->required();
    if (needs_out) sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "seed override")->each([&](const std::string&) { seed_set = true; });
  };

  auto* sub_bounds = app.add_subcommand("bounds", "analytic constants");
  auto* sub_bounds_eval = sub_bounds->add_subcommand("eval", "print chi, Theta, iota as CSV");
  add_common(sub_bounds_eval, false);
  sub_bounds->require_subcommand(1);

  for (const char* name : {"simulate", "fd-check", "regularity", "lipschitz", "bound"})
    add_common(app.add_subcommand(name, "experiment"), true);

  std::string report_dir;
  auto* sub_report = app.add_subcommand("report", "aggregate summary files");
  sub_report->add_option("--out", report_dir, "directory holding experiment outputs")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sub_partitions) return print_partitions(k, proper);
    if (*sub_report) {
      std::cout << seesim::collect_report(report_dir);
      return 0;
    }
    seesim::ExperimentConfig cfg = load(config_path, seed_set ? &seed : nullptr);
    if (*sub_bounds) {
      std::cout << seesim::bounds_eval_csv(cfg);
      return 0;
    }
    for (const char* name : {"simulate", "fd-check", "regularity", "lipschitz", "bound"}) {
      if (app.got_subcommand(name)) return seesim::run_experiment(name, cfg, out_dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

#pragma once

#include <string>
#include <vector>

#include "seesim/config.hpp"

namespace seesim {

struct SummaryRow {
  bool pass = true;
  std::string criterion;
  double measured = 0.0;
  double threshold = 0.0;
};

/// Executes one experiment subcommand (simulate, fd-check, regularity,
/// lipschitz, bound), writing CSV artifacts, summary.csv, and manifest.txt
/// into out_dir. Returns 0 iff every summary row passes.
int run_experiment(const std::string& subcommand, const ExperimentConfig& cfg,
                   const std::string& out_dir);

/// `bounds eval`: chi, Theta, iota (and the certified bound) as CSV rows
/// `name,value` with 15 significant digits, returned as text.
std::string bounds_eval_csv(const ExperimentConfig& cfg);

/// Aggregates summary.csv files found directly under dir or its immediate
/// subdirectories into one report.
std::string collect_report(const std::string& dir);

}  // namespace seesim

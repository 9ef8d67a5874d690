#include "seesim/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "seesim/estimators.hpp"

namespace seesim {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v, int digits = 17) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

std::string subset_label(std::uint32_t mask, int k) {
  std::string out = "{";
  bool first = true;
  for (int i = 0; i < k; ++i) {
    if (mask & (1u << i)) {
      if (!first) out += ",";
      out += std::to_string(i + 1);
      first = false;
    }
  }
  return out + "}";
}

class Artifacts {
 public:
  explicit Artifacts(const std::string& out_dir) : dir_(out_dir) { fs::create_directories(dir_); }

  std::ofstream open(const std::string& name) {
    names_.push_back(name);
    std::ofstream f(dir_ / name);
    if (!f) throw std::runtime_error("cannot open output file " + (dir_ / name).string());
    return f;
  }

  void finalize(const ExperimentConfig& cfg, const std::vector<SummaryRow>& rows) {
    {
      std::ofstream s = open("summary.csv");
      s << "status,criterion,measured,threshold\n";
      for (const auto& r : rows)
        s << (r.pass ? "PASS" : "FAIL") << "," << r.criterion << "," << fmt(r.measured) << ","
          << fmt(r.threshold) << "\n";
    }
    std::ofstream m(dir_ / "manifest.txt");
    m << "config_hash=" << fnv1a_hex(cfg.canonical_text) << "\n";
    m << "seed=" << cfg.seed << "\n";
    std::vector<std::string> sorted = names_;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& n : sorted) m << "artifact=" << n << "\n";
  }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

void run_simulate(const ExperimentConfig& cfg, Artifacts& art, std::vector<SummaryRow>& rows) {
  std::ofstream csv = art.open("h_norm.csv");
  csv << "t,subset,sample,value\n";
  const Model& model = *cfg.model;
  for (int m = 0; m < cfg.samples; ++m) {
    NoiseSample noise = sample_noise(cfg.seed + m, cfg.grid, model.noise_modes());
    DerivativeSystem sys =
        simulate_system(cfg.op, model, cfg.grid, cfg.x, cfg.directions, cfg.k, noise);
    for (std::uint32_t mask = 0; mask < sys.paths.size(); ++mask) {
      std::string label = subset_label(mask, cfg.k);
      for (int t = 0; t <= cfg.grid.steps; ++t) {
        csv << fmt(cfg.grid.time(t)) << "," << label << "," << m << ","
            << fmt(sys.path(mask).row(t).norm()) << "\n";
      }
    }
  }
  rows.push_back({true, "simulate_complete", static_cast<double>(cfg.samples),
                  static_cast<double>(cfg.samples)});
}

void run_fd_check(const ExperimentConfig& cfg, Artifacts& art, std::vector<SummaryRow>& rows) {
  FdFrechetReport report =
      fd_frechet_check(cfg.op, *cfg.model, cfg.grid, cfg.x, cfg.directions, cfg.k, cfg.samples,
                       cfg.seed, cfg.eps_ladder, cfg.p);
  std::ofstream csv = art.open("fd_check.csv");
  csv << "eps,remainder\n";
  for (size_t i = 0; i < report.eps.size(); ++i)
    csv << fmt(report.eps[i]) << "," << fmt(report.remainder[i]) << "\n";

  double max_rem = *std::max_element(report.remainder.begin(), report.remainder.end());
  if (max_rem <= 1e-11) {
    rows.push_back({true, "fd_remainder_zero", max_rem, 1e-11});
    return;
  }
  rows.push_back({report.slope >= 0.9, "fd_slope", report.slope, 0.9});
  double decay = report.remainder.back() / report.remainder.front();
  rows.push_back({decay <= 0.02, "fd_decay", decay, 0.02});
}

void run_regularity(const ExperimentConfig& cfg, Artifacts& art, std::vector<SummaryRow>& rows) {
  RatioReport report = regularity_probe(cfg.op, *cfg.model, cfg.grid, cfg.x, cfg.k, cfg.deltas,
                                        cfg.p, cfg.samples, cfg.seed, cfg.mode_schedule,
                                        cfg.alpha, cfg.beta);
  {
    std::ofstream csv = art.open("regularity.csv");
    csv << "probe,t,ratio,std_error\n";
    for (size_t pr = 0; pr < report.probes.size(); ++pr) {
      std::string label;
      for (size_t i = 0; i < report.probes[pr].size(); ++i)
        label += (i ? "|" : "") + std::to_string(report.probes[pr][i]);
      for (size_t t = 0; t < report.times.size(); ++t)
        csv << label << "," << fmt(report.times[t]) << "," << fmt(report.ratios(pr, t)) << ","
            << fmt(report.std_errors(pr, t)) << "\n";
    }
  }

  // Per-probe sup of the weighted ratio; boundedness across the family is
  // the pass condition. The early-time unweighted ratio slope is reported.
  std::vector<double> sups;
  for (size_t pr = 0; pr < report.probes.size(); ++pr)
    sups.push_back(report.ratios.row(pr).maxCoeff());
  double vmax = *std::max_element(sups.begin(), sups.end());
  double vmin = *std::min_element(sups.begin(), sups.end());

  {
    std::ofstream csv = art.open("regularity_slopes.csv");
    csv << "probe,sup_weighted_ratio,unweighted_ratio_t1\n";
    std::vector<double> modes, unweighted;
    for (size_t pr = 0; pr < report.probes.size(); ++pr) {
      double uw = report.raw_norms(pr, 0);  // ||e_m||_H = 1 for eigenmode probes
      csv << report.probes[pr].front() << "," << fmt(sups[pr]) << "," << fmt(uw) << "\n";
      modes.push_back(report.probes[pr].front());
      unweighted.push_back(uw);
    }
    bool fittable = modes.size() >= 4;
    for (double u : unweighted)
      if (!(u > 0.0)) fittable = false;
    if (fittable) {
      OlsFit fit = exponent_fit(modes, unweighted);
      csv << "loglog_slope_vs_mode," << fmt(fit.slope) << ",\n";
    }
  }

  bool pass = vmin > 0.0 && vmax / vmin <= 10.0;
  rows.push_back({pass, "regularity_bounded", vmin > 0.0 ? vmax / vmin : INFINITY, 10.0});
}

void run_lipschitz(const ExperimentConfig& cfg, Artifacts& art, std::vector<SummaryRow>& rows) {
  Vec y = cfg.y ? *cfg.y : Vec(cfg.x + 0.5 * Vec::Unit(cfg.op.modes(), 0));
  std::vector<double> ratios;
  std::ofstream csv = art.open("lipschitz.csv");
  csv << "scale,ratio\n";
  for (double scale : {1.0, 0.5, 0.25}) {
    Vec yy = cfg.x + scale * (y - cfg.x);
    double r = lipschitz_probe(cfg.op, *cfg.model, cfg.grid, cfg.x, yy, cfg.directions, cfg.k,
                               cfg.deltas, cfg.p, cfg.samples, cfg.seed, cfg.alpha, cfg.beta);
    csv << fmt(scale) << "," << fmt(r) << "\n";
    ratios.push_back(r);
  }
  double vmax = *std::max_element(ratios.begin(), ratios.end());
  double vmin = *std::min_element(ratios.begin(), ratios.end());
  if (vmax <= 1e-11) {
    rows.push_back({true, "lipschitz_zero", vmax, 1e-11});
  } else {
    rows.push_back({vmax <= 1.25 * vmin, "lipschitz_stable", vmin > 0.0 ? vmax / vmin : INFINITY, 1.25});
  }
}

void run_bound(const ExperimentConfig& cfg, Artifacts& art, std::vector<SummaryRow>& rows) {
  BoundCheck check =
      check_apriori_bound(cfg.op, *cfg.model, cfg.grid, cfg.x, cfg.k, cfg.deltas, cfg.p,
                          cfg.samples, cfg.seed, cfg.mode_schedule, cfg.alpha, cfg.beta);
  std::ofstream csv = art.open("bound.csv");
  csv << "name,value\n";
  csv << "lhs," << fmt(check.lhs) << "\n";
  csv << "lhs_std_error," << fmt(check.lhs_std_error) << "\n";
  csv << "rhs," << fmt(check.rhs) << "\n";
  rows.push_back({check.pass, "apriori_bound", check.lhs, check.rhs + 3.0 * check.lhs_std_error});
}

}  // namespace

int run_experiment(const std::string& subcommand, const ExperimentConfig& cfg,
                   const std::string& out_dir) {
  Artifacts art(out_dir);
  std::vector<SummaryRow> rows;
  if (subcommand == "simulate") {
    run_simulate(cfg, art, rows);
  } else if (subcommand == "fd-check") {
    run_fd_check(cfg, art, rows);
  } else if (subcommand == "regularity") {
    run_regularity(cfg, art, rows);
  } else if (subcommand == "lipschitz") {
    run_lipschitz(cfg, art, rows);
  } else if (subcommand == "bound") {
    run_bound(cfg, art, rows);
  } else {
    throw std::invalid_argument("unknown experiment subcommand: " + subcommand);
  }
  art.finalize(cfg, rows);
  for (const auto& r : rows)
    if (!r.pass) return 1;
  return 0;
}

std::string bounds_eval_csv(const ExperimentConfig& cfg) {
  const Model& model = *cfg.model;
  std::ostringstream out;
  out << "name,value\n";
  double chi_a = chi(cfg.op, cfg.alpha, cfg.grid.T);
  double chi_b = chi(cfg.op, cfg.beta, cfg.grid.T);
  out << "chi_alpha," << fmt(chi_a, 15) << "\n";
  out << "chi_beta," << fmt(chi_b, 15) << "\n";
  if (cfg.k >= 1) out << "chi_delta1," << fmt(chi(cfg.op, cfg.deltas[0], cfg.grid.T), 15) << "\n";

  ExponentSpec spec{cfg.k, cfg.deltas, cfg.alpha, cfg.beta};
  double iota_all = iota(spec, {kAllIndices});
  out << "iota," << fmt(iota_all, 15) << "\n";

  BoundParams params;
  params.alpha = cfg.alpha;
  params.beta = cfg.beta;
  params.lambda = iota_all;
  params.p = cfg.p;
  params.T = cfg.grid.T;
  params.eta = cfg.op.eta;
  params.L = model.cb_seminorm_drift(1, cfg.op, cfg.alpha);
  params.Lhat = model.cb_seminorm_diffusion(1, cfg.op, cfg.beta);
  out << "theta," << fmt(theta(params, chi_a, chi_b), 15) << "\n";
  if (cfg.k >= 1)
    out << "bound_rhs,"
        << fmt(bound_rhs(cfg.op, model, cfg.k, cfg.deltas, cfg.p, cfg.grid.T, cfg.alpha, cfg.beta), 15)
        << "\n";
  return out.str();
}

std::string collect_report(const std::string& dir) {
  std::ostringstream out;
  std::vector<fs::path> files;
  if (fs::exists(fs::path(dir) / "summary.csv")) files.push_back(fs::path(dir) / "summary.csv");
  if (fs::is_directory(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_directory() && fs::exists(entry.path() / "summary.csv"))
        files.push_back(entry.path() / "summary.csv");
    }
  }
  std::sort(files.begin(), files.end());
  out << "source,status,criterion,measured,threshold\n";
  for (const auto& f : files) {
    std::ifstream in(f);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (!line.empty()) out << f.parent_path().filename().string() << "," << line << "\n";
    }
  }
  return out.str();
}

}  // namespace seesim

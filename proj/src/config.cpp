#include "seesim/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace seesim {

using nlohmann::json;

namespace {

class Violations {
 public:
  void add(const std::string& msg) { msgs_.push_back(msg); }
  bool empty() const { return msgs_.empty(); }
  [[noreturn]] void raise() const {
    std::string out = "invalid config (" + std::to_string(msgs_.size()) + " violation(s)):";
    for (const auto& m : msgs_) out += "\n  - " + m;
    throw std::runtime_error(out);
  }

 private:
  std::vector<std::string> msgs_;
};

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where,
                Violations& v) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.contains(it.key())) v.add(where + ": unknown key '" + it.key() + "'");
  }
}

Vec parse_vec(const json& j, int n, const std::string& where, Violations& v) {
  Vec out = Vec::Zero(n);
  if (!j.is_array()) {
    v.add(where + ": expected an array of " + std::to_string(n) + " coefficients");
    return out;
  }
  if (static_cast<int>(j.size()) != n) {
    v.add(where + ": expected " + std::to_string(n) + " coefficients, got " +
          std::to_string(j.size()));
    return out;
  }
  for (int i = 0; i < n; ++i) {
    if (!j[i].is_number()) {
      v.add(where + ": entry " + std::to_string(i) + " is not a number");
      return out;
    }
    out[i] = j[i].get<double>();
  }
  if (!out.allFinite()) v.add(where + ": entries must be finite");
  return out;
}

DiagonalOperator parse_operator(const json& j, Violations& v) {
  DiagonalOperator op = DiagonalOperator::dirichlet_laplacian(64);
  if (!j.is_object()) {
    v.add("operator: expected an object");
    return op;
  }
  check_keys(j, {"kind", "modes", "eigenvalues", "eta"}, "operator", v);
  std::string kind = j.value("kind", "dirichlet-laplacian");
  if (kind == "dirichlet-laplacian") {
    int modes = j.value("modes", 64);
    if (modes < 1 || modes > 100000) {
      v.add("operator.modes: must lie in [1, 100000]");
      return op;
    }
    op = DiagonalOperator::dirichlet_laplacian(modes);
    if (j.contains("eigenvalues")) v.add("operator: explicit eigenvalues conflict with kind dirichlet-laplacian");
  } else if (kind == "explicit") {
    if (!j.contains("eigenvalues") || !j["eigenvalues"].is_array() || j["eigenvalues"].empty()) {
      v.add("operator.eigenvalues: required nonempty array for kind explicit");
      return op;
    }
    DiagonalOperator ex;
    ex.eta = j.value("eta", 0.0);
    ex.eigenvalues.resize(j["eigenvalues"].size());
    for (size_t i = 0; i < j["eigenvalues"].size(); ++i) {
      if (!j["eigenvalues"][i].is_number()) {
        v.add("operator.eigenvalues: entries must be numbers");
        return op;
      }
      ex.eigenvalues[i] = j["eigenvalues"][i].get<double>();
    }
    try {
      ex.validate();
      op = ex;
    } catch (const std::exception& e) {
      v.add(std::string("operator: ") + e.what());
    }
  } else {
    v.add("operator.kind: must be 'dirichlet-laplacian' or 'explicit'");
  }
  return op;
}

std::shared_ptr<const Model> parse_model(const json& j, int n_state, Violations& v) {
  if (!j.is_object()) {
    v.add("model: expected an object");
    return nullptr;
  }
  check_keys(j,
             {"kind", "rank", "profile", "additive", "n_max", "noise_modes", "drift_const",
              "features", "drift_outputs", "noise_couplings", "diffusion_outputs"},
             "model", v);
  std::string kind = j.value("kind", "canonical");
  if (kind != "canonical") {
    v.add("model.kind: only 'canonical' is supported");
    return nullptr;
  }
  int rank = j.value("rank", 2);
  int n_max = j.value("n_max", 3);
  int noise_modes = j.value("noise_modes", n_state);
  double decay = 1.5;
  if (j.contains("additive")) {
    if (!j["additive"].is_object()) {
      v.add("model.additive: expected an object {decay: gamma}");
    } else {
      check_keys(j["additive"], {"decay"}, "model.additive", v);
      decay = j["additive"].value("decay", 1.5);
    }
  }
  Profile profile = Profile::Sin;
  try {
    profile = profile_from_string(j.value("profile", "sin"));
  } catch (const std::exception& e) {
    v.add(std::string("model.profile: ") + e.what());
  }
  if (rank < 0 || rank > 64) v.add("model.rank: must lie in [0, 64]");
  if (n_max < 1 || n_max > 12) v.add("model.n_max: must lie in [1, 12]");
  if (noise_modes < 1 || noise_modes > n_state) v.add("model.noise_modes: must lie in [1, N]");
  if (!(decay > 0.5)) v.add("model.additive.decay: must exceed 1/2 (square-summable amplitudes)");
  if (!v.empty()) return nullptr;

  try {
    CanonicalModel base =
        CanonicalModel::make_default(n_state, noise_modes, rank, profile, decay, n_max);
    CanonicalModel::Spec spec = base.spec();
    auto override_vecs = [&](const char* key, std::vector<Vec>& target) {
      if (!j.contains(key)) return;
      if (!j[key].is_array() || static_cast<int>(j[key].size()) != rank) {
        v.add(std::string("model.") + key + ": expected " + std::to_string(rank) + " vectors");
        return;
      }
      target.clear();
      for (const auto& entry : j[key])
        target.push_back(parse_vec(entry, n_state, std::string("model.") + key, v));
    };
    override_vecs("features", spec.features);
    override_vecs("drift_outputs", spec.drift_outputs);
    override_vecs("noise_couplings", spec.noise_couplings);
    override_vecs("diffusion_outputs", spec.diffusion_outputs);
    if (j.contains("drift_const")) spec.drift_const = parse_vec(j["drift_const"], n_state, "model.drift_const", v);
    if (!v.empty()) return nullptr;
    return std::make_shared<CanonicalModel>(std::move(spec), n_state);
  } catch (const std::exception& e) {
    v.add(std::string("model: ") + e.what());
    return nullptr;
  }
}

Vec parse_state(const json& j, int n, const std::string& where, Violations& v) {
  if (j.is_array()) return parse_vec(j, n, where, v);
  if (j.is_object()) {
    check_keys(j, {"smooth"}, where, v);
    if (j.contains("smooth") && j["smooth"].is_number()) {
      double scale = j["smooth"].get<double>();
      Vec x(n);
      for (int i = 0; i < n; ++i) x[i] = scale / ((i + 1.0) * (i + 1.0));
      return x;
    }
  }
  v.add(where + ": expected coefficient array or {smooth: scale}");
  return Vec::Zero(n);
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("config root must be an object");

  Violations v;
  check_keys(j,
             {"operator", "model", "grid", "k", "deltas", "p", "alpha", "beta", "M", "seed", "x",
              "y", "directions", "mode_schedule", "eps_ladder", "observables"},
             "config", v);

  ExperimentConfig cfg;
  cfg.op = parse_operator(j.value("operator", json::object()), v);
  const int n = cfg.op.modes();
  cfg.model = parse_model(j.value("model", json::object()), n, v);

  if (j.contains("grid")) {
    if (!j["grid"].is_object()) {
      v.add("grid: expected an object {T, steps}");
    } else {
      check_keys(j["grid"], {"T", "steps"}, "grid", v);
      cfg.grid.T = j["grid"].value("T", 1.0);
      cfg.grid.steps = j["grid"].value("steps", 256);
    }
  }
  if (!(cfg.grid.T > 0.0)) v.add("grid.T: must be positive");
  if (cfg.grid.steps < 1) v.add("grid.steps: must be positive");

  cfg.k = j.value("k", 1);
  if (cfg.k < 0 || cfg.k > 12) v.add("k: must lie in [0, 12]");
  if (cfg.model && cfg.k > cfg.model->max_order())
    v.add("k: exceeds the model capability n_max = " + std::to_string(cfg.model->max_order()));

  if (j.contains("deltas")) {
    if (!j["deltas"].is_array()) {
      v.add("deltas: expected an array");
    } else {
      for (const auto& d : j["deltas"]) {
        if (!d.is_number()) {
          v.add("deltas: entries must be numbers");
          break;
        }
        cfg.deltas.push_back(d.get<double>());
      }
    }
  } else {
    cfg.deltas.assign(std::max(cfg.k, 0), 0.0);
  }
  if (static_cast<int>(cfg.deltas.size()) != cfg.k) v.add("deltas: must have length k");
  double delta_sum = 0.0;
  for (double d : cfg.deltas) {
    if (!(d >= 0.0 && d < 0.5)) v.add("deltas: each entry must lie in [0, 1/2)");
    delta_sum += d;
  }
  if (!(delta_sum < 0.5)) v.add("deltas: sum must be < 1/2 (regularity hypothesis)");

  cfg.p = j.value("p", 2.0);
  if (!(cfg.p >= 2.0)) v.add("p: must be >= 2");
  cfg.alpha = j.value("alpha", 0.0);
  if (!(cfg.alpha >= 0.0 && cfg.alpha < 1.0)) v.add("alpha: must lie in [0, 1)");
  cfg.beta = j.value("beta", 0.0);
  if (!(cfg.beta >= 0.0 && cfg.beta < 0.5)) v.add("beta: must lie in [0, 1/2)");
  cfg.samples = j.value("M", 1024);
  if (cfg.samples < 1) v.add("M: must be >= 1");
  cfg.seed = j.value("seed", 0ull);

  cfg.x = j.contains("x") ? parse_state(j["x"], n, "x", v) : parse_state(json{{"smooth", 0.5}}, n, "x", v);
  if (j.contains("y")) cfg.y = parse_state(j["y"], n, "y", v);

  if (j.contains("directions")) {
    if (!j["directions"].is_array()) {
      v.add("directions: expected an array");
    } else {
      for (const auto& d : j["directions"]) {
        if (d.is_number_integer()) {
          int mode = d.get<int>();
          if (mode < 1 || mode > n) {
            v.add("directions: eigenmode index out of range [1, N]");
            continue;
          }
          Vec e = Vec::Zero(n);
          e[mode - 1] = 1.0;
          cfg.directions.push_back(std::move(e));
        } else {
          cfg.directions.push_back(parse_vec(d, n, "directions", v));
        }
      }
    }
  } else {
    for (int i = 0; i < cfg.k; ++i) {
      Vec e = Vec::Zero(n);
      e[std::min(i, n - 1)] = 1.0;
      cfg.directions.push_back(std::move(e));
    }
  }
  if (static_cast<int>(cfg.directions.size()) != cfg.k) v.add("directions: must have length k");

  if (j.contains("mode_schedule")) {
    if (!j["mode_schedule"].is_array()) {
      v.add("mode_schedule: expected an array of eigenmode tuples");
    } else {
      for (const auto& tup : j["mode_schedule"]) {
        std::vector<int> modes;
        if (tup.is_number_integer()) {
          modes.assign(std::max(cfg.k, 1), tup.get<int>());
        } else if (tup.is_array()) {
          for (const auto& m : tup) {
            if (!m.is_number_integer()) {
              v.add("mode_schedule: eigenmode indices must be integers");
              break;
            }
            modes.push_back(m.get<int>());
          }
        } else {
          v.add("mode_schedule: entries must be integers or integer tuples");
          continue;
        }
        for (int m : modes)
          if (m < 1 || m > n) v.add("mode_schedule: eigenmode index out of range [1, N]");
        cfg.mode_schedule.push_back(std::move(modes));
      }
    }
  } else {
    for (int m : {1, 2, 4, 8, 16, 32}) {
      if (m <= n) cfg.mode_schedule.push_back(std::vector<int>(std::max(cfg.k, 1), m));
    }
  }

  if (j.contains("eps_ladder")) {
    if (!j["eps_ladder"].is_array()) {
      v.add("eps_ladder: expected an array");
    } else {
      for (const auto& e : j["eps_ladder"]) {
        if (!e.is_number()) {
          v.add("eps_ladder: entries must be numbers");
          break;
        }
        cfg.eps_ladder.push_back(e.get<double>());
      }
    }
  } else {
    cfg.eps_ladder = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  }
  for (size_t i = 0; i < cfg.eps_ladder.size(); ++i) {
    if (!(cfg.eps_ladder[i] > 0.0)) v.add("eps_ladder: entries must be positive");
    if (i > 0 && !(cfg.eps_ladder[i] < cfg.eps_ladder[i - 1]))
      v.add("eps_ladder: must be strictly decreasing");
  }

  if (j.contains("observables")) {
    if (!j["observables"].is_array()) {
      v.add("observables: expected an array of names");
    } else {
      for (const auto& o : j["observables"]) {
        std::string name = o.is_string() ? o.get<std::string>() : "";
        if (name != "h_norm") v.add("observables: unknown observable '" + name + "'");
        cfg.observables.push_back(name);
      }
    }
  } else {
    cfg.observables = {"h_norm"};
  }

  if (!v.empty()) v.raise();
  cfg.canonical_text = j.dump(2);  // nlohmann objects iterate key-sorted
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace seesim

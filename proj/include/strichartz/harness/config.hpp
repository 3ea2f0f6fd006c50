#pragma once

// Sweep configuration: nested JSON with per-experiment defaults, merged with
// the user's file and command line overrides.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "strichartz/admissible.hpp"
#include "strichartz/error.hpp"

namespace strichartz::harness {

using Json = nlohmann::json;

enum class ExperimentId { E1, E2, E3, E4, E5, E6 };

inline std::string experiment_name(ExperimentId id) {
  switch (id) {
    case ExperimentId::E1: return "E1";
    case ExperimentId::E2: return "E2";
    case ExperimentId::E3: return "E3";
    case ExperimentId::E4: return "E4";
    case ExperimentId::E5: return "E5";
    case ExperimentId::E6: return "E6";
  }
  return "?";
}

inline ExperimentId parse_experiment(const std::string& s) {
  for (auto id : {ExperimentId::E1, ExperimentId::E2, ExperimentId::E3, ExperimentId::E4, ExperimentId::E5, ExperimentId::E6})
    if (s == experiment_name(id) || s == "e" + experiment_name(id).substr(1)) return id;
  throw ConfigError("unknown experiment id '" + s + "'");
}

struct GridPolicy {
  double oversample = 4.0;
  double time_factor = 2.0;  // M_t = max(16, ceil(c N^2 T_w))
};

struct EstimatorBudget {
  int draws = 4;       // prior draws per random restart
  int restarts = 1;    // random restarts
  int max_iterations = 500;
  bool family_seed = true;    // add the stationary diagonal bump as a start
  bool continuation = true;   // add the previous sweep point's witness as a start
};

struct KernelPolicy {
  int t_points = 60;
  int z_factor = 16;      // zgrid = z_factor (2 n_max + 1)
  double alpha_factor = 2.0;
  double t_min_factor = 0.1;  // t in [t_min_factor h^2, h]
};

struct SweepConfig {
  ExperimentId experiment = ExperimentId::E1;
  std::vector<std::pair<double, double>> pairs;  // (p, q); q may be inf
  std::vector<double> s;                         // empty: s = 1/p (E1) or 0 (E2)
  std::vector<int> N;
  std::vector<double> h;
  std::vector<double> lambda;
  std::vector<double> q;  // E5 exponents
  GridPolicy grid;
  EstimatorBudget estimator;
  KernelPolicy kernel;
  std::optional<double> alpha;   // E2 short window T_w = alpha h; measured by E3 when absent
  double fit_h_max = 0.5;        // E2/E6 fits use h <= fit_h_max
  double band_factor = 8.0;
  double tail_tolerance = 0.02;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out;

  void validate() const;
};

namespace detail {

inline double read_number(const Json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    // rationals such as "8/3"
    const auto slash = s.find('/');
    try {
      if (slash != std::string::npos) return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
      return std::stod(s);
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("config field '" + what + "' must be a number");
}

inline std::vector<double> read_numbers(const Json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError("config field '" + what + "' must be a list");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(read_number(v, what));
  return out;
}

inline Json number_json(double x) {
  if (std::isinf(x)) return "inf";
  return x;
}

}  // namespace detail

/// Built-in defaults. Each subcommand's default finishes in minutes on one core.
inline Json default_config(ExperimentId id) {
  Json j;
  j["experiment"] = experiment_name(id);
  j["seed"] = 0;
  j["grid"] = {{"oversample", 4.0}, {"time_factor", 2.0}};
  j["estimator"] = {{"draws", 4}, {"restarts", 1}, {"max_iterations", 500}, {"family_seed", true}, {"continuation", true}};
  j["kernel"] = {{"t_points", 60}, {"z_factor", 16}, {"alpha_factor", 2.0}, {"t_min_factor", 0.1}};
  j["band_factor"] = 8.0;
  j["tail_tolerance"] = 0.02;
  switch (id) {
    case ExperimentId::E1:
      j["pairs"] = Json::array({Json::array({4, 4})});
      j["s"] = Json::array({0.25, 0.0});
      j["N"] = Json::array({8, 16, 32});
      break;
    case ExperimentId::E2:
    case ExperimentId::E6:
      j["pairs"] = Json::array({Json::array({4, 4})});
      j["h"] = Json::array({1.0, 0.5, 0.25, 0.125});
      j["fit_h_max"] = 0.5;
      break;
    case ExperimentId::E3:
      j["h"] = Json::array({0.125, 0.0625, 0.03125, 0.015625, 0.0078125});
      break;
    case ExperimentId::E4:
      j["pairs"] = Json::array({Json::array({4, 4}), Json::array({8, "8/3"}), Json::array({"10/3", 5})});
      j["s"] = Json::array({0.0, 0.125, 0.25});
      j["lambda"] = Json::array({4, 8, 16, 32, 64});
      j["grid"]["oversample"] = 2.0;
      break;
    case ExperimentId::E5:
      j["q"] = Json::array({4});
      j["s"] = Json::array({0.0, 0.25, 0.5});
      j["lambda"] = Json::array({4, 8, 16, 32, 64});
      break;
  }
  return j;
}

/// Recursive merge: objects merge key by key, everything else is replaced.
inline void merge_into(Json& base, const Json& over) {
  if (!over.is_object()) throw ConfigError("configuration root must be an object");
  for (auto it = over.begin(); it != over.end(); ++it) {
    if (it.value().is_object() && base.contains(it.key()) && base[it.key()].is_object())
      merge_into(base[it.key()], it.value());
    else
      base[it.key()] = it.value();
  }
}

inline Json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  try {
    return Json::parse(in, nullptr, true, true);
  } catch (const Json::exception& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
}

inline SweepConfig parse_config(const Json& j) {
  static const std::vector<std::string> known = {"experiment", "pairs", "s", "N", "h", "lambda", "q", "grid",
                                                 "estimator", "kernel", "alpha", "fit_h_max", "band_factor",
                                                 "tail_tolerance", "seed", "threads", "out"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) throw ConfigError("unknown config key '" + it.key() + "'");

  SweepConfig c;
  try {
    c.experiment = parse_experiment(j.at("experiment").get<std::string>());
    if (j.contains("pairs")) {
      if (!j["pairs"].is_array()) throw ConfigError("config field 'pairs' must be a list of [p, q]");
      for (const auto& pr : j["pairs"]) {
        if (!pr.is_array() || pr.size() != 2) throw ConfigError("each pair must be [p, q]");
        c.pairs.emplace_back(detail::read_number(pr[0], "pairs"), detail::read_number(pr[1], "pairs"));
      }
    }
    if (j.contains("s")) c.s = detail::read_numbers(j["s"], "s");
    if (j.contains("N"))
      for (double n : detail::read_numbers(j["N"], "N")) {
        if (n != std::floor(n)) throw ConfigError("N values must be integers");
        c.N.push_back(static_cast<int>(n));
      }
    if (j.contains("h")) c.h = detail::read_numbers(j["h"], "h");
    if (j.contains("lambda")) c.lambda = detail::read_numbers(j["lambda"], "lambda");
    if (j.contains("q")) c.q = detail::read_numbers(j["q"], "q");
    if (j.contains("grid")) {
      const auto& g = j["grid"];
      if (g.contains("oversample")) c.grid.oversample = detail::read_number(g["oversample"], "grid.oversample");
      if (g.contains("time_factor")) c.grid.time_factor = detail::read_number(g["time_factor"], "grid.time_factor");
    }
    if (j.contains("estimator")) {
      const auto& e = j["estimator"];
      if (e.contains("draws")) c.estimator.draws = e["draws"].get<int>();
      if (e.contains("restarts")) c.estimator.restarts = e["restarts"].get<int>();
      if (e.contains("max_iterations")) c.estimator.max_iterations = e["max_iterations"].get<int>();
      if (e.contains("family_seed")) c.estimator.family_seed = e["family_seed"].get<bool>();
      if (e.contains("continuation")) c.estimator.continuation = e["continuation"].get<bool>();
    }
    if (j.contains("kernel")) {
      const auto& k = j["kernel"];
      if (k.contains("t_points")) c.kernel.t_points = k["t_points"].get<int>();
      if (k.contains("z_factor")) c.kernel.z_factor = k["z_factor"].get<int>();
      if (k.contains("alpha_factor")) c.kernel.alpha_factor = detail::read_number(k["alpha_factor"], "kernel.alpha_factor");
      if (k.contains("t_min_factor")) c.kernel.t_min_factor = detail::read_number(k["t_min_factor"], "kernel.t_min_factor");
    }
    if (j.contains("alpha") && !j["alpha"].is_null()) c.alpha = detail::read_number(j["alpha"], "alpha");
    if (j.contains("fit_h_max")) c.fit_h_max = detail::read_number(j["fit_h_max"], "fit_h_max");
    if (j.contains("band_factor")) c.band_factor = detail::read_number(j["band_factor"], "band_factor");
    if (j.contains("tail_tolerance")) c.tail_tolerance = detail::read_number(j["tail_tolerance"], "tail_tolerance");
    if (j.contains("seed")) {
      const auto& sd = j["seed"];
      if (!sd.is_number_integer() || (!sd.is_number_unsigned() && sd.get<long long>() < 0))
        throw ConfigError("seed must be a nonnegative integer");
      c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("threads")) c.threads = j["threads"].get<int>();
    if (j.contains("out")) c.out = j["out"].get<std::string>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

inline void SweepConfig::validate() const {
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  switch (experiment) {
    case ExperimentId::E1:
      need(!pairs.empty() && !N.empty(), "E1 needs nonempty 'pairs' and 'N'");
      break;
    case ExperimentId::E2:
    case ExperimentId::E6:
      need(!pairs.empty() && !h.empty(), "E2/E6 need nonempty 'pairs' and 'h'");
      break;
    case ExperimentId::E3:
      need(!h.empty(), "E3 needs a nonempty 'h' list");
      break;
    case ExperimentId::E4:
      need(!pairs.empty() && !s.empty() && !lambda.empty(), "E4 needs nonempty 'pairs', 's' and 'lambda'");
      break;
    case ExperimentId::E5:
      need(!q.empty() && !s.empty() && !lambda.empty(), "E5 needs nonempty 'q', 's' and 'lambda'");
      break;
  }
  for (double v : h) need(v > 0.0 && v <= 1.0, "h values must lie in (0, 1]");
  for (int n : N) need(n >= 1, "N values must be >= 1");
  for (double l : lambda) need(l >= 1.0, "lambda values must be >= 1");
  for (double v : q) need(v >= 2.0, "E5 exponents q must be >= 2");
  need(grid.oversample >= 1.0, "grid.oversample must be >= 1");
  need(grid.time_factor >= 1.0, "grid.time_factor must be >= 1");
  need(estimator.draws >= 1 && estimator.restarts >= 1 && estimator.max_iterations >= 0,
       "estimator budget: draws >= 1, restarts >= 1, max_iterations >= 0");
  need(kernel.t_points >= 2 && kernel.z_factor >= 4, "kernel.t_points >= 2 and kernel.z_factor >= 4 required");
  need(threads >= 1, "threads must be >= 1");
  if (alpha) need(*alpha > 0.0, "alpha must be positive");
  if (experiment == ExperimentId::E6)
    for (const auto& [p, q] : pairs) need(p == 4.0 && q == 4.0, "E6 compares the (4, 4) pair only");
}

/// Canonical form of the parameters that determine the results. Output
/// location and worker count are excluded.
inline Json canonical_config(const SweepConfig& c) {
  Json j;
  j["experiment"] = experiment_name(c.experiment);
  Json pairs = Json::array();
  for (const auto& [p, q] : c.pairs) pairs.push_back(Json::array({detail::number_json(p), detail::number_json(q)}));
  j["pairs"] = pairs;
  j["s"] = c.s;
  j["N"] = c.N;
  j["h"] = c.h;
  j["lambda"] = c.lambda;
  j["q"] = c.q;
  j["grid"] = {{"oversample", c.grid.oversample}, {"time_factor", c.grid.time_factor}};
  j["estimator"] = {{"draws", c.estimator.draws},
                    {"restarts", c.estimator.restarts},
                    {"max_iterations", c.estimator.max_iterations},
                    {"family_seed", c.estimator.family_seed},
                    {"continuation", c.estimator.continuation}};
  j["kernel"] = {{"t_points", c.kernel.t_points},
                 {"z_factor", c.kernel.z_factor},
                 {"alpha_factor", c.kernel.alpha_factor},
                 {"t_min_factor", c.kernel.t_min_factor}};
  j["alpha"] = c.alpha ? Json(*c.alpha) : Json(nullptr);
  j["fit_h_max"] = c.fit_h_max;
  j["band_factor"] = c.band_factor;
  j["tail_tolerance"] = c.tail_tolerance;
  j["seed"] = c.seed;
  return j;
}

/// FNV-1a over the canonical serialization; object keys are sorted, so the
/// hash does not depend on key order in the input file.
inline std::string config_hash(const SweepConfig& c) {
  const std::string text = canonical_config(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Admissibility gate for experiments built on the Strichartz pairs.
inline std::vector<AdmissiblePair> admissible_pairs(const SweepConfig& c) {
  std::vector<AdmissiblePair> out;
  for (const auto& [p, q] : c.pairs) out.push_back(AdmissiblePair::make(p, q));
  return out;
}

}  // namespace strichartz::harness

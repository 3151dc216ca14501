#pragma once

// Run configuration document shared by all CLI subcommands.
//
// {
//   "seed": 0, "threads": 1, "out": ".",
//   "learner":    { KiConfig keys },
//   "bench":      { "target", "d", "n_train", "noise_halfwidth", "n_test", "n_repeats",
//                   "lambdas", "dims", "n_train_values" },
//   "simulation": { MracConfig keys },
//   "campaign":   { "n_trials", "x0_range", "l_floor_range", "w_scale_range", "include_baseline" },
//   "bounds":     { "m", "delta", "k1", "k2", "innovation_bound", "e0_norm", "horizon" }
// }
//
// Every section is optional; unknown keys anywhere are rejected.

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lacki/bench.hpp"
#include "lacki/io.hpp"
#include "lacki/lacki.hpp"
#include "lacki/mrac.hpp"

namespace lacki::config {

using io::json;
using io::StrictObject;

inline constexpr std::size_t kSweepTrain = 500;

struct BenchConfig {
  bench::Target target = bench::Target::F1;
  std::size_t d = 1;
  std::size_t n_train = 257;               ///< dimension sweeps default to kSweepTrain
  double noise_halfwidth = 0;
  std::size_t n_test = 25000;
  std::size_t n_repeats = 30;
  std::vector<double> lambdas;             ///< empty: use learner.lambda only
  std::vector<std::size_t> dims;           ///< dimension sweep; empty: just d
  std::vector<std::size_t> n_train_values; ///< sample-size sweep; empty: just n_train
};

struct CampaignConfig {
  std::size_t n_trials = 555;
  mrac::Randomization randomization;
  bool include_baseline = true;
};

struct BoundsConfig {
  int m = 1;
  double delta = 0.005;
  Eigen::MatrixXd k1 = Eigen::MatrixXd::Identity(1, 1);
  Eigen::MatrixXd k2 = Eigen::MatrixXd::Identity(1, 1);
  double innovation_bound = 1;
  double e0_norm = 0;
  std::size_t horizon = 5000;
};

struct RunConfig {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out = ".";
  std::optional<json> learner_json;  ///< applied on top of each subcommand's default learner
  BenchConfig bench;
  mrac::MracConfig simulation;
  CampaignConfig campaign;
  BoundsConfig bounds;

  /// Learner for regression subcommands (fit, bench).
  KiConfig regression_learner() const {
    return learner_json ? io::ki_config_from_json(*learner_json, "learner") : KiConfig{};
  }
};

namespace detail {

inline std::array<double, 2> pair_from(StrictObject& o, const std::string& key, std::array<double, 2> fallback) {
  if (!o.has(key)) return fallback;
  const auto v = o.get<std::vector<double>>(key);
  if (v.size() != 2) throw ParseError(o.context() + "." + key + ": expected two numbers");
  return {v[0], v[1]};
}

/// Gain: scalar (times identity) or m x m nested array.
inline Eigen::MatrixXd gain_from(const json& j, int m, const std::string& ctx) {
  if (j.is_number()) return j.get<double>() * Eigen::MatrixXd::Identity(m, m);
  if (!j.is_array()) throw ParseError(ctx + ": expected a number or an m x m array");
  const auto rows = j.get<std::vector<std::vector<double>>>();
  Eigen::MatrixXd g(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (static_cast<Eigen::Index>(rows[r].size()) != g.cols()) throw ParseError(ctx + ": ragged matrix");
    for (std::size_t c = 0; c < rows[r].size(); ++c) g(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  return g;
}

inline bench::Target target_from(const std::string& s, const std::string& ctx) {
  if (s == "f1") return bench::Target::F1;
  if (s == "f2") return bench::Target::F2;
  throw ParseError(ctx + ": unknown target '" + s + "' (expected f1 or f2)");
}

inline BenchConfig bench_from(const json& j) {
  StrictObject o(j, "bench");
  BenchConfig b;
  if (o.has("target")) b.target = target_from(o.get<std::string>("target"), "bench.target");
  b.d = o.get_or("d", b.d);
  b.n_train = o.get_or("n_train", b.n_train);
  b.noise_halfwidth = o.get_or("noise_halfwidth", b.noise_halfwidth);
  b.n_test = o.get_or("n_test", b.n_test);
  b.n_repeats = o.get_or("n_repeats", b.n_repeats);
  b.lambdas = o.get_or("lambdas", b.lambdas);
  b.dims = o.get_or("dims", b.dims);
  b.n_train_values = o.get_or("n_train_values", b.n_train_values);
  o.finish();
  if (!b.dims.empty() && !o.has("n_train")) b.n_train = kSweepTrain;
  if (!b.dims.empty() && !b.n_train_values.empty()) {
    throw ParseError("bench: dims and n_train_values cannot be swept together");
  }
  return b;
}

inline mrac::ReferenceCommand command_from(const json& j) {
  StrictObject o(j, "simulation.reference.command");
  mrac::ReferenceCommand c;
  if (o.has("kind")) {
    const auto k = o.get<std::string>("kind");
    if (k == "square") {
      c.kind = mrac::ReferenceCommand::Kind::SquareWave;
    } else if (k == "sine") {
      c.kind = mrac::ReferenceCommand::Kind::Sinusoid;
    } else if (k == "constant") {
      c.kind = mrac::ReferenceCommand::Kind::Constant;
    } else {
      throw ParseError("simulation.reference.command.kind: unknown '" + k + "'");
    }
  }
  c.amplitude = o.get_or("amplitude", c.amplitude);
  c.period = o.get_or("period", c.period);
  o.finish();
  if (!(c.period > 0)) throw ConfigError("command period must be > 0");
  return c;
}

inline mrac::MracConfig simulation_from(const json& j, mrac::MracConfig s) {
  StrictObject o(j, "simulation");
  s.k1 = o.get_or("k1", s.k1);
  s.k2 = o.get_or("k2", s.k2);
  s.delta = o.get_or("delta", s.delta);
  s.t0 = o.get_or("t0", s.t0);
  s.tf = o.get_or("tf", s.tf);
  s.x0 = pair_from(o, "x0", s.x0);
  s.xi0 = pair_from(o, "xi0", s.xi0);
  s.w_scale = o.get_or("w_scale", s.w_scale);
  s.obs_noise = o.get_or("obs_noise", s.obs_noise);
  s.adaptive = o.get_or("adaptive", s.adaptive);
  if (o.has("weights")) {
    const auto w = o.get<std::vector<double>>("weights");
    if (w.size() != 6) throw ParseError("simulation.weights: expected six coefficients");
    std::copy(w.begin(), w.end(), s.plant.w.begin());
  }
  s.plant.b = o.get_or("b", s.plant.b);
  if (o.has("reference")) {
    StrictObject r(o.at("reference"), "simulation.reference");
    s.reference.omega_n = r.get_or("omega_n", s.reference.omega_n);
    s.reference.zeta = r.get_or("zeta", s.reference.zeta);
    if (r.has("command")) s.reference.command = command_from(r.at("command"));
    r.finish();
  }
  o.finish();
  if (!(s.plant.b != 0)) throw ConfigError("simulation.b must be nonzero");
  return s;
}

inline CampaignConfig campaign_from(const json& j) {
  StrictObject o(j, "campaign");
  CampaignConfig c;
  c.n_trials = o.get_or("n_trials", c.n_trials);
  c.randomization.x0_range = pair_from(o, "x0_range", c.randomization.x0_range);
  c.randomization.l_floor_range = pair_from(o, "l_floor_range", c.randomization.l_floor_range);
  c.randomization.w_scale_range = pair_from(o, "w_scale_range", c.randomization.w_scale_range);
  c.include_baseline = o.get_or("include_baseline", c.include_baseline);
  o.finish();
  if (c.n_trials < 1) throw ConfigError("campaign.n_trials must be >= 1");
  return c;
}

inline BoundsConfig bounds_from(const json& j) {
  StrictObject o(j, "bounds");
  BoundsConfig b;
  b.m = o.get_or("m", b.m);
  if (b.m < 1) throw ConfigError("bounds.m must be >= 1");
  b.delta = o.get_or("delta", b.delta);
  b.k1 = o.has("k1") ? gain_from(o.at("k1"), b.m, "bounds.k1") : Eigen::MatrixXd::Identity(b.m, b.m);
  b.k2 = o.has("k2") ? gain_from(o.at("k2"), b.m, "bounds.k2") : Eigen::MatrixXd::Identity(b.m, b.m);
  b.innovation_bound = o.get_or("innovation_bound", b.innovation_bound);
  b.e0_norm = o.get_or("e0_norm", b.e0_norm);
  b.horizon = o.get_or("horizon", b.horizon);
  o.finish();
  if (!(b.e0_norm >= 0)) throw ConfigError("bounds.e0_norm must be >= 0");
  return b;
}

}  // namespace detail

inline RunConfig parse_run_config(const json& j) {
  StrictObject o(j, "config");
  RunConfig rc;
  rc.seed = o.get_or<std::uint64_t>("seed", rc.seed);
  rc.threads = o.get_or<unsigned>("threads", rc.threads);
  rc.out = o.get_or<std::string>("out", rc.out);
  if (o.has("learner")) {
    rc.learner_json = o.at("learner");
    (void)io::ki_config_from_json(*rc.learner_json, "learner");  // validate early
  }
  if (o.has("bench")) rc.bench = detail::bench_from(o.at("bench"));
  if (o.has("simulation")) rc.simulation = detail::simulation_from(o.at("simulation"), rc.simulation);
  if (rc.learner_json) rc.simulation.learner = io::ki_config_from_json(*rc.learner_json, "learner", rc.simulation.learner);
  if (o.has("campaign")) rc.campaign = detail::campaign_from(o.at("campaign"));
  if (o.has("bounds")) rc.bounds = detail::bounds_from(o.at("bounds"));
  o.finish();
  rc.simulation.validate();
  return rc;
}

inline RunConfig read_run_config(const std::string& path) {
  const std::string text = io::detail::read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("config '" + path + "': " + e.what());
  }
  return parse_run_config(j);
}

}  // namespace lacki::config

#pragma once

// Command-line front end. Exit codes: 0 success, 2 user/validation error,
// 3 I/O error, 4 numeric failure.
//
// Deterministic payloads (CSV/JSON/.dat) never contain wall-clock values;
// timings go to separate *_timing.* files.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lacki/bench.hpp"
#include "lacki/config.hpp"
#include "lacki/errors.hpp"
#include "lacki/guarantees.hpp"
#include "lacki/io.hpp"
#include "lacki/lacki.hpp"
#include "lacki/mrac.hpp"

namespace lacki::cli {

enum ExitCode : int { kOk = 0, kUserError = 2, kIoError = 3, kNumericError = 4 };

using io::format_double;
using io::json;

/// Type-7 (linear interpolation) sample quantile.
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0) return v[lo];
  return v[lo] + frac * (v[hi] - v[lo]);
}

namespace detail {

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<unsigned> threads;
};

inline config::RunConfig load(const Globals& g) {
  config::RunConfig rc = g.config_path.empty() ? config::parse_run_config(json::object())
                                               : config::read_run_config(g.config_path);
  if (g.seed) rc.seed = *g.seed;
  if (g.out) rc.out = *g.out;
  if (g.threads) rc.threads = *g.threads;
  rc.threads = std::max(1u, rc.threads);
  rc.simulation.seed = rc.seed;
  return rc;
}

inline std::filesystem::path out_dir(const config::RunConfig& rc) {
  std::filesystem::path p(rc.out);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw IoError("cannot create output directory '" + rc.out + "': " + ec.message());
  return p;
}

inline std::string stem(const std::string& sub, const config::RunConfig& rc) {
  return sub + "_s" + std::to_string(rc.seed);
}

inline void write(const std::filesystem::path& p, const std::string& content) {
  io::detail::write_file(p.string(), content);
}

/// Two-column whitespace-separated plot data.
inline std::string two_column(const std::vector<std::pair<double, double>>& rows) {
  std::string s;
  for (const auto& [x, y] : rows) s += format_double(x) + " " + format_double(y) + "\n";
  return s;
}

inline json summary_json(const bench::Summary& s) { return {{"mean", s.mean}, {"std", s.std}}; }

/// +inf/NaN are not valid JSON numbers; store them as null.
inline json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// --- fit / predict ---------------------------------------------------------

inline int cmd_fit(const std::string& dataset_path, const std::string& model_out, const Globals& g,
                   std::ostream& out) {
  const auto rc = load(g);
  Dataset data = io::read_dataset_csv(dataset_path);
  const LackiState state = LackiState::fit(std::move(data), rc.regression_learner());
  io::write_model(model_out, state);
  out << "ell = " << format_double(state.ell()) << "\n"
      << "samples = " << state.data().size() << ", input_dim = " << state.input_dim()
      << ", output_dim = " << state.output_dim() << "\n";
  return kOk;
}

inline int cmd_predict(const std::string& model_path, const std::string& query_path,
                       const std::string& out_path, std::ostream& out) {
  const LackiState state = io::read_model(model_path);
  const auto q = io::parse_query_csv(io::detail::read_file(query_path));
  if (q.d == 0) {
    io::detail::write_file(out_path, "");
    out << "predictions = 0\n";
    return kOk;
  }
  if (q.d != state.input_dim()) {
    throw DimensionError("queries have " + std::to_string(q.d) + " columns, model expects " +
                         std::to_string(state.input_dim()));
  }
  const std::size_t m = state.output_dim();
  std::string s;
  for (std::size_t k = 0; k < q.d; ++k) s += (k ? ",x_" : "x_") + std::to_string(k + 1);
  for (std::size_t j = 0; j < m; ++j) s += ",value_" + std::to_string(j + 1);
  for (std::size_t j = 0; j < m; ++j) s += ",halfwidth_" + std::to_string(j + 1);
  s += '\n';
  for (std::size_t i = 0; i < q.rows(); ++i) {
    const auto x = q.row(i);
    const auto p = state.predict(x);
    for (std::size_t k = 0; k < x.size(); ++k) s += (k ? "," : "") + format_double(x[k]);
    for (double v : p.value) s += "," + format_double(v);
    for (double v : p.halfwidth) s += "," + format_double(v);
    s += '\n';
  }
  io::detail::write_file(out_path, s);
  out << "predictions = " << q.rows() << "\n";
  return kOk;
}

// --- bench -----------------------------------------------------------------

inline int cmd_bench(const Globals& g, std::ostream& out) {
  const auto rc = load(g);
  const auto dir = out_dir(rc);
  const auto& bc = rc.bench;
  const KiConfig base_learner = rc.regression_learner();
  std::vector<double> lambdas = bc.lambdas.empty() ? std::vector<double>{base_learner.lambda} : bc.lambdas;

  // Sweep axis: dimension, sample size, or a single point.
  std::string axis = "n_train";
  std::vector<std::size_t> points{bc.n_train};
  if (!bc.dims.empty()) {
    axis = "d";
    points = bc.dims;
  } else if (!bc.n_train_values.empty()) {
    points = bc.n_train_values;
  }

  std::string trials = "d,n_train,learner,lambda,repeat,rms,me,ell\n";
  std::string timing = "d,n_train,learner,lambda,repeat,log_tt,log_pt\n";
  json summary = json::array();
  std::map<std::string, std::vector<std::pair<double, double>>> rms_plot, me_plot;

  for (std::size_t point : points) {
    for (double lambda : lambdas) {
      bench::ExperimentSpec spec;
      spec.target = bc.target;
      spec.d = axis == "d" ? point : bc.d;
      spec.n_train = axis == "d" ? bc.n_train : point;
      spec.noise_halfwidth = bc.noise_halfwidth;
      spec.n_test = bc.n_test;
      spec.n_repeats = bc.n_repeats;
      spec.learner = base_learner;
      spec.learner.lambda = lambda;
      spec.seed = rc.seed;
      spec.threads = rc.threads;
      if (spec.learner.metric.kind() == InputMetric::Kind::WeightedMaxNorm && spec.learner.metric.weights().size() != spec.d) {
        throw ConfigError("weighted metric length does not match bench dimension");
      }
      const auto res = bench::run_experiment(spec);
      const std::string lk_name = "lacki_lambda_" + format_double(lambda);
      // The linear baseline does not depend on lambda; emit it once per point.
      std::vector<std::pair<std::string, const bench::MetricBundle*>> learners{{lk_name, &res.lacki}};
      if (lambda == lambdas.front()) learners.emplace_back("linear", &res.linear);
      for (const auto& [name, b] : learners) {
        for (std::size_t r = 0; r < b->trials.size(); ++r) {
          const auto& t = b->trials[r];
          const std::string key = std::to_string(spec.d) + "," + std::to_string(spec.n_train) + "," + name + "," +
                                  (name == "linear" ? std::string("") : format_double(lambda)) + "," + std::to_string(r);
          trials += key + "," + format_double(t.rms) + "," + format_double(t.me) + "," + format_double(t.ell) + "\n";
          timing += key + "," + format_double(t.log_tt) + "," + format_double(t.log_pt) + "\n";
        }
        summary.push_back({{"learner", name},
                           {"lambda", name == "linear" ? json(nullptr) : json(lambda)},
                           {"d", spec.d},
                           {"n_train", spec.n_train},
                           {"rms", summary_json(b->rms)},
                           {"me", summary_json(b->me)}});
        const double x = static_cast<double>(point);
        rms_plot[name].emplace_back(x, b->rms.mean);
        me_plot[name].emplace_back(x, b->me.mean);
      }
    }
  }

  const std::string s = stem("bench", rc);
  write(dir / (s + "_trials.csv"), trials);
  write(dir / (s + "_timing.csv"), timing);
  write(dir / (s + "_summary.json"),
        json{{"target", bench::to_string(bc.target)},
             {"noise_halfwidth", bc.noise_halfwidth},
             {"n_test", bc.n_test},
             {"n_repeats", bc.n_repeats},
             {"seed", rc.seed},
             {"sweep_axis", axis},
             {"results", summary}}
                .dump(2) + "\n");
  for (const auto& [name, rows] : rms_plot) write(dir / (s + "_" + name + "_rms_vs_" + axis + ".dat"), two_column(rows));
  for (const auto& [name, rows] : me_plot) write(dir / (s + "_" + name + "_me_vs_" + axis + ".dat"), two_column(rows));
  out << "bench: " << summary.size() << " result rows written to " << dir.string() << "\n";
  return kOk;
}

// --- simulate / campaign ---------------------------------------------------

inline json record_json(const mrac::TrialRecord& r) {
  return {{"log_xerr", num(r.log_xerr)},       {"log_xdoterr", num(r.log_xdoterr)},
          {"log_prederr", num(r.log_prederr)}, {"log_cmd", num(r.log_cmd)},
          {"ell_final", r.ell_final},          {"diverged", r.diverged},
          {"steps_completed", r.steps_completed}};
}

inline int cmd_simulate(const Globals& g, std::ostream& out) {
  auto rc = load(g);
  const auto dir = out_dir(rc);
  rc.simulation.record_trajectory = true;
  const auto rec = mrac::run_trial(rc.simulation);

  std::string csv = "t,x1,x2,xi1,xi2,e1,e2,u,nu_ad,a_true,ell\n";
  std::vector<std::pair<double, double>> xerr, prederr, ell;
  for (const auto& p : rec.trajectory) {
    for (double v : {p.t, p.x1, p.x2, p.xi1, p.xi2, p.e1, p.e2, p.u, p.nu_ad, p.a_true}) csv += format_double(v) + ",";
    csv += format_double(p.ell) + "\n";
    xerr.emplace_back(p.t, std::abs(p.e1));
    prederr.emplace_back(p.t, std::abs(p.nu_ad - p.a_true));
    ell.emplace_back(p.t, p.ell);
  }
  const std::string s = stem("simulate", rc);
  write(dir / (s + "_trajectory.csv"), csv);
  write(dir / (s + "_record.json"), record_json(rec).dump(2) + "\n");
  write(dir / (s + "_timing.json"),
        json{{"max_rt_predict", rec.max_rt_predict}, {"max_rt_learn", rec.max_rt_learn}}.dump(2) + "\n");
  write(dir / (s + "_xerr_vs_t.dat"), two_column(xerr));
  write(dir / (s + "_prederr_vs_t.dat"), two_column(prederr));
  write(dir / (s + "_ell_vs_t.dat"), two_column(ell));
  out << "simulate: " << rec.trajectory.size() << " rows, ell_final = " << format_double(rec.ell_final)
      << (rec.diverged ? ", DIVERGED" : "") << "\n";
  return rec.diverged ? kNumericError : kOk;
}

inline int cmd_campaign(const Globals& g, std::ostream& out) {
  const auto rc = load(g);
  const auto dir = out_dir(rc);
  const auto& cc = rc.campaign;

  std::vector<std::pair<std::string, std::vector<mrac::TrialRecord>>> runs;
  auto adaptive = rc.simulation;
  adaptive.adaptive = true;
  runs.emplace_back("lacki_mrac", mrac::run_campaign(adaptive, cc.n_trials, cc.randomization, rc.threads));
  if (cc.include_baseline) {
    auto pd = rc.simulation;
    pd.adaptive = false;
    runs.emplace_back("pd_baseline", mrac::run_campaign(pd, cc.n_trials, cc.randomization, rc.threads));
  }

  std::string csv = "trial,controller,x0_1,x0_2,l_floor,w_scale,diverged,log_xerr,log_xdoterr,log_prederr,log_cmd,ell_final\n";
  std::string timing = "trial,controller,log_max_rt_predict,log_max_rt_learn\n";
  const std::string s = stem("campaign", rc);
  json summary = json::object();
  for (const auto& [name, recs] : runs) {
    for (std::size_t i = 0; i < recs.size(); ++i) {
      const auto& r = recs[i];
      csv += std::to_string(i) + "," + name + "," + format_double(r.x0[0]) + "," + format_double(r.x0[1]) + "," +
             format_double(r.l_floor) + "," + format_double(r.w_scale) + "," + (r.diverged ? "1" : "0") + "," +
             format_double(r.log_xerr) + "," + format_double(r.log_xdoterr) + "," + format_double(r.log_prederr) +
             "," + format_double(r.log_cmd) + "," + format_double(r.ell_final) + "\n";
      timing += std::to_string(i) + "," + name + "," + format_double(std::log(std::max(r.max_rt_predict, 1e-12))) +
                "," + format_double(std::log(std::max(r.max_rt_learn, 1e-12))) + "\n";
    }
    json per = json::object();
    const std::vector<std::pair<std::string, double mrac::TrialRecord::*>> metrics{
        {"log_xerr", &mrac::TrialRecord::log_xerr},
        {"log_xdoterr", &mrac::TrialRecord::log_xdoterr},
        {"log_prederr", &mrac::TrialRecord::log_prederr},
        {"log_cmd", &mrac::TrialRecord::log_cmd}};
    for (const auto& [metric, field] : metrics) {
      std::vector<double> v;
      for (const auto& r : recs) v.push_back(r.*field);
      std::vector<std::pair<double, double>> q;
      json qj = json::object();
      for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        q.emplace_back(p, quantile(v, p));
        qj[format_double(p)] = num(quantile(v, p));
      }
      per[metric] = qj;
      write(dir / (s + "_" + name + "_" + metric + "_quantiles.dat"), two_column(q));
    }
    std::size_t diverged = 0;
    for (const auto& r : recs) diverged += r.diverged ? 1 : 0;
    per["diverged"] = diverged;
    summary[name] = per;
  }
  write(dir / (s + "_trials.csv"), csv);
  write(dir / (s + "_timing.csv"), timing);
  write(dir / (s + "_summary.json"), json{{"n_trials", cc.n_trials}, {"seed", rc.seed}, {"quantiles", summary}}.dump(2) + "\n");
  out << "campaign: " << cc.n_trials << " trials per controller written to " << dir.string() << "\n";
  return kOk;
}

// --- bounds / complexity ---------------------------------------------------

inline int cmd_bounds(const Globals& g, std::ostream& out) {
  const auto rc = load(g);
  const auto dir = out_dir(rc);
  const auto& bc = rc.bounds;
  const auto sys = guarantees::assemble_error_system(bc.m, bc.delta, bc.k1, bc.k2, bc.innovation_bound);
  const auto rep = guarantees::compute_bounds(sys, bc.e0_norm, bc.horizon);

  json mj = json::array();
  for (Eigen::Index r = 0; r < sys.M.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(sys.M.cols()));
    for (Eigen::Index c = 0; c < sys.M.cols(); ++c) row[static_cast<std::size_t>(c)] = sys.M(r, c);
    mj.push_back(row);
  }
  json j{{"m", bc.m},
         {"delta", bc.delta},
         {"innovation_bound", bc.innovation_bound},
         {"e0_norm", bc.e0_norm},
         {"horizon", bc.horizon},
         {"transition_matrix", mj},
         {"spectral_radius", rep.spectral_radius},
         {"matrix_norm", rep.matrix_norm},
         {"variant1_final", rep.variant1.back()},
         {"variant1_asymptote", rep.variant1_asymptote ? json(*rep.variant1_asymptote) : json(nullptr)}};
  if (rep.variant2_summary) {
    const auto& v = *rep.variant2_summary;
    j["variant2"] = {{"final", v.bound},          {"asymptote", v.asymptote},
                     {"k0", v.k0},                {"phi", v.phi},
                     {"c", v.c},                  {"c_choice", guarantees::to_string(v.c_choice)},
                     {"c_candidates", {{"max_power_norm", num(v.c_max_power_norm)},
                                       {"jordan_estimate", num(v.c_jordan)},
                                       {"norm_power", num(v.c_norm_power)}}}};
  } else {
    j["variant2"] = nullptr;
  }
  j["variant3_final"] = rep.variant3.empty() ? json(nullptr) : num(rep.variant3.back());

  const std::string s = stem("bounds", rc);
  write(dir / (s + ".json"), j.dump(2) + "\n");
  const auto dat = [](const std::vector<double>& v) {
    std::vector<std::pair<double, double>> rows;
    for (std::size_t n = 0; n < v.size(); ++n) rows.emplace_back(static_cast<double>(n), v[n]);
    return two_column(rows);
  };
  write(dir / (s + "_variant1.dat"), dat(rep.variant1));
  if (!rep.variant2.empty()) write(dir / (s + "_variant2.dat"), dat(rep.variant2));
  if (!rep.variant3.empty()) write(dir / (s + "_variant3.dat"), dat(rep.variant3));
  out << "spectral_radius = " << format_double(rep.spectral_radius) << "\n";
  return kOk;
}

inline int cmd_complexity(double epsilon, double delta, double l_star, int d, std::ostream& out) {
  const auto sc = guarantees::sample_complexity(epsilon, delta, l_star, d);
  out << "k=" << sc.k << " N=" << sc.n << "\n";
  return kOk;
}

}  // namespace detail

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Lipschitz/Hoelder kinky-inference regression, guarantees and MRAC simulation"};
  app.require_subcommand(1);
  detail::Globals g;
  app.add_option("--config", g.config_path, "JSON run configuration");
  app.add_option("--seed", g.seed, "global RNG seed (overrides config)");
  app.add_option("--out", g.out, "output directory (overrides config)");
  app.add_option("--threads", g.threads, "worker threads (overrides config)");

  std::string dataset, model, queries, predictions;
  auto* fit = app.add_subcommand("fit", "fit a model to a CSV dataset and write it as JSON");
  fit->add_option("dataset", dataset, "CSV with header x_1..x_d,y_1..y_m")->required();
  fit->add_option("model_out", model, "output model JSON")->required();

  auto* predict = app.add_subcommand("predict", "evaluate a saved model on query inputs");
  predict->add_option("model", model, "model JSON")->required();
  predict->add_option("queries", queries, "CSV with header x_1..x_d")->required();
  predict->add_option("out_csv", predictions, "output CSV")->required();

  auto* bench = app.add_subcommand("bench", "regression benchmark (LACKI vs linear least squares)");
  auto* simulate = app.add_subcommand("simulate", "single wing-rock MRAC trial with trajectory dump");
  auto* campaign = app.add_subcommand("campaign", "randomized MRAC campaign against the PD baseline");
  auto* bounds = app.add_subcommand("bounds", "tracking-error bound report for the error recurrence");

  double epsilon = 0, delta = 0, l_star = 0;
  int dim = 1;
  auto* complexity = app.add_subcommand("complexity", "uniform-sampling sample complexity");
  complexity->add_option("epsilon", epsilon)->required();
  complexity->add_option("delta", delta)->required();
  complexity->add_option("l_star", l_star)->required();
  complexity->add_option("d", dim)->required();

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUserError;
  }

  try {
    if (*fit) return detail::cmd_fit(dataset, model, g, out);
    if (*predict) return detail::cmd_predict(model, queries, predictions, out);
    if (*bench) return detail::cmd_bench(g, out);
    if (*simulate) return detail::cmd_simulate(g, out);
    if (*campaign) return detail::cmd_campaign(g, out);
    if (*bounds) return detail::cmd_bounds(g, out);
    if (*complexity) return detail::cmd_complexity(epsilon, delta, l_star, dim, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const UndefinedPrediction& e) {
    err << "error: " << e.what() << "\n";
    return kNumericError;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return kNumericError;
  } catch (const std::invalid_argument& e) {  // ConfigError, DimensionError
    err << "error: " << e.what() << "\n";
    return kUserError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUserError;
  }
  return kUserError;
}

}  // namespace lacki::cli

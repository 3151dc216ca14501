#pragma once

// Regression benchmarks: synthetic targets, bounded uniform noise, and a
// least-squares affine baseline.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "lacki/dataset.hpp"
#include "lacki/errors.hpp"
#include "lacki/lacki.hpp"

namespace lacki::bench {

/// |cos(2 pi x1)| + x1
inline double f1(std::span<const double> x) {
  return std::abs(std::cos(2 * std::numbers::pi * x[0])) + x[0];
}

/// sin(x1) sin(x2) + 0.05 (sin(5 x1) sin(5 x2))^3
inline double f2(std::span<const double> x) {
  const double s = std::sin(5 * x[0]) * std::sin(5 * x[1]);
  return std::sin(x[0]) * std::sin(x[1]) + 0.05 * s * s * s;
}

/// Best Lipschitz constant of f1 on [0,1] under the max-norm.
inline constexpr double kF1Lipschitz = 2 * std::numbers::pi + 1;

enum class Target { F1, F2, Custom };

inline const char* to_string(Target t) {
  switch (t) {
    case Target::F1: return "f1";
    case Target::F2: return "f2";
    case Target::Custom: return "custom";
  }
  return "?";
}

/// Affine least-squares model y = c + W x, one column of W per output.
class LinearModel {
 public:
  LinearModel() = default;
  LinearModel(Eigen::VectorXd intercept, Eigen::MatrixXd weights)
      : intercept_(std::move(intercept)), weights_(std::move(weights)) {}

  const Eigen::VectorXd& intercept() const noexcept { return intercept_; }
  /// d x m
  const Eigen::MatrixXd& weights() const noexcept { return weights_; }

  std::vector<double> predict(std::span<const double> x) const {
    if (static_cast<Eigen::Index>(x.size()) != weights_.rows()) {
      throw DimensionError("query dimension does not match the linear model");
    }
    const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    const Eigen::VectorXd y = intercept_ + weights_.transpose() * xv;
    return {y.data(), y.data() + y.size()};
  }

 private:
  Eigen::VectorXd intercept_;
  Eigen::MatrixXd weights_;
};

/// Least squares with the minimum-norm solution on rank deficiency.
inline LinearModel linear_baseline_fit(const Dataset& data) {
  const auto n = static_cast<Eigen::Index>(data.size());
  const auto d = static_cast<Eigen::Index>(data.input_dim());
  const auto m = static_cast<Eigen::Index>(data.output_dim());
  if (n == 0) return {Eigen::VectorXd::Zero(m), Eigen::MatrixXd::Zero(d, m)};
  Eigen::MatrixXd a(n, d + 1);
  Eigen::MatrixXd y(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    const auto s = data.input(static_cast<std::size_t>(i));
    const auto f = data.observation(static_cast<std::size_t>(i));
    for (Eigen::Index k = 0; k < d; ++k) a(i, k + 1) = s[static_cast<std::size_t>(k)];
    for (Eigen::Index j = 0; j < m; ++j) y(i, j) = f[static_cast<std::size_t>(j)];
  }
  const Eigen::MatrixXd coef = a.completeOrthogonalDecomposition().solve(y);
  return {coef.row(0).transpose(), coef.bottomRows(d)};
}

struct ExperimentSpec {
  Target target = Target::F1;
  std::function<double(std::span<const double>)> custom;  ///< used when target == Custom
  std::size_t d = 1;
  std::size_t n_train = 100;
  double noise_halfwidth = 0;
  std::size_t n_test = 25000;
  std::size_t n_repeats = 30;
  KiConfig learner;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  void validate() const {
    if (d < 1) throw ConfigError("d must be >= 1");
    if (target == Target::F2 && d < 2) throw ConfigError("f2 needs d >= 2");
    if (target == Target::Custom && !custom) throw ConfigError("custom target without a function");
    if (n_test < 1) throw ConfigError("n_test must be >= 1");
    if (n_repeats < 1) throw ConfigError("n_repeats must be >= 1");
    if (!(noise_halfwidth >= 0)) throw ConfigError("noise_halfwidth must be >= 0");
    learner.validate(d, 1);
  }

  double evaluate(std::span<const double> x) const {
    switch (target) {
      case Target::F1: return f1(x);
      case Target::F2: return f2(x);
      case Target::Custom: return custom(x);
    }
    return 0;
  }
};

/// Metrics of one learner on one repeat.
struct TrialMetrics {
  double rms = 0;     ///< sqrt(mean squared error) on the test inputs
  double me = 0;      ///< max absolute error on the test inputs
  double log_tt = 0;  ///< log training seconds (median of 3)
  double log_pt = 0;  ///< log prediction seconds per test input
  double ell = 0;     ///< fitted constant; 0 for the linear baseline
};

struct Summary {
  double mean = 0;
  double std = 0;  ///< sample standard deviation; 0 for a single value
};

inline Summary summarize(std::span<const double> v) {
  Summary s;
  if (v.empty()) return s;
  double acc = 0;
  for (double x : v) acc += x;
  s.mean = acc / static_cast<double>(v.size());
  if (v.size() > 1) {
    double sq = 0;
    for (double x : v) sq += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(sq / static_cast<double>(v.size() - 1));
  }
  return s;
}

struct MetricBundle {
  Summary rms, me, log_tt, log_pt;
  std::vector<TrialMetrics> trials;
};

inline MetricBundle bundle(std::vector<TrialMetrics> trials) {
  MetricBundle b;
  std::vector<double> col(trials.size());
  const auto pick = [&](double TrialMetrics::*field) {
    for (std::size_t i = 0; i < trials.size(); ++i) col[i] = trials[i].*field;
    return summarize(col);
  };
  b.rms = pick(&TrialMetrics::rms);
  b.me = pick(&TrialMetrics::me);
  b.log_tt = pick(&TrialMetrics::log_tt);
  b.log_pt = pick(&TrialMetrics::log_pt);
  b.trials = std::move(trials);
  return b;
}

struct ExperimentResult {
  MetricBundle lacki;
  MetricBundle linear;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

inline double safe_log(double v) { return std::log(std::max(v, 1e-12)); }

/// Train/test draw and evaluation of both learners for repeat `r`.
inline std::pair<TrialMetrics, TrialMetrics> run_repeat(const ExperimentSpec& spec, std::size_t r) {
  std::mt19937_64 rng(spec.seed ^ (0x9E3779B97F4A7C15ULL * (r + 1)));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t d = spec.d;

  Dataset train(d, 1);
  train.reserve(spec.n_train);
  std::vector<double> x(d);
  for (std::size_t i = 0; i < spec.n_train; ++i) {
    for (auto& xi : x) xi = unit(rng);
    double y = spec.evaluate(x);
    if (spec.noise_halfwidth > 0) {
      y += std::uniform_real_distribution<double>(-spec.noise_halfwidth, spec.noise_halfwidth)(rng);
    }
    train.add(x, std::span<const double>(&y, 1));
  }
  std::vector<double> test_x(spec.n_test * d);
  std::vector<double> test_y(spec.n_test);
  for (std::size_t i = 0; i < spec.n_test; ++i) {
    for (std::size_t k = 0; k < d; ++k) test_x[i * d + k] = unit(rng);
    test_y[i] = spec.evaluate(std::span<const double>(test_x.data() + i * d, d));
  }

  const auto score = [&](auto&& predict_one, TrialMetrics& out) {
    double sq = 0;
    double mx = 0;
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < spec.n_test; ++i) {
      const double err = std::abs(predict_one(std::span<const double>(test_x.data() + i * d, d)) - test_y[i]);
      sq += err * err;
      mx = std::max(mx, err);
    }
    const auto t1 = Clock::now();
    out.rms = std::sqrt(sq / static_cast<double>(spec.n_test));
    out.me = mx;
    out.log_pt = safe_log(seconds(t0, t1) / static_cast<double>(spec.n_test));
  };

  const auto median_of_3 = [](auto&& fn) {
    std::array<double, 3> t{};
    for (auto& ti : t) {
      const auto a = Clock::now();
      fn();
      ti = seconds(a, Clock::now());
    }
    std::sort(t.begin(), t.end());
    return t[1];
  };

  TrialMetrics lk;
  LackiState state;
  lk.log_tt = safe_log(median_of_3([&] { state = LackiState::fit(train, spec.learner); }));
  lk.ell = state.ell();
  if (train.empty()) {
    lk.rms = lk.me = std::numeric_limits<double>::quiet_NaN();
  } else {
    score([&](std::span<const double> q) { return state.predict(q).value[0]; }, lk);
  }

  TrialMetrics lin;
  LinearModel model;
  lin.log_tt = safe_log(median_of_3([&] { model = linear_baseline_fit(train); }));
  score([&](std::span<const double> q) { return model.predict(q)[0]; }, lin);
  return {lk, lin};
}

}  // namespace detail

/// Runs all repeats (in parallel when spec.threads > 1). Accuracy metrics
/// depend only on the spec; timing metrics are wall-clock.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<TrialMetrics> lk(spec.n_repeats), lin(spec.n_repeats);
  std::vector<std::exception_ptr> errors(spec.n_repeats);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t r = next++; r < spec.n_repeats; r = next++) {
      try {
        std::tie(lk[r], lin[r]) = detail::run_repeat(spec, r);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const unsigned n_workers =
      std::max(1u, std::min<unsigned>(spec.threads, static_cast<unsigned>(spec.n_repeats)));
  {
    std::vector<std::jthread> pool;
    for (unsigned k = 1; k < n_workers; ++k) pool.emplace_back(worker);
    worker();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return {bundle(std::move(lk)), bundle(std::move(lin))};
}

struct SweepRow {
  std::size_t d = 0;
  ExperimentResult result;
};

inline std::vector<SweepRow> run_dimension_sweep(const ExperimentSpec& base,
                                                 std::span<const std::size_t> dims) {
  std::vector<SweepRow> rows;
  rows.reserve(dims.size());
  for (std::size_t d : dims) {
    ExperimentSpec spec = base;
    spec.d = d;
    if (spec.learner.metric.kind() == InputMetric::Kind::WeightedMaxNorm) {
      throw ConfigError("dimension sweeps require an unweighted metric");
    }
    rows.push_back({d, run_experiment(spec)});
  }
  return rows;
}

}  // namespace lacki::bench

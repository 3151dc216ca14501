#pragma once

// Discrete-time model-reference adaptive control of the wing-rock roll
// dynamics with a kinky-inference adaptive element.
//
// Plant:      x1' = x2,  x2' = a(x) + b u
// Reference:  xi1' = xi2, xi2' = f_r(xi, r) = wn^2 (r - xi1) - 2 zeta wn xi2
// Control:    u = (nu_r + nu_pd - nu_ad) / b,  nu_pd = K1 e1 + K2 e2,  e = xi - x
//
// Everything is advanced with forward Euler at step dt, and the learner
// receives (x_n, a(x_n) + noise) after every control step.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include "lacki/errors.hpp"
#include "lacki/lacki.hpp"

namespace lacki::mrac {

using State = std::array<double, 2>;

/// Drift coefficients used throughout the wing-rock literature.
inline constexpr std::array<double, 6> kWingRockWeights = {0.8,     0.2314, 0.6918,
                                                           -0.6245, 0.0095, 0.0214};

struct WingRockPlant {
  std::array<double, 6> w = kWingRockWeights;
  double b = 3.0;

  /// a(x) = W0 + W1 x1 + W2 x2 + W3 |x1| x2 + W4 |x2| x2 + W5 x2^3
  double drift(const State& x) const noexcept {
    const double x1 = x[0];
    const double x2 = x[1];
    return w[0] + w[1] * x1 + w[2] * x2 + w[3] * std::abs(x1) * x2 + w[4] * std::abs(x2) * x2 +
           w[5] * x2 * x2 * x2;
  }

  WingRockPlant scaled(double factor) const {
    WingRockPlant p = *this;
    for (double& wi : p.w) wi *= factor;
    return p;
  }
};

struct ReferenceCommand {
  enum class Kind { SquareWave, Sinusoid, Constant };
  Kind kind = Kind::SquareWave;
  double amplitude = 1.0;
  double period = 20.0;  ///< [s]

  /// Square wave is +A on the first half of each period, -A on the second.
  double operator()(double t) const noexcept {
    switch (kind) {
      case Kind::SquareWave: {
        const double phase = t / period - std::floor(t / period);
        return phase < 0.5 ? amplitude : -amplitude;
      }
      case Kind::Sinusoid:
        return amplitude * std::sin(2 * std::numbers::pi * t / period);
      case Kind::Constant:
        return amplitude;
    }
    return 0;
  }

  friend bool operator==(const ReferenceCommand&, const ReferenceCommand&) = default;
};

struct ReferenceModel {
  double omega_n = 1.0;  ///< [rad/s]
  double zeta = 0.5;
  ReferenceCommand command;

  double response(const State& xi, double r) const noexcept {
    return omega_n * omega_n * (r - xi[0]) - 2 * zeta * omega_n * xi[1];
  }

  friend bool operator==(const ReferenceModel&, const ReferenceModel&) = default;
};

struct MracConfig {
  double k1 = 1.0;
  double k2 = 1.0;
  double delta = 0.005;  ///< Euler step [s]
  double t0 = 0.0;
  double tf = 50.0;
  State x0 = {3.0, 6.0};
  State xi0 = {0.0, 0.0};
  double w_scale = 1.0;
  double obs_noise = 0.0;  ///< half-width of uniform noise on drift observations
  KiConfig learner = [] {
    KiConfig c;
    c.alpha = 1;
    c.lambda = 0;
    c.l_floor = 1;
    return c;
  }();
  bool adaptive = true;  ///< false gives the PD baseline (nu_ad = 0)
  bool record_trajectory = false;
  ReferenceModel reference;
  WingRockPlant plant;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(delta > 0) || !std::isfinite(delta)) throw ConfigError("delta must be > 0");
    if (!(tf > t0)) throw ConfigError("tf must exceed t0");
    if (!(obs_noise >= 0)) throw ConfigError("obs_noise must be >= 0");
    if (!std::isfinite(w_scale)) throw ConfigError("w_scale must be finite");
    for (double v : {x0[0], x0[1], xi0[0], xi0[1], k1, k2}) {
      if (!std::isfinite(v)) throw ConfigError("non-finite initial state or gain");
    }
    learner.validate(2, 1);
  }

  /// Number of Euler steps; the trial visits steps() + 1 time points.
  std::size_t steps() const { return static_cast<std::size_t>(std::llround((tf - t0) / delta)); }
};

struct StepSample {
  double t, x1, x2, xi1, xi2, e1, e2, u, nu_ad, a_true, ell;
};

struct TrialRecord {
  double log_xerr = 0;
  double log_xdoterr = 0;
  double log_prederr = 0;
  double log_cmd = 0;
  double max_rt_predict = 0;  ///< [s], wall clock
  double max_rt_learn = 0;    ///< [s], wall clock
  double ell_final = 0;
  bool diverged = false;
  std::size_t steps_completed = 0;
  /// Sampled controller inputs when the trial was drawn by a campaign.
  State x0{};
  double l_floor = 0;
  double w_scale = 0;
  std::vector<StepSample> trajectory;
};

struct ControlOutput {
  double u = 0;
  double nu_ad = 0;
  double nu_pd = 0;
};

/// Inversion control with a known input gain `b` and no prior drift model.
/// An empty learner contributes nu_ad = 0.
inline ControlOutput control(const LackiState* learner, const State& x, const State& xi,
                             double nu_r, double k1, double k2, double b) {
  ControlOutput out;
  if (learner != nullptr && !learner->data().empty()) {
    const std::array<double, 2> q = x;
    out.nu_ad = learner->predict_value(q);
    if (!std::isfinite(out.nu_ad)) throw NumericError("adaptive element returned a non-finite value");
  }
  out.nu_pd = k1 * (xi[0] - x[0]) + k2 * (xi[1] - x[1]);
  out.u = (nu_r + out.nu_pd - out.nu_ad) / b;
  return out;
}

/// Floor applied before taking the log of cumulative metrics.
inline constexpr double kLogFloor = 1e-12;

class Simulation {
 public:
  explicit Simulation(MracConfig config)
      : config_(std::move(config)),
        plant_(config_.plant.scaled(config_.w_scale)),
        learner_(LackiState::empty(2, 1, config_.learner)),
        rng_(config_.seed),
        x_(config_.x0),
        xi_(config_.xi0),
        t_(config_.t0) {
    config_.validate();
    if (config_.record_trajectory) trajectory_.reserve(config_.steps() + 1);
  }

  const State& state() const noexcept { return x_; }
  const State& reference_state() const noexcept { return xi_; }
  double time() const noexcept { return t_; }
  std::size_t step_index() const noexcept { return n_; }
  const LackiState& learner() const noexcept { return learner_; }
  const WingRockPlant& plant() const noexcept { return plant_; }
  bool diverged() const noexcept { return diverged_; }
  bool finished() const noexcept { return diverged_ || n_ > config_.steps(); }

  /// Controls, records and learns at the current time point, then integrates
  /// to the next one (except after the final time point).
  const StepSample& step() {
    if (finished()) throw NumericError("simulation already finished");
    const double r = config_.reference.command(t_);
    const double nu_r = config_.reference.response(xi_, r);

    const auto t_pred = Clock::now();
    const ControlOutput c =
        control(config_.adaptive ? &learner_ : nullptr, x_, xi_, nu_r, config_.k1, config_.k2, plant_.b);
    max_rt_predict_ = std::max(max_rt_predict_, seconds_since(t_pred));

    const double a = plant_.drift(x_);
    last_ = StepSample{t_,          x_[0],       x_[1],   xi_[0],  xi_[1], xi_[0] - x_[0],
                       xi_[1] - x_[1], c.u,     c.nu_ad, a,       learner_.ell()};
    if (config_.record_trajectory) trajectory_.push_back(last_);

    if (config_.adaptive) {
      double obs = a;
      if (config_.obs_noise > 0) {
        obs += std::uniform_real_distribution<double>(-config_.obs_noise, config_.obs_noise)(rng_);
      }
      const std::array<double, 1> y{obs};
      const auto t_learn = Clock::now();
      learner_.add_observation(std::span<const double>(x_), std::span<const double>(y));
      max_rt_learn_ = std::max(max_rt_learn_, seconds_since(t_learn));
    }

    if (n_ < config_.steps()) {
      const double dt = config_.delta;
      xerr_ += std::abs(last_.e1) * dt;
      xdoterr_ += std::abs(last_.e2) * dt;
      prederr_ += std::abs(c.nu_ad - a) * dt;
      cmd_ += std::abs(c.u) * dt;
      const State x_next{x_[0] + dt * x_[1], x_[1] + dt * (a + plant_.b * c.u)};
      const State xi_next{xi_[0] + dt * xi_[1], xi_[1] + dt * nu_r};
      x_ = x_next;
      xi_ = xi_next;
      t_ = config_.t0 + static_cast<double>(n_ + 1) * dt;
      if (!std::isfinite(x_[0]) || !std::isfinite(x_[1]) ||
          std::max(std::abs(x_[0]), std::abs(x_[1])) > 1e6) {
        diverged_ = true;
      }
    }
    ++n_;
    return last_;
  }

  TrialRecord finish() && {
    while (!finished()) step();
    TrialRecord rec;
    rec.diverged = diverged_;
    rec.steps_completed = n_;
    const auto logged = [this](double v) {
      return diverged_ ? std::numeric_limits<double>::infinity() : std::log(std::max(v, kLogFloor));
    };
    rec.log_xerr = logged(xerr_);
    rec.log_xdoterr = logged(xdoterr_);
    rec.log_prederr = logged(prederr_);
    rec.log_cmd = logged(cmd_);
    rec.max_rt_predict = max_rt_predict_;
    rec.max_rt_learn = max_rt_learn_;
    rec.ell_final = learner_.ell();
    rec.x0 = config_.x0;
    rec.l_floor = config_.learner.l_floor;
    rec.w_scale = config_.w_scale;
    rec.trajectory = std::move(trajectory_);
    return rec;
  }

 private:
  using Clock = std::chrono::steady_clock;
  static double seconds_since(Clock::time_point t) {
    return std::chrono::duration<double>(Clock::now() - t).count();
  }

  MracConfig config_;
  WingRockPlant plant_;
  LackiState learner_;
  std::mt19937_64 rng_;
  State x_;
  State xi_;
  double t_;
  std::size_t n_ = 0;
  bool diverged_ = false;
  StepSample last_{};
  double xerr_ = 0, xdoterr_ = 0, prederr_ = 0, cmd_ = 0;
  double max_rt_predict_ = 0, max_rt_learn_ = 0;
  std::vector<StepSample> trajectory_;
};

/// Full simulation from t0 to tf. Divergence is recorded, not thrown.
inline TrialRecord run_trial(const MracConfig& config) { return Simulation(config).finish(); }

/// Sampling ranges for randomized campaigns. A zero-width range keeps the base value.
struct Randomization {
  std::array<double, 2> x0_range = {0.0, 7.0};
  std::array<double, 2> l_floor_range = {0.05, 2.0};
  std::array<double, 2> w_scale_range = {0.0, 2.0};

  static Randomization none() { return {{0, 0}, {0, 0}, {0, 0}}; }
};

/// SplitMix64 step; used to derive independent per-trial seeds.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Config of trial `index` in a campaign; depends only on (base, index).
inline MracConfig campaign_trial_config(const MracConfig& base, const Randomization& rnd,
                                        std::size_t index) {
  MracConfig c = base;
  c.seed = derive_seed(base.seed, index);
  std::mt19937_64 rng(c.seed);
  const auto draw = [&rng](const std::array<double, 2>& range, double fallback) {
    if (range[1] <= range[0]) return fallback;
    return std::uniform_real_distribution<double>(range[0], range[1])(rng);
  };
  // Draw order is fixed so that PD and adaptive campaigns see identical trials.
  const double x1 = draw(rnd.x0_range, base.x0[0]);
  const double x2 = draw(rnd.x0_range, base.x0[1]);
  const double lf = draw(rnd.l_floor_range, base.learner.l_floor);
  const double ws = draw(rnd.w_scale_range, base.w_scale);
  c.x0 = {x1, x2};
  c.learner.l_floor = lf;
  c.w_scale = ws;
  return c;
}

/// Runs `n_trials` independent trials on up to `threads` workers. Results are
/// ordered by trial index and independent of the thread count.
inline std::vector<TrialRecord> run_campaign(const MracConfig& base, std::size_t n_trials,
                                             const Randomization& rnd, unsigned threads = 1) {
  if (n_trials < 1) throw ConfigError("a campaign needs at least one trial");
  base.validate();
  std::vector<TrialRecord> out(n_trials);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n_trials);
  const auto worker = [&] {
    for (std::size_t i = next++; i < n_trials; i = next++) {
      try {
        out[i] = run_trial(campaign_trial_config(base, rnd, i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n_workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_trials)));
  {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers - 1);
    for (unsigned k = 1; k < n_workers; ++k) pool.emplace_back(worker);
    worker();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace lacki::mrac

#pragma once

// Kinky inference with a lazily adapted Hoelder constant.
//
// The predictor is the midpoint of the ceiling and floor envelopes
//
//   u_j(x) = min_i f_ij + L d(x, s_i)^alpha + e
//   l_j(x) = max_i f_ij - L d(x, s_i)^alpha - e
//
// clipped by optional a priori bounds. L is the smallest constant consistent
// with the data up to the slack lambda:
//
//   L = max{ L_floor, max_{d(s,s') > 0} (|f(s) - f(s')|_inf - lambda) / d(s,s')^alpha }
//
// and is maintained incrementally as samples arrive.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lacki/dataset.hpp"
#include "lacki/errors.hpp"
#include "lacki/metric.hpp"

namespace lacki {

template <typename Real>
struct BasicKiConfig {
  Real alpha = 1;     ///< Hoelder exponent in (0, 1]
  Real lambda = 0;    ///< slope slack; 2 * noise bound for noise-robust estimates
  Real l_floor = 0;   ///< lower bound on the estimated constant
  Real e_bar = 0;     ///< constant error belief added to both envelopes
  std::optional<std::vector<Real>> lower_bound;  ///< may hold -inf entries
  std::optional<std::vector<Real>> upper_bound;  ///< may hold +inf entries
  BasicInputMetric<Real> metric = BasicInputMetric<Real>::max_norm();

  /// Range checks that do not depend on data dimensions.
  void validate() const {
    if (!(alpha > 0 && alpha <= 1)) throw ConfigError("alpha must lie in (0, 1]");
    if (!(lambda >= 0) || !std::isfinite(lambda)) throw ConfigError("lambda must be finite and >= 0");
    if (!(l_floor >= 0) || !std::isfinite(l_floor)) throw ConfigError("l_floor must be finite and >= 0");
    if (!(e_bar >= 0) || !std::isfinite(e_bar)) throw ConfigError("e_bar must be finite and >= 0");
    if (lower_bound && upper_bound) {
      if (lower_bound->size() != upper_bound->size()) {
        throw DimensionError("lower_bound and upper_bound differ in length");
      }
      for (std::size_t j = 0; j < lower_bound->size(); ++j) {
        if (!((*lower_bound)[j] <= (*upper_bound)[j])) {
          throw ConfigError("lower_bound exceeds upper_bound in component " + std::to_string(j));
        }
      }
    }
    for (const auto* b : {&lower_bound, &upper_bound}) {
      if (*b) {
        for (Real v : **b) {
          if (std::isnan(v)) throw ConfigError("bound vectors must not contain NaN");
        }
      }
    }
  }

  /// Full validation against data dimensions.
  void validate(std::size_t input_dim, std::size_t output_dim) const {
    validate();
    metric.check_dimension(input_dim);
    if (lower_bound && lower_bound->size() != output_dim) {
      throw DimensionError("lower_bound length " + std::to_string(lower_bound->size()) +
                           " does not match output dimension " + std::to_string(output_dim));
    }
    if (upper_bound && upper_bound->size() != output_dim) {
      throw DimensionError("upper_bound length " + std::to_string(upper_bound->size()) +
                           " does not match output dimension " + std::to_string(output_dim));
    }
  }

  friend bool operator==(const BasicKiConfig&, const BasicKiConfig&) = default;
};

template <typename Real>
struct BasicPrediction {
  std::vector<Real> value;      ///< midpoint of the clipped envelopes
  std::vector<Real> halfwidth;  ///< half the envelope gap; negative if the data are inconsistent
  std::vector<Real> ceiling;    ///< min{upper bound, ceiling}
  std::vector<Real> floor;      ///< max{lower bound, floor}
};

namespace detail {

template <typename Real>
Real powered(Real distance, Real alpha) noexcept {
  return alpha == Real(1) ? distance : std::pow(distance, alpha);
}

/// Slope ratio of a pair, or nullopt when the inputs coincide under the metric.
template <typename Real>
std::optional<Real> pair_slope(std::span<const Real> s, std::span<const Real> fs,
                               std::span<const Real> t, std::span<const Real> ft,
                               const BasicKiConfig<Real>& config) noexcept {
  const Real dist = config.metric(s, t);
  if (dist == Real(0)) return std::nullopt;
  return (max_norm_distance(fs, ft) - config.lambda) / powered(dist, config.alpha);
}

}  // namespace detail

/// Batch estimate of the Hoelder constant over all distinct-input pairs.
template <typename Real>
Real estimate_constant_batch(const BasicDataset<Real>& data, const BasicKiConfig<Real>& config) {
  config.validate();
  if (data.empty()) return config.l_floor;
  config.validate(data.input_dim(), data.output_dim());
  Real best = config.l_floor;
  const std::size_t n = data.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      if (auto slope = detail::pair_slope(data.input(i), data.observation(i), data.input(k),
                                          data.observation(k), config)) {
        best = std::max(best, *slope);
      }
    }
  }
  return best;
}

/// A dataset together with its lazily adapted constant.
///
/// Reads (predict) are const and may run concurrently; updates need exclusive access.
template <typename Real>
class BasicLackiState {
 public:
  BasicLackiState() = default;

  /// Fits the constant over `data` in O(N^2) metric evaluations.
  static BasicLackiState fit(BasicDataset<Real> data, BasicKiConfig<Real> config) {
    const Real ell = estimate_constant_batch(data, config);
    return BasicLackiState(std::move(data), std::move(config), ell);
  }

  /// Empty-data learner for online use.
  static BasicLackiState empty(std::size_t input_dim, std::size_t output_dim,
                               BasicKiConfig<Real> config) {
    config.validate(input_dim, output_dim);
    const Real ell = config.l_floor;
    return BasicLackiState(BasicDataset<Real>(input_dim, output_dim), std::move(config), ell);
  }

  /// Rebuilds a state from stored parts; `ell` is trusted as given.
  static BasicLackiState restore(BasicDataset<Real> data, BasicKiConfig<Real> config, Real ell) {
    config.validate(data.input_dim(), data.output_dim());
    return BasicLackiState(std::move(data), std::move(config), ell);
  }

  const BasicKiConfig<Real>& config() const noexcept { return config_; }
  const BasicDataset<Real>& data() const noexcept { return data_; }
  Real ell() const noexcept { return ell_; }
  std::size_t input_dim() const noexcept { return data_.input_dim(); }
  std::size_t output_dim() const noexcept { return data_.output_dim(); }

  /// Appends a batch and raises the constant using only the pairs that involve
  /// new samples: O(|S| N + |S|^2) metric evaluations.
  void add_observations(const BasicDataset<Real>& batch) {
    if (batch.empty()) return;
    if (batch.input_dim() != data_.input_dim() || batch.output_dim() != data_.output_dim()) {
      throw DimensionError("batch dimensions do not match the learner");
    }
    const std::size_t old_n = data_.size();
    Real best = ell_;
    for (std::size_t a = 0; a < batch.size(); ++a) {
      const auto s = batch.input(a);
      const auto fs = batch.observation(a);
      for (std::size_t i = 0; i < old_n; ++i) {
        if (auto slope = detail::pair_slope(data_.input(i), data_.observation(i), s, fs, config_)) {
          best = std::max(best, *slope);
        }
      }
      for (std::size_t b = a + 1; b < batch.size(); ++b) {
        if (auto slope = detail::pair_slope(s, fs, batch.input(b), batch.observation(b), config_)) {
          best = std::max(best, *slope);
        }
      }
    }
    data_.reserve(old_n + batch.size());
    for (std::size_t a = 0; a < batch.size(); ++a) data_.add(batch.input(a), batch.observation(a));
    ell_ = best;
  }

  /// Single-sample update; the online-learning hot path.
  void add_observation(std::span<const Real> input, std::span<const Real> observation) {
    if (input.size() != data_.input_dim() || observation.size() != data_.output_dim()) {
      throw DimensionError("sample dimensions do not match the learner");
    }
    Real best = ell_;
    const std::size_t n = data_.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (auto slope =
              detail::pair_slope(data_.input(i), data_.observation(i), input, observation, config_)) {
        best = std::max(best, *slope);
      }
    }
    data_.add(input, observation);
    ell_ = best;
  }

  /// Envelope evaluation with the current constant.
  BasicPrediction<Real> predict(std::span<const Real> query) const {
    const std::size_t d = data_.input_dim();
    const std::size_t m = data_.output_dim();
    if (query.size() != d) {
      throw DimensionError("query has length " + std::to_string(query.size()) +
                           ", learner expects " + std::to_string(d));
    }
    for (Real q : query) {
      if (!std::isfinite(q)) throw ConfigError("query contains a non-finite component");
    }
    constexpr Real inf = std::numeric_limits<Real>::infinity();
    BasicPrediction<Real> out;
    out.ceiling.assign(m, inf);
    out.floor.assign(m, -inf);
    const std::size_t n = data_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Real radius = ell_ * detail::powered(config_.metric(query, data_.input(i)), config_.alpha) +
                          config_.e_bar;
      const auto f = data_.observation(i);
      for (std::size_t j = 0; j < m; ++j) {
        out.ceiling[j] = std::min(out.ceiling[j], f[j] + radius);
        out.floor[j] = std::max(out.floor[j], f[j] - radius);
      }
    }
    out.value.resize(m);
    out.halfwidth.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      if (config_.upper_bound) out.ceiling[j] = std::min(out.ceiling[j], (*config_.upper_bound)[j]);
      if (config_.lower_bound) out.floor[j] = std::max(out.floor[j], (*config_.lower_bound)[j]);
      out.value[j] = Real(0.5) * out.ceiling[j] + Real(0.5) * out.floor[j];
      out.halfwidth[j] = Real(0.5) * out.ceiling[j] - Real(0.5) * out.floor[j];
      if (!std::isfinite(out.value[j])) {
        throw UndefinedPrediction("prediction undefined in component " + std::to_string(j) +
                                  ": clipped envelopes are not both finite");
      }
    }
    return out;
  }

  /// Midpoint only, for scalar-output callers.
  Real predict_value(std::span<const Real> query, std::size_t component = 0) const {
    return predict(query).value.at(component);
  }

 private:
  BasicLackiState(BasicDataset<Real> data, BasicKiConfig<Real> config, Real ell)
      : config_(std::move(config)), data_(std::move(data)), ell_(ell) {}

  BasicKiConfig<Real> config_;
  BasicDataset<Real> data_;
  Real ell_ = 0;
};

using KiConfig = BasicKiConfig<double>;
using Prediction = BasicPrediction<double>;
using LackiState = BasicLackiState<double>;

template <typename Real>
BasicLackiState<Real> fit(BasicDataset<Real> data, BasicKiConfig<Real> config) {
  return BasicLackiState<Real>::fit(std::move(data), std::move(config));
}

/// Returns a copy of `state` extended by `new_pairs`.
template <typename Real>
BasicLackiState<Real> update_constant(BasicLackiState<Real> state,
                                      const BasicDataset<Real>& new_pairs) {
  state.add_observations(new_pairs);
  return state;
}

template <typename Real>
BasicPrediction<Real> predict(const BasicLackiState<Real>& state, std::span<const Real> query) {
  return state.predict(query);
}

}  // namespace lacki

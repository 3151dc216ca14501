#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lacki/errors.hpp"

namespace lacki {

/// Input-space metric. Output space always uses the max-norm.
template <typename Real>
class BasicInputMetric {
 public:
  enum class Kind { MaxNorm, EuclideanNorm, WeightedMaxNorm };

  BasicInputMetric() = default;

  static BasicInputMetric max_norm() { return BasicInputMetric(Kind::MaxNorm, {}); }
  static BasicInputMetric euclidean() { return BasicInputMetric(Kind::EuclideanNorm, {}); }
  static BasicInputMetric weighted_max(std::vector<Real> weights) {
    if (weights.empty()) throw ConfigError("weighted max-norm needs at least one weight");
    for (Real w : weights) {
      if (!(w > Real(0)) || !std::isfinite(w)) {
        throw ConfigError("weighted max-norm requires strictly positive finite weights");
      }
    }
    return BasicInputMetric(Kind::WeightedMaxNorm, std::move(weights));
  }

  Kind kind() const noexcept { return kind_; }
  const std::vector<Real>& weights() const noexcept { return weights_; }

  /// Throws DimensionError if the metric cannot act on `d`-dimensional inputs.
  void check_dimension(std::size_t d) const {
    if (kind_ == Kind::WeightedMaxNorm && weights_.size() != d) {
      throw DimensionError("metric weights have length " + std::to_string(weights_.size()) +
                           ", input dimension is " + std::to_string(d));
    }
  }

  Real operator()(std::span<const Real> a, std::span<const Real> b) const noexcept {
    const std::size_t d = a.size();
    Real acc = 0;
    switch (kind_) {
      case Kind::MaxNorm:
        for (std::size_t k = 0; k < d; ++k) acc = std::max(acc, std::abs(a[k] - b[k]));
        return acc;
      case Kind::EuclideanNorm:
        for (std::size_t k = 0; k < d; ++k) {
          const Real t = a[k] - b[k];
          acc += t * t;
        }
        return std::sqrt(acc);
      case Kind::WeightedMaxNorm:
        for (std::size_t k = 0; k < d; ++k) {
          acc = std::max(acc, weights_[k] * std::abs(a[k] - b[k]));
        }
        return acc;
    }
    return acc;
  }

  friend bool operator==(const BasicInputMetric&, const BasicInputMetric&) = default;

 private:
  BasicInputMetric(Kind kind, std::vector<Real> weights)
      : kind_(kind), weights_(std::move(weights)) {}

  Kind kind_ = Kind::MaxNorm;
  std::vector<Real> weights_;
};

/// max_j |a_j - b_j|
template <typename Real>
Real max_norm_distance(std::span<const Real> a, std::span<const Real> b) noexcept {
  Real acc = 0;
  for (std::size_t k = 0; k < a.size(); ++k) acc = std::max(acc, std::abs(a[k] - b[k]));
  return acc;
}

using InputMetric = BasicInputMetric<double>;

}  // namespace lacki

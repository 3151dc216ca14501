#pragma once

// Test-only oracles shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "lacki/dataset.hpp"

namespace lacki::testing {

/// Largest |h(x) - h(x')| / |x - x'|^p over `pairs` uniform pairs in [lo, hi].
inline double empirical_ratio(const std::function<double(double)>& h, double p, double lo, double hi,
                              std::size_t pairs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  double best = 0;
  for (std::size_t k = 0; k < pairs; ++k) {
    const double x = u(rng), y = u(rng);
    const double dist = std::abs(x - y);
    if (dist == 0) continue;
    best = std::max(best, std::abs(h(x) - h(y)) / std::pow(dist, p));
  }
  return best;
}

/// Largest |f'| on a uniform grid of [lo, hi] by central differences.
inline double derivative_sup(const std::function<double(double)>& f, double lo, double hi,
                             std::size_t grid = 20000) {
  const double h = (hi - lo) / static_cast<double>(grid) * 1e-3;
  double best = 0;
  for (std::size_t i = 0; i <= grid; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid);
    best = std::max(best, std::abs(f(x + h) - f(x - h)) / (2 * h));
  }
  return best;
}

/// Random dataset on [0,1]^d with target `f` plus uniform noise of half-width `e`.
template <typename F>
Dataset noisy_dataset(std::size_t d, std::size_t n, F&& f, double e, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  Dataset data(d, 1);
  std::vector<double> x(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : x) v = u(rng);
    double y = f(x);
    if (e > 0) y += std::uniform_real_distribution<double>(-e, e)(rng);
    data.add(x, std::span<const double>(&y, 1));
  }
  return data;
}

}  // namespace lacki::testing

#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "lacki/dataset.hpp"
#include "lacki/errors.hpp"
#include "lacki/metric.hpp"

using lacki::Dataset;
using lacki::InputMetric;

namespace {

std::vector<double> random_point(std::mt19937_64& rng, std::size_t d) {
  std::uniform_real_distribution<double> u(-5, 5);
  std::vector<double> p(d);
  for (auto& v : p) v = u(rng);
  return p;
}

}  // namespace

TEST(InputMetric, MaxNormTakesLargestComponent) {
  const std::vector<double> a{0, 0, 0}, b{1, -3, 2};
  EXPECT_DOUBLE_EQ(InputMetric::max_norm()(a, b), 3.0);
  EXPECT_DOUBLE_EQ(InputMetric::euclidean()(a, b), std::sqrt(14.0));
  EXPECT_DOUBLE_EQ(InputMetric::weighted_max({2, 0.5, 1})(a, b), 2.0);
}

TEST(InputMetric, WeightsMustBePositive) {
  EXPECT_THROW(InputMetric::weighted_max({1, 0}), lacki::ConfigError);
  EXPECT_THROW(InputMetric::weighted_max({1, -1}), lacki::ConfigError);
  EXPECT_THROW(InputMetric::weighted_max({}), lacki::ConfigError);
}

TEST(InputMetric, WeightedMetricChecksDimension) {
  const auto m = InputMetric::weighted_max({1, 2});
  EXPECT_NO_THROW(m.check_dimension(2));
  EXPECT_THROW(m.check_dimension(3), lacki::DimensionError);
  EXPECT_NO_THROW(InputMetric::max_norm().check_dimension(7));
}

TEST(InputMetric, MetricAxiomsOnRandomTriples) {
  std::mt19937_64 rng(11);
  const std::vector<InputMetric> metrics{InputMetric::max_norm(), InputMetric::euclidean(),
                                         InputMetric::weighted_max({0.3, 2.0, 1.5})};
  for (const auto& dist : metrics) {
    for (int t = 0; t < 2000; ++t) {
      const auto a = random_point(rng, 3), b = random_point(rng, 3), c = random_point(rng, 3);
      EXPECT_EQ(dist(a, a), 0.0);
      EXPECT_GT(dist(a, b), 0.0);
      EXPECT_EQ(dist(a, b), dist(b, a));
      EXPECT_LE(dist(a, c), dist(a, b) + dist(b, c) + 1e-12);
    }
  }
}

TEST(Dataset, StoresRowsInOrder) {
  Dataset d(2, 1);
  d.add({0.0, 1.0}, {5.0});
  d.add({2.0, 3.0}, {6.0});
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.input(1)[0], 2.0);
  EXPECT_EQ(d.input(1)[1], 3.0);
  EXPECT_EQ(d.observation(0)[0], 5.0);
  EXPECT_FALSE(d.empty());
}

TEST(Dataset, RejectsWrongLengths) {
  Dataset d(2, 1);
  EXPECT_THROW(d.add({1.0}, {1.0}), lacki::DimensionError);
  EXPECT_THROW(d.add({1.0, 2.0}, {1.0, 2.0}), lacki::DimensionError);
  EXPECT_TRUE(d.empty());
}

TEST(Dataset, EqualityIsElementwise) {
  Dataset a(1, 1), b(1, 1);
  a.add({1.0}, {2.0});
  b.add({1.0}, {2.0});
  EXPECT_EQ(a, b);
  b.add({0.0}, {0.0});
  EXPECT_NE(a, b);
}

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lacki/bench.hpp"

using namespace lacki::bench;

namespace {

ExperimentSpec small_spec(Target t, std::size_t d, std::size_t n, double noise, double lambda) {
  ExperimentSpec s;
  s.target = t;
  s.d = d;
  s.n_train = n;
  s.noise_halfwidth = noise;
  s.n_test = 2000;
  s.n_repeats = 5;
  s.learner.lambda = lambda;
  s.seed = 123;
  return s;
}

}  // namespace

TEST(Targets, DefinitionsAtKnownPoints) {
  const std::vector<double> zero{0, 0}, quarter{0.25, 0.7};
  EXPECT_DOUBLE_EQ(f1(zero), 1.0);
  EXPECT_NEAR(f1(quarter), 0.25, 1e-15);
  EXPECT_EQ(f2(zero), 0.0);
  const std::vector<double> p{0.3, 0.9};
  const double s = std::sin(1.5) * std::sin(4.5);
  EXPECT_DOUBLE_EQ(f2(p), std::sin(0.3) * std::sin(0.9) + 0.05 * s * s * s);
}

TEST(LinearBaseline, RecoversAffineData) {
  lacki::Dataset d(2, 1);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 20; ++i) {
    const double a = u(rng), b = u(rng);
    d.add({a, b}, {0.5 + 2 * a - 3 * b});
  }
  const auto m = linear_baseline_fit(d);
  EXPECT_NEAR(m.intercept()(0), 0.5, 1e-12);
  EXPECT_NEAR(m.weights()(0, 0), 2.0, 1e-12);
  EXPECT_NEAR(m.weights()(1, 0), -3.0, 1e-12);
}

TEST(LinearBaseline, SinglePointGivesModelThroughIt) {
  lacki::Dataset d(1, 1);
  d.add({0.4}, {2.0});
  const auto m = linear_baseline_fit(d);
  const std::vector<double> q{0.4};
  EXPECT_NEAR(m.predict(q)[0], 2.0, 1e-12);
}

TEST(LinearBaseline, F1HasPositiveResidual) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  lacki::Dataset d(1, 1);
  for (int i = 0; i < 500; ++i) {
    const std::vector<double> x{u(rng)};
    d.add(x, std::vector<double>{f1(x)});
  }
  const auto m = linear_baseline_fit(d);
  double sse = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double r = m.predict(d.input(i))[0] - d.observation(i)[0];
    sse += r * r;
  }
  EXPECT_GT(sse, 1.0);
  // |cos 2 pi x| is symmetric about 1/2, so the fitted slope stays near 1.
  EXPECT_NEAR(m.weights()(0, 0), 1.0, 0.2);
}

TEST(Experiment, MaxErrorDominatesRms) {
  const auto r = run_experiment(small_spec(Target::F1, 2, 200, 0.5, 1));
  for (const auto* b : {&r.lacki, &r.linear}) {
    for (const auto& t : b->trials) EXPECT_GE(t.me, t.rms);
  }
}

TEST(Experiment, ReproducibleAcrossThreadCounts) {
  auto s = small_spec(Target::F1, 1, 100, 0.2, 0.4);
  const auto a = run_experiment(s);
  s.threads = 3;
  const auto b = run_experiment(s);
  for (std::size_t r = 0; r < s.n_repeats; ++r) {
    EXPECT_EQ(a.lacki.trials[r].rms, b.lacki.trials[r].rms);
    EXPECT_EQ(a.lacki.trials[r].me, b.lacki.trials[r].me);
    EXPECT_EQ(a.linear.trials[r].rms, b.linear.trials[r].rms);
  }
  EXPECT_EQ(a.lacki.rms.mean, b.lacki.rms.mean);
  EXPECT_EQ(a.lacki.rms.std, b.lacki.rms.std);
}

TEST(Experiment, NoiseAwareSlackBeatsInterpolationOnNoisyF1) {
  const auto robust = run_experiment(small_spec(Target::F1, 1, 257, 0.5, 1));
  const auto naive = run_experiment(small_spec(Target::F1, 1, 257, 0.5, 0));
  EXPECT_LT(robust.lacki.rms.mean, naive.lacki.rms.mean);
}

TEST(Experiment, ZeroSlackBeatsUnitSlackOnCleanF2) {
  const auto clean = run_experiment(small_spec(Target::F2, 2, 500, 0, 0));
  const auto slack = run_experiment(small_spec(Target::F2, 2, 500, 0, 1));
  EXPECT_LT(clean.lacki.rms.mean, slack.lacki.rms.mean);
}

TEST(Experiment, ConstantTargetStaysWithinNoiseBand) {
  auto s = small_spec(Target::Custom, 2, 300, 0.3, 0.6);
  s.custom = [](std::span<const double>) { return 2.0; };
  const auto r = run_experiment(s);
  for (const auto& t : r.lacki.trials) {
    EXPECT_EQ(t.ell, 0.0);
    EXPECT_LE(t.me, 0.6 / 2 + 0.3 + 1e-12);
  }
}

TEST(Experiment, SingleSampleRmsMatchesClosedForm) {
  auto s = small_spec(Target::F1, 3, 1, 0, 0);
  s.n_test = 25000;
  s.n_repeats = 1;
  const auto r = run_experiment(s);
  // The lone observation c; E(f1 - c)^2 = E f1^2 - 2c E f1 + c^2.
  // Recover c from the linear baseline, which also reduces to the constant c.
  std::mt19937_64 rng(s.seed ^ (0x9E3779B97F4A7C15ULL * 1));
  std::uniform_real_distribution<double> unit(0, 1);
  std::vector<double> x0(3);
  for (auto& v : x0) v = unit(rng);
  const double c = f1(x0);
  const double mean = 2 / std::numbers::pi + 0.5;
  const double second = 0.5 + 2 / std::numbers::pi + 1.0 / 3;
  const double expect = std::sqrt(second - 2 * c * mean + c * c);
  EXPECT_NEAR(r.lacki.trials[0].rms, expect, 0.02 * expect + 0.005);
}

TEST(Experiment, ValidatesSpec) {
  auto s = small_spec(Target::F2, 1, 10, 0, 0);
  EXPECT_THROW(run_experiment(s), lacki::ConfigError);
  s = small_spec(Target::Custom, 1, 10, 0, 0);
  EXPECT_THROW(run_experiment(s), lacki::ConfigError);
}

TEST(DimensionSweep, RmsGrowsWithDimension) {
  auto s = small_spec(Target::F1, 1, 500, 0, 0);
  const std::vector<std::size_t> dims{1, 16};
  const auto rows = run_dimension_sweep(s, dims);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_LT(rows[0].result.lacki.rms.mean, rows[1].result.lacki.rms.mean);
}

TEST(Summary, SampleStandardDeviation) {
  const std::vector<double> v{1, 2, 3, 4};
  const auto s = summarize(v);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.std, std::sqrt(5.0 / 3.0));
  EXPECT_EQ(summarize(std::vector<double>{7}).std, 0.0);
}

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "lacki/guarantees.hpp"

namespace g = lacki::guarantees;

namespace {

g::ErrorSystem diagonal_system(double value, double nbar) {
  g::ErrorSystem s;
  s.m = 1;
  s.delta = 1;
  s.k1 = s.k2 = Eigen::MatrixXd::Zero(1, 1);
  s.M = value * Eigen::MatrixXd::Identity(2, 2);
  s.innovation_bound = nbar;
  s.spectral_radius = std::abs(value);
  return s;
}

double inf_norm(const Eigen::VectorXd& v) { return v.lpNorm<Eigen::Infinity>(); }

}  // namespace

TEST(SampleComplexity, ClosedFormValues) {
  auto r = g::sample_complexity(0.5, 0.1, 1, 1);
  EXPECT_EQ(r.k, 2);
  EXPECT_EQ(r.n, 13u);
  r = g::sample_complexity(1, 0.5, 1, 1);
  EXPECT_EQ(r.k, 1);
  EXPECT_EQ(r.n, 2u);
  // High-precision oracle values.
  r = g::sample_complexity(0.1, 0.05, 1, 2);
  EXPECT_EQ(r.k, 5);
  EXPECT_EQ(r.n, 10161u);
  r = g::sample_complexity(0.01, 0.01, 3, 1);
  EXPECT_EQ(r.k, 10);
  EXPECT_EQ(r.n, 11808u);
}

TEST(SampleComplexity, OneSampleWhenToleranceCoversRange) {
  EXPECT_EQ(g::sample_complexity(2, 0.1, 1, 3).n, 1u);
  EXPECT_EQ(g::sample_complexity(5, 0.1, 1, 3).n, 1u);
  EXPECT_EQ(g::sample_complexity(0.1, 0.1, 0, 3).n, 1u);
}

TEST(SampleComplexity, RejectsBadArguments) {
  EXPECT_THROW(g::sample_complexity(0, 0.1, 1, 1), lacki::ConfigError);
  EXPECT_THROW(g::sample_complexity(0.1, 0, 1, 1), lacki::ConfigError);
  EXPECT_THROW(g::sample_complexity(0.1, 1, 1, 1), lacki::ConfigError);
  EXPECT_THROW(g::sample_complexity(0.1, 0.1, 1, 0), lacki::ConfigError);
}

TEST(ErrorSystem, WingRockTransitionMatrix) {
  const auto s = g::assemble_error_system(1, 0.005, 1.0, 1.0, 1.0);
  Eigen::MatrixXd expect(2, 2);
  expect << 1, 0.005, -0.005, 0.995;
  EXPECT_EQ(s.M, expect);
  EXPECT_NEAR(s.spectral_radius, 0.997509398451965, 1e-12);
  EXPECT_NEAR(s.spectral_radius * s.spectral_radius, 0.995025, 1e-12);
}

TEST(ErrorSystem, TinyStepApproachesIdentity) {
  const auto s = g::assemble_error_system(2, 1e-12, 3.0, 4.0, 1.0);
  EXPECT_TRUE(s.M.isApprox(Eigen::MatrixXd::Identity(4, 4), 1e-10));
}

TEST(ErrorSystem, BlockLayoutWithMatrixGains) {
  Eigen::MatrixXd k1(2, 2), k2(2, 2);
  k1 << 1, 2, 3, 4;
  k2 << 5, 6, 7, 8;
  const auto s = g::assemble_error_system(2, 0.1, k1, k2, 0.0);
  EXPECT_TRUE(s.M.topLeftCorner(2, 2).isIdentity());
  EXPECT_TRUE(s.M.topRightCorner(2, 2).isApprox(0.1 * Eigen::MatrixXd::Identity(2, 2)));
  EXPECT_TRUE(s.M.bottomLeftCorner(2, 2).isApprox(-0.1 * k1));
  EXPECT_TRUE(s.M.bottomRightCorner(2, 2).isApprox(Eigen::MatrixXd::Identity(2, 2) - 0.1 * k2));
  EXPECT_THROW(g::assemble_error_system(2, 0.1, Eigen::MatrixXd::Identity(3, 3), k2, 0), lacki::DimensionError);
  EXPECT_THROW(g::assemble_error_system(1, 0, 1.0, 1.0, 0), lacki::ConfigError);
}

TEST(Recurrence, HomogeneousIsMatrixPower) {
  const auto s = g::assemble_error_system(1, 0.1, 2.0, 1.0, 0);
  Eigen::VectorXd e0(2);
  e0 << 1, -2;
  const std::vector<Eigen::VectorXd> f(5, Eigen::VectorXd::Zero(2));
  const auto r = g::simulate_recurrence(s, e0, f);
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(2, 2);
  for (std::size_t n = 0; n <= 5; ++n) {
    EXPECT_TRUE(r.iterated[n].isApprox(p * e0, 1e-14));
    p = p * s.M;
  }
}

TEST(Recurrence, SingleInnovationFromRest) {
  const auto s = g::assemble_error_system(1, 0.1, 2.0, 1.0, 0);
  Eigen::VectorXd f0(2);
  f0 << 3, 4;
  const auto r = g::simulate_recurrence(s, Eigen::VectorXd::Zero(2), {f0});
  EXPECT_TRUE(r.iterated[1].isApprox(0.1 * f0));
  EXPECT_TRUE(r.closed_form[1].isApprox(0.1 * f0));
}

TEST(Recurrence, ClosedFormAgreesOverThousandSteps) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  const auto s = g::assemble_error_system(2, 0.01, 2.0, 3.0, 1);
  ASSERT_LT(s.spectral_radius, 1);
  Eigen::VectorXd e0 = Eigen::VectorXd::NullaryExpr(4, [&] { return u(rng); });
  std::vector<Eigen::VectorXd> f(1000);
  for (auto& v : f) v = Eigen::VectorXd::NullaryExpr(4, [&] { return u(rng); });
  const auto r = g::simulate_recurrence(s, e0, f, 50);
  for (std::size_t n = 0; n <= 1000; n += 50) {
    const double scale = std::max(1.0, r.iterated[n].norm());
    EXPECT_LE((r.iterated[n] - r.closed_form[n]).norm(), 1e-8 * scale);
  }
  EXPECT_THROW(g::simulate_recurrence(s, Eigen::VectorXd::Zero(3), f), lacki::DimensionError);
}

TEST(Variant1, DegenerateCases) {
  const auto s = g::assemble_error_system(1, 0.005, 1.0, 1.0, 0.0);
  EXPECT_DOUBLE_EQ(g::bound_variant_1(s, 2.0, 0), std::sqrt(2.0) * 2.0);
  g::BoundCalculator calc(s);
  EXPECT_DOUBLE_EQ(calc.variant1(1.5, 7), calc.power_norm(7) * 1.5);
}

TEST(Variant1, WingRockAsymptoteMatchesOracle) {
  const auto s = g::assemble_error_system(1, 0.005, 1.0, 1.0, 1.0);
  g::BoundCalculator calc(s);
  EXPECT_NEAR(calc.power_norm(1), 1.414231284236244, 1e-12);
  // Oracle: 2e5 partial-sum terms in numpy.
  EXPECT_NEAR(calc.variant1_asymptote(1.0), 4.031173953662, 1e-8);
  EXPECT_LE(calc.variant1(0, 5000), calc.variant1_asymptote(1.0));
}

TEST(Variant2, DiagonalHalfGivesKZeroTwo) {
  g::BoundCalculator calc(diagonal_system(0.5, 1.0));
  const auto r = calc.variant2(0, 10);
  EXPECT_EQ(r.k0, 2);
  EXPECT_DOUBLE_EQ(r.phi, calc.power_norm(2));
  EXPECT_NEAR(r.phi, std::sqrt(2.0) * 0.25, 1e-15);
}

TEST(Variant2, ZeroInputsGiveZeroBound) {
  const auto s = g::assemble_error_system(1, 0.005, 1.0, 1.0, 0.0);
  g::BoundCalculator calc(s);
  for (std::size_t n : {0u, 1u, 100u, 5000u}) EXPECT_EQ(calc.variant2(0, n).bound, 0.0);
}

TEST(Variant2, WingRockAsymptoteDominatesAdversarialSteadyState) {
  const auto s = g::assemble_error_system(1, 0.005, 1.0, 1.0, 1.0);
  g::BoundCalculator calc(s);
  const auto r = calc.variant2(0, 5000);
  EXPECT_TRUE(std::isfinite(r.asymptote));
  EXPECT_GE(r.c, 1.0);
  std::mt19937_64 rng(4);
  std::bernoulli_distribution coin(0.5);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(2);
  double worst = 0;
  for (int n = 0; n < 20000; ++n) {
    Eigen::VectorXd f(2);
    // Sign-aligned with the state drives the error outward.
    f << (e(0) >= 0 ? 1 : -1), (coin(rng) ? 1 : -1);
    e = s.M * e + s.delta * f;
    worst = std::max(worst, inf_norm(e));
  }
  EXPECT_LE(worst, r.asymptote);
}

TEST(Variant2, RejectsUnstableSystem) {
  g::BoundCalculator calc(diagonal_system(1.5, 1.0));
  EXPECT_THROW(calc.variant2(0, 10), lacki::NumericError);
}

TEST(Variant3, GeometricDecay) {
  // |||M||| = sqrt(2) * 0.5/sqrt(2) = 0.5
  const auto s = diagonal_system(0.5 / std::sqrt(2.0), 0.0);
  EXPECT_NEAR(g::bound_variant_3(s, 1.0, 3), 0.125, 1e-15);
  EXPECT_DOUBLE_EQ(g::bound_variant_3(s, 1.7, 0), 1.7);
}

TEST(Variant3, SingularAtUnitNorm) {
  const auto s = diagonal_system(1 / std::sqrt(2.0), 1.0);
  EXPECT_THROW(g::bound_variant_3(s, 1.0, 3), lacki::NumericError);
}

TEST(Variant3, WingRockGrowsButDominates) {
  const auto s = g::assemble_error_system(1, 0.005, 1.0, 1.0, 1.0);
  std::vector<Eigen::VectorXd> f(200, Eigen::VectorXd::Ones(2));
  Eigen::VectorXd e0(2);
  e0 << 0.5, -0.5;
  const auto r = g::simulate_recurrence(s, e0, f, 0);
  g::BoundCalculator calc(s);
  for (std::size_t n = 0; n <= 200; ++n) EXPECT_LE(inf_norm(r.iterated[n]), calc.variant3(0.5, n) + 1e-12);
  EXPECT_GT(calc.variant3(0.5, 200), calc.variant3(0.5, 100));
}

TEST(ComputeBounds, ReportShapesAndNonnegativity) {
  const auto s = g::assemble_error_system(1, 0.005, 1.0, 1.0, 1.0);
  const auto rep = g::compute_bounds(s, 0.3, 500);
  EXPECT_EQ(rep.variant1.size(), 501u);
  EXPECT_EQ(rep.variant2.size(), 501u);
  EXPECT_EQ(rep.variant3.size(), 501u);
  ASSERT_TRUE(rep.variant2_summary);
  EXPECT_GE(rep.variant2_summary->asymptote, 0);
  for (double v : rep.variant1) EXPECT_TRUE(std::isfinite(v) && v >= 0);
  for (double v : rep.variant2) EXPECT_TRUE(std::isfinite(v) && v >= 0);
}

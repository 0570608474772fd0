#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "lidc/moment_analysis.hpp"

namespace {

using lidc::GridSpec;
using lidc::IntervalPower;
using lidc::LevyModel;
using lidc::NuSpec;

const double kLog2 = std::log(2.0);

LevyModel atom_model() { return LevyModel(0.0, NuSpec::atoms({{-kLog2, 1.0}})); }

TEST(Alpha, ClosedForms) {
  const auto ln = LevyModel::lognormal(0.7);
  for (int d = 1; d <= 3; ++d) EXPECT_NEAR(lidc::alpha_coeff(ln, d, 0), 0.7, 1e-13);
  const auto atom = atom_model();
  EXPECT_NEAR(lidc::alpha_coeff(atom, 1, 0), atom.psi(2.0), 1e-13);
  // d = 2 for a unit atom at x0: e^{x0} (1 - e^{x0})^2.
  EXPECT_NEAR(lidc::alpha_coeff(atom, 2, 0), 0.5 * 0.25, 1e-13);
  const LevyModel mixed(0.3, NuSpec::atoms({{-0.4, 1.5}, {0.2, 0.5}}));
  for (int d = 1; d <= 3; ++d)
    EXPECT_NEAR(lidc::alpha_coeff(mixed, d, 0), lidc::alpha_coeff_integral(mixed, d, 0), 1e-10) << d;
  EXPECT_NEAR(lidc::second_moment_closed_form(atom.psi(2.0)), 1.52380952380952, 1e-12);
}

TEST(ExactMoment, LognormalSelbergValues) {
  EXPECT_NEAR(lidc::exact_moment(LevyModel::lognormal(0.5), 2), 8.0 / 3.0, 1e-9);
  EXPECT_NEAR(lidc::exact_moment(LevyModel::lognormal(0.3), 2), 1.680672268907563, 1e-9);
  EXPECT_NEAR(lidc::exact_moment(LevyModel::lognormal(0.3), 3), 4.9325660614909578, 1e-8);
  EXPECT_NEAR(lidc::exact_moment(LevyModel::lognormal(0.5), 3), 25.132741228718346, 1e-7);
  EXPECT_NEAR(lidc::exact_moment(LevyModel::lognormal(0.2), 4), 7.5340519755169326, 1e-7);
}

TEST(ExactMoment, AtomModelBetaValues) {
  EXPECT_NEAR(lidc::exact_moment(atom_model(), 2), 1.52380952380952, 1e-10);
  EXPECT_NEAR(lidc::exact_moment(atom_model(), 3), 3.1132040627836169, 1e-8);
  EXPECT_NEAR(lidc::exact_moment(atom_model(), 4), 7.86006784694627, 1e-7);
}

TEST(ExactMoment, TrivialDegrees) {
  EXPECT_DOUBLE_EQ(lidc::exact_moment(atom_model(), 0), 1.0);
  EXPECT_NEAR(lidc::exact_moment(atom_model(), 1), 1.0, 1e-14);
  EXPECT_NEAR(lidc::exact_joint_moment(atom_model(), {{{0.0, 0.25}, 1}}), 0.25, 1e-14);
}

TEST(ExactMoment, NeighbourProductAtUnitAlpha) {
  // alpha = 1 gives 1/(t - s) over [0,1/2] x [1/2,1]: the integral is log 2.
  const double v = lidc::exact_joint_moment(LevyModel::lognormal(1.0), {{{0.0, 0.5}, 1}, {{0.5, 1.0}, 1}});
  EXPECT_NEAR(v, kLog2, 1e-7);
}

TEST(ExactMoment, OrderOfPartsIrrelevant) {
  const auto m = atom_model();
  const double a = lidc::exact_joint_moment(m, {{{0.0, 0.5}, 2}, {{0.5, 1.0}, 1}});
  const double b = lidc::exact_joint_moment(m, {{{0.5, 1.0}, 1}, {{0.0, 0.5}, 2}});
  EXPECT_NEAR(a, b, 1e-10 * a);
  // Reflection symmetry of the measure.
  const double c = lidc::exact_joint_moment(m, {{{0.0, 0.5}, 1}, {{0.5, 1.0}, 2}});
  EXPECT_NEAR(a, c, 1e-8 * a);
}

TEST(ExactMoment, DivergentMomentThrows) {
  // sigma2 = 1: E Z^2 needs alpha < 1.
  EXPECT_THROW(lidc::exact_moment(LevyModel::lognormal(1.0), 2), lidc::DomainError);
  EXPECT_THROW(lidc::exact_moment(LevyModel::lognormal(0.5), -1), lidc::InvalidArgument);
}

TEST(Estimators, MomentAtZeroAndConstants) {
  const std::vector<double> z(64, 2.0);
  const auto e0 = lidc::estimate_moment(z, 0.0);
  EXPECT_EQ(e0.mean, 1.0);
  EXPECT_EQ(e0.mean_stderr, 0.0);
  const auto e2 = lidc::estimate_moment(z, 2.0);
  EXPECT_DOUBLE_EQ(e2.mean, 4.0);
  EXPECT_DOUBLE_EQ(e2.median_of_means, 4.0);
}

TEST(Tail, ParetoVersusExponential) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> pareto(50000), expo(50000);
  for (auto& v : pareto) v = std::pow(1.0 - unit(gen), -0.5);
  for (auto& v : expo) v = -std::log(1.0 - unit(gen));
  const auto p = lidc::tail_fit(pareto);
  EXPECT_NEAR(p.zeta_hat, 2.0, 0.2);
  EXPECT_TRUE(p.stable_tail);
  ASSERT_TRUE(p.d_hat.has_value());
  EXPECT_NEAR(*p.d_hat, 1.0, 0.1);
  EXPECT_FALSE(lidc::tail_fit(expo).stable_tail);
  EXPECT_THROW(lidc::tail_fit(std::vector<double>(10, 1.0)), lidc::InvalidArgument);
}

TEST(Probes, NegativeMoment) {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> unit(0.5, 1.5);
  std::vector<double> z(20000);
  for (auto& v : z) v = unit(gen);
  const auto r = lidc::negative_moment_probe(z, -1.0);
  EXPECT_NEAR(r.estimate, std::log(3.0), 0.02);
  EXPECT_TRUE(r.stable);
  EXPECT_EQ(r.running.size(), 4u);
  EXPECT_THROW(lidc::negative_moment_probe(z, 1.0), lidc::InvalidArgument);
}

TEST(Probes, GrowthNeedsAllMomentsFinite) {
  EXPECT_THROW(lidc::growth_constant_probe(LevyModel::lognormal(0.1), 3, {}), lidc::InvalidArgument);
  const auto r = lidc::growth_constant_probe(atom_model(), 3, {});
  ASSERT_EQ(r.n.size(), 2u);
  EXPECT_NEAR(std::exp(r.log_moment[0]), 1.52380952380952, 1e-10);
  EXPECT_TRUE(r.exact[1]);
}

TEST(Scaling, FirstMomentIsLinear) {
  lidc::SimulationSpec spec;
  spec.grid = GridSpec::make({0, 1}, 5, 2);
  spec.replicas = 400;
  const auto r = lidc::scaling_fit(atom_model(), {1.0, 2.0}, {0, 1, 2, 3}, spec);
  ASSERT_EQ(r.q.size(), 2u);
  EXPECT_NEAR(r.slope[0], 1.0, 0.05);
  EXPECT_NEAR(r.theory[0], 1.0, 1e-12);
  EXPECT_NEAR(r.theory[1], 1.0 - atom_model().phi(2.0), 1e-12);
}

TEST(Scaling, ExactScalingTestSeparatesModels) {
  lidc::SimulationSpec spec;
  spec.grid = GridSpec::make({0, 1}, 5, 2);
  spec.replicas = 2000;
  const auto same = lidc::exact_scaling_test(LevyModel::lognormal(0.5), 1, spec);
  EXPECT_GT(same.p_value, 1e-3);
  const auto other = lidc::exact_scaling_test(LevyModel::lognormal(0.5), 1, spec, LevyModel::lognormal(2.0));
  EXPECT_LT(other.p_value, 1e-3);
}

TEST(Covariance, TheoryDecaysLikeInverseSquareLag) {
  const auto m = LevyModel::lognormal(0.3);
  const double c1 = lidc::juxtaposed_covariance_theory(m, 1);
  const double c8 = lidc::juxtaposed_covariance_theory(m, 8);
  const double c16 = lidc::juxtaposed_covariance_theory(m, 16);
  EXPECT_GT(c1, c8);
  // Far apart the cones share only their tops: cov ~ psi(2) / (4 n^2).
  EXPECT_NEAR(c16 * 256.0, m.psi(2.0) / 4.0, 0.05 * m.psi(2.0) / 4.0);
  EXPECT_GT(c16 * 256.0, c8 * 64.0);
}

TEST(Json, ReportsSerialize) {
  const std::vector<double> z(64, 1.0);
  const auto j = lidc::to_json(lidc::moment_report(atom_model(), z, {1.0, 2.0}));
  EXPECT_TRUE(j.contains("samples"));
}

}  // namespace

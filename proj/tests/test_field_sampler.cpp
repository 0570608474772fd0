#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "lidc/field_sampler.hpp"

namespace {

using lidc::ConeRegion;
using lidc::GridSpec;
using lidc::Interval;
using lidc::JumpPoint;
using lidc::LevyModel;
using lidc::NuSpec;
using lidc::SamplerKind;
using lidc::SamplerOptions;
using lidc::StreamId;

const double kLog2 = std::log(2.0);

struct Moments {
  double n = 0, sum = 0, sum2 = 0;
  void add(double v) {
    n += 1;
    sum += v;
    sum2 += v * v;
  }
  double mean() const { return sum / n; }
  double var() const { return (sum2 - sum * sum / n) / (n - 1); }
  double stderr_mean() const { return std::sqrt(var() / n); }
};

std::vector<JumpPoint> random_points(const Interval& base, double eps, std::mt19937_64& gen, int n) {
  const auto d = lidc::sampling_domain(base, eps);
  const lidc::JumpLaw law(NuSpec::atoms({{-0.3, 1.0}, {0.2, 0.5}}), 0.0);
  std::vector<JumpPoint> pts;
  for (int i = 0; i < n; ++i) {
    JumpPoint p = lidc::draw_location(d, gen);
    p.jump = law.sample(gen);
    pts.push_back(p);
  }
  return pts;
}

TEST(DrawLocation, StaysInsideSamplingDomain) {
  std::mt19937_64 gen(1);
  const Interval base{0.5, 2.0};
  const auto d = lidc::sampling_domain(base, 0.1);
  for (int i = 0; i < 20000; ++i) {
    const auto p = lidc::draw_location(d, gen);
    ASSERT_TRUE(d.contains_shadow(p.l, p.y)) << p.l << " " << p.y;
  }
}

TEST(DrawLocation, BandRespectsTop) {
  std::mt19937_64 gen(2);
  const auto d = lidc::sampling_band({0, 1}, 0.05, 0.2);
  for (int i = 0; i < 5000; ++i) {
    const auto p = lidc::draw_location(d, gen);
    ASSERT_GE(p.y, 0.05);
    ASSERT_LE(p.y, 0.2);
  }
}

TEST(Scatter, MatchesBruteForceMembership) {
  std::mt19937_64 gen(3);
  const GridSpec g = GridSpec::make({-1.0, 2.0}, 4, 3);
  const auto pts = random_points(g.base, g.eps(), gen, 3000);
  std::vector<double> got(g.points(), 0.0);
  lidc::scatter_jumps(pts, lidc::point_lattice(g, g.points()), got);
  for (std::size_t k = 0; k < g.points(); ++k) {
    const auto region = ConeRegion::trunc_cone(g.base, g.point(k), g.eps());
    double want = 0.0;
    for (const auto& p : pts)
      if (region.contains(p.l + 0.5 * p.y, p.y)) want += p.jump;
    EXPECT_NEAR(got[k], want, 1e-9) << "point " << k;
  }
  for (int j = 1; j <= g.level; ++j) {
    std::vector<double> cells(g.cell_count(j), 0.0);
    lidc::scatter_jumps(pts, lidc::cell_lattice(g, j), cells);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto region = ConeRegion::cone_of_interval(g.base, g.cell(j, i));
      double want = 0.0;
      for (const auto& p : pts)
        if (region.contains(p.l + 0.5 * p.y, p.y)) want += p.jump;
      EXPECT_NEAR(cells[i], want, 1e-9) << "level " << j << " cell " << i;
    }
  }
}

TEST(Scatter, SubCascadeMatchesBruteForce) {
  std::mt19937_64 gen(4);
  const GridSpec g = GridSpec::make({0.0, 1.0}, 3, 2);
  const auto pts = random_points(g.base, g.eps(), gen, 2000);
  for (int k = 1; k <= g.level; ++k) {
    const std::size_t per = g.points() >> k;
    std::vector<double> got(g.points(), 0.0);
    lidc::scatter_jumps(pts, lidc::point_lattice(g, per), got);
    for (std::size_t e = 0; e < g.points(); ++e) {
      const auto region = ConeRegion::trunc_cone(g.cell(k, e / per), g.point(e), g.eps());
      double want = 0.0;
      for (const auto& p : pts)
        if (region.contains(p.l + 0.5 * p.y, p.y)) want += p.jump;
      EXPECT_NEAR(got[e], want, 1e-9);
    }
  }
}

TEST(JumpLaw, DriftAndMass) {
  const NuSpec nu = NuSpec::atoms({{-kLog2, 1.0}, {0.05, 2.0}});
  const lidc::JumpLaw all(nu, 0.0);
  EXPECT_DOUBLE_EQ(all.mass(), 3.0);
  EXPECT_NEAR(all.drift(), 0.5 - 2.0 * std::expm1(0.05), 1e-14);
  const lidc::JumpLaw big(nu, 0.1);
  EXPECT_DOUBLE_EQ(big.mass(), 1.0);
  EXPECT_NEAR(big.drift(), 0.5, 1e-14);
  EXPECT_NEAR(big.small_variance(), 2.0 * 0.05 * 0.05, 1e-15);
}

TEST(PoissonField, CountMeanMatchesMeasure) {
  const LevyModel model(0.0, NuSpec::atoms({{-kLog2, 1.0}}));
  const GridSpec g = GridSpec::make({0, 1}, 3, 1);
  const double expected = 1.0 * (std::log(8.0) + 8.0 + 1.0);
  Moments m;
  for (std::uint64_t r = 0; r < 4000; ++r) {
    const auto f = lidc::sample_field(model, g, lidc::make_stream(7, r, "field"));
    m.add(static_cast<double>(f.jumps.size()));
  }
  EXPECT_NEAR(m.mean(), expected, 4.0 * std::sqrt(expected / m.n));
}

TEST(PoissonField, SubCascadePlusCellIsPointValue) {
  const LevyModel model(0.0, NuSpec::atoms({{-0.4, 2.0}, {0.3, 0.5}}));
  const GridSpec g = GridSpec::make({0, 1}, 4, 2);
  for (std::uint64_t r = 0; r < 20; ++r) {
    const auto f = lidc::sample_field(model, g, lidc::make_stream(11, r, "field"));
    ASSERT_EQ(f.kind, SamplerKind::poisson);
    for (int k = 0; k <= g.level; ++k) {
      const auto sub = f.sub_cascade_values(k);
      const std::size_t per = g.points() >> k;
      for (std::size_t e = 0; e < g.points(); ++e)
        ASSERT_NEAR(sub[e] + f.cell_values[k][e / per], f.point_values[e], 1e-10);
    }
  }
}

TEST(GaussianField, JointSubCascadePlusCellIsPointValue) {
  const auto model = LevyModel::lognormal(0.7);
  const GridSpec g = GridSpec::make({0, 1}, 3, 2);
  const auto f = lidc::sample_field(model, g, lidc::make_stream(1, 0, "field"));
  ASSERT_EQ(f.cell_levels, 3);
  for (int k = 0; k <= g.level; ++k) {
    const auto sub = f.sub_cascade_values(k);
    for (std::size_t e = 0; e < g.points(); ++e)
      ASSERT_NEAR(sub[e] + f.cell_values[k][e / (g.points() >> k)], f.point_values[e], 1e-12);
  }
}

void check_gaussian_moments(lidc::GaussianMethod method) {
  const double s2 = 0.6;
  const auto model = LevyModel::lognormal(s2);
  const GridSpec g = GridSpec::make({0, 1}, 3, 2);
  SamplerOptions opt;
  opt.gaussian_method = method;
  if (method == lidc::GaussianMethod::circulant) opt.cell_levels = 0;
  const std::size_t a = 0, b = 5;
  Moments ma, mexp;
  double cross = 0;
  std::vector<double> xa, xb;
  const int reps = 20000;
  for (int r = 0; r < reps; ++r) {
    const auto f = lidc::sample_field(model, g, lidc::make_stream(5, r, "gauss"), opt);
    ma.add(f.point_values[a]);
    mexp.add(std::exp(f.point_values[b]));
    xa.push_back(f.point_values[a]);
    xb.push_back(f.point_values[b]);
  }
  const double area = std::log(1.0 / g.eps()) + 1.0;
  EXPECT_NEAR(ma.mean(), -0.5 * s2 * area, 4.0 * ma.stderr_mean());
  EXPECT_NEAR(ma.var(), s2 * area, 4.0 * s2 * area * std::sqrt(2.0 / reps));
  EXPECT_NEAR(mexp.mean(), 1.0, 4.0 * mexp.stderr_mean());
  const double mean_b = -0.5 * s2 * area;
  for (int r = 0; r < reps; ++r) cross += (xa[r] - ma.mean()) * (xb[r] - mean_b);
  cross /= reps - 1;
  const double want = s2 * lidc::pair_area(1.0, std::abs(g.point(b) - g.point(a)), g.eps());
  EXPECT_NEAR(cross, want, 4.0 * s2 * area / std::sqrt(reps));
}

TEST(GaussianField, JointMoments) { check_gaussian_moments(lidc::GaussianMethod::joint); }
TEST(GaussianField, CirculantMoments) { check_gaussian_moments(lidc::GaussianMethod::circulant); }

TEST(GaussianField, CellVarianceIsLevelArea) {
  const double s2 = 0.5;
  const auto model = LevyModel::lognormal(s2);
  const GridSpec g = GridSpec::make({0, 1}, 2, 1);
  Moments m;
  for (int r = 0; r < 20000; ++r) m.add(lidc::sample_field(model, g, lidc::make_stream(9, r, "cell")).cell_values[2][1]);
  EXPECT_NEAR(m.var(), s2 * 2.0 * kLog2, 4.0 * s2 * 2.0 * kLog2 * std::sqrt(2.0 / m.n));
}

TEST(HybridField, ExponentialMeanIsOne) {
  const LevyModel model(0.2, NuSpec::atoms({{-0.5, 1.0}, {0.02, 3.0}}));
  const GridSpec g = GridSpec::make({0, 1}, 3, 1);
  for (auto mode : {lidc::SmallJumpMode::drift, lidc::SmallJumpMode::gaussian}) {
    SamplerOptions opt;
    opt.small_jumps = mode;
    Moments m;
    for (int r = 0; r < 20000; ++r) {
      const auto f = lidc::sample_hybrid_field(g, model, lidc::make_stream(3, r, "hyb"), 0.1, opt);
      m.add(std::exp(f.point_values[3]));
    }
    EXPECT_NEAR(m.mean(), 1.0, 4.0 * m.stderr_mean());
  }
}

TEST(HybridField, GaussianSmallJumpsAddVariance) {
  const LevyModel model(0.2, NuSpec::atoms({{-0.5, 1.0}, {0.05, 4.0}}));
  const GridSpec g = GridSpec::make({0, 1}, 2, 1);
  SamplerOptions opt;
  opt.small_jumps = lidc::SmallJumpMode::gaussian;
  const auto f = lidc::sample_hybrid_field(g, model, lidc::make_stream(1, 0, "hyb"), 0.1, opt);
  EXPECT_NEAR(f.gaussian_variance, 0.2 + 4.0 * 0.0025, 1e-15);
}

TEST(HybridField, NoRetainedJumps) {
  const LevyModel model(0.3, NuSpec::atoms({{0.05, 1.0}}));
  const GridSpec g = GridSpec::make({0, 1}, 2, 2);
  const auto f = lidc::sample_hybrid_field(g, model, lidc::make_stream(1, 0, "hyb"), 0.5);
  EXPECT_TRUE(f.jumps.empty());
  EXPECT_EQ(f.jump_drift, 0.0);
  EXPECT_EQ(f.point_values, f.gaussian_points);
}

TEST(HybridField, ZeroCutoffKeepsEveryJump) {
  const LevyModel model(0.3, NuSpec::atoms({{-0.5, 2.0}}));
  const auto f = lidc::sample_hybrid_field(GridSpec::make({0, 1}, 3, 2), model, lidc::make_stream(1, 0, "hyb"), 0.0);
  ASSERT_TRUE(f.law);
  EXPECT_NEAR(f.law->mass(), 2.0, 1e-14);
  EXPECT_EQ(f.law->small_variance(), 0.0);
  EXPECT_EQ(f.gaussian_variance, 0.3);
}

TEST(Field, DeterministicPerStream) {
  const LevyModel model(0.3, NuSpec::atoms({{-0.5, 1.0}}));
  const GridSpec g = GridSpec::make({0, 1}, 3, 2);
  SamplerOptions opt;
  opt.small_jump_cutoff = 0.5;
  const auto a = lidc::sample_field(model, g, lidc::make_stream(42, 3, "f"), opt);
  const auto b = lidc::sample_field(model, g, lidc::make_stream(42, 3, "f"), opt);
  const auto c = lidc::sample_field(model, g, lidc::make_stream(42, 4, "f"), opt);
  EXPECT_EQ(a.point_values, b.point_values);
  EXPECT_EQ(a.cell_values, b.cell_values);
  EXPECT_NE(a.point_values, c.point_values);
}

TEST(Field, RejectsBadOptions) {
  const GridSpec g = GridSpec::make({0, 1}, 2, 1);
  EXPECT_THROW(lidc::sample_poisson_field(g, LevyModel::lognormal(1.0), lidc::make_stream(1, 0, "x")),
               lidc::InvalidArgument);
  EXPECT_THROW(lidc::sample_gaussian_field(g, LevyModel(0.0, NuSpec::atoms({{-1.0, 1.0}})), lidc::make_stream(1, 0, "x")),
               lidc::InvalidArgument);
  EXPECT_THROW(lidc::sample_hybrid_field(g, LevyModel(0.1, NuSpec::atoms({{-1.0, 1.0}})), lidc::make_stream(1, 0, "x"), 1.5),
               lidc::InvalidArgument);
  SamplerOptions opt;
  opt.gaussian_method = lidc::GaussianMethod::circulant;
  opt.cell_levels = 1;
  EXPECT_THROW(lidc::sample_field(LevyModel::lognormal(1.0), g, lidc::make_stream(1, 0, "x"), opt), lidc::InvalidArgument);
  EXPECT_THROW(GridSpec::make({0, 1}, 0, 1), lidc::InvalidArgument);
}

TEST(GaussianRegionSampler, ConditionalReproducesJointCovariance) {
  const Interval base{0, 1};
  const double eps = 0.125;
  std::vector<lidc::CoverExpansion> regions{ConeRegion::trunc_cone(base, 0.3, eps).expansion(),
                                            ConeRegion::trunc_cone(base, 0.45, eps).expansion()};
  const lidc::GaussianRegionSampler joint(regions);
  const lidc::GaussianRegionSampler cond(regions, 1);
  std::mt19937_64 gen(17);
  const double v = 0.8;
  Moments m2;
  double cross = 0;
  const int reps = 40000;
  std::vector<double> x1s, x2s;
  for (int r = 0; r < reps; ++r) {
    const Eigen::VectorXd x = joint.sample(v, gen);
    const Eigen::VectorXd y = cond.sample_conditional(x.head(1), v, gen);
    x1s.push_back(x(0));
    x2s.push_back(y(0));
    m2.add(y(0));
  }
  const double mean1 = -0.5 * v * joint.areas()(0);
  for (int r = 0; r < reps; ++r) cross += (x1s[r] - mean1) * (x2s[r] - m2.mean());
  cross /= reps - 1;
  EXPECT_NEAR(m2.mean(), -0.5 * v * joint.areas()(1), 4.0 * m2.stderr_mean());
  EXPECT_NEAR(m2.var(), v * joint.areas()(1), 4.0 * v * joint.areas()(1) * std::sqrt(2.0 / reps));
  const double want = v * lidc::pair_area(1.0, 0.15, eps);
  EXPECT_NEAR(cross, want, 4.0 * v * joint.areas()(1) / std::sqrt(reps));
}

TEST(PointProcessDump, TriplesOfDoubles) {
  std::vector<JumpPoint> pts{{0.25, 0.5, -0.3}, {1.0, 2.0, 0.1}};
  std::ostringstream os;
  lidc::write_point_process(os, pts);
  const std::string s = os.str();
  ASSERT_EQ(s.size(), 48u);
  double x;
  std::memcpy(&x, s.data(), 8);
  EXPECT_EQ(x, 0.5);
  std::memcpy(&x, s.data() + 32, 8);
  EXPECT_EQ(x, 2.0);
}

}  // namespace

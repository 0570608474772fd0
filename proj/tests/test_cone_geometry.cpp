#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lidc/cone_geometry.hpp"

namespace {

using lidc::ConeRegion;
using lidc::Interval;

const double kLog2 = std::log(2.0);

TEST(ConeOfInterval, ClosedForm) {
  EXPECT_EQ(lidc::area_cone_of_interval({0, 1}, {0, 0.5}), kLog2);
  EXPECT_EQ(lidc::area_cone_of_interval({0, 1}, {0, 1}), 0.0);
  EXPECT_DOUBLE_EQ(lidc::area_cone_of_interval({0, 1}, {0.25, 0.5}), std::log(4.0));
  EXPECT_THROW(lidc::area_cone_of_interval({0, 1}, {0.5, 1.5}), lidc::InvalidArgument);
}

TEST(TruncProfile, ClosedForm) {
  EXPECT_DOUBLE_EQ(lidc::area_trunc_profile({0, 1}, 0.3, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(lidc::area_trunc_profile({0, 1}, 0.7, 0.5), kLog2 + 1.0);
  EXPECT_DOUBLE_EQ(lidc::area_trunc_profile({0, 2}, 1.2, 1.0), kLog2 + 1.0);
  EXPECT_THROW(lidc::area_trunc_profile({0, 1}, 0.5, 0.0), lidc::InvalidArgument);
}

TEST(PairIntersection, ClosedForm) {
  EXPECT_DOUBLE_EQ(lidc::area_pair_intersection({0, 1}, 0.25, 0.75, 0.5), kLog2);
  EXPECT_DOUBLE_EQ(lidc::area_pair_intersection({0, 1}, 0.4, 0.4, 0.1), std::log(10.0) + 1.0);
  EXPECT_DOUBLE_EQ(lidc::area_pair_intersection({0, 1}, 0.5, 0.75, 0.5), kLog2 + 0.5);
}

TEST(PairIntersection, MonotoneAndContinuousAtEps) {
  const double eps = 0.1;
  double prev = lidc::pair_area(1.0, 0.0, eps);
  for (double tau = 0.001; tau < 1.0; tau += 0.001) {
    const double v = lidc::pair_area(1.0, tau, eps);
    EXPECT_LE(v, prev + 1e-15);
    prev = v;
  }
  EXPECT_NEAR(lidc::pair_area(1.0, eps * (1 - 1e-12), eps), lidc::pair_area(1.0, eps, eps), 1e-10);
}

TEST(Oracle, NamedExamples) {
  EXPECT_NEAR(lidc::numeric_area_oracle(ConeRegion::cone_of_interval({0, 1}, {0, 0.5})), kLog2, 1e-10);
  EXPECT_EQ(lidc::numeric_area_oracle(ConeRegion::empty()), 0.0);
  EXPECT_NEAR(lidc::numeric_area_oracle(ConeRegion::trunc_cone({0, 1}, 0.3, 0.5)), kLog2 + 1.0, 1e-10);
  EXPECT_NEAR(lidc::numeric_area_oracle(ConeRegion::trunc_cone({0, 1}, 0.3, 1.0)), 1.0, 1e-10);
  EXPECT_NEAR(lidc::numeric_area_oracle(ConeRegion::pair_intersection({0, 1}, 0.5, 0.75, 0.5)), kLog2 + 0.5, 1e-10);
}

TEST(CrossIntersection, MatchesOracle) {
  const auto r = ConeRegion::cross_intersection({0, 1}, {2, 3}, 0.5, 2.5, 0.01);
  const double closed = lidc::area_cross_intersection({0, 1}, {2, 3}, 0.5, 2.5, 0.01);
  EXPECT_NEAR(closed, lidc::numeric_area_oracle(r), 1e-8);
  EXPECT_GT(closed, 0.0);
}

TEST(CrossIntersection, VanishesFarApart) {
  double prev = lidc::area_cross_intersection({0, 1}, {1, 2}, 0.5, 1.5, 0.01);
  for (double n : {2.0, 8.0, 64.0, 1024.0}) {
    const double v = lidc::area_cross_intersection({0, 1}, {n, n + 1}, 0.5, n + 0.5, 0.01);
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_LT(prev, 1e-5);
}

TEST(CrossIntersection, ReflectionSymmetry) {
  // Reflect about the midpoint 1.5 of [0,1] u gap u [2,3].
  const double a = lidc::area_cross_intersection({0, 1}, {2, 3}, 0.2, 2.9, 0.05);
  const double b = lidc::area_cross_intersection({0, 1}, {2, 3}, 0.1, 2.8, 0.05);
  EXPECT_NEAR(a, b, 1e-13);
}

TEST(CrossIntersection, RejectsOverlap) {
  EXPECT_THROW(lidc::area_cross_intersection({0, 1}, {0.5, 1.5}, 0.2, 1.2, 0.01), lidc::InvalidArgument);
}

TEST(Regions, RandomizedClosedFormsAgreeWithOracle) {
  std::mt19937_64 gen(31337);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double a = 4 * u(gen) - 2;
    const double len = 0.1 + 3 * u(gen);
    const Interval big{a, a + len};
    const double eps = len * std::pow(2.0, -8 * u(gen)) * (u(gen) < 0.1 ? 3.0 : 1.0);
    double closed = 0.0;
    ConeRegion region;
    switch (i % 4) {
      case 0: {
        const double lo = a + len * u(gen) * 0.9;
        const double hi = lo + (a + len - lo) * (0.05 + 0.95 * u(gen));
        region = ConeRegion::cone_of_interval(big, {lo, hi});
        closed = lidc::area_cone_of_interval(big, {lo, hi});
        break;
      }
      case 1: {
        const double t = a + len * u(gen);
        region = ConeRegion::trunc_cone(big, t, eps);
        closed = lidc::area_trunc_profile(big, t, eps);
        break;
      }
      case 2: {
        const double s = a + len * u(gen);
        const double t = a + len * u(gen);
        region = ConeRegion::pair_intersection(big, s, t, eps);
        closed = lidc::area_pair_intersection(big, s, t, eps);
        break;
      }
      default: {
        const Interval right{big.hi + 2 * u(gen), big.hi + 2 * u(gen) + 0.1 + 2 * u(gen)};
        const Interval r2{right.lo, std::max(right.hi, right.lo + 0.1)};
        const double s = a + len * u(gen);
        const double t = r2.lo + r2.length() * u(gen);
        region = ConeRegion::cross_intersection(big, r2, s, t, eps);
        closed = lidc::area_cross_intersection(big, r2, s, t, eps);
      }
    }
    double oracle = 0.0;
    try {
      oracle = lidc::numeric_area_oracle(region, 1e-9);
    } catch (const lidc::QuadratureError& e) {
      ADD_FAILURE() << e.what() << " " << e.error() << " " << region.to_json().dump();
      continue;
    }
    EXPECT_NEAR(closed, oracle, 1e-8) << region.to_json().dump();
    EXPECT_NEAR(closed, region.area(), 1e-12);
  }
}

TEST(Regions, DilationAndTranslationInvariance) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> c(0.1, 10.0);
  for (int i = 0; i < 50; ++i) {
    const double k = c(gen);
    const double shift = c(gen) - 5;
    const double base = lidc::area_cross_intersection({0, 1}, {1.5, 2.5}, 0.7, 1.6, 0.02);
    const double scaled = lidc::area_cross_intersection({shift, shift + k}, {shift + 1.5 * k, shift + 2.5 * k},
                                                        shift + 0.7 * k, shift + 1.6 * k, 0.02 * k);
    EXPECT_NEAR(base, scaled, 1e-10);
    EXPECT_NEAR(lidc::area_trunc_profile({shift, shift + k}, shift + 0.3 * k, 0.01 * k),
                lidc::area_trunc_profile({0, 1}, 0.3, 0.01), 1e-12);
  }
}

TEST(Regions, DyadicAdditivity) {
  const Interval big{0, 1};
  const double eps = 1.0 / 64;
  for (int level = 1; level <= 5; ++level) {
    const double w = std::ldexp(1.0, -level);
    const double t = 0.3;
    const double lo = std::floor(t / w) * w;
    const Interval cell{lo, lo + w};
    const double lhs = lidc::area_trunc_profile(big, t, eps);
    const double rhs = lidc::area_cone_of_interval(big, cell) + lidc::area_trunc_profile(cell, t, eps);
    EXPECT_NEAR(lhs, rhs, 1e-13);
    // The two pieces are disjoint.
    const auto overlap = ConeRegion::cone_of_interval(big, cell) & ConeRegion::trunc_cone(cell, t, eps);
    EXPECT_NEAR(overlap.area(), 0.0, 1e-13);
  }
}

TEST(Regions, CompositeAlgebra) {
  const auto a = ConeRegion::trunc_cone({0, 1}, 0.2, 0.05);
  const auto b = ConeRegion::trunc_cone({0, 1}, 0.6, 0.05);
  const double both = lidc::area_pair_intersection({0, 1}, 0.2, 0.6, 0.05);
  EXPECT_NEAR((a & b).area(), both, 1e-13);
  EXPECT_NEAR((a | b).area(), a.area() + b.area() - both, 1e-12);
  EXPECT_NEAR((a - b).area(), a.area() - both, 1e-12);
  EXPECT_NEAR(lidc::numeric_area_oracle(a | b), (a | b).area(), 1e-8);
  EXPECT_NEAR(lidc::numeric_area_oracle(a.above(0.1) - b), (a.above(0.1) - b).area(), 1e-8);
}

TEST(Membership, HalfOpenConvention) {
  // V(0) = {-y/2 < x <= y/2}.
  const auto r = ConeRegion::trunc_cone({-5, 5}, 0.0, 0.5);
  EXPECT_TRUE(r.contains(0.5, 1.0));
  EXPECT_FALSE(r.contains(-0.5, 1.0));
  EXPECT_FALSE(r.contains(0.0, 0.4));
}

TEST(SamplingDomain, Masses) {
  EXPECT_NEAR(lidc::sampling_domain({0, 1}, 1.0).total_mass, 2.0, 1e-15);
  EXPECT_NEAR(lidc::sampling_domain({0, 1}, 0.5).total_mass, kLog2 + 3.0, 1e-14);
  for (double eps : {0.001, 0.1, 0.7, 2.0}) {
    const auto d = lidc::sampling_domain({0, 1}, eps);
    double sum = 0.0;
    for (const auto& s : d.strips) sum += s.mass;
    EXPECT_NEAR(sum, d.total_mass, 1e-12);
    const double expect = eps <= 1 ? std::log(1 / eps) + 1 / eps + 1 : 2 / eps;
    EXPECT_NEAR(d.total_mass, expect, 1e-12);
  }
}

TEST(SamplingDomain, MatchesUnionOfConesByOracle) {
  // The union over t of V_eps^I(t) has the width function of the strips.
  const Interval base{0, 1};
  const double eps = 0.25;
  const auto d = lidc::sampling_domain(base, eps);
  for (double y : {0.3, 0.6, 0.99, 1.5, 7.0}) {
    double w = 0.0;
    const int n = 40000;
    const double lo = base.lo - y - 1;
    const double span = base.length() + y + 2;
    for (int i = 0; i < n; ++i) {
      const double l = lo + span * (i + 0.5) / n;
      bool any = false;
      for (int k = 0; k <= 200 && !any; ++k) {
        const double t = base.lo + base.length() * k / 200.0;
        any = ConeRegion::trunc_cone(base, t, eps).contains(l + y / 2, y);
      }
      if (any) w += span / n;
      EXPECT_EQ(any, d.contains_shadow(l, y)) << l << " " << y;
    }
    const auto& s = y < 1 ? d.strips[0] : d.strips[1];
    EXPECT_NEAR(w, s.slope * y + s.intercept, 2 * span / n);
  }
}

}  // namespace

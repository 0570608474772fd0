#pragma once

// Invariant checks shared by the verify command and the acceptance suite.

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"
#include "lidc/cascade.hpp"
#include "lidc/cone_geometry.hpp"
#include "lidc/moment_analysis.hpp"

namespace lidc {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      // worst observed statistic
  double threshold = 0.0;  // pass bound on value
  nlohmann::json detail;
};

inline nlohmann::json to_json(const CheckResult& c) {
  return {{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"threshold", c.threshold}, {"detail", c.detail}};
}

/// psi(1) and psi(0) vanish.
inline CheckResult check_normalization(const LevyModel& model, double tol = 1e-12) {
  CheckResult r{"normalization"};
  const double p1 = model.psi(1.0), p0 = model.psi(0.0);
  r.value = std::max(std::abs(p1), std::abs(p0));
  r.threshold = tol;
  r.passed = r.value <= tol;
  r.detail = {{"psi_1", p1}, {"psi_0", p0}};
  return r;
}

/// One random region of each kind in turn, with its closed-form area.
inline std::pair<ConeRegion, double> random_region(Philox4x32& eng, int kind) {
  auto u = [&] { return uniform_open01(eng); };
  const double a = 4 * u() - 2;
  const double len = 0.1 + 3 * u();
  const Interval big{a, a + len};
  const double eps = len * std::pow(2.0, -8 * u()) * (u() < 0.1 ? 3.0 : 1.0);
  switch (kind % 4) {
    case 0: {
      const double lo = a + len * u() * 0.9;
      const double hi = lo + (a + len - lo) * (0.05 + 0.95 * u());
      return {ConeRegion::cone_of_interval(big, {lo, hi}), area_cone_of_interval(big, {lo, hi})};
    }
    case 1: {
      const double t = a + len * u();
      return {ConeRegion::trunc_cone(big, t, eps), area_trunc_profile(big, t, eps)};
    }
    case 2: {
      const double s = a + len * u(), t = a + len * u();
      return {ConeRegion::pair_intersection(big, s, t, eps), area_pair_intersection(big, s, t, eps)};
    }
    default: {
      const double lo = big.hi + 2 * u();
      const Interval right{lo, lo + 0.1 + 2 * u()};
      const double s = a + len * u(), t = right.lo + right.length() * u();
      return {ConeRegion::cross_intersection(big, right, s, t, eps), area_cross_intersection(big, right, s, t, eps)};
    }
  }
}

/// Closed-form areas of random regions against the quadrature oracle, plus the log 2 anchor.
inline CheckResult check_areas(int regions, double tol, std::uint64_t seed) {
  CheckResult r{"areas"};
  r.threshold = tol;
  Philox4x32 eng = make_stream(seed, 0, "verify:areas").engine();
  double worst = 0.0;
  int failures = 0;
  for (int i = 0; i < regions; ++i) {
    const auto [region, closed] = random_region(eng, i);
    double diff;
    try {
      diff = std::abs(closed - numeric_area_oracle(region, 1e-10));
    } catch (const QuadratureError&) {
      diff = std::numeric_limits<double>::infinity();
    }
    worst = std::max(worst, diff);
    failures += !(diff < tol);
  }
  const double anchor = area_cone_of_interval({0.0, 1.0}, {0.0, 0.5});
  const double anchor_diff = std::abs(anchor - std::log(2.0));
  worst = std::max(worst, anchor_diff);
  failures += !(anchor_diff < tol);
  r.value = worst;
  r.passed = failures == 0;
  r.detail = {{"regions", regions}, {"failures", failures}, {"log2_anchor", anchor}};
  return r;
}

/// Z - 2^-k sum W_i Z_i on every replica, relative to Z.
inline CheckResult check_star(const LevyModel& model, const SimulationSpec& spec, const std::vector<int>& levels,
                              double tol) {
  CheckResult r{"star"};
  r.threshold = tol;
  std::vector<double> worst(spec.replicas, 0.0);
  for_each_realization(model, spec, [&](std::size_t i, const Realization& real) {
    for (int k : levels) worst[i] = std::max(worst[i], std::abs(decompose_star(real, k).residual));
  });
  r.value = worst.empty() ? 0.0 : *std::max_element(worst.begin(), worst.end());
  r.passed = r.value <= tol;
  r.detail = {{"replicas", spec.replicas}, {"levels", levels}};
  return r;
}

/// KS test of mu([0, 2^-k]) against 2^-k e^Omega Z' for each level; value is the smallest p.
inline CheckResult check_scaling(const LevyModel& model, const SimulationSpec& spec, const std::vector<int>& levels,
                                 double alpha) {
  CheckResult r{"scaling"};
  r.threshold = alpha;
  r.value = 1.0;
  r.detail = nlohmann::json::array();
  for (int k : levels) {
    const auto t = exact_scaling_test(model, k, spec);
    r.value = std::min(r.value, t.p_value);
    r.detail.push_back({{"level", k}, {"p_value", t.p_value}, {"statistic", t.statistic}});
  }
  r.passed = levels.empty() || r.value > alpha;
  return r;
}

}  // namespace lidc

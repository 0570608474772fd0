#pragma once

// Moments of the cascade: exact integer moments by simplex quadrature, Monte
// Carlo estimators over realizations, scaling-exponent and tail fits, the
// exact-scaling two-sample test, covariance decay of juxtaposed intervals, and
// the growth-constant and negative-moment probes.

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lidc/cascade.hpp"
#include "lidc/parallel.hpp"
#include "lidc/statistics.hpp"

namespace lidc {

// ---------------------------------------------------------------------------
// Exact moments

/// alpha(j,k) = psi(j-k+1) + psi(j-k-1) - 2 psi(j-k), psi(q) meaning psi(-iq).
inline double alpha_coeff(const LevyModel& model, int j, int k) {
  if (k >= j) throw InvalidArgument("alpha_coeff: need k < j");
  const double d = j - k;
  return model.psi(d + 1.0) + model.psi(d - 1.0) - 2.0 * model.psi(d);
}

/// The same coefficient as sigma^2 + int e^{(j-k-1)x} (1 - e^x)^2 nu(dx).
inline double alpha_coeff_integral(const LevyModel& model, int j, int k) {
  if (k >= j) throw InvalidArgument("alpha_coeff_integral: need k < j");
  const double d = j - k;
  const ExtendedInterval iv = model.moment_interval();
  if (!iv.contains(d + 1.0) || !iv.contains(d - 1.0))
    throw DomainError("alpha_coeff_integral: exponents outside the moment interval");
  double v = model.sigma2();
  if (!model.nu().is_zero()) {
    v += model.nu().integrate([d](double x) {
      const double e = std::expm1(x);
      return std::exp((d - 1.0) * x) * e * e;
    });
  }
  return v;
}

/// E(mu([0,1])^2) in closed form, psi2 = psi(-2i) < 1.
inline double second_moment_closed_form(double psi2) {
  if (!(psi2 < 1.0)) throw DomainError("second_moment_closed_form: needs psi(2) < 1");
  return 2.0 / ((1.0 - psi2) * (2.0 - psi2));
}

struct IntervalPower {
  Interval interval;
  int power = 1;
};

struct JointMoment {
  double value = 0.0;
  double error = 0.0;
};

namespace detail {

/// Ordered-simplex integral of prod_{k<j} (t_j - t_k)^{-alpha(j-k)} with point j in where[j].
class SimplexIntegral {
 public:
  SimplexIntegral(std::vector<double> alpha, std::vector<Interval> where, double tol)
      : alpha_(std::move(alpha)), where_(std::move(where)), n_(where_.size()), tol_(tol) {
    single_ = std::all_of(where_.begin(), where_.end(), [&](const Interval& w) { return w == where_[0]; });
    power_ = alpha_.size() > 1 && alpha_[1] > 0.0 && alpha_[1] < 1.0 ? 1.0 / (1.0 - alpha_[1]) : 1.0;
    for (std::size_t i = 0; i <= n_; ++i) integrators_.emplace_back(10);
    gaps_.assign(n_, 0.0);
  }

  JointMoment run() {
    if (n_ == 1) return {where_[0].length(), 0.0};
    error_ = 0.0;
    double v;
    if (single_) {
      v = gap_level(1, 0.0);
    } else {
      auto f = [&](double t) { return gap_level(1, t); };
      v = integrate(0, f, where_[0].lo, where_[0].hi);
    }
    return {v, error_};
  }

 private:
  template <class F>
  double integrate(std::size_t level, F&& f, double a, double b) {
    if (!(b > a)) return 0.0;
    double err = 0.0, l1 = 0.0;
    std::size_t lv = 0;
    const double v = integrators_[level].integrate(f, a, b, tol_, &err, &l1, &lv);
    if (level == 0 || (single_ && level == 1)) error_ += err;
    return v;
  }

  /// Integrates over gap j (t_j - t_{j-1}) and everything after it; `pos` is t_{j-1}.
  double gap_level(std::size_t j, double pos) {
    if (j == n_) {
      if (single_) return where_[0].length() - pos;  // t_1 integrates out
      return 1.0;
    }
    const Interval& w = where_[j];
    const double g_lo = single_ ? 0.0 : std::max(0.0, w.lo - pos);
    const double g_hi = single_ ? where_[0].length() - pos : w.hi - pos;
    if (!(g_hi > g_lo)) return 0.0;
    // Power substitution only where the gap can vanish.
    const double p = g_lo == 0.0 ? power_ : 1.0;
    auto f = [&, j, pos, p](double u) {
      const double g = p == 1.0 ? u : std::pow(u, p);
      const double jac = p == 1.0 ? 1.0 : p * std::pow(u, p - 1.0);
      // Subnormal gaps carry no mass but overflow the kernel.
      if (!(g >= std::numeric_limits<double>::min())) return 0.0;
      gaps_[j] = g;
      double w8 = 1.0, s = 0.0;
      for (std::size_t k = j; k-- > 0;) {
        s += gaps_[k + 1];
        w8 *= std::pow(s, -alpha_[j - k]);
      }
      const double inner = gap_level(j + 1, pos + g);
      return jac * w8 * inner;
    };
    return integrate(j, f, std::pow(g_lo, 1.0 / p), std::pow(g_hi, 1.0 / p));
  }

  std::vector<double> alpha_;
  std::vector<Interval> where_;
  std::size_t n_;
  double tol_;
  bool single_ = false;
  double power_ = 1.0;
  double error_ = 0.0;
  std::vector<double> gaps_;
  std::vector<boost::math::quadrature::tanh_sinh<double>> integrators_;
};

}  // namespace detail

/// E prod_i mu(J_i)^{p_i} for disjoint J_i in [0,1], total degree <= 4.
inline JointMoment exact_joint_moment_detail(const LevyModel& model, std::vector<IntervalPower> parts,
                                             double rel_tol = 1e-10) {
  int n = 0;
  for (const auto& part : parts) {
    if (part.power < 0) throw InvalidArgument("exact_joint_moment: powers must be >= 0");
    if (part.power > 0) detail::require_nontrivial(part.interval, "exact_joint_moment interval");
    if (part.power > 0 && (part.interval.lo < 0.0 || part.interval.hi > 1.0))
      throw InvalidArgument("exact_joint_moment: intervals must lie in [0, 1]");
    n += part.power;
  }
  if (n > 4) throw InvalidArgument("exact_joint_moment: total degree above 4 is left to Monte Carlo");
  std::erase_if(parts, [](const IntervalPower& p) { return p.power == 0; });
  if (n == 0) return {1.0, 0.0};
  std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return a.interval.lo < b.interval.lo; });
  for (std::size_t i = 1; i < parts.size(); ++i)
    if (parts[i].interval.lo < parts[i - 1].interval.hi)
      throw InvalidArgument("exact_joint_moment: intervals must not overlap");

  std::vector<double> alpha(static_cast<std::size_t>(n), 0.0);
  for (int d = 1; d < n; ++d) alpha[d] = alpha_coeff(model, d, 0);

  std::vector<Interval> where;
  double prefactor = 1.0;
  for (const auto& part : parts) {
    for (int i = 0; i < part.power; ++i) where.push_back(part.interval);
    prefactor *= std::tgamma(part.power + 1.0);
  }
  // A run of consecutive points can collapse when it lies in one interval (onto
  // a line) or in two touching ones (onto the shared endpoint). Collapse is
  // integrable iff the alpha sum over its pairs stays below the codimension.
  const auto collapsible = [&](int a, int b) {
    return where[a] == where[b] || where[a].hi == where[b].lo;
  };
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n && collapsible(a, b); ++b) {
      double total = 0.0;
      for (int x = a; x < b; ++x)
        for (int y = x + 1; y <= b; ++y) total += alpha[y - x];
      const int codim = b - a + (where[a] == where[b] ? 0 : 1);
      if (!(total < codim)) {
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "exact_joint_moment: not integrable, %d coinciding points have alpha sum %.6g >= %d "
                      "(alpha(2,1) = %.6g)",
                      b - a + 1, total, codim, alpha[1]);
        throw DomainError(buf);
      }
    }
  }
  detail::SimplexIntegral integral(alpha, where, rel_tol);
  JointMoment r = integral.run();
  r.value *= prefactor;
  r.error *= prefactor;
  return r;
}

inline double exact_joint_moment(const LevyModel& model, const std::vector<IntervalPower>& parts,
                                 double rel_tol = 1e-10) {
  return exact_joint_moment_detail(model, parts, rel_tol).value;
}

/// E(Z^n) = E(mu([0,1])^n).
inline double exact_moment(const LevyModel& model, int n) {
  return exact_joint_moment(model, {{{0.0, 1.0}, n}});
}

// ---------------------------------------------------------------------------
// Monte Carlo plumbing

struct SimulationSpec {
  GridSpec grid{{0.0, 1.0}, 8, 4};
  std::size_t replicas = 1000;
  std::uint64_t seed = 1;
  std::string tag = "cascade";
  SamplerOptions options;
  unsigned threads = 1;
};

/// Calls f(i, realization) for every replica; f must be safe to call concurrently for distinct i.
template <class F>
void for_each_realization(const LevyModel& model, const SimulationSpec& spec, F&& f) {
  parallel_for(spec.replicas, spec.threads, [&](std::size_t i) {
    f(i, build_realization(model, spec.grid, make_stream(spec.seed, i, spec.tag), spec.options));
  });
}

inline std::vector<double> simulate_total_masses(const LevyModel& model, const SimulationSpec& spec) {
  std::vector<double> z(spec.replicas);
  for_each_realization(model, spec, [&](std::size_t i, const Realization& r) { z[i] = r.total_mass; });
  return z;
}

// ---------------------------------------------------------------------------
// Moment estimation

struct MomentEstimate {
  double q = 0.0;
  double mean = 0.0;
  double mean_stderr = 0.0;
  double median_of_means = 0.0;
  double mom_stderr = 0.0;
  bool heavy_tail = false;  // second moment of Z^q not finite per the diagnostics
};

inline MomentEstimate estimate_moment(std::span<const double> z, double q, std::size_t blocks = 32) {
  if (z.empty()) throw InvalidArgument("estimate_moment: empty sample");
  MomentEstimate e;
  e.q = q;
  if (q == 0.0) {
    e.mean = e.median_of_means = 1.0;
    return e;
  }
  std::vector<double> p(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) p[i] = std::pow(z[i], q);
  const auto m = stats::mean_estimate(p);
  const auto mom = stats::median_of_means(p, blocks);
  e.mean = m.value;
  e.mean_stderr = m.stderr_;
  e.median_of_means = mom.value;
  e.mom_stderr = mom.stderr_;
  return e;
}

struct MomentReport {
  std::vector<MomentEstimate> estimates;
  std::vector<std::optional<double>> quadrature;  // exact E Z^q for integer q <= 4 when integrable
  std::vector<double> theory_exponent;            // 1 - phi(q)
  std::size_t samples = 0;
};

inline MomentReport moment_report(const LevyModel& model, std::span<const double> z, const std::vector<double>& qs) {
  MomentReport r;
  r.samples = z.size();
  const DiagnosticsReport diag = diagnose(model);
  for (double q : qs) {
    MomentEstimate e = estimate_moment(z, q);
    // The variance of the plain mean of Z^q needs E Z^{2q} < infinity.
    e.heavy_tail = 2.0 * q >= diag.moment_region_sup;
    r.estimates.push_back(e);
    std::optional<double> exact;
    if (q >= 1.0 && q <= 4.0 && q == std::floor(q)) {
      try {
        exact = exact_moment(model, static_cast<int>(q));
      } catch (const DomainError&) {
      }
    }
    r.quadrature.push_back(exact);
    double theory = std::nan("");
    try {
      theory = 1.0 - model.phi(q);
    } catch (const DomainError&) {
    }
    r.theory_exponent.push_back(theory);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Scaling exponents

struct ScalingReport {
  std::vector<double> q;
  std::vector<double> slope;         // fitted tau(q)
  std::vector<double> slope_stderr;  // regression stderr over the lambda points
  std::vector<double> theory;        // 1 - phi(q)
  std::vector<int> lambda_levels;    // lambda = 2^-k
  std::vector<std::vector<double>> log_moments;  // [q][k]
  std::vector<double> excluded_q;
  std::size_t replicas = 0;
};

/// Regresses log E mu([0, 2^-k])^q on log 2^-k over the given levels.
inline ScalingReport scaling_fit(const LevyModel& model, const std::vector<double>& qs, const std::vector<int>& levels,
                                 const SimulationSpec& spec) {
  if (levels.size() < 2) throw InvalidArgument("scaling_fit: need at least two lambda values");
  for (int k : levels)
    if (k < 0 || k > spec.grid.level) throw InvalidArgument("scaling_fit: lambda level outside the grid");
  const DiagnosticsReport diag = diagnose(model);
  ScalingReport r;
  r.lambda_levels = levels;
  r.replicas = spec.replicas;
  for (double q : qs) {
    if (q > 1.0 && !(q < diag.moment_region_sup)) {
      r.excluded_q.push_back(q);
      continue;
    }
    r.q.push_back(q);
  }
  std::vector<std::vector<double>> mass(levels.size(), std::vector<double>(spec.replicas));
  for_each_realization(model, spec, [&](std::size_t i, const Realization& real) {
    for (std::size_t l = 0; l < levels.size(); ++l) mass[l][i] = dyadic_prefix_mass(real, levels[l]);
  });
  std::vector<double> x;
  for (int k : levels) x.push_back(-k * std::log(2.0));
  for (double q : r.q) {
    std::vector<double> y;
    for (std::size_t l = 0; l < levels.size(); ++l) y.push_back(std::log(estimate_moment(mass[l], q).mean));
    const auto fit = stats::ols(x, y);
    r.slope.push_back(fit.slope);
    r.slope_stderr.push_back(fit.slope_stderr);
    r.theory.push_back(1.0 - model.phi(q));
    r.log_moments.push_back(y);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Tail

struct TailReport {
  std::vector<double> fractions;
  std::vector<double> hill;
  double zeta_hat = 0.0;  // Hill estimate at the 1% fraction
  std::optional<double> zeta_theory;
  std::optional<double> d_hat;
  std::optional<double> d_theory;
  bool stable_tail = false;
  bool few_samples = false;
  std::size_t samples = 0;
};

/// Hill estimates over top fractions and the plateau of x^zeta P(Z > x) above `plateau_quantile`.
inline TailReport tail_fit(std::span<const double> z, const std::optional<LevyModel>& model = std::nullopt,
                           double plateau_quantile = 0.99) {
  if (z.size() < 200) throw InvalidArgument("tail_fit: need at least 200 samples");
  TailReport r;
  r.samples = z.size();
  r.few_samples = z.size() < 10000;
  std::vector<double> s(z.begin(), z.end());
  std::sort(s.begin(), s.end(), std::greater<>());
  const double n = static_cast<double>(s.size());
  r.fractions = {0.005, 0.01, 0.02, 0.05};
  for (double f : r.fractions) r.hill.push_back(stats::hill(s, std::max<std::size_t>(2, static_cast<std::size_t>(f * n))));
  r.zeta_hat = r.hill[1];
  // A power tail gives a flat Hill profile; lighter tails drift upward at small fractions.
  r.stable_tail = std::abs(r.hill.front() - r.hill.back()) <= 0.2 * r.zeta_hat;
  if (model) {
    const DiagnosticsReport diag = diagnose(*model);
    r.zeta_theory = diag.zeta;
    r.d_theory = diag.d_formula_value;
  }
  const double zeta = r.zeta_theory.value_or(r.zeta_hat);
  const auto band = static_cast<std::size_t>((1.0 - plateau_quantile) * n);
  if (band >= 1) {
    std::vector<double> v;
    for (std::size_t i = 0; i < band; ++i) v.push_back(std::pow(s[i], zeta) * static_cast<double>(i + 1) / n);
    std::nth_element(v.begin(), v.begin() + static_cast<long>(v.size() / 2), v.end());
    r.d_hat = v[v.size() / 2];
  }
  return r;
}

// ---------------------------------------------------------------------------
// Exact scaling

struct ScalingTest {
  double p_value = 1.0;
  double statistic = 0.0;
  std::size_t samples = 0;
};

/// KS between mu([0, 2^-k]) on the level-n grid and 2^-k e^{Omega} Z' with Z' an
/// independent level-(n-k) total mass; `other` (if given) drives the right side.
inline ScalingTest exact_scaling_test(const LevyModel& model, int k, const SimulationSpec& spec,
                                      const std::optional<LevyModel>& other = std::nullopt) {
  if (k < 0 || k >= spec.grid.level) throw InvalidArgument("exact_scaling_test: need 0 <= k < grid level");
  const LevyModel& rhs = other ? *other : model;
  const double lambda = std::ldexp(1.0, -k);
  std::vector<double> left(spec.replicas), right(spec.replicas);
  for_each_realization(model, spec, [&](std::size_t i, const Realization& r) { left[i] = dyadic_prefix_mass(r, k); });
  SimulationSpec sub = spec;
  sub.grid = GridSpec::make({0.0, 1.0}, spec.grid.level - k, spec.grid.oversample);
  sub.tag = spec.tag + ":copy";
  for_each_realization(rhs, sub, [&](std::size_t i, const Realization& r) {
    const double omega = sample_omega(rhs, lambda, make_stream(spec.seed, i, spec.tag + ":omega"));
    right[i] = lambda * std::exp(omega) * r.total_mass;
  });
  const auto ks = stats::ks_two_sample(left, right);
  return {ks.p_value, ks.statistic, spec.replicas};
}

// ---------------------------------------------------------------------------
// Covariance decay

struct CovarianceReport {
  std::vector<int> lags;
  std::vector<double> covariance;
  std::vector<double> stderr_;
  std::vector<double> asymptotic;  // 2 psi(2) / (3 n)
  std::vector<double> exact;       // finite-lag value of the limit measure
  bool shared_field = true;
  std::size_t replicas = 0;
};

/// cov(mu([0,1]), mu([n,n+1])) of the limit measure: the double integral of
/// e^{psi(2) lambda(V^{I_0}(s) and V^{I_n}(t))} - 1.
inline double juxtaposed_covariance_theory(const LevyModel& model, int lag) {
  if (lag < 1) throw InvalidArgument("juxtaposed_covariance_theory: lag must be >= 1");
  const double psi2 = model.psi(2.0);
  const Interval left{0.0, 1.0};
  const Interval right{static_cast<double>(lag), lag + 1.0};
  const double eps = 1e-9;
  auto inner = [&](double s) {
    return quad::smooth(
               [&](double t) { return std::expm1(psi2 * area_cross_intersection(left, right, s, t, eps)); },
               right.lo, right.hi, 1e-9, 12)
        .value;
  };
  return quad::smooth(inner, left.lo, left.hi, 1e-9, 12).value;
}

/// Sample covariances between the first interval and the interval `lag` later.
/// With shared_field = false each interval is simulated independently (negative control).
inline CovarianceReport covariance_decay(const LevyModel& model, const std::vector<int>& lags,
                                         const SimulationSpec& spec, bool shared_field = true) {
  if (lags.empty()) throw InvalidArgument("covariance_decay: no lags");
  const int top = *std::max_element(lags.begin(), lags.end());
  if (*std::min_element(lags.begin(), lags.end()) < 1) throw InvalidArgument("covariance_decay: lags must be >= 1");
  std::vector<std::vector<double>> masses(top + 1, std::vector<double>(spec.replicas));
  parallel_for(spec.replicas, spec.threads, [&](std::size_t i) {
    const StreamId stream = make_stream(spec.seed, i, spec.tag);
    if (shared_field) {
      const auto rs = juxtapose(model, top + 1, spec.grid, stream, spec.options);
      for (int j = 0; j <= top; ++j) masses[j][i] = rs[j].total_mass;
    } else {
      for (int j = 0; j <= top; ++j)
        masses[j][i] = build_realization(model, spec.grid, stream.with_tag("interval" + std::to_string(j)), spec.options)
                           .total_mass;
    }
  });
  CovarianceReport r;
  r.shared_field = shared_field;
  r.replicas = spec.replicas;
  const double psi2 = model.psi(2.0);
  for (int lag : lags) {
    const auto c = stats::covariance_jackknife(masses[0], masses[lag]);
    r.lags.push_back(lag);
    r.covariance.push_back(c.value);
    r.stderr_.push_back(c.stderr_);
    r.asymptotic.push_back(2.0 * psi2 / (3.0 * lag));
    r.exact.push_back(juxtaposed_covariance_theory(model, lag));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Growth constant and negative moments

struct GrowthReport {
  std::vector<int> n;
  std::vector<double> log_moment;
  std::vector<double> ratio;  // log E Z^n / (n log n)
  std::vector<bool> exact;    // quadrature (true) or Monte Carlo median-of-means
  double gamma = 0.0;
  bool increasing = false;
};

/// log E(Z^n)/(n log n) for n = 2..max_n: quadrature for n <= 4, median-of-means of `z` above.
inline GrowthReport growth_constant_probe(const LevyModel& model, int max_n, std::span<const double> z) {
  const DiagnosticsReport diag = diagnose(model);
  if (!diag.all_moments_finite)
    throw InvalidArgument(
        "growth_constant_probe: model must have all moments finite (sigma2 = 0, nu carried by (-inf, 0], gamma <= 1)");
  if (max_n < 2 || max_n > 8) throw InvalidArgument("growth_constant_probe: max_n must be in [2, 8]");
  GrowthReport r;
  r.gamma = *diag.gamma;
  for (int n = 2; n <= max_n; ++n) {
    double m;
    bool ex = n <= 4;
    if (ex) {
      m = exact_moment(model, n);
    } else {
      if (z.empty()) throw InvalidArgument("growth_constant_probe: Monte Carlo samples needed for n > 4");
      m = estimate_moment(z, n).median_of_means;
    }
    r.n.push_back(n);
    r.log_moment.push_back(std::log(m));
    r.ratio.push_back(std::log(m) / (n * std::log(static_cast<double>(n))));
    r.exact.push_back(ex);
  }
  r.increasing = true;
  for (std::size_t i = 1; i < r.ratio.size(); ++i) r.increasing = r.increasing && r.ratio[i] > r.ratio[i - 1];
  return r;
}

struct NegativeMomentProbe {
  double q = 0.0;
  double estimate = 1.0;
  std::vector<double> running;  // means over the first 25%, 50%, 75%, 100% of the sample
  bool stable = true;           // heuristic: last-quartile drift below 5%
};

/// Running Monte Carlo mean of Z^q, q < 0. A heuristic probe, not a finiteness proof.
inline NegativeMomentProbe negative_moment_probe(std::span<const double> z, double q) {
  if (q > 0.0) throw InvalidArgument("negative_moment_probe: q must be <= 0");
  NegativeMomentProbe r;
  r.q = q;
  if (q == 0.0) {
    r.running = {1.0, 1.0, 1.0, 1.0};
    return r;
  }
  if (z.size() < 4) throw InvalidArgument("negative_moment_probe: need at least 4 samples");
  std::vector<double> p(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) p[i] = std::pow(z[i], q);
  for (int quarter = 1; quarter <= 4; ++quarter)
    r.running.push_back(stats::mean(std::span<const double>(p).first(p.size() * quarter / 4)));
  r.estimate = r.running.back();
  r.stable = std::isfinite(r.estimate) && std::abs(r.running[3] - r.running[2]) <= 0.05 * std::abs(r.running[3]);
  return r;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const MomentEstimate& e) {
  return {{"q", e.q},
          {"mean", e.mean},
          {"mean_stderr", e.mean_stderr},
          {"median_of_means", e.median_of_means},
          {"mom_stderr", e.mom_stderr},
          {"heavy_tail", e.heavy_tail}};
}

inline nlohmann::json to_json(const MomentReport& r) {
  nlohmann::json j;
  j["samples"] = r.samples;
  j["moments"] = nlohmann::json::array();
  for (std::size_t i = 0; i < r.estimates.size(); ++i) {
    nlohmann::json e = to_json(r.estimates[i]);
    e["quadrature"] = detail::optional_json(r.quadrature[i]);
    e["theory_exponent"] = std::isnan(r.theory_exponent[i]) ? nlohmann::json(nullptr) : nlohmann::json(r.theory_exponent[i]);
    j["moments"].push_back(e);
  }
  return j;
}

inline nlohmann::json to_json(const ScalingReport& r) {
  return {{"q", r.q},           {"slope", r.slope},          {"slope_stderr", r.slope_stderr},
          {"theory", r.theory}, {"lambda_levels", r.lambda_levels}, {"log_moments", r.log_moments},
          {"excluded_q", r.excluded_q}, {"replicas", r.replicas}};
}

inline nlohmann::json to_json(const TailReport& r) {
  return {{"fractions", r.fractions},
          {"hill", r.hill},
          {"zeta_hat", r.zeta_hat},
          {"zeta_theory", detail::optional_json(r.zeta_theory)},
          {"d_hat", detail::optional_json(r.d_hat)},
          {"d_theory", detail::optional_json(r.d_theory)},
          {"stable_tail", r.stable_tail},
          {"few_samples", r.few_samples},
          {"samples", r.samples}};
}

inline nlohmann::json to_json(const ScalingTest& r) {
  return {{"p_value", r.p_value}, {"statistic", r.statistic}, {"samples", r.samples}};
}

inline nlohmann::json to_json(const CovarianceReport& r) {
  return {{"lags", r.lags},         {"covariance", r.covariance}, {"stderr", r.stderr_},
          {"asymptotic", r.asymptotic}, {"exact", r.exact},       {"shared_field", r.shared_field},
          {"replicas", r.replicas}};
}

inline nlohmann::json to_json(const GrowthReport& r) {
  return {{"n", r.n},         {"log_moment", r.log_moment}, {"ratio", r.ratio},
          {"exact", r.exact}, {"gamma", r.gamma},           {"increasing", r.increasing}};
}

inline nlohmann::json to_json(const NegativeMomentProbe& r) {
  return {{"q", r.q}, {"estimate", r.estimate}, {"running", r.running}, {"stable", r.stable}};
}

}  // namespace lidc

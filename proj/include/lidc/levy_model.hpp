#pragma once

// Levy triple (a, sigma^2, nu), the exponent psi(-iq) on the moment interval,
// the structure function phi(q) = psi(-iq) - (q - 1), and the closed-form
// diagnostics that decide non-degeneracy, moment finiteness and tail behaviour
// of the cascade's total mass.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "lidc/numerics.hpp"
#include "lidc/rng.hpp"

namespace lidc {

struct Atom {
  double location = 0.0;
  double mass = 0.0;
};

/// Density given by linear interpolation between nodes, optionally continued
/// by exponential tails f(x0) e^{rate (x - x0)} to the left and
/// f(xN) e^{-rate (x - xN)} to the right.
struct TabulatedDensity {
  std::vector<double> x;
  std::vector<double> density;
  std::optional<double> left_tail_rate;
  std::optional<double> right_tail_rate;
};

/// One elementary part of a Levy measure.
struct MeasurePiece {
  enum class Kind { atom, linear, exponential };
  Kind kind = Kind::atom;
  double lo = 0.0;  // atom location, or support [lo, hi] (may be infinite for exponential)
  double hi = 0.0;
  double f_lo = 0.0;  // atom mass, or linear density at lo
  double f_hi = 0.0;  // linear density at hi
  double log_scale = 0.0;  // exponential: density = exp(log_scale + slope * x)
  double slope = 0.0;

  double density(double x) const {
    switch (kind) {
      case Kind::linear:
        return hi > lo ? f_lo + (f_hi - f_lo) * (x - lo) / (hi - lo) : f_lo;
      case Kind::exponential:
        return std::exp(log_scale + slope * x);
      case Kind::atom:
        break;
    }
    return 0.0;
  }

  double mass() const {
    switch (kind) {
      case Kind::atom:
        return f_lo;
      case Kind::linear:
        return 0.5 * (f_lo + f_hi) * (hi - lo);
      case Kind::exponential: {
        const double top = std::isinf(hi) ? 0.0 : std::exp(log_scale + slope * hi);
        const double bottom = std::isinf(lo) ? 0.0 : std::exp(log_scale + slope * lo);
        return (top - bottom) / slope;
      }
    }
    return 0.0;
  }

  /// Restriction to [a, b]; nullopt when empty.
  std::optional<MeasurePiece> clipped(double a, double b) const {
    if (kind == Kind::atom) {
      if (lo >= a && lo <= b) return *this;
      return std::nullopt;
    }
    const double l = std::max(lo, a);
    const double h = std::min(hi, b);
    if (!(h > l)) return std::nullopt;
    MeasurePiece p = *this;
    if (kind == Kind::linear) {
      p.f_lo = density(l);
      p.f_hi = density(h);
    }
    p.lo = l;
    p.hi = h;
    return p;
  }

  template <class Engine>
  double sample(Engine& eng) const {
    const double u = uniform_open01(eng);
    switch (kind) {
      case Kind::atom:
        return lo;
      case Kind::linear: {
        const double w = hi - lo;
        const double k = (f_hi - f_lo) / w;
        const double target = u * mass();
        const double disc = std::max(0.0, f_lo * f_lo + 2.0 * k * target);
        const double s = 2.0 * target / (f_lo + std::sqrt(disc));
        return std::clamp(lo + s, lo, hi);
      }
      case Kind::exponential: {
        if (std::isinf(lo)) return hi + std::log(u) / slope;
        if (std::isinf(hi)) return lo + std::log(u) / slope;
        return lo + std::log1p(u * std::expm1(slope * (hi - lo))) / slope;
      }
    }
    return 0.0;
  }
};

/// Levy measure nu: zero, a finite list of atoms, or a tabulated density.
class NuSpec {
 public:
  struct Zero {};
  using Variant = std::variant<Zero, std::vector<Atom>, TabulatedDensity>;

  NuSpec() = default;

  static NuSpec zero() { return {}; }

  static NuSpec atoms(std::vector<Atom> atoms) {
    for (const Atom& a : atoms) {
      if (!std::isfinite(a.location) || !std::isfinite(a.mass))
        throw InvalidArgument("nu: atom location and mass must be finite");
      if (a.location == 0.0) throw InvalidArgument("nu: atom at 0 is not allowed (nu({0}) = 0)");
      if (!(a.mass > 0.0)) throw InvalidArgument("nu: atom masses must be positive");
    }
    NuSpec nu;
    for (const Atom& a : atoms) {
      MeasurePiece p;
      p.kind = MeasurePiece::Kind::atom;
      p.lo = p.hi = a.location;
      p.f_lo = a.mass;
      nu.pieces_.push_back(p);
    }
    nu.variant_ = std::move(atoms);
    if (nu.pieces_.empty()) nu.variant_ = Zero{};
    return nu;
  }

  static NuSpec density(TabulatedDensity d) {
    if (d.x.empty() || d.x.size() != d.density.size())
      throw InvalidArgument("nu: density needs matching, non-empty node and value lists");
    for (std::size_t i = 0; i < d.x.size(); ++i) {
      if (!std::isfinite(d.x[i]) || !std::isfinite(d.density[i]))
        throw InvalidArgument("nu: density nodes and values must be finite");
      if (d.density[i] < 0.0) throw InvalidArgument("nu: density values must be nonnegative");
      if (i > 0 && !(d.x[i] > d.x[i - 1])) throw InvalidArgument("nu: density nodes must be strictly increasing");
    }
    for (const auto& rate : {d.left_tail_rate, d.right_tail_rate}) {
      if (rate && !(*rate > 0.0 && std::isfinite(*rate)))
        throw InvalidArgument("nu: tail rates must be positive and finite");
    }
    NuSpec nu;
    if (d.left_tail_rate && d.density.front() > 0.0) {
      MeasurePiece p;
      p.kind = MeasurePiece::Kind::exponential;
      p.lo = -kInf;
      p.hi = d.x.front();
      p.slope = *d.left_tail_rate;
      p.log_scale = std::log(d.density.front()) - p.slope * d.x.front();
      nu.pieces_.push_back(p);
    }
    for (std::size_t i = 0; i + 1 < d.x.size(); ++i) {
      if (d.density[i] == 0.0 && d.density[i + 1] == 0.0) continue;
      MeasurePiece p;
      p.kind = MeasurePiece::Kind::linear;
      p.lo = d.x[i];
      p.hi = d.x[i + 1];
      p.f_lo = d.density[i];
      p.f_hi = d.density[i + 1];
      nu.pieces_.push_back(p);
    }
    if (d.right_tail_rate && d.density.back() > 0.0) {
      MeasurePiece p;
      p.kind = MeasurePiece::Kind::exponential;
      p.lo = d.x.back();
      p.hi = kInf;
      p.slope = -*d.right_tail_rate;
      p.log_scale = std::log(d.density.back()) - p.slope * d.x.back();
      nu.pieces_.push_back(p);
    }
    nu.variant_ = std::move(d);
    return nu;
  }

  const Variant& variant() const noexcept { return variant_; }
  std::span<const MeasurePiece> pieces() const noexcept { return pieces_; }
  bool is_zero() const noexcept { return pieces_.empty(); }
  bool is_atomic() const noexcept { return std::holds_alternative<std::vector<Atom>>(variant_); }

  double total_mass() const {
    double m = 0.0;
    for (const auto& p : pieces_) m += p.mass();
    return m;
  }

  /// Every representable nu is bounded with bounded or exponentially decaying
  /// support, so all three integrability conditions hold.
  bool square_integrable() const noexcept { return true; }
  bool abs_integrable() const noexcept { return true; }
  bool finite_mass() const noexcept { return true; }

  /// {q : integral over |x| >= 1 of e^{qx} nu(dx) is finite}.
  ExtendedInterval moment_interval() const {
    ExtendedInterval iv;
    if (const auto* d = std::get_if<TabulatedDensity>(&variant_)) {
      if (d->left_tail_rate && d->density.front() > 0.0) iv.lower = -*d->left_tail_rate;
      if (d->right_tail_rate && d->density.back() > 0.0) iv.upper = *d->right_tail_rate;
    }
    return iv;
  }

  bool carried_by_nonpositive() const {
    for (const auto& p : pieces_) {
      if (p.kind == MeasurePiece::Kind::atom ? p.lo > 0.0 : p.hi > 0.0) return false;
    }
    return true;
  }

  /// True when nu = sum_n p_n delta_{nh} for some h > 0.
  bool is_arithmetic() const {
    const auto* atoms = std::get_if<std::vector<Atom>>(&variant_);
    if (!atoms || atoms->empty()) return false;
    const double ref = std::abs(std::min_element(atoms->begin(), atoms->end(), [](const Atom& a, const Atom& b) {
                                  return std::abs(a.location) < std::abs(b.location);
                                })->location);
    for (int denom = 1; denom <= 64; ++denom) {
      const bool lattice = std::all_of(atoms->begin(), atoms->end(), [&](const Atom& a) {
        const double r = a.location / ref * denom;
        return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, std::abs(r));
      });
      if (lattice) return true;
    }
    return false;
  }

  /// Integral of g against nu restricted to min_abs <= |x| < max_abs.
  template <class G>
  double integrate(G&& g, double min_abs = 0.0, double max_abs = kInf) const {
    double total = 0.0;
    for (const auto& piece : pieces_) {
      if (piece.kind == MeasurePiece::Kind::atom) {
        const double ax = std::abs(piece.lo);
        if (ax >= min_abs && ax < max_abs) total += piece.f_lo * g(piece.lo);
        continue;
      }
      // Integrate separately on each side of the kinks at +-1 and the window edges.
      std::vector<double> cuts{piece.lo, piece.hi};
      for (double c : {-1.0, 1.0, -min_abs, min_abs, -max_abs, max_abs}) {
        if (std::isfinite(c) && c > piece.lo && c < piece.hi) cuts.push_back(c);
      }
      std::sort(cuts.begin(), cuts.end());
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i];
        const double b = cuts[i + 1];
        const double mid = std::isinf(a) ? b - 1.0 : (std::isinf(b) ? a + 1.0 : 0.5 * (a + b));
        if (std::abs(mid) < min_abs || std::abs(mid) >= max_abs) continue;
        // Far out in an exponential tail the density underflows before g does.
        const auto f = [&](double x) {
          const double dens = piece.density(x);
          if (dens == 0.0) return 0.0;
          const double v = g(x) * dens;
          return std::isfinite(v) ? v : 0.0;
        };
        total += quad::smooth(f, a, b).value;
      }
    }
    return total;
  }

  /// Canonical text form used for hashing and config echo.
  std::string describe() const {
    char buf[64];
    std::string s;
    if (std::holds_alternative<Zero>(variant_)) return "zero";
    if (const auto* atoms = std::get_if<std::vector<Atom>>(&variant_)) {
      s = "atoms";
      for (const Atom& a : *atoms) {
        std::snprintf(buf, sizeof buf, ";%.17g:%.17g", a.location, a.mass);
        s += buf;
      }
      return s;
    }
    const auto& d = std::get<TabulatedDensity>(variant_);
    s = "density";
    for (std::size_t i = 0; i < d.x.size(); ++i) {
      std::snprintf(buf, sizeof buf, ";%.17g:%.17g", d.x[i], d.density[i]);
      s += buf;
    }
    if (d.left_tail_rate) {
      std::snprintf(buf, sizeof buf, ";left=%.17g", *d.left_tail_rate);
      s += buf;
    }
    if (d.right_tail_rate) {
      std::snprintf(buf, sizeof buf, ";right=%.17g", *d.right_tail_rate);
      s += buf;
    }
    return s;
  }

 private:
  Variant variant_ = Zero{};
  std::vector<MeasurePiece> pieces_;
};

/// Compensated jump integral  int (e^{qx} - 1 - qx 1_{|x|<=1}) nu(dx).
inline double jump_exponent(const NuSpec& nu, double q) {
  if (nu.is_zero() || q == 0.0) return 0.0;
  return nu.integrate([q](double x) {
    const double small = std::abs(x) <= 1.0 ? q * x : 0.0;
    return std::expm1(q * x) - small;
  });
}

/// Drift forced by E Q(B) = 1:  a = -sigma^2/2 - int (e^x - 1 - x 1_{|x|<=1}) nu(dx).
inline double normalize_drift(double sigma2, const NuSpec& nu) {
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw InvalidArgument("sigma2 must be finite and nonnegative");
  if (sigma2 == 0.0 && nu.is_zero())
    throw InvalidArgument("model: at least one of sigma2 and nu must be nonzero");
  if (!(nu.moment_interval().upper > 1.0))
    throw InvalidArgument("nu: the moment interval must contain [0, 1] (right tail rate must exceed 1)");
  const double j1 = jump_exponent(nu, 1.0);
  if (!std::isfinite(j1)) throw InvalidArgument("nu: normalization integral diverges");
  return -0.5 * sigma2 - j1;
}

struct PhiDerivatives {
  double first = 0.0;
  double second = 0.0;
};

class LevyModel {
 public:
  LevyModel(double sigma2, NuSpec nu)
      : sigma2_(sigma2), nu_(std::move(nu)), jump_at_one_(0.0), drift_(normalize_drift(sigma2_, nu_)) {
    jump_at_one_ = jump_exponent(nu_, 1.0);
  }

  static LevyModel lognormal(double sigma2) { return LevyModel(sigma2, NuSpec::zero()); }

  double sigma2() const noexcept { return sigma2_; }
  const NuSpec& nu() const noexcept { return nu_; }
  double drift() const noexcept { return drift_; }
  ExtendedInterval moment_interval() const { return nu_.moment_interval(); }

  /// psi(-iq) = a q + sigma^2 q^2 / 2 + int (e^{qx} - 1 - qx 1_{|x|<=1}) nu(dx).
  double psi(double q) const {
    check_domain(q);
    if (q == 0.0) return 0.0;
    // The exact cancellation at q = 1 relies on reusing the cached integral.
    const double jump = q == 1.0 ? jump_at_one_ : jump_exponent(nu_, q);
    return drift_ * q + 0.5 * sigma2_ * q * q + jump;
  }

  double phi(double q) const { return psi(q) - (q - 1.0); }

  /// Derivatives by differentiation under the integral.
  PhiDerivatives phi_derivatives(double q) const {
    const ExtendedInterval iv = moment_interval();
    if (!iv.interior(q)) throw DomainError(domain_message(q));
    double j1 = 0.0;
    double j2 = 0.0;
    if (!nu_.is_zero()) {
      j1 = nu_.integrate([q](double x) { return x * (std::exp(q * x) - (std::abs(x) <= 1.0 ? 1.0 : 0.0)); });
      j2 = nu_.integrate([q](double x) { return x * x * std::exp(q * x); });
    }
    return {drift_ + sigma2_ * q + j1 - 1.0, sigma2_ + j2};
  }

  /// Drift of the compound-Poisson representation restricted to |x| >= cutoff:
  /// with jumps summed directly, E e^{Lambda(B)} = 1 needs this per unit area.
  double jump_drift(double cutoff = 0.0) const {
    if (nu_.is_zero()) return 0.0;
    return -nu_.integrate([](double x) { return std::expm1(x); }, cutoff);
  }

  std::string describe() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "sigma2=%.17g;", sigma2_);
    return buf + nu_.describe();
  }

  std::uint64_t hash() const { return detail::fnv1a(describe()); }

 private:
  std::string domain_message(double q) const {
    const ExtendedInterval iv = moment_interval();
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "q = %.6g lies outside the moment interval (%.6g, %.6g): the integral of e^{qx} over |x| >= 1 "
                  "against nu diverges",
                  q, iv.lower, iv.upper);
    return buf;
  }

  void check_domain(double q) const {
    if (!moment_interval().contains(q)) throw DomainError(domain_message(q));
  }

  double sigma2_;
  NuSpec nu_;
  double jump_at_one_;
  double drift_;
};

inline double psi_exp(const LevyModel& model, double q) { return model.psi(q); }
inline double phi(const LevyModel& model, double q) { return model.phi(q); }
inline PhiDerivatives phi_derivatives(const LevyModel& model, double q) { return model.phi_derivatives(q); }
inline ExtendedInterval moment_interval(const NuSpec& nu) { return nu.moment_interval(); }

/// Root of phi in (1, sup I_nu), when phi dips below zero and comes back.
///
/// Probes q = 1 + 2^j for j = -20, -19, ... up to min(sup I_nu - margin, 64),
/// then polishes the first sign change with TOMS 748. Convexity of phi and
/// phi(1) = 0 make the root unique.
inline std::optional<double> zeta_root(const LevyModel& model) {
  const ExtendedInterval iv = model.moment_interval();
  const double margin = std::isfinite(iv.upper) ? 1e-6 * std::max(1.0, std::abs(iv.upper)) : 0.0;
  const double q_max = std::min(iv.upper - margin, 64.0);
  if (!(q_max > 1.0)) return std::nullopt;
  if (!(model.phi_derivatives(1.0).first < 0.0)) return std::nullopt;

  double prev = 1.0;
  for (int j = -20;; ++j) {
    const double q = std::min(1.0 + std::ldexp(1.0, j), q_max);
    const double v = model.phi(q);
    if (v >= 0.0) {
      if (prev == 1.0) return std::nullopt;  // phi never went negative at the probe resolution
      const double root = bracketed_root([&](double x) { return model.phi(x); }, prev, q, 1e-13);
      return root;
    }
    prev = q;
    if (q >= q_max) return std::nullopt;
  }
}

struct DiagnosticsReport {
  bool nondegenerate = false;
  double phi_prime_one = 0.0;
  double moment_region_sup = 1.0;
  bool moment_scan_capped = false;
  bool all_moments_finite = false;
  std::optional<double> gamma;
  std::optional<double> zeta;
  std::optional<double> phi_prime_zeta;
  std::optional<double> d_formula_value;
  double neg_moment_bound = -kInf;
  double gauge_alpha = 0.0;
  double gauge_b_crit = 0.0;
  bool arithmetic_flag = false;
  double drift = 0.0;
  double quadrature_tolerance = 1e-10;
};

inline DiagnosticsReport diagnose(const LevyModel& model) {
  DiagnosticsReport r;
  const NuSpec& nu = model.nu();
  const ExtendedInterval iv = model.moment_interval();
  const PhiDerivatives at_one = model.phi_derivatives(1.0);

  r.drift = model.drift();
  r.phi_prime_one = at_one.first;
  // Strict inequality: phi'(1) = 0 is the critical, degenerate case.
  r.nondegenerate = at_one.first < 0.0;
  r.gauge_alpha = -at_one.first;
  r.gauge_b_crit = std::sqrt(2.0 * std::max(0.0, at_one.second));
  r.neg_moment_bound = iv.lower;
  r.arithmetic_flag = model.sigma2() == 0.0 && nu.is_arithmetic();

  if (nu.carried_by_nonpositive()) {
    r.gamma = nu.is_zero() ? 0.0 : nu.integrate([](double x) { return -std::expm1(x); });
  }
  r.all_moments_finite = model.sigma2() == 0.0 && !nu.is_zero() && nu.carried_by_nonpositive() &&
                         nu.abs_integrable() && r.gamma && *r.gamma <= 1.0;

  if (r.nondegenerate) {
    r.zeta = zeta_root(model);
    if (r.zeta) {
      r.moment_region_sup = *r.zeta;
      r.phi_prime_zeta = model.phi_derivatives(*r.zeta).first;
      if (std::abs(*r.zeta - 2.0) <= 1e-8) r.d_formula_value = 1.0 / model.phi_derivatives(2.0).first;
    } else if (r.all_moments_finite || iv.upper <= 64.0) {
      r.moment_region_sup = iv.upper;
    } else {
      r.moment_region_sup = 64.0;
      r.moment_scan_capped = true;
    }
  }
  return r;
}

namespace detail {

inline nlohmann::json extended(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

template <class T>
nlohmann::json optional_json(const std::optional<T>& v) {
  if (!v) return nullptr;
  return extended(*v);
}

}  // namespace detail

inline nlohmann::json to_json(const DiagnosticsReport& r) {
  nlohmann::json j;
  j["nondegenerate"] = r.nondegenerate;
  j["phi_prime_one"] = r.phi_prime_one;
  j["moment_region_sup"] = detail::extended(r.moment_region_sup);
  j["moment_scan_capped"] = r.moment_scan_capped;
  j["all_moments_finite"] = r.all_moments_finite;
  j["gamma"] = detail::optional_json(r.gamma);
  j["zeta"] = detail::optional_json(r.zeta);
  j["phi_prime_zeta"] = detail::optional_json(r.phi_prime_zeta);
  j["d_formula_value"] = detail::optional_json(r.d_formula_value);
  j["neg_moment_bound"] = detail::extended(r.neg_moment_bound);
  j["gauge_alpha"] = r.gauge_alpha;
  j["gauge_b_crit"] = r.gauge_b_crit;
  j["arithmetic_flag"] = r.arithmetic_flag;
  j["drift"] = r.drift;
  j["quadrature_tolerance"] = r.quadrature_tolerance;
  return j;
}

}  // namespace lidc

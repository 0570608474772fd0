#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

namespace lidc {

// Error taxonomy. The CLI maps these onto its exit codes.

/// Invalid model, grid or configuration value.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exponent outside the integrability interval of the Levy measure.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Sampler or factorization failure at run time.
class SamplerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Quadrature that did not reach its tolerance; carries the estimate it got.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimate, double error)
      : std::runtime_error(what + " (estimate " + std::to_string(estimate) + ", error " +
                           std::to_string(error) + ")"),
        estimate_(estimate),
        error_(error) {}
  double estimate() const noexcept { return estimate_; }
  double error() const noexcept { return error_; }

 private:
  double estimate_;
  double error_;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Interval of the extended real line; either end may be infinite.
struct ExtendedInterval {
  double lower = -kInf;
  double upper = kInf;
  bool lower_closed = false;
  bool upper_closed = false;

  bool contains(double q) const noexcept {
    const bool above = lower_closed ? q >= lower : q > lower;
    const bool below = upper_closed ? q <= upper : q < upper;
    return above && below;
  }
  bool interior(double q) const noexcept { return q > lower && q < upper; }
};

/// Pairwise (cascade) summation; error grows like log n instead of n.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

namespace quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod (G15/K31) for smooth integrands; infinite limits allowed.
template <class F>
Result smooth(F&& f, double a, double b, double rel_tol = 1e-13, unsigned max_depth = 18) {
  if (a == b) return {};
  double err = 0.0;
  double l1 = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, max_depth, rel_tol, &err, &l1);
  return {v, err};
}

/// Smooth integral that must meet an absolute tolerance or throw.
template <class F>
double smooth_checked(F&& f, double a, double b, double abs_tol, const char* what) {
  const Result r = smooth(f, a, b);
  if (!(r.error <= abs_tol) && !(r.error <= 1e-10 * std::abs(r.value))) {
    throw QuadratureError(std::string(what) + ": quadrature did not converge", r.value, r.error);
  }
  return r.value;
}

/// Double-exponential rule; tolerates algebraic or logarithmic endpoint singularities.
template <class F>
Result endpoint_singular(F&& f, double a, double b, double rel_tol = 1e-10) {
  if (a == b) return {};
  thread_local boost::math::quadrature::tanh_sinh<double> integrator(12);
  double err = 0.0;
  double l1 = 0.0;
  std::size_t levels = 0;
  const double v = integrator.integrate(f, a, b, rel_tol, &err, &l1, &levels);
  return {v, err};
}

}  // namespace quad

/// Bracketed root of a continuous function, f(lo) and f(hi) of opposite sign.
template <class F>
double bracketed_root(F&& f, double lo, double hi, double rel_tol = 1e-12) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) throw InvalidArgument("bracketed_root: endpoints do not bracket a root");
  std::uintmax_t iters = 200;
  const auto tol = [rel_tol](double x, double y) { return std::abs(x - y) <= rel_tol * std::max(1.0, std::abs(x)); };
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  return 0.5 * (a + b);
}

}  // namespace lidc

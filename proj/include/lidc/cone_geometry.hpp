#pragma once

// Cones in the upper half-plane H with intensity lambda(dx dy) = y^-2 dx dy.
//
// A point z = (x, y) lies in V(t) iff -y/2 < x - t <= y/2, i.e. iff t belongs
// to its shadow S(z) = [x - y/2, x + y/2). Every region used here is a signed
// sum of "cover sets" {z : S(z) contains [p, q], y >= floor}, which are closed
// under intersection; areas of such sums have exact closed forms because the
// x-width of a cover set at height y is max(0, y - (q - p)).

#include <algorithm>
#include <cmath>
#include <memory>
#include <variant>
#include <vector>

#include "json.hpp"
#include "lidc/numerics.hpp"

namespace lidc {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double length() const noexcept { return hi - lo; }
  bool contains(double t) const noexcept { return t >= lo && t <= hi; }
  bool contains(const Interval& j) const noexcept { return j.lo >= lo && j.hi <= hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

inline Interval hull(const Interval& a, const Interval& b) { return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; }

/// coeff * indicator{ S(z) contains [p, q], Im z >= floor }.
struct CoverTerm {
  double coeff = 1.0;
  double p = 0.0;
  double q = 0.0;
  double floor = 0.0;

  bool contains_shadow(double l, double y) const noexcept { return y >= floor && l <= p && l + y > q; }
};

using CoverExpansion = std::vector<CoverTerm>;

namespace cover {

inline CoverExpansion term(double p, double q, double floor = 0.0, double coeff = 1.0) {
  return {CoverTerm{coeff, p, q, floor}};
}

inline CoverExpansion sum(CoverExpansion a, const CoverExpansion& b, double sign = 1.0) {
  for (CoverTerm t : b) {
    t.coeff *= sign;
    a.push_back(t);
  }
  return a;
}

inline CoverExpansion product(const CoverExpansion& a, const CoverExpansion& b) {
  CoverExpansion out;
  out.reserve(a.size() * b.size());
  for (const auto& s : a) {
    for (const auto& t : b) {
      out.push_back({s.coeff * t.coeff, std::min(s.p, t.p), std::max(s.q, t.q), std::max(s.floor, t.floor)});
    }
  }
  return out;
}

inline CoverExpansion with_floor(CoverExpansion a, double floor) {
  for (auto& t : a) t.floor = std::max(t.floor, floor);
  return a;
}

/// Exact lambda-measure of a signed cover sum.
///
/// Term i contributes width (y - L_i) for y >= m_i = max(floor_i, L_i), so the
/// total width is A y + B between consecutive breakpoints and the integral of
/// (A y + B) / y^2 is elementary.
inline double area(const CoverExpansion& terms) {
  struct Event {
    double at;
    double da;
    double db;
  };
  std::vector<Event> events;
  events.reserve(terms.size());
  for (const auto& t : terms) {
    if (t.coeff == 0.0) continue;
    const double len = t.q - t.p;
    events.push_back({std::max(t.floor, len), t.coeff, -t.coeff * len});
  }
  if (events.empty()) return 0.0;
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.at < b.at; });

  double slope = 0.0;
  double offset = 0.0;
  double total = 0.0;
  std::size_t i = 0;
  while (i < events.size()) {
    const double y0 = events[i].at;
    while (i < events.size() && events[i].at == y0) {
      slope += events[i].da;
      offset += events[i].db;
      ++i;
    }
    const bool flat = std::abs(slope) <= 1e-12 && std::abs(offset) <= 1e-12 * (1.0 + std::abs(y0));
    if (flat) {
      slope = offset = 0.0;
      continue;
    }
    if (y0 <= 0.0) throw InvalidArgument("cone region has infinite lambda-measure near y = 0");
    if (i == events.size()) {
      if (std::abs(slope) > 1e-12) throw InvalidArgument("cone region has infinite lambda-measure as y grows");
      total += offset / y0;
    } else {
      const double y1 = events[i].at;
      total += slope * std::log(y1 / y0) + offset * (1.0 / y0 - 1.0 / y1);
    }
  }
  return total;
}

}  // namespace cover

namespace detail {

inline bool in_cone(double x, double y, double t) noexcept { return -y / 2 < x - t && x - t <= y / 2; }

/// V(I) is the intersection of the cones over I; by convexity the endpoints suffice.
inline bool in_interval_cone(double x, double y, const Interval& i) noexcept {
  return in_cone(x, y, i.lo) && in_cone(x, y, i.hi);
}

inline void require_positive_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidArgument("cutoff epsilon must be positive and finite");
}

inline void require_nontrivial(const Interval& i, const char* what) {
  if (!(i.hi > i.lo) || !std::isfinite(i.lo) || !std::isfinite(i.hi))
    throw InvalidArgument(std::string(what) + " must be a nontrivial compact interval");
}

}  // namespace detail

/// Symbolic cone region: the truncated cones of the cascade, their pairwise
/// intersections, and boolean composites of those.
class ConeRegion {
 public:
  /// V_eps^I(t) = (V(t) \ V(I)) intersected with {y >= eps}.
  struct TruncCone {
    Interval base;
    double t;
    double eps;
  };
  /// V^I(J) = V(J) \ V(I), J inside I.
  struct ConeOfInterval {
    Interval base;
    Interval sub;
  };
  /// V_eps^I(s) intersected with V_eps^I(t).
  struct PairIntersection {
    Interval base;
    double s;
    double t;
    double eps;
  };
  /// V_eps^I(s) intersected with V_eps^I'(t), for disjoint I and I'.
  struct CrossIntersection {
    Interval left;
    Interval right;
    double s;
    double t;
    double eps;
  };
  struct Composite {
    enum class Op { intersection, union_, difference, floor };
    Op op;
    std::shared_ptr<const ConeRegion> a;
    std::shared_ptr<const ConeRegion> b;  // null for floor
    double floor = 0.0;
  };
  struct Empty {};

  using Variant = std::variant<Empty, TruncCone, ConeOfInterval, PairIntersection, CrossIntersection, Composite>;

  ConeRegion() = default;

  static ConeRegion empty() { return ConeRegion(Empty{}); }

  static ConeRegion trunc_cone(Interval base, double t, double eps) {
    detail::require_nontrivial(base, "base interval");
    detail::require_positive_eps(eps);
    if (!base.contains(t)) throw InvalidArgument("trunc_cone: t must lie in the base interval");
    return ConeRegion(TruncCone{base, t, eps});
  }

  static ConeRegion cone_of_interval(Interval base, Interval sub) {
    detail::require_nontrivial(base, "base interval");
    detail::require_nontrivial(sub, "sub-interval");
    if (!base.contains(sub)) throw InvalidArgument("cone_of_interval: J must be contained in I");
    return ConeRegion(ConeOfInterval{base, sub});
  }

  static ConeRegion pair_intersection(Interval base, double s, double t, double eps) {
    detail::require_nontrivial(base, "base interval");
    detail::require_positive_eps(eps);
    if (!base.contains(s) || !base.contains(t)) throw InvalidArgument("pair_intersection: s and t must lie in I");
    return ConeRegion(PairIntersection{base, std::min(s, t), std::max(s, t), eps});
  }

  static ConeRegion cross_intersection(Interval left, Interval right, double s, double t, double eps) {
    detail::require_nontrivial(left, "first interval");
    detail::require_nontrivial(right, "second interval");
    detail::require_positive_eps(eps);
    if (!(left.hi <= right.lo || right.hi <= left.lo))
      throw InvalidArgument("cross_intersection: intervals must be disjoint");
    if (!left.contains(s) || !right.contains(t))
      throw InvalidArgument("cross_intersection: s must lie in I and t in I'");
    return ConeRegion(CrossIntersection{left, right, s, t, eps});
  }

  friend ConeRegion operator&(const ConeRegion& a, const ConeRegion& b) { return binary(Composite::Op::intersection, a, b); }
  friend ConeRegion operator|(const ConeRegion& a, const ConeRegion& b) { return binary(Composite::Op::union_, a, b); }
  friend ConeRegion operator-(const ConeRegion& a, const ConeRegion& b) { return binary(Composite::Op::difference, a, b); }

  /// Intersection with {y >= floor}.
  ConeRegion above(double floor) const {
    return ConeRegion(Composite{Composite::Op::floor, std::make_shared<const ConeRegion>(*this), nullptr, floor});
  }

  const Variant& variant() const noexcept { return v_; }

  CoverExpansion expansion() const {
    using cover::product;
    using cover::sum;
    using cover::term;
    using cover::with_floor;
    return std::visit(
        [](const auto& r) -> CoverExpansion {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, Empty>) {
            return {};
          } else if constexpr (std::is_same_v<T, TruncCone>) {
            return sum(term(r.t, r.t, r.eps), term(r.base.lo, r.base.hi, r.eps), -1.0);
          } else if constexpr (std::is_same_v<T, ConeOfInterval>) {
            return sum(term(r.sub.lo, r.sub.hi), term(r.base.lo, r.base.hi), -1.0);
          } else if constexpr (std::is_same_v<T, PairIntersection>) {
            return sum(term(r.s, r.t, r.eps), term(r.base.lo, r.base.hi, r.eps), -1.0);
          } else if constexpr (std::is_same_v<T, CrossIntersection>) {
            const auto a = sum(term(r.s, r.s), term(r.left.lo, r.left.hi), -1.0);
            const auto b = sum(term(r.t, r.t), term(r.right.lo, r.right.hi), -1.0);
            return with_floor(product(a, b), r.eps);
          } else {
            const CoverExpansion a = r.a->expansion();
            switch (r.op) {
              case Composite::Op::floor:
                return with_floor(a, r.floor);
              case Composite::Op::intersection:
                return product(a, r.b->expansion());
              case Composite::Op::union_: {
                const CoverExpansion b = r.b->expansion();
                return sum(sum(a, b), product(a, b), -1.0);
              }
              case Composite::Op::difference:
                return sum(a, product(a, r.b->expansion()), -1.0);
            }
            return {};
          }
        },
        v_);
  }

  /// Point membership straight from the cone definitions.
  bool contains(double x, double y) const {
    using detail::in_cone;
    using detail::in_interval_cone;
    if (!(y > 0.0)) return false;
    return std::visit(
        [x, y](const auto& r) -> bool {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, Empty>) {
            return false;
          } else if constexpr (std::is_same_v<T, TruncCone>) {
            return y >= r.eps && in_cone(x, y, r.t) && !in_interval_cone(x, y, r.base);
          } else if constexpr (std::is_same_v<T, ConeOfInterval>) {
            return in_interval_cone(x, y, r.sub) && !in_interval_cone(x, y, r.base);
          } else if constexpr (std::is_same_v<T, PairIntersection>) {
            return y >= r.eps && in_cone(x, y, r.s) && in_cone(x, y, r.t) && !in_interval_cone(x, y, r.base);
          } else if constexpr (std::is_same_v<T, CrossIntersection>) {
            return y >= r.eps && in_cone(x, y, r.s) && !in_interval_cone(x, y, r.left) && in_cone(x, y, r.t) &&
                   !in_interval_cone(x, y, r.right);
          } else {
            const bool a = r.a->contains(x, y);
            switch (r.op) {
              case Composite::Op::floor:
                return a && y >= r.floor;
              case Composite::Op::intersection:
                return a && r.b->contains(x, y);
              case Composite::Op::union_:
                return a || r.b->contains(x, y);
              case Composite::Op::difference:
                return a && !r.b->contains(x, y);
            }
            return false;
          }
        },
        v_);
  }

  double area() const { return cover::area(expansion()); }

  nlohmann::json to_json() const {
    return std::visit(
        [](const auto& r) -> nlohmann::json {
          using T = std::decay_t<decltype(r)>;
          const auto iv = [](const Interval& i) { return nlohmann::json::array({i.lo, i.hi}); };
          if constexpr (std::is_same_v<T, Empty>) {
            return {{"kind", "empty"}};
          } else if constexpr (std::is_same_v<T, TruncCone>) {
            return {{"kind", "trunc_cone"}, {"base", iv(r.base)}, {"t", r.t}, {"eps", r.eps}};
          } else if constexpr (std::is_same_v<T, ConeOfInterval>) {
            return {{"kind", "cone_of_interval"}, {"base", iv(r.base)}, {"sub", iv(r.sub)}};
          } else if constexpr (std::is_same_v<T, PairIntersection>) {
            return {{"kind", "pair_intersection"}, {"base", iv(r.base)}, {"s", r.s}, {"t", r.t}, {"eps", r.eps}};
          } else if constexpr (std::is_same_v<T, CrossIntersection>) {
            return {{"kind", "cross_intersection"}, {"left", iv(r.left)}, {"right", iv(r.right)},
                    {"s", r.s}, {"t", r.t}, {"eps", r.eps}};
          } else {
            static constexpr const char* names[] = {"intersection", "union", "difference", "floor"};
            nlohmann::json j{{"kind", names[static_cast<int>(r.op)]}, {"a", r.a->to_json()}};
            if (r.b) j["b"] = r.b->to_json();
            if (r.op == Composite::Op::floor) j["floor"] = r.floor;
            return j;
          }
        },
        v_);
  }

 private:
  explicit ConeRegion(Variant v) : v_(std::move(v)) {}

  static ConeRegion binary(Composite::Op op, const ConeRegion& a, const ConeRegion& b) {
    return ConeRegion(
        Composite{op, std::make_shared<const ConeRegion>(a), std::make_shared<const ConeRegion>(b), 0.0});
  }

  Variant v_ = Empty{};
};

/// lambda(V^I(J)) = log(|I| / |J|).
inline double area_cone_of_interval(const Interval& big, const Interval& sub) {
  detail::require_nontrivial(big, "base interval");
  detail::require_nontrivial(sub, "sub-interval");
  if (!big.contains(sub)) throw InvalidArgument("area_cone_of_interval: J must be contained in I");
  return std::log(big.length() / sub.length());
}

/// lambda(V_eps^I(t)); log(|I|/eps) + 1 when eps <= |I|, |I|/eps beyond.
inline double area_trunc_profile(const Interval& base, double t, double eps) {
  detail::require_nontrivial(base, "base interval");
  detail::require_positive_eps(eps);
  if (!base.contains(t)) throw InvalidArgument("area_trunc_profile: t must lie in I");
  const double len = base.length();
  return eps <= len ? std::log(len / eps) + 1.0 : len / eps;
}

/// lambda(V_eps^I(s) intersected with V_eps^I(t)) as a function of tau = |t - s|.
inline double pair_area(double len, double tau, double eps) {
  if (eps >= len) return (len - tau) / eps;
  if (tau >= eps) return std::log(len / tau);
  return std::log(len / eps) + 1.0 - tau / eps;
}

inline double area_pair_intersection(const Interval& base, double s, double t, double eps) {
  detail::require_nontrivial(base, "base interval");
  detail::require_positive_eps(eps);
  if (!base.contains(s) || !base.contains(t)) throw InvalidArgument("area_pair_intersection: s and t must lie in I");
  return pair_area(base.length(), std::abs(t - s), eps);
}

/// lambda((V(s) \ V(I)) and (V(t) \ V(I')) above eps), by inclusion-exclusion over
/// the four cover sets {S contains [s,t]}, {.. and I}, {.. and I'}, {.. and both}.
inline double area_cross_intersection(const Interval& left, const Interval& right, double s, double t, double eps) {
  return ConeRegion::cross_intersection(left, right, s, t, eps).area();
}

/// Area of V^I(I_i) intersected with V_eps^I(t); only the hull of t and I_i matters.
inline double area_cell_point(const Interval& base, const Interval& cell, double t, double eps) {
  return pair_area(base.length(), hull(cell, Interval{t, t}).length(), eps);
}

/// Numerical oracle: integrates over y, measuring the x-width at each height by
/// point-membership tests between candidate breakpoints.
inline double numeric_area_oracle(const ConeRegion& region, double tol = 1e-10) {
  const CoverExpansion terms = region.expansion();
  if (terms.empty()) return 0.0;

  const auto width = [&](double y) {
    std::vector<double> cuts;
    cuts.reserve(2 * terms.size());
    for (const auto& t : terms) {
      cuts.push_back(t.p);
      cuts.push_back(t.q - y);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    const auto inside = [&](double l) { return region.contains(l + y / 2, y); };
    if (inside(cuts.front() - 1.0) || inside(cuts.back() + 1.0))
      throw InvalidArgument("numeric_area_oracle: region is unbounded in x");
    double w = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      if (inside(0.5 * (cuts[i] + cuts[i + 1]))) w += cuts[i + 1] - cuts[i];
    }
    return w;
  };

  // Heights where the membership pattern can change.
  std::vector<double> ys;
  for (const auto& a : terms) {
    ys.push_back(a.floor);
    for (const auto& b : terms) ys.push_back(b.q - a.p);
  }
  ys.erase(std::remove_if(ys.begin(), ys.end(), [](double y) { return !(y > 0.0); }), ys.end());
  std::sort(ys.begin(), ys.end());
  // Breakpoints equal up to roundoff would leave slivers the rule cannot resolve.
  ys.erase(std::unique(ys.begin(), ys.end(), [](double a, double b) { return b - a <= 1e-12 * b; }), ys.end());
  if (ys.empty()) return 0.0;

  const auto f = [&](double y) { return width(y) / (y * y); };
  const double probe = ys.front() / 2;
  if (width(probe) > 0.0) throw InvalidArgument("numeric_area_oracle: region reaches y = 0 with positive width");

  double total = 0.0;
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < ys.size(); ++i) {
    if (ys[i + 1] - ys[i] <= 1e-8 * ys[i + 1]) {
      total += f(0.5 * (ys[i] + ys[i + 1])) * (ys[i + 1] - ys[i]);
      continue;
    }
    // In s = log y the integrand w(y)/y varies slowly even across wide ranges of y.
    const auto r = quad::smooth([&](double s) { const double y = std::exp(s); return f(y) * y; },
                                std::log(ys[i]), std::log(ys[i + 1]), 1e-11);
    total += r.value;
    err += r.error;
  }
  // Above the last breakpoint the membership pattern is frozen, so the width is
  // affine in y; a finite area forces it to be constant there.
  const double top = ys.back();
  const double w_near = width(2.0 * top);
  const double w_far = width(4.0 * top);
  if (std::abs(w_far - w_near) > 1e-9 * (1.0 + std::abs(w_near)))
    throw InvalidArgument("numeric_area_oracle: region width grows without bound");
  total += w_near / top;
  if (!(err <= tol)) throw QuadratureError("numeric_area_oracle did not reach tolerance", total, err);
  return total;
}

/// Horizontal strip of the sampling domain; the x-width at height y is slope * y + intercept.
struct Strip {
  double y_lo = 0.0;
  double y_hi = kInf;
  double slope = 0.0;
  double intercept = 0.0;
  double mass = 0.0;
};

/// The union over t in I of V_eps^I(t): shadows meeting I but not containing it, above eps.
struct SamplingDomain {
  Interval base;
  double eps = 0.0;
  std::vector<Strip> strips;
  double total_mass = 0.0;
  double y_top = kInf;

  /// Membership in shadow coordinates (l = x - y/2).
  bool contains_shadow(double l, double y) const noexcept {
    if (y < eps || y >= y_top) return false;
    const bool meets = l <= base.hi && l + y > base.lo;
    const bool covers = l <= base.lo && l + y > base.hi;
    return meets && !covers;
  }
};

/// Part of the sampling domain of I between heights y_lo and y_hi.
inline SamplingDomain sampling_band(const Interval& base, double y_lo, double y_hi) {
  detail::require_nontrivial(base, "base interval");
  detail::require_positive_eps(y_lo);
  if (!(y_hi > y_lo)) throw InvalidArgument("sampling_band: empty height range");
  const double len = base.length();
  const auto inv = [](double y) { return std::isinf(y) ? 0.0 : 1.0 / y; };
  SamplingDomain d{base, y_lo, {}, 0.0, y_hi};
  if (y_lo < len) {
    const double hi = std::min(y_hi, len);
    d.strips.push_back({y_lo, hi, 1.0, len, std::log(hi / y_lo) + len * (1.0 / y_lo - 1.0 / hi)});
  }
  const double lo = std::max(y_lo, len);
  if (y_hi > lo) d.strips.push_back({lo, y_hi, 0.0, 2.0 * len, 2.0 * len * (1.0 / lo - inv(y_hi))});
  for (const auto& s : d.strips) d.total_mass += s.mass;
  return d;
}

/// The union over t in I of V_eps^I(t), as horizontal strips.
inline SamplingDomain sampling_domain(const Interval& base, double eps) { return sampling_band(base, eps, kInf); }

}  // namespace lidc

#pragma once

// Joint samples of the independently scattered measure Lambda over the cone
// regions a dyadic cascade needs: V_eps^I(t_k) at the evaluation points and
// V^I(I_i) for the dyadic cells.
//
// The Gaussian component is drawn either by one joint Cholesky factor over
// points and cells, or (points only) by circulant embedding. The jump
// component is a Poisson point process in the sampling domain; every region
// value is a sum over the points it contains, so additivity holds pathwise.

#include <Eigen/Dense>
#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lidc/cone_geometry.hpp"
#include "lidc/levy_model.hpp"
#include "lidc/rng.hpp"

namespace lidc {

/// Dyadic grid on I: 2^level cells, `oversample` midpoints per cell, eps = |I| 2^-level.
struct GridSpec {
  Interval base{0.0, 1.0};
  int level = 1;
  int oversample = 4;

  static GridSpec make(Interval base, int level, int oversample = 4) {
    GridSpec g{base, level, oversample};
    g.validate();
    return g;
  }

  void validate() const {
    if (level < 1 || level > 24) throw InvalidArgument("grid: level must be in [1, 24]");
    if (oversample < 1 || oversample > 1024) throw InvalidArgument("grid: oversample must be in [1, 1024]");
    detail::require_nontrivial(base, "grid base interval");
  }

  double eps() const noexcept { return base.length() * std::ldexp(1.0, -level); }
  std::size_t cell_count(int j) const noexcept { return std::size_t{1} << j; }
  std::size_t points() const noexcept { return cell_count(level) * static_cast<std::size_t>(oversample); }
  double spacing() const noexcept { return eps() / oversample; }
  double point(std::size_t k) const noexcept { return base.lo + (static_cast<double>(k) + 0.5) * spacing(); }
  Interval cell(int j, std::size_t i) const noexcept {
    const double w = base.length() * std::ldexp(1.0, -j);
    return {base.lo + static_cast<double>(i) * w, base.lo + static_cast<double>(i + 1) * w};
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

enum class SamplerKind { gaussian, poisson, hybrid };
enum class GaussianMethod { automatic, joint, circulant };
enum class SmallJumpMode { drift, gaussian };

inline const char* to_string(SamplerKind k) {
  switch (k) {
    case SamplerKind::gaussian:
      return "gaussian";
    case SamplerKind::poisson:
      return "poisson";
    case SamplerKind::hybrid:
      return "hybrid";
  }
  return "?";
}

struct SamplerOptions {
  std::optional<SamplerKind> kind;  // chosen from the model when unset
  GaussianMethod gaussian_method = GaussianMethod::automatic;
  std::optional<int> cell_levels;  // dyadic levels with cell values; default all that are affordable
  double small_jump_cutoff = 0.0;  // hybrid only, in [0, 1]; 0 keeps every jump
  SmallJumpMode small_jumps = SmallJumpMode::drift;
  std::size_t max_joint_dim = 1024;
};

/// Atom of the Poisson point process, in shadow coordinates: it lies in V(t)
/// iff l <= t < l + y.
struct JumpPoint {
  double l = 0.0;
  double y = 0.0;
  double jump = 0.0;
};

/// Jump distribution nu restricted to |x| >= cutoff, normalized, with the
/// compensating drift that makes E e^{Lambda(B)} = 1 for the retained jumps.
class JumpLaw {
 public:
  JumpLaw(const NuSpec& nu, double cutoff) : cutoff_(cutoff) {
    for (const auto& piece : nu.pieces()) {
      for (auto part : {piece.clipped(-kInf, -cutoff), piece.clipped(cutoff, kInf)}) {
        if (!part || part->mass() <= 0.0) continue;
        pieces_.push_back(*part);
        mass_ += part->mass();
        cumulative_.push_back(mass_);
      }
    }
    if (!nu.is_zero()) {
      drift_ = -nu.integrate([](double x) { return std::expm1(x); }, cutoff);
      if (cutoff > 0.0) small_variance_ = nu.integrate([](double x) { return x * x; }, 0.0, cutoff);
    }
  }

  double mass() const noexcept { return mass_; }
  double drift() const noexcept { return drift_; }
  double small_variance() const noexcept { return small_variance_; }
  double cutoff() const noexcept { return cutoff_; }

  template <class Engine>
  double sample(Engine& eng) const {
    const double u = uniform_open01(eng) * mass_;
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const std::size_t i = std::min<std::size_t>(it - cumulative_.begin(), pieces_.size() - 1);
    return pieces_[i].sample(eng);
  }

 private:
  double cutoff_;
  std::vector<MeasurePiece> pieces_;
  std::vector<double> cumulative_;
  double mass_ = 0.0;
  double drift_ = 0.0;
  double small_variance_ = 0.0;
};

/// One point uniform w.r.t. lambda on the domain, in shadow coordinates.
template <class Engine>
JumpPoint draw_location(const SamplingDomain& d, Engine& eng) {
  double u = uniform_open01(eng) * d.total_mass;
  const Strip* s = &d.strips.back();
  for (const auto& st : d.strips) {
    if (u < st.mass) {
      s = &st;
      break;
    }
    u -= st.mass;
  }
  const double len = d.base.length();
  const double inv_lo = 1.0 / s->y_lo;
  const double inv_hi = std::isinf(s->y_hi) ? 0.0 : 1.0 / s->y_hi;
  JumpPoint p;
  if (s->slope > 0.0) {
    // Width y + |I|: density 1/y + |I|/y^2, a two-part mixture.
    const double m_log = std::log(s->y_hi / s->y_lo);
    const double m_pow = len * (inv_lo - inv_hi);
    if (uniform_open01(eng) * (m_log + m_pow) < m_log) {
      p.y = s->y_lo * std::exp(uniform_open01(eng) * m_log);
    } else {
      p.y = 1.0 / (inv_lo - uniform_open01(eng) * (inv_lo - inv_hi));
    }
    p.l = d.base.hi - uniform_open01(eng) * (len + p.y);
  } else {
    // Width 2|I|: shadows ending inside I or starting inside I.
    p.y = 1.0 / (inv_lo - uniform_open01(eng) * (inv_lo - inv_hi));
    const double v = uniform_open01(eng) * 2.0 * len;
    p.l = v < len ? d.base.hi - p.y - v : d.base.hi - (v - len);
  }
  p.y = std::clamp(p.y, s->y_lo, s->y_hi);
  return p;
}

template <class Engine>
std::vector<JumpPoint> sample_jump_points(const SamplingDomain& d, const JumpLaw& law, Engine& eng) {
  std::vector<JumpPoint> pts;
  if (law.mass() <= 0.0) return pts;
  std::poisson_distribution<long long> count(law.mass() * d.total_mass);
  const long long n = count(eng);
  pts.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    JumpPoint p = draw_location(d, eng);
    p.jump = law.sample(eng);
    pts.push_back(p);
  }
  return pts;
}

/// Evenly spaced elements: element e occupies [c_e, c_e + extent] with
/// c_e = origin + e * pitch + offset. Consecutive runs of `block` elements form
/// intervals of width block * pitch; a shadow covering a whole interval does
/// not count for its elements.
struct Lattice {
  double origin = 0.0;
  double pitch = 1.0;
  double offset = 0.0;
  double extent = 0.0;
  std::size_t count = 0;
  std::size_t block = 1;
};

/// Adds to out[e] the jumps of the points whose shadow covers element e but
/// not the interval holding it. Difference arrays keep it O(points + count).
inline void scatter_jumps(std::span<const JumpPoint> pts, const Lattice& lat, std::span<double> out) {
  std::vector<double> diff(lat.count + 1, 0.0);
  const double n = static_cast<double>(lat.count);
  const double blocks = static_cast<double>(lat.count / lat.block);
  const double width = lat.pitch * static_cast<double>(lat.block);
  const auto clampi = [](double v, double hi) { return static_cast<std::size_t>(std::clamp(v, 0.0, hi)); };
  for (const JumpPoint& p : pts) {
    const double r = p.l + p.y;
    const std::size_t lo = clampi(std::ceil((p.l - lat.origin - lat.offset) / lat.pitch), n);
    const std::size_t hi = clampi(std::ceil((r - lat.origin - lat.offset - lat.extent) / lat.pitch), n);
    if (lo < hi) {
      diff[lo] += p.jump;
      diff[hi] -= p.jump;
    }
    const std::size_t qlo = clampi(std::ceil((p.l - lat.origin) / width), blocks);
    const std::size_t qhi = clampi(std::ceil((r - lat.origin) / width - 1.0), blocks);
    if (qlo < qhi) {
      diff[qlo * lat.block] -= p.jump;
      diff[qhi * lat.block] += p.jump;
    }
  }
  double run = 0.0;
  for (std::size_t e = 0; e < lat.count; ++e) {
    run += diff[e];
    out[e] += run;
  }
}

inline Lattice point_lattice(const GridSpec& g, std::size_t points_per_block) {
  return {g.base.lo, g.spacing(), 0.5 * g.spacing(), 0.0, g.points(), points_per_block};
}

inline Lattice cell_lattice(const GridSpec& g, int j) {
  const double w = g.base.length() * std::ldexp(1.0, -j);
  return {g.base.lo, w, 0.0, w, g.cell_count(j), g.cell_count(j)};
}

namespace detail {

/// Process-wide cache of immutable factorizations, keyed by a descriptive string.
template <class T>
std::shared_ptr<const T> cached(const std::string& key, const std::function<std::shared_ptr<const T>()>& make) {
  static std::mutex mu;
  static std::map<std::string, std::shared_ptr<const T>> store;
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = store.find(key); it != store.end()) return it->second;
  }
  auto made = make();
  std::lock_guard<std::mutex> lock(mu);
  return store.emplace(key, std::move(made)).first->second;
}

/// Cholesky factor with diagonal jitter escalation 1e-12 .. 1e-8 (relative to the mean diagonal).
inline Eigen::MatrixXd robust_cholesky(const Eigen::MatrixXd& cov, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  const double scale = cov.diagonal().mean();
  for (double jitter : {1e-12, 1e-11, 1e-10, 1e-9, 1e-8}) {
    Eigen::MatrixXd c = cov;
    c.diagonal().array() += jitter * scale;
    llt.compute(c);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  const double smallest = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(cov, Eigen::EigenvaluesOnly).eigenvalues()(0);
  throw SamplerError(std::string(what) + ": covariance is not positive definite within the jitter budget "
                     "(smallest eigenvalue " + std::to_string(smallest) + ")");
}

template <class Engine>
Eigen::VectorXd standard_normals(std::size_t n, Engine& eng) {
  std::normal_distribution<double> nd;
  Eigen::VectorXd z(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = nd(eng);
  return z;
}

inline std::size_t cells_up_to(int levels) { return (std::size_t{1} << (levels + 1)) - 2; }

/// Joint factor over the evaluation points and the cells of levels 1..J, for
/// unit variance rate on the unit interval (areas are dilation invariant).
struct JointFactor {
  Eigen::MatrixXd chol;
  Eigen::VectorXd area;
  std::size_t points = 0;
  int cell_levels = 0;
};

inline std::shared_ptr<const JointFactor> joint_factor(const GridSpec& grid, int levels) {
  const std::string key =
      "joint:" + std::to_string(grid.level) + ":" + std::to_string(grid.oversample) + ":" + std::to_string(levels);
  return cached<JointFactor>(key, [&]() {
    const GridSpec g{{0.0, 1.0}, grid.level, grid.oversample};
    const double eps = g.eps();
    const std::size_t k = g.points();
    std::vector<Interval> spans;  // points as degenerate intervals, then cells
    for (std::size_t i = 0; i < k; ++i) spans.push_back({g.point(i), g.point(i)});
    for (int j = 1; j <= levels; ++j)
      for (std::size_t i = 0; i < g.cell_count(j); ++i) spans.push_back(g.cell(j, i));
    const auto d = static_cast<Eigen::Index>(spans.size());
    Eigen::MatrixXd cov(d, d);
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index b = 0; b <= a; ++b) {
        cov(a, b) = cov(b, a) = pair_area(1.0, hull(spans[a], spans[b]).length(), eps);
      }
    }
    auto f = std::make_shared<JointFactor>();
    f->area = cov.diagonal();
    f->chol = robust_cholesky(cov, "joint Gaussian field");
    f->points = k;
    f->cell_levels = levels;
    return std::shared_ptr<const JointFactor>(std::move(f));
  });
}

/// Circulant embedding of the stationary point covariance pair_area(tau) on a
/// ring of size 2K; exact because the covariance reaches 0 at tau = |I|.
struct CirculantFactor {
  std::size_t points = 0;
  std::size_t ring = 0;
  std::vector<double> sqrt_eig;
  double area = 0.0;
  fftw_plan plan = nullptr;
  fftw_complex* scratch = nullptr;

  CirculantFactor() = default;
  CirculantFactor(const CirculantFactor&) = delete;
  CirculantFactor& operator=(const CirculantFactor&) = delete;
  ~CirculantFactor() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (plan) fftw_destroy_plan(plan);
    if (scratch) fftw_free(scratch);
  }

  static std::mutex& planner_mutex() {
    static std::mutex mu;
    return mu;
  }
};

inline std::shared_ptr<const CirculantFactor> circulant_factor(const GridSpec& grid) {
  const std::string key = "circ:" + std::to_string(grid.level) + ":" + std::to_string(grid.oversample);
  return cached<CirculantFactor>(key, [&]() {
    const GridSpec g{{0.0, 1.0}, grid.level, grid.oversample};
    auto f = std::make_shared<CirculantFactor>();
    f->points = g.points();
    f->ring = 2 * f->points;
    f->area = area_trunc_profile(g.base, 0.5, g.eps());
    const int m = static_cast<int>(f->ring);
    {
      std::lock_guard<std::mutex> lock(CirculantFactor::planner_mutex());
      f->scratch = fftw_alloc_complex(f->ring);
      f->plan = fftw_plan_dft_1d(m, f->scratch, f->scratch, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    for (std::size_t j = 0; j < f->ring; ++j) {
      const std::size_t lag = std::min(j, f->ring - j);
      f->scratch[j][0] = pair_area(1.0, static_cast<double>(lag) * g.spacing(), g.eps());
      f->scratch[j][1] = 0.0;
    }
    fftw_execute(f->plan);
    double top = 0.0;
    double bottom = kInf;
    for (std::size_t j = 0; j < f->ring; ++j) {
      top = std::max(top, f->scratch[j][0]);
      bottom = std::min(bottom, f->scratch[j][0]);
    }
    if (bottom < -1e-8 * top)
      throw SamplerError("circulant embedding is not nonnegative definite (smallest eigenvalue " +
                         std::to_string(bottom) + ")");
    f->sqrt_eig.resize(f->ring);
    for (std::size_t j = 0; j < f->ring; ++j)
      f->sqrt_eig[j] = std::sqrt(std::max(0.0, f->scratch[j][0]) / static_cast<double>(f->ring));
    return std::shared_ptr<const CirculantFactor>(std::move(f));
  });
}

template <class Engine>
std::vector<double> circulant_points(const CirculantFactor& f, double variance, Engine& eng) {
  std::normal_distribution<double> nd;
  fftw_complex* buf = fftw_alloc_complex(f.ring);
  for (std::size_t j = 0; j < f.ring; ++j) {
    buf[j][0] = f.sqrt_eig[j] * nd(eng);
    buf[j][1] = f.sqrt_eig[j] * nd(eng);
  }
  fftw_execute_dft(f.plan, buf, buf);
  const double sd = std::sqrt(variance);
  const double mean = -0.5 * variance * f.area;
  std::vector<double> out(f.points);
  for (std::size_t k = 0; k < f.points; ++k) out[k] = mean + sd * buf[k][0];
  fftw_free(buf);
  return out;
}

}  // namespace detail

/// Joint Gaussian vector over arbitrary cone regions with covariance
/// variance * lambda(R_a and R_b) and mean -variance/2 * lambda(R_a). The
/// first `observed` regions can be conditioned on.
class GaussianRegionSampler {
 public:
  explicit GaussianRegionSampler(const std::vector<CoverExpansion>& regions, std::size_t observed = 0)
      : observed_(observed) {
    const auto d = static_cast<Eigen::Index>(regions.size());
    if (observed > regions.size()) throw InvalidArgument("GaussianRegionSampler: more observed than regions");
    Eigen::MatrixXd cov(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b <= a; ++b) cov(a, b) = cov(b, a) = cover::area(cover::product(regions[a], regions[b]));
    area_ = cov.diagonal();
    const auto o = static_cast<Eigen::Index>(observed);
    const Eigen::Index u = d - o;
    if (o == 0) {
      chol_ = detail::robust_cholesky(cov, "Gaussian region field");
      return;
    }
    const Eigen::MatrixXd a = cov.topLeftCorner(o, o);
    const Eigen::MatrixXd b = cov.topRightCorner(o, u);
    const Eigen::MatrixXd obs_chol = detail::robust_cholesky(a, "observed Gaussian block");
    // gain = A^{-1} B, Schur complement C - B^T A^{-1} B.
    const Eigen::MatrixXd half = obs_chol.triangularView<Eigen::Lower>().solve(b);
    gain_ = obs_chol.transpose().triangularView<Eigen::Upper>().solve(half);
    Eigen::MatrixXd schur = cov.bottomRightCorner(u, u) - half.transpose() * half;
    schur = 0.5 * (schur + schur.transpose());
    chol_ = u > 0 ? detail::robust_cholesky(schur, "conditional Gaussian block") : Eigen::MatrixXd(0, 0);
  }

  std::size_t size() const noexcept { return static_cast<std::size_t>(area_.size()); }
  const Eigen::VectorXd& areas() const noexcept { return area_; }

  template <class Engine>
  Eigen::VectorXd sample(double variance, Engine& eng) const {
    if (observed_ != 0) throw InvalidArgument("GaussianRegionSampler: sampler was built for conditioning");
    const Eigen::VectorXd z = detail::standard_normals(area_.size(), eng);
    const Eigen::VectorXd g = chol_.triangularView<Eigen::Lower>() * z;
    return std::sqrt(variance) * g - 0.5 * variance * area_;
  }

  /// Values of the unobserved regions given the observed ones.
  template <class Engine>
  Eigen::VectorXd sample_conditional(const Eigen::VectorXd& observed, double variance, Engine& eng) const {
    const auto o = static_cast<Eigen::Index>(observed_);
    if (observed.size() != o) throw InvalidArgument("GaussianRegionSampler: wrong number of observed values");
    const double sd = std::sqrt(variance);
    const Eigen::VectorXd g_obs = (observed + 0.5 * variance * area_.head(o)) / sd;
    const Eigen::VectorXd z = detail::standard_normals(chol_.rows(), eng);
    Eigen::VectorXd g = chol_.triangularView<Eigen::Lower>() * z;
    g += gain_.transpose() * g_obs;
    return sd * g - 0.5 * variance * area_.tail(area_.size() - o);
  }

 private:
  std::size_t observed_;
  Eigen::VectorXd area_;
  Eigen::MatrixXd chol_;
  Eigen::MatrixXd gain_;
};

/// Joint realization of Lambda over one grid's regions.
struct FieldSample {
  GridSpec grid;
  SamplerKind kind = SamplerKind::gaussian;
  StreamId stream;
  int cell_levels = 0;
  std::vector<double> point_values;              // Lambda(V_eps^I(t_k))
  std::vector<std::vector<double>> cell_values;  // [j][i] = Lambda(V^I(I_i)), j = 0..cell_levels

  // Components, kept for sub-cascades and refinement.
  double gaussian_variance = 0.0;  // per unit lambda-area
  std::vector<double> gaussian_points;
  std::vector<std::vector<double>> gaussian_cells;
  std::vector<JumpPoint> jumps;
  double jump_drift = 0.0;  // per unit lambda-area
  std::shared_ptr<const JumpLaw> law;  // retained jumps; null when none
  int generation = 0;                  // refinements applied so far

  bool has_gaussian() const noexcept { return !gaussian_points.empty(); }

  /// Lambda(V_eps^{I_i}(t_k)) for each point, I_i its level-k cell.
  std::vector<double> sub_cascade_values(int k) const {
    if (k < 0 || k > grid.level) throw InvalidArgument("sub_cascade_values: level exceeds the grid");
    if (has_gaussian() && k > cell_levels)
      throw InvalidArgument("sub_cascade_values: Gaussian cell values were not sampled at this level");
    const std::size_t n = grid.points();
    const std::size_t per_cell = n >> k;
    std::vector<double> out(n, 0.0);
    if (has_gaussian()) {
      for (std::size_t e = 0; e < n; ++e) out[e] = gaussian_points[e] - gaussian_cells[k][e / per_cell];
    }
    if (!jumps.empty()) scatter_jumps(jumps, point_lattice(grid, per_cell), out);
    const Interval sub = grid.cell(k, 0);
    const double area = area_trunc_profile(sub, sub.lo, grid.eps());
    for (double& v : out) v += jump_drift * area;
    return out;
  }
};

namespace detail {

struct Plan {
  SamplerKind kind;
  double gaussian_variance = 0.0;
  std::optional<JumpLaw> law;
  int cell_levels = 0;
  bool circulant = false;
};

inline Plan plan_sampler(const LevyModel& model, const GridSpec& grid, const SamplerOptions& opt) {
  grid.validate();
  Plan p;
  const bool has_nu = !model.nu().is_zero();
  p.kind = opt.kind.value_or(model.sigma2() > 0.0 ? (has_nu ? SamplerKind::hybrid : SamplerKind::gaussian)
                                                  : SamplerKind::poisson);
  switch (p.kind) {
    case SamplerKind::gaussian:
      if (!(model.sigma2() > 0.0)) throw InvalidArgument("gaussian sampler needs sigma2 > 0");
      p.gaussian_variance = model.sigma2();
      break;
    case SamplerKind::poisson:
      if (!has_nu) throw InvalidArgument("poisson sampler needs a nonzero Levy measure");
      if (!model.nu().finite_mass()) throw InvalidArgument("poisson sampler needs finite total mass; use hybrid");
      p.law.emplace(model.nu(), 0.0);
      break;
    case SamplerKind::hybrid: {
      const double delta = opt.small_jump_cutoff;
      if (!(delta >= 0.0 && delta <= 1.0)) throw InvalidArgument("hybrid sampler: small_jump_cutoff must be in [0, 1]");
      p.law.emplace(model.nu(), delta);
      p.gaussian_variance = model.sigma2();
      if (opt.small_jumps == SmallJumpMode::gaussian) p.gaussian_variance += p.law->small_variance();
      break;
    }
  }
  if (p.law && p.law->mass() <= 0.0) p.law.reset();

  const std::size_t k = grid.points();
  const bool gaussian = p.gaussian_variance > 0.0;
  if (opt.cell_levels) {
    if (*opt.cell_levels < 0 || *opt.cell_levels > grid.level)
      throw InvalidArgument("cell_levels must be in [0, grid level]");
    p.cell_levels = *opt.cell_levels;
  } else if (!gaussian || opt.gaussian_method == GaussianMethod::joint ||
             (opt.gaussian_method == GaussianMethod::automatic && k + cells_up_to(grid.level) <= opt.max_joint_dim)) {
    p.cell_levels = grid.level;
  }
  if (gaussian) {
    p.circulant = opt.gaussian_method == GaussianMethod::circulant ||
                  (opt.gaussian_method == GaussianMethod::automatic && p.cell_levels == 0 &&
                   k + cells_up_to(0) > opt.max_joint_dim);
    if (p.circulant && p.cell_levels > 0)
      throw InvalidArgument("circulant Gaussian sampling covers points only; set cell_levels = 0 or use joint");
  }
  return p;
}

inline void evaluate_jumps(FieldSample& f) {
  const GridSpec& g = f.grid;
  const double eps = g.eps();
  std::vector<double> pts(g.points(), 0.0);
  scatter_jumps(f.jumps, point_lattice(g, g.points()), pts);
  const double profile = area_trunc_profile(g.base, g.base.lo, eps);
  for (std::size_t e = 0; e < pts.size(); ++e) f.point_values[e] += pts[e] + f.jump_drift * profile;
  for (int j = 1; j <= f.cell_levels; ++j) {
    std::vector<double> cells(g.cell_count(j), 0.0);
    scatter_jumps(f.jumps, cell_lattice(g, j), cells);
    const double area = j * std::log(2.0);
    for (std::size_t i = 0; i < cells.size(); ++i) f.cell_values[j][i] += cells[i] + f.jump_drift * area;
  }
}

}  // namespace detail

/// Samples every region value the grid needs, per the options.
inline FieldSample sample_field(const LevyModel& model, const GridSpec& grid, const StreamId& stream,
                                const SamplerOptions& opt = {}) {
  const detail::Plan plan = detail::plan_sampler(model, grid, opt);
  FieldSample f;
  f.grid = grid;
  f.kind = plan.kind;
  f.stream = stream;
  f.cell_levels = plan.cell_levels;
  const std::size_t k = grid.points();
  f.point_values.assign(k, 0.0);
  f.cell_values.resize(plan.cell_levels + 1);
  for (int j = 0; j <= plan.cell_levels; ++j) f.cell_values[j].assign(grid.cell_count(j), 0.0);

  if (plan.gaussian_variance > 0.0) {
    auto eng = stream.engine(0);
    f.gaussian_variance = plan.gaussian_variance;
    f.gaussian_cells.resize(plan.cell_levels + 1);
    f.gaussian_cells[0].assign(1, 0.0);
    if (plan.circulant) {
      f.gaussian_points = detail::circulant_points(*detail::circulant_factor(grid), plan.gaussian_variance, eng);
    } else {
      const auto factor = detail::joint_factor(grid, plan.cell_levels);
      const Eigen::VectorXd z = detail::standard_normals(factor->area.size(), eng);
      const Eigen::VectorXd g = factor->chol.triangularView<Eigen::Lower>() * z;
      const Eigen::VectorXd x = std::sqrt(plan.gaussian_variance) * g - 0.5 * plan.gaussian_variance * factor->area;
      f.gaussian_points.assign(x.data(), x.data() + k);
      std::size_t at = k;
      for (int j = 1; j <= plan.cell_levels; ++j) {
        f.gaussian_cells[j].assign(x.data() + at, x.data() + at + grid.cell_count(j));
        at += grid.cell_count(j);
      }
    }
    f.point_values = f.gaussian_points;
    for (int j = 1; j <= plan.cell_levels; ++j) f.cell_values[j] = f.gaussian_cells[j];
  }

  if (plan.law) {
    auto eng = stream.engine(1);
    f.law = std::make_shared<const JumpLaw>(*plan.law);
    f.jump_drift = plan.law->drift();
    f.jumps = sample_jump_points(sampling_domain(grid.base, grid.eps()), *plan.law, eng);
    detail::evaluate_jumps(f);
  } else if (plan.kind != SamplerKind::gaussian) {
    // Every jump fell below the cutoff: the compensating drift is exactly zero.
    f.jump_drift = 0.0;
  }
  return f;
}

inline FieldSample sample_gaussian_field(const GridSpec& grid, const LevyModel& model, const StreamId& stream,
                                         SamplerOptions opt = {}) {
  opt.kind = SamplerKind::gaussian;
  return sample_field(model, grid, stream, opt);
}

inline FieldSample sample_poisson_field(const GridSpec& grid, const LevyModel& model, const StreamId& stream,
                                        SamplerOptions opt = {}) {
  opt.kind = SamplerKind::poisson;
  return sample_field(model, grid, stream, opt);
}

inline FieldSample sample_hybrid_field(const GridSpec& grid, const LevyModel& model, const StreamId& stream,
                                       double small_jump_cutoff, SamplerOptions opt = {}) {
  opt.kind = SamplerKind::hybrid;
  opt.small_jump_cutoff = small_jump_cutoff;
  return sample_field(model, grid, stream, opt);
}

/// Raw dump of a point process: (x, y, jump) triples as little-endian doubles.
inline void write_point_process(std::ostream& os, std::span<const JumpPoint> pts) {
  const auto put = [&](double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    char buf[8];
    std::memcpy(buf, &bits, sizeof buf);
    os.write(buf, sizeof buf);
  };
  for (const auto& p : pts) {
    put(p.l + 0.5 * p.y);
    put(p.y);
    put(p.jump);
  }
}

}  // namespace lidc

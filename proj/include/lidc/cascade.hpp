#pragma once

// Realizations of mu_eps^I on dyadic grids: the density e^{Lambda(V_eps^I(t))}/|I|
// integrated by the midpoint rule, its martingale refinement, the star
// decomposition over dyadic cells, juxtaposed copies sharing one field, and
// direct draws of the scale factor Omega_lambda.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "lidc/field_sampler.hpp"

namespace lidc {

struct Realization {
  GridSpec grid;
  SamplerKind kind = SamplerKind::gaussian;
  StreamId stream;
  std::uint64_t model_hash = 0;
  std::vector<double> cell_masses;           // mu_eps(I_i) at the finest level
  std::vector<std::vector<double>> weights;  // [j][i] = e^{Lambda(V^I(I_i))}, j = 0..cell_levels
  double total_mass = 0.0;
  FieldSample field;
};

namespace detail {

/// (1/K) sum of e^{x} over each run of `per` consecutive points.
inline std::vector<double> block_masses(const std::vector<double>& values, std::size_t per) {
  const double k = static_cast<double>(values.size());
  std::vector<double> out(values.size() / per);
  std::vector<double> buf(per);
  for (std::size_t c = 0; c < out.size(); ++c) {
    for (std::size_t e = 0; e < per; ++e) buf[e] = std::exp(values[c * per + e]);
    out[c] = pairwise_sum(buf) / k;
  }
  return out;
}

inline Realization realize(FieldSample field, std::uint64_t model_hash) {
  Realization r;
  r.grid = field.grid;
  r.kind = field.kind;
  r.stream = field.stream;
  r.model_hash = model_hash;
  r.cell_masses = block_masses(field.point_values, static_cast<std::size_t>(field.grid.oversample));
  r.total_mass = pairwise_sum(r.cell_masses);
  r.weights.resize(field.cell_values.size());
  for (std::size_t j = 0; j < field.cell_values.size(); ++j) {
    r.weights[j].resize(field.cell_values[j].size());
    for (std::size_t i = 0; i < r.weights[j].size(); ++i) r.weights[j][i] = std::exp(field.cell_values[j][i]);
  }
  r.field = std::move(field);
  return r;
}

inline void check_dim(std::size_t dim, const char* what) {
  if (dim > 4096)
    throw SamplerError(std::string(what) + ": joint Gaussian dimension " + std::to_string(dim) +
                       " exceeds 4096; use a coarser grid or a jump sampler");
}

inline std::vector<CoverExpansion> point_regions(const GridSpec& g, double eps) {
  std::vector<CoverExpansion> out;
  for (std::size_t k = 0; k < g.points(); ++k) out.push_back(ConeRegion::trunc_cone(g.base, g.point(k), eps).expansion());
  return out;
}

inline void append_cell_regions(const GridSpec& g, int from, int to, std::vector<CoverExpansion>& out) {
  for (int j = from; j <= to; ++j)
    for (std::size_t i = 0; i < g.cell_count(j); ++i)
      out.push_back(ConeRegion::cone_of_interval(g.base, g.cell(j, i)).expansion());
}

}  // namespace detail

/// Samples the field and integrates the density over each finest cell.
inline Realization build_realization(const LevyModel& model, const GridSpec& grid, const StreamId& stream,
                                     const SamplerOptions& opt = {}) {
  return detail::realize(sample_field(model, grid, stream, opt), model.hash());
}

/// Extends the same Lambda to eps' = eps 2^-extra: the Gaussian part is drawn
/// conditionally on the old values, the jump part gains the points of the new
/// strip eps' <= y < eps. Cell levels extend with the grid when all were present.
inline Realization refine(const Realization& r, int extra_levels) {
  if (extra_levels < 0) throw InvalidArgument("refine: extra_levels must be >= 0");
  if (extra_levels == 0) return r;
  const FieldSample& old = r.field;
  const GridSpec g_old = old.grid;
  const GridSpec g_new = GridSpec::make(g_old.base, g_old.level + extra_levels, g_old.oversample);
  const int levels = old.cell_levels == g_old.level ? g_new.level : old.cell_levels;

  FieldSample f;
  f.grid = g_new;
  f.kind = old.kind;
  f.stream = old.stream;
  f.cell_levels = levels;
  f.generation = old.generation + 1;
  f.law = old.law;
  f.jump_drift = old.jump_drift;
  f.gaussian_variance = old.gaussian_variance;
  f.point_values.assign(g_new.points(), 0.0);
  f.cell_values.resize(levels + 1);
  for (int j = 0; j <= levels; ++j) f.cell_values[j].assign(g_new.cell_count(j), 0.0);

  const std::uint64_t sub = 2 * static_cast<std::uint64_t>(f.generation);
  if (old.has_gaussian()) {
    const GridSpec unit_old{{0.0, 1.0}, g_old.level, g_old.oversample};
    const GridSpec unit_new{{0.0, 1.0}, g_new.level, g_new.oversample};
    const std::size_t observed = old.gaussian_points.size() + detail::cells_up_to(old.cell_levels);
    const std::size_t unobserved = g_new.points() + (detail::cells_up_to(levels) - detail::cells_up_to(old.cell_levels));
    detail::check_dim(observed + unobserved, "refine");
    const std::string key = "refine:" + std::to_string(g_old.level) + ":" + std::to_string(g_old.oversample) + ":" +
                            std::to_string(old.cell_levels) + ":" + std::to_string(extra_levels);
    const auto sampler = detail::cached<GaussianRegionSampler>(key, [&]() {
      auto regions = detail::point_regions(unit_old, unit_old.eps());
      detail::append_cell_regions(unit_old, 1, old.cell_levels, regions);
      auto fresh = detail::point_regions(unit_new, unit_new.eps());
      regions.insert(regions.end(), fresh.begin(), fresh.end());
      detail::append_cell_regions(unit_new, old.cell_levels + 1, levels, regions);
      return std::make_shared<const GaussianRegionSampler>(regions, observed);
    });
    Eigen::VectorXd obs(static_cast<Eigen::Index>(observed));
    Eigen::Index at = 0;
    for (double v : old.gaussian_points) obs(at++) = v;
    for (int j = 1; j <= old.cell_levels; ++j)
      for (double v : old.gaussian_cells[j]) obs(at++) = v;
    auto eng = old.stream.engine(sub);
    const Eigen::VectorXd x = sampler->sample_conditional(obs, old.gaussian_variance, eng);
    f.gaussian_points.assign(x.data(), x.data() + g_new.points());
    f.gaussian_cells = old.gaussian_cells;
    f.gaussian_cells.resize(levels + 1);
    at = static_cast<Eigen::Index>(g_new.points());
    for (int j = old.cell_levels + 1; j <= levels; ++j) {
      f.gaussian_cells[j].assign(x.data() + at, x.data() + at + g_new.cell_count(j));
      at += static_cast<Eigen::Index>(g_new.cell_count(j));
    }
    f.point_values = f.gaussian_points;
    for (int j = 1; j <= levels; ++j) f.cell_values[j] = f.gaussian_cells[j];
  }
  if (old.law) {
    auto eng = old.stream.engine(sub + 1);
    f.jumps = old.jumps;
    const auto band = sampling_band(g_new.base, g_new.eps(), g_old.eps());
    for (const auto& p : sample_jump_points(band, *old.law, eng)) f.jumps.push_back(p);
    detail::evaluate_jumps(f);
  }
  return detail::realize(std::move(f), r.model_hash);
}

struct StarDecomposition {
  int level = 0;
  std::vector<double> weights;     // W_i = e^{Lambda(V^I(I_i))}
  std::vector<double> sub_masses;  // Z_i, unit-mean copies of Z
  double total_mass = 0.0;
  double residual = 0.0;  // (Z - 2^-k sum W_i Z_i) / Z
};

/// Z = 2^-k sum_i W_i Z_i with Z_i the total mass of the sub-cascade on I_i rescaled to unit mean.
inline StarDecomposition decompose_star(const Realization& r, int k) {
  if (k < 0 || k > r.grid.level) throw InvalidArgument("decompose_star: level exceeds the grid");
  if (k > r.field.cell_levels)
    throw InvalidArgument("decompose_star: cell values at level " + std::to_string(k) +
                          " were not sampled; raise cell_levels");
  StarDecomposition s;
  s.level = k;
  s.weights = r.weights[k];
  const auto values = r.field.sub_cascade_values(k);
  const std::size_t per = values.size() >> k;
  s.sub_masses = detail::block_masses(values, per);
  const double scale = std::ldexp(1.0, k);
  std::vector<double> terms(s.weights.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    s.sub_masses[i] *= scale;
    terms[i] = s.weights[i] * s.sub_masses[i];
  }
  s.total_mass = r.total_mass;
  s.residual = (r.total_mass - pairwise_sum(terms) / scale) / r.total_mass;
  return s;
}

/// Realizations on [0,1], [1,2], ..., [n-1,n] built from one shared Lambda.
/// The grid's base interval is ignored; each copy uses its own unit interval.
inline std::vector<Realization> juxtapose(const LevyModel& model, int n_intervals, const GridSpec& grid,
                                          const StreamId& stream, SamplerOptions opt = {}) {
  if (n_intervals < 1) throw InvalidArgument("juxtapose: n_intervals must be >= 1");
  const auto count = static_cast<std::size_t>(n_intervals);
  const GridSpec unit = GridSpec::make({0.0, 1.0}, grid.level, grid.oversample);
  const detail::Plan plan = detail::plan_sampler(model, unit, opt);
  const bool gaussian = plan.gaussian_variance > 0.0;
  const int levels = gaussian ? 0 : plan.cell_levels;
  const std::size_t k = unit.points();
  const double eps = unit.eps();

  std::vector<FieldSample> fields(count);
  for (std::size_t j = 0; j < count; ++j) {
    FieldSample& f = fields[j];
    f.grid = GridSpec::make({static_cast<double>(j), static_cast<double>(j + 1)}, grid.level, grid.oversample);
    f.kind = plan.kind;
    f.stream = stream;
    f.cell_levels = levels;
    f.point_values.assign(k, 0.0);
    f.cell_values.resize(levels + 1);
    for (int l = 0; l <= levels; ++l) f.cell_values[l].assign(unit.cell_count(l), 0.0);
  }

  if (gaussian) {
    detail::check_dim(count * k, "juxtapose");
    const std::string key = "jux:" + std::to_string(grid.level) + ":" + std::to_string(grid.oversample) + ":" +
                            std::to_string(n_intervals);
    const auto sampler = detail::cached<GaussianRegionSampler>(key, [&]() {
      std::vector<CoverExpansion> regions;
      for (const auto& f : fields) {
        auto r = detail::point_regions(f.grid, eps);
        regions.insert(regions.end(), r.begin(), r.end());
      }
      return std::make_shared<const GaussianRegionSampler>(regions);
    });
    auto eng = stream.engine(0);
    const Eigen::VectorXd x = sampler->sample(plan.gaussian_variance, eng);
    for (std::size_t j = 0; j < count; ++j) {
      FieldSample& f = fields[j];
      f.gaussian_variance = plan.gaussian_variance;
      f.gaussian_points.assign(x.data() + j * k, x.data() + (j + 1) * k);
      f.gaussian_cells.assign(1, std::vector<double>(1, 0.0));
      f.point_values = f.gaussian_points;
    }
  }

  if (plan.law) {
    auto eng = stream.engine(1);
    const Interval whole{0.0, static_cast<double>(n_intervals)};
    const auto jumps = sample_jump_points(sampling_domain(whole, eps), *plan.law, eng);
    const auto law = std::make_shared<const JumpLaw>(*plan.law);
    const double profile = area_trunc_profile(unit.base, 0.5, eps);
    std::vector<double> pts(count * k, 0.0);
    scatter_jumps(jumps, {0.0, unit.spacing(), 0.5 * unit.spacing(), 0.0, count * k, k}, pts);
    std::vector<std::vector<double>> cells(levels + 1);
    for (int l = 1; l <= levels; ++l) {
      const std::size_t per = unit.cell_count(l);
      const double w = std::ldexp(1.0, -l);
      cells[l].assign(count * per, 0.0);
      scatter_jumps(jumps, {0.0, w, 0.0, w, count * per, per}, cells[l]);
    }
    for (std::size_t j = 0; j < count; ++j) {
      FieldSample& f = fields[j];
      f.law = law;
      f.jump_drift = plan.law->drift();
      f.jumps = jumps;
      for (std::size_t e = 0; e < k; ++e) f.point_values[e] += pts[j * k + e] + f.jump_drift * profile;
      for (int l = 1; l <= levels; ++l) {
        const std::size_t per = unit.cell_count(l);
        for (std::size_t i = 0; i < per; ++i) f.cell_values[l][i] += cells[l][j * per + i] + f.jump_drift * l * std::log(2.0);
      }
    }
  }

  std::vector<Realization> out;
  out.reserve(count);
  for (auto& f : fields) out.push_back(detail::realize(std::move(f), model.hash()));
  return out;
}

/// Omega_lambda = Lambda(V^{[0,1]}([0,lambda])), infinitely divisible with lambda-area log(1/lambda).
template <class Engine>
double sample_omega(const LevyModel& model, double lambda_ratio, Engine& gauss, Engine& jumps) {
  if (!(lambda_ratio > 0.0 && lambda_ratio <= 1.0)) throw InvalidArgument("sample_omega: lambda_ratio must be in (0, 1]");
  const double area = -std::log(lambda_ratio);
  if (area == 0.0) return 0.0;
  double omega = 0.0;
  if (model.sigma2() > 0.0) {
    std::normal_distribution<double> nd(-0.5 * model.sigma2() * area, std::sqrt(model.sigma2() * area));
    omega += nd(gauss);
  }
  if (!model.nu().is_zero()) {
    const JumpLaw law(model.nu(), 0.0);
    std::poisson_distribution<long long> count(law.mass() * area);
    const long long n = count(jumps);
    for (long long i = 0; i < n; ++i) omega += law.sample(jumps);
    omega += law.drift() * area;
  }
  return omega;
}

inline double sample_omega(const LevyModel& model, double lambda_ratio, const StreamId& stream) {
  auto g = stream.engine(0);
  auto j = stream.engine(1);
  return sample_omega(model, lambda_ratio, g, j);
}

/// mu([0, lambda]) for dyadic lambda = 2^-k, as the mass of the first 2^{n-k} finest cells.
inline double dyadic_prefix_mass(const Realization& r, int k) {
  if (k < 0 || k > r.grid.level) throw InvalidArgument("dyadic_prefix_mass: k must be in [0, n]");
  const std::size_t cells = r.cell_masses.size() >> k;
  return pairwise_sum(std::span<const double>(r.cell_masses.data(), cells));
}

inline void write_realization_csv(std::ostream& os, const Realization& r) {
  os << "cell,mass\n";
  char buf[64];
  for (std::size_t i = 0; i < r.cell_masses.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, r.cell_masses[i]);
    os << buf;
  }
}

namespace detail {

template <class T>
void put_le(std::ostream& os, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

}  // namespace detail

/// Header: level n (u32), oversample m (u32), model hash (u64); payload: 2^n f64 cell masses. Little-endian.
inline void write_realization_binary(std::ostream& os, const Realization& r) {
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(r.grid.level));
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(r.grid.oversample));
  detail::put_le<std::uint64_t>(os, r.model_hash);
  for (double m : r.cell_masses) detail::put_le<double>(os, m);
}

}  // namespace lidc

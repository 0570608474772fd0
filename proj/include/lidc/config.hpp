#pragma once

// Run configuration: a sectioned key-value file with [model], [grid],
// [experiment] and [output] blocks. Serialization is canonical (fixed key
// order, shortest round-trip floats), so parse -> serialize is a fixpoint.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lidc/field_sampler.hpp"
#include "lidc/levy_model.hpp"

namespace lidc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelBlock {
  double sigma2 = 0.5;
  std::string nu = "zero";  // zero | atoms | density
  std::vector<Atom> atoms;
  std::vector<double> density_x;
  std::vector<double> density_values;
  std::optional<double> left_tail_rate;
  std::optional<double> right_tail_rate;
};

struct GridBlock {
  int levels = 8;
  int oversample = 4;
  std::string sampler = "auto";          // auto | gaussian | poisson | hybrid
  std::string gaussian_method = "auto";  // auto | joint | circulant
  double small_jump_cutoff = 0.0;
  std::string small_jumps = "drift";  // drift | gaussian
};

struct ExperimentBlock {
  std::uint64_t replicas = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  // estimate
  std::string analysis = "moments";  // moments | scaling | tail | covariance | growth | negative
  std::vector<double> q{1.0, 2.0};
  std::vector<int> lambda_levels{0, 1, 2, 3, 4};
  std::vector<int> lags{2, 4, 8};
  int max_n = 6;
  double plateau_quantile = 0.99;
  // verify
  std::vector<std::string> checks{"normalization", "areas", "star", "scaling"};
  int area_regions = 200;
  double area_tolerance = 1e-8;
  std::vector<int> star_levels{1, 2, 3};
  double star_tolerance = 1e-10;
  std::vector<int> scaling_levels{1, 2};
  double ks_alpha = 0.01;
};

struct OutputBlock {
  std::string directory = "out";
  std::string format = "both";  // csv | json | both
  bool realizations = true;
};

struct RunConfig {
  ModelBlock model;
  GridBlock grid;
  ExperimentBlock experiment;
  OutputBlock output;
};

namespace config_detail {

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

template <class T>
T parse_number(const std::string& field, const std::string& text) {
  const std::string s = trim(text);
  T v{};
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc{} || r.ptr != s.data() + s.size())
    throw ConfigError(field + ": cannot parse '" + text + "' as a number");
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(v)) throw ConfigError(field + ": value must be finite");
  }
  return v;
}

template <class T>
std::vector<T> parse_list(const std::string& field, const std::string& text) {
  std::vector<T> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_number<T>(field, item));
  return out;
}

inline bool parse_bool(const std::string& field, const std::string& text) {
  const std::string s = trim(text);
  if (s == "true") return true;
  if (s == "false") return false;
  throw ConfigError(field + ": expected true or false, got '" + text + "'");
}

inline std::string parse_choice(const std::string& field, const std::string& text,
                                std::initializer_list<const char*> allowed) {
  const std::string s = trim(text);
  std::string list;
  for (const char* a : allowed) {
    if (s == a) return s;
    list += list.empty() ? a : std::string(" | ") + a;
  }
  throw ConfigError(field + ": '" + text + "' is not one of " + list);
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    if constexpr (std::is_floating_point_v<T>)
      s += format_double(v[i]);
    else if constexpr (std::is_same_v<T, std::string>)
      s += v[i];
    else
      s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace config_detail

/// Semantic checks beyond syntax; messages name the offending field.
inline void validate(const RunConfig& c) {
  const auto& m = c.model;
  if (!(m.sigma2 >= 0.0)) throw ConfigError("model.sigma2: must be >= 0");
  if (m.nu != "atoms" && !m.atoms.empty()) throw ConfigError("model.nu_atoms: given but model.nu is not 'atoms'");
  if (m.nu == "atoms" && m.atoms.empty()) throw ConfigError("model.nu_atoms: at least one atom required");
  if (m.nu != "density" && (!m.density_x.empty() || !m.density_values.empty() || m.left_tail_rate || m.right_tail_rate))
    throw ConfigError("model.nu_density_*: given but model.nu is not 'density'");
  if (m.nu == "density" && m.density_x.size() != m.density_values.size())
    throw ConfigError("model.nu_density_values: length must match model.nu_density_x");
  if (c.grid.levels < 1 || c.grid.levels > 24) throw ConfigError("grid.levels: must be in [1, 24]");
  if (c.grid.oversample < 1 || c.grid.oversample > 1024) throw ConfigError("grid.oversample: must be in [1, 1024]");
  if (!(c.grid.small_jump_cutoff >= 0.0 && c.grid.small_jump_cutoff <= 1.0))
    throw ConfigError("grid.small_jump_cutoff: must be in [0, 1]");
  if (c.experiment.replicas < 1) throw ConfigError("experiment.replicas: must be >= 1");
  if (c.experiment.max_n < 2 || c.experiment.max_n > 8) throw ConfigError("experiment.max_n: must be in [2, 8]");
  if (!(c.experiment.plateau_quantile > 0.0 && c.experiment.plateau_quantile < 1.0))
    throw ConfigError("experiment.plateau_quantile: must be in (0, 1)");
  if (c.experiment.area_regions < 0) throw ConfigError("experiment.area_regions: must be >= 0");
  if (!(c.experiment.ks_alpha > 0.0 && c.experiment.ks_alpha < 1.0))
    throw ConfigError("experiment.ks_alpha: must be in (0, 1)");
  for (const auto& name : c.experiment.checks)
    config_detail::parse_choice("experiment.checks", name, {"normalization", "areas", "star", "scaling"});
  for (int k : c.experiment.star_levels)
    if (k < 0 || k > c.grid.levels) throw ConfigError("experiment.star_levels: levels must be in [0, grid.levels]");
  for (int k : c.experiment.scaling_levels)
    if (k < 1 || k >= c.grid.levels) throw ConfigError("experiment.scaling_levels: levels must be in [1, grid.levels)");
  for (int k : c.experiment.lambda_levels)
    if (k < 0 || k > c.grid.levels) throw ConfigError("experiment.lambda_levels: levels must be in [0, grid.levels]");
  for (int l : c.experiment.lags)
    if (l < 1) throw ConfigError("experiment.lags: lags must be >= 1");
  if (c.output.directory.empty()) throw ConfigError("output.directory: must not be empty");
}

inline RunConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  using namespace config_detail;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config syntax: " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  RunConfig c;
  const std::set<std::string> sections{"model", "grid", "experiment", "output"};
  for (const auto& [name, section] : tree) {
    if (!sections.count(name)) throw ConfigError(name + ": unknown section or key outside a section");
    for (const auto& [key, value] : section) {
      const std::string field = name + "." + key;
      const std::string v = value.get_value<std::string>();
      if (name == "model") {
        auto& m = c.model;
        if (key == "sigma2") m.sigma2 = parse_number<double>(field, v);
        else if (key == "nu") m.nu = parse_choice(field, v, {"zero", "atoms", "density"});
        else if (key == "nu_atoms") {
          m.atoms.clear();
          for (const auto& pair : split(v, ',')) {
            const auto parts = split(pair, ':');
            if (parts.size() != 2) throw ConfigError(field + ": expected location:mass pairs, got '" + pair + "'");
            m.atoms.push_back({parse_number<double>(field, parts[0]), parse_number<double>(field, parts[1])});
          }
        } else if (key == "nu_density_x") m.density_x = parse_list<double>(field, v);
        else if (key == "nu_density_values") m.density_values = parse_list<double>(field, v);
        else if (key == "nu_left_tail_rate") m.left_tail_rate = parse_number<double>(field, v);
        else if (key == "nu_right_tail_rate") m.right_tail_rate = parse_number<double>(field, v);
        else throw ConfigError(field + ": unknown key");
      } else if (name == "grid") {
        auto& g = c.grid;
        if (key == "levels") g.levels = parse_number<int>(field, v);
        else if (key == "oversample") g.oversample = parse_number<int>(field, v);
        else if (key == "sampler") g.sampler = parse_choice(field, v, {"auto", "gaussian", "poisson", "hybrid"});
        else if (key == "gaussian_method") g.gaussian_method = parse_choice(field, v, {"auto", "joint", "circulant"});
        else if (key == "small_jump_cutoff") g.small_jump_cutoff = parse_number<double>(field, v);
        else if (key == "small_jumps") g.small_jumps = parse_choice(field, v, {"drift", "gaussian"});
        else throw ConfigError(field + ": unknown key");
      } else if (name == "experiment") {
        auto& e = c.experiment;
        if (key == "replicas") e.replicas = parse_number<std::uint64_t>(field, v);
        else if (key == "seed") e.seed = parse_number<std::uint64_t>(field, v);
        else if (key == "threads") e.threads = parse_number<unsigned>(field, v);
        else if (key == "analysis")
          e.analysis = parse_choice(field, v, {"moments", "scaling", "tail", "covariance", "growth", "negative"});
        else if (key == "q") e.q = parse_list<double>(field, v);
        else if (key == "lambda_levels") e.lambda_levels = parse_list<int>(field, v);
        else if (key == "lags") e.lags = parse_list<int>(field, v);
        else if (key == "max_n") e.max_n = parse_number<int>(field, v);
        else if (key == "plateau_quantile") e.plateau_quantile = parse_number<double>(field, v);
        else if (key == "checks") e.checks = split(v, ',');
        else if (key == "area_regions") e.area_regions = parse_number<int>(field, v);
        else if (key == "area_tolerance") e.area_tolerance = parse_number<double>(field, v);
        else if (key == "star_levels") e.star_levels = parse_list<int>(field, v);
        else if (key == "star_tolerance") e.star_tolerance = parse_number<double>(field, v);
        else if (key == "scaling_levels") e.scaling_levels = parse_list<int>(field, v);
        else if (key == "ks_alpha") e.ks_alpha = parse_number<double>(field, v);
        else throw ConfigError(field + ": unknown key");
      } else {
        auto& o = c.output;
        if (key == "directory") o.directory = trim(v);
        else if (key == "format") o.format = parse_choice(field, v, {"csv", "json", "both"});
        else if (key == "realizations") o.realizations = parse_bool(field, v);
        else throw ConfigError(field + ": unknown key");
      }
    }
  }
  validate(c);
  return c;
}

inline RunConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  return parse_config(in);
}

inline std::string serialize(const RunConfig& c) {
  using namespace config_detail;
  std::ostringstream o;
  const auto& m = c.model;
  o << "[model]\n";
  o << "sigma2 = " << format_double(m.sigma2) << "\n";
  o << "nu = " << m.nu << "\n";
  if (m.nu == "atoms") {
    o << "nu_atoms = ";
    for (std::size_t i = 0; i < m.atoms.size(); ++i)
      o << (i ? ", " : "") << format_double(m.atoms[i].location) << ":" << format_double(m.atoms[i].mass);
    o << "\n";
  }
  if (m.nu == "density") {
    o << "nu_density_x = " << join(m.density_x) << "\n";
    o << "nu_density_values = " << join(m.density_values) << "\n";
    if (m.left_tail_rate) o << "nu_left_tail_rate = " << format_double(*m.left_tail_rate) << "\n";
    if (m.right_tail_rate) o << "nu_right_tail_rate = " << format_double(*m.right_tail_rate) << "\n";
  }
  const auto& g = c.grid;
  o << "\n[grid]\n";
  o << "levels = " << g.levels << "\n";
  o << "oversample = " << g.oversample << "\n";
  o << "sampler = " << g.sampler << "\n";
  o << "gaussian_method = " << g.gaussian_method << "\n";
  o << "small_jump_cutoff = " << format_double(g.small_jump_cutoff) << "\n";
  o << "small_jumps = " << g.small_jumps << "\n";
  const auto& e = c.experiment;
  o << "\n[experiment]\n";
  o << "replicas = " << e.replicas << "\n";
  o << "seed = " << e.seed << "\n";
  o << "threads = " << e.threads << "\n";
  o << "analysis = " << e.analysis << "\n";
  o << "q = " << join(e.q) << "\n";
  o << "lambda_levels = " << join(e.lambda_levels) << "\n";
  o << "lags = " << join(e.lags) << "\n";
  o << "max_n = " << e.max_n << "\n";
  o << "plateau_quantile = " << format_double(e.plateau_quantile) << "\n";
  o << "checks = " << join(e.checks) << "\n";
  o << "area_regions = " << e.area_regions << "\n";
  o << "area_tolerance = " << format_double(e.area_tolerance) << "\n";
  o << "star_levels = " << join(e.star_levels) << "\n";
  o << "star_tolerance = " << format_double(e.star_tolerance) << "\n";
  o << "scaling_levels = " << join(e.scaling_levels) << "\n";
  o << "ks_alpha = " << format_double(e.ks_alpha) << "\n";
  o << "\n[output]\n";
  o << "directory = " << c.output.directory << "\n";
  o << "format = " << c.output.format << "\n";
  o << "realizations = " << (c.output.realizations ? "true" : "false") << "\n";
  return o.str();
}

/// FNV-1a of the canonical serialization, as 16 hex digits. Settings that do
/// not affect results (thread count, output block) are left out.
inline std::string config_hash(const RunConfig& c) {
  RunConfig key = c;
  key.experiment.threads = 0;
  key.output = OutputBlock{};
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(detail::fnv1a(serialize(key))));
  return buf;
}

inline LevyModel make_model(const RunConfig& c) {
  const auto& m = c.model;
  NuSpec nu;
  try {
    if (m.nu == "atoms") {
      nu = NuSpec::atoms(m.atoms);
    } else if (m.nu == "density") {
      nu = NuSpec::density({m.density_x, m.density_values, m.left_tail_rate, m.right_tail_rate});
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("model.") + e.what());
  }
  try {
    return LevyModel(m.sigma2, std::move(nu));
  } catch (const std::exception& e) {
    const std::string what = e.what();
    throw ConfigError(what.rfind("model", 0) == 0 ? what : "model: " + what);
  }
}

inline GridSpec make_grid(const RunConfig& c) {
  return GridSpec::make({0.0, 1.0}, c.grid.levels, c.grid.oversample);
}

inline SamplerOptions make_sampler_options(const RunConfig& c) {
  SamplerOptions o;
  if (c.grid.sampler == "gaussian") o.kind = SamplerKind::gaussian;
  if (c.grid.sampler == "poisson") o.kind = SamplerKind::poisson;
  if (c.grid.sampler == "hybrid") o.kind = SamplerKind::hybrid;
  if (c.grid.gaussian_method == "joint") o.gaussian_method = GaussianMethod::joint;
  if (c.grid.gaussian_method == "circulant") o.gaussian_method = GaussianMethod::circulant;
  o.small_jump_cutoff = c.grid.small_jump_cutoff;
  o.small_jumps = c.grid.small_jumps == "gaussian" ? SmallJumpMode::gaussian : SmallJumpMode::drift;
  return o;
}

}  // namespace lidc

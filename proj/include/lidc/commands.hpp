#pragma once

// Subcommands behind the lidc tool: theory, simulate, verify, estimate.
// Exit codes: 0 success, 1 check failure, 2 config error, 3 runtime or sampler error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "json.hpp"
#include "lidc/config.hpp"
#include "lidc/moment_analysis.hpp"
#include "lidc/verify.hpp"

namespace lidc {

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitConfig = 2, kExitRuntime = 3 };

namespace cmd_detail {

namespace fs = std::filesystem;
using nlohmann::json;

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Output {
 public:
  explicit Output(const RunConfig& c) : cfg_(c), hash_(config_hash(c)), dir_(c.output.directory) {
    fs::create_directories(dir_);
  }

  bool json_enabled() const { return cfg_.output.format != "csv"; }
  bool csv_enabled() const { return cfg_.output.format != "json"; }
  const std::string& hash() const { return hash_; }
  const fs::path& dir() const { return dir_; }

  std::string header() const {
    return "# config_hash=" + hash_ + " seed=" + std::to_string(cfg_.experiment.seed) + "\n";
  }

  json stamp(json body) const {
    body["config_hash"] = hash_;
    body["seed"] = cfg_.experiment.seed;
    return body;
  }

  void write_json(const std::string& name, const json& body) const {
    if (!json_enabled()) return;
    write_text(name, stamp(body).dump(2) + "\n");
  }

  void write_csv(const std::string& name, const std::string& table) const {
    if (!csv_enabled()) return;
    write_text(name, header() + table);
  }

  void write_text(const std::string& name, const std::string& text) const {
    std::ofstream os(dir_ / name, std::ios::binary);
    os << text;
    if (!os) throw std::runtime_error("cannot write " + (dir_ / name).string());
  }

 private:
  const RunConfig& cfg_;
  std::string hash_;
  fs::path dir_;
};

inline SimulationSpec make_spec(const RunConfig& c) {
  SimulationSpec s;
  s.grid = make_grid(c);
  s.replicas = c.experiment.replicas;
  s.seed = c.experiment.seed;
  s.options = make_sampler_options(c);
  s.threads = c.experiment.threads;
  return s;
}

inline std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_number_float()) return fmt17(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace cmd_detail

inline int cmd_theory(const RunConfig& c, std::ostream& log) {
  using namespace cmd_detail;
  const LevyModel model = make_model(c);
  const Output out(c);
  const DiagnosticsReport diag = diagnose(model);
  const json report = to_json(diag);
  out.write_json("theory.json", {{"model", model.describe()}, {"diagnostics", report}});
  std::string table = "field,value\n";
  for (const auto& [k, v] : report.items()) table += k + "," + csv_cell(v) + "\n";
  out.write_csv("theory.csv", table);
  log << "theory: " << model.describe() << (diag.nondegenerate ? " nondegenerate" : " degenerate") << "\n";
  return kExitOk;
}

inline int cmd_simulate(const RunConfig& c, std::ostream& log) {
  using namespace cmd_detail;
  const LevyModel model = make_model(c);
  const Output out(c);
  const SimulationSpec spec = make_spec(c);
  if (c.output.realizations) fs::create_directories(out.dir() / "realizations");
  std::vector<double> z(spec.replicas);
  const std::size_t batch = 256;
  for (std::size_t start = 0; start < spec.replicas; start += batch) {
    const std::size_t count = std::min(batch, spec.replicas - start);
    std::vector<Realization> reals(count);
    parallel_for(count, spec.threads, [&](std::size_t j) {
      reals[j] = build_realization(model, spec.grid, make_stream(spec.seed, start + j, spec.tag), spec.options);
    });
    for (std::size_t j = 0; j < count; ++j) {
      z[start + j] = reals[j].total_mass;
      if (!c.output.realizations) continue;
      char name[40];
      std::snprintf(name, sizeof name, "replica_%06zu.bin", start + j);
      std::ofstream os(out.dir() / "realizations" / name, std::ios::binary);
      write_realization_binary(os, reals[j]);
      if (!os) throw std::runtime_error(std::string("cannot write realization ") + name);
    }
    log << "\rreplica " << start + count << "/" << spec.replicas << std::flush;
  }
  log << "\n";
  std::string table = "replica,Z\n";
  for (std::size_t i = 0; i < z.size(); ++i) table += std::to_string(i) + "," + fmt17(z[i]) + "\n";
  // The summary CSV is the primary simulate output and is always written.
  out.write_text("summary.csv", out.header() + table);
  const auto m = stats::mean_estimate(z);
  out.write_json("simulate.json", {{"model", model.describe()},
                                   {"replicas", spec.replicas},
                                   {"levels", spec.grid.level},
                                   {"oversample", spec.grid.oversample},
                                   {"mean_Z", m.value},
                                   {"mean_Z_stderr", m.stderr_}});
  return kExitOk;
}

inline int cmd_verify(const RunConfig& c, std::ostream& log) {
  using namespace cmd_detail;
  const LevyModel model = make_model(c);
  const Output out(c);
  const SimulationSpec spec = make_spec(c);
  const auto& e = c.experiment;
  std::vector<CheckResult> results;
  for (const auto& name : e.checks) {
    if (name == "normalization") results.push_back(check_normalization(model));
    if (name == "areas") results.push_back(check_areas(e.area_regions, e.area_tolerance, e.seed));
    if (name == "star") results.push_back(check_star(model, spec, e.star_levels, e.star_tolerance));
    if (name == "scaling") results.push_back(check_scaling(model, spec, e.scaling_levels, e.ks_alpha));
    const auto& r = results.back();
    log << (r.passed ? "PASS " : "FAIL ") << r.name << " value=" << r.value << " threshold=" << r.threshold << "\n";
  }
  bool all = true;
  json checks = json::array();
  std::string table = "check,passed,value,threshold\n";
  for (const auto& r : results) {
    all = all && r.passed;
    checks.push_back(to_json(r));
    table += r.name + "," + (r.passed ? "true" : "false") + "," + fmt17(r.value) + "," + fmt17(r.threshold) + "\n";
  }
  out.write_json("verify.json", {{"passed", all}, {"checks", checks}});
  out.write_csv("verify.csv", table);
  log << "verify: " << results.size() << " checks, " << (all ? "all passed" : "failures") << "\n";
  return all ? kExitOk : kExitCheckFailed;
}

inline int cmd_estimate(const RunConfig& c, std::ostream& log) {
  using namespace cmd_detail;
  const LevyModel model = make_model(c);
  const Output out(c);
  const SimulationSpec spec = make_spec(c);
  const auto& e = c.experiment;
  const std::string stem = "estimate_" + e.analysis;

  const auto samples = [&] {
    auto z = simulate_total_masses(model, spec);
    if (c.output.realizations && out.csv_enabled()) {
      std::string t = "replica,Z\n";
      for (std::size_t i = 0; i < z.size(); ++i) t += std::to_string(i) + "," + fmt17(z[i]) + "\n";
      out.write_csv("samples.csv", t);
    }
    return z;
  };

  std::string table;
  json body;
  if (e.analysis == "moments") {
    const auto r = moment_report(model, samples(), e.q);
    body = to_json(r);
    table = "q,mean,mean_stderr,median_of_means,mom_stderr,heavy_tail,quadrature,theory_exponent\n";
    for (std::size_t i = 0; i < r.estimates.size(); ++i) {
      const auto& m = r.estimates[i];
      table += fmt17(m.q) + "," + fmt17(m.mean) + "," + fmt17(m.mean_stderr) + "," + fmt17(m.median_of_means) + "," +
               fmt17(m.mom_stderr) + "," + (m.heavy_tail ? "true" : "false") + "," +
               (r.quadrature[i] ? fmt17(*r.quadrature[i]) : "") + "," + fmt17(r.theory_exponent[i]) + "\n";
    }
  } else if (e.analysis == "scaling") {
    const auto r = scaling_fit(model, e.q, e.lambda_levels, spec);
    for (double q : r.excluded_q) log << "warning: q = " << q << " lies outside the finite-moment region; skipped\n";
    body = to_json(r);
    table = "q,slope,slope_stderr,theory\n";
    for (std::size_t i = 0; i < r.q.size(); ++i)
      table += fmt17(r.q[i]) + "," + fmt17(r.slope[i]) + "," + fmt17(r.slope_stderr[i]) + "," + fmt17(r.theory[i]) + "\n";
  } else if (e.analysis == "tail") {
    const auto r = tail_fit(samples(), model, e.plateau_quantile);
    if (r.few_samples) log << "warning: fewer than 10^4 samples; tail estimates are rough\n";
    if (!r.stable_tail) log << "warning: no stable tail index\n";
    body = to_json(r);
    table = "fraction,hill\n";
    for (std::size_t i = 0; i < r.fractions.size(); ++i) table += fmt17(r.fractions[i]) + "," + fmt17(r.hill[i]) + "\n";
  } else if (e.analysis == "covariance") {
    const auto r = covariance_decay(model, e.lags, spec);
    body = to_json(r);
    table = "lag,covariance,stderr,asymptotic,exact\n";
    for (std::size_t i = 0; i < r.lags.size(); ++i)
      table += std::to_string(r.lags[i]) + "," + fmt17(r.covariance[i]) + "," + fmt17(r.stderr_[i]) + "," +
               fmt17(r.asymptotic[i]) + "," + fmt17(r.exact[i]) + "\n";
  } else if (e.analysis == "growth") {
    const auto z = e.max_n > 4 ? samples() : std::vector<double>{};
    const auto r = growth_constant_probe(model, e.max_n, z);
    body = to_json(r);
    table = "n,log_moment,ratio,exact\n";
    for (std::size_t i = 0; i < r.n.size(); ++i)
      table += std::to_string(r.n[i]) + "," + fmt17(r.log_moment[i]) + "," + fmt17(r.ratio[i]) + "," +
               (r.exact[i] ? "true" : "false") + "\n";
  } else {
    const auto z = samples();
    body = json::array();
    table = "q,estimate,stable,running_25,running_50,running_75,running_100\n";
    for (double q : e.q) {
      if (q > 0.0) throw ConfigError("experiment.q: the negative analysis needs q <= 0");
      const auto r = negative_moment_probe(z, q);
      body.push_back(to_json(r));
      table += fmt17(q) + "," + fmt17(r.estimate) + "," + (r.stable ? "true" : "false");
      for (double v : r.running) table += "," + fmt17(v);
      table += "\n";
    }
    body = {{"probes", body}};
  }
  body["analysis"] = e.analysis;
  body["model"] = model.describe();
  out.write_json(stem + ".json", body);
  out.write_csv(stem + ".csv", table);
  log << "estimate: " << e.analysis << " written to " << out.dir().string() << "\n";
  return kExitOk;
}

/// Runs a subcommand and maps failures onto the exit-code contract.
inline int run_command(const std::string& name, const RunConfig& c, std::ostream& log = std::cerr) {
  try {
    if (name == "theory") return cmd_theory(c, log);
    if (name == "simulate") return cmd_simulate(c, log);
    if (name == "verify") return cmd_verify(c, log);
    if (name == "estimate") return cmd_estimate(c, log);
    log << "error: unknown subcommand '" << name << "'\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    log << "invalid request: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    log << "invalid request: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    log << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace lidc

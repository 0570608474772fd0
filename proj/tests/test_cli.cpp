#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lidc/commands.hpp"

namespace {

namespace fs = std::filesystem;
using lidc::RunConfig;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lidc_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

RunConfig small(double sigma2, const std::string& dir) {
  RunConfig c;
  c.model.sigma2 = sigma2;
  c.grid.levels = 5;
  c.grid.oversample = 2;
  c.experiment.replicas = 200;
  c.experiment.threads = 1;
  c.output.directory = dir;
  return c;
}

int run(const std::string& cmd, const RunConfig& c) {
  std::ostringstream log;
  return lidc::run_command(cmd, c, log);
}

TEST(Config, ShippedConfigsAreFixpoints) {
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(LIDC_CONFIG_DIR)) {
    if (entry.path().extension() != ".ini") continue;
    const std::string text = slurp(entry.path());
    const RunConfig c = lidc::parse_config_string(text);
    EXPECT_EQ(lidc::serialize(c), text) << entry.path();
    EXPECT_NO_THROW(lidc::make_model(c)) << entry.path();
    ++seen;
  }
  EXPECT_GE(seen, 5);
}

TEST(Config, DefaultRoundTrip) {
  RunConfig c;
  c.model.nu = "atoms";
  c.model.atoms = {{-0.6931471805599453, 1.0}, {0.1, 1e-3}};
  c.experiment.q = {0.1, 1.0 / 3.0};
  c.experiment.seed = 18446744073709551615ull;
  const std::string text = lidc::serialize(c);
  const RunConfig back = lidc::parse_config_string(text);
  EXPECT_EQ(lidc::serialize(back), text);
  EXPECT_EQ(back.experiment.q[1], 1.0 / 3.0);
  EXPECT_EQ(back.experiment.seed, 18446744073709551615ull);
}

void expect_config_error(const std::string& text, const std::string& field) {
  try {
    lidc::make_model(lidc::parse_config_string(text));
    ADD_FAILURE() << "accepted: " << text;
  } catch (const lidc::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
  }
}

TEST(Config, ErrorsNameTheField) {
  expect_config_error("[model]\nsigma2 = abc\n", "model.sigma2");
  expect_config_error("[model]\nsigma = 1\n", "model.sigma");
  expect_config_error("[grid]\nlevels = 40\n", "grid.levels");
  expect_config_error("[experiment]\nreplicas = 0\n", "experiment.replicas");
  expect_config_error("[experiment]\nseed = -1\n", "experiment.seed");
  expect_config_error("[model]\nnu = atoms\n", "model.nu_atoms");
  expect_config_error("[model]\nnu = atoms\nnu_atoms = 0:1\n", "model.nu");
  expect_config_error("[output]\nformat = xml\n", "output.format");
  expect_config_error("[experiment]\nchecks = star, bogus\n", "experiment.checks");
  expect_config_error("[extra]\nx = 1\n", "extra");
  expect_config_error("[model]\nsigma2 = 0\n", "model");
}

TEST(Config, HashTracksResultsNotPlumbing) {
  RunConfig a;
  RunConfig b = a;
  b.experiment.threads = 7;
  b.output.directory = "elsewhere";
  b.output.format = "json";
  EXPECT_EQ(lidc::config_hash(a), lidc::config_hash(b));
  b.experiment.seed = 2;
  EXPECT_NE(lidc::config_hash(a), lidc::config_hash(b));
  EXPECT_EQ(lidc::config_hash(a).size(), 16u);
}

TEST(Theory, ReportsAndExitCodes) {
  const fs::path dir = scratch("theory");
  RunConfig c = small(1.0, dir.string());
  ASSERT_EQ(run("theory", c), lidc::kExitOk);
  const auto j = nlohmann::json::parse(slurp(dir / "theory.json"));
  EXPECT_NEAR(j["diagnostics"]["zeta"].get<double>(), 2.0, 1e-9);
  EXPECT_NEAR(j["diagnostics"]["d_formula_value"].get<double>(), 2.0, 1e-9);
  EXPECT_EQ(j["config_hash"], lidc::config_hash(c));
  EXPECT_EQ(j["seed"], c.experiment.seed);
  EXPECT_EQ(slurp(dir / "theory.csv").rfind("# config_hash=" + lidc::config_hash(c), 0), 0u);
  c.model.sigma2 = 2.0;
  ASSERT_EQ(run("theory", c), lidc::kExitOk);
  EXPECT_FALSE(nlohmann::json::parse(slurp(dir / "theory.json"))["diagnostics"]["nondegenerate"].get<bool>());
  c.model.sigma2 = 0.0;
  EXPECT_EQ(run("theory", c), lidc::kExitConfig);
  EXPECT_EQ(run("nonsense", c), lidc::kExitConfig);
}

TEST(Simulate, DeterministicAndComplete) {
  const fs::path a = scratch("sim_a"), b = scratch("sim_b");
  RunConfig c = small(0.5, a.string());
  c.experiment.replicas = 3;
  ASSERT_EQ(run("simulate", c), lidc::kExitOk);
  c.output.directory = b.string();
  c.experiment.threads = 2;
  ASSERT_EQ(run("simulate", c), lidc::kExitOk);
  EXPECT_EQ(slurp(a / "summary.csv"), slurp(b / "summary.csv"));
  EXPECT_EQ(slurp(a / "simulate.json"), slurp(b / "simulate.json"));
  for (int i = 0; i < 3; ++i) {
    const std::string name = "realizations/replica_00000" + std::to_string(i) + ".bin";
    ASSERT_TRUE(fs::exists(a / name));
    EXPECT_EQ(slurp(a / name), slurp(b / name));
    EXPECT_EQ(fs::file_size(a / name), 16u + 8u * 32u);
  }
  const std::string csv = slurp(a / "summary.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2 + 3);
}

TEST(Simulate, MeanMassIsOne) {
  const fs::path dir = scratch("sim_mean");
  RunConfig c = small(0.3, dir.string());
  c.experiment.replicas = 4000;
  c.output.realizations = false;
  ASSERT_EQ(run("simulate", c), lidc::kExitOk);
  const auto j = nlohmann::json::parse(slurp(dir / "simulate.json"));
  EXPECT_NEAR(j["mean_Z"].get<double>(), 1.0, 3.0 * j["mean_Z_stderr"].get<double>());
}

TEST(Verify, DefaultSuitePassesAndTamperingFails) {
  const fs::path dir = scratch("verify");
  RunConfig c = small(0.5, dir.string());
  c.experiment.replicas = 5000;
  c.experiment.area_regions = 40;
  ASSERT_EQ(run("verify", c), lidc::kExitOk);
  auto j = nlohmann::json::parse(slurp(dir / "verify.json"));
  EXPECT_EQ(j["checks"].size(), 4u);

  c.experiment.area_tolerance = 1e-20;
  c.experiment.checks = {"areas"};
  ASSERT_EQ(run("verify", c), lidc::kExitCheckFailed);
  j = nlohmann::json::parse(slurp(dir / "verify.json"));
  EXPECT_EQ(j["checks"][0]["name"], "areas");
  EXPECT_FALSE(j["checks"][0]["passed"].get<bool>());

  c.experiment.checks.clear();
  ASSERT_EQ(run("verify", c), lidc::kExitOk);
  EXPECT_EQ(nlohmann::json::parse(slurp(dir / "verify.json"))["checks"].size(), 0u);
}

TEST(Estimate, MomentsReportCarriesQuadrature) {
  const fs::path dir = scratch("estimate");
  RunConfig c = small(0.5, dir.string());
  c.experiment.replicas = 2000;
  c.experiment.q = {1.0, 2.0};
  ASSERT_EQ(run("estimate", c), lidc::kExitOk);
  const auto j = nlohmann::json::parse(slurp(dir / "estimate_moments.json"));
  const auto& second = j["moments"][1];
  EXPECT_NEAR(second["quadrature"].get<double>(), 8.0 / 3.0, 1e-8);
  EXPECT_TRUE(fs::exists(dir / "estimate_moments.csv"));
  EXPECT_TRUE(fs::exists(dir / "samples.csv"));
}

TEST(Estimate, GrowthRejectsModelsWithoutAllMoments) {
  RunConfig c = small(0.5, scratch("growth").string());
  c.experiment.analysis = "growth";
  c.experiment.max_n = 3;
  EXPECT_EQ(run("estimate", c), lidc::kExitConfig);
}

}  // namespace

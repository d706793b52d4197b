#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ncerg/experiment.hpp"
#include "ncerg/rng.hpp"

using namespace ncerg;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ncerg_test_" + name);
  fs::remove_all(dir);
  return dir;
}

json small_config_json(std::uint64_t seed) {
  const AlgebraPtr a = make_algebra({{4, 1.0}});
  Rng rng(991);
  MixedUnitary mu;
  mu.terms.push_back({0.5, rng.unitary(a)});
  mu.terms.push_back({0.5, rng.unitary(a)});
  ExperimentConfig cfg;
  cfg.algebra = a;
  cfg.op = DSOperator(a, std::move(mu));
  cfg.sequence = SubsequenceSpec::complement(SparseRule::squares());
  cfg.seed = seed;
  cfg.horizon = 512;
  cfg.probe.epsilon = 0.1 * a->trace_of_identity();
  cfg.probe.delta = 0.05;
  cfg.probe.samples = 3;
  cfg.probe.horizon = 64;
  return config_to_json(cfg);
}

}  // namespace

TEST_CASE("minimal config: identity operator leaves residuals at rounding level") {
  const std::string text = slurp(fs::path(NCERG_CONFIG_DIR) / "minimal.json");
  const ExperimentConfig cfg = parse_experiment_config(json::parse(text));
  const fs::path dir = fresh_dir("minimal");
  const json report = run_experiment(cfg, dir.string());

  for (const auto& entry : report.at("witness").at("onesided").at("residuals"))
    CHECK(entry[1].get<double>() <= 1e-14);
  CHECK(report.at("witness").at("onesided").at("decision") == "converging");

  // averages.csv: header plus strided rows, residual column at rounding level
  std::istringstream csv(slurp(dir / "averages.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "n,residual");
  std::size_t rows = 0;
  while (std::getline(csv, line)) {
    const auto comma = line.find(',');
    CHECK(std::stod(line.substr(comma + 1)) <= 1e-14);
    ++rows;
  }
  CHECK(rows >= 4);  // 1, 2, 4, 8, 10
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(fs::exists(dir / "witness.csv"));
  CHECK(fs::exists(dir / "report.json"));
}

TEST_CASE("runs are deterministic and reproducible from their manifest") {
  const json cfg = small_config_json(77);
  const fs::path d1 = fresh_dir("det1");
  const fs::path d2 = fresh_dir("det2");
  run_experiment(parse_experiment_config(cfg), d1.string());
  run_experiment(parse_experiment_config(cfg), d2.string());
  CHECK(slurp(d1 / "report.json") == slurp(d2 / "report.json"));
  CHECK(slurp(d1 / "averages.csv") == slurp(d2 / "averages.csv"));
  CHECK(slurp(d1 / "manifest.json") == slurp(d2 / "manifest.json"));

  // manifest.json is itself a runnable config wrapper
  const json manifest = json::parse(slurp(d1 / "manifest.json"));
  const fs::path d3 = fresh_dir("det3");
  run_experiment(parse_experiment_config(manifest), d3.string());
  CHECK(slurp(d1 / "report.json") == slurp(d3 / "report.json"));
  CHECK(slurp(d1 / "averages.csv") == slurp(d3 / "averages.csv"));
  CHECK(slurp(d1 / "witness.csv") == slurp(d3 / "witness.csv"));

  // a different seed changes the report
  json other = cfg;
  other["input"]["seed"] = 78;
  const fs::path d4 = fresh_dir("det4");
  run_experiment(parse_experiment_config(other), d4.string());
  CHECK(slurp(d1 / "report.json") != slurp(d4 / "report.json"));
}

TEST_CASE("config validation is strict and itemized") {
  json good = small_config_json(5);

  json no_seed = good;
  no_seed["input"].erase("seed");
  CHECK_THROWS_WITH_AS((void)parse_experiment_config(no_seed), doctest::Contains("seed"),
                       std::invalid_argument);

  json unknown = good;
  unknown["frobnicate"] = true;
  CHECK_THROWS_WITH_AS((void)parse_experiment_config(unknown), doctest::Contains("frobnicate"),
                       std::invalid_argument);

  json both_eps = good;
  both_eps["probe"]["epsilon"] = 0.5;
  both_eps["probe"]["epsilon_frac"] = 0.1;
  CHECK_THROWS_WITH_AS((void)parse_experiment_config(both_eps), doctest::Contains("epsilon"),
                       std::invalid_argument);

  json rational = good;
  rational["sequence"] = json::parse(R"({"kind":"rotation","alpha":0.5,"Y":[0.0,0.5],"omega0":0.0})");
  CHECK_THROWS_WITH_AS((void)parse_experiment_config(rational), doctest::Contains("apparatus"),
                       std::invalid_argument);

  json zero_horizon = good;
  zero_horizon["horizon"] = 0;
  CHECK_THROWS_AS((void)parse_experiment_config(zero_horizon), std::invalid_argument);

  json bad_version = good;
  bad_version["version"] = 2;
  CHECK_THROWS_AS((void)parse_experiment_config(bad_version), std::invalid_argument);
}

TEST_CASE("gen-seq table carries the enumeration columns") {
  const std::string csv =
      gen_seq_driver(json::parse(R"({"kind":"blocks","rule":"squares"})"), 7);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "n,k,N_I,partial_density,sup_ratio");
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  REQUIRE(rows.size() == 7);
  CHECK(rows[0].rfind("0,0,0,", 0) == 0);
  CHECK(rows[3].rfind("3,4,2,", 0) == 0);
  CHECK(rows[6].rfind("6,9,3,", 0) == 0);
}

TEST_CASE("check-ds driver verifies recipes and flags the scaling hook") {
  const std::string recipe = slurp(fs::path(NCERG_CONFIG_DIR) / "recipe_mixed_m4.json");
  const json j = json::parse(recipe);

  const DriverResult ok = check_ds_driver(j, std::nullopt, 25, 1e-10, 3);
  CHECK(ok.check_passed);
  CHECK(ok.report.at("verification").at("passed").get<bool>());

  const DriverResult hook = check_ds_driver(j, 2.0, 10, 1e-10, 3);
  CHECK_FALSE(hook.check_passed);
  CHECK(hook.report.at("verification").at("max_ratio_op").get<double>() ==
        doctest::Approx(2.0));
}

TEST_CASE("identity sweep driver reports residuals within tolerance") {
  const DriverResult res = check_identities_driver(0, 20);
  CHECK(res.check_passed);
  CHECK(res.report.at("max_relative_identity_residual").get<double>() <= 1e-10);
  CHECK(res.report.at("max_gap_excess").get<double>() <= 1e-10);
}

TEST_CASE("probe driver honors the config probe block") {
  json cfg = small_config_json(11);
  cfg["probe"]["samples"] = 4;
  cfg["probe"]["horizon"] = 32;
  const DriverResult res = probe_buem_driver(cfg);
  CHECK(res.check_passed);
  CHECK(res.report.at("samples_attempted").get<std::uint64_t>() == 4);
  CHECK(res.report.at("passed").get<bool>());
}

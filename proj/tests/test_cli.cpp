// End-to-end CLI checks via subprocesses; asserts the documented exit codes.
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

namespace fs = std::filesystem;

int run_cli(const std::string& args) {
  const std::string cmd = std::string(NCERG_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  REQUIRE(raw != -1);
  return WEXITSTATUS(raw);
}

fs::path write_temp(const std::string& name, const std::string& contents) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream f(p, std::ios::binary);
  f << contents;
  return p;
}

}  // namespace

TEST_CASE("gen-seq prints a table and exits 0") {
  const fs::path spec = write_temp("ncerg_cli_seq.json", R"({"kind":"blocks","rule":"squares"})");
  CHECK(run_cli("gen-seq --spec " + spec.string() + " -N 10") == 0);
}

TEST_CASE("validation failures exit 1") {
  const fs::path bad = write_temp("ncerg_cli_bad_seq.json", R"({"kind":"escalator"})");
  CHECK(run_cli("gen-seq --spec " + bad.string() + " -N 5") == 1);

  // rational rotation angle in a config is a validation error
  const fs::path cfg = write_temp("ncerg_cli_rational.json", R"({
    "algebra": {"blocks":[{"dim":2,"weight":1.0}]},
    "operator": {"kind":"permutation","perm":[1,0]},
    "sequence": {"kind":"rotation","alpha":0.5,"Y":[0.0,0.5],"omega0":0.0},
    "input": {"seed":1,"norm_target":1.0,"p":2.0},
    "horizon": 16,
    "probe": {"epsilon_frac":0.1,"delta":0.05,"p":1.0}
  })");
  const fs::path out = fs::temp_directory_path() / "ncerg_cli_rational_out";
  CHECK(run_cli("run --config " + cfg.string() + " --out " + out.string()) == 1);
}

TEST_CASE("missing input files exit 2") {
  CHECK(run_cli("gen-seq --spec /nonexistent/seq.json -N 5") == 2);
}

TEST_CASE("check-ds: passing recipe exits 0, scaling hook exits 3") {
  const std::string recipe = R"({
    "algebra": {"blocks":[{"dim":2,"weight":1.0}]},
    "operator": {"kind":"permutation","perm":[1,0]}
  })";
  const fs::path p = write_temp("ncerg_cli_recipe.json", recipe);
  CHECK(run_cli("check-ds --recipe " + p.string() + " --samples 10") == 0);
  CHECK(run_cli("check-ds --recipe " + p.string() + " --samples 10 --scaling-hook 2.0") == 3);
}

TEST_CASE("check-identities exits 0 and run produces a bundle") {
  CHECK(run_cli("check-identities --seed 0 --instances 5") == 0);

  const fs::path cfg = fs::path(NCERG_CONFIG_DIR) / "minimal.json";
  const fs::path out = fs::temp_directory_path() / "ncerg_cli_bundle";
  fs::remove_all(out);
  CHECK(run_cli("run --config " + cfg.string() + " --out " + out.string()) == 0);
  CHECK(fs::exists(out / "report.json"));
  CHECK(fs::exists(out / "averages.csv"));
  CHECK(fs::exists(out / "manifest.json"));
  CHECK(fs::exists(out / "witness.csv"));
}

TEST_CASE("probe-buem runs from a config file") {
  const fs::path cfg = fs::path(NCERG_CONFIG_DIR) / "minimal.json";
  CHECK(run_cli("probe-buem --config " + cfg.string()) == 0);
}

// Command-line front end; talks to the library exclusively through the C API.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ncerg.h"

namespace {

bool log_enabled() {
  const char* v = std::getenv("NCERG_LOG");
  return v && *v && std::string(v) != "0" && std::string(v) != "quiet";
}

void log_line(const std::string& msg) {
  if (log_enabled()) std::cerr << "[ncerg] " << msg << "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    std::cerr << "error: cannot read " << path << "\n";
    std::exit(2);
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int finish(ncerg_status status, char* report, bool print_report) {
  if (report) {
    if (print_report) std::cout << report;
    ncerg_string_free(report);
  }
  if (status != NCERG_OK) std::cerr << "error: " << ncerg_last_error() << "\n";
  return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"noncommutative ergodic average laboratory"};
  app.require_subcommand(1);

  // run
  std::string run_config, run_out;
  std::optional<std::uint64_t> run_seed;
  auto* run = app.add_subcommand("run", "run an experiment config and write a report bundle");
  run->add_option("--config", run_config, "experiment config (or manifest) JSON")->required();
  run->add_option("--out", run_out, "output directory")->required();
  run->add_option("--seed", run_seed, "override the config seed");

  // check-ds
  std::string ds_recipe;
  std::uint64_t ds_samples = 100;
  double ds_tol = 1e-10;
  std::uint64_t ds_seed = 0;
  std::optional<double> ds_hook;
  auto* check_ds = app.add_subcommand("check-ds", "verify a recipe against the DS+ contract");
  check_ds->add_option("--recipe", ds_recipe, "recipe file: {\"algebra\":..., \"operator\":...}")
      ->required();
  check_ds->add_option("--samples", ds_samples, "random samples (default 100)");
  check_ds->add_option("--tol", ds_tol, "contraction tolerance (default 1e-10)");
  check_ds->add_option("--seed", ds_seed, "sampling seed (default 0)");
  check_ds->add_option("--scaling-hook", ds_hook,
                       "verify the test hook x -> f*x instead of the recipe");

  // gen-seq
  std::string seq_spec;
  std::uint64_t seq_n = 0;
  auto* gen_seq = app.add_subcommand("gen-seq", "materialize a subsequence prefix as CSV");
  gen_seq->add_option("--spec", seq_spec, "sequence spec JSON")->required();
  gen_seq->add_option("-N,--terms", seq_n, "number of terms")->required();

  // probe-buem
  std::string probe_config;
  auto* probe = app.add_subcommand("probe-buem", "run the b.u.e.m.-at-zero probe");
  probe->add_option("--config", probe_config, "experiment config JSON")->required();

  // check-identities
  std::uint64_t id_seed = 0;
  std::uint64_t id_instances = 100;
  auto* check_ids =
      app.add_subcommand("check-identities", "randomized transfer-identity and gap sweep");
  check_ids->add_option("--seed", id_seed, "sweep seed")->required();
  check_ids->add_option("--instances", id_instances, "instance count (default 100)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  char* report = nullptr;

  if (*run) {
    log_line("running experiment from " + run_config);
    const std::string config = read_file(run_config);
    const std::uint64_t seed = run_seed.value_or(0);
    const ncerg_status st =
        ncerg_run_experiment(config.c_str(), run_out.c_str(), run_seed ? &seed : nullptr, &report);
    if (st == NCERG_OK) log_line("bundle written to " + run_out);
    return finish(st, report, log_enabled());
  }

  if (*check_ds) {
    const std::string recipe = read_file(ds_recipe);
    const ncerg_status st =
        ncerg_check_ds(recipe.c_str(), ds_hook.has_value() ? 1 : 0, ds_hook.value_or(0.0),
                       ds_samples, ds_tol, ds_seed, &report);
    return finish(st, report, true);
  }

  if (*gen_seq) {
    const std::string spec = read_file(seq_spec);
    const ncerg_status st = ncerg_gen_seq(spec.c_str(), seq_n, &report);
    return finish(st, report, true);
  }

  if (*probe) {
    const std::string config = read_file(probe_config);
    const ncerg_status st = ncerg_probe_buem(config.c_str(), &report);
    return finish(st, report, true);
  }

  if (*check_ids) {
    const ncerg_status st = ncerg_check_identities(id_seed, id_instances, &report);
    return finish(st, report, true);
  }

  return 1;
}

#ifndef NCERG_EXPERIMENT_HPP
#define NCERG_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "ncerg/serialization.hpp"

namespace ncerg {

inline constexpr const char* kLibraryVersion = "0.1.0";

struct ProbeConfig {
  double epsilon = 0.0;       // absolute; resolved from epsilon or epsilon_frac
  double delta = 1e-2;
  double p = 1.0;
  WitnessMode mode = WitnessMode::Bilateral;
  std::uint64_t samples = 20;
  std::uint64_t horizon = 256;
};

struct OutputConfig {
  std::optional<std::string> directory;
  // "pow2" for a geometric grid, or a positive arithmetic stride.
  bool pow2_stride = true;
  std::uint64_t stride = 1;
};

struct ExperimentConfig {
  AlgebraPtr algebra;
  std::optional<DSOperator> op;
  SubsequenceSpec sequence = SubsequenceSpec::full();
  WeightSequence weights = WeightSequence::ones();
  std::uint64_t seed = 0;
  double norm_target = 1.0;
  double input_p = 2.0;
  std::uint64_t horizon = 0;
  ProbeConfig probe;
  OutputConfig output;
};

// Strict parser; rejects unknown fields and missing seeds. Accepts either a
// bare config or a manifest ({"library_version":..., "config":...}) so a
// bundle can be reproduced from its own manifest.
ExperimentConfig parse_experiment_config(const json& j);

// The resolved (defaults applied, seed final) configuration as JSON.
json config_to_json(const ExperimentConfig& config);

// Runs the configured stream, witness reports (both modes), the b.u.e.m.
// probe and the transfer-identity sweep, and writes manifest.json,
// averages.csv, witness.csv and report.json under out_dir. Deterministic
// given the seed. Returns the report JSON.
json run_experiment(const ExperimentConfig& config, const std::string& out_dir);

struct DriverResult {
  json report;
  bool check_passed = true;
};

// check-ds: verify a recipe file ({"algebra":..., "operator":...}) or the
// scaling test hook against DS+ contraction and positivity.
DriverResult check_ds_driver(const json& recipe_file, std::optional<double> scaling_hook_factor,
                             std::uint64_t samples, double tol, std::uint64_t seed);

// gen-seq: CSV table with columns n, k_n, N_I(n), partial_density, sup_ratio.
std::string gen_seq_driver(const json& sequence_spec, std::uint64_t n);

// probe-buem: run the b.u.e.m. probe described by an experiment config.
DriverResult probe_buem_driver(const json& config_json);

// check-identities: randomized sweep of both transfer identities and the
// deleted-terms gap bound. Passes iff every residual stays within
// 1e-10 * (1 + ||x||_inf).
DriverResult check_identities_driver(std::uint64_t seed, std::uint64_t instances);

}  // namespace ncerg

#endif

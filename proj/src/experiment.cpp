#include "ncerg/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

#include "ncerg/rng.hpp"

namespace ncerg {

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const char* what) {
  if (!j.is_object()) throw std::invalid_argument(std::string(what) + ": expected a JSON object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key))
      throw std::invalid_argument(std::string(what) + ": unknown field \"" + key + "\"");
}

const json& require(const json& j, const char* key, const char* what) {
  if (!j.contains(key))
    throw std::invalid_argument(std::string(what) + ": missing field \"" + key + "\"");
  return j.at(key);
}

WitnessMode mode_from_string(const std::string& s) {
  if (s == "bilateral") return WitnessMode::Bilateral;
  if (s == "onesided") return WitnessMode::Onesided;
  throw std::invalid_argument("probe: mode must be \"bilateral\" or \"onesided\"");
}

std::vector<std::uint64_t> output_grid(const OutputConfig& out, std::uint64_t N) {
  std::vector<std::uint64_t> grid;
  if (out.pow2_stride) {
    for (std::uint64_t n = 1; n < N; n *= 2) grid.push_back(n);
  } else {
    for (std::uint64_t n = out.stride; n < N; n += out.stride) grid.push_back(n);
  }
  if (grid.empty() || grid.back() != N) grid.push_back(N);
  return grid;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << contents;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

OperatorElement prepared_input(const ExperimentConfig& config) {
  Rng rng(config.seed);
  OperatorElement x = rng.element(config.algebra);
  const double nx = schatten_norm(x, config.input_p);
  if (nx > 0.0) x *= cplx(config.norm_target / nx);
  return x;
}

}  // namespace

ExperimentConfig parse_experiment_config(const json& root) {
  const json* jp = &root;
  if (root.is_object() && root.contains("config")) {
    check_keys(root, {"config", "library_version"}, "manifest");
    jp = &root.at("config");
  }
  const json& j = *jp;
  check_keys(j,
             {"version", "algebra", "operator", "sequence", "weights", "input", "horizon",
              "probe", "output"},
             "config");
  if (j.contains("version") && j.at("version").get<int>() != 1)
    throw std::invalid_argument("config: unsupported version (expected 1)");

  ExperimentConfig config;
  config.algebra = algebra_from_json(require(j, "algebra", "config"));
  config.op = operator_from_json(config.algebra, require(j, "operator", "config"));
  if (j.contains("sequence")) config.sequence = sequence_from_json(j.at("sequence"));
  if (j.contains("weights")) config.weights = weights_from_json(j.at("weights"));

  const json& input = require(j, "input", "config");
  check_keys(input, {"seed", "norm_target", "p"}, "config input");
  config.seed = require(input, "seed", "config input").get<std::uint64_t>();
  config.norm_target = input.value("norm_target", 1.0);
  config.input_p = input.value("p", 2.0);
  if (!(config.norm_target > 0.0))
    throw std::invalid_argument("config input: norm_target must be positive");
  if (!(config.input_p >= 1.0)) throw std::invalid_argument("config input: p must be >= 1");

  config.horizon = require(j, "horizon", "config").get<std::uint64_t>();
  if (config.horizon < 1) throw std::invalid_argument("config: horizon must be >= 1");

  const json& probe = require(j, "probe", "config");
  check_keys(probe, {"epsilon", "epsilon_frac", "delta", "p", "mode", "samples", "horizon"},
             "config probe");
  if (probe.contains("epsilon") == probe.contains("epsilon_frac"))
    throw std::invalid_argument(
        "config probe: exactly one of \"epsilon\" and \"epsilon_frac\" is required");
  if (probe.contains("epsilon"))
    config.probe.epsilon = probe.at("epsilon").get<double>();
  else
    config.probe.epsilon =
        probe.at("epsilon_frac").get<double>() * config.algebra->trace_of_identity();
  config.probe.delta = probe.value("delta", 1e-2);
  config.probe.p = probe.value("p", 1.0);
  config.probe.mode = mode_from_string(probe.value("mode", std::string("bilateral")));
  config.probe.samples = probe.value("samples", std::uint64_t{20});
  config.probe.horizon = probe.value("horizon", std::uint64_t{256});
  if (!(config.probe.epsilon > 0.0) || !(config.probe.delta > 0.0) || !(config.probe.p >= 1.0))
    throw std::invalid_argument("config probe: epsilon, delta must be positive and p >= 1");

  if (j.contains("output")) {
    const json& out = j.at("output");
    check_keys(out, {"directory", "stride"}, "config output");
    if (out.contains("directory")) config.output.directory = out.at("directory").get<std::string>();
    if (out.contains("stride")) {
      const json& stride = out.at("stride");
      if (stride.is_string()) {
        if (stride.get<std::string>() != "pow2")
          throw std::invalid_argument("config output: stride must be \"pow2\" or a positive integer");
        config.output.pow2_stride = true;
      } else {
        config.output.pow2_stride = false;
        config.output.stride = stride.get<std::uint64_t>();
        if (config.output.stride < 1)
          throw std::invalid_argument("config output: stride must be >= 1");
      }
    }
  }
  return config;
}

json config_to_json(const ExperimentConfig& config) {
  json probe{{"epsilon", config.probe.epsilon},
             {"delta", config.probe.delta},
             {"p", config.probe.p},
             {"mode", config.probe.mode == WitnessMode::Bilateral ? "bilateral" : "onesided"},
             {"samples", config.probe.samples},
             {"horizon", config.probe.horizon}};
  json output;
  if (config.output.pow2_stride)
    output["stride"] = "pow2";
  else
    output["stride"] = config.output.stride;
  if (config.output.directory) output["directory"] = *config.output.directory;
  return json{{"version", 1},
              {"algebra", algebra_to_json(*config.algebra)},
              {"operator", recipe_to_json(*config.op)},
              {"sequence", sequence_to_json(config.sequence)},
              {"weights", weights_to_json(config.weights)},
              {"input",
               {{"seed", config.seed}, {"norm_target", config.norm_target}, {"p", config.input_p}}},
              {"horizon", config.horizon},
              {"probe", probe},
              {"output", output}};
}

json run_experiment(const ExperimentConfig& config, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  fs::create_directories(dir);

  const DSOperator& op = *config.op;
  const OperatorElement x = prepared_input(config);
  const double x_opnorm = operator_norm(x);
  const FixedSpaceProjector projector(op);
  const OperatorElement xhat = projector(x);

  // Strided residual curve of the configured average family against E(x).
  const auto grid = output_grid(config.output, config.horizon);
  const auto samples = stream_checkpoints(op, x, config.weights, config.sequence, grid);
  std::string csv = "n,residual\n";
  {
    char line[96];
    for (const auto& [n, value] : samples) {
      std::snprintf(line, sizeof(line), "%llu,%.17g\n", static_cast<unsigned long long>(n),
                    operator_norm(value - xhat));
      csv += line;
    }
  }

  ReportOptions options;
  options.delta_target = config.probe.delta;
  options.family = "M_n^{beta,k} vs fixed-space limit";
  const ConvergenceReport bilateral =
      witness_report(samples, xhat, config.probe.epsilon, WitnessMode::Bilateral, options);
  const ConvergenceReport onesided =
      witness_report(samples, xhat, config.probe.epsilon, WitnessMode::Onesided, options);

  BuemProbeParams probe_params;
  probe_params.p = config.probe.p;
  probe_params.epsilon = config.probe.epsilon;
  probe_params.delta = config.probe.delta;
  probe_params.mode = config.probe.mode;
  probe_params.sample_count = config.probe.samples;
  probe_params.horizon = config.probe.horizon;
  probe_params.seed = config.seed ^ 0x9e3779b97f4a7c15ULL;
  const BuemProbeResult probe = buem_probe(op, config.weights, config.sequence, probe_params);

  // Transfer identities on this instance at a few horizons.
  json identity_checks = json::array();
  double max_rel_residual = 0.0;
  for (std::uint64_t n : {std::uint64_t{16}, std::uint64_t{64}, std::uint64_t{256}}) {
    if (n > config.horizon) break;
    json entry{{"n", n}};
    const double r31 =
        transfer_identity_check(TransferIdentity::SubsequentialAsFull, op, config.weights, config.sequence, x, n);
    entry["subseq_as_full_residual"] = r31;
    max_rel_residual = std::max(max_rel_residual, r31 / (1.0 + x_opnorm));
    if (n >= 1 && count_upto(config.sequence, n - 1) >= 1) {
      const double r32 = transfer_identity_check(TransferIdentity::IndicatorAsSubsequential, op, config.weights,
                                                 config.sequence, x, n);
      entry["indicator_as_subseq_residual"] = r32;
      max_rel_residual = std::max(max_rel_residual, r32 / (1.0 + x_opnorm));
    }
    identity_checks.push_back(entry);
  }

  // Shared-limit distance between the subsequential and full averages.
  LimitCheckInstance shared{op, x, std::nullopt, config.weights, config.sequence, config.horizon};
  const double shared_limit = limit_check(LimitCheckVariant::SharedLimit, shared);
  const double density_scaled = limit_check(LimitCheckVariant::DensityScaledLimit, shared);

  json report{{"library_version", kLibraryVersion},
              {"input", {{"opnorm", x_opnorm}, {"p", config.input_p}, {"norm_target", config.norm_target}}},
              {"witness", {{"bilateral", report_to_json(bilateral)}, {"onesided", report_to_json(onesided)}}},
              {"buem_probe", buem_result_to_json(probe)},
              {"transfer_identities",
               {{"checks", identity_checks}, {"max_relative_residual", max_rel_residual}}},
              {"limit_checks",
               {{"shared_limit_distance", shared_limit}, {"density_scaled_limit_residual", density_scaled}}}};

  const json manifest{{"library_version", kLibraryVersion}, {"config", config_to_json(config)}};

  write_file(dir / "manifest.json", dump_json(manifest));
  write_file(dir / "averages.csv", csv);
  write_file(dir / "witness.csv", reports_to_csv(bilateral, onesided));
  write_file(dir / "report.json", dump_json(report));
  return report;
}

DriverResult check_ds_driver(const json& recipe_file, std::optional<double> scaling_hook_factor,
                             std::uint64_t samples, double tol, std::uint64_t seed) {
  check_keys(recipe_file, {"algebra", "operator"}, "recipe file");
  const AlgebraPtr algebra = algebra_from_json(require(recipe_file, "algebra", "recipe file"));

  DSVerification verification;
  json described;
  if (scaling_hook_factor) {
    verification = verify_ds_plus(scaling_hook(*scaling_hook_factor), algebra, samples, tol, seed);
    described = json{{"kind", "scaling_hook"}, {"factor", *scaling_hook_factor}};
  } else {
    if (!recipe_file.contains("operator"))
      throw std::invalid_argument("recipe file: missing field \"operator\"");
    const DSOperator op = operator_from_json(algebra, recipe_file.at("operator"));
    verification = verify_ds_plus(op, samples, tol, seed);
    described = recipe_file.at("operator");
  }

  DriverResult res;
  res.report = json{{"recipe", described},
                    {"seed", seed},
                    {"verification", ds_verification_to_json(verification)}};
  res.check_passed = verification.passed;
  return res;
}

std::string gen_seq_driver(const json& sequence_spec, std::uint64_t n) {
  if (n < 1) throw std::invalid_argument("gen-seq: N must be >= 1");
  const SubsequenceSpec spec = sequence_from_json(sequence_spec);
  const bool has_blocks = spec.interval_blocks() != nullptr;

  SequenceCursor cursor(spec);
  std::string out = "n,k,N_I,partial_density,sup_ratio\n";
  char line[160];
  double sup = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t k = cursor.next();
    if (i >= 1) sup = std::max(sup, static_cast<double>(k) / static_cast<double>(i));
    const double density = static_cast<double>(i + 1) / static_cast<double>(k + 1);
    if (has_blocks)
      std::snprintf(line, sizeof(line), "%llu,%llu,%llu,%.17g,%.17g\n",
                    static_cast<unsigned long long>(i), static_cast<unsigned long long>(k),
                    static_cast<unsigned long long>(cursor.current_interval_index()), density,
                    sup);
    else
      std::snprintf(line, sizeof(line), "%llu,%llu,,%.17g,%.17g\n",
                    static_cast<unsigned long long>(i), static_cast<unsigned long long>(k),
                    density, sup);
    out += line;
  }
  return out;
}

DriverResult probe_buem_driver(const json& config_json) {
  const ExperimentConfig config = parse_experiment_config(config_json);
  BuemProbeParams params;
  params.p = config.probe.p;
  params.epsilon = config.probe.epsilon;
  params.delta = config.probe.delta;
  params.mode = config.probe.mode;
  params.sample_count = config.probe.samples;
  params.horizon = config.probe.horizon;
  params.seed = config.seed;
  const BuemProbeResult result = buem_probe(*config.op, config.weights, config.sequence, params);
  DriverResult res;
  res.report = buem_result_to_json(result);
  res.check_passed = result.passed;
  return res;
}

namespace {

DSOperator random_identity_instance_operator(Rng& rng, const AlgebraPtr& algebra, int flavor) {
  switch (flavor % 4) {
    case 0: {
      MixedUnitary mu;
      const double p = rng.uniform(0.3, 0.7);
      mu.terms.push_back({p, rng.unitary(algebra)});
      mu.terms.push_back({1.0 - p, rng.unitary(algebra)});
      return DSOperator(algebra, std::move(mu));
    }
    case 1: {
      // random block-respecting permutation
      std::vector<std::size_t> perm;
      std::size_t off = 0;
      for (const auto& b : algebra->blocks()) {
        std::vector<std::size_t> local(b.dim);
        for (std::size_t i = 0; i < b.dim; ++i) local[i] = off + i;
        for (std::size_t i = b.dim; i > 1; --i)
          std::swap(local[i - 1], local[rng.next_u64() % i]);
        perm.insert(perm.end(), local.begin(), local.end());
        off += b.dim;
      }
      return DSOperator(algebra, PermutationConjugation{std::move(perm)});
    }
    case 2: {
      BlockConditionalExpectation ce;
      for (const auto& b : algebra->blocks()) {
        std::vector<std::size_t> cells;
        std::size_t left = b.dim;
        while (left > 0) {
          const std::size_t c = 1 + rng.next_u64() % left;
          cells.push_back(c);
          left -= c;
        }
        ce.cell_sizes.push_back(std::move(cells));
      }
      return DSOperator(algebra, std::move(ce));
    }
    default: {
      Composition comp;
      comp.factors.push_back(random_identity_instance_operator(rng, algebra, 0));
      comp.factors.push_back(random_identity_instance_operator(rng, algebra, 2));
      return DSOperator(algebra, std::move(comp));
    }
  }
}

}  // namespace

DriverResult check_identities_driver(std::uint64_t seed, std::uint64_t instances) {
  if (instances < 1) throw std::invalid_argument("check-identities: instances must be >= 1");
  Rng rng(seed);
  double max_rel_residual = 0.0;
  double max_gap_excess = -std::numeric_limits<double>::infinity();
  const std::size_t dims[] = {2, 3, 4, 8};
  const double weights_pool[] = {0.5, 1.0, 2.0};

  for (std::uint64_t inst = 0; inst < instances; ++inst) {
    std::vector<AlgebraSpec::Block> blocks;
    const std::size_t nblocks = 1 + rng.next_u64() % 2;
    for (std::size_t b = 0; b < nblocks; ++b)
      blocks.push_back({dims[rng.next_u64() % 4], weights_pool[rng.next_u64() % 3]});
    const AlgebraPtr algebra = make_algebra(std::move(blocks));

    const DSOperator op =
        random_identity_instance_operator(rng, algebra, static_cast<int>(rng.next_u64() % 4));
    const OperatorElement x = rng.element(algebra);
    const double scale = 1.0 + operator_norm(x);

    SubsequenceSpec k = SubsequenceSpec::evens();
    switch (inst % 3) {
      case 0: k = SubsequenceSpec::evens(); break;
      case 1: k = SubsequenceSpec::blocks(IntervalBlocks::squares()); break;
      case 2: k = SubsequenceSpec::complement(SparseRule::squares()); break;
    }

    const std::uint64_t n = 5 + rng.next_u64() % 196;

    WeightSequence beta = WeightSequence::ones();
    if (inst % 2 == 0) {
      // bounded random complex weights, materialized far enough for every index
      const std::uint64_t needed = k.prefix(n + 2).back() + 2;
      std::vector<cplx> values;
      values.reserve(needed);
      for (std::uint64_t i = 0; i < needed; ++i)
        values.emplace_back(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
      beta = WeightSequence::explicit_values(std::move(values));
    } else {
      TrigPolynomial poly;
      const std::size_t terms = 1 + rng.next_u64() % 3;
      for (std::size_t t = 0; t < terms; ++t) {
        poly.coefficients.emplace_back(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        poly.angles.push_back(rng.uniform(0.0, 2.0 * M_PI));
      }
      beta = WeightSequence::trig_poly(std::move(poly));
    }

    const double r31 = transfer_identity_check(TransferIdentity::SubsequentialAsFull, op, beta, k, x, n);
    max_rel_residual = std::max(max_rel_residual, r31 / scale);
    if (count_upto(k, n - 1) >= 1) {
      const double r32 = transfer_identity_check(TransferIdentity::IndicatorAsSubsequential, op, beta, k, x, n);
      max_rel_residual = std::max(max_rel_residual, r32 / scale);
    }

    const GapBound gap = theorem31_gap(op, beta, k, x, n);
    max_gap_excess = std::max(max_gap_excess, gap.measured - gap.bound);
  }

  DriverResult res;
  res.check_passed = max_rel_residual <= 1e-10 && max_gap_excess <= 1e-10;
  res.report = json{{"seed", seed},
                    {"instances", instances},
                    {"max_relative_identity_residual", max_rel_residual},
                    {"max_gap_excess", max_gap_excess},
                    {"passed", res.check_passed}};
  return res;
}

}  // namespace ncerg

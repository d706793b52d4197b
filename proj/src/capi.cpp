#include "ncerg.h"

#include <cstring>
#include <new>
#include <string>

#include "ncerg/experiment.hpp"
#include "ncerg/rng.hpp"

using ncerg::json;

namespace {

thread_local std::string g_last_error;

ncerg_status fail(ncerg_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

// Exceptions map onto the status codes: std::invalid_argument marks
// validation problems, everything else is a runtime failure.
template <typename Fn>
ncerg_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    return fail(NCERG_E_VALIDATION, e.what());
  } catch (const std::bad_alloc&) {
    return fail(NCERG_E_RUNTIME, "out of memory");
  } catch (const std::exception& e) {
    return fail(NCERG_E_RUNTIME, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

json parse_json(const char* text, const char* what) {
  if (!text) throw std::invalid_argument(std::string(what) + ": null JSON text");
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw std::invalid_argument(std::string(what) + ": malformed JSON");
  return j;
}

}  // namespace

struct ncerg_algebra {
  ncerg::AlgebraPtr spec;
};
struct ncerg_element {
  ncerg::OperatorElement value;
};
struct ncerg_operator {
  ncerg::DSOperator op;
};
struct ncerg_sequence {
  ncerg::SubsequenceSpec spec;
};
struct ncerg_weights {
  ncerg::WeightSequence w;
};

extern "C" {

const char* ncerg_version(void) { return ncerg::kLibraryVersion; }

const char* ncerg_last_error(void) { return g_last_error.c_str(); }

void ncerg_string_free(char* s) { delete[] s; }

ncerg_status ncerg_algebra_from_json(const char* text, ncerg_algebra** out) {
  return guarded([&]() {
    if (!out) throw std::invalid_argument("ncerg_algebra_from_json: null output");
    *out = new ncerg_algebra{ncerg::algebra_from_json(parse_json(text, "algebra"))};
    return NCERG_OK;
  });
}

void ncerg_algebra_free(ncerg_algebra* a) { delete a; }

ncerg_status ncerg_algebra_total_dim(const ncerg_algebra* a, size_t* out) {
  return guarded([&]() {
    if (!a || !out) throw std::invalid_argument("ncerg_algebra_total_dim: null argument");
    *out = a->spec->total_dim();
    return NCERG_OK;
  });
}

ncerg_status ncerg_algebra_trace_of_identity(const ncerg_algebra* a, double* out) {
  return guarded([&]() {
    if (!a || !out) throw std::invalid_argument("ncerg_algebra_trace_of_identity: null argument");
    *out = a->spec->trace_of_identity();
    return NCERG_OK;
  });
}

ncerg_status ncerg_element_from_json(const ncerg_algebra* a, const char* text,
                                     ncerg_element** out) {
  return guarded([&]() {
    if (!a || !out) throw std::invalid_argument("ncerg_element_from_json: null argument");
    *out = new ncerg_element{ncerg::element_from_json(a->spec, parse_json(text, "element"))};
    return NCERG_OK;
  });
}

ncerg_status ncerg_element_to_json(const ncerg_element* x, char** out_json) {
  return guarded([&]() {
    if (!x || !out_json) throw std::invalid_argument("ncerg_element_to_json: null argument");
    *out_json = dup_string(ncerg::element_to_json(x->value).dump());
    return NCERG_OK;
  });
}

void ncerg_element_free(ncerg_element* x) { delete x; }

ncerg_status ncerg_element_random(const ncerg_algebra* a, uint64_t seed, double p,
                                  double norm_target, ncerg_element** out) {
  return guarded([&]() {
    if (!a || !out) throw std::invalid_argument("ncerg_element_random: null argument");
    ncerg::Rng rng(seed);
    ncerg::OperatorElement x = rng.element(a->spec);
    const double nx = ncerg::schatten_norm(x, p);
    if (nx > 0.0) x *= ncerg::cplx(norm_target / nx);
    *out = new ncerg_element{std::move(x)};
    return NCERG_OK;
  });
}

ncerg_status ncerg_element_trace(const ncerg_element* x, double* re, double* im) {
  return guarded([&]() {
    if (!x || !re || !im) throw std::invalid_argument("ncerg_element_trace: null argument");
    const ncerg::cplx t = ncerg::trace(x->value);
    *re = t.real();
    *im = t.imag();
    return NCERG_OK;
  });
}

ncerg_status ncerg_element_schatten_norm(const ncerg_element* x, double p, double* out) {
  return guarded([&]() {
    if (!x || !out) throw std::invalid_argument("ncerg_element_schatten_norm: null argument");
    *out = ncerg::schatten_norm(x->value, p);
    return NCERG_OK;
  });
}

ncerg_status ncerg_operator_from_json(const ncerg_algebra* a, const char* text,
                                      ncerg_operator** out) {
  return guarded([&]() {
    if (!a || !out) throw std::invalid_argument("ncerg_operator_from_json: null argument");
    *out = new ncerg_operator{ncerg::operator_from_json(a->spec, parse_json(text, "operator"))};
    return NCERG_OK;
  });
}

void ncerg_operator_free(ncerg_operator* op) { delete op; }

ncerg_status ncerg_operator_apply(const ncerg_operator* op, const ncerg_element* x,
                                  ncerg_element** out) {
  return guarded([&]() {
    if (!op || !x || !out) throw std::invalid_argument("ncerg_operator_apply: null argument");
    *out = new ncerg_element{op->op.apply(x->value)};
    return NCERG_OK;
  });
}

ncerg_status ncerg_operator_fixed_space_apply(const ncerg_operator* op, const ncerg_element* x,
                                              ncerg_element** out) {
  return guarded([&]() {
    if (!op || !x || !out)
      throw std::invalid_argument("ncerg_operator_fixed_space_apply: null argument");
    *out = new ncerg_element{ncerg::fixed_space_projector(op->op)(x->value)};
    return NCERG_OK;
  });
}

ncerg_status ncerg_sequence_from_json(const char* text, ncerg_sequence** out) {
  return guarded([&]() {
    if (!out) throw std::invalid_argument("ncerg_sequence_from_json: null output");
    *out = new ncerg_sequence{ncerg::sequence_from_json(parse_json(text, "sequence"))};
    return NCERG_OK;
  });
}

void ncerg_sequence_free(ncerg_sequence* s) { delete s; }

ncerg_status ncerg_sequence_prefix(const ncerg_sequence* s, size_t n, uint64_t* out) {
  return guarded([&]() {
    if (!s || !out) throw std::invalid_argument("ncerg_sequence_prefix: null argument");
    const auto prefix = s->spec.prefix(n);
    for (size_t i = 0; i < prefix.size(); ++i) out[i] = prefix[i];
    return NCERG_OK;
  });
}

ncerg_status ncerg_sequence_partial_density(const ncerg_sequence* s, uint64_t n, double* out) {
  return guarded([&]() {
    if (!s || !out) throw std::invalid_argument("ncerg_sequence_partial_density: null argument");
    *out = ncerg::partial_density(s->spec, n);
    return NCERG_OK;
  });
}

ncerg_status ncerg_weights_from_json(const char* text, ncerg_weights** out) {
  return guarded([&]() {
    if (!out) throw std::invalid_argument("ncerg_weights_from_json: null output");
    *out = new ncerg_weights{ncerg::weights_from_json(parse_json(text, "weights"))};
    return NCERG_OK;
  });
}

void ncerg_weights_free(ncerg_weights* w) { delete w; }

ncerg_status ncerg_weights_sup_bound(const ncerg_weights* w, double* out) {
  return guarded([&]() {
    if (!w || !out) throw std::invalid_argument("ncerg_weights_sup_bound: null argument");
    *out = w->w.sup_bound();
    return NCERG_OK;
  });
}

ncerg_status ncerg_weights_prefix(const ncerg_weights* w, size_t n, double* re, double* im) {
  return guarded([&]() {
    if (!w || !re || !im) throw std::invalid_argument("ncerg_weights_prefix: null argument");
    const auto prefix = w->w.prefix(n);
    for (size_t i = 0; i < prefix.size(); ++i) {
      re[i] = prefix[i].real();
      im[i] = prefix[i].imag();
    }
    return NCERG_OK;
  });
}

ncerg_status ncerg_average_checkpoints(const ncerg_operator* op, const ncerg_element* x,
                                       const ncerg_weights* beta, const ncerg_sequence* k,
                                       const uint64_t* checkpoints, size_t count,
                                       char** out_json) {
  return guarded([&]() {
    if (!op || !x || !checkpoints || !out_json || count == 0)
      throw std::invalid_argument("ncerg_average_checkpoints: null argument");
    std::vector<uint64_t> ns(checkpoints, checkpoints + count);
    std::optional<ncerg::WeightSequence> wopt;
    if (beta) wopt = beta->w;
    std::optional<ncerg::SubsequenceSpec> kopt;
    if (k) kopt = k->spec;
    const auto points = ncerg::stream_checkpoints(op->op, x->value, wopt, kopt, ns);
    json arr = json::array();
    for (const auto& [n, value] : points)
      arr.push_back(json{{"n", n}, {"value", ncerg::element_to_json(value)}});
    *out_json = dup_string(arr.dump());
    return NCERG_OK;
  });
}

ncerg_status ncerg_run_experiment(const char* config_json, const char* out_dir,
                                  const uint64_t* seed_override, char** report_json) {
  return guarded([&]() {
    if (!out_dir) throw std::invalid_argument("ncerg_run_experiment: null output directory");
    ncerg::ExperimentConfig config =
        ncerg::parse_experiment_config(parse_json(config_json, "config"));
    if (seed_override) config.seed = *seed_override;
    const json report = ncerg::run_experiment(config, out_dir);
    if (report_json) *report_json = dup_string(report.dump(2) + "\n");
    return NCERG_OK;
  });
}

ncerg_status ncerg_check_ds(const char* recipe_file_json, int use_scaling_hook,
                            double hook_factor, uint64_t samples, double tol, uint64_t seed,
                            char** report_json) {
  return guarded([&]() {
    std::optional<double> hook;
    if (use_scaling_hook) hook = hook_factor;
    const ncerg::DriverResult res = ncerg::check_ds_driver(
        parse_json(recipe_file_json, "recipe file"), hook, samples, tol, seed);
    if (report_json) *report_json = dup_string(res.report.dump(2) + "\n");
    if (!res.check_passed) return fail(NCERG_E_CHECK, "DS+ verification failed");
    return NCERG_OK;
  });
}

ncerg_status ncerg_gen_seq(const char* sequence_json, uint64_t n, char** csv_out) {
  return guarded([&]() {
    if (!csv_out) throw std::invalid_argument("ncerg_gen_seq: null output");
    *csv_out = dup_string(ncerg::gen_seq_driver(parse_json(sequence_json, "sequence"), n));
    return NCERG_OK;
  });
}

ncerg_status ncerg_probe_buem(const char* config_json, char** report_json) {
  return guarded([&]() {
    const ncerg::DriverResult res =
        ncerg::probe_buem_driver(parse_json(config_json, "config"));
    if (report_json) *report_json = dup_string(res.report.dump(2) + "\n");
    if (!res.check_passed) return fail(NCERG_E_CHECK, "b.u.e.m. probe failed");
    return NCERG_OK;
  });
}

ncerg_status ncerg_check_identities(uint64_t seed, uint64_t instances, char** report_json) {
  return guarded([&]() {
    const ncerg::DriverResult res = ncerg::check_identities_driver(seed, instances);
    if (report_json) *report_json = dup_string(res.report.dump(2) + "\n");
    if (!res.check_passed)
      return fail(NCERG_E_CHECK, "identity sweep exceeded the residual tolerance");
    return NCERG_OK;
  });
}

}  // extern "C"

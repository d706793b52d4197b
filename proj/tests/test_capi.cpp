// Exercises the shared library strictly through the C header.
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ncerg.h"

namespace {

constexpr const char* kAlgebraM2 = R"({"blocks":[{"dim":2,"weight":1.0}]})";

struct AlgebraHandle {
  ncerg_algebra* p = nullptr;
  explicit AlgebraHandle(const char* json) { REQUIRE(ncerg_algebra_from_json(json, &p) == NCERG_OK); }
  ~AlgebraHandle() { ncerg_algebra_free(p); }
};

std::string take(char* s) {
  REQUIRE(s != nullptr);
  std::string out(s);
  ncerg_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("version and error text are always available") {
  CHECK(std::strcmp(ncerg_version(), "0.1.0") == 0);
  CHECK(ncerg_last_error() != nullptr);
}

TEST_CASE("algebra handles") {
  AlgebraHandle a(kAlgebraM2);
  size_t dim = 0;
  CHECK(ncerg_algebra_total_dim(a.p, &dim) == NCERG_OK);
  CHECK(dim == 2);
  double tau1 = 0.0;
  CHECK(ncerg_algebra_trace_of_identity(a.p, &tau1) == NCERG_OK);
  CHECK(tau1 == doctest::Approx(2.0));

  ncerg_algebra* bad = nullptr;
  CHECK(ncerg_algebra_from_json("{\"blocks\":[]}", &bad) == NCERG_E_VALIDATION);
  CHECK(std::string(ncerg_last_error()).find("blocks") != std::string::npos);
  CHECK(ncerg_algebra_from_json("not json", &bad) == NCERG_E_VALIDATION);
}

TEST_CASE("element construction, norms and trace through the C surface") {
  AlgebraHandle a(kAlgebraM2);
  ncerg_element* x = nullptr;
  REQUIRE(ncerg_element_from_json(a.p, R"({"blocks":[[3,0,0,0,0,0,-4,0]]})", &x) == NCERG_OK);

  double re = 0.0, im = 0.0;
  CHECK(ncerg_element_trace(x, &re, &im) == NCERG_OK);
  CHECK(re == doctest::Approx(-1.0));
  CHECK(im == doctest::Approx(0.0));

  double n1 = 0.0, ninf = 0.0;
  CHECK(ncerg_element_schatten_norm(x, 1.0, &n1) == NCERG_OK);
  CHECK(n1 == doctest::Approx(7.0));
  CHECK(ncerg_element_schatten_norm(x, INFINITY, &ninf) == NCERG_OK);
  CHECK(ninf == doctest::Approx(4.0));
  CHECK(ncerg_element_schatten_norm(x, 0.5, &n1) == NCERG_E_VALIDATION);

  char* json = nullptr;
  REQUIRE(ncerg_element_to_json(x, &json) == NCERG_OK);
  ncerg_element* back = nullptr;
  REQUIRE(ncerg_element_from_json(a.p, json, &back) == NCERG_OK);
  ncerg_string_free(json);
  ncerg_element_free(back);
  ncerg_element_free(x);
}

TEST_CASE("random elements respect the requested norm") {
  AlgebraHandle a(kAlgebraM2);
  ncerg_element* x = nullptr;
  REQUIRE(ncerg_element_random(a.p, 9, 2.0, 1.5, &x) == NCERG_OK);
  double n2 = 0.0;
  CHECK(ncerg_element_schatten_norm(x, 2.0, &n2) == NCERG_OK);
  CHECK(n2 == doctest::Approx(1.5).epsilon(1e-12));
  ncerg_element_free(x);
}

TEST_CASE("operator application and fixed-space projection") {
  AlgebraHandle a(kAlgebraM2);
  ncerg_operator* op = nullptr;
  // basis swap
  REQUIRE(ncerg_operator_from_json(a.p, R"({"kind":"permutation","perm":[1,0]})", &op) ==
          NCERG_OK);
  ncerg_element* x = nullptr;
  REQUIRE(ncerg_element_from_json(a.p, R"({"blocks":[[1,0,0,0,0,0,0,0]]})", &x) == NCERG_OK);
  ncerg_element* tx = nullptr;
  REQUIRE(ncerg_operator_apply(op, x, &tx) == NCERG_OK);
  char* json = nullptr;
  REQUIRE(ncerg_element_to_json(tx, &json) == NCERG_OK);
  CHECK(take(json) == R"({"blocks":[[0.0,0.0,0.0,0.0,0.0,0.0,1.0,0.0]]})");

  ncerg_element* ex = nullptr;
  REQUIRE(ncerg_operator_fixed_space_apply(op, x, &ex) == NCERG_OK);
  double tr_re = 0.0, tr_im = 0.0;
  CHECK(ncerg_element_trace(ex, &tr_re, &tr_im) == NCERG_OK);
  CHECK(tr_re == doctest::Approx(1.0));  // projection preserves the trace here

  ncerg_element_free(ex);
  ncerg_element_free(tx);
  ncerg_element_free(x);
  ncerg_operator_free(op);

  ncerg_operator* bad = nullptr;
  CHECK(ncerg_operator_from_json(a.p, R"({"kind":"nope"})", &bad) == NCERG_E_VALIDATION);
}

TEST_CASE("sequence and weight handles") {
  ncerg_sequence* s = nullptr;
  REQUIRE(ncerg_sequence_from_json(R"({"kind":"blocks","rule":"squares"})", &s) == NCERG_OK);
  uint64_t prefix[7] = {0};
  REQUIRE(ncerg_sequence_prefix(s, 7, prefix) == NCERG_OK);
  CHECK(prefix[3] == 4);
  CHECK(prefix[6] == 9);
  double density = 0.0;
  CHECK(ncerg_sequence_partial_density(s, 9, &density) == NCERG_OK);
  CHECK(density == doctest::Approx(0.7));  // {0,1,2,4,5,6,9} below 9
  ncerg_sequence_free(s);

  ncerg_weights* w = nullptr;
  REQUIRE(ncerg_weights_from_json(
              R"({"kind":"trig_poly","r":[1.0],"lambda_args":[3.141592653589793]})", &w) ==
          NCERG_OK);
  double bound = 0.0;
  CHECK(ncerg_weights_sup_bound(w, &bound) == NCERG_OK);
  CHECK(bound == doctest::Approx(1.0));
  double re[4], im[4];
  REQUIRE(ncerg_weights_prefix(w, 4, re, im) == NCERG_OK);
  CHECK(re[0] == doctest::Approx(1.0));
  CHECK(re[1] == doctest::Approx(-1.0));
  ncerg_weights_free(w);
}

TEST_CASE("average checkpoints across the C surface") {
  AlgebraHandle a(kAlgebraM2);
  ncerg_operator* op = nullptr;
  REQUIRE(ncerg_operator_from_json(a.p, R"({"kind":"permutation","perm":[1,0]})", &op) ==
          NCERG_OK);
  ncerg_element* x = nullptr;
  REQUIRE(ncerg_element_from_json(a.p, R"({"blocks":[[1,0,0,0,0,0,0,0]]})", &x) == NCERG_OK);
  const uint64_t ns[2] = {1, 2};
  char* json = nullptr;
  REQUIRE(ncerg_average_checkpoints(op, x, nullptr, nullptr, ns, 2, &json) == NCERG_OK);
  const std::string text = take(json);
  // M_2 of the swap on diag(1,0) is diag(1/2,1/2)
  CHECK(text.find("0.5") != std::string::npos);
  ncerg_element_free(x);
  ncerg_operator_free(op);
}

TEST_CASE("check-identities and check-ds entry points") {
  char* report = nullptr;
  CHECK(ncerg_check_identities(0, 10, &report) == NCERG_OK);
  CHECK(take(report).find("max_relative_identity_residual") != std::string::npos);

  const std::string recipe = std::string(R"({"algebra":)") + kAlgebraM2 +
                             R"(,"operator":{"kind":"permutation","perm":[1,0]}})";
  report = nullptr;
  CHECK(ncerg_check_ds(recipe.c_str(), 0, 0.0, 20, 1e-10, 1, &report) == NCERG_OK);
  CHECK(take(report).find("\"passed\": true") != std::string::npos);

  report = nullptr;
  CHECK(ncerg_check_ds(recipe.c_str(), 1, 2.0, 10, 1e-10, 1, &report) == NCERG_E_CHECK);
  CHECK(take(report).find("\"passed\": false") != std::string::npos);
}

TEST_CASE("gen-seq and experiment bundle through the C surface") {
  char* csv = nullptr;
  REQUIRE(ncerg_gen_seq(R"({"kind":"full"})", 3, &csv) == NCERG_OK);
  CHECK(take(csv).rfind("n,k,N_I,partial_density,sup_ratio\n0,0,", 0) == 0);

  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "ncerg_capi_run";
  fs::remove_all(dir);

  std::ostringstream cfg;
  cfg << R"({"algebra":)" << kAlgebraM2
      << R"(,"operator":{"kind":"permutation","perm":[1,0]},)"
      << R"("sequence":{"kind":"full"},"weights":{"kind":"constant","value":1.0},)"
      << R"("input":{"seed":3,"norm_target":1.0,"p":2.0},"horizon":64,)"
      << R"("probe":{"epsilon_frac":0.1,"delta":0.05,"p":1.0,"samples":2,"horizon":16}})";
  char* report = nullptr;
  REQUIRE(ncerg_run_experiment(cfg.str().c_str(), dir.string().c_str(), nullptr, &report) ==
          NCERG_OK);
  CHECK(take(report).find("witness") != std::string::npos);
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "manifest.json"));

  // seed override is reflected in the manifest
  const uint64_t seed = 99;
  const fs::path dir2 = fs::temp_directory_path() / "ncerg_capi_run2";
  fs::remove_all(dir2);
  REQUIRE(ncerg_run_experiment(cfg.str().c_str(), dir2.string().c_str(), &seed, nullptr) ==
          NCERG_OK);
  std::ifstream manifest(dir2 / "manifest.json");
  std::ostringstream mtext;
  mtext << manifest.rdbuf();
  CHECK(mtext.str().find("\"seed\": 99") != std::string::npos);
}

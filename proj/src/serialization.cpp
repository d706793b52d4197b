#include "ncerg/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

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

cplx complex_from_json(const json& j, const char* what) {
  if (j.is_number()) return cplx(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return cplx(j[0].get<double>(), j[1].get<double>());
  throw std::invalid_argument(std::string(what) + ": expected a number or [re, im] pair");
}

json complex_to_json(cplx v) {
  if (v.imag() == 0.0) return json(v.real());
  return json::array({v.real(), v.imag()});
}

json matrix_to_json(const CMatrix& m) {
  json arr = json::array();
  for (const auto& v : m.data()) {
    arr.push_back(v.real());
    arr.push_back(v.imag());
  }
  return arr;
}

CMatrix matrix_from_json(const json& j, std::size_t dim, const char* what) {
  if (!j.is_array() || j.size() != 2 * dim * dim)
    throw std::invalid_argument(std::string(what) +
                                ": block data must be a re/im interleaved array of length 2*dim^2");
  CMatrix m(dim);
  auto& data = m.data();
  for (std::size_t i = 0; i < dim * dim; ++i)
    data[i] = cplx(j[2 * i].get<double>(), j[2 * i + 1].get<double>());
  return m;
}

}  // namespace

json algebra_to_json(const AlgebraSpec& spec) {
  json blocks = json::array();
  for (const auto& b : spec.blocks())
    blocks.push_back(json{{"dim", b.dim}, {"weight", b.weight}});
  return json{{"blocks", blocks}};
}

AlgebraPtr algebra_from_json(const json& j) {
  check_keys(j, {"blocks"}, "algebra");
  const json& blocks = require(j, "blocks", "algebra");
  if (!blocks.is_array() || blocks.empty())
    throw std::invalid_argument("algebra: \"blocks\" must be a non-empty array");
  std::vector<AlgebraSpec::Block> out;
  for (const auto& b : blocks) {
    check_keys(b, {"dim", "weight"}, "algebra block");
    out.push_back({require(b, "dim", "algebra block").get<std::size_t>(),
                   require(b, "weight", "algebra block").get<double>()});
  }
  return make_algebra(std::move(out));
}

json element_to_json(const OperatorElement& x) {
  json blocks = json::array();
  for (const auto& b : x.blocks()) blocks.push_back(matrix_to_json(b));
  return json{{"blocks", blocks}};
}

OperatorElement element_from_json(const AlgebraPtr& algebra, const json& j) {
  check_keys(j, {"blocks"}, "element");
  const json& blocks = require(j, "blocks", "element");
  if (!blocks.is_array() || blocks.size() != algebra->block_count())
    throw std::invalid_argument("element: block count does not match the algebra");
  std::vector<CMatrix> out;
  for (std::size_t i = 0; i < blocks.size(); ++i)
    out.push_back(matrix_from_json(blocks[i], algebra->blocks()[i].dim, "element"));
  return OperatorElement(algebra, std::move(out));
}

json recipe_to_json(const DSOperator& op) {
  struct Visitor {
    json operator()(const UnitaryConjugation& r) const {
      return json{{"kind", "unitary_conjugation"}, {"u", element_to_json(r.u)["blocks"]}};
    }
    json operator()(const MixedUnitary& r) const {
      json terms = json::array();
      for (const auto& t : r.terms)
        terms.push_back(json{{"p", t.p}, {"u", element_to_json(t.u)["blocks"]}});
      return json{{"kind", "mixed_unitary"}, {"terms", terms}};
    }
    json operator()(const PermutationConjugation& r) const {
      return json{{"kind", "permutation"}, {"perm", r.perm}};
    }
    json operator()(const BlockConditionalExpectation& r) const {
      return json{{"kind", "block_conditional_expectation"}, {"partition", r.cell_sizes}};
    }
    json operator()(const Composition& r) const {
      json factors = json::array();
      for (const auto& f : r.factors) factors.push_back(recipe_to_json(f));
      return json{{"kind", "composition"}, {"factors", factors}};
    }
  };
  return std::visit(Visitor{}, op.recipe());
}

namespace {

OperatorElement unitary_from_json(const AlgebraPtr& algebra, const json& j, const char* what) {
  if (!j.is_array())
    throw std::invalid_argument(std::string(what) + ": unitary must be an array of blocks");
  return element_from_json(algebra, json{{"blocks", j}});
}

}  // namespace

DSOperator operator_from_json(const AlgebraPtr& algebra, const json& j) {
  const std::string kind = require(j, "kind", "operator").get<std::string>();
  if (kind == "unitary_conjugation") {
    check_keys(j, {"kind", "u"}, "operator");
    return DSOperator(algebra,
                      UnitaryConjugation{unitary_from_json(algebra, require(j, "u", "operator"),
                                                           "unitary_conjugation")});
  }
  if (kind == "mixed_unitary") {
    check_keys(j, {"kind", "terms"}, "operator");
    const json& terms = require(j, "terms", "operator");
    if (!terms.is_array() || terms.empty())
      throw std::invalid_argument("mixed_unitary: \"terms\" must be a non-empty array");
    MixedUnitary mu;
    for (const auto& t : terms) {
      check_keys(t, {"p", "u"}, "mixed_unitary term");
      mu.terms.push_back({require(t, "p", "mixed_unitary term").get<double>(),
                          unitary_from_json(algebra, require(t, "u", "mixed_unitary term"),
                                            "mixed_unitary")});
    }
    return DSOperator(algebra, std::move(mu));
  }
  if (kind == "permutation") {
    check_keys(j, {"kind", "perm"}, "operator");
    return DSOperator(algebra, PermutationConjugation{
                                   require(j, "perm", "operator").get<std::vector<std::size_t>>()});
  }
  if (kind == "block_conditional_expectation") {
    check_keys(j, {"kind", "partition"}, "operator");
    return DSOperator(algebra,
                      BlockConditionalExpectation{
                          require(j, "partition", "operator")
                              .get<std::vector<std::vector<std::size_t>>>()});
  }
  if (kind == "composition") {
    check_keys(j, {"kind", "factors"}, "operator");
    const json& factors = require(j, "factors", "operator");
    if (!factors.is_array() || factors.empty())
      throw std::invalid_argument("composition: \"factors\" must be a non-empty array");
    Composition comp;
    for (const auto& f : factors) comp.factors.push_back(operator_from_json(algebra, f));
    return DSOperator(algebra, std::move(comp));
  }
  throw std::invalid_argument("operator: unknown kind \"" + kind + "\"");
}

json sequence_to_json(const SubsequenceSpec& spec) {
  struct Visitor {
    json operator()(const FullSeq&) const { return json{{"kind", "full"}}; }
    json operator()(const ExplicitSeq& s) const {
      return json{{"kind", "explicit"}, {"terms", s.terms}};
    }
    json operator()(const ArithmeticSeq& s) const {
      return json{{"kind", "arithmetic"}, {"stride", s.stride}, {"offset", s.offset}};
    }
    json operator()(const ComplementSeq& s) const {
      json sparse;
      switch (s.sparse.kind()) {
        case SparseRule::Kind::None: sparse = "none"; break;
        case SparseRule::Kind::Evens: sparse = "evens"; break;
        case SparseRule::Kind::Squares: sparse = "squares"; break;
        case SparseRule::Kind::Explicit: sparse = json{{"explicit", s.sparse.members()}}; break;
      }
      return json{{"kind", "complement"}, {"sparse", sparse}};
    }
    json operator()(const BlocksSeq& s) const {
      if (s.intervals.explicit_intervals().empty())
        return json{{"kind", "blocks"}, {"rule", "squares"}};
      json iv = json::array();
      for (const auto& [a, b] : s.intervals.explicit_intervals())
        iv.push_back(json::array({a, b}));
      return json{{"kind", "blocks"}, {"intervals", iv}};
    }
    json operator()(const RotationSeq& s) const {
      json alpha;
      if (!s.apparatus.alpha_name.empty())
        alpha = s.apparatus.alpha_name;
      else
        alpha = s.apparatus.alpha;
      json out{{"kind", "rotation"},
               {"alpha", alpha},
               {"Y", json::array({s.apparatus.arc_lo, s.apparatus.arc_hi})},
               {"omega0", s.apparatus.omega0}};
      if (s.apparatus.alpha_name.empty()) out["alpha_irrational"] = s.apparatus.alpha_irrational;
      return out;
    }
  };
  return std::visit(Visitor{}, spec.generator());
}

SubsequenceSpec sequence_from_json(const json& j) {
  const std::string kind = require(j, "kind", "sequence").get<std::string>();
  if (kind == "full") {
    check_keys(j, {"kind"}, "sequence");
    return SubsequenceSpec::full();
  }
  if (kind == "explicit") {
    check_keys(j, {"kind", "terms"}, "sequence");
    return SubsequenceSpec::explicit_terms(
        require(j, "terms", "sequence").get<std::vector<std::uint64_t>>());
  }
  if (kind == "arithmetic") {
    check_keys(j, {"kind", "stride", "offset"}, "sequence");
    return SubsequenceSpec::arithmetic(require(j, "stride", "sequence").get<std::uint64_t>(),
                                       j.value("offset", std::uint64_t{0}));
  }
  if (kind == "complement") {
    check_keys(j, {"kind", "sparse"}, "sequence");
    const json& sp = require(j, "sparse", "sequence");
    if (sp.is_string()) {
      const std::string name = sp.get<std::string>();
      if (name == "none") return SubsequenceSpec::complement(SparseRule::none());
      if (name == "evens") return SubsequenceSpec::complement(SparseRule::evens());
      if (name == "squares") return SubsequenceSpec::complement(SparseRule::squares());
      throw std::invalid_argument("sequence: unknown sparse rule \"" + name + "\"");
    }
    check_keys(sp, {"explicit"}, "sparse rule");
    return SubsequenceSpec::complement(SparseRule::explicit_set(
        require(sp, "explicit", "sparse rule").get<std::vector<std::uint64_t>>()));
  }
  if (kind == "blocks") {
    if (j.contains("rule")) {
      check_keys(j, {"kind", "rule"}, "sequence");
      const std::string rule = j.at("rule").get<std::string>();
      if (rule != "squares")
        throw std::invalid_argument("sequence: unknown block rule \"" + rule + "\"");
      return SubsequenceSpec::blocks(IntervalBlocks::squares());
    }
    check_keys(j, {"kind", "intervals"}, "sequence");
    std::vector<std::pair<std::uint64_t, std::uint64_t>> iv;
    for (const auto& pair : require(j, "intervals", "sequence")) {
      if (!pair.is_array() || pair.size() != 2)
        throw std::invalid_argument("sequence: intervals must be [a, b] pairs");
      iv.emplace_back(pair[0].get<std::uint64_t>(), pair[1].get<std::uint64_t>());
    }
    return SubsequenceSpec::blocks(IntervalBlocks::explicit_list(std::move(iv)));
  }
  if (kind == "rotation") {
    check_keys(j, {"kind", "alpha", "alpha_irrational", "Y", "omega0"}, "sequence");
    const json& arc = require(j, "Y", "sequence");
    if (!arc.is_array() || arc.size() != 2)
      throw std::invalid_argument("sequence: \"Y\" must be [u, v]");
    const double lo = arc[0].get<double>();
    const double hi = arc[1].get<double>();
    const double omega0 = j.value("omega0", 0.0);
    const json& alpha = require(j, "alpha", "sequence");
    if (alpha.is_string()) {
      const std::string name = alpha.get<std::string>();
      if (name == "golden") return SubsequenceSpec::rotation(Apparatus::golden(lo, hi, omega0));
      if (name == "sqrt2m1") return SubsequenceSpec::rotation(Apparatus::sqrt2m1(lo, hi, omega0));
      throw std::invalid_argument("sequence: unknown named rotation angle \"" + name + "\"");
    }
    return SubsequenceSpec::rotation(
        Apparatus::custom(alpha.get<double>(), j.value("alpha_irrational", false), lo, hi, omega0));
  }
  throw std::invalid_argument("sequence: unknown kind \"" + kind + "\"");
}

json weights_to_json(const WeightSequence& w) {
  struct Visitor {
    json operator()(const ConstantWeights& c) const {
      return json{{"kind", "constant"}, {"value", complex_to_json(c.value)}};
    }
    json operator()(const ExplicitWeights& e) const {
      json values = json::array();
      for (const auto& v : e.values) values.push_back(complex_to_json(v));
      return json{{"kind", "explicit"}, {"values", values}};
    }
    json poly_json(const TrigPolynomial& p) const {
      json r = json::array();
      for (const auto& coeff : p.coefficients) r.push_back(complex_to_json(coeff));
      return json{{"r", r}, {"lambda_args", p.angles}};
    }
    json operator()(const TrigPolyWeights& t) const {
      json out = poly_json(t.poly);
      out["kind"] = "trig_poly";
      return out;
    }
    json operator()(const TrigPolyDecayWeights& t) const {
      json decay;
      if (t.decay.kind == DecayRule::Kind::Harmonic)
        decay = "harmonic";
      else
        decay = json{{"kind", "geometric"}, {"ratio", t.decay.ratio}};
      return json{{"kind", "trig_poly_decay"}, {"poly", poly_json(t.poly)}, {"decay", decay}};
    }
    json operator()(const IndicatorWeights& i) const {
      return json{{"kind", "indicator"}, {"sequence", sequence_to_json(i.sequence)}};
    }
    json operator()(const std::shared_ptr<const ProductWeights>& p) const {
      return json{{"kind", "product"},
                  {"left", weights_to_json(p->lhs)},
                  {"right", weights_to_json(p->rhs)}};
    }
  };
  return std::visit(Visitor{}, w.generator());
}

namespace {

TrigPolynomial poly_from_json(const json& j, const char* what) {
  check_keys(j, {"r", "lambda_args"}, what);
  TrigPolynomial p;
  for (const auto& coeff : require(j, "r", what)) p.coefficients.push_back(complex_from_json(coeff, what));
  p.angles = require(j, "lambda_args", what).get<std::vector<double>>();
  p.validate();
  return p;
}

}  // namespace

WeightSequence weights_from_json(const json& j) {
  const std::string kind = require(j, "kind", "weights").get<std::string>();
  if (kind == "constant") {
    check_keys(j, {"kind", "value"}, "weights");
    return WeightSequence::constant(complex_from_json(require(j, "value", "weights"), "weights"));
  }
  if (kind == "explicit") {
    check_keys(j, {"kind", "values"}, "weights");
    std::vector<cplx> values;
    for (const auto& v : require(j, "values", "weights"))
      values.push_back(complex_from_json(v, "weights"));
    return WeightSequence::explicit_values(std::move(values));
  }
  if (kind == "trig_poly") {
    check_keys(j, {"kind", "r", "lambda_args"}, "weights");
    json poly = j;
    poly.erase("kind");
    return WeightSequence::trig_poly(poly_from_json(poly, "trig_poly"));
  }
  if (kind == "trig_poly_decay") {
    check_keys(j, {"kind", "poly", "decay"}, "weights");
    DecayRule decay;
    const json& d = require(j, "decay", "weights");
    if (d.is_string()) {
      if (d.get<std::string>() != "harmonic")
        throw std::invalid_argument("weights: unknown decay rule \"" + d.get<std::string>() + "\"");
      decay.kind = DecayRule::Kind::Harmonic;
    } else {
      check_keys(d, {"kind", "ratio"}, "decay rule");
      if (require(d, "kind", "decay rule").get<std::string>() != "geometric")
        throw std::invalid_argument("weights: unknown decay rule kind");
      decay.kind = DecayRule::Kind::Geometric;
      decay.ratio = require(d, "ratio", "decay rule").get<double>();
    }
    return WeightSequence::trig_poly_decay(poly_from_json(require(j, "poly", "weights"), "trig_poly_decay"),
                                           decay);
  }
  if (kind == "indicator") {
    check_keys(j, {"kind", "sequence"}, "weights");
    return WeightSequence::indicator(sequence_from_json(require(j, "sequence", "weights")));
  }
  if (kind == "product") {
    check_keys(j, {"kind", "left", "right"}, "weights");
    return WeightSequence::product(weights_from_json(require(j, "left", "weights")),
                                   weights_from_json(require(j, "right", "weights")));
  }
  throw std::invalid_argument("weights: unknown kind \"" + kind + "\"");
}

json report_to_json(const ConvergenceReport& report) {
  json raw = json::array();
  for (const auto& [m, r] : report.raw_curve) raw.push_back(json::array({m, r}));
  json env = json::array();
  for (const auto& [m, r] : report.envelope_curve) env.push_back(json::array({m, r}));
  return json{{"mode", report.mode == WitnessMode::Bilateral ? "bilateral" : "onesided"},
              {"epsilon", report.epsilon},
              {"delta_target", report.delta_target},
              {"horizon", report.horizon},
              {"family", report.family},
              {"residuals", raw},
              {"residual_envelope", env},
              {"decision", report.converging ? "converging" : "inconclusive"},
              {"best_lambda", report.best_lambda},
              {"trace_complement", report.trace_complement}};
}

json buem_result_to_json(const BuemProbeResult& r) {
  return json{{"p", r.p},
              {"epsilon", r.epsilon},
              {"delta", r.delta},
              {"weight_bound", r.weight_bound},
              {"gamma", r.gamma},
              {"k_sup_ratio", r.k_sup_ratio},
              {"mode", r.mode == WitnessMode::Bilateral ? "bilateral" : "onesided"},
              {"horizon", r.horizon},
              {"samples_attempted", r.samples_attempted},
              {"samples_passed", r.samples_passed},
              {"worst_lambda", r.worst_lambda},
              {"worst_supnorm", r.worst_supnorm},
              {"worst_trace_complement", r.worst_trace_complement},
              {"gamma_underflow", r.gamma_underflow},
              {"passed", r.passed}};
}

json ds_verification_to_json(const DSVerification& v) {
  return json{{"samples", v.samples},
              {"max_ratio_l1", v.max_ratio_l1},
              {"max_ratio_op", v.max_ratio_op},
              {"min_positive_eig", v.min_positive_eig},
              {"tol", v.tol},
              {"passed", v.passed}};
}

std::string reports_to_csv(const ConvergenceReport& bilateral, const ConvergenceReport& onesided) {
  if (bilateral.raw_curve.size() != onesided.raw_curve.size())
    throw std::invalid_argument("reports_to_csv: reports use different grids");
  std::string out = "n,r_bilateral,r_onesided,trace_complement\n";
  char line[160];
  for (std::size_t i = 0; i < bilateral.raw_curve.size(); ++i) {
    if (bilateral.raw_curve[i].first != onesided.raw_curve[i].first)
      throw std::invalid_argument("reports_to_csv: reports use different grids");
    std::snprintf(line, sizeof(line), "%llu,%.17g,%.17g,%.17g\n",
                  static_cast<unsigned long long>(bilateral.raw_curve[i].first),
                  bilateral.raw_curve[i].second, onesided.raw_curve[i].second,
                  bilateral.trace_complement);
    out += line;
  }
  return out;
}

}  // namespace ncerg

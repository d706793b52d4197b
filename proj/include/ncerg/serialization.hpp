#ifndef NCERG_SERIALIZATION_HPP
#define NCERG_SERIALIZATION_HPP

#include <json.hpp>

#include "ncerg/convergence.hpp"
#include "ncerg/ds_operator.hpp"

namespace ncerg {

using json = nlohmann::json;

// All parsers are strict: unknown fields are rejected with
// std::invalid_argument naming the offending key.

json algebra_to_json(const AlgebraSpec& spec);
AlgebraPtr algebra_from_json(const json& j);

// Matrices serialize as row-major interleaved [re, im, re, im, ...] arrays,
// one per block.
json element_to_json(const OperatorElement& x);
OperatorElement element_from_json(const AlgebraPtr& algebra, const json& j);

json recipe_to_json(const DSOperator& op);
DSOperator operator_from_json(const AlgebraPtr& algebra, const json& j);

json sequence_to_json(const SubsequenceSpec& spec);
SubsequenceSpec sequence_from_json(const json& j);

json weights_to_json(const WeightSequence& w);
WeightSequence weights_from_json(const json& j);

json report_to_json(const ConvergenceReport& report);
json buem_result_to_json(const BuemProbeResult& result);
json ds_verification_to_json(const DSVerification& report);

// CSV with columns n, r_bilateral, r_onesided, trace_complement; the two
// reports must share their grid.
std::string reports_to_csv(const ConvergenceReport& bilateral, const ConvergenceReport& onesided);

}  // namespace ncerg

#endif

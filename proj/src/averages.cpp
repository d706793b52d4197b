#include "ncerg/averages.hpp"

#include <stdexcept>

namespace ncerg {

AverageStream::AverageStream(DSOperator op, OperatorElement x, std::optional<WeightSequence> beta,
                             std::optional<SubsequenceSpec> k)
    : op_(std::move(op)),
      power_(std::move(x)),
      sum_(OperatorElement::zero(power_.algebra())),
      current_(sum_),
      k_(k ? SequenceCursor(*k) : SequenceCursor(SubsequenceSpec::full())) {
  if (!same_algebra(power_, sum_))
    throw std::invalid_argument("AverageStream: x not in the operator's algebra");
  if (!(*op_.algebra() == *power_.algebra()))
    throw std::invalid_argument("AverageStream: x not in the operator's algebra");
  if (beta) beta_.emplace(*beta);
}

const OperatorElement& AverageStream::advance() {
  const std::uint64_t target = k_.next();
  if (n_ == 0) {
    for (std::uint64_t e = 0; e < target; ++e) power_ = op_.apply(power_);
  } else {
    if (target <= exponent_)
      throw std::invalid_argument("AverageStream: sequence is not strictly increasing");
    for (std::uint64_t e = exponent_; e < target; ++e) power_ = op_.apply(power_);
  }
  exponent_ = target;
  if (beta_) {
    const cplx w = beta_->at(target);
    sum_ += w * power_;
  } else {
    sum_ += power_;
  }
  ++n_;
  current_ = sum_.divided_by(static_cast<double>(n_));
  return current_;
}

const OperatorElement& AverageStream::current() const {
  if (n_ == 0) throw std::logic_error("AverageStream: nothing emitted yet");
  return current_;
}

std::vector<std::pair<std::uint64_t, OperatorElement>> stream_checkpoints(
    const DSOperator& op, const OperatorElement& x, const std::optional<WeightSequence>& beta,
    const std::optional<SubsequenceSpec>& k, const std::vector<std::uint64_t>& checkpoints) {
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || (i > 0 && checkpoints[i] <= checkpoints[i - 1]))
      throw std::invalid_argument("stream_checkpoints: checkpoints must be strictly increasing");
  }
  std::vector<std::pair<std::uint64_t, OperatorElement>> out;
  out.reserve(checkpoints.size());
  AverageStream stream(op, x, beta, k);
  for (std::uint64_t target : checkpoints) {
    while (stream.emitted() < target) stream.advance();
    out.emplace_back(target, stream.current());
  }
  return out;
}

double transfer_identity_check(TransferIdentity variant, const DSOperator& op,
                               const WeightSequence& beta, const SubsequenceSpec& k,
                               const OperatorElement& x, std::uint64_t n) {
  if (n < 1) throw std::invalid_argument("transfer_identity_check: n must be >= 1");
  const WeightSequence cbeta = WeightSequence::product(WeightSequence::indicator(k), beta);

  if (variant == TransferIdentity::SubsequentialAsFull) {
    AverageStream lhs_stream(op, x, beta, k);
    for (std::uint64_t i = 0; i < n; ++i) lhs_stream.advance();
    const OperatorElement lhs = lhs_stream.current();
    const std::uint64_t m = lhs_stream.last_exponent() + 1;  // k_{n-1} + 1

    AverageStream rhs_stream(op, x, cbeta, std::nullopt);
    for (std::uint64_t i = 0; i < m; ++i) rhs_stream.advance();
    const OperatorElement rhs =
        cplx(static_cast<double>(m) / static_cast<double>(n)) * rhs_stream.current();
    return operator_norm(lhs - rhs);
  }

  // IndicatorAsSubsequential
  const std::uint64_t c = count_upto(k, n - 1);
  if (c < 1)
    throw std::invalid_argument(
        "transfer_identity_check: prefix of k too short (c(n-1) = 0)");

  AverageStream lhs_stream(op, x, cbeta, std::nullopt);
  for (std::uint64_t i = 0; i < n; ++i) lhs_stream.advance();
  const OperatorElement lhs = lhs_stream.current();

  AverageStream rhs_stream(op, x, beta, k);
  for (std::uint64_t i = 0; i < c; ++i) rhs_stream.advance();
  const OperatorElement rhs =
      cplx(static_cast<double>(c) / static_cast<double>(n)) * rhs_stream.current();
  return operator_norm(lhs - rhs);
}

GapBound theorem31_gap(const DSOperator& op, const WeightSequence& beta, const SubsequenceSpec& k,
                       const OperatorElement& x, std::uint64_t n) {
  if (n < 1) throw std::invalid_argument("theorem31_gap: n must be >= 1");
  AverageStream sub_stream(op, x, beta, k);
  for (std::uint64_t i = 0; i <= n; ++i) sub_stream.advance();  // consume through k_n
  const std::uint64_t kn = sub_stream.last_exponent();
  if (kn < 1) throw std::invalid_argument("theorem31_gap: k_n must be >= 1");

  // A_n = (n / k_n) M_n^{beta,k}; recompute the n-term average directly.
  AverageStream an_stream(op, x, beta, k);
  for (std::uint64_t i = 0; i < n; ++i) an_stream.advance();
  const OperatorElement a_n =
      cplx(static_cast<double>(n) / static_cast<double>(kn)) * an_stream.current();

  AverageStream full_stream(op, x, beta, std::nullopt);
  for (std::uint64_t i = 0; i < kn; ++i) full_stream.advance();

  GapBound gb;
  gb.measured = operator_norm(full_stream.current() - a_n);
  gb.bound = (static_cast<double>(kn - n) / static_cast<double>(kn)) * beta.sup_bound() *
             operator_norm(x);
  return gb;
}

}  // namespace ncerg

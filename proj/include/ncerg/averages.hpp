#ifndef NCERG_AVERAGES_HPP
#define NCERG_AVERAGES_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "ncerg/ds_operator.hpp"
#include "ncerg/subsequences.hpp"
#include "ncerg/weights.hpp"

namespace ncerg {

// Streaming evaluation of the four average families
//   M_n          = (1/n) sum_{j<n} T^j(x)
//   M_n^k        = (1/n) sum_{j<n} T^{k_j}(x)
//   M_n^beta     = (1/n) sum_{j<n} beta_j T^j(x)
//   M_n^{beta,k} = (1/n) sum_{j<n} beta_{k_j} T^{k_j}(x)
// with one running power of T and one running sum; powers advance by
// k_j - k_{j-1} sequential applications. Emission divides the running sum
// entrywise by n.
class AverageStream {
public:
  AverageStream(DSOperator op, OperatorElement x, std::optional<WeightSequence> beta,
                std::optional<SubsequenceSpec> k);

  // Consumes the next term and returns M_{n+1}.
  const OperatorElement& advance();

  const OperatorElement& current() const;
  std::uint64_t emitted() const { return n_; }

  // Exponent k_{n-1} of the most recently consumed power.
  std::uint64_t last_exponent() const { return exponent_; }

private:
  DSOperator op_;
  OperatorElement power_;  // T^{exponent_}(x)
  OperatorElement sum_;
  OperatorElement current_;
  std::optional<WeightCursor> beta_;
  SequenceCursor k_;
  std::uint64_t exponent_ = 0;
  std::uint64_t n_ = 0;
};

// M_n for every n in checkpoints (which must be strictly increasing).
std::vector<std::pair<std::uint64_t, OperatorElement>> stream_checkpoints(
    const DSOperator& op, const OperatorElement& x, const std::optional<WeightSequence>& beta,
    const std::optional<SubsequenceSpec>& k, const std::vector<std::uint64_t>& checkpoints);

enum class TransferIdentity {
  // M_n^{beta,k} = ((k_{n-1}+1)/n) M_{k_{n-1}+1}^{c beta} with c the indicator
  // weights of k: the subsequential average rewritten as a scaled
  // indicator-weighted full average.
  SubsequentialAsFull,
  // M_n^{c beta} = (c(n-1)/n) M_{c(n-1)}^{beta,k} with c(n) = max{j: k_j<=n}+1:
  // the indicator-weighted full average rewritten subsequentially. One
  // indicator sequence plays both weight roles.
  IndicatorAsSubsequential,
};

// Evaluates both sides of the chosen identity independently and returns
// ||LHS - RHS||_inf. These are exact algebraic identities; residuals are
// floating-point noise only.
double transfer_identity_check(TransferIdentity variant, const DSOperator& op,
                               const WeightSequence& beta, const SubsequenceSpec& k,
                               const OperatorElement& x, std::uint64_t n);

struct GapBound {
  double measured;  // ||M_{k_n}^beta - A_n||_inf
  double bound;     // ((k_n - n)/k_n) ||beta||_inf ||x||_inf
};

// A_n = (1/k_n) sum_{j<n} beta_{k_j} T^{k_j}(x); the deleted-terms estimate
// bounds the gap to the full weighted average at horizon k_n.
GapBound theorem31_gap(const DSOperator& op, const WeightSequence& beta, const SubsequenceSpec& k,
                       const OperatorElement& x, std::uint64_t n);

}  // namespace ncerg

#endif

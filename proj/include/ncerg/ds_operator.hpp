#ifndef NCERG_DS_OPERATOR_HPP
#define NCERG_DS_OPERATOR_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <variant>
#include <vector>

#include "ncerg/algebra.hpp"

namespace ncerg {

class DSOperator;

// Recipes. Every constructible recipe is unital, trace-preserving and
// positivity-preserving, which makes it a positive Dunford-Schwartz operator
// (contraction of both the trace norm and the operator norm).
struct UnitaryConjugation {
  OperatorElement u;  // blockwise unitary; T(x) = u x u^*
};

struct MixedUnitary {
  struct Term {
    double p;
    OperatorElement u;
  };
  std::vector<Term> terms;  // p_i > 0, sum p_i = 1 (to 1e-12)
};

// Permutation of the total basis that maps each block onto itself.
// T(x)_{ij} = x_{perm^{-1}(i), perm^{-1}(j)} within each block.
struct PermutationConjugation {
  std::vector<std::size_t> perm;  // on {0, ..., total_dim - 1}
};

// Pinching onto diagonal sub-blocks: T(x) = sum_k P_k x P_k with P_k the
// diagonal projections of the given partition.
struct BlockConditionalExpectation {
  std::vector<std::vector<std::size_t>> cell_sizes;  // per block, summing to its dim
};

struct Composition {
  std::vector<DSOperator> factors;  // applied first-to-last
};

using DSRecipe = std::variant<UnitaryConjugation, MixedUnitary, PermutationConjugation,
                              BlockConditionalExpectation, Composition>;

class DSOperator {
public:
  DSOperator(AlgebraPtr algebra, DSRecipe recipe);

  const AlgebraPtr& algebra() const { return algebra_; }
  const DSRecipe& recipe() const { return *recipe_; }

  OperatorElement apply(const OperatorElement& x) const;

private:
  AlgebraPtr algebra_;
  std::shared_ptr<const DSRecipe> recipe_;
};

using LinearMap = std::function<OperatorElement(const OperatorElement&)>;

// Test hook: x -> factor * x. Not a constructible recipe; fails DS
// verification for |factor| > 1.
LinearMap scaling_hook(double factor);

struct DSVerification {
  std::uint64_t samples = 0;
  double max_ratio_l1 = 0.0;      // max ||T x||_1 / ||x||_1
  double max_ratio_op = 0.0;      // max ||T x||_inf / ||x||_inf
  double min_positive_eig = 0.0;  // min eigenvalue of T(a) over positive a
  double tol = 0.0;
  bool passed = false;
};

// Samples Ginibre elements and positives (seeded) and checks the two
// contraction ratios and positivity. A failing report is a normal return.
DSVerification verify_ds_plus(const LinearMap& map, const AlgebraPtr& algebra,
                              std::uint64_t sample_count, double tol, std::uint64_t seed);
DSVerification verify_ds_plus(const DSOperator& op, std::uint64_t sample_count, double tol,
                              std::uint64_t seed);

// vec(T(x)) = S vec(x) restricted to one block (row-major vec).
CMatrix block_superoperator(const DSOperator& op, std::size_t block_index);

// Orthogonal projection (w.r.t. the weighted Hilbert-Schmidt inner product)
// onto the fixed space {x : T(x) = x}, i.e. the limit of the full ergodic
// averages. Computed per block from the eigenspace of the Hermitian part of
// the superoperator at eigenvalue 1 (window 1e-8).
class FixedSpaceProjector {
public:
  explicit FixedSpaceProjector(const DSOperator& op);

  OperatorElement operator()(const OperatorElement& x) const;

  const AlgebraPtr& algebra() const { return algebra_; }

private:
  AlgebraPtr algebra_;
  std::vector<CMatrix> block_projectors_;  // d^2 x d^2 per block
};

FixedSpaceProjector fixed_space_projector(const DSOperator& op);

}  // namespace ncerg

#endif

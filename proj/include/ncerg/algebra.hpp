#ifndef NCERG_ALGEBRA_HPP
#define NCERG_ALGEBRA_HPP

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "ncerg/complex_matrix.hpp"

namespace ncerg {

// A finite direct sum of full matrix algebras M_{d_1} (+) ... (+) M_{d_m},
// each block carrying a strictly positive trace weight. The weighted trace
// tau(x) = sum_b w_b Tr(x_b) is the trace of the model.
class AlgebraSpec {
public:
  struct Block {
    std::size_t dim;
    double weight;
  };

  explicit AlgebraSpec(std::vector<Block> blocks);

  const std::vector<Block>& blocks() const { return blocks_; }
  std::size_t block_count() const { return blocks_.size(); }
  std::size_t total_dim() const { return total_dim_; }

  // tau(1) = sum_b w_b * d_b
  double trace_of_identity() const { return trace_identity_; }

  bool operator==(const AlgebraSpec& rhs) const;

private:
  std::vector<Block> blocks_;
  std::size_t total_dim_ = 0;
  double trace_identity_ = 0.0;
};

using AlgebraPtr = std::shared_ptr<const AlgebraSpec>;

AlgebraPtr make_algebra(std::vector<AlgebraSpec::Block> blocks);

// An element of the algebra: one complex matrix per block.
class OperatorElement {
public:
  OperatorElement() = default;
  OperatorElement(AlgebraPtr algebra, std::vector<CMatrix> blocks);

  static OperatorElement zero(const AlgebraPtr& algebra);
  static OperatorElement identity(const AlgebraPtr& algebra);

  const AlgebraPtr& algebra() const { return algebra_; }
  const std::vector<CMatrix>& blocks() const { return blocks_; }
  std::vector<CMatrix>& blocks() { return blocks_; }

  OperatorElement& operator+=(const OperatorElement& rhs);
  OperatorElement& operator-=(const OperatorElement& rhs);
  OperatorElement& operator*=(cplx s);

  OperatorElement adjoint() const;

  // (x + x^*)/2
  OperatorElement hermitian_part() const;

  // Per-entry division; exact whenever each accumulated entry is an exact
  // multiple of the divisor (integer-valued sums in particular).
  OperatorElement divided_by(double n) const;

private:
  AlgebraPtr algebra_;
  std::vector<CMatrix> blocks_;
};

OperatorElement operator+(OperatorElement lhs, const OperatorElement& rhs);
OperatorElement operator-(OperatorElement lhs, const OperatorElement& rhs);
OperatorElement operator*(cplx s, OperatorElement x);
OperatorElement multiply(const OperatorElement& a, const OperatorElement& b);

bool same_algebra(const OperatorElement& a, const OperatorElement& b);
void require_same_algebra(const OperatorElement& a, const OperatorElement& b);

// Weighted trace tau.
cplx trace(const OperatorElement& x);

// ||x||_p = tau(|x|^p)^{1/p}; p = infinity gives the operator norm.
// Rejects p < 1.
double schatten_norm(const OperatorElement& x, double p);

double operator_norm(const OperatorElement& x);

// |x| = (x^* x)^{1/2}
OperatorElement absolute_value(const OperatorElement& x);

// Relative tolerance used to accept nearly self-adjoint inputs; such inputs
// are symmetrized before spectral calculus.
inline constexpr double kSelfAdjointTol = 1e-8;

// Absolute slack applied to closed eigenvalue-interval membership.
inline constexpr double kIntervalSlack = 1e-9;

class Projection {
public:
  // Validates e = e^* = e^2 (and the 0/1 spectrum) to 1e-10.
  explicit Projection(OperatorElement e);

  const OperatorElement& element() const { return e_; }
  OperatorElement complement_element() const;

  // tau(1 - e)
  double trace_complement() const;

private:
  OperatorElement e_;
};

// Spectral projection of a self-adjoint element onto the closed interval
// [lo, hi] (with kIntervalSlack absorbed at both ends). Rejects inputs whose
// hermiticity defect exceeds kSelfAdjointTol relative tolerance.
Projection spectral_projection(const OperatorElement& a, double lo, double hi);

struct EighElement {
  // Per block: ascending eigenvalues and unitary eigenvector matrices.
  std::vector<std::vector<double>> eigenvalues;
  std::vector<CMatrix> eigenvectors;
};

// Blockwise Hermitian eigendecomposition (input symmetrized as in
// spectral_projection).
EighElement eigh(const OperatorElement& a);

double min_eigenvalue(const OperatorElement& a);

struct MeasureBallWitness {
  bool accepted;
  Projection e;                // spectral projection of |x| onto [0, eps]
  double trace_complement;     // tau(e^perp)
  double norm_xe;              // ||x e||_inf
};

// Membership probe for the measure-topology neighborhood V(eps, delta):
// builds e = spectral projection of |x| on [0, eps] and accepts iff
// tau(e^perp) <= delta. A refusal only means this spectral construction
// exceeded the delta budget.
MeasureBallWitness measure_ball_membership(const OperatorElement& x, double eps, double delta);

}  // namespace ncerg

#endif

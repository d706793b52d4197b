#ifndef NCERG_WEIGHTS_HPP
#define NCERG_WEIGHTS_HPP

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "ncerg/subsequences.hpp"

namespace ncerg {

using cplx = std::complex<double>;

// P(k) = sum_j r_j lambda_j^k with |lambda_j| = 1; frequencies are stored as
// angles, lambda_j = exp(i theta_j).
struct TrigPolynomial {
  std::vector<cplx> coefficients;
  std::vector<double> angles;

  void validate() const;

  // sum_j |r_j|, an upper bound for sup_k |P(k)|
  double coefficient_bound() const;
};

// Direct evaluation at a single index; the angle k*theta is reduced mod 2*pi
// in extended precision so large k stay accurate.
cplx eval_trig_poly(const TrigPolynomial& p, std::uint64_t k);

struct DecayRule {
  enum class Kind { Harmonic, Geometric };  // 1/(k+1) or ratio^k
  Kind kind = Kind::Harmonic;
  double ratio = 0.5;  // |ratio| < 1 for Geometric

  double eval(std::uint64_t k) const;
  double bound() const { return 1.0; }  // both families peak at k = 0
};

struct ConstantWeights {
  cplx value = 1.0;
};
struct ExplicitWeights {
  std::vector<cplx> values;
};
struct TrigPolyWeights {
  TrigPolynomial poly;
};
struct TrigPolyDecayWeights {
  TrigPolynomial poly;
  DecayRule decay;
};
struct IndicatorWeights {
  SubsequenceSpec sequence;
};
struct ProductWeights;

class WeightSequence {
public:
  using Generator = std::variant<ConstantWeights, ExplicitWeights, TrigPolyWeights,
                                 TrigPolyDecayWeights, IndicatorWeights,
                                 std::shared_ptr<const ProductWeights>>;

  static WeightSequence constant(cplx value);
  static WeightSequence ones() { return constant(1.0); }
  static WeightSequence explicit_values(std::vector<cplx> values);
  static WeightSequence trig_poly(TrigPolynomial poly);
  static WeightSequence trig_poly_decay(TrigPolynomial poly, DecayRule decay);
  static WeightSequence indicator(SubsequenceSpec sequence);
  static WeightSequence product(WeightSequence lhs, WeightSequence rhs);

  const Generator& generator() const { return *gen_; }

  // Cached upper bound for sup_j |beta_j|.
  double sup_bound() const { return bound_; }

  std::vector<cplx> prefix(std::size_t n) const;

private:
  WeightSequence(Generator g, double bound);
  std::shared_ptr<const Generator> gen_;
  double bound_ = 0.0;
};

struct ProductWeights {
  WeightSequence lhs;
  WeightSequence rhs;
};

// Streams beta_j at nondecreasing indices j. Trigonometric weights advance by
// incremental phase multiplication (extended-precision accumulators,
// re-normalized to the unit circle every 1e4 steps).
class WeightCursor {
public:
  explicit WeightCursor(const WeightSequence& w);

  // j must be nondecreasing across calls.
  cplx at(std::uint64_t j);

private:
  struct TrigState {
    std::vector<std::complex<long double>> phases;   // lambda_j^k
    std::vector<std::complex<long double>> steps;    // lambda_j
    std::uint64_t k = 0;
    std::uint64_t since_renorm = 0;
  };
  struct IndicatorState {
    SequenceCursor cursor;
    std::uint64_t upcoming = 0;
    bool exhausted = false;
  };

  cplx eval(std::uint64_t j);

  std::shared_ptr<const WeightSequence::Generator> gen_;
  double bound_ = 0.0;
  std::optional<TrigState> trig_;
  std::optional<IndicatorState> indicator_;
  std::vector<std::unique_ptr<WeightCursor>> children_;
  std::uint64_t last_ = 0;
  bool started_ = false;
};

// (1/n) sum_{k<n} |beta_k - P(k)|
double besicovich_deviation(const WeightSequence& beta, const TrigPolynomial& p, std::uint64_t n);

// Empirical sustained-deviation check: deviations at n, 2n, 4n, ... all below
// eps. This certifies nothing about the limsup; it is a desk-scale probe.
struct BesicovichCertificate {
  bool sustained = false;
  std::vector<std::pair<std::uint64_t, double>> curve;
};
BesicovichCertificate besicovich_certificate(const WeightSequence& beta, const TrigPolynomial& p,
                                             double eps, std::uint64_t n_start, int doublings);

// Finite-n estimate of the correlation gamma_alpha(m); negative m are reduced
// by conjugate symmetry.
cplx correlation_estimate(const WeightSequence& alpha, std::int64_t m, std::uint64_t n);

}  // namespace ncerg

#endif

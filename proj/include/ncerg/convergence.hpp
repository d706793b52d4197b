#ifndef NCERG_CONVERGENCE_HPP
#define NCERG_CONVERGENCE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ncerg/averages.hpp"

namespace ncerg {

enum class WitnessMode { Bilateral, Onesided };

struct Witness {
  Projection e;
  double lambda;  // sup-norm bound certified by e
};

// Projection witness for a finite family:
//   bilateral: b = sum_n |h_n| with h_n the Hermitian part of y_n,
//              e = spectral projection of b on [0, lambda];
//              then e b e >= e |h_n| e termwise gives ||e h_n e||_inf <= lambda.
//   onesided:  b = sum_n y_n^* y_n, e = spectral projection on [0, lambda^2];
//              then ||y_n e||_inf <= lambda for the raw members.
// lambda is the smallest spectral threshold of b whose projection meets the
// trace budget tau(e^perp) <= eps.
Witness find_witness(const std::vector<OperatorElement>& ys, double eps, WitnessMode mode);

struct ConvergenceReport {
  WitnessMode mode = WitnessMode::Bilateral;
  double epsilon = 0.0;
  double delta_target = 0.0;
  std::uint64_t horizon = 0;
  std::string family;
  // (tail start m, achieved lambda over the tail)
  std::vector<std::pair<std::uint64_t, double>> raw_curve;
  // running minimum of the raw curve (nonincreasing summary)
  std::vector<std::pair<std::uint64_t, double>> envelope_curve;
  bool converging = false;
  double best_lambda = 0.0;
  double trace_complement = 0.0;  // of the best witness
  std::optional<Projection> witness;
};

struct ReportOptions {
  double delta_target = 1e-2;
  std::uint64_t grid_base = 16;
  std::string family;
};

// Witness report over explicit (n, value) samples: residual family
// y_n = value_n - limit, evaluated over geometric tails of the sample grid.
ConvergenceReport witness_report(const std::vector<std::pair<std::uint64_t, OperatorElement>>& samples,
                                 const OperatorElement& limit, double eps, WitnessMode mode,
                                 const ReportOptions& options = {});

// Runs the average stream to horizon N on a geometric grid and reports tail
// witnesses against the candidate limit (default: the fixed-space projection
// of x).
ConvergenceReport au_report(const DSOperator& op, const OperatorElement& x,
                            const std::optional<WeightSequence>& beta,
                            const std::optional<SubsequenceSpec>& k,
                            const std::optional<OperatorElement>& limit, double eps,
                            std::uint64_t N, WitnessMode mode, const ReportOptions& options = {});

// gamma = eps^{1/p} * delta / (4^{1/p} * 48 * C)
double buem_gamma(double p, double eps, double delta, double C);

struct BuemProbeResult {
  double p = 1.0;
  double epsilon = 0.0;
  double delta = 0.0;
  double weight_bound = 0.0;  // C = ||beta||_inf
  double gamma = 0.0;
  double k_sup_ratio = 1.0;   // K; 1 for the full sequence
  WitnessMode mode = WitnessMode::Bilateral;
  std::uint64_t horizon = 0;
  std::uint64_t samples_attempted = 0;
  std::uint64_t samples_passed = 0;
  double worst_lambda = 0.0;
  double worst_supnorm = 0.0;           // against the raw (unsymmetrized) family
  double worst_trace_complement = 0.0;
  bool gamma_underflow = false;
  bool passed = false;
};

struct BuemProbeParams {
  double p = 1.0;
  double epsilon = 0.0;  // absolute trace budget
  double delta = 0.0;
  WitnessMode mode = WitnessMode::Bilateral;
  std::uint64_t sample_count = 100;
  std::uint64_t horizon = 256;  // family length N
  std::uint64_t seed = 0;
  // Sensitivity hook: sample at this norm threshold instead of the derived
  // gamma (the pass threshold stays delta). Without it, shrinking delta
  // shrinks the samples proportionally and the probe stays scale-invariant.
  std::optional<double> gamma_override;
};

// Draws samples with ||x||_p < gamma and witnesses the family
// {M_n^{beta,k}(x)}_{n<=N} under the trace budget. For subsequential probes
// the sampling threshold is computed at delta / K with K = sup_{n<=N} k_n/n,
// matching the reduction of the subsequential case to the full-sequence one;
// each sample passes iff the achieved lambda is <= delta.
BuemProbeResult buem_probe(const DSOperator& op, const WeightSequence& beta,
                           const std::optional<SubsequenceSpec>& k, const BuemProbeParams& params);

enum class LimitCheckVariant {
  DensityScaledLimit,  // || M_N^{c beta} - d * M_N^{beta,k} ||_inf, d = partial density at N
  SharedLimit,         // || M_N^{beta,k} - M_N^beta ||_inf
  CoboundaryDecay,     // coboundary decay bound, or exact fixed-point reproduction
};

struct LimitCheckInstance {
  DSOperator op;
  OperatorElement x;                         // input (the fixed point for that path)
  std::optional<OperatorElement> coboundary_y;  // when set, x is replaced by y - T(y)
  std::optional<WeightSequence> beta;
  std::optional<SubsequenceSpec> k;
  std::uint64_t horizon = 0;
};

// Returns the defect of the selected limit identification; callers assert it
// against their tolerance. For the coboundary path the value is
// max_n (||M_n^k(x)||_inf - 2 ||y||_inf (N_I(n-1)+1)/n) over a geometric grid
// (nonpositive when the bound holds); for the fixed-point path it is
// max_n ||M_n^k(x) - x||_inf.
double limit_check(LimitCheckVariant variant, const LimitCheckInstance& instance);

struct CoboundaryFit {
  OperatorElement fixed_part;  // E(x)
  OperatorElement y;           // least-squares solution of x - E(x) = y - T(y)
  double residual;             // ||x - (E(x) + y - T(y))||_inf
};

// Splits x into its fixed-space component plus a coboundary, the dense
// decomposition behind the block-sequence convergence argument.
CoboundaryFit fixed_plus_coboundary_fit(const DSOperator& op, const OperatorElement& x);

}  // namespace ncerg

#endif

#include "ncerg/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ncerg/rng.hpp"

namespace ncerg {

namespace {

// Geometric grid {base, 2 base, 4 base, ...} capped at N, with N appended.
std::vector<std::uint64_t> geometric_grid(std::uint64_t base, std::uint64_t N) {
  std::vector<std::uint64_t> grid;
  for (std::uint64_t n = std::max<std::uint64_t>(base, 1); n < N; n *= 2) grid.push_back(n);
  if (grid.empty() || grid.back() != N) grid.push_back(N);
  return grid;
}

}  // namespace

Witness find_witness(const std::vector<OperatorElement>& ys, double eps, WitnessMode mode) {
  if (!(eps > 0.0)) throw std::invalid_argument("find_witness: eps must be positive");
  if (ys.empty()) throw std::invalid_argument("find_witness: empty family");
  const AlgebraPtr algebra = ys.front().algebra();

  OperatorElement b = OperatorElement::zero(algebra);
  for (const auto& y : ys) {
    require_same_algebra(y, b);
    if (mode == WitnessMode::Bilateral)
      b += absolute_value(y.hermitian_part());
    else
      b += multiply(y.adjoint(), y);
  }

  // Candidate thresholds are the eigenvalues of b (plus 0); pick the smallest
  // whose excess spectral weight fits the trace budget.
  const auto eg = eigh(b);
  std::vector<std::pair<double, double>> spectrum;  // (eigenvalue, weight)
  for (std::size_t bi = 0; bi < eg.eigenvalues.size(); ++bi)
    for (double lam : eg.eigenvalues[bi])
      spectrum.emplace_back(lam, algebra->blocks()[bi].weight);
  std::sort(spectrum.begin(), spectrum.end());

  std::vector<double> candidates{0.0};
  for (const auto& [lam, w] : spectrum) candidates.push_back(std::max(lam, 0.0));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  auto excess_weight = [&](double t) {
    double w = 0.0;
    for (const auto& [lam, wt] : spectrum)
      if (lam > t + kIntervalSlack) w += wt;
    return w;
  };

  for (double t : candidates) {
    if (excess_weight(t) > eps) continue;
    Projection e = spectral_projection(b, 0.0, t);
    if (e.trace_complement() > eps + 1e-12) continue;  // eigenvalue-cluster edge
    const double lambda = mode == WitnessMode::Bilateral ? t : std::sqrt(t);
    return Witness{std::move(e), lambda};
  }
  // eps >= tau(1) never reaches here (t = max eigenvalue always feasible);
  // reaching this point means the budget excluded even the full spectrum.
  throw std::runtime_error("find_witness: no feasible spectral threshold");
}

ConvergenceReport witness_report(
    const std::vector<std::pair<std::uint64_t, OperatorElement>>& samples,
    const OperatorElement& limit, double eps, WitnessMode mode, const ReportOptions& options) {
  if (samples.empty()) throw std::invalid_argument("witness_report: no samples");
  ConvergenceReport rep;
  rep.mode = mode;
  rep.epsilon = eps;
  rep.delta_target = options.delta_target;
  rep.horizon = samples.back().first;
  rep.family = options.family;

  std::vector<std::pair<std::uint64_t, OperatorElement>> residuals;
  residuals.reserve(samples.size());
  for (const auto& [n, value] : samples) residuals.emplace_back(n, value - limit);

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t start = 0; start < residuals.size(); ++start) {
    std::vector<OperatorElement> tail;
    tail.reserve(residuals.size() - start);
    for (std::size_t i = start; i < residuals.size(); ++i) tail.push_back(residuals[i].second);
    Witness w = find_witness(tail, eps, mode);
    rep.raw_curve.emplace_back(residuals[start].first, w.lambda);
    if (w.lambda < best) {
      best = w.lambda;
      rep.best_lambda = w.lambda;
      rep.trace_complement = w.e.trace_complement();
      rep.witness = std::move(w.e);
    }
  }

  double running = std::numeric_limits<double>::infinity();
  for (const auto& [m, r] : rep.raw_curve) {
    running = std::min(running, r);
    rep.envelope_curve.emplace_back(m, running);
  }
  rep.converging = best <= options.delta_target;
  return rep;
}

ConvergenceReport au_report(const DSOperator& op, const OperatorElement& x,
                            const std::optional<WeightSequence>& beta,
                            const std::optional<SubsequenceSpec>& k,
                            const std::optional<OperatorElement>& limit, double eps,
                            std::uint64_t N, WitnessMode mode, const ReportOptions& options) {
  if (N < 1) throw std::invalid_argument("au_report: horizon must be >= 1");
  const auto grid = geometric_grid(options.grid_base, N);
  const auto samples = stream_checkpoints(op, x, beta, k, grid);
  const OperatorElement xhat = limit ? *limit : fixed_space_projector(op)(x);
  return witness_report(samples, xhat, eps, mode, options);
}

double buem_gamma(double p, double eps, double delta, double C) {
  if (!(p >= 1.0)) throw std::invalid_argument("buem_gamma: p must be >= 1");
  if (!(eps > 0.0) || !(delta > 0.0) || !(C > 0.0))
    throw std::invalid_argument("buem_gamma: eps, delta and C must be positive");
  return std::pow(eps, 1.0 / p) * delta / (std::pow(4.0, 1.0 / p) * 48.0 * C);
}

BuemProbeResult buem_probe(const DSOperator& op, const WeightSequence& beta,
                           const std::optional<SubsequenceSpec>& k,
                           const BuemProbeParams& params) {
  BuemProbeResult res;
  res.p = params.p;
  res.epsilon = params.epsilon;
  res.delta = params.delta;
  res.mode = params.mode;
  res.horizon = params.horizon;
  res.weight_bound = beta.sup_bound();
  res.k_sup_ratio = k ? std::max(1.0, sup_ratio(*k, params.horizon)) : 1.0;
  res.gamma = params.gamma_override
                  ? *params.gamma_override
                  : buem_gamma(params.p, params.epsilon, params.delta / res.k_sup_ratio,
                               res.weight_bound > 0.0 ? res.weight_bound : 1.0);
  if (res.gamma < 1e-300) {
    res.gamma_underflow = true;
    res.passed = false;
    return res;
  }

  Rng rng(params.seed);
  const AlgebraPtr& algebra = op.algebra();
  std::vector<std::uint64_t> all_n(params.horizon);
  for (std::uint64_t i = 0; i < params.horizon; ++i) all_n[i] = i + 1;

  res.passed = true;
  for (std::uint64_t s = 0; s < params.sample_count; ++s) {
    ++res.samples_attempted;
    OperatorElement x = rng.element(algebra);
    const double nx = schatten_norm(x, params.p);
    if (nx == 0.0) {
      ++res.samples_passed;  // e = 1 witnesses the zero element outright
      continue;
    }
    x *= cplx(0.9 * res.gamma / nx);

    const auto samples = stream_checkpoints(op, x, beta, k, all_n);
    std::vector<OperatorElement> family;
    family.reserve(samples.size());
    for (const auto& [n, v] : samples) family.push_back(v);

    Witness w = find_witness(family, params.epsilon, params.mode);
    double raw = 0.0;
    for (const auto& y : family) {
      const OperatorElement ye = multiply(y, w.e.element());
      raw = std::max(raw, params.mode == WitnessMode::Bilateral
                              ? operator_norm(multiply(w.e.element(), ye))
                              : operator_norm(ye));
    }
    res.worst_lambda = std::max(res.worst_lambda, w.lambda);
    res.worst_supnorm = std::max(res.worst_supnorm, raw);
    res.worst_trace_complement = std::max(res.worst_trace_complement, w.e.trace_complement());
    if (w.lambda <= params.delta)
      ++res.samples_passed;
    else
      res.passed = false;
  }
  return res;
}

double limit_check(LimitCheckVariant variant, const LimitCheckInstance& instance) {
  const std::uint64_t N = instance.horizon;
  if (N < 1) throw std::invalid_argument("limit_check: horizon must be >= 1");

  if (variant == LimitCheckVariant::DensityScaledLimit) {
    if (!instance.k) throw std::invalid_argument("limit_check: density-scaled variant needs a subsequence");
    const WeightSequence beta = instance.beta ? *instance.beta : WeightSequence::ones();
    const WeightSequence gamma_beta =
        WeightSequence::product(WeightSequence::indicator(*instance.k), beta);
    const double d = partial_density(*instance.k, N);

    AverageStream full(instance.op, instance.x, gamma_beta, std::nullopt);
    for (std::uint64_t i = 0; i < N; ++i) full.advance();
    AverageStream sub(instance.op, instance.x, beta, instance.k);
    for (std::uint64_t i = 0; i < N; ++i) sub.advance();
    return operator_norm(full.current() - cplx(d) * sub.current());
  }

  if (variant == LimitCheckVariant::SharedLimit) {
    if (!instance.k) throw std::invalid_argument("limit_check: shared-limit variant needs a subsequence");
    AverageStream sub(instance.op, instance.x, instance.beta, instance.k);
    for (std::uint64_t i = 0; i < N; ++i) sub.advance();
    AverageStream full(instance.op, instance.x, instance.beta, std::nullopt);
    for (std::uint64_t i = 0; i < N; ++i) full.advance();
    return operator_norm(sub.current() - full.current());
  }

  // CoboundaryDecay
  if (!instance.k) throw std::invalid_argument("limit_check: coboundary variant needs a block sequence");

  if (instance.coboundary_y) {
    const IntervalBlocks* blocks = instance.k->interval_blocks();
    if (!blocks)
      throw std::invalid_argument("limit_check: coboundary path needs interval blocks");
    const OperatorElement& y = *instance.coboundary_y;
    const OperatorElement x = y - instance.op.apply(y);
    const double ynorm = operator_norm(y);

    const auto grid = geometric_grid(16, N);
    const auto samples = stream_checkpoints(instance.op, x, std::nullopt, instance.k, grid);
    const auto bs = block_sequence(*blocks, N);

    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& [n, value] : samples) {
      const double measured = operator_norm(value);
      const double bound = 2.0 * ynorm *
                           static_cast<double>(bs.interval_index[n - 1] + 1) /
                           static_cast<double>(n);
      worst = std::max(worst, measured - bound);
    }
    return worst;
  }

  // Fixed-point path: M_n^k(x) must reproduce x.
  AverageStream stream(instance.op, instance.x, std::nullopt, instance.k);
  double worst = 0.0;
  for (std::uint64_t i = 0; i < N; ++i) {
    const OperatorElement& m = stream.advance();
    worst = std::max(worst, operator_norm(m - instance.x));
  }
  return worst;
}

CoboundaryFit fixed_plus_coboundary_fit(const DSOperator& op, const OperatorElement& x) {
  const AlgebraPtr& algebra = op.algebra();
  const FixedSpaceProjector proj(op);
  const OperatorElement fixed = proj(x);
  const OperatorElement r = x - fixed;

  std::vector<CMatrix> y_blocks;
  y_blocks.reserve(algebra->block_count());
  for (std::size_t bi = 0; bi < algebra->block_count(); ++bi) {
    const std::size_t d = algebra->blocks()[bi].dim;
    const std::size_t n = d * d;
    const CMatrix s = block_superoperator(op, bi);
    CMatrix a(n);  // I - S
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a(i, j) = (i == j ? cplx(1.0) : cplx(0.0)) - s(i, j);

    // Least squares via the normal equations, pseudo-inverted on the
    // complement of the (near-)kernel.
    const CMatrix g = matmul(a.adjoint(), a);
    const auto eg = ncerg::eigh(g);
    std::vector<cplx> rhs(n, 0.0);
    const CMatrix& rb = r.blocks()[bi];
    const CMatrix ah = a.adjoint();
    for (std::size_t i = 0; i < n; ++i) {
      cplx acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += ah(i, j) * rb(j / d, j % d);
      rhs[i] = acc;
    }
    const double lam_max = eg.eigenvalues.empty() ? 0.0 : eg.eigenvalues.back();
    const double cutoff = std::max(1e-12 * lam_max, 1e-14);
    std::vector<cplx> z(n, 0.0);
    for (std::size_t col = 0; col < n; ++col) {
      const double lam = eg.eigenvalues[col];
      if (lam <= cutoff) continue;
      cplx coeff = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        coeff += std::conj(eg.eigenvectors(i, col)) * rhs[i];
      coeff /= lam;
      for (std::size_t i = 0; i < n; ++i) z[i] += coeff * eg.eigenvectors(i, col);
    }
    CMatrix yb(d);
    for (std::size_t i = 0; i < n; ++i) yb(i / d, i % d) = z[i];
    y_blocks.push_back(std::move(yb));
  }

  CoboundaryFit fit{fixed, OperatorElement(algebra, std::move(y_blocks)), 0.0};
  const OperatorElement recon = fit.fixed_part + (fit.y - op.apply(fit.y));
  fit.residual = operator_norm(x - recon);
  return fit;
}

}  // namespace ncerg

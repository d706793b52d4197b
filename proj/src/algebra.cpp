#include "ncerg/algebra.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ncerg {

AlgebraSpec::AlgebraSpec(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw std::invalid_argument("AlgebraSpec: at least one block required");
  for (const auto& b : blocks_) {
    if (b.dim < 1) throw std::invalid_argument("AlgebraSpec: block dimension must be >= 1");
    if (!(b.weight > 0.0) || !std::isfinite(b.weight))
      throw std::invalid_argument("AlgebraSpec: trace weight must be positive and finite");
    total_dim_ += b.dim;
    trace_identity_ += b.weight * static_cast<double>(b.dim);
  }
}

bool AlgebraSpec::operator==(const AlgebraSpec& rhs) const {
  if (blocks_.size() != rhs.blocks_.size()) return false;
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    if (blocks_[i].dim != rhs.blocks_[i].dim || blocks_[i].weight != rhs.blocks_[i].weight)
      return false;
  return true;
}

AlgebraPtr make_algebra(std::vector<AlgebraSpec::Block> blocks) {
  return std::make_shared<const AlgebraSpec>(std::move(blocks));
}

OperatorElement::OperatorElement(AlgebraPtr algebra, std::vector<CMatrix> blocks)
    : algebra_(std::move(algebra)), blocks_(std::move(blocks)) {
  if (!algebra_) throw std::invalid_argument("OperatorElement: null algebra");
  const auto& spec = algebra_->blocks();
  if (blocks_.size() != spec.size())
    throw std::invalid_argument("OperatorElement: block count mismatch");
  for (std::size_t i = 0; i < spec.size(); ++i)
    if (blocks_[i].dim() != spec[i].dim)
      throw std::invalid_argument("OperatorElement: block dimension mismatch");
}

OperatorElement OperatorElement::zero(const AlgebraPtr& algebra) {
  std::vector<CMatrix> blocks;
  blocks.reserve(algebra->block_count());
  for (const auto& b : algebra->blocks()) blocks.emplace_back(b.dim);
  return OperatorElement(algebra, std::move(blocks));
}

OperatorElement OperatorElement::identity(const AlgebraPtr& algebra) {
  std::vector<CMatrix> blocks;
  blocks.reserve(algebra->block_count());
  for (const auto& b : algebra->blocks()) blocks.push_back(CMatrix::identity(b.dim));
  return OperatorElement(algebra, std::move(blocks));
}

bool same_algebra(const OperatorElement& a, const OperatorElement& b) {
  if (a.algebra() == b.algebra()) return true;
  return a.algebra() && b.algebra() && *a.algebra() == *b.algebra();
}

void require_same_algebra(const OperatorElement& a, const OperatorElement& b) {
  if (!same_algebra(a, b)) throw std::invalid_argument("operands live in different algebras");
}

OperatorElement& OperatorElement::operator+=(const OperatorElement& rhs) {
  require_same_algebra(*this, rhs);
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += rhs.blocks_[i];
  return *this;
}

OperatorElement& OperatorElement::operator-=(const OperatorElement& rhs) {
  require_same_algebra(*this, rhs);
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] -= rhs.blocks_[i];
  return *this;
}

OperatorElement& OperatorElement::operator*=(cplx s) {
  for (auto& b : blocks_) b *= s;
  return *this;
}

OperatorElement OperatorElement::adjoint() const {
  std::vector<CMatrix> blocks;
  blocks.reserve(blocks_.size());
  for (const auto& b : blocks_) blocks.push_back(b.adjoint());
  return OperatorElement(algebra_, std::move(blocks));
}

OperatorElement OperatorElement::hermitian_part() const {
  std::vector<CMatrix> blocks;
  blocks.reserve(blocks_.size());
  for (const auto& b : blocks_) blocks.push_back(ncerg::hermitian_part(b));
  return OperatorElement(algebra_, std::move(blocks));
}

OperatorElement OperatorElement::divided_by(double n) const {
  OperatorElement r = *this;
  for (auto& b : r.blocks_)
    for (auto& v : b.data()) v = cplx(v.real() / n, v.imag() / n);
  return r;
}

OperatorElement operator+(OperatorElement lhs, const OperatorElement& rhs) { return lhs += rhs; }
OperatorElement operator-(OperatorElement lhs, const OperatorElement& rhs) { return lhs -= rhs; }
OperatorElement operator*(cplx s, OperatorElement x) { return x *= s; }

OperatorElement multiply(const OperatorElement& a, const OperatorElement& b) {
  require_same_algebra(a, b);
  std::vector<CMatrix> blocks;
  blocks.reserve(a.blocks().size());
  for (std::size_t i = 0; i < a.blocks().size(); ++i)
    blocks.push_back(matmul(a.blocks()[i], b.blocks()[i]));
  return OperatorElement(a.algebra(), std::move(blocks));
}

cplx trace(const OperatorElement& x) {
  cplx t = 0.0;
  const auto& spec = x.algebra()->blocks();
  for (std::size_t i = 0; i < spec.size(); ++i)
    t += spec[i].weight * matrix_trace(x.blocks()[i]);
  return t;
}

namespace {

// Forming b^* b squares the spectrum and floors small singular values at
// roughly sqrt(eps) * ||b||; self-adjoint blocks take the direct route.
bool effectively_self_adjoint(const CMatrix& b) {
  return hermiticity_defect(b) <= 1e-12 * (1.0 + b.max_abs());
}

// Singular values of one block, ascending.
std::vector<double> block_singular_values(const CMatrix& b) {
  std::vector<double> s;
  if (effectively_self_adjoint(b)) {
    const auto eg = ncerg::eigh(b);
    s.reserve(eg.eigenvalues.size());
    for (double lam : eg.eigenvalues) s.push_back(std::abs(lam));
    std::sort(s.begin(), s.end());
  } else {
    const auto eg = ncerg::eigh(matmul(b.adjoint(), b));
    s.reserve(eg.eigenvalues.size());
    for (double lam : eg.eigenvalues) s.push_back(std::sqrt(std::max(lam, 0.0)));
  }
  return s;
}

std::vector<std::vector<double>> singular_values(const OperatorElement& x) {
  std::vector<std::vector<double>> out;
  out.reserve(x.blocks().size());
  for (const auto& b : x.blocks()) out.push_back(block_singular_values(b));
  return out;
}

OperatorElement symmetrize_checked(const OperatorElement& a, const char* who) {
  double defect = 0.0;
  for (const auto& b : a.blocks()) defect = std::max(defect, hermiticity_defect(b));
  // max-entry defect bounds the operator-norm defect up to dimension factors;
  // compare against the documented relative tolerance.
  if (defect > kSelfAdjointTol * (1.0 + operator_norm(a)) * 2.0)
    throw std::invalid_argument(std::string(who) + ": input is not self-adjoint");
  return a.hermitian_part();
}

}  // namespace

double schatten_norm(const OperatorElement& x, double p) {
  if (std::isnan(p) || p < 1.0)
    throw std::invalid_argument("schatten_norm: p must satisfy p >= 1");
  const auto sv = singular_values(x);
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& s : sv)
      if (!s.empty()) m = std::max(m, s.back());
    return m;
  }
  const auto& spec = x.algebra()->blocks();
  double acc = 0.0;
  for (std::size_t i = 0; i < sv.size(); ++i) {
    double blk = 0.0;
    for (double s : sv[i]) blk += std::pow(s, p);
    acc += spec[i].weight * blk;
  }
  return std::pow(acc, 1.0 / p);
}

double operator_norm(const OperatorElement& x) {
  double m = 0.0;
  for (const auto& b : x.blocks()) {
    const auto s = block_singular_values(b);
    if (!s.empty()) m = std::max(m, s.back());
  }
  return m;
}

OperatorElement absolute_value(const OperatorElement& x) {
  std::vector<CMatrix> blocks;
  blocks.reserve(x.blocks().size());
  for (const auto& b : x.blocks()) {
    const std::size_t d = b.dim();
    const bool sa = effectively_self_adjoint(b);
    const auto eg = sa ? ncerg::eigh(b) : ncerg::eigh(matmul(b.adjoint(), b));
    // |x| = V diag(s) V^* with s the singular values
    CMatrix scaled(d);
    for (std::size_t j = 0; j < d; ++j) {
      const double s =
          sa ? std::abs(eg.eigenvalues[j]) : std::sqrt(std::max(eg.eigenvalues[j], 0.0));
      for (std::size_t i = 0; i < d; ++i) scaled(i, j) = s * eg.eigenvectors(i, j);
    }
    blocks.push_back(matmul(scaled, eg.eigenvectors.adjoint()));
  }
  return OperatorElement(x.algebra(), std::move(blocks));
}

EighElement eigh(const OperatorElement& a) {
  const OperatorElement h = symmetrize_checked(a, "eigh");
  EighElement out;
  for (const auto& b : h.blocks()) {
    auto eg = ncerg::eigh(b);
    out.eigenvalues.push_back(std::move(eg.eigenvalues));
    out.eigenvectors.push_back(std::move(eg.eigenvectors));
  }
  return out;
}

double min_eigenvalue(const OperatorElement& a) {
  const auto eg = eigh(a);
  double m = std::numeric_limits<double>::infinity();
  for (const auto& ev : eg.eigenvalues)
    if (!ev.empty()) m = std::min(m, ev.front());
  return m;
}

Projection::Projection(OperatorElement e) : e_(std::move(e)) {
  constexpr double tol = 1e-10;
  const double scale = 1.0 + operator_norm(e_);
  for (const auto& b : e_.blocks())
    if (hermiticity_defect(b) > tol * scale)
      throw std::invalid_argument("Projection: element is not self-adjoint");
  const OperatorElement diff = multiply(e_, e_) - e_;
  if (operator_norm(diff) > tol * scale)
    throw std::invalid_argument("Projection: element is not idempotent");
}

OperatorElement Projection::complement_element() const {
  return OperatorElement::identity(e_.algebra()) - e_;
}

double Projection::trace_complement() const {
  return (trace(OperatorElement::identity(e_.algebra())) - trace(e_)).real();
}

Projection spectral_projection(const OperatorElement& a, double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("spectral_projection: empty interval");
  const OperatorElement h = symmetrize_checked(a, "spectral_projection");
  std::vector<CMatrix> blocks;
  blocks.reserve(h.blocks().size());
  for (const auto& b : h.blocks()) {
    const std::size_t d = b.dim();
    const auto eg = ncerg::eigh(b);
    CMatrix sel(d);
    for (std::size_t j = 0; j < d; ++j) {
      const double lam = eg.eigenvalues[j];
      if (lam >= lo - kIntervalSlack && lam <= hi + kIntervalSlack)
        for (std::size_t i = 0; i < d; ++i) sel(i, j) = eg.eigenvectors(i, j);
    }
    blocks.push_back(matmul(sel, sel.adjoint()));
  }
  return Projection(OperatorElement(a.algebra(), std::move(blocks)));
}

MeasureBallWitness measure_ball_membership(const OperatorElement& x, double eps, double delta) {
  if (!(eps > 0.0) || !(delta > 0.0))
    throw std::invalid_argument("measure_ball_membership: eps and delta must be positive");
  const OperatorElement ax = absolute_value(x);
  Projection e = spectral_projection(ax, 0.0, eps);
  const double tc = e.trace_complement();
  const double nxe = operator_norm(multiply(x, e.element()));
  return MeasureBallWitness{tc <= delta + 1e-15, std::move(e), tc, nxe};
}

}  // namespace ncerg

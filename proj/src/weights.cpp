#include "ncerg/weights.hpp"

#include <cmath>
#include <stdexcept>

namespace ncerg {

void TrigPolynomial::validate() const {
  if (coefficients.size() != angles.size())
    throw std::invalid_argument("TrigPolynomial: coefficient/frequency count mismatch");
  if (coefficients.empty()) throw std::invalid_argument("TrigPolynomial: empty polynomial");
  for (double a : angles)
    if (!std::isfinite(a)) throw std::invalid_argument("TrigPolynomial: non-finite angle");
}

double TrigPolynomial::coefficient_bound() const {
  double s = 0.0;
  for (const auto& r : coefficients) s += std::abs(r);
  return s;
}

cplx eval_trig_poly(const TrigPolynomial& p, std::uint64_t k) {
  const long double two_pi = 2.0L * 3.14159265358979323846264338327950288L;
  std::complex<long double> acc = 0.0L;
  for (std::size_t j = 0; j < p.coefficients.size(); ++j) {
    const long double arg =
        std::fmod(static_cast<long double>(k) * static_cast<long double>(p.angles[j]), two_pi);
    acc += std::complex<long double>(p.coefficients[j].real(), p.coefficients[j].imag()) *
           std::complex<long double>(std::cos(arg), std::sin(arg));
  }
  return cplx(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
}

double DecayRule::eval(std::uint64_t k) const {
  switch (kind) {
    case Kind::Harmonic:
      return 1.0 / static_cast<double>(k + 1);
    case Kind::Geometric:
      return std::pow(ratio, static_cast<double>(k));
  }
  return 0.0;
}

WeightSequence::WeightSequence(Generator g, double bound)
    : gen_(std::make_shared<const Generator>(std::move(g))), bound_(bound) {
  if (!std::isfinite(bound_)) throw std::invalid_argument("WeightSequence: unbounded weights");
}

WeightSequence WeightSequence::constant(cplx value) {
  return WeightSequence(ConstantWeights{value}, std::abs(value));
}

WeightSequence WeightSequence::explicit_values(std::vector<cplx> values) {
  if (values.empty()) throw std::invalid_argument("WeightSequence: empty explicit weights");
  double b = 0.0;
  for (const auto& v : values) b = std::max(b, std::abs(v));
  return WeightSequence(ExplicitWeights{std::move(values)}, b);
}

WeightSequence WeightSequence::trig_poly(TrigPolynomial poly) {
  poly.validate();
  const double b = poly.coefficient_bound();
  return WeightSequence(TrigPolyWeights{std::move(poly)}, b);
}

WeightSequence WeightSequence::trig_poly_decay(TrigPolynomial poly, DecayRule decay) {
  poly.validate();
  if (decay.kind == DecayRule::Kind::Geometric && !(std::abs(decay.ratio) < 1.0))
    throw std::invalid_argument("DecayRule: geometric ratio must satisfy |r| < 1");
  const double b = poly.coefficient_bound() + decay.bound();
  return WeightSequence(TrigPolyDecayWeights{std::move(poly), decay}, b);
}

WeightSequence WeightSequence::indicator(SubsequenceSpec sequence) {
  return WeightSequence(IndicatorWeights{std::move(sequence)}, 1.0);
}

WeightSequence WeightSequence::product(WeightSequence lhs, WeightSequence rhs) {
  const double b = lhs.sup_bound() * rhs.sup_bound();
  return WeightSequence(std::make_shared<const ProductWeights>(ProductWeights{std::move(lhs),
                                                                              std::move(rhs)}),
                        b);
}

std::vector<cplx> WeightSequence::prefix(std::size_t n) const {
  WeightCursor cur(*this);
  std::vector<cplx> out;
  out.reserve(n);
  for (std::size_t j = 0; j < n; ++j) out.push_back(cur.at(j));
  return out;
}

WeightCursor::WeightCursor(const WeightSequence& w)
    : gen_(std::make_shared<const WeightSequence::Generator>(w.generator())),
      bound_(w.sup_bound()) {
  if (const auto* tp = std::get_if<TrigPolyWeights>(gen_.get())) {
    trig_.emplace();
    for (double a : tp->poly.angles) {
      trig_->steps.emplace_back(std::cos(static_cast<long double>(a)),
                                std::sin(static_cast<long double>(a)));
      trig_->phases.emplace_back(1.0L, 0.0L);
    }
  } else if (const auto* tpd = std::get_if<TrigPolyDecayWeights>(gen_.get())) {
    trig_.emplace();
    for (double a : tpd->poly.angles) {
      trig_->steps.emplace_back(std::cos(static_cast<long double>(a)),
                                std::sin(static_cast<long double>(a)));
      trig_->phases.emplace_back(1.0L, 0.0L);
    }
  } else if (const auto* ind = std::get_if<IndicatorWeights>(gen_.get())) {
    indicator_.emplace(IndicatorState{SequenceCursor(ind->sequence), 0, false});
    try {
      indicator_->upcoming = indicator_->cursor.next();
    } catch (const std::invalid_argument&) {
      indicator_->exhausted = true;
    }
  } else if (const auto* prod =
                 std::get_if<std::shared_ptr<const ProductWeights>>(gen_.get())) {
    children_.push_back(std::make_unique<WeightCursor>((*prod)->lhs));
    children_.push_back(std::make_unique<WeightCursor>((*prod)->rhs));
  }
}

cplx WeightCursor::at(std::uint64_t j) {
  if (started_ && j < last_)
    throw std::invalid_argument("WeightCursor: indices must be nondecreasing");
  started_ = true;
  last_ = j;
  return eval(j);
}

cplx WeightCursor::eval(std::uint64_t j) {
  struct Visitor {
    WeightCursor& c;
    std::uint64_t j;

    cplx operator()(const ConstantWeights& w) { return w.value; }

    cplx operator()(const ExplicitWeights& w) {
      if (j >= w.values.size())
        throw std::invalid_argument("weight prefix exhausted: explicit list too short");
      return w.values[j];
    }

    cplx trig_value(const TrigPolynomial& poly) {
      auto& st = *c.trig_;
      while (st.k < j) {
        for (std::size_t i = 0; i < st.phases.size(); ++i) st.phases[i] *= st.steps[i];
        ++st.k;
        if (++st.since_renorm == 10000) {
          st.since_renorm = 0;
          for (auto& ph : st.phases) ph /= std::abs(ph);
        }
      }
      std::complex<long double> acc = 0.0L;
      for (std::size_t i = 0; i < st.phases.size(); ++i)
        acc += std::complex<long double>(poly.coefficients[i].real(),
                                         poly.coefficients[i].imag()) *
               st.phases[i];
      return cplx(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
    }

    cplx operator()(const TrigPolyWeights& w) { return trig_value(w.poly); }

    cplx operator()(const TrigPolyDecayWeights& w) {
      return trig_value(w.poly) + cplx(w.decay.eval(j));
    }

    cplx operator()(const IndicatorWeights&) {
      auto& st = *c.indicator_;
      while (!st.exhausted && st.upcoming < j) {
        try {
          st.upcoming = st.cursor.next();
        } catch (const std::invalid_argument&) {
          st.exhausted = true;
        }
      }
      return (!st.exhausted && st.upcoming == j) ? cplx(1.0) : cplx(0.0);
    }

    cplx operator()(const std::shared_ptr<const ProductWeights>&) {
      return c.children_[0]->at(j) * c.children_[1]->at(j);
    }
  };
  return std::visit(Visitor{*this, j}, *gen_);
}

double besicovich_deviation(const WeightSequence& beta, const TrigPolynomial& p, std::uint64_t n) {
  if (n < 1) throw std::invalid_argument("besicovich_deviation: n must be >= 1");
  WeightCursor cur(beta);
  double acc = 0.0;
  for (std::uint64_t k = 0; k < n; ++k) acc += std::abs(cur.at(k) - eval_trig_poly(p, k));
  return acc / static_cast<double>(n);
}

BesicovichCertificate besicovich_certificate(const WeightSequence& beta, const TrigPolynomial& p,
                                             double eps, std::uint64_t n_start, int doublings) {
  BesicovichCertificate cert;
  cert.sustained = true;
  std::uint64_t n = n_start;
  for (int i = 0; i <= doublings; ++i, n *= 2) {
    const double dev = besicovich_deviation(beta, p, n);
    cert.curve.emplace_back(n, dev);
    if (!(dev < eps)) cert.sustained = false;
  }
  return cert;
}

cplx correlation_estimate(const WeightSequence& alpha, std::int64_t m, std::uint64_t n) {
  if (m < 0) return std::conj(correlation_estimate(alpha, -m, n));
  WeightCursor head(alpha);
  WeightCursor tail(alpha);
  cplx acc = 0.0;
  for (std::uint64_t k = 0; k <= n; ++k)
    acc += std::conj(head.at(k)) * tail.at(k + static_cast<std::uint64_t>(m));
  return acc / cplx(static_cast<double>(n + 1));
}

}  // namespace ncerg

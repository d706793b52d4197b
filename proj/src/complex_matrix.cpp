#include "ncerg/complex_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ncerg {

CMatrix CMatrix::identity(std::size_t dim) {
  CMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix& CMatrix::operator+=(const CMatrix& rhs) {
  if (rhs.dim_ != dim_) throw std::invalid_argument("CMatrix: dimension mismatch");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += rhs.a_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& rhs) {
  if (rhs.dim_ != dim_) throw std::invalid_argument("CMatrix: dimension mismatch");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= rhs.a_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(cplx s) {
  for (auto& v : a_) v *= s;
  return *this;
}

CMatrix CMatrix::adjoint() const {
  CMatrix r(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

double CMatrix::frobenius() const {
  double s = 0.0;
  for (const auto& v : a_) s += std::norm(v);
  return std::sqrt(s);
}

double CMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& v : a_) m = std::max(m, std::abs(v));
  return m;
}

CMatrix operator+(CMatrix lhs, const CMatrix& rhs) { return lhs += rhs; }
CMatrix operator-(CMatrix lhs, const CMatrix& rhs) { return lhs -= rhs; }
CMatrix operator*(cplx s, CMatrix m) { return m *= s; }

CMatrix matmul(const CMatrix& a, const CMatrix& b) {
  const std::size_t d = a.dim();
  if (b.dim() != d) throw std::invalid_argument("matmul: dimension mismatch");
  CMatrix r(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx(0.0)) continue;
      for (std::size_t j = 0; j < d; ++j) r(i, j) += aik * b(k, j);
    }
  }
  return r;
}

CMatrix conjugate_by(const CMatrix& u, const CMatrix& x) {
  return matmul(matmul(u, x), u.adjoint());
}

cplx matrix_trace(const CMatrix& a) {
  cplx t = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) t += a(i, i);
  return t;
}

double hermiticity_defect(const CMatrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      m = std::max(m, std::abs(a(i, j) - std::conj(a(j, i))));
  return m;
}

CMatrix hermitian_part(const CMatrix& a) {
  CMatrix r(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      r(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
  return r;
}

namespace {

double offdiag_frobenius(const CMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

}  // namespace

EighResult eigh(const CMatrix& input) {
  const std::size_t d = input.dim();
  CMatrix a = hermitian_part(input);
  CMatrix v = CMatrix::identity(d);

  EighResult res;
  res.eigenvalues.resize(d);

  if (d <= 1) {
    if (d == 1) res.eigenvalues[0] = a(0, 0).real();
    res.eigenvectors = v;
    return res;
  }

  const double scale = a.frobenius();
  const double stop = 1e-12 * scale;

  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    if (offdiag_frobenius(a) <= stop) break;
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;

        const cplx phase = apq / mag;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (app - aqq) / (2.0 * mag);
        const double t =
            (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // A <- R^* A R with R = [[c, -s e^{i phi}], [s e^{-i phi}, c]]
        for (std::size_t i = 0; i < d; ++i) {
          const cplx vp = a(i, p);
          const cplx vq = a(i, q);
          a(i, p) = c * vp + s * std::conj(phase) * vq;
          a(i, q) = -s * phase * vp + c * vq;
        }
        for (std::size_t j = 0; j < d; ++j) {
          const cplx wp = a(p, j);
          const cplx wq = a(q, j);
          a(p, j) = c * wp + s * phase * wq;
          a(q, j) = -s * std::conj(phase) * wp + c * wq;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = cplx(a(p, p).real(), 0.0);
        a(q, q) = cplx(a(q, q).real(), 0.0);

        for (std::size_t i = 0; i < d; ++i) {
          const cplx vp = v(i, p);
          const cplx vq = v(i, q);
          v(i, p) = c * vp + s * std::conj(phase) * vq;
          v(i, q) = -s * phase * vp + c * vq;
        }
      }
    }
  }
  if (sweep == kMaxSweeps && offdiag_frobenius(a) > stop)
    throw std::runtime_error("eigh: Jacobi sweeps did not converge");

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  res.eigenvectors = CMatrix(d);
  for (std::size_t col = 0; col < d; ++col) {
    res.eigenvalues[col] = a(order[col], order[col]).real();
    for (std::size_t i = 0; i < d; ++i) res.eigenvectors(i, col) = v(i, order[col]);
  }
  return res;
}

double operator_norm(const CMatrix& a) {
  if (a.dim() == 0) return 0.0;
  const CMatrix gram = matmul(a.adjoint(), a);
  const auto eg = eigh(gram);
  const double top = eg.eigenvalues.empty() ? 0.0 : eg.eigenvalues.back();
  return std::sqrt(std::max(top, 0.0));
}

}  // namespace ncerg

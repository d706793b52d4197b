#include "ncerg/rng.hpp"

#include <cmath>

namespace ncerg {

double Rng::uniform01() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform01();
  while (u1 == 0.0) u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

CMatrix Rng::ginibre(std::size_t dim) {
  CMatrix g(dim);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      g(i, j) = cplx(normal() * inv_sqrt2, normal() * inv_sqrt2);
  return g;
}

CMatrix Rng::haar_unitary(std::size_t dim) {
  CMatrix g = ginibre(dim);
  CMatrix q(dim);
  // Column-wise modified Gram-Schmidt, run twice per column.
  for (std::size_t j = 0; j < dim; ++j) {
    std::vector<cplx> col(dim);
    for (std::size_t i = 0; i < dim; ++i) col[i] = g(i, j);
    cplx leading = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        cplx proj = 0.0;
        for (std::size_t i = 0; i < dim; ++i) proj += std::conj(q(i, k)) * col[i];
        for (std::size_t i = 0; i < dim; ++i) col[i] -= proj * q(i, k);
      }
    }
    double nrm = 0.0;
    for (const auto& v : col) nrm += std::norm(v);
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) {
      // Degenerate draw; fall back to a basis vector.
      col.assign(dim, cplx(0.0));
      col[j] = 1.0;
      nrm = 1.0;
    }
    leading = col[j % dim] == cplx(0.0) ? cplx(1.0) : col[j % dim] / std::abs(col[j % dim]);
    for (std::size_t i = 0; i < dim; ++i) q(i, j) = col[i] / (nrm * leading);
  }
  return q;
}

OperatorElement Rng::element(const AlgebraPtr& algebra) {
  std::vector<CMatrix> blocks;
  blocks.reserve(algebra->block_count());
  for (const auto& b : algebra->blocks()) blocks.push_back(ginibre(b.dim));
  return OperatorElement(algebra, std::move(blocks));
}

OperatorElement Rng::self_adjoint(const AlgebraPtr& algebra) {
  return element(algebra).hermitian_part();
}

OperatorElement Rng::positive(const AlgebraPtr& algebra) {
  std::vector<CMatrix> blocks;
  blocks.reserve(algebra->block_count());
  for (const auto& b : algebra->blocks()) {
    const CMatrix g = ginibre(b.dim);
    blocks.push_back(matmul(g.adjoint(), g));
  }
  return OperatorElement(algebra, std::move(blocks));
}

OperatorElement Rng::unitary(const AlgebraPtr& algebra) {
  std::vector<CMatrix> blocks;
  blocks.reserve(algebra->block_count());
  for (const auto& b : algebra->blocks()) blocks.push_back(haar_unitary(b.dim));
  return OperatorElement(algebra, std::move(blocks));
}

}  // namespace ncerg

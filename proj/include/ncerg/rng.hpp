#ifndef NCERG_RNG_HPP
#define NCERG_RNG_HPP

#include <cstdint>
#include <random>

#include "ncerg/algebra.hpp"
#include "ncerg/complex_matrix.hpp"

namespace ncerg {

// Seeded generator for the sampling distributions used across the project.
// Uniform and normal variates are derived from mt19937_64 raw bits directly,
// so streams are reproducible bit-for-bit independent of the standard
// library's distribution implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1).
  double uniform01();

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal (Box-Muller).
  double normal();

  // i.i.d. entries (N(0,1) + i N(0,1)) / sqrt(2).
  CMatrix ginibre(std::size_t dim);

  // Haar-distributed unitary: QR of a Ginibre matrix via repeated modified
  // Gram-Schmidt, with the R-diagonal phases normalized.
  CMatrix haar_unitary(std::size_t dim);

  OperatorElement element(const AlgebraPtr& algebra);
  OperatorElement self_adjoint(const AlgebraPtr& algebra);
  // g^* g per block; positive semidefinite.
  OperatorElement positive(const AlgebraPtr& algebra);
  OperatorElement unitary(const AlgebraPtr& algebra);

private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ncerg

#endif

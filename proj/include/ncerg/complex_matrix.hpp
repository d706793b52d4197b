#ifndef NCERG_COMPLEX_MATRIX_HPP
#define NCERG_COMPLEX_MATRIX_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace ncerg {

using cplx = std::complex<double>;

// Dense square complex matrix, row-major storage.
class CMatrix {
public:
  CMatrix() = default;
  explicit CMatrix(std::size_t dim) : dim_(dim), a_(dim * dim) {}

  static CMatrix identity(std::size_t dim);

  std::size_t dim() const { return dim_; }

  cplx& operator()(std::size_t i, std::size_t j) { return a_[i * dim_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * dim_ + j]; }

  std::vector<cplx>& data() { return a_; }
  const std::vector<cplx>& data() const { return a_; }

  CMatrix& operator+=(const CMatrix& rhs);
  CMatrix& operator-=(const CMatrix& rhs);
  CMatrix& operator*=(cplx s);

  CMatrix adjoint() const;

  double frobenius() const;
  double max_abs() const;

private:
  std::size_t dim_ = 0;
  std::vector<cplx> a_;
};

CMatrix operator+(CMatrix lhs, const CMatrix& rhs);
CMatrix operator-(CMatrix lhs, const CMatrix& rhs);
CMatrix operator*(cplx s, CMatrix m);

CMatrix matmul(const CMatrix& a, const CMatrix& b);

// u x u^*
CMatrix conjugate_by(const CMatrix& u, const CMatrix& x);

cplx matrix_trace(const CMatrix& a);

// max_ij |a_ij - conj(a_ji)|
double hermiticity_defect(const CMatrix& a);

CMatrix hermitian_part(const CMatrix& a);

struct EighResult {
  std::vector<double> eigenvalues;  // ascending
  CMatrix eigenvectors;             // columns, orthonormal
};

// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
// Stops when the off-diagonal Frobenius mass drops below 1e-12 times the
// Frobenius norm of the input; throws std::runtime_error after 100 sweeps
// without convergence. The input is taken as Hermitian: only its Hermitian
// part influences the result.
EighResult eigh(const CMatrix& a);

// Largest singular value.
double operator_norm(const CMatrix& a);

}  // namespace ncerg

#endif

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

// Dense complex matrices in row-major order, plus the Kronecker/Hilbert-
// Schmidt primitives the rest of the library is written in terms of.
namespace covcap {

using cplx = std::complex<double>;

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);  // zero-filled
  // Takes ownership of row-major entries; checks the count and finiteness.
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

  static ComplexMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  cplx* data() { return data_.data(); }
  const cplx* data() const { return data_.data(); }
  cplx* row(std::size_t i) { return data_.data() + i * cols_; }
  const cplx* row(std::size_t i) const { return data_.data() + i * cols_; }
  const std::vector<cplx>& entries() const { return data_; }

  bool is_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a);
ComplexMatrix operator*(cplx s, const ComplexMatrix& a);
ComplexMatrix operator*(const ComplexMatrix& a, cplx s);

// C = A * B.
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);

// y = A * x.
std::vector<cplx> matvec(const ComplexMatrix& a, const std::vector<cplx>& x);

ComplexMatrix adjoint(const ComplexMatrix& a);    // A^H
ComplexMatrix transpose(const ComplexMatrix& a);  // A^t
ComplexMatrix conjugate(const ComplexMatrix& a);  // entrywise conjugate

// (A + A^H) / 2 for square A.
ComplexMatrix hermitian_part(const ComplexMatrix& a);

cplx trace(const ComplexMatrix& a);

// Hilbert-Schmidt inner product tr(A^H B); dimensions must match.
cplx hs_inner(const ComplexMatrix& a, const ComplexMatrix& b);

// Hilbert-Schmidt norm sqrt(tr(A^H A)).
double hs_norm(const ComplexMatrix& a);

// Largest entry magnitude (0 for empty matrices).
double max_abs(const ComplexMatrix& a);

// Kronecker product: entry ((i,l),(j,m)) = A(i,j) * B(l,m) with row-major
// pair flattening.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Row-major vectorization and its inverse. With this convention
// vec_r(A H B^t) = kron(A, B) * vec_r(H).
std::vector<cplx> vec_r(const ComplexMatrix& h);
ComplexMatrix unvec_r(const std::vector<cplx>& v, std::size_t m, std::size_t n);

// Canonical tensor action: (A (x) B)(H) = A H B^t. A is MxM, B is NxN,
// H is MxN.
ComplexMatrix tensor_apply(const ComplexMatrix& a, const ComplexMatrix& b,
                           const ComplexMatrix& h);

}  // namespace covcap

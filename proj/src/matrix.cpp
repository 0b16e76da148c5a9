#include "covcap/matrix.hpp"

#include <cmath>
#include <string>

#include "covcap/errors.hpp"
#include "covcap/kernels.hpp"

namespace covcap {
namespace {

void check_same_shape(const ComplexMatrix& a, const ComplexMatrix& b,
                      const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch(std::string(op) + ": shapes " +
                            std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " vs " +
                            std::to_string(b.rows()) + "x" +
                            std::to_string(b.cols()));
  }
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, cplx(0.0, 0.0)) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols,
                             std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionMismatch("entry count " + std::to_string(data_.size()) +
                            " does not match " + std::to_string(rows_) + "x" +
                            std::to_string(cols_));
  }
  if (!is_finite()) throw Error("matrix has non-finite entries");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool ComplexMatrix::is_finite() const {
  for (const cplx& z : data_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  check_same_shape(a, b, "add");
  ComplexMatrix c = a;
  for (std::size_t k = 0; k < c.rows() * c.cols(); ++k) c.data()[k] += b.data()[k];
  return c;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  check_same_shape(a, b, "subtract");
  ComplexMatrix c = a;
  for (std::size_t k = 0; k < c.rows() * c.cols(); ++k) c.data()[k] -= b.data()[k];
  return c;
}

ComplexMatrix operator-(const ComplexMatrix& a) {
  ComplexMatrix c = a;
  for (std::size_t k = 0; k < c.rows() * c.cols(); ++k) c.data()[k] = -c.data()[k];
  return c;
}

ComplexMatrix operator*(cplx s, const ComplexMatrix& a) {
  ComplexMatrix c = a;
  for (std::size_t k = 0; k < c.rows() * c.cols(); ++k) c.data()[k] *= s;
  return c;
}

ComplexMatrix operator*(const ComplexMatrix& a, cplx s) { return s * a; }

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionMismatch("matmul: " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " times " +
                            std::to_string(b.rows()) + "x" +
                            std::to_string(b.cols()));
  }
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      kern::caxpy(c.row(i), a(i, k), b.row(k), b.cols());
    }
  }
  return c;
}

std::vector<cplx> matvec(const ComplexMatrix& a, const std::vector<cplx>& x) {
  if (a.cols() != x.size()) {
    throw DimensionMismatch("matvec: " + std::to_string(a.cols()) +
                            " columns vs vector of length " +
                            std::to_string(x.size()));
  }
  std::vector<cplx> y(a.rows(), cplx(0.0, 0.0));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const cplx* r = a.row(i);
    cplx acc(0.0, 0.0);
    for (std::size_t j = 0; j < a.cols(); ++j) acc += r[j] * x[j];
    y[i] = acc;
  }
  return y;
}

ComplexMatrix adjoint(const ComplexMatrix& a) {
  ComplexMatrix c(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) c(j, i) = std::conj(a(i, j));
  }
  return c;
}

ComplexMatrix transpose(const ComplexMatrix& a) {
  ComplexMatrix c(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) c(j, i) = a(i, j);
  }
  return c;
}

ComplexMatrix conjugate(const ComplexMatrix& a) {
  ComplexMatrix c = a;
  for (std::size_t k = 0; k < c.rows() * c.cols(); ++k) {
    c.data()[k] = std::conj(c.data()[k]);
  }
  return c;
}

ComplexMatrix hermitian_part(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("hermitian_part: not square");
  ComplexMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      c(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
    }
  }
  return c;
}

cplx trace(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("trace: not square");
  cplx t(0.0, 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

cplx hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  check_same_shape(a, b, "hs_inner");
  return kern::cdotc(a.data(), b.data(), a.rows() * a.cols());
}

double hs_norm(const ComplexMatrix& a) {
  return std::sqrt(kern::csum_sq(a.data(), a.rows() * a.cols()));
}

double max_abs(const ComplexMatrix& a) {
  double m = 0.0;
  for (const cplx& z : a.entries()) m = std::max(m, std::abs(z));
  return m;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cplx aij = a(i, j);
      if (aij == cplx(0.0, 0.0)) continue;
      for (std::size_t l = 0; l < b.rows(); ++l) {
        for (std::size_t m = 0; m < b.cols(); ++m) {
          c(i * b.rows() + l, j * b.cols() + m) = aij * b(l, m);
        }
      }
    }
  }
  return c;
}

std::vector<cplx> vec_r(const ComplexMatrix& h) { return h.entries(); }

ComplexMatrix unvec_r(const std::vector<cplx>& v, std::size_t m,
                      std::size_t n) {
  if (v.size() != m * n) {
    throw DimensionMismatch("unvec_r: length " + std::to_string(v.size()) +
                            " vs " + std::to_string(m) + "x" +
                            std::to_string(n));
  }
  return ComplexMatrix(m, n, v);
}

ComplexMatrix tensor_apply(const ComplexMatrix& a, const ComplexMatrix& b,
                           const ComplexMatrix& h) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || h.rows() != a.rows() ||
      h.cols() != b.rows()) {
    throw DimensionMismatch("tensor_apply: incompatible shapes");
  }
  return matmul(matmul(a, h), transpose(b));
}

}  // namespace covcap

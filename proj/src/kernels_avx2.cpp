#include <immintrin.h>

#include "covcap/kernels.hpp"

// AVX2 kernels. Each 256-bit register holds two complex doubles as
// [re0, im0, re1, im1]. The scalar reference mirrors these lane semantics, so
// both variants produce bit-identical results (this file is also compiled
// with -ffp-contract=off; _mm256_addsub_pd and separate mul/add keep one
// rounding per operation, matching the scalar expressions).

namespace covcap::kern::detail {
namespace {

using cplx = std::complex<double>;

void caxpy_avx2(cplx* y, cplx a, const cplx* x, std::size_t n) {
  const double ar = a.real(), ai = a.imag();
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  const __m256d arb = _mm256_set1_pd(ar);
  const __m256d aib = _mm256_set1_pd(ai);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(xd + 2 * i);
    const __m256d t1 = _mm256_mul_pd(arb, v);
    const __m256d vs = _mm256_permute_pd(v, 0x5);  // swap re/im in each pair
    const __m256d t2 = _mm256_mul_pd(aib, vs);
    // addsub: even lanes t1-t2 (real parts), odd lanes t1+t2 (imag parts).
    const __m256d w = _mm256_addsub_pd(t1, t2);
    _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(_mm256_loadu_pd(yd + 2 * i), w));
  }
  for (; i < n; ++i) {
    const double xr = xd[2 * i], xi = xd[2 * i + 1];
    const double wr = ar * xr - ai * xi;
    const double wi = ar * xi + ai * xr;
    yd[2 * i] += wr;
    yd[2 * i + 1] += wi;
  }
}

cplx cdotc_avx2(const cplx* x, const cplx* y, std::size_t n) {
  const double* xd = reinterpret_cast<const double*>(x);
  const double* yd = reinterpret_cast<const double*>(y);
  __m256d accp = _mm256_setzero_pd();
  __m256d accq = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    accp = _mm256_add_pd(accp, _mm256_mul_pd(xv, yv));
    const __m256d ys = _mm256_permute_pd(yv, 0x5);
    accq = _mm256_add_pd(accq, _mm256_mul_pd(xv, ys));
  }
  double p[4], q[4];
  _mm256_storeu_pd(p, accp);
  _mm256_storeu_pd(q, accq);
  double re = (p[0] + p[1]) + (p[2] + p[3]);
  double im = (q[0] - q[1]) + (q[2] - q[3]);
  for (; i < n; ++i) {
    const double xr = xd[2 * i], xi = xd[2 * i + 1];
    const double yr = yd[2 * i], yi = yd[2 * i + 1];
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

double csum_sq_avx2(const cplx* x, std::size_t n) {
  const double* xd = reinterpret_cast<const double*>(x);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(xd + 2 * i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
  }
  double p[4];
  _mm256_storeu_pd(p, acc);
  double total = (p[0] + p[1]) + (p[2] + p[3]);
  for (; i < n; ++i) {
    const double xr = xd[2 * i], xi = xd[2 * i + 1];
    total += xr * xr + xi * xi;
  }
  return total;
}

}  // namespace

const Ops avx2_ops = {caxpy_avx2, cdotc_avx2, csum_sq_avx2, "avx2"};

}  // namespace covcap::kern::detail

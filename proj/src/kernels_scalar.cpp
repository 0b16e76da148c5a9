#include "covcap/kernels.hpp"

// Scalar reference kernels. The loops mirror the AVX2 variant's lane layout
// and accumulation trees exactly: the vector code processes two complex
// elements per step with one partial accumulator per lane, so the reference
// keeps four named partials and combines them in the same order. This file is
// compiled with -ffp-contract=off so no FMA sneaks in; each multiply and each
// add rounds separately, exactly like the corresponding vector instruction.

namespace covcap::kern::detail {
namespace {

using cplx = std::complex<double>;

void caxpy_scalar(cplx* y, cplx a, const cplx* x, std::size_t n) {
  const double ar = a.real(), ai = a.imag();
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = xd[2 * i], xi = xd[2 * i + 1];
    const double wr = ar * xr - ai * xi;
    const double wi = ar * xi + ai * xr;
    yd[2 * i] += wr;
    yd[2 * i + 1] += wi;
  }
}

cplx cdotc_scalar(const cplx* x, const cplx* y, std::size_t n) {
  const double* xd = reinterpret_cast<const double*>(x);
  const double* yd = reinterpret_cast<const double*>(y);
  // Lane-striped partials: p holds products of matching components
  // (re*re / im*im), q holds crossed ones (re*im / im*re).
  double p0 = 0, p1 = 0, p2 = 0, p3 = 0;
  double q0 = 0, q1 = 0, q2 = 0, q3 = 0;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const double x0r = xd[2 * i], x0i = xd[2 * i + 1];
    const double x1r = xd[2 * i + 2], x1i = xd[2 * i + 3];
    const double y0r = yd[2 * i], y0i = yd[2 * i + 1];
    const double y1r = yd[2 * i + 2], y1i = yd[2 * i + 3];
    p0 += x0r * y0r;
    p1 += x0i * y0i;
    p2 += x1r * y1r;
    p3 += x1i * y1i;
    q0 += x0r * y0i;
    q1 += x0i * y0r;
    q2 += x1r * y1i;
    q3 += x1i * y1r;
  }
  double re = (p0 + p1) + (p2 + p3);
  double im = (q0 - q1) + (q2 - q3);
  for (; i < n; ++i) {
    const double xr = xd[2 * i], xi = xd[2 * i + 1];
    const double yr = yd[2 * i], yi = yd[2 * i + 1];
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

double csum_sq_scalar(const cplx* x, std::size_t n) {
  const double* xd = reinterpret_cast<const double*>(x);
  double p0 = 0, p1 = 0, p2 = 0, p3 = 0;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const double x0r = xd[2 * i], x0i = xd[2 * i + 1];
    const double x1r = xd[2 * i + 2], x1i = xd[2 * i + 3];
    p0 += x0r * x0r;
    p1 += x0i * x0i;
    p2 += x1r * x1r;
    p3 += x1i * x1i;
  }
  double total = (p0 + p1) + (p2 + p3);
  for (; i < n; ++i) {
    const double xr = xd[2 * i], xi = xd[2 * i + 1];
    total += xr * xr + xi * xi;
  }
  return total;
}

}  // namespace

const Ops scalar_ops = {caxpy_scalar, cdotc_scalar, csum_sq_scalar, "scalar"};

}  // namespace covcap::kern::detail

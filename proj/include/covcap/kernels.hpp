#pragma once

#include <complex>
#include <cstddef>

// Low-level complex-double kernels used by the dense matrix routines and the
// Monte Carlo accumulation loops. Two implementations exist: a scalar
// reference and an AVX2 variant. They are written to produce bit-identical
// results (same operation order, no fused multiply-add), so switching the
// active set never changes any numeric output.
namespace covcap::kern {

enum class Mode { kAuto, kScalar, kAvx2 };

// y[i] += a * x[i] for i in [0, n).
void caxpy(std::complex<double>* y, std::complex<double> a,
           const std::complex<double>* x, std::size_t n);

// Returns sum_i conj(x[i]) * y[i].
std::complex<double> cdotc(const std::complex<double>* x,
                           const std::complex<double>* y, std::size_t n);

// Returns sum_i |x[i]|^2.
double csum_sq(const std::complex<double>* x, std::size_t n);

// Chooses the active kernel set. kAuto consults the COVCAP_KERNELS
// environment variable ("auto" | "scalar" | "avx2") and falls back to CPU
// feature detection. Not thread-safe; call before spawning workers.
void select(Mode mode);

// Name of the active kernel set ("scalar" or "avx2").
const char* active_name();

// True when the CPU supports AVX2.
bool avx2_available();

namespace detail {
struct Ops {
  void (*caxpy)(std::complex<double>*, std::complex<double>,
                const std::complex<double>*, std::size_t);
  std::complex<double> (*cdotc)(const std::complex<double>*,
                                const std::complex<double>*, std::size_t);
  double (*csum_sq)(const std::complex<double>*, std::size_t);
  const char* name;
};
extern const Ops scalar_ops;
extern const Ops avx2_ops;
}  // namespace detail

}  // namespace covcap::kern

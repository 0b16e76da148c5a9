#include "covcap/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <string>

#include "covcap/errors.hpp"

namespace covcap::kern {
namespace {

const detail::Ops* g_ops = nullptr;

const detail::Ops* resolve(Mode mode) {
  switch (mode) {
    case Mode::kScalar:
      return &detail::scalar_ops;
    case Mode::kAvx2:
      if (!avx2_available()) {
        throw Error("COVCAP_KERNELS=avx2 requested but the CPU lacks AVX2");
      }
      return &detail::avx2_ops;
    case Mode::kAuto:
    default:
      // Auto mode honors COVCAP_KERNELS before falling back to CPU detection.
      if (const char* env = std::getenv("COVCAP_KERNELS")) {
        const std::string v(env);
        if (v == "scalar") return &detail::scalar_ops;
        if (v == "avx2") return resolve(Mode::kAvx2);
        if (v != "auto" && !v.empty()) {
          throw Error("unknown COVCAP_KERNELS value: " + v);
        }
      }
      return avx2_available() ? &detail::avx2_ops : &detail::scalar_ops;
  }
}

const detail::Ops* active() {
  if (g_ops == nullptr) g_ops = resolve(Mode::kAuto);
  return g_ops;
}

}  // namespace

bool avx2_available() { return __builtin_cpu_supports("avx2") != 0; }

void select(Mode mode) { g_ops = resolve(mode); }

const char* active_name() { return active()->name; }

void caxpy(std::complex<double>* y, std::complex<double> a,
           const std::complex<double>* x, std::size_t n) {
  active()->caxpy(y, a, x, n);
}

std::complex<double> cdotc(const std::complex<double>* x,
                           const std::complex<double>* y, std::size_t n) {
  return active()->cdotc(x, y, n);
}

double csum_sq(const std::complex<double>* x, std::size_t n) {
  return active()->csum_sq(x, n);
}

}  // namespace covcap::kern

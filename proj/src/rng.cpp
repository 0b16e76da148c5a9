#include "covcap/rng.hpp"

#include <cmath>

namespace covcap::rng {
namespace {

// Philox4x32 round constants (Salmon, Moraes, Dror, Shaw 2011).
constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

constexpr double kTwoPi = 6.283185307179586476925286766559;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(Counter ctr, Key key) {
  std::uint32_t x0 = ctr.v[0], x1 = ctr.v[1], x2 = ctr.v[2], x3 = ctr.v[3];
  std::uint32_t k0 = key.v[0], k1 = key.v[1];
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, x0, hi0, lo0);
    mulhilo(kMul1, x2, hi1, lo1);
    const std::uint32_t y0 = hi1 ^ x1 ^ k0;
    const std::uint32_t y1 = lo1;
    const std::uint32_t y2 = hi0 ^ x3 ^ k1;
    const std::uint32_t y3 = lo0;
    x0 = y0;
    x1 = y1;
    x2 = y2;
    x3 = y3;
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return {x0, x1, x2, x3};
}

double uniform_open_closed(std::uint32_t w) {
  return (static_cast<double>(w) + 1.0) * 0x1p-32;
}

double uniform_closed_open(std::uint32_t w) {
  return static_cast<double>(w) * 0x1p-32;
}

std::pair<double, double> gauss_pair(std::uint32_t wa, std::uint32_t wb) {
  const double u1 = uniform_open_closed(wa);
  const double u2 = uniform_closed_open(wb);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = kTwoPi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

void fill_complex_gaussians(std::complex<double>* out, std::size_t n,
                            std::uint64_t seed, std::uint32_t stream,
                            std::uint64_t sample) {
  const Key key = {{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32)}};
  const double inv_sqrt2 = 0.70710678118654752440;
  for (std::size_t block = 0; 2 * block < n; ++block) {
    const Counter ctr = {{static_cast<std::uint32_t>(block), stream,
                          static_cast<std::uint32_t>(sample),
                          static_cast<std::uint32_t>(sample >> 32)}};
    const auto w = philox4x32(ctr, key);
    for (std::size_t lane = 0; lane < 2; ++lane) {
      const std::size_t e = 2 * block + lane;
      if (e >= n) break;
      const auto [x, y] = gauss_pair(w[2 * lane], w[2 * lane + 1]);
      out[e] = {x * inv_sqrt2, y * inv_sqrt2};
    }
  }
}

GaussianStream::GaussianStream(std::uint64_t seed, std::uint32_t stream,
                               std::uint64_t sample)
    : key_{{static_cast<std::uint32_t>(seed),
            static_cast<std::uint32_t>(seed >> 32)}},
      stream_(stream),
      sample_(sample) {}

void GaussianStream::refill() {
  const Counter ctr = {{static_cast<std::uint32_t>(block_), stream_,
                        static_cast<std::uint32_t>(sample_),
                        static_cast<std::uint32_t>(sample_ >> 32)}};
  const auto w = philox4x32(ctr, key_);
  const auto [x0, y0] = gauss_pair(w[0], w[1]);
  const auto [x1, y1] = gauss_pair(w[2], w[3]);
  buffer_[0] = x0;
  buffer_[1] = y0;
  buffer_[2] = x1;
  buffer_[3] = y1;
  pos_ = 0;
  ++block_;
}

double GaussianStream::next_real() {
  if (pos_ >= 4) refill();
  return buffer_[pos_++];
}

std::complex<double> GaussianStream::next_complex() {
  const double x = next_real();
  const double y = next_real();
  const double inv_sqrt2 = 0.70710678118654752440;
  return {x * inv_sqrt2, y * inv_sqrt2};
}

}  // namespace covcap::rng

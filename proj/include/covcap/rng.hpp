#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <utility>

// Counter-based random number generation (Philox4x32-10) and Gaussian
// synthesis. Every variate is a pure function of (seed, stream, sample,
// position), so sample sets are reproducible across runs and independent of
// evaluation order — the property the deterministic parallel layer relies on.
namespace covcap::rng {

// Stream tags partition the counter space. Kronecker-term streams use the
// term index directly; the reserved tags below keep the other consumers out
// of their way.
inline constexpr std::uint32_t kStreamDense = 0xffffffffu;
inline constexpr std::uint32_t kStreamGeneric = 0xfffffffeu;

struct Counter {
  std::uint32_t v[4];
};

struct Key {
  std::uint32_t v[2];
};

// One Philox4x32 block, 10 rounds.
std::array<std::uint32_t, 4> philox4x32(Counter ctr, Key key);

// Maps a 32-bit word to (0, 1]: (w + 1) * 2^-32. Never zero, so it is safe
// under the logarithm in Box-Muller.
double uniform_open_closed(std::uint32_t w);

// Maps a 32-bit word to [0, 1): w * 2^-32.
double uniform_closed_open(std::uint32_t w);

// Box-Muller: two independent standard normals from two words.
std::pair<double, double> gauss_pair(std::uint32_t wa, std::uint32_t wb);

// Fills out[0..n) with standard circular complex Gaussians (independent real
// and imaginary parts of variance 1/2 each, unit total variance). Entry e is
// produced from the Philox block with counter {e >> 1, stream, sample lo,
// sample hi} and key {seed lo, seed hi}; even entries use words 0/1 of the
// block, odd entries words 2/3.
void fill_complex_gaussians(std::complex<double>* out, std::size_t n,
                            std::uint64_t seed, std::uint32_t stream,
                            std::uint64_t sample);

// Sequential stream of generic draws (fixture generation, randomized
// algorithm coefficients). Same per-block layout as fill_complex_gaussians,
// with the block index advancing as values are consumed.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed,
                          std::uint32_t stream = kStreamGeneric,
                          std::uint64_t sample = 0);

  // Next standard normal.
  double next_real();

  // Next standard circular complex Gaussian, (x + iy)/sqrt(2).
  std::complex<double> next_complex();

 private:
  void refill();

  Key key_;
  std::uint32_t stream_;
  std::uint64_t sample_;
  std::uint64_t block_ = 0;
  double buffer_[4] = {0, 0, 0, 0};
  std::size_t pos_ = 4;
};

}  // namespace covcap::rng

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "covcap/eig.hpp"
#include "covcap/matrix.hpp"

// Channel variance assembly, the Gurvits/Barnum separability certificate, and
// Gaussian channel sampling (both the Kronecker-term construction and the
// dense PSD-square-root route).
namespace covcap {

struct KronTerm {
  HermitianMatrix R;  // receive-side factor, M x M, PSD
  HermitianMatrix T;  // transmit-side factor, N x N, PSD
};

class CovarianceSpec {
 public:
  static CovarianceSpec kron_sum(std::size_t m, std::size_t n,
                                 double noise_power,
                                 std::vector<KronTerm> terms);
  static CovarianceSpec dense(std::size_t m, std::size_t n, double noise_power,
                              HermitianMatrix sigma);

  std::size_t M() const { return m_; }
  std::size_t N() const { return n_; }
  double noise_power() const { return noise_power_; }
  bool is_kron() const { return kron_.has_value(); }
  const std::vector<KronTerm>& kron_terms() const;
  const HermitianMatrix& dense_sigma() const;

 private:
  CovarianceSpec() = default;

  std::size_t m_ = 0;
  std::size_t n_ = 0;
  double noise_power_ = 0.0;
  std::optional<std::vector<KronTerm>> kron_;
  std::optional<HermitianMatrix> dense_;
};

// Sigma = sum_i kron(R_i, T_i), or the stored dense matrix.
HermitianMatrix assemble(const CovarianceSpec& spec);

enum class Separability { kCertifiedSeparable, kInconclusive };

struct SeparabilityVerdict {
  Separability status;
  double hs_distance;  // ||Sigma - I_MN||_HS
};

// Sufficient criterion only: certified when the distance to the identity is
// <= 1, or when the spec carries an explicit Kronecker-sum decomposition
// (itself a separability witness). Never claims entanglement.
SeparabilityVerdict separability_certificate(const HermitianMatrix& sigma,
                                             const CovarianceSpec& spec);

struct ChannelSampleSet {
  std::vector<ComplexMatrix> samples;  // M x N realizations
  std::uint64_t seed = 0;
  std::size_t count = 0;
  // Group used for symmetrization (multiplicative closure, identity
  // included); empty if the set was never symmetrized.
  std::vector<ComplexMatrix> symmetrized_by;
};

// Draws `count` realizations of H ~ N(0, Sigma). Kronecker path:
// H = sum_i sqrt(R_i) W_i sqrt(T_i)^t with i.i.d. standard complex Gaussian
// W_i. Dense path: vec_r(H) = sqrt(Sigma) z. Deterministic in (spec form,
// count, seed); the two paths realize the same distribution but different
// random variables.
ChannelSampleSet sample_channels(const CovarianceSpec& spec, std::size_t count,
                                 std::uint64_t seed);

// Augments the set with H * D for every D in the multiplicative closure of
// the given unitaries (deduplicated at HS distance 1e-9; identity included).
// Throws ClosureBoundExceeded when the closure grows past closure_bound.
ChannelSampleSet symmetrize_samples(const ChannelSampleSet& set,
                                    const std::vector<ComplexMatrix>& unitaries,
                                    std::size_t closure_bound = 64);

// (1/S) sum_s vec_r(H_s) vec_r(H_s)^H.
HermitianMatrix empirical_covariance(const ChannelSampleSet& set);

}  // namespace covcap

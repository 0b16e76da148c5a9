#pragma once

// Shared fixture builders for the test binaries. Everything is seeded through
// the library's own counter-based stream so fixtures are identical across
// runs and platforms.

#include <cstdint>
#include <vector>

#include "covcap/covariance.hpp"
#include "covcap/eig.hpp"
#include "covcap/matrix.hpp"
#include "covcap/rng.hpp"

namespace testutil {

using covcap::ComplexMatrix;
using covcap::cplx;
using covcap::HermitianMatrix;

inline ComplexMatrix ginibre(std::size_t rows, std::size_t cols,
                             covcap::rng::GaussianStream& gs) {
  ComplexMatrix g(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) g(i, j) = gs.next_complex();
  }
  return g;
}

// Haar-distributed via Gram-Schmidt on a Ginibre matrix (deterministic in the
// seed; the distribution itself is irrelevant to the tests, genericity is).
inline ComplexMatrix random_unitary(std::size_t n, std::uint64_t seed) {
  covcap::rng::GaussianStream gs(seed);
  ComplexMatrix g = ginibre(n, n, gs);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t prev = 0; prev < j; ++prev) {
      cplx overlap(0.0, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        overlap += std::conj(g(i, prev)) * g(i, j);
      }
      for (std::size_t i = 0; i < n; ++i) g(i, j) -= overlap * g(i, prev);
    }
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm_sq += std::norm(g(i, j));
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (std::size_t i = 0; i < n; ++i) g(i, j) = g(i, j) * inv;
  }
  return g;
}

inline HermitianMatrix random_hermitian(std::size_t n, std::uint64_t seed,
                                        double scale = 1.0) {
  covcap::rng::GaussianStream gs(seed);
  const ComplexMatrix g = ginibre(n, n, gs);
  return HermitianMatrix(cplx(scale, 0.0) * covcap::hermitian_part(g));
}

// G G^H / n (+ ridge I): PSD, positive definite for ridge > 0.
inline HermitianMatrix random_psd(std::size_t n, std::uint64_t seed,
                                  double ridge = 0.0) {
  covcap::rng::GaussianStream gs(seed);
  const ComplexMatrix g = ginibre(n, n, gs);
  ComplexMatrix a = covcap::matmul(g, covcap::adjoint(g));
  a = cplx(1.0 / static_cast<double>(n), 0.0) * a;
  if (ridge > 0.0) {
    a = a + cplx(ridge, 0.0) * ComplexMatrix::identity(n);
  }
  return HermitianMatrix(covcap::hermitian_part(a));
}

// v v^H for a unit or non-unit vector v.
inline HermitianMatrix outer(const std::vector<cplx>& v) {
  ComplexMatrix a(v.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = 0; j < v.size(); ++j) {
      a(i, j) = v[i] * std::conj(v[j]);
    }
  }
  return HermitianMatrix(a);
}

inline HermitianMatrix diag(const std::vector<double>& d) {
  ComplexMatrix a(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) a(i, i) = d[i];
  return HermitianMatrix(a);
}

// Sigma = e1 e1^H (x) e1 e1^H + e2 e2^H (x) g g^H with g = (e1 + e2)/sqrt(2):
// the 4x4 covariance whose right commutant is trivial (scalar multiples of I).
inline covcap::CovarianceSpec example2_spec(double noise_power = 1.0) {
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<covcap::KronTerm> terms;
  terms.push_back({outer({1.0, 0.0}), outer({1.0, 0.0})});
  terms.push_back({outer({0.0, 1.0}), outer({s, s})});
  return covcap::CovarianceSpec::kron_sum(2, 2, noise_power, terms);
}

// A fixed well-conditioned 2x2 PD receive factor with complex off-diagonal.
inline HermitianMatrix fixture_R() {
  ComplexMatrix r(2, 2);
  r(0, 0) = 1.0;
  r(0, 1) = cplx(0.3, -0.1);
  r(1, 0) = cplx(0.3, 0.1);
  r(1, 1) = 0.8;
  return HermitianMatrix(r);
}

// Three-term Kronecker sum on M = 2, N = 3 whose right commutant is
// {diag(a, b, b)} (dimension 2, rank profile [1, 2]): term 1 pins the
// eigenspaces of diag(1,2,2); terms 2 and 3 are rank-1 projections onto
// (e2+e3)/sqrt(2) and (e2+i e3)/sqrt(2), which for a commuting matrix force
// the lower 2x2 block to be scalar.
inline covcap::CovarianceSpec profile12_spec(double noise_power = 1.0) {
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<covcap::KronTerm> terms;
  terms.push_back({HermitianMatrix::identity(2), diag({1.0, 2.0, 2.0})});
  terms.push_back({fixture_R(), outer({0.0, s, s})});
  ComplexMatrix r3(2, 2);
  r3(0, 0) = 1.5;
  r3(0, 1) = cplx(0.0, 0.3);
  r3(1, 0) = cplx(0.0, -0.3);
  r3(1, 1) = 0.7;
  terms.push_back({HermitianMatrix(r3), outer({0.0, s, cplx(0.0, s)})});
  return covcap::CovarianceSpec::kron_sum(2, 3, noise_power, terms);
}

}  // namespace testutil

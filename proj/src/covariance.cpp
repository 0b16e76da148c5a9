#include "covcap/covariance.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "covcap/errors.hpp"
#include "covcap/kernels.hpp"
#include "covcap/parallel.hpp"
#include "covcap/rng.hpp"

namespace covcap {

CovarianceSpec CovarianceSpec::kron_sum(std::size_t m, std::size_t n,
                                        double noise_power,
                                        std::vector<KronTerm> terms) {
  if (m < 1 || n < 1) throw InvalidSpec("antenna counts must be positive");
  if (!(noise_power > 0.0)) throw InvalidSpec("noise_power must be positive");
  if (terms.empty()) throw InvalidSpec("kron_sum needs at least one term");
  if (terms.size() >= rng::kStreamGeneric) {
    throw InvalidSpec("too many kron_sum terms");
  }
  for (const KronTerm& term : terms) {
    if (term.R.dim() != m) {
      throw InvalidSpec("kron_sum R factor is not " + std::to_string(m) + "x" +
                        std::to_string(m));
    }
    if (term.T.dim() != n) {
      throw InvalidSpec("kron_sum T factor is not " + std::to_string(n) + "x" +
                        std::to_string(n));
    }
    if (!is_psd(term.R) || !is_psd(term.T)) {
      throw InvalidSpec("kron_sum factors must be PSD");
    }
  }
  CovarianceSpec spec;
  spec.m_ = m;
  spec.n_ = n;
  spec.noise_power_ = noise_power;
  spec.kron_ = std::move(terms);
  return spec;
}

CovarianceSpec CovarianceSpec::dense(std::size_t m, std::size_t n,
                                     double noise_power,
                                     HermitianMatrix sigma) {
  if (m < 1 || n < 1) throw InvalidSpec("antenna counts must be positive");
  if (!(noise_power > 0.0)) throw InvalidSpec("noise_power must be positive");
  if (sigma.dim() != m * n) {
    throw InvalidSpec("dense covariance is not " + std::to_string(m * n) +
                      "-dimensional");
  }
  if (!is_psd(sigma)) throw InvalidSpec("dense covariance must be PSD");
  CovarianceSpec spec;
  spec.m_ = m;
  spec.n_ = n;
  spec.noise_power_ = noise_power;
  spec.dense_ = std::move(sigma);
  return spec;
}

const std::vector<KronTerm>& CovarianceSpec::kron_terms() const {
  if (!kron_) throw Error("spec holds a dense covariance, not kron_sum terms");
  return *kron_;
}

const HermitianMatrix& CovarianceSpec::dense_sigma() const {
  if (!dense_) throw Error("spec holds kron_sum terms, not a dense covariance");
  return *dense_;
}

HermitianMatrix assemble(const CovarianceSpec& spec) {
  if (!spec.is_kron()) return spec.dense_sigma();
  ComplexMatrix sigma(spec.M() * spec.N(), spec.M() * spec.N());
  for (const KronTerm& term : spec.kron_terms()) {
    sigma = sigma + kron(term.R.base(), term.T.base());
  }
  return HermitianMatrix(sigma);
}

SeparabilityVerdict separability_certificate(const HermitianMatrix& sigma,
                                             const CovarianceSpec& spec) {
  const ComplexMatrix eye = ComplexMatrix::identity(sigma.dim());
  const double distance = hs_norm(sigma.base() - eye);
  const bool certified = spec.is_kron() || distance <= 1.0;
  return {certified ? Separability::kCertifiedSeparable
                    : Separability::kInconclusive,
          distance};
}

ChannelSampleSet sample_channels(const CovarianceSpec& spec, std::size_t count,
                                 std::uint64_t seed) {
  if (count < 1) throw Error("sample_channels: count must be >= 1");
  const std::size_t m = spec.M(), n = spec.N();
  ChannelSampleSet set;
  set.seed = seed;
  set.count = count;
  set.samples.assign(count, ComplexMatrix());

  if (spec.is_kron()) {
    const auto& terms = spec.kron_terms();
    std::vector<ComplexMatrix> sqrt_r, sqrt_t_t;
    sqrt_r.reserve(terms.size());
    sqrt_t_t.reserve(terms.size());
    for (const KronTerm& term : terms) {
      sqrt_r.push_back(psd_sqrt(term.R).base());
      sqrt_t_t.push_back(transpose(psd_sqrt(term.T).base()));
    }
    par::parallel_for_chunks(count, [&](std::size_t begin, std::size_t end) {
      ComplexMatrix w(m, n);
      for (std::size_t s = begin; s < end; ++s) {
        ComplexMatrix h(m, n);
        for (std::size_t i = 0; i < terms.size(); ++i) {
          rng::fill_complex_gaussians(w.data(), m * n, seed,
                                      static_cast<std::uint32_t>(i), s);
          h = h + matmul(matmul(sqrt_r[i], w), sqrt_t_t[i]);
        }
        set.samples[s] = std::move(h);
      }
    });
  } else {
    const ComplexMatrix root = psd_sqrt(spec.dense_sigma()).base();
    par::parallel_for_chunks(count, [&](std::size_t begin, std::size_t end) {
      std::vector<cplx> z(m * n);
      for (std::size_t s = begin; s < end; ++s) {
        rng::fill_complex_gaussians(z.data(), m * n, seed, rng::kStreamDense, s);
        set.samples[s] = unvec_r(matvec(root, z), m, n);
      }
    });
  }
  return set;
}

ChannelSampleSet symmetrize_samples(const ChannelSampleSet& set,
                                    const std::vector<ComplexMatrix>& unitaries,
                                    std::size_t closure_bound) {
  if (set.samples.empty()) throw Error("symmetrize_samples: empty sample set");
  const std::size_t n = set.samples.front().cols();

  std::vector<ComplexMatrix> generators = unitaries;
  generators.insert(generators.end(), set.symmetrized_by.begin(),
                    set.symmetrized_by.end());
  const ComplexMatrix eye = ComplexMatrix::identity(n);
  for (const ComplexMatrix& u : generators) {
    if (u.rows() != n || u.cols() != n) {
      throw DimensionMismatch("symmetrize_samples: unitary is not " +
                              std::to_string(n) + "x" + std::to_string(n));
    }
    if (hs_norm(matmul(adjoint(u), u) - eye) >
        kEigTol * std::max(1.0, std::sqrt(static_cast<double>(n)))) {
      throw NonUnitary("symmetrize_samples: matrix is not unitary");
    }
  }

  // Multiplicative closure by breadth-first right-multiplication, starting
  // from the identity; duplicates are matches at HS distance <= 1e-9.
  std::vector<ComplexMatrix> closure;
  closure.push_back(eye);
  auto known = [&](const ComplexMatrix& candidate) {
    for (const ComplexMatrix& d : closure) {
      if (hs_norm(candidate - d) <= 1e-9) return true;
    }
    return false;
  };
  for (std::size_t i = 0; i < closure.size(); ++i) {
    for (const ComplexMatrix& g : generators) {
      ComplexMatrix next = matmul(closure[i], g);
      if (!known(next)) {
        if (closure.size() >= closure_bound) {
          throw ClosureBoundExceeded(
              "symmetrize_samples: closure exceeds bound of " +
              std::to_string(closure_bound));
        }
        closure.push_back(std::move(next));
      }
    }
  }

  ChannelSampleSet out;
  out.seed = set.seed;
  out.samples.reserve(set.samples.size() * closure.size());
  for (const ComplexMatrix& h : set.samples) {
    for (const ComplexMatrix& d : closure) {
      out.samples.push_back(matmul(h, d));
    }
  }
  out.count = out.samples.size();
  out.symmetrized_by = std::move(closure);
  return out;
}

HermitianMatrix empirical_covariance(const ChannelSampleSet& set) {
  if (set.samples.empty()) {
    throw Error("empirical_covariance: empty sample set");
  }
  const std::size_t m = set.samples.front().rows();
  const std::size_t n = set.samples.front().cols();
  const std::size_t d = m * n;
  auto map = [&](std::size_t begin, std::size_t end) {
    ComplexMatrix acc(d, d);
    std::vector<cplx> conj_v(d);
    for (std::size_t s = begin; s < end; ++s) {
      const std::vector<cplx>& v = set.samples[s].entries();
      for (std::size_t j = 0; j < d; ++j) conj_v[j] = std::conj(v[j]);
      for (std::size_t i = 0; i < d; ++i) {
        kern::caxpy(acc.row(i), v[i], conj_v.data(), d);
      }
    }
    return acc;
  };
  auto combine = [](ComplexMatrix a, ComplexMatrix b) { return a + b; };
  ComplexMatrix total = par::chunked_reduce(set.samples.size(), map, combine,
                                            ComplexMatrix(d, d));
  const double inv_s = 1.0 / static_cast<double>(set.samples.size());
  return HermitianMatrix(hermitian_part(inv_s * total));
}

}  // namespace covcap

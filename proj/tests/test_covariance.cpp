#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "covcap/covariance.hpp"
#include "covcap/errors.hpp"
#include "test_util.hpp"

using namespace covcap;
using testutil::diag;
using testutil::outer;

namespace {

bool same_bits(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(),
                     a.entries().size() * sizeof(cplx)) == 0;
}

}  // namespace

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(CovarianceSpec::kron_sum(2, 2, 1.0, {}), InvalidSpec);
  CHECK_THROWS_AS(CovarianceSpec::kron_sum(
                      2, 2, 0.0, {{HermitianMatrix::identity(2),
                                   HermitianMatrix::identity(2)}}),
                  InvalidSpec);
  // Indefinite factor.
  CHECK_THROWS_AS(CovarianceSpec::kron_sum(
                      2, 2, 1.0, {{diag({1, -1}), HermitianMatrix::identity(2)}}),
                  InvalidSpec);
  // Dimension mismatch between factors and (M, N).
  CHECK_THROWS_AS(CovarianceSpec::kron_sum(
                      2, 3, 1.0, {{HermitianMatrix::identity(2),
                                   HermitianMatrix::identity(2)}}),
                  InvalidSpec);
  CHECK_THROWS_AS(CovarianceSpec::dense(2, 2, 1.0, diag({1, 1, 1, -1})),
                  InvalidSpec);
  CHECK_THROWS_AS(CovarianceSpec::dense(2, 2, 1.0, HermitianMatrix::identity(3)),
                  InvalidSpec);
}

TEST_CASE("assemble examples") {
  const CovarianceSpec id_spec = CovarianceSpec::kron_sum(
      2, 2, 1.0, {{HermitianMatrix::identity(2), HermitianMatrix::identity(2)}});
  CHECK(hs_norm(assemble(id_spec).base() - ComplexMatrix::identity(4)) == 0.0);

  // Two rank-1 transmit terms that still sum to the identity (the
  // decomposition of Sigma is not unique).
  const CovarianceSpec remark = CovarianceSpec::kron_sum(
      2, 2, 1.0,
      {{HermitianMatrix::identity(2), outer({1, 0})},
       {HermitianMatrix::identity(2), outer({0, 1})}});
  CHECK(hs_norm(assemble(remark).base() - ComplexMatrix::identity(4)) <=
        1e-15);

  const HermitianMatrix sigma2 = assemble(testutil::example2_spec());
  ComplexMatrix expect(4, 4);
  expect(0, 0) = 1.0;
  expect(2, 2) = expect(2, 3) = expect(3, 2) = expect(3, 3) = 0.5;
  CHECK(hs_norm(sigma2.base() - expect) <= 1e-15);
}

TEST_CASE("separability certificate") {
  const CovarianceSpec dense_id =
      CovarianceSpec::dense(2, 2, 1.0, HermitianMatrix::identity(4));
  const SeparabilityVerdict v1 =
      separability_certificate(assemble(dense_id), dense_id);
  CHECK(v1.status == Separability::kCertifiedSeparable);
  CHECK(v1.hs_distance == 0.0);

  // gg^H for g = e1(x)e1 + e2(x)e2: the canonical maximally-entangled state.
  const CovarianceSpec ent =
      CovarianceSpec::dense(2, 2, 1.0, outer({1, 0, 0, 1}));
  const SeparabilityVerdict v2 = separability_certificate(assemble(ent), ent);
  CHECK(v2.status == Separability::kInconclusive);
  CHECK(v2.hs_distance == doctest::Approx(2.0).epsilon(1e-12));

  // An explicit Kronecker sum is a witness no matter the distance.
  const CovarianceSpec ex2 = testutil::example2_spec();
  const SeparabilityVerdict v3 = separability_certificate(assemble(ex2), ex2);
  CHECK(v3.status == Separability::kCertifiedSeparable);
  CHECK(v3.hs_distance > 1.0);
}

TEST_CASE("sampling determinism and shapes") {
  const CovarianceSpec spec = testutil::profile12_spec();
  const ChannelSampleSet a = sample_channels(spec, 257, 99);
  const ChannelSampleSet b = sample_channels(spec, 257, 99);
  REQUIRE(a.samples.size() == 257);
  CHECK(a.count == 257);
  CHECK(a.seed == 99);
  for (std::size_t s = 0; s < a.samples.size(); ++s) {
    REQUIRE(a.samples[s].rows() == 2);
    REQUIRE(a.samples[s].cols() == 3);
    CHECK(same_bits(a.samples[s], b.samples[s]));
  }
  const ChannelSampleSet c = sample_channels(spec, 257, 100);
  CHECK(!same_bits(a.samples[0], c.samples[0]));
}

TEST_CASE("zero covariance gives zero samples") {
  const CovarianceSpec spec =
      CovarianceSpec::dense(2, 2, 1.0, HermitianMatrix::zero(4));
  for (const ComplexMatrix& h : sample_channels(spec, 10, 4).samples) {
    CHECK(hs_norm(h) == 0.0);
  }
}

TEST_CASE("empirical covariance basics") {
  ChannelSampleSet set;
  set.samples.push_back(ComplexMatrix(2, 2));
  set.count = 1;
  CHECK(hs_norm(empirical_covariance(set).base()) == 0.0);

  rng::GaussianStream gs(876);
  const ComplexMatrix h = testutil::ginibre(2, 2, gs);
  ChannelSampleSet pm;
  pm.samples = {h, -h};
  pm.count = 2;
  const HermitianMatrix cov = empirical_covariance(pm);
  const std::vector<cplx> v = vec_r(h);
  CHECK(hs_norm(cov.base() - outer(v).base()) <= 1e-12);
}

TEST_CASE("sampler moments (single path, moderate S)") {
  const CovarianceSpec spec = CovarianceSpec::kron_sum(
      2, 2, 1.0, {{testutil::fixture_R(), diag({1, 2})}});
  const HermitianMatrix sigma = assemble(spec);
  const std::size_t s_count = 20000;
  const ChannelSampleSet set = sample_channels(spec, s_count, 31);
  const HermitianMatrix emp = empirical_covariance(set);
  const double tol =
      5.0 * hs_norm(sigma.base()) / std::sqrt(static_cast<double>(s_count));
  CHECK(hs_norm(emp.base() - sigma.base()) <= tol);
}

TEST_CASE("symmetrize examples") {
  const CovarianceSpec spec = testutil::example2_spec();
  const ChannelSampleSet base = sample_channels(spec, 5, 3);

  // Identity only: output equals input.
  const ChannelSampleSet same =
      symmetrize_samples(base, {ComplexMatrix::identity(2)});
  REQUIRE(same.samples.size() == 5);
  for (std::size_t s = 0; s < 5; ++s) {
    CHECK(same_bits(same.samples[s], base.samples[s]));
  }
  CHECK(same.symmetrized_by.size() == 1);

  // Order-2 group.
  const ChannelSampleSet doubled =
      symmetrize_samples(base, {diag({1, -1}).base()});
  CHECK(doubled.samples.size() == 10);
  CHECK(doubled.symmetrized_by.size() == 2);

  // Two generators whose closure is the 4-element sign group.
  const ChannelSampleSet four = symmetrize_samples(
      base, {diag({1, -1}).base(), diag({-1, 1}).base()});
  CHECK(four.samples.size() == 20);
  CHECK(four.symmetrized_by.size() == 4);

  // Closure under each listed unitary: right-multiplying the sample multiset
  // by a group element permutes it.
  for (const ComplexMatrix& d : four.symmetrized_by) {
    for (const ComplexMatrix& h : four.samples) {
      const ComplexMatrix img = matmul(h, d);
      bool found = false;
      for (const ComplexMatrix& other : four.samples) {
        if (hs_norm(img - other) <= 1e-12) {
          found = true;
          break;
        }
      }
      CHECK(found);
    }
  }
}

TEST_CASE("symmetrize error paths") {
  const CovarianceSpec spec = testutil::example2_spec();
  const ChannelSampleSet base = sample_channels(spec, 2, 3);

  ComplexMatrix not_unitary(2, 2);
  not_unitary(0, 0) = 2.0;
  not_unitary(1, 1) = 1.0;
  CHECK_THROWS_AS(symmetrize_samples(base, {not_unitary}), NonUnitary);

  // An irrational rotation never closes; the closure bound must fire.
  const double t = 0.7;
  ComplexMatrix rot(2, 2);
  rot(0, 0) = std::cos(t);
  rot(0, 1) = -std::sin(t);
  rot(1, 0) = std::sin(t);
  rot(1, 1) = std::cos(t);
  CHECK_THROWS_AS(symmetrize_samples(base, {rot}), ClosureBoundExceeded);
}

TEST_CASE("covariance-level symmetry invariance") {
  // U diagonal and T diagonal: (I (x) U^t) Sigma (I (x) U^t)^H = Sigma.
  const CovarianceSpec spec = CovarianceSpec::kron_sum(
      2, 2, 1.0, {{testutil::fixture_R(), diag({1, 2})}});
  const HermitianMatrix sigma = assemble(spec);
  ComplexMatrix u(2, 2);
  u(0, 0) = std::polar(1.0, 0.3);
  u(1, 1) = std::polar(1.0, -1.1);
  const ComplexMatrix iu = kron(ComplexMatrix::identity(2), transpose(u));
  const ComplexMatrix conj_sigma = matmul(iu, matmul(sigma.base(), adjoint(iu)));
  CHECK(hs_norm(conj_sigma - sigma.base()) <= 1e-9);
}

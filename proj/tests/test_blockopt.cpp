#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <vector>

#include "covcap/blockopt.hpp"
#include "covcap/commutant.hpp"
#include "covcap/covariance.hpp"
#include "covcap/errors.hpp"
#include "test_util.hpp"

using namespace covcap;
using testutil::diag;
using testutil::outer;

namespace {

ProjectionResolution coord_resolution(const std::vector<std::size_t>& sizes) {
  std::size_t n = 0;
  for (std::size_t l : sizes) n += l;
  ProjectionResolution res;
  std::size_t off = 0;
  for (std::size_t l : sizes) {
    ComplexMatrix p(n, n);
    for (std::size_t i = off; i < off + l; ++i) p(i, i) = 1.0;
    res.projections.emplace_back(p);
    res.ranks.push_back(l);
    off += l;
  }
  return res;
}

BlockStructure structure_for(const CovarianceSpec& spec, std::uint64_t seed) {
  const AlgebraBasis basis =
      commutant_basis(assemble(spec), spec.M(), spec.N());
  return build_block_structure(
      transpose_resolution(minimal_resolution(basis, seed)));
}

double trace_sum(const std::vector<HermitianMatrix>& blocks) {
  double t = 0.0;
  for (const HermitianMatrix& b : blocks) t += trace(b.base()).real();
  return t;
}

}  // namespace

TEST_CASE("build_block_structure examples") {
  const BlockStructure whole = build_block_structure(coord_resolution({3}));
  CHECK(whole.c == 1);
  CHECK(whole.sizes == std::vector<std::size_t>{3});
  CHECK(hs_norm(whole.U - ComplexMatrix::identity(3)) == 0.0);
  CHECK(whole.offset(0) == 0);
  CHECK(whole.offset(1) == 3);

  const BlockStructure split = build_block_structure(coord_resolution({1, 2}));
  CHECK(split.sizes == std::vector<std::size_t>{1, 2});
  CHECK(hs_norm(split.U - ComplexMatrix::identity(3)) == 0.0);

  // A genuinely complex resolution: the structure must diagonalize it.
  const AlgebraBasis basis =
      commutant_basis(assemble(testutil::profile12_spec()), 2, 3);
  const ProjectionResolution res =
      transpose_resolution(minimal_resolution(basis, 33));
  const BlockStructure bs = build_block_structure(res);
  CHECK(hs_norm(matmul(adjoint(bs.U), bs.U) - ComplexMatrix::identity(3)) <=
        1e-9);
  for (std::size_t j = 0; j < bs.c; ++j) {
    ComplexMatrix indicator(3, 3);
    for (std::size_t i = bs.offset(j); i < bs.offset(j + 1); ++i) {
      indicator(i, i) = 1.0;
    }
    CHECK(hs_norm(matmul(adjoint(bs.U),
                         matmul(res.projections[j].base(), bs.U)) -
                  indicator) <= 1e-8);
  }
}

TEST_CASE("assemble_Q and uniform start") {
  BlockCovariance bc;
  bc.structure = build_block_structure(coord_resolution({1, 1}));
  bc.blocks = {HermitianMatrix::zero(1), HermitianMatrix::zero(1)};
  CHECK(hs_norm(assemble_Q(bc).base()) == 0.0);

  bc.blocks = {diag({2.0}), diag({0.5})};
  CHECK(hs_norm(assemble_Q(bc).base() - diag({2.0, 0.5}).base()) <= 1e-15);

  const BlockCovariance uni =
      uniform_blocks(build_block_structure(coord_resolution({1, 2})), 1.5);
  CHECK(trace_sum(uni.blocks) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(hs_norm(assemble_Q(uni).base() -
                cplx(0.5, 0.0) * ComplexMatrix::identity(3)) <= 1e-12);

  // c = 1 with a non-trivial U: Q = U A U^H.
  BlockStructure rot;
  rot.U = testutil::random_unitary(3, 71);
  rot.sizes = {3};
  rot.c = 1;
  const HermitianMatrix a = testutil::random_psd(3, 72);
  const HermitianMatrix q = assemble_Q({{a}, rot});
  CHECK(hs_norm(q.base() - matmul(rot.U, matmul(a.base(), adjoint(rot.U)))) <=
        1e-12);
}

TEST_CASE("sign generators") {
  CHECK(sign_generators(build_block_structure(coord_resolution({3}))).empty());

  const auto gens = sign_generators(build_block_structure(coord_resolution({1, 2})));
  REQUIRE(gens.size() == 1);
  CHECK(hs_norm(gens[0] - diag({1, -1, -1}).base()) <= 1e-12);
}

TEST_CASE("project_blocks") {
  // Already feasible: unchanged.
  const std::vector<HermitianMatrix> feasible = {diag({0.5}), diag({0.25, 0.25})};
  const auto same = project_blocks(feasible, 2.0);
  for (std::size_t k = 0; k < feasible.size(); ++k) {
    CHECK(hs_norm(same[k].base() - feasible[k].base()) == 0.0);
  }

  // Budget projection of pooled eigenvalues (3, 1, 0.5) with p = 2.
  const auto clipped =
      project_blocks({diag({3.0}), diag({1.0}), diag({0.5})}, 2.0);
  CHECK(clipped[0](0, 0).real() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(clipped[1](0, 0).real() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(clipped[2](0, 0).real() == doctest::Approx(0.0).epsilon(1e-12));

  // Negative eigenvalue clamp without an active budget.
  const auto clamped = project_blocks({diag({-1.0, 1.0})}, 2.0);
  CHECK(hs_norm(clamped[0].base() - diag({0.0, 1.0}).base()) <= 1e-12);

  // Projection is idempotent and feasible on random input.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::vector<HermitianMatrix> blocks = {
        testutil::random_hermitian(2, 600 + seed, 2.0),
        testutil::random_hermitian(1, 650 + seed, 2.0)};
    const auto proj = project_blocks(blocks, 1.0);
    CHECK(trace_sum(proj) <= 1.0 + 1e-9);
    for (const HermitianMatrix& b : proj) CHECK(is_psd(b));
    const auto again = project_blocks(proj, 1.0);
    for (std::size_t k = 0; k < proj.size(); ++k) {
      CHECK(hs_norm(again[k].base() - proj[k].base()) <= 1e-10);
    }
  }
}

TEST_CASE("capacity estimate basics") {
  ChannelSampleSet set;
  set.samples = {ComplexMatrix::identity(2)};
  set.count = 1;

  const CapacityEstimate zero =
      capacity_estimate(set, HermitianMatrix::zero(2), 1.0);
  CHECK(zero.mean == 0.0);
  CHECK(zero.std_error == 0.0);

  const CapacityEstimate twolog2 =
      capacity_estimate(set, HermitianMatrix::identity(2), 1.0);
  CHECK(twolog2.mean == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(twolog2.count == 1);

  CHECK_THROWS_AS(capacity_estimate(set, diag({1.0, -1.0}), 1.0),
                  IndefiniteMatrix);
}

TEST_CASE("gradient at zero blocks equals H_k^H H_k / noise") {
  const BlockStructure bs = build_block_structure(coord_resolution({1, 1}));
  ChannelSampleSet set;
  rng::GaussianStream gs(77);
  set.samples = {testutil::ginibre(2, 2, gs)};
  set.count = 1;
  const double noise = 0.7;

  BlockCovariance bc{{HermitianMatrix::zero(1), HermitianMatrix::zero(1)},
                     bs};
  const auto g = capacity_gradient(set, bc, noise);
  const ComplexMatrix hh =
      matmul(adjoint(set.samples[0]), set.samples[0]);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(std::abs(g[k](0, 0) - hh(k, k) / noise) <= 1e-12);
  }
}

TEST_CASE("gradient matches finite differences") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const std::size_t m = 1 + seed % 3;
    const std::size_t n = 2 + seed % 2;
    const CovarianceSpec spec =
        CovarianceSpec::dense(m, n, 0.9, testutil::random_psd(m * n, 700 + seed, 0.2));
    const ChannelSampleSet set = sample_channels(spec, 40, 7000 + seed);

    BlockStructure bs;
    bs.U = testutil::random_unitary(n, 7100 + seed);
    bs.sizes = n == 2 ? std::vector<std::size_t>{1, 1}
                      : std::vector<std::size_t>{1, 2};
    bs.c = 2;

    BlockCovariance bc;
    bc.structure = bs;
    std::vector<HermitianMatrix> dirs;
    for (std::size_t k = 0; k < bs.c; ++k) {
      ComplexMatrix q = testutil::random_psd(bs.sizes[k], 7200 + 7 * seed + k,
                                             0.3)
                            .base();
      bc.blocks.emplace_back(cplx(0.3, 0.0) * q);
      dirs.push_back(testutil::random_hermitian(bs.sizes[k], 7300 + 7 * seed + k));
    }

    const auto g = capacity_gradient(set, bc, spec.noise_power());
    double directional = 0.0;
    for (std::size_t k = 0; k < bs.c; ++k) {
      directional += hs_inner(g[k].base(), dirs[k].base()).real();
    }

    const double h = 1e-5;
    auto shifted = [&](double t) {
      BlockCovariance out = bc;
      for (std::size_t k = 0; k < bs.c; ++k) {
        out.blocks[k] = HermitianMatrix(bc.blocks[k].base() +
                                        cplx(t, 0.0) * dirs[k].base());
      }
      return capacity_estimate(set, assemble_Q(out), spec.noise_power()).mean;
    };
    const double fd = (shifted(h) - shifted(-h)) / (2.0 * h);
    CHECK(std::abs(fd - directional) <=
          1e-5 * std::max(1.0, std::abs(directional)));
  }
}

TEST_CASE("kkt_verify scalar example") {
  const CovarianceSpec spec =
      CovarianceSpec::dense(1, 1, 1.0, HermitianMatrix::identity(1));
  const ChannelSampleSet set = sample_channels(spec, 50, 5);
  BlockCovariance bc{{diag({2.0})},
                     build_block_structure(coord_resolution({1}))};
  const KKTReport kkt = kkt_verify(set, bc, 2.0, 1.0);
  CHECK(kkt.mu > 0.0);
  CHECK(kkt.stationarity_residuals[0] <= 1e-14);
  CHECK(kkt.psd_slack_violations[0] <= 1e-14);
  CHECK(kkt.complementarity[0] <= 1e-12);
  CHECK(kkt.trace_gap <= 1e-12);

  // Infeasible candidates are rejected.
  BlockCovariance over{{diag({5.0})}, bc.structure};
  CHECK_THROWS_AS(kkt_verify(set, over, 2.0, 1.0), Error);
}

TEST_CASE("pinch_covariance") {
  const BlockStructure bs = build_block_structure(coord_resolution({1, 1}));
  ComplexMatrix ones(2, 2);
  ones(0, 0) = 1.0;
  ones(0, 1) = 1.0;
  ones(1, 0) = 1.0;
  ones(1, 1) = 1.0;
  const HermitianMatrix pinched = pinch_covariance(HermitianMatrix(ones), bs);
  CHECK(hs_norm(pinched.base() - ComplexMatrix::identity(2)) <= 1e-15);

  // Already block diagonal: unchanged.
  const HermitianMatrix d = diag({0.3, 0.9});
  CHECK(hs_norm(pinch_covariance(d, bs).base() - d.base()) <= 1e-15);

  // Oracle: iterate the averaging sequence Q <- (Q + D_j Q D_j)/2 over the
  // sign matrices D_j; its limit is the pinching.
  const AlgebraBasis basis =
      commutant_basis(assemble(testutil::profile12_spec()), 2, 3);
  const BlockStructure bs3 = build_block_structure(
      transpose_resolution(minimal_resolution(basis, 3)));
  const HermitianMatrix q = testutil::random_psd(3, 990);
  ComplexMatrix avg = q.base();
  for (const ComplexMatrix& d_j : sign_generators(bs3)) {
    avg = cplx(0.5, 0.0) * (avg + matmul(d_j, matmul(avg, adjoint(d_j))));
  }
  CHECK(hs_norm(pinch_covariance(q, bs3).base() - avg) <= 1e-12);

  // Trace and PSD-ness are preserved.
  CHECK(trace(pinch_covariance(q, bs3).base()).real() ==
        doctest::Approx(trace(q.base()).real()).epsilon(1e-12));
  CHECK(is_psd(pinch_covariance(q, bs3)));
}

TEST_CASE("solver on the scalar channel returns full power") {
  const CovarianceSpec spec =
      CovarianceSpec::dense(1, 1, 1.0, HermitianMatrix::identity(1));
  const ChannelSampleSet set = sample_channels(spec, 200, 12);
  const SolveResult result =
      solve_blocks(set, build_block_structure(coord_resolution({1})), 1.0, 1.0);
  CHECK(result.converged);
  CHECK(result.bc.blocks[0](0, 0).real() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(result.kkt.max_complementarity() <= 1e-7);
  CHECK(result.kkt.trace_gap <= 1e-7);
  for (std::size_t i = 0; i + 1 < result.objective_trace.size(); ++i) {
    CHECK(result.objective_trace[i] <= result.objective_trace[i + 1] + 1e-15);
  }
  CHECK(result.capacity.count == 200);
  CHECK(result.capacity.std_error > 0.0);
}

TEST_CASE("solve_full is solve_blocks with the trivial structure") {
  const CovarianceSpec spec = CovarianceSpec::kron_sum(
      2, 2, 1.0, {{testutil::fixture_R(), diag({1, 2})}});
  const ChannelSampleSet set = sample_channels(spec, 120, 9);
  const SolveResult full = solve_full(set, 2, 1.5, 1.0);
  BlockStructure trivial;
  trivial.U = ComplexMatrix::identity(2);
  trivial.sizes = {2};
  trivial.c = 1;
  const SolveResult blocks = solve_blocks(set, trivial, 1.5, 1.0);
  CHECK(full.iterations == blocks.iterations);
  CHECK(std::memcmp(full.bc.blocks[0].base().data(),
                    blocks.bc.blocks[0].base().data(),
                    4 * sizeof(cplx)) == 0);
  CHECK(full.capacity.mean == blocks.capacity.mean);
}

TEST_CASE("solver output satisfies KKT on a correlated fixture") {
  const CovarianceSpec spec = CovarianceSpec::kron_sum(
      2, 2, 1.0, {{testutil::fixture_R(), diag({1, 2})}});
  const BlockStructure bs = structure_for(spec, 1);
  ChannelSampleSet set = sample_channels(spec, 300, 21);
  set = symmetrize_samples(set, sign_generators(bs));
  SolverOptions opts;
  opts.tol_kkt = 1e-8;
  opts.max_iter = 5000;
  const SolveResult result = solve_blocks(set, bs, 2.0, 1.0, opts);
  CHECK(result.converged);
  CHECK(result.kkt.max_complementarity() <= 1e-8);
  CHECK(result.kkt.trace_gap <= 1e-7);
  CHECK(trace_sum(result.bc.blocks) <= 2.0 + 1e-9);
  for (const HermitianMatrix& b : result.bc.blocks) CHECK(is_psd(b));
}

TEST_CASE("solution equivalence") {
  const CovarianceSpec spec =
      CovarianceSpec::dense(2, 2, 1.0, HermitianMatrix::identity(4));
  const ChannelSampleSet set = sample_channels(spec, 100, 44);

  const HermitianMatrix q1 = diag({0.5, 0.5});
  const EquivalenceReport same = solution_equivalence(set, q1, q1, 1e-9);
  CHECK(same.equivalent);
  CHECK(same.max_deviation == 0.0);

  const EquivalenceReport different =
      solution_equivalence(set, q1, diag({1.0, 0.0}), 1e-5);
  CHECK(!different.equivalent);
  CHECK(different.max_deviation > 0.1);

  CHECK_THROWS_AS(solution_equivalence(set, q1, diag({0.2, 0.2}), 1e-9),
                  Error);
}

TEST_CASE("results are bit-identical across worker counts") {
  const CovarianceSpec spec = testutil::profile12_spec();
  const std::size_t s_count = 3000;  // several chunks

  setenv("COVCAP_THREADS", "1", 1);
  const ChannelSampleSet set1 = sample_channels(spec, s_count, 77);
  const HermitianMatrix q = testutil::random_psd(3, 1234, 0.1);
  const CapacityEstimate c1 = capacity_estimate(set1, q, 1.0);
  const HermitianMatrix cov1 = empirical_covariance(set1);

  setenv("COVCAP_THREADS", "7", 1);
  const ChannelSampleSet set7 = sample_channels(spec, s_count, 77);
  const CapacityEstimate c7 = capacity_estimate(set7, q, 1.0);
  const HermitianMatrix cov7 = empirical_covariance(set7);
  unsetenv("COVCAP_THREADS");

  for (std::size_t s = 0; s < s_count; ++s) {
    REQUIRE(std::memcmp(set1.samples[s].data(), set7.samples[s].data(),
                        6 * sizeof(cplx)) == 0);
  }
  CHECK(std::memcmp(&c1.mean, &c7.mean, sizeof(double)) == 0);
  CHECK(std::memcmp(&c1.std_error, &c7.std_error, sizeof(double)) == 0);
  CHECK(std::memcmp(cov1.base().data(), cov7.base().data(),
                    36 * sizeof(cplx)) == 0);
}

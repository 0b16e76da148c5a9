#pragma once

#include <cstddef>
#include <vector>

#include "covcap/commutant.hpp"
#include "covcap/covariance.hpp"
#include "covcap/eig.hpp"
#include "covcap/matrix.hpp"

// Block-diagonal restriction of the ergodic-capacity problem: the
// simultaneous diagonalizer built from a minimal resolution, sample-average
// capacity and gradient, projected gradient ascent over the feasible set
// {blocks PSD, total trace <= p}, KKT certification, pinching, and the
// diagonal-power reference solver for Kronecker covariances.
namespace covcap {

struct BlockStructure {
  ComplexMatrix U;                 // N x N unitary, columns grouped per block
  std::vector<std::size_t> sizes;  // l_1 .. l_c, summing to N
  std::size_t c = 0;               // block count

  std::size_t dim() const { return U.rows(); }
  // Column offset of block k (offset(c) == N).
  std::size_t offset(std::size_t k) const;
};

// U's columns are an orthonormal basis of range(P_1), then range(P_2), ...;
// sizes are the ranks. Pass the transposed resolution (projections of
// C_Sigma^t) to get the basis in which every symmetric input covariance is
// simultaneously block diagonal.
BlockStructure build_block_structure(const ProjectionResolution& res);

struct BlockCovariance {
  std::vector<HermitianMatrix> blocks;  // block j is sizes[j] x sizes[j], PSD
  BlockStructure structure;
};

// Q = U diag(Q_1, ..., Q_c) U^H.
HermitianMatrix assemble_Q(const BlockCovariance& bc);

// Uniform feasible start: Q_j = (p/N) I.
BlockCovariance uniform_blocks(const BlockStructure& bs, double p);

// The sign unitaries U (+-I blocks) U^H generating the symmetry group of the
// structure: D_j = U (2(P_1 + ... + P_j) - I) U^H for j = 1..c-1. Empty for
// c == 1. Symmetrizing a sample set with these makes the empirical objective
// exactly invariant under block-sign changes.
std::vector<ComplexMatrix> sign_generators(const BlockStructure& bs);

struct CapacityEstimate {
  double mean = 0.0;       // nats
  double std_error = 0.0;  // sample standard deviation / sqrt(count)
  std::size_t count = 0;
};

// (1/S) sum_s log det(I_M + H_s Q H_s^H / noise_power), in nats.
CapacityEstimate capacity_estimate(const ChannelSampleSet& set,
                                   const HermitianMatrix& q,
                                   double noise_power);

// Per-block gradient of the sample-average capacity:
// G_k = (1/(S sigma^2)) sum_s H_{s,k}^H M_s^{-1} H_{s,k},
// M_s = I + (1/sigma^2) sum_l H_{s,l} Q_l H_{s,l}^H, H_{s,k} = H_s U^k.
std::vector<HermitianMatrix> capacity_gradient(const ChannelSampleSet& set,
                                               const BlockCovariance& bc,
                                               double noise_power);

// Euclidean (HS) projection onto {all blocks PSD, sum of traces <= p}:
// eigenvalues of all blocks are projected jointly onto the truncated simplex.
// A feasible input is returned unchanged.
std::vector<HermitianMatrix> project_blocks(
    const std::vector<HermitianMatrix>& blocks, double p);

struct KKTReport {
  double mu = 0.0;  // max_k lambda_max(G_k)
  std::vector<double> stationarity_residuals;  // ||G_k - mu I + Psi_k||, 0 by construction
  std::vector<double> psd_slack_violations;    // max(0, -lambda_min(Psi_k))
  std::vector<double> complementarity;         // |tr(Psi_k Q_k)|
  double trace_gap = 0.0;                      // |sum tr(Q_k) - p|

  double max_complementarity() const;
};

// First-order optimality certificate: mu = max_k lambda_max(G_k),
// Psi_k = mu I - G_k (PSD by construction); the binding diagnostics are
// complementarity and trace_gap.
KKTReport kkt_verify(const ChannelSampleSet& set, const BlockCovariance& bc,
                     double p, double noise_power);

struct SolverOptions {
  std::size_t max_iter = 2000;
  double tol_kkt = 1e-7;
  double step_init = 1.0;
  double armijo_shrink = 0.5;
  double armijo_c1 = 1e-4;
};

struct SolveResult {
  BlockCovariance bc;
  KKTReport kkt;
  CapacityEstimate capacity;
  std::size_t iterations = 0;
  bool converged = false;  // false means the iteration budget ran out
  std::vector<double> objective_trace;  // non-decreasing (Armijo ascent)
};

// Projected gradient ascent with Armijo backtracking on the fixed
// sample-average objective, from the uniform start. Deterministic given
// inputs. On max_iter exhaustion the best iterate is returned with
// converged == false.
SolveResult solve_blocks(const ChannelSampleSet& set, const BlockStructure& bs,
                         double p, double noise_power,
                         const SolverOptions& opts = {});

// solve_blocks with the trivial single-block structure (U = I, one N x N
// block): the unrestricted baseline.
SolveResult solve_full(const ChannelSampleSet& set, std::size_t n, double p,
                       double noise_power, const SolverOptions& opts = {});

// U blockdiag(U^H Q U) U^H: off-diagonal blocks zeroed. Trace and PSD-ness
// are preserved; equals the average of Q over the sign symmetry group.
HermitianMatrix pinch_covariance(const HermitianMatrix& q,
                                 const BlockStructure& bs);

// Independent reference for Sigma = R (x) T: optimizes the N diagonal powers
// in the eigenbasis of T^t (conjugated eigenvectors of T) over the truncated
// simplex, on the same sample-average objective.
std::vector<double> kronecker_power_reference(const HermitianMatrix& r,
                                              const HermitianMatrix& t,
                                              double p, double noise_power,
                                              const ChannelSampleSet& set);

struct EquivalenceReport {
  bool equivalent = false;
  double max_deviation = 0.0;
};

// Two solutions are equivalent when no sampled channel can tell them apart:
// max_s ||H_s (Q1 - Q2) H_s^H|| / max(1, ||H_s Q1 H_s^H||) <= tol. Requires
// both PSD with traces equal within tol.
EquivalenceReport solution_equivalence(const ChannelSampleSet& set,
                                       const HermitianMatrix& q1,
                                       const HermitianMatrix& q2, double tol);

}  // namespace covcap

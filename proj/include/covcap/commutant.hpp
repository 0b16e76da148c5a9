#pragma once

#include <cstdint>
#include <vector>

#include "covcap/covariance.hpp"
#include "covcap/eig.hpp"
#include "covcap/matrix.hpp"

// The right commutant C_Sigma = {A : (I_M (x) A) Sigma = Sigma (I_M (x) A)}
// as a *-algebra: basis computation, algebraic-closure diagnostics, minimal
// resolutions of identity, the transpose algebra, channel-symmetry checks,
// and pinching of Kronecker-sum decompositions.
namespace covcap {

struct AlgebraBasis {
  std::size_t N = 0;    // matrices are N x N
  std::size_t dim = 0;  // algebra dimension
  std::vector<ComplexMatrix> elements;  // HS-orthonormal
};

struct ProjectionResolution {
  std::vector<HermitianMatrix> projections;  // mutually orthogonal, sum = I
  std::vector<std::size_t> ranks;
};

// HS-orthonormal basis of the nullspace of A -> (I (x) A) Sigma -
// Sigma (I (x) A), via SVD of its (MN)^2 x N^2 matrix; singular values
// <= kNullTolScale * sigma_max count as zero. The full singular spectrum is
// exported through singular_values when given. dim >= 1 always (the identity
// commutes).
AlgebraBasis commutant_basis(const HermitianMatrix& sigma, std::size_t m,
                             std::size_t n,
                             std::vector<double>* singular_values = nullptr);

struct StarReport {
  double product_residual;  // max over k,l of dist(B_k B_l, span)
  double adjoint_residual;  // max over k of dist(B_k^H, span)
  double unit_residual;     // dist(I_N, span)
};

// Diagnostic: residuals of projecting products, adjoints and the unit onto
// the span. All <= kStarTol for a valid commutant.
StarReport verify_star_algebra(const AlgebraBasis& basis);

// Projection of x onto span(basis.elements); the distance to the span is
// exported through residual when given.
ComplexMatrix span_project(const AlgebraBasis& basis, const ComplexMatrix& x,
                           double* residual = nullptr);

// Resolution of identity into minimal projections of the algebra, found by
// eigen-clustering a generic (seeded random) Hermitian element. Each
// projection is verified to lie in the span and to satisfy the minimality
// criterion P B P = lambda P; a failed draw is retried (at most 5 attempts)
// before GenericityFailure is thrown.
ProjectionResolution minimal_resolution(const AlgebraBasis& basis,
                                        std::uint64_t seed);

// Ranks sorted ascending; identical for every minimal resolution of the same
// algebra.
std::vector<std::size_t> rank_profile(const ProjectionResolution& res);

// {P_j^t}: a minimal resolution for the transposed algebra.
ProjectionResolution transpose_resolution(const ProjectionResolution& res);

struct SymmetryReport {
  bool is_symmetry;
  double residual;  // ||(I (x) U^t) Sigma - Sigma (I (x) U^t)|| / ||Sigma||
};

// Channel symmetry test: H U is distributed like H iff U^t lies in C_Sigma.
SymmetryReport is_symmetry(const HermitianMatrix& sigma, std::size_t m,
                           std::size_t n, const ComplexMatrix& u);

// Replaces each T_i by sum_j P_j T_i P_j. The reassembled covariance must
// match the original within kStarTol * ||Sigma||, otherwise ResidualExceeded
// is thrown (it means res is not a resolution inside C_Sigma).
std::vector<KronTerm> pinch_decomposition(const std::vector<KronTerm>& terms,
                                          const ProjectionResolution& res);

}  // namespace covcap

#pragma once

#include <cstddef>
#include <vector>

#include "covcap/matrix.hpp"

// Hermitian matrices, eigendecomposition, PSD square roots, nullspaces and
// Cholesky factorization. Tolerances are fixed here, relative to the
// Hilbert-Schmidt norm, sized for double-precision dense algebra at
// dimension <= 64.
namespace covcap {

inline constexpr double kHermTol = 1e-10;   // Hermitian-ness of inputs
inline constexpr double kEigTol = 1e-9;     // eigensystem residuals
inline constexpr double kPsdTol = 1e-9;     // tolerated negative eigenvalue band
inline constexpr double kClusterTolScale = 1e-7;  // x (spread + 1)
inline constexpr double kNullTolScale = 1e-9;     // x sigma_max
inline constexpr double kStarTol = 1e-8;    // *-algebra closure residuals
inline constexpr double kMinimalTol = 1e-7;  // minimal-projection residuals

class HermitianMatrix {
 public:
  // Validates squareness and ||base - base^H|| <= kHermTol * max(1, ||base||),
  // then stores the exactly Hermitian part.
  explicit HermitianMatrix(const ComplexMatrix& base);

  static HermitianMatrix identity(std::size_t n);
  static HermitianMatrix zero(std::size_t n);

  std::size_t dim() const { return base_.rows(); }
  const ComplexMatrix& base() const { return base_; }
  const cplx& operator()(std::size_t i, std::size_t j) const {
    return base_(i, j);
  }

 private:
  ComplexMatrix base_;
};

struct EigSystem {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // columns are orthonormal eigenvectors
};

// Spectral decomposition; throws EigFailure if the solver does not converge.
EigSystem herm_eig(const HermitianMatrix& a);

// Unique PSD square root. Eigenvalues in [-kPsdTol * max(1, ||A||), 0) are
// clamped to zero; anything lower throws IndefiniteMatrix.
HermitianMatrix psd_sqrt(const HermitianMatrix& a);

double min_eigenvalue(const HermitianMatrix& a);
double max_eigenvalue(const HermitianMatrix& a);

// PSD within tolerance: min eigenvalue >= -tol * max(1, ||A||).
bool is_psd(const HermitianMatrix& a, double tol = kPsdTol);

// Orthonormal columns spanning the right nullspace of K: singular values
// <= rel_tol * sigma_max count as zero (all of them when sigma_max == 0).
// The full singular spectrum is exported through singular_values when given.
ComplexMatrix svd_nullspace(const ComplexMatrix& k, double rel_tol,
                            std::vector<double>* singular_values = nullptr);

// In-place lower Cholesky factorization A = L L^H for Hermitian positive
// definite input (reads the lower triangle; the strict upper triangle of the
// result is stale). Returns false on a non-positive pivot.
bool cholesky_lower(ComplexMatrix& a);

// log det(L L^H) = 2 sum_i log L(i,i) for a Cholesky factor L.
double logdet_from_cholesky(const ComplexMatrix& l);

// Solves L Y = B by forward substitution, overwriting B with Y.
void forward_subst(const ComplexMatrix& l, ComplexMatrix& b);

// exp(iX) for Hermitian X; the result is unitary.
ComplexMatrix unitary_exp_i(const HermitianMatrix& x);

}  // namespace covcap

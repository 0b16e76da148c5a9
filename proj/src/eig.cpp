#include "covcap/eig.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>

#include "covcap/errors.hpp"

namespace covcap {
namespace {

Eigen::MatrixXcd to_eigen(const ComplexMatrix& a) {
  Eigen::MatrixXcd m(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
  }
  return m;
}

ComplexMatrix from_eigen(const Eigen::MatrixXcd& m) {
  ComplexMatrix a(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) a(i, j) = m(i, j);
  }
  return a;
}

}  // namespace

HermitianMatrix::HermitianMatrix(const ComplexMatrix& base) {
  if (base.rows() != base.cols()) {
    throw DimensionMismatch("HermitianMatrix: not square");
  }
  if (!base.is_finite()) throw Error("HermitianMatrix: non-finite entries");
  const ComplexMatrix sym = hermitian_part(base);
  const double residual = hs_norm(base - sym) * 2.0;  // = ||base - base^H||
  const double scale = std::max(1.0, hs_norm(base));
  if (residual > kHermTol * scale) {
    throw NotHermitian("matrix is not Hermitian: residual " +
                       std::to_string(residual) + " exceeds tolerance");
  }
  base_ = sym;
}

HermitianMatrix HermitianMatrix::identity(std::size_t n) {
  return HermitianMatrix(ComplexMatrix::identity(n));
}

HermitianMatrix HermitianMatrix::zero(std::size_t n) {
  return HermitianMatrix(ComplexMatrix(n, n));
}

EigSystem herm_eig(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(to_eigen(a.base()));
  if (solver.info() != Eigen::Success) {
    throw EigFailure("Hermitian eigensolver did not converge at dim " +
                     std::to_string(a.dim()));
  }
  EigSystem out;
  out.values.assign(solver.eigenvalues().data(),
                    solver.eigenvalues().data() + a.dim());
  out.vectors = from_eigen(solver.eigenvectors());
  return out;
}

HermitianMatrix psd_sqrt(const HermitianMatrix& a) {
  const EigSystem es = herm_eig(a);
  const double scale = std::max(1.0, hs_norm(a.base()));
  ComplexMatrix s(a.dim(), a.dim());
  for (std::size_t k = 0; k < a.dim(); ++k) {
    double lambda = es.values[k];
    if (lambda < 0.0) {
      if (lambda < -kPsdTol * scale) {
        throw IndefiniteMatrix("psd_sqrt: eigenvalue " + std::to_string(lambda) +
                               " below the PSD tolerance band");
      }
      lambda = 0.0;
    }
    const double root = std::sqrt(lambda);
    // s += root * v_k v_k^H
    for (std::size_t i = 0; i < a.dim(); ++i) {
      const cplx vi = es.vectors(i, k);
      for (std::size_t j = 0; j < a.dim(); ++j) {
        s(i, j) += root * vi * std::conj(es.vectors(j, k));
      }
    }
  }
  return HermitianMatrix(hermitian_part(s));
}

double min_eigenvalue(const HermitianMatrix& a) {
  return herm_eig(a).values.front();
}

double max_eigenvalue(const HermitianMatrix& a) {
  return herm_eig(a).values.back();
}

bool is_psd(const HermitianMatrix& a, double tol) {
  if (a.dim() == 0) return true;
  return min_eigenvalue(a) >= -tol * std::max(1.0, hs_norm(a.base()));
}

ComplexMatrix svd_nullspace(const ComplexMatrix& k, double rel_tol,
                            std::vector<double>* singular_values) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(k), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (singular_values != nullptr) {
    singular_values->assign(sv.data(), sv.data() + sv.size());
  }
  const double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
  const double cut = rel_tol * sigma_max;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cut) ++rank;
  }
  const Eigen::Index n = svd.matrixV().rows();
  // Columns of V beyond the rank, plus any columns JacobiSVD did not list a
  // singular value for (possible when K has fewer rows than columns), span
  // the nullspace.
  return from_eigen(svd.matrixV().rightCols(n - rank));
}

bool cholesky_lower(ComplexMatrix& a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw DimensionMismatch("cholesky_lower: not square");
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a(j, j).real();
    for (std::size_t k = 0; k < j; ++k) diag -= std::norm(a(j, k));
    if (!(diag > 0.0)) return false;
    const double ljj = std::sqrt(diag);
    a(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      cplx v = a(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= a(i, k) * std::conj(a(j, k));
      a(i, j) = v / ljj;
    }
  }
  return true;
}

double logdet_from_cholesky(const ComplexMatrix& l) {
  double acc = 0.0;
  for (std::size_t i = 0; i < l.rows(); ++i) acc += std::log(l(i, i).real());
  return 2.0 * acc;
}

void forward_subst(const ComplexMatrix& l, ComplexMatrix& b) {
  const std::size_t n = l.rows();
  if (b.rows() != n) throw DimensionMismatch("forward_subst: row mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < b.cols(); ++c) {
      cplx v = b(i, c);
      for (std::size_t k = 0; k < i; ++k) v -= l(i, k) * b(k, c);
      b(i, c) = v / l(i, i).real();
    }
  }
}

ComplexMatrix unitary_exp_i(const HermitianMatrix& x) {
  const EigSystem es = herm_eig(x);
  const std::size_t n = x.dim();
  ComplexMatrix u(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const cplx phase = std::exp(cplx(0.0, es.values[k]));
    for (std::size_t i = 0; i < n; ++i) {
      const cplx vi = es.vectors(i, k);
      for (std::size_t j = 0; j < n; ++j) {
        u(i, j) += phase * vi * std::conj(es.vectors(j, k));
      }
    }
  }
  return u;
}

}  // namespace covcap

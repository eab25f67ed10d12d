#pragma once

#include <cstdint>
#include <string>

#include "varprec/covariance.hpp"
#include "varprec/operator.hpp"

namespace varprec::precond {

using varprec::LinearOperatorHandle;
using varprec::Matrix;
using varprec::Vector;

/// Column-orthonormal U (n x r) with strictly positive eigenvalue estimates
/// in descending order.
struct EigenpairSet {
  Matrix U;
  Vector lambda;

  Eigen::Index n() const { return U.rows(); }
  Eigen::Index r() const { return U.cols(); }

  /// Checks orthonormality (max-norm tolerance), positivity and ordering.
  void validate(double ortho_tol = 1e-8) const;
};

/// Spectral preconditioner P_alpha = beta I + U (mu Lambda^alpha - beta I) U^T.
/// Spectrum: { mu * lambda_i^alpha } on range(U), beta on the complement.
struct SpectralPreconditioner {
  double alpha = -1.0;
  double beta = 1.0;
  double mu = 1.0;
  EigenpairSet pairs;

  /// beta v + U ((mu lambda^alpha - beta) .* (U^T v)); never forms n x n.
  Vector apply(const Vector& v) const;
  LinearOperatorHandle handle() const;
};

/// Split factor L = I + U (mu Lambda^{-1/2} - I) U^T, mu >= 1, so that
/// L L^T = beta I + U (mu^2 Lambda^{-1} - beta I) U^T with beta = 1.
/// L is symmetric. Rejects mu < 1.
LinearOperatorHandle split_L(const EigenpairSet& pairs, double mu);

struct EigResult {
  EigenpairSet pairs;
  Vector residuals;  // ||A u_i - lambda_i u_i|| per retained pair
  bool converged = true;
};

/// Leading r eigenpairs of an SPD operator: dense solve when n <= n_small,
/// otherwise Lanczos with full reorthogonalization. Eigenvector signs are
/// fixed by making each column's largest-magnitude entry positive.
EigResult exact_leading_eigs(const LinearOperatorHandle& A, int r,
                             int n_small = 512, int max_lanczos = 0,
                             std::uint64_t seed = 0,
                             double resid_tol = 1e-8);

/// || A - A_r ||_F^2 for a small dense SPD matrix, computed explicitly; also
/// checks it equals the tail eigenvalue sum of squares.
double eym_residual(const Matrix& A, int r);

/// Split operator L = B^{1/2} for diagonal B, giving
/// L^T A L = B^{T/2} G^T R^{-1} G B^{1/2} + I with all eigenvalues >= 1.
LinearOperatorHandle b_half_preconditioner(const assim::CovarianceModel& cov);

/// Binary container: header (magic "EIGS", version u32, n u32, r u32) then
/// lambda followed by U column-major, little-endian f64.
void write_eigenpairs(const std::string& path, const EigenpairSet& set);
EigenpairSet read_eigenpairs(const std::string& path);

}  // namespace varprec::precond

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "varprec/operator.hpp"

namespace varprec::krylov {

using varprec::LinearOperatorHandle;
using varprec::Matrix;
using varprec::Vector;

enum class Termination { tolerance, max_iter, breakdown };

const char* to_string(Termination t);

struct SolveReport {
  int iterations = 0;
  std::vector<double> residual_history;  // length iterations + 1
  double final_residual = 0.0;
  double wall_seconds = 0.0;
  Termination terminated_by = Termination::max_iter;
  std::string note;
};

/// One CSV row group: (solve_id, iteration, residual_norm) per history entry.
void append_csv(std::ostream& os, const std::string& solve_id, const SolveReport& r);

struct CgOptions {
  double tol = 1e-7;   // absolute 2-norm residual threshold
  int maxit = 2000;
  // Observes each iterate (including x0 at iteration 0); test instrumentation.
  std::function<void(int, const Vector&)> on_iterate;
};

/// Standard conjugate gradient on an SPD operator. Stops when the recursive
/// residual satisfies ||r_j||_2 < tol or j reaches maxit.
std::pair<Vector, SolveReport> cg(const LinearOperatorHandle& A, const Vector& b,
                                  const Vector& x0, const CgOptions& opt = {});

/// Split-preconditioned CG: runs CG on (L^T A L) y = L^T b and returns
/// x = L y. x0 is the initial iterate of the inner (preconditioned) system;
/// pass zero (the default elsewhere) unless you know L^{-1} x0.
/// The residual history and the stopping test use the residual of the
/// ORIGINAL system, b - A x_j, so histories are comparable across
/// preconditioners. Lt may be omitted when L is symmetric.
std::pair<Vector, SolveReport> pcg_split(const LinearOperatorHandle& A,
                                         const LinearOperatorHandle& L,
                                         const Vector& b, const Vector& x0,
                                         const CgOptions& opt = {},
                                         const LinearOperatorHandle* Lt = nullptr);

/// CG error bound 2*((sqrt(k)-1)/(sqrt(k)+1))^k_iter.
double cg_bound(double kappa, int k);

struct ConditionEstimate {
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  double kappa = 1.0;
  int iterations = 0;
  bool breakdown = false;  // Krylov space became invariant early
};

/// Ritz estimates of the extreme eigenvalues by Lanczos with full
/// reorthogonalization, random start vector.
ConditionEstimate lanczos_extreme_eigs(const LinearOperatorHandle& A, int iters,
                                       std::uint64_t seed = 0);

/// Full Ritz spectrum from the same Lanczos process (diagnostics).
std::vector<double> lanczos_ritz_values(const LinearOperatorHandle& A, int iters,
                                        std::uint64_t seed = 0);

}  // namespace varprec::krylov

#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "varprec/covariance.hpp"
#include "varprec/krylov.hpp"
#include "varprec/sw_model.hpp"

namespace varprec::assim {

using sw::ModelParams;
using sw::StateVector;

/// Matrix-free Gauss-Newton system A_x dx = b_x at a linearization point:
///   A_x = G_x^T R^{-1} G_x + B^{-1},  b_x = -G_x^T R^{-1} d - B^{-1}(x - x_b)
/// with d = G(x) - y. The operator handle owns the stored nonlinear
/// trajectory; do not share one system across threads inside a solve.
struct GaussNewtonSystem {
  Vector x;           // linearization point (packed)
  Vector b;           // right-hand side
  Vector departures;  // d = G(x) - y
  double cost = 0.0;  // J(x), available for free from the forward sweep
  LinearOperatorHandle A;
  std::shared_ptr<const sw::Trajectory> trajectory;
};

/// Strong-constraint 4D-Var problem with a single observation time at the
/// window end: G = H o M.
struct FourDVarProblem {
  GridSpec grid;
  ModelParams params;
  ObsOperator obs;
  CovarianceModel cov;
  Vector y;  // observations, length p

  void validate() const;

  /// G(x) = H(M(x)), propagating over steps_per_window steps.
  Vector forward_obs(const Vector& x) const;

  double cost(const Vector& x) const;
  Vector grad_cost(const Vector& x) const;
  GaussNewtonSystem build_gn_system(const Vector& x) const;
};

/// Preconditioner factory for the inner loop: maps the linearization point
/// (and its assembled system) to a split operator L, or nullopt for the
/// plain, unpreconditioned CG path.
using PrecFactory = std::function<std::optional<LinearOperatorHandle>(
    const Vector& x, const GaussNewtonSystem& sys)>;

struct OuterLoopOptions {
  int n_outer = 1;
  int n_inner = 2000;
  double eps = 1e-7;
  PrecFactory prec_factory;  // empty -> unpreconditioned
};

struct OuterLoopResult {
  std::vector<Vector> iterates;       // x_0 .. x_{n_outer}
  std::vector<double> cost_history;   // J(x_0) .. J(x_{n_outer-1}) at linearization
  std::vector<krylov::SolveReport> inner_reports;
};

/// Incremental minimization: linearize, solve the inner quadratic problem
/// with (preconditioned) CG from a zero increment, update, repeat.
OuterLoopResult outer_loop(const FourDVarProblem& prob, const Vector& x0,
                           const OuterLoopOptions& opt);

}  // namespace varprec::assim

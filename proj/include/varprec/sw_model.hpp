#pragma once

#include <vector>

#include "varprec/state.hpp"

namespace varprec::sw {

/// One explicit forward-backward step of the discrete shallow-water system:
/// continuity first, then vector-invariant momentum with the Bernoulli head
/// evaluated on the updated surface. Throws NumericalBlowup if the result is
/// not finite.
StateVector step(const StateVector& s, const ModelParams& p, const GridSpec& g);

StateVector propagate(const StateVector& s, int n_steps, const ModelParams& p,
                      const GridSpec& g);

/// Stored nonlinear trajectory used as the linearization base for the
/// tangent-linear and adjoint sweeps. Immutable after construction.
class Trajectory {
public:
  Trajectory(StateVector x0, int n_steps, const ModelParams& p, const GridSpec& g);

  int n_steps() const { return static_cast<int>(states_.size()) - 1; }
  const StateVector& state(int k) const { return states_.at(k); }
  const StateVector& final_state() const { return states_.back(); }
  const GridSpec& grid() const { return grid_; }
  const ModelParams& params() const { return params_; }

  /// Exact Jacobian-vector product of the discrete n-step map.
  StateVector tlm(const StateVector& dx) const;
  /// Exact transpose of tlm: <tlm(dx), dy> = <dx, adjoint(dy)>.
  StateVector adjoint(const StateVector& dy) const;

private:
  GridSpec grid_;
  ModelParams params_;
  std::vector<StateVector> states_;
};

StateVector tlm_apply(const StateVector& x_lin, const StateVector& dx,
                      int n_steps, const ModelParams& p, const GridSpec& g);
StateVector adjoint_apply(const StateVector& x_lin, const StateVector& dy,
                          int n_steps, const ModelParams& p, const GridSpec& g);

}  // namespace varprec::sw

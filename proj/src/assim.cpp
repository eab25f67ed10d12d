#include "varprec/assim.hpp"

namespace varprec::assim {

void FourDVarProblem::validate() const {
  grid.validate();
  params.validate(grid);
  cov.validate();
  if (cov.x_b.size() != grid.state_size())
    throw ShapeError("problem: background dimension does not match grid");
  if (y.size() != grid.obs_size())
    throw ShapeError("problem: observation dimension does not match grid");
  if (cov.r_var.size() != grid.obs_size())
    throw ShapeError("problem: R dimension does not match observation space");
}

Vector FourDVarProblem::forward_obs(const Vector& x) const {
  const StateVector xs = sw::unpack(x, grid);
  const StateVector xf = sw::propagate(xs, params.steps_per_window, params, grid);
  return obs.apply(sw::pack(xf));
}

double FourDVarProblem::cost(const Vector& x) const {
  const Vector d = forward_obs(x) - y;
  const Vector db = x - cov.x_b;
  return 0.5 * d.dot(cov.apply_Rinv(d)) + 0.5 * db.dot(cov.apply_Binv(db));
}

Vector FourDVarProblem::grad_cost(const Vector& x) const {
  const sw::Trajectory traj(sw::unpack(x, grid), params.steps_per_window, params, grid);
  const Vector d = obs.apply(sw::pack(traj.final_state())) - y;
  const Vector adj_in = obs.apply_transpose(cov.apply_Rinv(d));
  const Vector gT = sw::pack(traj.adjoint(sw::unpack(adj_in, grid)));
  return gT + cov.apply_Binv(x - cov.x_b);
}

GaussNewtonSystem FourDVarProblem::build_gn_system(const Vector& x) const {
  GaussNewtonSystem sys;
  sys.x = x;
  sys.trajectory = std::make_shared<const sw::Trajectory>(
      sw::unpack(x, grid), params.steps_per_window, params, grid);

  sys.departures = obs.apply(sw::pack(sys.trajectory->final_state())) - y;
  const Vector db = x - cov.x_b;
  sys.cost = 0.5 * sys.departures.dot(cov.apply_Rinv(sys.departures)) +
             0.5 * db.dot(cov.apply_Binv(db));

  const Vector adj_in = obs.apply_transpose(cov.apply_Rinv(sys.departures));
  sys.b = -sw::pack(sys.trajectory->adjoint(sw::unpack(adj_in, grid))) -
          cov.apply_Binv(db);

  // v -> G^T R^{-1} G v + B^{-1} v; the TLM/adjoint sweeps reuse the stored
  // trajectory, so each application costs two linearized model runs.
  const auto traj = sys.trajectory;
  const GridSpec g = grid;
  const ObsOperator H = obs;
  const CovarianceModel covc = cov;
  sys.A.n = grid.state_size();
  sys.A.apply = [traj, g, H, covc](const Vector& v) -> Vector {
    const Vector Gv = H.apply(sw::pack(traj->tlm(sw::unpack(v, g))));
    const Vector back = H.apply_transpose(covc.apply_Rinv(Gv));
    return sw::pack(traj->adjoint(sw::unpack(back, g))) + covc.apply_Binv(v);
  };
  return sys;
}

OuterLoopResult outer_loop(const FourDVarProblem& prob, const Vector& x0,
                           const OuterLoopOptions& opt) {
  OuterLoopResult res;
  Vector x = x0;
  res.iterates.push_back(x);
  for (int it = 0; it < opt.n_outer; ++it) {
    GaussNewtonSystem sys = prob.build_gn_system(x);
    res.cost_history.push_back(sys.cost);

    const Vector dx0 = Vector::Zero(x.size());
    krylov::CgOptions copt;
    copt.tol = opt.eps;
    copt.maxit = opt.n_inner;

    std::optional<LinearOperatorHandle> L;
    if (opt.prec_factory) L = opt.prec_factory(x, sys);

    auto [dx, rep] = L ? krylov::pcg_split(sys.A, *L, sys.b, dx0, copt)
                       : krylov::cg(sys.A, sys.b, dx0, copt);
    res.inner_reports.push_back(std::move(rep));

    x += dx;
    res.iterates.push_back(x);
  }
  return res;
}

}  // namespace varprec::assim

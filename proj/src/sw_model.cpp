#include "varprec/sw_model.hpp"

#include <cmath>

namespace varprec::sw {

// Staggering conventions, with (i, j) array indices and x = i*dx etc.:
//   eta(i,j) at cell center ((i+1/2)dx, (j+1/2)dy), i in [0,nx), j in [0,ny)
//   u(i,j)   at interior face ((i+1)dx, (j+1/2)dy), i in [0,nx-1), j in [0,ny)
//   v(i,j)   at interior face ((i+1/2)dx, (j+1)dy), i in [0,nx), j in [0,ny-1)
//   zeta(a,b) at corner (a dx, b dy); boundary corners carry zeta = 0
//     (free-slip), wall-normal velocities are 0 and not stored.
//
// step(), tlm_step() and adjoint_step() are written statement-for-statement
// in parallel; the adjoint walks the same statements in reverse and must be
// kept in sync with the forward code by hand.

namespace {

struct StepGeometry {
  int nx, ny;
  double dx, dy, dx2, dy2;
  explicit StepGeometry(const GridSpec& g)
      : nx(g.nx), ny(g.ny), dx(g.dx()), dy(g.dy()),
        dx2(g.dx() * g.dx()), dy2(g.dy() * g.dy()) {}
};

// Coriolis parameter on the beta plane, centered mid-basin.
inline double coriolis_at_y(const ModelParams& p, const GridSpec& g, double y) {
  return p.f0 + p.beta * (y - 0.5 * g.Ly);
}

// Base-state quantities shared by the forward, tangent-linear and adjoint
// sweeps of a single step.
struct StepBase {
  Matrix h;      // eta0 + eta, nx x ny
  Matrix zeta;   // relative vorticity at corners, (nx+1) x (ny+1)
  Matrix vbar;   // v averaged to u points, (nx-1) x ny
  Matrix ubar;   // u averaged to v points, nx x (ny-1)
  Matrix xiu;    // absolute vorticity at u points
  Matrix xiv;    // absolute vorticity at v points
};

StepBase build_base(const StateVector& s, const ModelParams& p, const GridSpec& g) {
  const StepGeometry gm(g);
  const int nx = gm.nx, ny = gm.ny;
  StepBase b;
  b.h = Matrix::Constant(nx, ny, p.eta0) + s.eta;

  b.zeta = Matrix::Zero(nx + 1, ny + 1);
  for (int bb = 1; bb <= ny - 1; ++bb)
    for (int a = 1; a <= nx - 1; ++a)
      b.zeta(a, bb) = (s.v(a, bb - 1) - s.v(a - 1, bb - 1)) / gm.dx -
                      (s.u(a - 1, bb) - s.u(a - 1, bb - 1)) / gm.dy;

  b.vbar = Matrix::Zero(nx - 1, ny);
  b.xiu = Matrix::Zero(nx - 1, ny);
  for (int j = 0; j < ny; ++j) {
    const double fu = coriolis_at_y(p, g, (j + 0.5) * gm.dy);
    for (int i = 0; i < nx - 1; ++i) {
      double sum = 0.0;
      if (j > 0) sum += s.v(i, j - 1) + s.v(i + 1, j - 1);
      if (j < ny - 1) sum += s.v(i, j) + s.v(i + 1, j);
      b.vbar(i, j) = 0.25 * sum;
      b.xiu(i, j) = fu + 0.5 * (b.zeta(i + 1, j) + b.zeta(i + 1, j + 1));
    }
  }

  b.ubar = Matrix::Zero(nx, ny - 1);
  b.xiv = Matrix::Zero(nx, ny - 1);
  for (int j = 0; j < ny - 1; ++j) {
    const double fv = coriolis_at_y(p, g, (j + 1.0) * gm.dy);
    for (int i = 0; i < nx; ++i) {
      double sum = 0.0;
      if (i > 0) sum += s.u(i - 1, j) + s.u(i - 1, j + 1);
      if (i < nx - 1) sum += s.u(i, j) + s.u(i, j + 1);
      b.ubar(i, j) = 0.25 * sum;
      b.xiv(i, j) = fv + 0.5 * (b.zeta(i, j + 1) + b.zeta(i + 1, j + 1));
    }
  }
  return b;
}

StateVector step_impl(const StateVector& s, const ModelParams& p, const GridSpec& g) {
  const StepGeometry gm(g);
  const int nx = gm.nx, ny = gm.ny;
  const StepBase base = build_base(s, p, g);

  // Continuity: layer-thickness fluxes through interior faces.
  Matrix Fx(nx - 1, ny), Fy(nx, ny - 1);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx - 1; ++i)
      Fx(i, j) = 0.5 * (base.h(i, j) + base.h(i + 1, j)) * s.u(i, j);
  for (int j = 0; j < ny - 1; ++j)
    for (int i = 0; i < nx; ++i)
      Fy(i, j) = 0.5 * (base.h(i, j) + base.h(i, j + 1)) * s.v(i, j);

  Matrix eta2(nx, ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double fe = (i < nx - 1 ? Fx(i, j) : 0.0) - (i > 0 ? Fx(i - 1, j) : 0.0);
      const double fn = (j < ny - 1 ? Fy(i, j) : 0.0) - (j > 0 ? Fy(i, j - 1) : 0.0);
      eta2(i, j) = s.eta(i, j) - p.dt * (fe / gm.dx + fn / gm.dy);
    }

  // Bernoulli head on the updated surface (forward-backward coupling).
  Matrix bern(nx, ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double uw = (i > 0) ? s.u(i - 1, j) : 0.0;
      const double ue = (i < nx - 1) ? s.u(i, j) : 0.0;
      const double vs = (j > 0) ? s.v(i, j - 1) : 0.0;
      const double vn = (j < ny - 1) ? s.v(i, j) : 0.0;
      const double ke = 0.25 * (uw * uw + ue * ue + vs * vs + vn * vn);
      bern(i, j) = p.g * eta2(i, j) + ke;
    }

  const double wind_scale = p.tau0 / (p.rho0 * p.eta0);

  StateVector out;
  out.eta = eta2;
  out.u = Matrix(nx - 1, ny);
  out.v = Matrix(nx, ny - 1);

  for (int j = 0; j < ny; ++j) {
    const double wind = wind_scale * std::cos(2.0 * M_PI * ((j + 0.5) * gm.dy) / g.Ly);
    for (int i = 0; i < nx - 1; ++i) {
      const double uw = (i > 0) ? s.u(i - 1, j) : 0.0;
      const double ue = (i < nx - 2) ? s.u(i + 1, j) : 0.0;
      const double us = (j > 0) ? s.u(i, j - 1) : s.u(i, j);  // free-slip mirror
      const double un = (j < ny - 1) ? s.u(i, j + 1) : s.u(i, j);
      const double lap = (ue - 2.0 * s.u(i, j) + uw) / gm.dx2 +
                         (un - 2.0 * s.u(i, j) + us) / gm.dy2;
      const double uten = base.xiu(i, j) * base.vbar(i, j) -
                          (bern(i + 1, j) - bern(i, j)) / gm.dx + p.nu * lap -
                          p.cb * s.u(i, j) + wind;
      out.u(i, j) = s.u(i, j) + p.dt * uten;
    }
  }

  for (int j = 0; j < ny - 1; ++j)
    for (int i = 0; i < nx; ++i) {
      const double vw = (i > 0) ? s.v(i - 1, j) : s.v(i, j);  // free-slip mirror
      const double ve = (i < nx - 1) ? s.v(i + 1, j) : s.v(i, j);
      const double vs = (j > 0) ? s.v(i, j - 1) : 0.0;
      const double vn = (j < ny - 2) ? s.v(i, j + 1) : 0.0;
      const double lap = (ve - 2.0 * s.v(i, j) + vw) / gm.dx2 +
                         (vn - 2.0 * s.v(i, j) + vs) / gm.dy2;
      const double vten = -base.xiv(i, j) * base.ubar(i, j) -
                          (bern(i, j + 1) - bern(i, j)) / gm.dy + p.nu * lap -
                          p.cb * s.v(i, j);
      out.v(i, j) = s.v(i, j) + p.dt * vten;
    }

  return out;
}

StateVector tlm_step(const StateVector& s, const StateVector& d,
                     const ModelParams& p, const GridSpec& g) {
  const StepGeometry gm(g);
  const int nx = gm.nx, ny = gm.ny;
  const StepBase base = build_base(s, p, g);

  Matrix dFx(nx - 1, ny), dFy(nx, ny - 1);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx - 1; ++i)
      dFx(i, j) = 0.5 * (d.eta(i, j) + d.eta(i + 1, j)) * s.u(i, j) +
                  0.5 * (base.h(i, j) + base.h(i + 1, j)) * d.u(i, j);
  for (int j = 0; j < ny - 1; ++j)
    for (int i = 0; i < nx; ++i)
      dFy(i, j) = 0.5 * (d.eta(i, j) + d.eta(i, j + 1)) * s.v(i, j) +
                  0.5 * (base.h(i, j) + base.h(i, j + 1)) * d.v(i, j);

  Matrix deta2(nx, ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double fe = (i < nx - 1 ? dFx(i, j) : 0.0) - (i > 0 ? dFx(i - 1, j) : 0.0);
      const double fn = (j < ny - 1 ? dFy(i, j) : 0.0) - (j > 0 ? dFy(i, j - 1) : 0.0);
      deta2(i, j) = d.eta(i, j) - p.dt * (fe / gm.dx + fn / gm.dy);
    }

  Matrix dzeta = Matrix::Zero(nx + 1, ny + 1);
  for (int bb = 1; bb <= ny - 1; ++bb)
    for (int a = 1; a <= nx - 1; ++a)
      dzeta(a, bb) = (d.v(a, bb - 1) - d.v(a - 1, bb - 1)) / gm.dx -
                     (d.u(a - 1, bb) - d.u(a - 1, bb - 1)) / gm.dy;

  Matrix dbern(nx, ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      double dke = 0.0;
      if (i > 0) dke += 0.5 * s.u(i - 1, j) * d.u(i - 1, j);
      if (i < nx - 1) dke += 0.5 * s.u(i, j) * d.u(i, j);
      if (j > 0) dke += 0.5 * s.v(i, j - 1) * d.v(i, j - 1);
      if (j < ny - 1) dke += 0.5 * s.v(i, j) * d.v(i, j);
      dbern(i, j) = p.g * deta2(i, j) + dke;
    }

  StateVector out;
  out.eta = deta2;
  out.u = Matrix(nx - 1, ny);
  out.v = Matrix(nx, ny - 1);

  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx - 1; ++i) {
      double dvbar = 0.0;
      if (j > 0) dvbar += d.v(i, j - 1) + d.v(i + 1, j - 1);
      if (j < ny - 1) dvbar += d.v(i, j) + d.v(i + 1, j);
      dvbar *= 0.25;
      const double dxiu = 0.5 * (dzeta(i + 1, j) + dzeta(i + 1, j + 1));
      const double uw = (i > 0) ? d.u(i - 1, j) : 0.0;
      const double ue = (i < nx - 2) ? d.u(i + 1, j) : 0.0;
      const double us = (j > 0) ? d.u(i, j - 1) : d.u(i, j);
      const double un = (j < ny - 1) ? d.u(i, j + 1) : d.u(i, j);
      const double dlap = (ue - 2.0 * d.u(i, j) + uw) / gm.dx2 +
                          (un - 2.0 * d.u(i, j) + us) / gm.dy2;
      const double duten = dxiu * base.vbar(i, j) + base.xiu(i, j) * dvbar -
                           (dbern(i + 1, j) - dbern(i, j)) / gm.dx +
                           p.nu * dlap - p.cb * d.u(i, j);
      out.u(i, j) = d.u(i, j) + p.dt * duten;
    }

  for (int j = 0; j < ny - 1; ++j)
    for (int i = 0; i < nx; ++i) {
      double dubar = 0.0;
      if (i > 0) dubar += d.u(i - 1, j) + d.u(i - 1, j + 1);
      if (i < nx - 1) dubar += d.u(i, j) + d.u(i, j + 1);
      dubar *= 0.25;
      const double dxiv = 0.5 * (dzeta(i, j + 1) + dzeta(i + 1, j + 1));
      const double vw = (i > 0) ? d.v(i - 1, j) : d.v(i, j);
      const double ve = (i < nx - 1) ? d.v(i + 1, j) : d.v(i, j);
      const double vs = (j > 0) ? d.v(i, j - 1) : 0.0;
      const double vn = (j < ny - 2) ? d.v(i, j + 1) : 0.0;
      const double dlap = (ve - 2.0 * d.v(i, j) + vw) / gm.dx2 +
                          (vn - 2.0 * d.v(i, j) + vs) / gm.dy2;
      const double dvten = -dxiv * base.ubar(i, j) - base.xiv(i, j) * dubar -
                           (dbern(i, j + 1) - dbern(i, j)) / gm.dy +
                           p.nu * dlap - p.cb * d.v(i, j);
      out.v(i, j) = d.v(i, j) + p.dt * dvten;
    }

  return out;
}

StateVector adjoint_step(const StateVector& s, const StateVector& a,
                         const ModelParams& p, const GridSpec& g) {
  const StepGeometry gm(g);
  const int nx = gm.nx, ny = gm.ny;
  const StepBase base = build_base(s, p, g);

  StateVector r = StateVector::zero(g);  // adjoint wrt the step input
  Matrix aeta2 = a.eta;                  // eta2 is itself an output
  Matrix abern = Matrix::Zero(nx, ny);
  Matrix azeta = Matrix::Zero(nx + 1, ny + 1);

  // Reverse of the v-momentum update.
  for (int j = 0; j < ny - 1; ++j)
    for (int i = 0; i < nx; ++i) {
      const double avten = p.dt * a.v(i, j);
      r.v(i, j) += a.v(i, j);

      const double axiv = -base.ubar(i, j) * avten;
      const double aubar = -base.xiv(i, j) * avten;
      abern(i, j + 1) += -avten / gm.dy;
      abern(i, j) += avten / gm.dy;

      const double alap = p.nu * avten;
      if (i > 0) r.v(i - 1, j) += alap / gm.dx2; else r.v(i, j) += alap / gm.dx2;
      if (i < nx - 1) r.v(i + 1, j) += alap / gm.dx2; else r.v(i, j) += alap / gm.dx2;
      r.v(i, j) += -2.0 * alap / gm.dx2;
      if (j > 0) r.v(i, j - 1) += alap / gm.dy2;
      if (j < ny - 2) r.v(i, j + 1) += alap / gm.dy2;
      r.v(i, j) += -2.0 * alap / gm.dy2;

      r.v(i, j) += -p.cb * avten;

      if (i > 0) { r.u(i - 1, j) += 0.25 * aubar; r.u(i - 1, j + 1) += 0.25 * aubar; }
      if (i < nx - 1) { r.u(i, j) += 0.25 * aubar; r.u(i, j + 1) += 0.25 * aubar; }

      azeta(i, j + 1) += 0.5 * axiv;
      azeta(i + 1, j + 1) += 0.5 * axiv;
    }

  // Reverse of the u-momentum update.
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx - 1; ++i) {
      const double auten = p.dt * a.u(i, j);
      r.u(i, j) += a.u(i, j);

      const double axiu = base.vbar(i, j) * auten;
      const double avbar = base.xiu(i, j) * auten;
      abern(i + 1, j) += -auten / gm.dx;
      abern(i, j) += auten / gm.dx;

      const double alap = p.nu * auten;
      if (i > 0) r.u(i - 1, j) += alap / gm.dx2;
      if (i < nx - 2) r.u(i + 1, j) += alap / gm.dx2;
      r.u(i, j) += -2.0 * alap / gm.dx2;
      if (j > 0) r.u(i, j - 1) += alap / gm.dy2; else r.u(i, j) += alap / gm.dy2;
      if (j < ny - 1) r.u(i, j + 1) += alap / gm.dy2; else r.u(i, j) += alap / gm.dy2;
      r.u(i, j) += -2.0 * alap / gm.dy2;

      r.u(i, j) += -p.cb * auten;

      if (j > 0) { r.v(i, j - 1) += 0.25 * avbar; r.v(i + 1, j - 1) += 0.25 * avbar; }
      if (j < ny - 1) { r.v(i, j) += 0.25 * avbar; r.v(i + 1, j) += 0.25 * avbar; }

      azeta(i + 1, j) += 0.5 * axiu;
      azeta(i + 1, j + 1) += 0.5 * axiu;
    }

  // Reverse of the Bernoulli head: bern = g*eta2 + ke(u, v).
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double ake = abern(i, j);
      aeta2(i, j) += p.g * abern(i, j);
      if (i > 0) r.u(i - 1, j) += 0.5 * s.u(i - 1, j) * ake;
      if (i < nx - 1) r.u(i, j) += 0.5 * s.u(i, j) * ake;
      if (j > 0) r.v(i, j - 1) += 0.5 * s.v(i, j - 1) * ake;
      if (j < ny - 1) r.v(i, j) += 0.5 * s.v(i, j) * ake;
    }

  // Reverse of the vorticity stencil.
  for (int bb = 1; bb <= ny - 1; ++bb)
    for (int a2 = 1; a2 <= nx - 1; ++a2) {
      const double az = azeta(a2, bb);
      if (az == 0.0) continue;
      r.v(a2, bb - 1) += az / gm.dx;
      r.v(a2 - 1, bb - 1) += -az / gm.dx;
      r.u(a2 - 1, bb) += -az / gm.dy;
      r.u(a2 - 1, bb - 1) += az / gm.dy;
    }

  // Reverse of the continuity update: eta2 = eta - dt * div(F).
  Matrix aFx = Matrix::Zero(nx - 1, ny), aFy = Matrix::Zero(nx, ny - 1);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      r.eta(i, j) += aeta2(i, j);
      const double adiv = -p.dt * aeta2(i, j);
      if (i < nx - 1) aFx(i, j) += adiv / gm.dx;
      if (i > 0) aFx(i - 1, j) += -adiv / gm.dx;
      if (j < ny - 1) aFy(i, j) += adiv / gm.dy;
      if (j > 0) aFy(i, j - 1) += -adiv / gm.dy;
    }

  // Reverse of the thickness fluxes.
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx - 1; ++i) {
      const double af = aFx(i, j);
      r.eta(i, j) += 0.5 * s.u(i, j) * af;
      r.eta(i + 1, j) += 0.5 * s.u(i, j) * af;
      r.u(i, j) += 0.5 * (base.h(i, j) + base.h(i + 1, j)) * af;
    }
  for (int j = 0; j < ny - 1; ++j)
    for (int i = 0; i < nx; ++i) {
      const double af = aFy(i, j);
      r.eta(i, j) += 0.5 * s.v(i, j) * af;
      r.eta(i, j + 1) += 0.5 * s.v(i, j) * af;
      r.v(i, j) += 0.5 * (base.h(i, j) + base.h(i, j + 1)) * af;
    }

  return r;
}

}  // namespace

StateVector step(const StateVector& s, const ModelParams& p, const GridSpec& g) {
  StateVector out = step_impl(s, p, g);
  if (!out.all_finite()) throw NumericalBlowup("shallow-water step blew up", 0);
  return out;
}

StateVector propagate(const StateVector& s, int n_steps, const ModelParams& p,
                      const GridSpec& g) {
  StateVector x = s;
  for (int k = 0; k < n_steps; ++k) {
    x = step_impl(x, p, g);
    if (!x.all_finite()) throw NumericalBlowup("shallow-water step blew up", k);
  }
  return x;
}

Trajectory::Trajectory(StateVector x0, int n_steps, const ModelParams& p,
                       const GridSpec& g)
    : grid_(g), params_(p) {
  states_.reserve(n_steps + 1);
  states_.push_back(std::move(x0));
  for (int k = 0; k < n_steps; ++k) {
    states_.push_back(step_impl(states_.back(), p, g));
    if (!states_.back().all_finite())
      throw NumericalBlowup("trajectory blew up", k);
  }
}

StateVector Trajectory::tlm(const StateVector& dx) const {
  StateVector d = dx;
  for (int k = 0; k < n_steps(); ++k) d = tlm_step(states_[k], d, params_, grid_);
  return d;
}

StateVector Trajectory::adjoint(const StateVector& dy) const {
  StateVector a = dy;
  for (int k = n_steps() - 1; k >= 0; --k)
    a = adjoint_step(states_[k], a, params_, grid_);
  return a;
}

StateVector tlm_apply(const StateVector& x_lin, const StateVector& dx,
                      int n_steps, const ModelParams& p, const GridSpec& g) {
  return Trajectory(x_lin, n_steps, p, g).tlm(dx);
}

StateVector adjoint_apply(const StateVector& x_lin, const StateVector& dy,
                          int n_steps, const ModelParams& p, const GridSpec& g) {
  return Trajectory(x_lin, n_steps, p, g).adjoint(dy);
}

}  // namespace varprec::sw

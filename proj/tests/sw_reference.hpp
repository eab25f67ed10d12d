#pragma once

// Straight-line reference implementation of one shallow-water step, written
// independently of the library code path: plain row-major arrays, no shared
// helpers, every stencil spelled out inline. Used as the dual-implementation
// oracle for sw::step.

#include <cmath>
#include <vector>

#include "varprec/grid.hpp"
#include "varprec/state.hpp"

namespace swref {

inline varprec::sw::StateVector reference_step(const varprec::sw::StateVector& in,
                                               const varprec::sw::ModelParams& p,
                                               const varprec::sw::GridSpec& g) {
  const int nx = g.nx, ny = g.ny;
  const double dx = g.Lx / nx, dy = g.Ly / ny;

  auto ETA = [&](int i, int j) { return in.eta(i, j); };
  auto U = [&](int i, int j) {  // face value, 0 on walls
    if (i < 0 || i > nx - 2) return 0.0;
    return in.u(i, j);
  };
  auto V = [&](int i, int j) {
    if (j < 0 || j > ny - 2) return 0.0;
    return in.v(i, j);
  };

  std::vector<double> eta2(nx * ny);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const double he = (i < nx - 1)
                            ? 0.5 * (p.eta0 + ETA(i, j) + p.eta0 + ETA(i + 1, j)) * U(i, j)
                            : 0.0;
      const double hw = (i > 0)
                            ? 0.5 * (p.eta0 + ETA(i - 1, j) + p.eta0 + ETA(i, j)) * U(i - 1, j)
                            : 0.0;
      const double hn = (j < ny - 1)
                            ? 0.5 * (p.eta0 + ETA(i, j) + p.eta0 + ETA(i, j + 1)) * V(i, j)
                            : 0.0;
      const double hs = (j > 0)
                            ? 0.5 * (p.eta0 + ETA(i, j - 1) + p.eta0 + ETA(i, j)) * V(i, j - 1)
                            : 0.0;
      eta2[i * ny + j] = ETA(i, j) - p.dt * ((he - hw) / dx + (hn - hs) / dy);
    }

  auto ZETA = [&](int a, int b) {  // relative vorticity at corner (a,b)
    if (a <= 0 || a >= nx || b <= 0 || b >= ny) return 0.0;
    return (V(a, b - 1) - V(a - 1, b - 1)) / dx - (U(a - 1, b) - U(a - 1, b - 1)) / dy;
  };
  auto FCOR = [&](double y) { return p.f0 + p.beta * (y - 0.5 * g.Ly); };
  auto BERN = [&](int i, int j) {
    const double uw = U(i - 1, j), ue = U(i, j);
    const double vs = V(i, j - 1), vn = V(i, j);
    return p.g * eta2[i * ny + j] +
           0.25 * (uw * uw + ue * ue + vs * vs + vn * vn);
  };

  varprec::sw::StateVector out = varprec::sw::StateVector::zero(g);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) out.eta(i, j) = eta2[i * ny + j];

  for (int i = 0; i < nx - 1; ++i)
    for (int j = 0; j < ny; ++j) {
      const double vavg =
          0.25 * (V(i, j - 1) + V(i + 1, j - 1) + V(i, j) + V(i + 1, j));
      const double xi = FCOR((j + 0.5) * dy) +
                        0.5 * (ZETA(i + 1, j) + ZETA(i + 1, j + 1));
      const double uij = in.u(i, j);
      const double uw = U(i - 1, j), ue = U(i + 1, j);
      const double us = (j > 0) ? in.u(i, j - 1) : uij;
      const double un = (j < ny - 1) ? in.u(i, j + 1) : uij;
      const double lap = (ue - 2.0 * uij + uw) / (dx * dx) +
                         (un - 2.0 * uij + us) / (dy * dy);
      const double wind =
          p.tau0 / (p.rho0 * p.eta0) * std::cos(2.0 * M_PI * (j + 0.5) * dy / g.Ly);
      const double tend = xi * vavg - (BERN(i + 1, j) - BERN(i, j)) / dx +
                          p.nu * lap - p.cb * uij + wind;
      out.u(i, j) = uij + p.dt * tend;
    }

  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny - 1; ++j) {
      const double uavg =
          0.25 * (U(i - 1, j) + U(i - 1, j + 1) + U(i, j) + U(i, j + 1));
      const double xi = FCOR((j + 1.0) * dy) +
                        0.5 * (ZETA(i, j + 1) + ZETA(i + 1, j + 1));
      const double vij = in.v(i, j);
      const double vs = V(i, j - 1), vn = V(i, j + 1);
      const double vw = (i > 0) ? in.v(i - 1, j) : vij;
      const double ve = (i < nx - 1) ? in.v(i + 1, j) : vij;
      const double lap = (ve - 2.0 * vij + vw) / (dx * dx) +
                         (vn - 2.0 * vij + vs) / (dy * dy);
      const double tend = -xi * uavg - (BERN(i, j + 1) - BERN(i, j)) / dy +
                          p.nu * lap - p.cb * vij;
      out.v(i, j) = vij + p.dt * tend;
    }

  return out;
}

}  // namespace swref

#pragma once

#include <Eigen/Core>
#include <cmath>

#include "varprec/errors.hpp"

namespace varprec::sw {

/// Arakawa C-grid layout on a closed rectangular basin.
/// eta lives at cell centers, u on interior vertical faces, v on interior
/// horizontal faces; wall-normal velocities are identically zero and not
/// stored.
struct GridSpec {
  int nx = 16;
  int ny = 16;
  double Lx = 1.8e6;  // meters
  double Ly = 1.8e6;

  double dx() const { return Lx / nx; }
  double dy() const { return Ly / ny; }

  Eigen::Index eta_size() const { return Eigen::Index(nx) * ny; }
  Eigen::Index u_size() const { return Eigen::Index(nx - 1) * ny; }
  Eigen::Index v_size() const { return Eigen::Index(nx) * (ny - 1); }
  Eigen::Index state_size() const { return eta_size() + u_size() + v_size(); }
  Eigen::Index obs_size() const { return eta_size(); }

  void validate() const {
    if (nx < 4 || ny < 4) throw ConfigError("grid: nx and ny must be >= 4");
    if (!(Lx > 0.0) || !(Ly > 0.0)) throw ConfigError("grid: Lx, Ly must be positive");
  }
};

struct ModelParams {
  double eta0 = 100.0;   // mean layer depth (m)
  double g = 9.81;       // gravity (m/s^2)
  double nu = 700.0;     // lateral viscosity (m^2/s)
  double cb = 1e-6;      // bottom friction (1/s)
  double tau0 = 0.1;     // wind stress amplitude (N/m^2)
  double rho0 = 1000.0;  // density (kg/m^3)
  double f0 = 1e-4;      // Coriolis parameter (1/s)
  double beta = 2e-11;   // beta-plane slope (1/(m s))
  double dt = 1600.0;    // time step (s)
  int steps_per_window = 24;  // window length T = dt * steps_per_window

  double window_seconds() const { return dt * steps_per_window; }

  /// Gravity-wave CFL with safety factor <= 0.5.
  void validate(const GridSpec& grid) const {
    if (!(eta0 > 0.0)) throw ConfigError("params: eta0 must be positive");
    if (!(dt > 0.0)) throw ConfigError("params: dt must be positive");
    if (steps_per_window < 0) throw ConfigError("params: steps_per_window must be >= 0");
    const double cfl = 0.5 * std::min(grid.dx(), grid.dy()) / std::sqrt(g * eta0);
    if (dt > cfl)
      throw ConfigError("params: dt violates the CFL bound, max allowed " +
                        std::to_string(cfl) + " s");
  }
};

}  // namespace varprec::sw

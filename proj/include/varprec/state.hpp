#pragma once

#include <array>
#include <string>

#include "varprec/grid.hpp"
#include "varprec/operator.hpp"

namespace varprec::sw {

/// Prognostic fields (eta, u, v). Matrices are indexed (i, j) with i along x.
struct StateVector {
  Matrix eta;  // nx x ny
  Matrix u;    // (nx-1) x ny
  Matrix v;    // nx x (ny-1)

  static StateVector zero(const GridSpec& g) {
    return {Matrix::Zero(g.nx, g.ny), Matrix::Zero(g.nx - 1, g.ny),
            Matrix::Zero(g.nx, g.ny - 1)};
  }

  bool all_finite() const {
    return eta.allFinite() && u.allFinite() && v.allFinite();
  }

  bool same_shape(const StateVector& o) const {
    return eta.rows() == o.eta.rows() && eta.cols() == o.eta.cols() &&
           u.rows() == o.u.rows() && u.cols() == o.u.cols() &&
           v.rows() == o.v.rows() && v.cols() == o.v.cols();
  }
};

/// Flatten to (eta, u, v), each field column-major.
Vector pack(const StateVector& s);
StateVector unpack(const Vector& x, const GridSpec& g);

/// Fixed per-channel scale factors bringing each field to roughly unit
/// variance; measured once on a long free run of the default configuration.
struct ImageScaling {
  double eta = 1.0 / 0.20;  // m
  double u = 1.0 / 0.045;   // m/s
  double v = 1.0 / 0.045;   // m/s
};

/// (nx x ny x 3) tensor view of the state: u and v are padded to nx x ny by
/// edge replication, each channel multiplied by its fixed scale.
std::array<Matrix, 3> to_image(const StateVector& s, const ImageScaling& sc = {});

/// Raw little-endian snapshot: 16-byte header (magic "SWST", version u32,
/// nx u32, ny u32) followed by the packed state as f64.
void write_state(const std::string& path, const StateVector& s);
StateVector read_state(const std::string& path, const GridSpec& expected);

}  // namespace varprec::sw

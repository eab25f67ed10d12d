#pragma once

#include "varprec/grid.hpp"
#include "varprec/operator.hpp"

namespace varprec::assim {

using sw::GridSpec;
using varprec::Matrix;
using varprec::Vector;

/// Linear observation operator: extract the free-surface height channel.
/// The packed layout places eta first, so H is a leading-block selector.
struct ObsOperator {
  Eigen::Index state_dim = 0;
  Eigen::Index obs_dim = 0;

  static ObsOperator eta_selector(const GridSpec& g) {
    return {g.state_size(), g.obs_size()};
  }

  Vector apply(const Vector& x) const {
    if (x.size() != state_dim) throw ShapeError("ObsOperator: bad state dimension");
    return x.head(obs_dim);
  }

  Vector apply_transpose(const Vector& y) const {
    if (y.size() != obs_dim) throw ShapeError("ObsOperator: bad obs dimension");
    Vector x = Vector::Zero(state_dim);
    x.head(obs_dim) = y;
    return x;
  }
};

/// Diagonal observation- and background-error covariances plus the
/// background state.
struct CovarianceModel {
  Vector r_var;  // obs-space variances, length p
  Vector b_var;  // state-space variances, length n
  Vector x_b;    // background state, length n

  void validate() const {
    if ((r_var.array() <= 0.0).any() || (b_var.array() <= 0.0).any())
      throw ConfigError("covariance: all variances must be strictly positive");
    if (x_b.size() != b_var.size())
      throw ShapeError("covariance: x_b and b_var dimensions differ");
  }

  Vector apply_Rinv(const Vector& d) const { return d.cwiseQuotient(r_var); }
  Vector apply_Binv(const Vector& v) const { return v.cwiseQuotient(b_var); }
  Vector apply_Bsqrt(const Vector& v) const {
    return v.cwiseProduct(b_var.cwiseSqrt());
  }
  Vector apply_Binvsqrt(const Vector& v) const {
    return v.cwiseQuotient(b_var.cwiseSqrt());
  }

  /// Per-variable diagonal B for the packed (eta, u, v) layout.
  static Vector block_variances(const GridSpec& g, double sig_eta, double sig_u,
                                double sig_v) {
    Vector b(g.state_size());
    b.head(g.eta_size()).setConstant(sig_eta * sig_eta);
    b.segment(g.eta_size(), g.u_size()).setConstant(sig_u * sig_u);
    b.tail(g.v_size()).setConstant(sig_v * sig_v);
    return b;
  }
};

}  // namespace varprec::assim

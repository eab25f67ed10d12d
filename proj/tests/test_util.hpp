#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "varprec/operator.hpp"
#include "varprec/rng.hpp"
#include "varprec/state.hpp"

namespace testutil {

using varprec::Matrix;
using varprec::Vector;

/// Random SPD matrix: Wishart (G G^T / n) plus a ridge.
inline Matrix random_spd(Eigen::Index n, std::uint64_t seed, double ridge = 0.5) {
  varprec::CounterRng rng(seed);
  const Matrix G = rng.gauss_matrix(n, n);
  return G * G.transpose() / double(n) + ridge * Matrix::Identity(n, n);
}

/// Smooth random state at physically plausible amplitudes; small enough to
/// stay stable at desk-scale dt.
inline varprec::sw::StateVector random_state(const varprec::sw::GridSpec& g,
                                             std::uint64_t seed,
                                             double amp_eta = 0.1,
                                             double amp_vel = 0.02) {
  varprec::CounterRng rng(seed);
  varprec::sw::StateVector s = varprec::sw::StateVector::zero(g);
  for (Eigen::Index j = 0; j < s.eta.cols(); ++j)
    for (Eigen::Index i = 0; i < s.eta.rows(); ++i)
      s.eta(i, j) = amp_eta * rng.next_gauss();
  for (Eigen::Index j = 0; j < s.u.cols(); ++j)
    for (Eigen::Index i = 0; i < s.u.rows(); ++i)
      s.u(i, j) = amp_vel * rng.next_gauss();
  for (Eigen::Index j = 0; j < s.v.cols(); ++j)
    for (Eigen::Index i = 0; i < s.v.rows(); ++i)
      s.v(i, j) = amp_vel * rng.next_gauss();
  return s;
}

inline double dot_state(const varprec::sw::StateVector& a,
                        const varprec::sw::StateVector& b) {
  return a.eta.cwiseProduct(b.eta).sum() + a.u.cwiseProduct(b.u).sum() +
         a.v.cwiseProduct(b.v).sum();
}

inline double norm_state(const varprec::sw::StateVector& a) {
  return std::sqrt(dot_state(a, a));
}

}  // namespace testutil

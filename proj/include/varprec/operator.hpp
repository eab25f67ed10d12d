#pragma once

#include <Eigen/Core>
#include <functional>
#include <utility>

#include "varprec/errors.hpp"

namespace varprec {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Matrix-free symmetric linear operator contract: apply v -> A v.
struct LinearOperatorHandle {
  Eigen::Index n = 0;
  std::function<Vector(const Vector&)> apply;

  Vector operator()(const Vector& v) const {
    if (v.size() != n) throw ShapeError("operator input has wrong dimension");
    return apply(v);
  }
};

inline LinearOperatorHandle identity_operator(Eigen::Index n) {
  return {n, [](const Vector& v) { return v; }};
}

inline LinearOperatorHandle diagonal_operator(Vector d) {
  const Eigen::Index n = d.size();
  return {n, [d = std::move(d)](const Vector& v) -> Vector {
            return d.cwiseProduct(v);
          }};
}

inline LinearOperatorHandle dense_operator(Matrix A) {
  const Eigen::Index n = A.rows();
  return {n, [A = std::move(A)](const Vector& v) -> Vector { return A * v; }};
}

/// Assemble the dense matrix by applying A to every basis vector.
/// Intended for small-n oracles and diagnostics only.
inline Matrix materialize(const LinearOperatorHandle& A) {
  Matrix M(A.n, A.n);
  Vector e = Vector::Zero(A.n);
  for (Eigen::Index j = 0; j < A.n; ++j) {
    e[j] = 1.0;
    M.col(j) = A(e);
    e[j] = 0.0;
  }
  return M;
}

}  // namespace varprec

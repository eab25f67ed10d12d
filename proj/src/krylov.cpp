#include "varprec/krylov.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <cmath>

#include "varprec/rng.hpp"

namespace varprec::krylov {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::tolerance: return "tolerance";
    case Termination::max_iter: return "max_iter";
    case Termination::breakdown: return "breakdown";
  }
  return "unknown";
}

void append_csv(std::ostream& os, const std::string& solve_id, const SolveReport& r) {
  char buf[64];
  for (std::size_t k = 0; k < r.residual_history.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g", r.residual_history[k]);
    os << solve_id << ',' << k << ',' << buf << '\n';
  }
}

namespace {
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}
}  // namespace

std::pair<Vector, SolveReport> cg(const LinearOperatorHandle& A, const Vector& b,
                                  const Vector& x0, const CgOptions& opt) {
  const auto t0 = Clock::now();
  SolveReport rep;
  Vector x = x0;
  Vector r = b - A(x);
  Vector p = r;
  double rr = r.squaredNorm();
  rep.residual_history.push_back(std::sqrt(rr));
  if (opt.on_iterate) opt.on_iterate(0, x);

  rep.terminated_by = Termination::max_iter;
  if (rep.residual_history.back() < opt.tol) {
    rep.terminated_by = Termination::tolerance;
  } else {
    for (int j = 0; j < opt.maxit; ++j) {
      const Vector Ap = A(p);
      const double pAp = p.dot(Ap);
      if (!(pAp > 0.0)) {
        rep.terminated_by = Termination::breakdown;
        rep.note = "p^T A p = " + std::to_string(pAp) + " (operator not SPD?)";
        break;
      }
      const double alpha = rr / pAp;
      x += alpha * p;
      r -= alpha * Ap;
      const double rr_new = r.squaredNorm();
      rep.iterations = j + 1;
      rep.residual_history.push_back(std::sqrt(rr_new));
      if (opt.on_iterate) opt.on_iterate(j + 1, x);
      if (rep.residual_history.back() < opt.tol) {
        rep.terminated_by = Termination::tolerance;
        rr = rr_new;
        break;
      }
      p = r + (rr_new / rr) * p;
      rr = rr_new;
    }
  }
  rep.final_residual = rep.residual_history.back();
  rep.wall_seconds = seconds_since(t0);
  return {std::move(x), std::move(rep)};
}

std::pair<Vector, SolveReport> pcg_split(const LinearOperatorHandle& A,
                                         const LinearOperatorHandle& L,
                                         const Vector& b, const Vector& x0,
                                         const CgOptions& opt,
                                         const LinearOperatorHandle* Lt) {
  const auto t0 = Clock::now();
  const LinearOperatorHandle& LT = Lt ? *Lt : L;

  SolveReport rep;
  Vector y = x0;  // iterate of the transformed system (L^T A L) y = L^T b
  Vector x = L(y);
  Vector rt = LT(b - A(x));  // transformed residual
  Vector p = rt;
  double rr = rt.squaredNorm();

  auto true_residual = [&](const Vector& xi) { return (b - A(xi)).norm(); };
  rep.residual_history.push_back(true_residual(x));
  if (opt.on_iterate) opt.on_iterate(0, x);

  rep.terminated_by = Termination::max_iter;
  if (rep.residual_history.back() < opt.tol) {
    rep.terminated_by = Termination::tolerance;
  } else {
    for (int j = 0; j < opt.maxit; ++j) {
      const Vector Ap = LT(A(L(p)));
      const double pAp = p.dot(Ap);
      if (!(pAp > 0.0)) {
        rep.terminated_by = Termination::breakdown;
        rep.note = "p^T (L^T A L) p = " + std::to_string(pAp);
        break;
      }
      const double alpha = rr / pAp;
      y += alpha * p;
      rt -= alpha * Ap;
      const double rr_new = rt.squaredNorm();
      x = L(y);
      rep.iterations = j + 1;
      rep.residual_history.push_back(true_residual(x));
      if (opt.on_iterate) opt.on_iterate(j + 1, x);
      if (rep.residual_history.back() < opt.tol) {
        rep.terminated_by = Termination::tolerance;
        rr = rr_new;
        break;
      }
      p = rt + (rr_new / rr) * p;
      rr = rr_new;
    }
  }
  rep.final_residual = rep.residual_history.back();
  rep.wall_seconds = seconds_since(t0);
  return {std::move(x), std::move(rep)};
}

double cg_bound(double kappa, int k) {
  if (k == 0) return 2.0;
  const double s = std::sqrt(kappa);
  return 2.0 * std::pow((s - 1.0) / (s + 1.0), k);
}

namespace {

// Lanczos with full reorthogonalization; returns (alphas, betas, Q).
struct LanczosResult {
  std::vector<double> alpha, beta;  // beta[k] couples step k and k+1
  Matrix Q;
  bool breakdown = false;
};

LanczosResult lanczos(const LinearOperatorHandle& A, int iters, std::uint64_t seed) {
  CounterRng rng(seed, /*stream=*/0x4c414e43);  // "LANC"
  LanczosResult res;
  const Eigen::Index n = A.n;
  iters = static_cast<int>(std::min<Eigen::Index>(iters, n));
  res.Q = Matrix(n, iters);

  Vector q = rng.gauss_vector(n);
  q.normalize();
  Vector q_prev = Vector::Zero(n);
  double beta_prev = 0.0;

  for (int k = 0; k < iters; ++k) {
    res.Q.col(k) = q;
    Vector w = A(q);
    const double a = q.dot(w);
    res.alpha.push_back(a);
    w -= a * q + beta_prev * q_prev;
    // Full reorthogonalization, two passes.
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i <= k; ++i) w -= res.Q.col(i).dot(w) * res.Q.col(i);
    const double bnorm = w.norm();
    if (k + 1 < iters) {
      if (bnorm < 1e-13 * std::max(1.0, std::abs(a))) {
        res.breakdown = true;  // invariant subspace found
        res.Q.conservativeResize(Eigen::NoChange, k + 1);
        break;
      }
      res.beta.push_back(bnorm);
      q_prev = res.Q.col(k);
      q = w / bnorm;
      beta_prev = bnorm;
    }
  }
  return res;
}

Eigen::SelfAdjointEigenSolver<Matrix> tridiag_eig(const LanczosResult& lz) {
  const int m = static_cast<int>(lz.alpha.size());
  Matrix T = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    T(i, i) = lz.alpha[i];
    if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = lz.beta[i];
  }
  return Eigen::SelfAdjointEigenSolver<Matrix>(T);
}

}  // namespace

ConditionEstimate lanczos_extreme_eigs(const LinearOperatorHandle& A, int iters,
                                       std::uint64_t seed) {
  const LanczosResult lz = lanczos(A, iters, seed);
  const auto eig = tridiag_eig(lz);
  ConditionEstimate est;
  est.iterations = static_cast<int>(lz.alpha.size());
  est.breakdown = lz.breakdown;
  est.lambda_min = eig.eigenvalues().minCoeff();
  est.lambda_max = eig.eigenvalues().maxCoeff();
  est.kappa = (est.lambda_min > 0.0) ? est.lambda_max / est.lambda_min
                                     : std::numeric_limits<double>::infinity();
  if (est.kappa < 1.0) est.kappa = 1.0;
  return est;
}

std::vector<double> lanczos_ritz_values(const LinearOperatorHandle& A, int iters,
                                        std::uint64_t seed) {
  const LanczosResult lz = lanczos(A, iters, seed);
  const auto eig = tridiag_eig(lz);
  std::vector<double> vals(eig.eigenvalues().data(),
                           eig.eigenvalues().data() + eig.eigenvalues().size());
  return vals;
}

}  // namespace varprec::krylov

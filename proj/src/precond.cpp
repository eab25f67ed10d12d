#include "varprec/precond.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstring>
#include <fstream>

#include "varprec/rng.hpp"

namespace varprec::precond {

void EigenpairSet::validate(double ortho_tol) const {
  if (U.cols() != lambda.size())
    throw ShapeError("EigenpairSet: U and lambda disagree on r");
  if (r() > 0) {
    const Matrix gram = U.transpose() * U;
    const double dev = (gram - Matrix::Identity(r(), r())).cwiseAbs().maxCoeff();
    if (dev > ortho_tol)
      throw ShapeError("EigenpairSet: columns not orthonormal, max deviation " +
                       std::to_string(dev));
  }
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (!(lambda[i] > 0.0))
      throw ShapeError("EigenpairSet: eigenvalues must be strictly positive");
    if (i > 0 && lambda[i] > lambda[i - 1])
      throw ShapeError("EigenpairSet: eigenvalues must be non-increasing");
  }
}

Vector SpectralPreconditioner::apply(const Vector& v) const {
  if (v.size() != pairs.n() && pairs.r() > 0)
    throw ShapeError("SpectralPreconditioner: dimension mismatch");
  if (pairs.r() == 0) return beta * v;
  const Vector w = pairs.U.transpose() * v;
  const Vector scale =
      (mu * pairs.lambda.array().pow(alpha) - beta).matrix();
  return beta * v + pairs.U * scale.cwiseProduct(w);
}

LinearOperatorHandle SpectralPreconditioner::handle() const {
  SpectralPreconditioner copy = *this;
  return {pairs.n(), [copy](const Vector& v) { return copy.apply(v); }};
}

LinearOperatorHandle split_L(const EigenpairSet& pairs, double mu) {
  if (!(mu >= 1.0))
    throw std::invalid_argument(
        "split_L: mu must be >= 1 (mu < 1 can push preconditioned eigenvalues "
        "below the unit tail and worsen conditioning); got mu = " +
        std::to_string(mu));
  pairs.validate();
  const Matrix U = pairs.U;
  const Vector scale = (mu * pairs.lambda.array().rsqrt() - 1.0).matrix();
  const Eigen::Index n = pairs.n();
  return {n, [U, scale](const Vector& v) -> Vector {
            return v + U * scale.cwiseProduct(U.transpose() * v);
          }};
}

namespace {

void fix_signs(Matrix& U) {
  for (Eigen::Index j = 0; j < U.cols(); ++j) {
    Eigen::Index imax = 0;
    U.col(j).cwiseAbs().maxCoeff(&imax);
    if (U(imax, j) < 0.0) U.col(j) = -U.col(j);
  }
}

}  // namespace

EigResult exact_leading_eigs(const LinearOperatorHandle& A, int r, int n_small,
                             int max_lanczos, std::uint64_t seed,
                             double resid_tol) {
  const Eigen::Index n = A.n;
  if (r < 0 || r > n) throw ShapeError("exact_leading_eigs: need 0 <= r <= n");
  EigResult res;

  if (n <= n_small) {
    const Matrix Ad = materialize(A);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(Ad);
    res.pairs.U = Matrix(n, r);
    res.pairs.lambda = Vector(r);
    for (int i = 0; i < r; ++i) {
      res.pairs.U.col(i) = eig.eigenvectors().col(n - 1 - i);
      res.pairs.lambda[i] = eig.eigenvalues()[n - 1 - i];
    }
  } else {
    // Lanczos with full reorthogonalization; Krylov dimension well beyond r.
    const int m = std::min<Eigen::Index>(
        n, max_lanczos > 0 ? max_lanczos : std::max(2 * r + 30, 60));
    CounterRng rng(seed, 0x45494753);  // "EIGS"
    Matrix Q(n, m);
    std::vector<double> alphas, betas;
    Vector q = rng.gauss_vector(n);
    q.normalize();
    Vector q_prev = Vector::Zero(n);
    double beta_prev = 0.0;
    int built = 0;
    for (int k = 0; k < m; ++k) {
      Q.col(k) = q;
      ++built;
      Vector w = A(q);
      const double a = q.dot(w);
      alphas.push_back(a);
      w -= a * q + beta_prev * q_prev;
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= k; ++i) w -= Q.col(i).dot(w) * Q.col(i);
      const double bn = w.norm();
      if (k + 1 == m || bn < 1e-13 * std::max(1.0, std::abs(a))) break;
      betas.push_back(bn);
      q_prev = Q.col(k);
      q = w / bn;
      beta_prev = bn;
    }
    Matrix T = Matrix::Zero(built, built);
    for (int i = 0; i < built; ++i) {
      T(i, i) = alphas[i];
      if (i + 1 < built) T(i, i + 1) = T(i + 1, i) = betas[i];
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(T);
    const int keep = std::min(r, built);
    res.pairs.U = Matrix(n, keep);
    res.pairs.lambda = Vector(keep);
    for (int i = 0; i < keep; ++i) {
      res.pairs.lambda[i] = eig.eigenvalues()[built - 1 - i];
      res.pairs.U.col(i) = Q.leftCols(built) * eig.eigenvectors().col(built - 1 - i);
      res.pairs.U.col(i).normalize();
    }
  }

  fix_signs(res.pairs.U);
  res.residuals = Vector(res.pairs.r());
  for (Eigen::Index i = 0; i < res.pairs.r(); ++i) {
    res.residuals[i] =
        (A(res.pairs.U.col(i)) - res.pairs.lambda[i] * res.pairs.U.col(i)).norm();
    if (res.residuals[i] > resid_tol * std::max(1.0, res.pairs.lambda[i]))
      res.converged = false;
  }
  return res;
}

double eym_residual(const Matrix& A, int r) {
  if (A.rows() != A.cols()) throw ShapeError("eym_residual: matrix not square");
  const Eigen::Index n = A.rows();
  if (r < 0 || r > n) throw ShapeError("eym_residual: need 0 <= r <= n");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(A);

  Matrix Ar = Matrix::Zero(n, n);
  for (int i = 0; i < r; ++i) {
    const auto u = eig.eigenvectors().col(n - 1 - i);
    Ar += eig.eigenvalues()[n - 1 - i] * u * u.transpose();
  }
  const double frob2 = (A - Ar).squaredNorm();

  double tail = 0.0;
  for (Eigen::Index i = 0; i + r < n; ++i)
    tail += eig.eigenvalues()[i] * eig.eigenvalues()[i];
  if (std::abs(frob2 - tail) > 1e-10 * std::max(1.0, A.squaredNorm()))
    throw std::logic_error("eym_residual: explicit norm and tail sum disagree");
  return frob2;
}

LinearOperatorHandle b_half_preconditioner(const assim::CovarianceModel& cov) {
  const Vector s = cov.b_var.cwiseSqrt();
  return {s.size(), [s](const Vector& v) -> Vector { return s.cwiseProduct(v); }};
}

namespace {
constexpr char kMagic[4] = {'E', 'I', 'G', 'S'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void write_eigenpairs(const std::string& path, const EigenpairSet& set) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("write_eigenpairs: cannot open " + path);
  const std::uint32_t n = static_cast<std::uint32_t>(set.n());
  const std::uint32_t r = static_cast<std::uint32_t>(set.r());
  f.write(kMagic, 4);
  f.write(reinterpret_cast<const char*>(&kVersion), 4);
  f.write(reinterpret_cast<const char*>(&n), 4);
  f.write(reinterpret_cast<const char*>(&r), 4);
  f.write(reinterpret_cast<const char*>(set.lambda.data()),
          static_cast<std::streamsize>(sizeof(double)) * set.lambda.size());
  f.write(reinterpret_cast<const char*>(set.U.data()),
          static_cast<std::streamsize>(sizeof(double)) * set.U.size());
  if (!f) throw IoError("write_eigenpairs: short write to " + path);
}

EigenpairSet read_eigenpairs(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("read_eigenpairs: cannot open " + path);
  char magic[4];
  std::uint32_t version = 0, n = 0, r = 0;
  f.read(magic, 4);
  f.read(reinterpret_cast<char*>(&version), 4);
  f.read(reinterpret_cast<char*>(&n), 4);
  f.read(reinterpret_cast<char*>(&r), 4);
  if (!f || std::memcmp(magic, kMagic, 4) != 0)
    throw VersionError("read_eigenpairs: bad magic in " + path);
  if (version != kVersion)
    throw VersionError("read_eigenpairs: unsupported version " +
                       std::to_string(version));
  EigenpairSet set;
  set.lambda = Vector(r);
  set.U = Matrix(n, r);
  f.read(reinterpret_cast<char*>(set.lambda.data()),
         static_cast<std::streamsize>(sizeof(double)) * r);
  f.read(reinterpret_cast<char*>(set.U.data()),
         static_cast<std::streamsize>(sizeof(double)) * set.U.size());
  if (!f) throw IoError("read_eigenpairs: truncated payload in " + path);
  return set;
}

}  // namespace varprec::precond

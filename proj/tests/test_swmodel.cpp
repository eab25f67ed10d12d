#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sw_reference.hpp"
#include "test_util.hpp"
#include "varprec/sw_model.hpp"

using namespace varprec;
using namespace varprec::sw;
using testutil::dot_state;
using testutil::norm_state;
using testutil::random_state;

namespace {

GridSpec small_grid(int n) {
  GridSpec g;
  g.nx = g.ny = n;
  return g;
}

ModelParams desk_params() {
  ModelParams p;
  p.dt = 1600.0;
  return p;
}

Matrix dense_tlm(const StateVector& x, int n_steps, const ModelParams& p,
                 const GridSpec& g) {
  const Trajectory traj(x, n_steps, p, g);
  const Eigen::Index n = g.state_size();
  Matrix J(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    Vector e = Vector::Zero(n);
    e[c] = 1.0;
    J.col(c) = pack(traj.tlm(unpack(e, g)));
  }
  return J;
}

}  // namespace

TEST_CASE("unforced rest state is a fixed point") {
  const GridSpec g = small_grid(8);
  ModelParams p = desk_params();
  p.tau0 = 0.0;
  const StateVector rest = StateVector::zero(g);
  const StateVector out = propagate(rest, 10, p, g);
  CHECK(out.eta.cwiseAbs().maxCoeff() == 0.0);
  CHECK(out.u.cwiseAbs().maxCoeff() == 0.0);
  CHECK(out.v.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("step matches the straight-line reference implementation") {
  const GridSpec g = small_grid(4);
  const ModelParams p = desk_params();
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const StateVector x = random_state(g, seed);
    const StateVector a = step(x, p, g);
    const StateVector b = swref::reference_step(x, p, g);
    StateVector diff = a;
    diff.eta -= b.eta;
    diff.u -= b.u;
    diff.v -= b.v;
    CHECK(diff.eta.cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(diff.u.cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(diff.v.cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("packed state dimension at paper scale") {
  GridSpec g = small_grid(64);
  CHECK(g.state_size() == 12160);
  const StateVector s = random_state(g, 3);
  CHECK(pack(s).size() == 12160);
}

TEST_CASE("pack then unpack round-trips bitwise") {
  const GridSpec g = small_grid(8);
  const StateVector s = random_state(g, 5);
  const StateVector t = unpack(pack(s), g);
  CHECK((s.eta.array() == t.eta.array()).all());
  CHECK((s.u.array() == t.u.array()).all());
  CHECK((s.v.array() == t.v.array()).all());
  CHECK_THROWS_AS((void)unpack(Vector::Zero(7), g), ShapeError);
}

TEST_CASE("to_image shape and edge replication") {
  GridSpec g = small_grid(64);
  const StateVector s = random_state(g, 7);
  const auto img = to_image(s);
  for (const auto& ch : img) {
    CHECK(ch.rows() == 64);
    CHECK(ch.cols() == 64);
  }
  // padded u row equals the adjacent interior row, same for v column
  CHECK((img[1].row(63).array() == img[1].row(62).array()).all());
  CHECK((img[2].col(63).array() == img[2].col(62).array()).all());
}

TEST_CASE("mass is conserved per step") {
  const GridSpec g = small_grid(8);
  ModelParams p = desk_params();
  p.tau0 = 0.0;
  p.nu = 0.0;
  p.cb = 0.0;
  StateVector x = random_state(g, 21);
  const double cell = g.dx() * g.dy();
  const double mass0 = x.eta.sum() * cell;
  const double scale = (x.eta.cwiseAbs().sum() + p.eta0) * cell;
  for (int k = 0; k < 20; ++k) {
    x = step(x, p, g);
    CHECK(std::abs(x.eta.sum() * cell - mass0) <= 1e-10 * scale);
  }
}

TEST_CASE("stepping is deterministic") {
  const GridSpec g = small_grid(8);
  const ModelParams p = desk_params();
  const StateVector x = random_state(g, 2);
  const Vector a = pack(propagate(x, 7, p, g));
  const Vector b = pack(propagate(x, 7, p, g));
  CHECK((a.array() == b.array()).all());
}

TEST_CASE("propagate: identity at zero steps and semigroup property") {
  const GridSpec g = small_grid(8);
  const ModelParams p = desk_params();
  const StateVector x = random_state(g, 4);
  const Vector id = pack(propagate(x, 0, p, g));
  CHECK((id.array() == pack(x).array()).all());

  const Vector whole = pack(propagate(x, 9, p, g));
  const Vector split = pack(propagate(propagate(x, 4, p, g), 5, p, g));
  CHECK((whole.array() == split.array()).all());
}

TEST_CASE("two-day window arithmetic at paper scale") {
  GridSpec g = small_grid(64);
  g.Lx = g.Ly = 1.8e6;
  ModelParams p;
  p.dt = 400.0;
  p.steps_per_window = 432;
  p.validate(g);
  CHECK(p.window_seconds() == doctest::Approx(2 * 86400.0));
}

TEST_CASE("tlm of the zero perturbation is zero, and tlm is linear") {
  const GridSpec g = small_grid(8);
  const ModelParams p = desk_params();
  const StateVector x = random_state(g, 31);
  const Trajectory traj(x, 5, p, g);

  const StateVector z = traj.tlm(StateVector::zero(g));
  CHECK(norm_state(z) == 0.0);

  const StateVector d1 = random_state(g, 32);
  const StateVector d2 = random_state(g, 33);
  StateVector lin = StateVector::zero(g);
  lin.eta = 2.5 * d1.eta - 0.75 * d2.eta;
  lin.u = 2.5 * d1.u - 0.75 * d2.u;
  lin.v = 2.5 * d1.v - 0.75 * d2.v;
  const Vector lhs = pack(traj.tlm(lin));
  const Vector rhs = 2.5 * pack(traj.tlm(d1)) - 0.75 * pack(traj.tlm(d2));
  CHECK((lhs - rhs).norm() <= 1e-12 * rhs.norm());
}

TEST_CASE("taylor test: second-order convergence of the tlm") {
  const GridSpec g = small_grid(8);
  const ModelParams p = desk_params();
  const int n_steps = 5;
  const StateVector x = random_state(g, 41);
  const StateVector d = random_state(g, 42, /*amp_eta=*/5.0, /*amp_vel=*/0.5);
  const Trajectory traj(x, n_steps, p, g);
  const Vector fx = pack(traj.final_state());
  const Vector tl = pack(traj.tlm(d));

  std::vector<double> logs_eps, logs_err;
  for (int k = 1; k <= 6; ++k) {
    const double eps = std::pow(10.0, -k);
    StateVector xp = x;
    xp.eta += eps * d.eta;
    xp.u += eps * d.u;
    xp.v += eps * d.v;
    const Vector fxp = pack(propagate(xp, n_steps, p, g));
    const double err = (fxp - fx - eps * tl).norm();
    logs_eps.push_back(std::log10(eps));
    logs_err.push_back(std::log10(err));
  }
  // least-squares slope on the log-log curve
  const int m = static_cast<int>(logs_eps.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < m; ++i) {
    sx += logs_eps[i];
    sy += logs_err[i];
    sxx += logs_eps[i] * logs_eps[i];
    sxy += logs_eps[i] * logs_err[i];
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  CHECK(slope == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("dense tlm matches the finite-difference jacobian on a 4x4 grid") {
  const GridSpec g = small_grid(4);
  const ModelParams p = desk_params();
  const int n_steps = 3;
  const StateVector x = random_state(g, 51);
  const Matrix J = dense_tlm(x, n_steps, p, g);

  const Eigen::Index n = g.state_size();
  Matrix Jfd(n, n);
  const Vector x0 = pack(x);
  for (Eigen::Index c = 0; c < n; ++c) {
    const double h = 1e-5 * std::max(1.0, std::abs(x0[c]));
    Vector xp = x0, xm = x0;
    xp[c] += h;
    xm[c] -= h;
    const Vector fp = pack(propagate(unpack(xp, g), n_steps, p, g));
    const Vector fm = pack(propagate(unpack(xm, g), n_steps, p, g));
    Jfd.col(c) = (fp - fm) / (2.0 * h);
  }
  const double rel = (J - Jfd).cwiseAbs().maxCoeff() / J.cwiseAbs().maxCoeff();
  CHECK(rel <= 1e-6);
}

TEST_CASE("adjoint passes the dot-product test at several window lengths") {
  const GridSpec g = small_grid(8);
  const ModelParams p = desk_params();
  const StateVector x = random_state(g, 61);
  for (int n_steps : {1, 5, 20}) {
    const Trajectory traj(x, n_steps, p, g);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const StateVector dx = random_state(g, 1000 + trial);
      const StateVector dy = random_state(g, 2000 + trial);
      const StateVector Gdx = traj.tlm(dx);
      const StateVector GTdy = traj.adjoint(dy);
      const double lhs = dot_state(Gdx, dy);
      const double rhs = dot_state(dx, GTdy);
      const double denom = norm_state(Gdx) * norm_state(dy);
      worst = std::max(worst, std::abs(lhs - rhs) / denom);
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("adjoint of the identity window returns the input") {
  const GridSpec g = small_grid(8);
  const ModelParams p = desk_params();
  const Trajectory traj(random_state(g, 71), 0, p, g);
  const StateVector dy = random_state(g, 72);
  const StateVector a = traj.adjoint(dy);
  CHECK((pack(a).array() == pack(dy).array()).all());
}

TEST_CASE("dense adjoint equals the transpose of the dense tlm") {
  const GridSpec g = small_grid(4);
  const ModelParams p = desk_params();
  const int n_steps = 3;
  const StateVector x = random_state(g, 81);
  const Trajectory traj(x, n_steps, p, g);
  const Matrix J = dense_tlm(x, n_steps, p, g);

  const Eigen::Index n = g.state_size();
  Matrix Jt(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    Vector e = Vector::Zero(n);
    e[c] = 1.0;
    Jt.col(c) = pack(traj.adjoint(unpack(e, g)));
  }
  CHECK((Jt - J.transpose()).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("blowup raises NumericalBlowup with the step index") {
  const GridSpec g = small_grid(4);
  ModelParams p = desk_params();
  p.dt = 5e5;  // grossly unstable on purpose
  StateVector x = random_state(g, 91, /*amp_eta=*/50.0, /*amp_vel=*/5.0);
  try {
    (void)propagate(x, 200, p, g);
    FAIL("expected NumericalBlowup");
  } catch (const NumericalBlowup& e) {
    CHECK(e.step_index >= 0);
    CHECK(e.step_index < 200);
  }
}

TEST_CASE("state snapshot round-trip and header validation") {
  namespace fs = std::filesystem;
  const GridSpec g = small_grid(8);
  const StateVector s = random_state(g, 101);
  const auto path = (fs::temp_directory_path() / "varprec_state_test.swst").string();
  write_state(path, s);
  const StateVector t = read_state(path, g);
  CHECK((pack(s).array() == pack(t).array()).all());

  // wrong grid
  CHECK_THROWS_AS((void)read_state(path, small_grid(4)), ShapeError);

  // corrupt the magic
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.write("XXXX", 4);
  }
  CHECK_THROWS_AS((void)read_state(path, g), VersionError);
  fs::remove(path);
}

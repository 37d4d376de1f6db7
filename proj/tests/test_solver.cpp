#include <doctest.h>

#include "helpers.hpp"
#include "prlab/energy.hpp"
#include "prlab/flows.hpp"
#include "prlab/model.hpp"
#include "prlab/solver.hpp"

using namespace prlab;
using testing_util::max_diff;
using testing_util::rel_diff;

namespace {

double energy_law_residual(const Trajectory& traj) {
  std::vector<double> E;
  for (const auto& r : traj.energy) E.push_back(r.E);
  const auto dE = time_derivative(E, traj.energy[1].t - traj.energy[0].t);
  double worst = 0;
  for (std::size_t i = 0; i < E.size(); ++i)
    worst = std::max(worst, std::abs(dE[i] + traj.energy[i].D) / std::max(traj.energy[i].D, 1.0));
  return worst;
}

}  // namespace

TEST_CASE("Leray projection") {
  const PeriodicGrid g(2 * M_PI, 32);
  const ScalarField s = random_scalar(g, 4, 1.0, 1);
  CHECK(leray_project(gradient(s)).max_abs() <= 1e-12 * gradient(s).max_abs());

  const VectorField w = random_solenoidal(g, 4, 1.0, 2);
  CHECK(rel_diff(leray_project(w), w) <= 1e-12);

  const VectorField v = random_vector(g, 4, 1.0, 3);
  const VectorField pv = leray_project(v);
  CHECK(rel_diff(leray_project(pv), pv) <= 1e-12);
  CHECK(divergence(pv).max_abs() <= 1e-12 * grad_T(pv).max_abs());
}

TEST_CASE("pressure solve") {
  const PeriodicGrid g(2 * M_PI, 32);
  CHECK(pressure_solve(VectorField(g), VectorField(g)).max_abs() == 0.0);

  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const VectorField u = random_solenoidal(g, 3, 1.0, seed), d = random_vector(g, 3, 1.0, seed + 9);
    const ScalarField p = pressure_solve(u, d);
    const ScalarField src = divergence(div_T(stress(u, d)));
    ScalarField res = laplacian(p);
    res += src;
    CHECK(res.max_abs() <= 1e-8 * src.max_abs());
    CHECK(std::abs(p.values().mean()) <= 1e-12 * p.max_abs());
  }

  // u = (sin 2y, 0, 0): the stress only varies in y, so the pressure vanishes.
  const VectorField shear = sample_vector(g, [](const Point& x) { return Eigen::Vector3d(std::sin(2 * x[1]), 0, 0); });
  CHECK(pressure_solve(shear, VectorField(g)).max_abs() <= 1e-10);
}

TEST_CASE("rest state is a fixed point of the step") {
  const PeriodicGrid g(1.0, 16);
  State s(g);
  for (double dt : {1e-5, 1e-4}) {
    const State n = step(s, dt);
    CHECK(n.u.max_abs() == 0.0);
    CHECK(n.d.max_abs() == 0.0);
    CHECK(n.t == doctest::Approx(dt));
  }
}

TEST_CASE("linearised director decay near d = 0") {
  const PeriodicGrid g(2 * M_PI, 16);
  const double eps = 1e-6, k = 3, dt = 1e-3;
  State s(g);
  s.d = sample_vector(g, [&](const Point& x) { return Eigen::Vector3d(eps * std::sin(k * x[0]), 0, 0); });
  const State n = step(s, dt);
  const double factor = std::exp(-(k * k - 4) * dt);
  VectorField expect = s.d;
  expect.values() *= factor;
  CHECK(rel_diff(n.d, expect) <= 1e-4);
}

TEST_CASE("CFL refusal names a suggested step") {
  const PeriodicGrid g(2 * M_PI, 16);
  State s(g);
  s.u = taylor_green(g, 1.0);
  try {
    step(s, 1.0);
    FAIL("expected a refusal");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CflViolation);
    CHECK(std::string(e.what()).find("suggested dt") != std::string::npos);
  }
}

TEST_CASE("simulate refuses compressible initial velocity") {
  const PeriodicGrid g(2 * M_PI, 16);
  State s(g);
  s.u = random_vector(g, 2, 1.0, 1);
  SolverConfig c;
  c.resolution = 16;
  c.dt = 1e-3;
  c.t_end = 1e-3;
  CHECK_THROWS_AS(simulate(c, s), Error);
}

TEST_CASE("zero data gives a constant trajectory") {
  const PeriodicGrid g(1.0, 16);
  SolverConfig c;
  c.resolution = 16;
  c.extent = 1.0;
  c.dt = 1e-4;
  c.t_end = 2e-3;
  c.output_stride = 5;
  const Trajectory traj = simulate(c, State(g));
  CHECK(traj.size() == 5);
  for (const State& s : traj.states()) {
    CHECK(s.u.max_abs() == 0.0);
    CHECK(s.d.max_abs() == 0.0);
    CHECK(s.p.max_abs() == 0.0);
  }
}

TEST_CASE("global energy decreases and its residual is second order") {
  const PeriodicGrid g(2 * M_PI, 16);
  InitialRecipe rec;
  const State s0 = initial_state(g, rec);
  SolverConfig c;
  c.resolution = 16;
  c.t_end = 0.4;
  c.dt = 0.02;
  c.output_stride = 1;
  c.energy_stride = 1;
  const Trajectory a = simulate(c, s0);
  c.dt = 0.01;
  c.output_stride = 2;
  const Trajectory b = simulate(c, s0);
  const double E0 = a.energy.front().E;
  for (std::size_t i = 1; i < a.energy.size(); ++i) {
    const double dt = a.energy[i].t - a.energy[i - 1].t;
    CHECK(a.energy[i].E - a.energy[i - 1].E <= 1e-3 * E0 * dt);
  }
  const double ra = energy_law_residual(a), rb = energy_law_residual(b);
  CHECK(rb < ra);
  CHECK(ra / rb >= 2.0);
}

TEST_CASE("Taylor-Green kinetic energy is resolution independent") {
  SolverConfig c;
  c.t_end = 1.0;
  c.dt = 5e-3;
  c.output_stride = 200;
  double ek[2];
  int idx = 0;
  for (int n : {16, 32}) {
    const PeriodicGrid g(2 * M_PI, n);
    State s(g);
    s.u = taylor_green(g, 1.0);
    c.resolution = n;
    const Trajectory t = simulate(c, s);
    ek[idx++] = 0.5 * norm_squared(t.states().back().u).values().sum() * g.cell_volume();
  }
  CHECK(std::abs(ek[0] - ek[1]) <= 1e-3 * ek[1]);
}

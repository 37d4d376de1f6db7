#include <doctest.h>

#include "helpers.hpp"
#include "prlab/energy.hpp"
#include "prlab/flows.hpp"
#include "prlab/solver.hpp"

using namespace prlab;

namespace {

Trajectory smooth_run(int n, double t_end, double dt, const InitialRecipe& rec) {
  const PeriodicGrid g(2 * M_PI, n);
  SolverConfig c;
  c.resolution = n;
  c.t_end = t_end;
  c.dt = dt;
  c.output_stride = 1;
  return simulate(c, initial_state(g, rec));
}

// Taylor–Green with a banded director at N = 32, resolved enough for the local identity.
const Trajectory& resolved_run() {
  static const Trajectory t = smooth_run(32, 0.5, 0.00125, InitialRecipe{});
  return t;
}

Trajectory static_trajectory(const State& s, int slices, double tau) {
  RunMetadata m;
  m.resolution = s.grid().resolution();
  m.extent = s.grid().extent();
  Trajectory t(s.grid(), m);
  for (int i = 0; i < slices; ++i) {
    State c = s;
    c.t = i * tau;
    t.append(c);
  }
  return t;
}

}  // namespace

TEST_CASE("global energy of reference states") {
  const PeriodicGrid g(1.5, 16);
  const GlobalEnergyRecord z = global_energy(State(g));
  CHECK(z.E == doctest::Approx(g.volume()).epsilon(1e-14));
  CHECK(z.D == 0.0);
  State s(g);
  s.d = sample_vector(g, [](const Point&) { return Eigen::Vector3d(0, 0.6, 0.8); });
  const GlobalEnergyRecord one = global_energy(s);
  CHECK(std::abs(one.E) < 1e-13);
  CHECK(std::abs(one.D) < 1e-13);
}

TEST_CASE("global energy law on a smooth run") {
  const Trajectory t = smooth_run(16, 0.1, 0.00125, InitialRecipe{});
  std::vector<double> E;
  for (const auto& r : t.energy) E.push_back(r.E);
  const auto dE = time_derivative(E, t.energy[1].t - t.energy[0].t);
  for (std::size_t i = 0; i < E.size(); ++i) CHECK(std::abs(dE[i] + t.energy[i].D) <= 1e-3 * std::max(t.energy[i].D, 1.0));
}

TEST_CASE("test function derivatives") {
  const PeriodicGrid g(2 * M_PI, 16);
  const TestFunction phi(Point(3, 3, 3), 1.5, 0.0, 1.0);
  CHECK(phi.derivative_check(g, 100, 4) <= 1e-4);
  CHECK(Bump::value(0.0) == doctest::Approx(1.0));
  CHECK(Bump::value(1.0) == 0.0);
  CHECK_THROWS_AS(TestFunction(Point::Zero(), 4.0, 0.0, 1.0).check_support(g, 0.0, 1.0), Error);
  CHECK_THROWS_AS(phi.check_support(g, 0.1, 1.0), Error);
}

TEST_CASE("R_f term") {
  const PeriodicGrid g(2 * M_PI, 32);
  const TestFunction tf(Point(M_PI, M_PI, M_PI), 2.0, 0.0, 1.0);
  const ScalarField phi = tf.evaluate(g, 0.5).phi;
  const VectorField dc = sample_vector(g, [](const Point&) { return Eigen::Vector3d(0.2, 0.1, 0.9); });
  CHECK(rf_term(dc, phi).value == 0.0);

  int violations = 0;
  double worst_gap = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const VectorField d = random_vector(g, 2, 0.5 + 0.02 * double(seed), seed);
    const TestFunction t2(Point(1 + 0.04 * seed, 2, 3), 1.0 + 0.01 * seed, 0.0, 1.0);
    const ScalarField p2 = t2.evaluate(g, 0.3).phi;
    const RfTerm r = rf_term(d, p2);
    violations += std::abs(r.value) > r.bound;
    const MatrixField G = grad_T(d);
    const ScalarField a = rf_density(d, G, p2), b = rf_density_direct(d, G, p2), c = rf_bound_density(d, G, p2);
    violations += ((a.values().abs() - c.values()) > 1e-12 * c.max_abs()).count() > 0;
    if (seed < 10) worst_gap = std::max(worst_gap, testing_util::rel_diff(a, b));
  }
  CHECK(violations == 0);
  CHECK(worst_gap <= 1e-8);
}

TEST_CASE("local energy audit") {
  const PeriodicGrid g(2 * M_PI, 16);
  const Trajectory zero = static_trajectory(State(g), 5, 0.1);
  const LocalEnergyAudit za = local_energy_audit(zero, TestFunction(Point(3, 3, 3), 2.0, 0.0, 0.4));
  CHECK(za.max_residual == 0.0);
  for (const auto& r : za.records) CHECK((r.flux == 0.0 && r.stress == 0.0 && r.remainder == 0.0 && r.heat == 0.0));

  const LocalEnergyAudit a = local_energy_audit(resolved_run(), TestFunction(Point(3, 3, 3), 2.5, 0.0, 0.5));
  CHECK(a.max_residual <= 1e-2 * std::max(a.max_dissipation, 1.0));

  InitialRecipe ns;
  ns.director = "zero";
  const Trajectory plain = smooth_run(16, 0.1, 0.01, ns);
  const LocalEnergyAudit pa = local_energy_audit(plain, TestFunction(Point(3, 3, 3), 2.5, 0.0, 0.1));
  for (const auto& r : pa.records) CHECK((r.stress == 0.0 && r.remainder == 0.0));
}

TEST_CASE("Gronwall forms") {
  const PeriodicGrid g(2 * M_PI, 16);
  const Trajectory zero = static_trajectory(State(g), 5, 0.1);
  const auto za = local_energy_audit(zero, TestFunction(Point(3, 3, 3), 2.0, 0.0, 0.4));
  const GronwallCheck z = gronwall_form(za.records, 0.4);
  CHECK((z.rough_holds && z.absorbed_holds && z.integrated_holds));
  CHECK(z.C_T == doctest::Approx(8 * 0.4 * std::exp(3.2) + 1));

  const auto a = local_energy_audit(resolved_run(), TestFunction(Point(3, 3, 3), 2.5, 0.0, 0.5));
  const GronwallCheck c = gronwall_form(a.records, 0.5);
  // The pre-absorption form is tight up to the discretisation residual of the identity.
  CHECK(c.margin_rough >= -a.max_residual);
  CHECK(c.absorbed_holds);
  CHECK(c.integrated_holds);
}

TEST_CASE("heuristic estimate chain") {
  const PeriodicGrid g(2 * M_PI, 16);
  State s0(g);
  const auto z = heuristic_chain_audit(static_trajectory(s0, 3, 0.1));
  CHECK(z.lines.front().lhs == 0.0);
  CHECK(z.min_margin >= 0.0);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    State s(g);
    s.u = random_solenoidal(g, 2, 1.0, seed);
    s.d = random_vector(g, 2, 1.5, seed + 100);
    CHECK(heuristic_chain_audit(static_trajectory(s, 3, 0.1)).min_margin >= -1e-9);
  }

  // Both sides of the f bound grow at the same rate under d ↦ λd.
  State base(g);
  base.d = random_vector(g, 2, 1.0, 5);
  std::vector<double> lhs, rhs;
  for (double lam : {1.0, 2.0, 4.0}) {
    State s = base;
    s.d.values() *= lam;
    for (const auto& line : heuristic_chain_audit(static_trajectory(s, 3, 0.1)).lines)
      if (line.name == "f_L2_squared") {
        lhs.push_back(line.lhs);
        rhs.push_back(line.rhs);
      }
  }
  REQUIRE(lhs.size() == 3);
  const double sl = std::log2(lhs[2] / lhs[1]), sr = std::log2(rhs[2] / rhs[1]);
  CHECK(sl == doctest::Approx(sr).epsilon(0.1));
}

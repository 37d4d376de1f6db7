#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "prlab/flows.hpp"
#include "prlab/grid.hpp"
#include "prlab/spectral.hpp"

using namespace prlab;
using testing_util::max_diff;
using testing_util::rel_diff;

TEST_CASE("grid construction refuses unsupported resolutions") {
  CHECK_THROWS_AS(PeriodicGrid(1.0, 12), Error);
  CHECK_THROWS_AS(PeriodicGrid(1.0, 4), Error);
  CHECK_THROWS_AS(PeriodicGrid(-1.0, 16), Error);
  const PeriodicGrid g(2.0, 16);
  CHECK(g.spacing() == doctest::Approx(0.125));
  CHECK(g.node_count() == 4096);
  int i, j, k;
  g.coordinates(g.index(3, 5, 7), i, j, k);
  CHECK((i == 3 && j == 5 && k == 7));
  CHECK(g.index(-1, 16, 0) == g.index(15, 0, 0));
}

TEST_CASE("minimum image displacement") {
  const PeriodicGrid g(1.0, 16);
  const Point d = g.displacement(Point(0.95, 0.1, 0.5), Point(0.05, 0.9, 0.5));
  CHECK(d[0] == doctest::Approx(0.1));
  CHECK(d[1] == doctest::Approx(-0.2));
  CHECK(d[2] == doctest::Approx(0.0));
}

TEST_CASE("forward and inverse transforms round trip") {
  const PeriodicGrid g(2.0, 16);
  const ScalarField s = random_scalar(g, 4, 1.0, 3);
  const Eigen::ArrayXd back = inverse(forward(g, s.component(0)));
  CHECK((back - s.values().col(0)).abs().maxCoeff() < 1e-13);
}

TEST_CASE("gradient of a constant vanishes") {
  const PeriodicGrid g(3.0, 16);
  ScalarField c(g);
  c.values().setConstant(2.5);
  CHECK(gradient(c).max_abs() < 1e-14);
}

TEST_CASE("gradient of a single mode") {
  const double L = 3.0;
  const PeriodicGrid g(L, 32);
  const double k = 2 * M_PI / L;
  const ScalarField s = sample_scalar(g, [&](const Point& x) { return std::sin(k * x[0]); });
  const VectorField exact = sample_vector(g, [&](const Point& x) { return Eigen::Vector3d(k * std::cos(k * x[0]), 0, 0); });
  CHECK(rel_diff(gradient(s), exact) <= 1e-12);
}

TEST_CASE("divergence of gradient equals laplacian") {
  const PeriodicGrid g(2 * M_PI, 32);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ScalarField s = random_scalar(g, 5, 1.0, seed);
    CHECK(rel_diff(divergence(gradient(s)), laplacian(s)) <= 1e-10);
  }
}

TEST_CASE("transport identity for div_T of an outer product") {
  const PeriodicGrid g(2 * M_PI, 32);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const VectorField v = random_vector(g, 3, 1.0, seed);
    const VectorField w = random_vector(g, 3, 1.0, seed + 50);
    const VectorField lhs = div_T(outer(v, w));
    VectorField rhs = apply(grad_T(v), w);
    rhs += scale(divergence(w), v);
    CHECK(rel_diff(lhs, rhs) <= 1e-9);
  }
}

TEST_CASE("odot of a constant director vanishes") {
  const PeriodicGrid g(1.0, 16);
  const VectorField d = sample_vector(g, [](const Point&) { return Eigen::Vector3d(0.3, -0.4, 0.8); });
  const MatrixField G = grad_T(d);
  CHECK(odot(G, G).max_abs() < 1e-14);
}

TEST_CASE("divergence of the Ericksen stress") {
  const PeriodicGrid g(2 * M_PI, 32);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const VectorField d = random_vector(g, 3, 1.0, seed + 7);
    const MatrixField G = grad_T(d);
    const VectorField lhs = div_T(odot(G, G));
    ScalarField half = norm_squared(G);
    half.values() *= 0.5;
    VectorField rhs = gradient(half);
    rhs += apply(transpose(G), laplacian(d));
    CHECK(rel_diff(lhs, rhs) <= 1e-9);
  }
}

TEST_CASE("integration over regions") {
  const double L = 2.0;
  const PeriodicGrid g(L, 32);
  ScalarField one(g);
  one.values().setConstant(1.0);
  CHECK(integrate(one, Region::full_box()) == doctest::Approx(L * L * L).epsilon(1e-14));

  // Ball volume converges with the spacing.
  for (int n : {16, 32, 64}) {
    const PeriodicGrid gn(L, n);
    ScalarField on(gn);
    on.values().setConstant(1.0);
    const double r = 0.6;
    const double exact = 4.0 / 3.0 * M_PI * r * r * r;
    const double got = integrate(on, Region::ball(Point(1.0, 1.0, 1.0), r));
    CHECK(std::abs(got - exact) / exact <= 10 * gn.spacing() / r);
  }

  const ScalarField s = random_scalar(g, 3, 1.0, 11);
  ScalarField sq = multiply(s, s);
  CHECK(integrate(sq, Region::ball(Point(0.3, 1.7, 0.2), 0.8)) >= 0);
  CHECK(integrate(sq, Region::box(Point(0, 0, 0), Point(1, 1, 1))) >= 0);
}

TEST_CASE("ball regions refuse radii below two spacings") {
  const PeriodicGrid g(1.0, 16);
  CHECK_THROWS_AS(region_nodes(g, Region::ball(Point::Zero(), 0.1)), Error);
  CHECK_NOTHROW(region_nodes(g, Region::ball(Point::Zero(), 0.2)));
}

TEST_CASE("non-finite samples are reported") {
  const PeriodicGrid g(1.0, 8);
  ScalarField s(g);
  s(5) = std::nan("");
  CHECK_THROWS_AS(check_finite(s, "s"), Error);
}

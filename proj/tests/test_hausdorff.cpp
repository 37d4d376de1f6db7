#include <doctest.h>

#include <random>

#include "prlab/flows.hpp"
#include "prlab/hausdorff.hpp"

using namespace prlab;

namespace {

// Independent geometry for the brute-force oracle (non-periodic).
bool overlap(const SpaceTimeBall& a, const SpaceTimeBall& b) {
  const bool times = a.t - 0.875 * a.r * a.r < b.t + 0.125 * b.r * b.r && b.t - 0.875 * b.r * b.r < a.t + 0.125 * a.r * a.r;
  return times && (a.x - b.x).norm() < a.r + b.r;
}

bool inside_expanded(const SpaceTimeBall& a, const SpaceTimeBall& b) {
  const double R = 5 * b.r;
  return (a.x - b.x).norm() + a.r <= R && a.t - 0.875 * a.r * a.r >= b.t - 0.875 * R * R &&
         a.t + 0.125 * a.r * a.r <= b.t + 0.125 * R * R;
}

std::vector<SpaceTimeBall> random_family(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> pos(0, 1), rad(0.05, 0.3);
  std::vector<SpaceTimeBall> f;
  for (int i = 0; i < n; ++i) f.push_back({Point(pos(rng), pos(rng), pos(rng)), pos(rng) * 0.2, rad(rng)});
  return f;
}

Trajectory flow_trajectory(double amplitude, int n = 32) {
  AnalyticFlowConfig c;
  c.extent = 2.0;
  c.u_rms = c.d_rms = amplitude;
  c.t_first = 0.0;
  c.t_last = 1.0;
  c.seed = 17;
  return AnalyticFlow(c).trajectory(PeriodicGrid(2.0, n), 0.0, 1.0 / 64, 65);
}

}  // namespace

TEST_CASE("Vitali selection basics") {
  const SpaceTimeBall a{Point(0.5, 0.5, 0.5), 0.1, 0.2};
  VitaliCover one = vitali_select({a});
  CHECK(one.selected == std::vector<std::size_t>{0});
  CHECK((one.disjoint && one.covers_balls && one.covers_centers));
  VitaliCover two = vitali_select({a, a});
  CHECK(two.selected.size() == 1);
  CHECK((two.disjoint && two.covers_balls));
  CHECK_THROWS_AS(vitali_select({{Point::Zero(), 0.0, 0.0}}), Error);
}

TEST_CASE("Vitali selection against exhaustive search") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 10;
    const auto fam = random_family(rng, n);
    const VitaliCover v = vitali_select(fam);
    CHECK((v.disjoint && v.covers_balls && v.covers_centers));

    std::uint32_t chosen = 0;
    for (std::size_t i : v.selected) chosen |= 1u << i;
    bool found = false;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      bool disjoint = true;
      for (int i = 0; i < n && disjoint; ++i)
        for (int j = i + 1; j < n && disjoint; ++j)
          if ((mask >> i & 1) && (mask >> j & 1) && overlap(fam[i], fam[j])) disjoint = false;
      if (!disjoint) continue;
      bool maximal = true;
      for (int i = 0; i < n && maximal; ++i) {
        if (mask >> i & 1) continue;
        bool free = true;
        for (int j = 0; j < n; ++j)
          if ((mask >> j & 1) && overlap(fam[i], fam[j])) free = false;
        if (free) maximal = false;
      }
      if (!maximal || mask != chosen) continue;
      found = true;
      for (int i = 0; i < n; ++i) {
        bool covered = false;
        for (int j = 0; j < n; ++j) covered = covered || ((mask >> j & 1) && inside_expanded(fam[i], fam[j]));
        CHECK(covered);
      }
    }
    CHECK(found);
  }
}

TEST_CASE("P^k_delta bounds") {
  CHECK(pk_delta({}, 1.0, 0.1).bound == 0.0);
  const std::vector<SpaceTimeBall> single{{Point(0.3, 0.3, 0.3), 0.0, 0.0}};
  for (double delta : {0.4, 0.1, 0.01}) CHECK(pk_delta(single, 2.0, delta).bound <= std::pow(0.5 * delta, 2.0));

  const double ell = 1.0;
  std::vector<SpaceTimeBall> segment;
  for (int i = 0; i <= 2000; ++i) segment.push_back({Point(ell * i / 2000.0, 0.5, 0.5), 0.0, 0.0});
  for (double delta : {ell / 8, ell / 16, ell / 32}) {
    const PkEstimate e = pk_delta(segment, 1.0, delta);
    CHECK(e.bound <= 20 * ell / 2);
    CHECK(e.bound >= ell / 2 / 20);
    for (const auto& c : e.cover) CHECK(c.r < delta);
  }
  std::vector<double> lx, ly;
  for (double delta : {ell / 4, ell / 8, ell / 16, ell / 32}) {
    lx.push_back(std::log(delta));
    ly.push_back(std::log(pk_delta(segment, 2.0, delta).bound));
  }
  const double slope = (ly.back() - ly.front()) / (lx.back() - lx.front());
  CHECK(slope == doctest::Approx(1.0).epsilon(0.2));
  CHECK(pk_delta(segment, 2.0, ell / 16).bound <= pk_delta(segment, 1.0, ell / 16).bound);
}

TEST_CASE("singular budget") {
  const PeriodicGrid g(1.0, 8);
  const ScalarField one = sample_scalar(g, [](const Point&) { return 1.0; });
  const std::vector<double> w = trapezoid_weights(5, 0.25);
  const BudgetReport b = singular_budget({one, one, one, one, one}, w, 1.0, 1.0);
  CHECK(b.integral == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(b.budget == doctest::Approx(3125.0).epsilon(1e-14));
  CHECK(singular_budget({ScalarField(g)}, {1.0}, 1.0, 1.0).budget == 0.0);
  const BudgetReport five = singular_budget({one, one, one, one, one}, w, 5.0, 2.0);
  CHECK(five.lebesgue_budget == doctest::Approx(3125.0 * 4 * M_PI / 3 / 2).epsilon(1e-14));

  ScalarField u = random_scalar(g, 2, 1.0, 3);
  u.values() = u.values().abs();
  const double base = singular_budget({u}, {1.0}, 1.0, 0.5).budget;
  ScalarField u3 = 3.0 * u;
  CHECK(singular_budget({u3}, {1.0}, 1.0, 0.5).budget == doctest::Approx(3 * base).epsilon(1e-13));
  CHECK(singular_budget({u}, {1.0}, 1.0, 2.0).budget == doctest::Approx(base / 4).epsilon(1e-13));
  CHECK_THROWS_AS(singular_budget({-1.0 * one}, {1.0}, 1.0, 1.0), Error);

  const Trajectory t = flow_trajectory(0.3, 16);
  const auto slices = dissipation_slices(t);
  double direct = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double wt = (i == 0 || i + 1 == t.size()) ? 0.5 * t.spacing() : t.spacing();
    double s = 0;
    for (Index n = 0; n < t.grid().node_count(); ++n) s += slices[i](n);
    direct += wt * s * t.grid().cell_volume();
  }
  const BudgetReport d = singular_budget(slices, trapezoid_weights(t.size(), t.spacing()), 1.0, 1e-3);
  CHECK(d.budget == doctest::Approx(3125.0 * direct / 1e-3).epsilon(1e-12));
}

TEST_CASE("singular scan") {
  RegularityConfig c;
  c.radii = {1.0, 0.5, 0.25};
  const SingularScanReport smooth = singular_scan(flow_trajectory(0.01), c);
  CHECK(smooth.candidates.empty());
  for (const auto& row : smooth.table) CHECK(row.bound == 0.0);

  // A localised high-frequency burst in u around x = (1, 1, 1).
  Trajectory t = flow_trajectory(0.01);
  Trajectory rough(t.grid(), t.metadata());
  const Point patch(1, 1, 1);
  for (std::size_t i = 0; i < t.size(); ++i) {
    State s = t[i];
    const PeriodicGrid& g = s.grid();
    s.u += sample_vector(g, [&](const Point& x) {
      const double r = g.distance(patch, x);
      const double w = r < 0.3 ? std::exp(-1 / (1 - r * r / 0.09)) : 0.0;
      return Eigen::Vector3d(0, 0, 20 * w * std::sin(8 * M_PI * x[0]));
    });
    rough.append(std::move(s));
  }
  const SingularScanReport tight = singular_scan(rough, c);
  REQUIRE(!tight.candidates.empty());
  for (const auto& z : tight.candidates) CHECK(rough.grid().distance(patch, z.x) <= 0.3 + 1.0);
  CHECK((tight.cover.disjoint && tight.cover.covers_balls));

  RegularityConfig loose = c;
  loose.eps_q = loose.eps_sigma = 1.0;
  loose.g_sigma = 10.0;
  const SingularScanReport l = singular_scan(rough, loose);
  CHECK(l.candidates.size() <= tight.candidates.size());
  for (std::size_t i = 0; i < l.table.size(); ++i) CHECK(l.table[i].bound <= tight.table[i].bound);
  // Loosening thresholds keeps candidates inside the tighter candidate set.
  const ScanClassification a = classify(tight.scan, 1e-3, 1.0, 1e-3, c.m), b = classify(tight.scan, 1.0, 10.0, 1.0, c.m);
  std::vector<char> in_a(tight.scan.times.size() * tight.scan.nodes(), 0);
  for (std::size_t k : a.candidates) in_a[k] = 1;
  for (std::size_t k : b.candidates) CHECK(in_a[k]);
}

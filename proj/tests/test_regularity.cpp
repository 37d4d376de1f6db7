#include <doctest.h>

#include "oracle_values.hpp"
#include "prlab/cylinders.hpp"
#include "prlab/flows.hpp"
#include "prlab/regularity.hpp"

using namespace prlab;

namespace {

AnalyticFlowConfig flow(std::uint64_t seed, double u_rms, double d_rms) {
  AnalyticFlowConfig c;
  c.extent = 2.0;
  c.u_rms = u_rms;
  c.d_rms = d_rms;
  c.t_first = -0.3;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("exponents and dyadic sums") {
  CHECK(alpha_q(6.0) == doctest::Approx(0.5));
  CHECK(alpha_q(5.0) == 0.0);
  CHECK(alpha_q(5.25) == doctest::Approx(2 * 0.25 / 3.25));
  CHECK(alpha_sigma_q(6.0, 5.25) == 1.0);
  CHECK(alpha_sigma_q(5.5, 5.5) == 0.0);
  CHECK(dyadic_limit(0.1) == doctest::Approx(oracle::kDyadicLimit01).epsilon(1e-14));
  CHECK(dyadic_limit(0.5) == doctest::Approx(oracle::kDyadicLimit05).epsilon(1e-14));
  CHECK(dyadic_limit(1.0) == doctest::Approx(oracle::kDyadicLimit1).epsilon(1e-14));
  CHECK(dyadic_partial_sum(1.0, 20) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(dyadic_partial_sum(0.1, 500) == doctest::Approx(oracle::kDyadicLimit01).epsilon(1e-12));
  CHECK(dyadic_partial_sum(0.5, 100) == doctest::Approx(oracle::kDyadicLimit05).epsilon(1e-12));
  RegularityConfig bad;
  bad.q = 6.5;
  CHECK_THROWS_AS(validate(bad), Error);
}

TEST_CASE("heat cutoff") {
  for (int n = 1; n <= 6; ++n) {
    const HeatCutoffReport r = heat_cutoff(n);
    CHECK(r.max_residual <= 1e-12);
    CHECK(r.max_fd_residual <= 1e-3);
    CHECK(r.qn_lower == doctest::Approx(oracle::kQnLower).epsilon(1e-14));
    CHECK(r.qn_holds);
    REQUIRE(r.shells.size() == std::size_t(n));
    for (const auto& s : r.shells) {
      CHECK(s.lower == doctest::Approx(oracle::kShellLower).epsilon(1e-14));
      CHECK(s.upper == doctest::Approx(oracle::kShellUpper).epsilon(1e-14));
      CHECK(s.holds);
    }
  }
}

TEST_CASE("E_3q") {
  const AnalyticFlow zero(flow(0, 0.0, 0.0));
  const ParabolicCylinder unit{Point(1, 1, 1), 0.0, 1.0, Variant::Lower};
  AnalyticFlowConfig fc = flow(2, 0.4, 0.3);
  fc.t_first = -1.0;
  CHECK(e3q(sample_cylinder(AnalyticFlow([&] { auto z = fc; z.u_rms = z.d_rms = 0; return z; }()), unit), 5.25) == 0.0);

  // The d term of E_3q carries |∇d| alone, so it matches G_q exactly when u vanishes.
  const AnalyticFlow f(fc);
  const CylinderSamples s = sample_cylinder(f, unit);
  const QuantityReport q = quantities(s, unit, {5.25});
  CHECK(e3q(s, 5.25) <= (q.C + q.D + q.G_at(5.25)) * (1 + 1e-12));

  fc.u_rms = 0.0;
  const CylinderSamples sd = sample_cylinder(AnalyticFlow(fc), unit);
  const QuantityReport qd = quantities(sd, unit, {5.25});
  CHECK(e3q(sd, 5.25) == doctest::Approx(qd.C + qd.D + qd.G_at(5.25)).epsilon(1e-12));

  fc.u_rms = 0.4;
  fc.d_rms = 0.0;
  const AnalyticFlow plain(fc);
  const CylinderSamples sp = sample_cylinder(plain, unit);
  const QuantityReport qp = quantities(sp, unit, {5.25});
  CHECK(qp.G_at(5.25) == 0.0);
  CHECK(e3q(sp, 5.25) == doctest::Approx(qp.C + qp.D).epsilon(1e-12));
}

TEST_CASE("L3 detector") {
  RegularityConfig c;
  const AnalyticFlow zero(flow(0, 0.0, 0.0));
  const DetectorVerdict z = l3_detect(zero, Point(1, 1, 1), 0.0, 0.5, c);
  CHECK(z.verdict == Verdict::RegularCertified);
  CHECK(z.measured_sup == 0.0);
  CHECK(z.sup_consistent);

  // Pin the amplitude so that E_3q = ε̄/2.
  const Point x0(0.8, 1.1, 0.9);
  const double r = 0.5, t0 = 0.0;
  const auto e_at = [&](double lam) { return e3q_at(AnalyticFlow(flow(5, lam, lam)), x0, t0, r, c.q); };
  double lo = 0, hi = 1;
  while (e_at(hi) < 0.5 * c.eps_q) hi *= 2;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (e_at(mid) < 0.5 * c.eps_q ? lo : hi) = mid;
  }
  const DetectorVerdict v = l3_detect(AnalyticFlow(flow(5, lo, lo)), x0, t0, r, c);
  CHECK(v.value == doctest::Approx(0.5 * c.eps_q).epsilon(1e-6));
  CHECK(v.verdict == Verdict::RegularCertified);
  CHECK(v.measured_sup <= v.implied_bound);
  CHECK(v.implied_bound == doctest::Approx(std::pow(c.eps_q, 2.0 / 9.0) / r));

  const DetectorVerdict big = l3_detect(AnalyticFlow(flow(5, 5.0, 1.0)), x0, t0, r, c);
  CHECK(big.value > c.eps_q);
  CHECK(big.verdict == Verdict::Undecided);
  CHECK(std::string(verdict_name(big.verdict)) == "undecided");
}

TEST_CASE("certified set shrinks with the threshold") {
  const AnalyticFlow f(flow(9, 0.05, 0.05));
  std::vector<std::vector<bool>> sets;
  for (double eps : {1e-2, 1e-3, 1e-4, 1e-5}) {
    RegularityConfig c;
    c.eps_q = eps;
    std::vector<bool> s;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        s.push_back(l3_detect(f, Point(0.5 * i, 0.5 * j, 1.0), 0.0, 0.5, c).verdict == Verdict::RegularCertified);
    sets.push_back(s);
  }
  for (std::size_t k = 1; k < sets.size(); ++k)
    for (std::size_t i = 0; i < sets[k].size(); ++i) CHECK((!sets[k][i] || sets[k - 1][i]));
}

TEST_CASE("L3 scaling covariance") {
  const Trajectory t = AnalyticFlow(flow(4, 0.3, 0.3)).trajectory(PeriodicGrid(2.0, 32), -0.5, 1.0 / 256, 161);
  const Point x0(0.75, 1.0, 1.25);
  const double t0 = 0.0, r = 0.5;
  const Trajectory z = rescale(t, x0, t0, r);
  const double direct = e3q_at(TrajectorySource(t), x0, t0, r, 5.25);
  const double unit = e3q_at(TrajectorySource(z), Point::Zero(), 0.0, 1.0, 5.25);
  CHECK(unit == doctest::Approx(direct).epsilon(1e-3));
}

TEST_CASE("H1 detector") {
  RegularityConfig c;
  c.rho0 = 1.0;
  const AnalyticFlow zero(flow(0, 0.0, 0.0));
  const DetectorVerdict z = h1_detect(zero, Point(1, 1, 1), 0.0, c);
  CHECK(z.verdict == Verdict::RegularCertified);
  CHECK((z.value == 0.0 && z.value2 == 0.0));

  const AnalyticFlow plain(flow(6, 0.05, 0.0));
  const DetectorVerdict p = h1_detect(plain, Point(1, 1, 1), 0.0, c);
  CHECK(p.value == 0.0);
  CHECK(p.verdict == (p.value2 <= c.eps_sigma ? Verdict::RegularCertified : Verdict::Undecided));

  const AnalyticFlow f(flow(7, 0.2, 0.3));
  const DetectorVerdict v = h1_detect(f, Point(1, 1, 1), 0.0, c);
  const std::vector<double> radii = h1_radii(f, Point(1, 1, 1), 0.0, c);
  CHECK(radii.size() == std::size_t(c.m));
  double g = 0, b = 0;
  for (double r : radii) {
    const QuantityReport q = quantities(f, {Point(1, 1, 1), 0.0, r, Variant::Centered}, {c.sigma}, c.rule);
    g = std::max(g, q.G_at(c.sigma));
    b = std::max(b, q.B);
  }
  CHECK(v.value == doctest::Approx(g).epsilon(1e-12));
  CHECK(v.value2 == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("bootstrap and decay on zero fields") {
  AnalyticFlowConfig zc = flow(0, 0.0, 0.0);
  zc.t_first = -1.0;
  const AnalyticFlow zero(zc);
  const BootstrapReport b = bootstrap_eval(zero, Point(1, 1, 1), 0.0, Point(1.1, 1, 1), -0.1, BootstrapConfig{});
  REQUIRE(!b.rows.empty());
  for (const auto& row : b.rows) {
    if (row.has_A) CHECK(row.margin_A >= 0.0);
    if (row.has_B) CHECK(row.margin_B >= 0.0);
  }
  DecayConfig dc;
  const DecayReport d = decay_eval(zero, Point(1, 1, 1), 0.0, dc);
  CHECK(d.applicable);
  for (const auto& row : d.rows) CHECK((row.lhs == 0.0 && row.margin >= 0.0));
}

TEST_CASE("decay estimate on small flows") {
  DecayConfig dc;
  const DecayReport d = decay_eval(AnalyticFlow(flow(12, 0.05, 0.05)), Point(1, 1, 1), 0.0, dc);
  CHECK(d.applicable);
  CHECK(d.rows.size() == 2 * std::max<std::size_t>(1, dc.rho.size()));
  CHECK(std::isfinite(d.max_empirical));
  const DecayReport big = decay_eval(AnalyticFlow(flow(12, 20.0, 0.05)), Point(1, 1, 1), 0.0, dc);
  CHECK(!big.applicable);
  CHECK(big.rows.empty());
}

TEST_CASE("scan agrees with the pointwise detector") {
  const Trajectory t = AnalyticFlow(flow(8, 0.05, 0.05)).trajectory(PeriodicGrid(2.0, 32), 0.0, 1.0 / 64, 65);
  RegularityConfig c;
  c.radii = {1.0, 0.5, 0.25};
  const ScanReport s = scan_regularity(t, c);
  REQUIRE(!s.times.empty());
  const TrajectorySource src(t);
  const PeriodicGrid& g = t.grid();
  for (Index node : {Index(0), Index(1234), Index(4000)})
    for (std::size_t ri = 0; ri < s.radii.size(); ++ri) {
      const double direct = e3q_at(src, g.node(node), s.times.back(), s.radii[ri], c.q, c.rule);
      CHECK(double(s.e3q[s.slot(ri, s.times.size() - 1, std::size_t(node))]) ==
            doctest::Approx(direct).epsilon(1e-5));
    }
  const ScanClassification loose = classify(s, 1e-2, 1.0, 1e-2, 2), tight = classify(s, 1e-6, 1.0, 1e-6, 2);
  CHECK(tight.l3_count <= loose.l3_count);
  CHECK(tight.h1_count <= loose.h1_count);
}

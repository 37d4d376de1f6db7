#include "prlab/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "prlab/parallel.hpp"
#include "prlab/spectral.hpp"

namespace prlab {

namespace {

bool inside_window(const DensitySource& src, double t_lo, double t_hi) {
  const double tol = 1e-9 * std::max(1.0, std::abs(src.t_last() - src.t_first()));
  return t_lo >= src.t_first() - tol && t_hi <= src.t_last() + tol;
}

double safe_ratio(double lhs, double rhs) {
  if (rhs > 0) return lhs / rhs;
  return lhs > 0 ? std::numeric_limits<double>::infinity() : 0.0;
}

double default_rho0(double extent, const RegularityConfig& c) { return c.rho0 > 0 ? c.rho0 : 0.5 * extent; }

std::vector<double> candidate_radii(double extent, const RegularityConfig& c) {
  std::vector<double> radii = c.radii;
  if (radii.empty())
    for (int j = 0; j <= c.depth; ++j) radii.push_back(std::ldexp(default_rho0(extent, c), -j));
  std::sort(radii.rbegin(), radii.rend());
  return radii;
}

}  // namespace

void validate(const RegularityConfig& c) {
  require(c.q > 5 && c.q < 6, ErrorCode::InvalidArgument, "q must lie in (5, 6)");
  require(c.sigma >= c.q && c.sigma < 6, ErrorCode::InvalidArgument, "sigma must lie in [q, 6)");
  require(c.eps_q > 0 && c.eps_sigma > 0 && c.g_sigma > 0, ErrorCode::InvalidArgument,
          "detector thresholds must be positive");
  require(c.depth >= 0, ErrorCode::InvalidArgument, "depth must be non-negative");
  require(c.m >= 1, ErrorCode::InvalidArgument, "m must be at least 1");
  require(c.rho0 >= 0, ErrorCode::InvalidArgument, "rho0 must be non-negative");
  for (double r : c.radii) require(r > 0, ErrorCode::InvalidArgument, "radii must be positive");
}

double alpha_q(double q) {
  require(q > 2, ErrorCode::InvalidArgument, "alpha_q needs q > 2");
  return 2.0 * (q - 5.0) / (q - 2.0);
}

double alpha_sigma_q(double sigma, double q) {
  require(0 < q && q <= sigma && sigma <= 6, ErrorCode::InvalidArgument, "need 0 < q <= sigma <= 6");
  if (q == 6) return 1.0;
  return (6.0 / sigma) * (sigma - q) / (6.0 - q);
}

double dyadic_partial_sum(double alpha, int depth) {
  double s = 0;
  for (int k = 1; k <= depth; ++k) s += std::exp2(-alpha * k);
  return s;
}

double dyadic_limit(double alpha) {
  require(alpha > 0, ErrorCode::InvalidArgument, "the dyadic series needs alpha > 0");
  return 1.0 / std::expm1(alpha * M_LN2);
}

double HeatCutoff::value(const Point& x, double t) const {
  const double s = r() * r() - t;
  require(s > 0, ErrorCode::InvalidArgument, "heat cutoff evaluated at t >= r_n^2");
  return std::pow(s, -1.5) * std::exp(-x.squaredNorm() / (4 * s));
}

double HeatCutoff::dt(const Point& x, double t) const {
  const double s = r() * r() - t;
  return value(x, t) * (1.5 / s - x.squaredNorm() / (4 * s * s));
}

Point HeatCutoff::gradient(const Point& x, double t) const {
  const double s = r() * r() - t;
  return -value(x, t) / (2 * s) * x;
}

double HeatCutoff::laplacian(const Point& x, double t) const {
  const double s = r() * r() - t;
  const double psi = value(x, t);
  double acc = 0;
  for (int a = 0; a < 3; ++a) acc += psi * (x[a] * x[a] / (4 * s * s) - 1.0 / (2 * s));
  return acc;
}

HeatCutoffReport heat_cutoff(int n, int per_axis, unsigned seed) {
  require(n >= 1 && n <= 30, ErrorCode::InvalidArgument, "heat cutoff index must lie in [1, 30]");
  require(per_axis >= 2, ErrorCode::InvalidArgument, "need at least two samples per axis");
  const HeatCutoff psi{n};
  const auto r_of = [](int k) { return std::ldexp(1.0, -k); };
  HeatCutoffReport rep;
  rep.n = n;
  rep.qn_lower = 1.0 / (std::pow(2.0, 1.5) * std::exp(0.25));
  rep.qn_upper = 1.0;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  const auto residual = [&](const Point& x, double t) {
    const double a = psi.dt(x, t), b = psi.laplacian(x, t);
    const double scale = std::abs(a) + std::abs(b) + psi.value(x, t) / (psi.r() * psi.r() - t);
    rep.max_residual = std::max(rep.max_residual, std::abs(a + b) / scale);
    const double rn = psi.r();
    const double dx = 1e-4 * rn, dtt = 1e-4 * rn * rn;
    const double fd_t = (psi.value(x, t + dtt) - psi.value(x, t - dtt)) / (2 * dtt);
    double fd_l = 0;
    for (int ax = 0; ax < 3; ++ax) {
      Point e = Point::Zero();
      e[ax] = dx;
      fd_l += (psi.value(x + e, t) - 2 * psi.value(x, t) + psi.value(x - e, t)) / (dx * dx);
    }
    rep.max_fd_residual = std::max(rep.max_fd_residual, std::abs(fd_t + fd_l) / scale);
  };

  // Qⁿ = B_{r_n} × (−r_n², 0].
  const double rn = r_of(n);
  rep.qn_min_scaled = std::numeric_limits<double>::infinity();
  const auto visit_qn = [&](const Point& x, double t) {
    const double v = psi.value(x, t) * rn * rn * rn;
    rep.qn_min_scaled = std::min(rep.qn_min_scaled, v);
    rep.qn_max_scaled = std::max(rep.qn_max_scaled, v);
    residual(x, t);
    ++rep.samples;
  };
  for (int l = 0; l < per_axis; ++l) {
    const double t = -rn * rn * l / per_axis;
    for (int k = -per_axis; k <= per_axis; ++k)
      for (int j = -per_axis; j <= per_axis; ++j)
        for (int i = -per_axis; i <= per_axis; ++i) {
          const Point x = Point(i, j, k) * (rn / per_axis);
          if (x.norm() < rn) visit_qn(x, t);
        }
  }
  for (int s = 0; s < 256; ++s) {
    Point x(unit(rng), unit(rng), unit(rng));
    if (x.norm() >= 1) continue;
    visit_qn(x * rn, -rn * rn * 0.5 * (1 - unit(rng)));
  }
  rep.qn_holds = rep.qn_min_scaled >= rep.qn_lower * (1 - 1e-12) && rep.qn_max_scaled <= rep.qn_upper * (1 + 1e-12);

  const double lower = 1.0 / (std::pow(2.0, 4.5) * M_E), upper = std::exp(-1.0 / 32.0);
  for (int k = 1; k <= n; ++k) {
    const double rk = r_of(k), rk1 = r_of(k - 1);
    const double scale = rk * rk * rk;
    ShellBoundCheck sh;
    sh.k = k;
    sh.lower = lower;
    sh.upper = upper;
    sh.min_scaled = std::numeric_limits<double>::infinity();
    double lit_min = std::numeric_limits<double>::infinity(), lit_max = 0;
    std::vector<Point> dirs{Point(1, 0, 0), Point(0, 1, 0), Point(1, 1, 1).normalized(), Point(1, -1, 0).normalized()};
    for (int s = 0; s < 4; ++s) dirs.push_back(Point(unit(rng), unit(rng), unit(rng)).normalized());
    for (int l = 0; l < per_axis; ++l) {
      // t ∈ (−r_{k−1}², −r_k²] and r_k <= |x| < r_{k−1}
      const double t = -rk * rk - (rk1 * rk1 - rk * rk) * l / per_axis;
      for (int m = 0; m < per_axis; ++m) {
        const double rho = rk + (rk1 - rk) * m / per_axis;
        for (const Point& d : dirs) {
          const double v = psi.value(rho * d, t) * scale;
          sh.min_scaled = std::min(sh.min_scaled, v);
          sh.max_scaled = std::max(sh.max_scaled, v);
          residual(rho * d, t);
          ++rep.samples;
        }
      }
      // Literal Q^{k−1} ∖ Q^k also holds the inner ball at these times and the outer shell at later ones.
      for (int m = 0; m < per_axis; ++m) {
        const double rho = rk * m / per_axis;
        const double v = psi.value(rho * dirs[0], t) * scale;
        lit_min = std::min(lit_min, v);
        lit_max = std::max(lit_max, v);
        const double tl = -rk * rk * l / per_axis;
        const double rho2 = rk + (rk1 - rk) * m / per_axis;
        const double v2 = psi.value(rho2 * dirs[0], tl) * scale;
        lit_min = std::min(lit_min, v2);
        lit_max = std::max(lit_max, v2);
      }
    }
    sh.holds = sh.min_scaled >= lower && sh.max_scaled <= upper;
    lit_min = std::min(lit_min, sh.min_scaled);
    lit_max = std::max(lit_max, sh.max_scaled);
    sh.literal_difference_holds = lit_min >= lower && lit_max <= upper;
    rep.shells.push_back(sh);
  }
  return rep;
}

double e3q(const CylinderSamples& s, double q) {
  double acc = 0;
  for (std::size_t ti = 0; ti < s.slices.size(); ++ti) {
    const SliceDensity& sd = s.slices[ti];
    const double w = s.weights[ti] * s.cell_volume;
    acc += w * (sd.u2.pow(1.5) + sd.gd2.pow(1.5) + sd.p.abs().pow(1.5) +
                sd.d2.pow(0.5 * q) * sd.gd2.pow(1.5 * (1 - q / 6.0)))
                   .sum();
  }
  return acc;
}

double e3q_at(const DensitySource& src, const Point& x0, double t0, double r, double q, const SampleRule& rule) {
  const CylinderSamples s = sample_cylinder(src, {x0, t0, r, Variant::Centered}, rule);
  double a = 0, b = 0;
  for (std::size_t ti = 0; ti < s.slices.size(); ++ti) {
    const SliceDensity& sd = s.slices[ti];
    const double w = s.weights[ti] * s.cell_volume;
    a += w * (sd.u2.pow(1.5) + sd.gd2.pow(1.5) + sd.p.abs().pow(1.5)).sum();
    b += w * (sd.d2.pow(0.5 * q) * sd.gd2.pow(1.5 * (1 - q / 6.0))).sum();
  }
  return a * std::pow(r, -2.0) + b * std::pow(r, -2.0 - 0.5 * q);
}

const char* verdict_name(Verdict v) { return v == Verdict::RegularCertified ? "regular-certified" : "undecided"; }

DetectorVerdict l3_detect(const DensitySource& src, const Point& x0, double t0, double r, const RegularityConfig& c) {
  validate(c);
  DetectorVerdict v;
  v.detector = "l3";
  v.x0 = x0;
  v.t0 = t0;
  v.radii = {r};
  v.threshold = c.eps_q;
  const CylinderSamples s = sample_cylinder(src, {x0, t0, r, Variant::Centered}, c.rule);
  v.spacing = s.spacing;
  v.slices = s.times.size();
  double a = 0, b = 0;
  for (std::size_t ti = 0; ti < s.slices.size(); ++ti) {
    const SliceDensity& sd = s.slices[ti];
    const double w = s.weights[ti] * s.cell_volume;
    a += w * (sd.u2.pow(1.5) + sd.gd2.pow(1.5) + sd.p.abs().pow(1.5)).sum();
    b += w * (sd.d2.pow(0.5 * c.q) * sd.gd2.pow(1.5 * (1 - c.q / 6.0))).sum();
  }
  v.value = a * std::pow(r, -2.0) + b * std::pow(r, -2.0 - 0.5 * c.q);
  v.verdict = v.value <= c.eps_q ? Verdict::RegularCertified : Verdict::Undecided;

  // Q_{1/2}(0, 1/8) of the rescaled fields is B_{r/2}(x0) × (t0 − r²/8, t0 + r²/8].
  SampleRule inner = c.rule;
  inner.min_spacings = std::max(1, c.rule.min_spacings / 2);
  inner.min_slices = std::max(1, c.rule.min_slices / 4);
  const CylinderSamples in = sample_cylinder(src, {x0, t0 + 0.125 * r * r, 0.5 * r, Variant::Lower}, inner);
  double sup = 0;
  for (const SliceDensity& sd : in.slices)
    if (sd.u2.size() > 0) sup = std::max(sup, std::sqrt(std::max(sd.u2.maxCoeff(), sd.gd2.maxCoeff())));
  v.measured_sup = sup;
  if (v.verdict == Verdict::RegularCertified) {
    v.implied_bound = std::pow(c.eps_q, 2.0 / 9.0) / r;
    v.sup_consistent = sup <= v.implied_bound;
  }
  return v;
}

std::vector<double> h1_radii(const DensitySource& src, const Point&, double t0, const RegularityConfig& c) {
  validate(c);
  std::vector<double> usable;
  std::string last_reason;
  for (double r : candidate_radii(src.extent(), c)) {
    if (r > 0.5 * src.extent() * (1 + 1e-12)) continue;
    if (!inside_window(src, t0 - 0.875 * r * r, t0 + 0.125 * r * r)) continue;
    try {
      src.spacing_for(r, c.rule);
      std::vector<double> t, w;
      src.time_nodes(t0 - 0.875 * r * r, t0 + 0.125 * r * r, c.rule.min_slices, c.rule.slices, t, w);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UnderResolved) throw;
      last_reason = e.what();
      continue;
    }
    usable.push_back(r);
  }
  const std::size_t need = std::size_t(std::max(3, c.m));
  if (usable.size() < need) {
    std::ostringstream os;
    os << "the dissipation detector needs " << need << " resolvable radii, found " << usable.size();
    if (!last_reason.empty()) os << " (" << last_reason << ")";
    throw Error(ErrorCode::UnderResolved, os.str());
  }
  return {usable.end() - c.m, usable.end()};
}

DetectorVerdict h1_detect(const DensitySource& src, const Point& x0, double t0, const RegularityConfig& c) {
  DetectorVerdict v;
  v.detector = "h1";
  v.x0 = x0;
  v.t0 = t0;
  v.radii = h1_radii(src, x0, t0, c);
  v.threshold = c.g_sigma;
  v.threshold2 = c.eps_sigma;
  for (double r : v.radii) {
    const QuantityReport q = quantities(src, {x0, t0, r, Variant::Centered}, {c.sigma}, c.rule);
    v.value = std::max(v.value, q.G[0]);
    v.value2 = std::max(v.value2, q.B);
    v.spacing = q.spacing;
    v.slices = q.slices;
  }
  v.verdict = v.value <= c.g_sigma && v.value2 <= c.eps_sigma ? Verdict::RegularCertified : Verdict::Undecided;
  return v;
}

BootstrapReport bootstrap_eval(const DensitySource& src, const Point& xbar, double tbar, const Point& x0, double t0,
                               const BootstrapConfig& c) {
  require(c.q > 5 && c.q < 6, ErrorCode::InvalidArgument, "q must lie in (5, 6)");
  require(c.k0 >= 1 && c.depth >= 3, ErrorCode::InvalidArgument, "need k0 >= 1 and depth >= 3");
  require(c.C_A > 0 && c.C_B > 0, ErrorCode::InvalidArgument, "constants must be positive");
  Point dx = x0 - xbar;
  const double L = src.extent();
  for (int a = 0; a < 3; ++a) dx[a] -= L * std::round(dx[a] / L);
  require(dx.norm() < 0.5 && t0 > tbar - 0.25 && t0 <= tbar, ErrorCode::InvalidArgument,
          "z0 must lie in Q_{1/2}(zbar)");

  BootstrapReport rep;
  rep.alpha = alpha_q(c.q);
  rep.e3q = e3q(sample_cylinder(src, {xbar, tbar, 1.0, Variant::Lower}), c.q);
  rep.ladder = ladder(src, x0, t0, c.depth);
  rep.pressure_term = rep.ladder.pressure_q1;
  const auto& lv = rep.ladder.levels;
  const int K = int(lv.size());
  const double E = rep.e3q;
  const double tail = std::pow(E, 2.0 / 3.0) + (1.0 + c.k0 * std::exp2(5.0 * c.k0)) * E;
  const double geo = dyadic_limit(rep.alpha);
  for (int n = 2; n <= K; ++n) {
    BootstrapRow row;
    row.n = n;
    if (n + 1 <= K) {
      double mx = 0;
      for (int k = 1; k <= n; ++k) mx = std::max(mx, std::pow(lv[k - 1].L, 1.5));
      row.has_A = true;
      row.R_next = lv[n].R;
      row.rhs_A = mx + rep.pressure_term;
      row.margin_A = c.C_A * row.rhs_A - row.R_next;
      row.empirical_A = safe_ratio(row.R_next, row.rhs_A);
      rep.max_empirical_A = std::max(rep.max_empirical_A, row.empirical_A);
    }
    if (n >= c.k0) {
      double mx = 0;
      for (int k = c.k0; k <= n; ++k) mx = std::max(mx, lv[k - 1].R);
      row.has_B = true;
      row.L_n = lv[n - 1].L;
      row.rhs_B = geo * mx + tail;
      row.margin_B = c.C_B * row.rhs_B - row.L_n;
      row.empirical_B = safe_ratio(row.L_n, row.rhs_B);
      rep.max_empirical_B = std::max(rep.max_empirical_B, row.empirical_B);
    }
    if (row.has_A || row.has_B) rep.rows.push_back(row);
  }
  return rep;
}

DecayReport decay_eval(const DensitySource& src, const Point& x0, double t0, const DecayConfig& c) {
  require(c.q > 5 && c.q <= c.sigma && c.sigma < 6, ErrorCode::InvalidArgument, "need 5 < q <= sigma < 6");
  require(c.g_sigma > 0 && c.c_bar > 0, ErrorCode::InvalidArgument, "constants must be positive");
  for (double g : c.gamma) require(g > 0 && g < 1, ErrorCode::InvalidArgument, "gamma must lie in (0, 1)");
  std::vector<double> rho = c.rho;
  if (rho.empty()) rho.push_back(0.25 * src.extent());
  DecayReport rep;
  rep.alpha = alpha_sigma_q(c.sigma, c.q);
  const std::vector<double> ql{c.q, c.sigma};
  struct Pair {
    QuantityReport big;
    std::vector<QuantityReport> small;
  };
  std::vector<Pair> evals;
  for (double r : rho) {
    Pair p{quantities(src, {x0, t0, r, Variant::Centered}, ql, c.rule), {}};
    for (double g : c.gamma) p.small.push_back(quantities(src, {x0, t0, g * r, Variant::Centered}, ql, c.rule));
    rep.sup_B = std::max(rep.sup_B, p.big.B);
    rep.sup_G = std::max(rep.sup_G, p.big.G_at(c.sigma));
    for (const auto& s : p.small) {
      rep.sup_B = std::max(rep.sup_B, s.B);
      rep.sup_G = std::max(rep.sup_G, s.G_at(c.sigma));
    }
    evals.push_back(std::move(p));
  }
  if (rep.sup_B > 1 || rep.sup_G > c.g_sigma) {
    std::ostringstream os;
    os << "hypotheses fail: sup B = " << rep.sup_B << " (need <= 1), sup G_sigma = " << rep.sup_G << " (need <= "
       << c.g_sigma << ")";
    rep.reason = os.str();
    return rep;
  }
  rep.applicable = true;
  const double a = rep.alpha;
  const double gpow = std::pow(c.g_sigma, 6.0 / (6.0 - c.sigma));
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double M = evals[i].big.M_at(c.q), B = evals[i].big.B;
    double series = 0;
    for (int k = 0; k <= 2; ++k) series += std::pow(M, std::ldexp(1.0, -k)) + std::pow(M, a * std::ldexp(1.0, -k));
    for (std::size_t j = 0; j < c.gamma.size(); ++j) {
      const double g = c.gamma[j];
      DecayRow row;
      row.rho = rho[i];
      row.gamma = g;
      row.lhs = evals[i].small[j].M_at(c.q);
      row.bracket =
          gpow * (std::pow(g, a / 8.0) * (M + std::pow(M, a)) + std::pow(g, -15.0) * std::pow(B, 0.75 * a) * series);
      row.rhs = c.c_bar * row.bracket;
      row.margin = row.rhs - row.lhs;
      row.empirical = safe_ratio(row.lhs, row.bracket);
      rep.max_empirical = std::max(rep.max_empirical, row.empirical);
      rep.rows.push_back(row);
    }
  }
  return rep;
}

ScanReport scan_regularity(const Trajectory& traj, const RegularityConfig& c) {
  validate(c);
  const TrajectorySource src(traj);
  const PeriodicGrid& g = traj.grid();
  const double tau = traj.spacing();
  const double tol = 1e-9 * tau;
  ScanReport rep;
  rep.extent = g.extent();
  rep.resolution = g.resolution();
  rep.config = c;

  std::string reason;
  for (double r : candidate_radii(g.extent(), c)) {
    if (r > 0.5 * g.extent() * (1 + 1e-12)) continue;
    if (r < c.rule.min_spacings * g.spacing() * (1 - 1e-12)) {
      reason = "radius " + std::to_string(r) + " is below " + std::to_string(c.rule.min_spacings) + " grid spacings";
      continue;
    }
    if (r * r < c.rule.min_slices * tau * (1 - 1e-9)) {
      reason = "radius " + std::to_string(r) + " spans fewer than " + std::to_string(c.rule.min_slices) + " slices";
      continue;
    }
    rep.radii.push_back(r);
  }
  const std::size_t need = std::size_t(std::max(3, c.m));
  if (rep.radii.size() < need) {
    std::ostringstream os;
    os << "scan needs " << need << " resolvable radii, found " << rep.radii.size();
    if (!reason.empty()) os << " (" << reason << ")";
    throw Error(ErrorCode::UnderResolved, os.str());
  }
  const double rmax = rep.radii.front();
  std::vector<std::size_t> t_index;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.time(i);
    if (t - 0.875 * rmax * rmax >= traj.t_first() - tol && t + 0.125 * rmax * rmax <= traj.t_last() + tol) {
      t_index.push_back(i);
      rep.times.push_back(t);
    }
  }
  if (rep.times.empty()) {
    std::ostringstream os;
    os << "no slice time admits Q*_" << rmax << " inside [" << traj.t_first() << ", " << traj.t_last() << "]";
    throw Error(ErrorCode::WindowViolation, os.str());
  }

  // Slice ranges [first, last] of each (radius, time) window.
  const std::size_t R = rep.radii.size(), T = rep.times.size(), nodes = rep.nodes();
  std::vector<std::size_t> first(R * T), last(R * T);
  std::size_t lo_all = traj.size(), hi_all = 0;
  for (std::size_t ri = 0; ri < R; ++ri) {
    const double r = rep.radii[ri];
    for (std::size_t ti = 0; ti < T; ++ti) {
      const double t_lo = rep.times[ti] - 0.875 * r * r, t_hi = rep.times[ti] + 0.125 * r * r;
      std::size_t a = traj.size(), b = 0;
      for (std::size_t i = 0; i < traj.size(); ++i) {
        const double t = traj.time(i);
        if (t > t_lo + tol && t <= t_hi + tol) {
          a = std::min(a, i);
          b = std::max(b, i);
        }
      }
      first[ri * T + ti] = a;
      last[ri * T + ti] = b;
      lo_all = std::min(lo_all, a);
      hi_all = std::max(hi_all, b);
    }
  }

  const ModeTable modes(g);
  std::vector<Spectrum> kernels;
  for (double r : rep.radii) {
    Eigen::ArrayXd ball = Eigen::ArrayXd::Zero(Index(nodes));
    for (Index idx = 0; idx < Index(nodes); ++idx)
      if (g.displacement(Point::Zero(), g.node(idx)).norm() < r) ball[idx] = 1.0;
    kernels.push_back(forward(g, ball));
  }

  std::vector<double> e3(R * T * nodes, 0.0), gs(R * T * nodes, 0.0), bb(R * T * nodes, 0.0);
  const double q = c.q, sigma = c.sigma, hv = g.cell_volume();
  for (std::size_t i = lo_all; i <= hi_all; ++i) {
    const SliceDensity& sd = src.slice_density(i);
    const Eigen::ArrayXd cube = sd.u2.pow(1.5) + sd.gd2.pow(1.5);
    const Spectrum fa = forward(g, cube + sd.p.abs().pow(1.5));
    const Spectrum fb = forward(g, sd.d2.pow(0.5 * q) * sd.gd2.pow(1.5 * (1 - q / 6.0)));
    const Spectrum fg = forward(g, sd.d2.pow(0.5 * sigma) * cube.pow(1 - sigma / 6.0));
    const Spectrum fd = forward(g, sd.diss);
    for (std::size_t ri = 0; ri < R; ++ri) {
      std::vector<std::size_t> hits;
      for (std::size_t ti = 0; ti < T; ++ti)
        if (first[ri * T + ti] <= i && i <= last[ri * T + ti]) hits.push_back(ti);
      if (hits.empty()) continue;
      const double r = rep.radii[ri];
      const auto conv = [&](const Spectrum& f) { return inverse(Spectrum{g, f.coeffs * kernels[ri].coeffs}); };
      const Eigen::ArrayXd ca = conv(fa), cb = conv(fb), cg = conv(fg), cd = conv(fd);
      const double w = tau * hv;
      const double sa = w * std::pow(r, -2.0), sb = w * std::pow(r, -2.0 - 0.5 * q);
      const double sg = w * std::pow(r, -2.0 - 0.5 * sigma), sdd = w / r;
      for (std::size_t ti : hits) {
        const std::size_t base = rep.slot(ri, ti, 0);
        for (std::size_t n = 0; n < nodes; ++n) {
          e3[base + n] += sa * ca[Index(n)] + sb * cb[Index(n)];
          gs[base + n] += sg * cg[Index(n)];
          bb[base + n] += sdd * cd[Index(n)];
        }
      }
    }
  }
  // Convolution round-off can leave tiny negative sums of non-negative densities.
  const auto store = [](const std::vector<double>& v, std::vector<float>& out) {
    out.resize(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = float(std::max(0.0, v[k]));
  };
  store(e3, rep.e3q);
  store(gs, rep.g_sigma);
  store(bb, rep.b);
  return rep;
}

ScanClassification classify(const ScanReport& scan, double eps_q, double g_sigma, double eps_sigma, int m) {
  const std::size_t R = scan.radii.size(), T = scan.times.size(), nodes = scan.nodes();
  require(m >= 1 && std::size_t(m) <= R, ErrorCode::InvalidArgument, "m exceeds the number of scanned radii");
  ScanClassification out;
  out.l3.assign(T * nodes, 0);
  out.h1.assign(T * nodes, 0);
  for (std::size_t ti = 0; ti < T; ++ti)
    for (std::size_t n = 0; n < nodes; ++n) {
      bool l3 = false;
      for (std::size_t ri = 0; ri < R && !l3; ++ri) l3 = scan.e3q[scan.slot(ri, ti, n)] <= eps_q;
      double G = 0, B = 0;
      for (std::size_t ri = R - std::size_t(m); ri < R; ++ri) {
        G = std::max(G, double(scan.g_sigma[scan.slot(ri, ti, n)]));
        B = std::max(B, double(scan.b[scan.slot(ri, ti, n)]));
      }
      const bool h1 = G <= g_sigma && B <= eps_sigma;
      const std::size_t at = ti * nodes + n;
      out.l3[at] = l3;
      out.h1[at] = h1;
      out.l3_count += l3;
      out.h1_count += h1;
      if (l3 || h1) continue;
      double seed = scan.radii.back();
      for (std::size_t ri = R; ri-- > 0;) {
        const std::size_t s = scan.slot(ri, ti, n);
        if (scan.e3q[s] > eps_q && (scan.g_sigma[s] > g_sigma || scan.b[s] > eps_sigma)) {
          seed = scan.radii[ri];
          break;
        }
      }
      out.candidates.push_back(at);
      out.seed_radius.push_back(seed);
    }
  return out;
}

}  // namespace prlab

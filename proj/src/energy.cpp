#include "prlab/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "prlab/model.hpp"
#include "prlab/parallel.hpp"

namespace prlab {

GlobalEnergyRecord global_energy(const State& s) { return global_energy(s, grad_T(s.u), grad_T(s.d), laplacian(s.d)); }

GlobalEnergyRecord global_energy(const State& s, const MatrixField& grad_u, const MatrixField& grad_d,
                                 const VectorField& lap_d) {
  const PeriodicGrid& g = s.grid();
  const Eigen::ArrayXd e =
      0.5 * norm_squared(s.u).values() + 0.5 * norm_squared(grad_d).values() + potential_F(s.d).values();
  const Eigen::ArrayXd diss = norm_squared(grad_u).values() + norm_squared(lap_d - force_f(s.d)).values();
  GlobalEnergyRecord r;
  r.t = s.t;
  r.E = g.cell_volume() * e.sum();
  r.D = g.cell_volume() * diss.sum();
  return r;
}

double Bump::value(double s) {
  const double w = 1.0 - s * s;
  return w <= 0.0 ? 0.0 : std::exp(1.0 - 1.0 / w);
}

double Bump::d1(double s) {
  const double w = 1.0 - s * s;
  if (w <= 0.0) return 0.0;
  return -2.0 * s * value(s) / (w * w);
}

double Bump::d2(double s) {
  const double w = 1.0 - s * s;
  if (w <= 0.0) return 0.0;
  const double b = value(s), w2 = w * w;
  return -2.0 * b / w2 + 4.0 * s * s * b / (w2 * w2) - 8.0 * s * s * b / (w2 * w);
}

double Bump::d1_over_s(double s) {
  const double w = 1.0 - s * s;
  if (w <= 0.0) return 0.0;
  return -2.0 * value(s) / (w * w);
}

TestFunction::TestFunction(const Point& center, double radius, double t_lo, double t_hi)
    : center_(center), radius_(radius), t_lo_(t_lo), t_hi_(t_hi) {
  require(std::isfinite(radius) && radius > 0, ErrorCode::InvalidArgument, "test function radius must be positive");
  require(std::isfinite(t_lo) && std::isfinite(t_hi) && t_hi > t_lo, ErrorCode::InvalidArgument,
          "test function needs t_lo < t_hi");
}

double TestFunction::eta(double t) const { return Bump::value((2.0 * t - t_lo_ - t_hi_) / (t_hi_ - t_lo_)); }

double TestFunction::eta_t(double t) const {
  return Bump::d1((2.0 * t - t_lo_ - t_hi_) / (t_hi_ - t_lo_)) * 2.0 / (t_hi_ - t_lo_);
}

double TestFunction::phi(const PeriodicGrid& g, const Point& x, double t) const {
  return Bump::value(g.distance(center_, x) / radius_) * eta(t);
}

double TestFunction::phi_t(const PeriodicGrid& g, const Point& x, double t) const {
  return Bump::value(g.distance(center_, x) / radius_) * eta_t(t);
}

Point TestFunction::grad_phi(const PeriodicGrid& g, const Point& x, double t) const {
  const Point r = g.displacement(center_, x);
  return Bump::d1_over_s(r.norm() / radius_) / (radius_ * radius_) * eta(t) * r;
}

double TestFunction::lap_phi(const PeriodicGrid& g, const Point& x, double t) const {
  const double s = g.distance(center_, x) / radius_;
  return (Bump::d2(s) + 2.0 * Bump::d1_over_s(s)) / (radius_ * radius_) * eta(t);
}

TestFunction::Slice TestFunction::evaluate(const PeriodicGrid& g, double t) const {
  Slice out{ScalarField(g), ScalarField(g), ScalarField(g), VectorField(g)};
  const double e = eta(t), et = eta_t(t), r2 = radius_ * radius_;
  if (e == 0.0 && et == 0.0) return out;
  for (Index n : ball_nodes(g, center_, std::min(radius_, g.extent() / 2))) {
    const Point r = g.displacement(center_, g.node(n));
    const double s = r.norm() / radius_;
    const double b = Bump::value(s);
    const double bs = Bump::d1_over_s(s);
    out.phi(n) = b * e;
    out.phi_t(n) = b * et;
    out.lap_phi(n) = (Bump::d2(s) + 2.0 * bs) / r2 * e;
    for (int a = 0; a < 3; ++a) out.grad_phi(n, a) = bs / r2 * e * r[a];
  }
  return out;
}

double TestFunction::derivative_check(const PeriodicGrid& g, int samples, unsigned seed, double delta) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0), frac(0.0, 1.0);
  const double hx = delta * radius_;
  const double ht = delta * (t_hi_ - t_lo_);
  // Reference magnitudes of each derivative.
  const double scale_x = 1.0 / radius_, scale_xx = 1.0 / (radius_ * radius_), scale_t = 1.0 / (t_hi_ - t_lo_);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    Point dir(unit(rng), unit(rng), unit(rng));
    if (dir.norm() > 1.0 || dir.norm() < 1e-3) {
      --s;
      continue;
    }
    const Point x = center_ + 0.95 * radius_ * dir;
    const double t = t_lo_ + (0.025 + 0.95 * frac(rng)) * (t_hi_ - t_lo_);
    const double p0 = phi(g, x, t);
    const double ft = (phi(g, x, t + ht) - phi(g, x, t - ht)) / (2.0 * ht);
    worst = std::max(worst, std::abs(ft - phi_t(g, x, t)) / scale_t);
    const Point grad = grad_phi(g, x, t);
    double lap = 0.0;
    for (int a = 0; a < 3; ++a) {
      Point e = Point::Zero();
      e[a] = hx;
      const double fp = phi(g, x + e, t), fm = phi(g, x - e, t);
      worst = std::max(worst, std::abs((fp - fm) / (2.0 * hx) - grad[a]) / scale_x);
      lap += (fp - 2.0 * p0 + fm) / (hx * hx);
    }
    worst = std::max(worst, std::abs(lap - lap_phi(g, x, t)) / scale_xx);
  }
  return worst;
}

void TestFunction::check_support(const PeriodicGrid& g, double t_first, double t_last) const {
  if (radius_ > g.extent() / 2) {
    std::ostringstream os;
    os << "test function radius " << radius_ << " exceeds half the box side " << g.extent() / 2;
    throw Error(ErrorCode::SupportViolation, os.str());
  }
  if (t_lo_ < t_first || t_hi_ > t_last) {
    std::ostringstream os;
    os << "test function time support [" << t_lo_ << ", " << t_hi_ << "] leaves the trajectory window [" << t_first
       << ", " << t_last << "]";
    throw Error(ErrorCode::SupportViolation, os.str());
  }
}

namespace {

// w_j = sum_k d_k d_k,j
Eigen::ArrayX3d director_weight(const VectorField& d, const MatrixField& gd) {
  Eigen::ArrayX3d w = Eigen::ArrayX3d::Zero(d.values().rows(), 3);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) w.col(j) += d.component(k) * gd.component(mat(k, j));
  return w;
}

}  // namespace

ScalarField rf_density(const VectorField& d, const MatrixField& gd, const ScalarField& phi) {
  require(d.grid() == gd.grid() && d.grid() == phi.grid(), ErrorCode::GridMismatch, "rf_density: grid mismatch");
  const Eigen::ArrayXd d2 = norm_squared(d).values();
  const Eigen::ArrayXd g2 = norm_squared(gd).values();
  const Eigen::ArrayXd w2 = director_weight(d, gd).square().rowwise().sum();
  return ScalarField(d.grid(), 4.0 * phi.values() * (2.0 * w2 + d2 * g2 - g2));
}

ScalarField rf_density_direct(const VectorField& d, const MatrixField& gd, const ScalarField& phi) {
  require(d.grid() == gd.grid() && d.grid() == phi.grid(), ErrorCode::GridMismatch, "rf_density: grid mismatch");
  return multiply(phi, frobenius(grad_T(force_f(d)), gd));
}

ScalarField rf_bound_density(const VectorField& d, const MatrixField& gd, const ScalarField& phi) {
  const Eigen::ArrayXd g2 = norm_squared(gd).values();
  return ScalarField(d.grid(), (12.0 * norm_squared(d).values() * g2 + 4.0 * g2) * phi.values());
}

RfTerm rf_term(const VectorField& d, const ScalarField& phi) {
  check_finite(phi, "rf_term phi");
  require(phi.values().minCoeff() >= 0.0, ErrorCode::InvalidArgument, "rf_term needs a nonnegative test function");
  const MatrixField gd = grad_T(d);
  const double dv = d.grid().cell_volume();
  return {dv * rf_density(d, gd, phi).values().sum(), dv * rf_bound_density(d, gd, phi).values().sum()};
}

std::vector<double> time_derivative(const std::vector<double>& v, double tau) {
  const std::size_t n = v.size();
  require(n >= 3, ErrorCode::UnderResolved, "time derivative needs at least 3 samples");
  require(tau > 0, ErrorCode::InvalidArgument, "time derivative needs a positive spacing");
  std::vector<double> out(n);
  out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * tau);
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (v[i + 1] - v[i - 1]) / (2.0 * tau);
  out[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * tau);
  return out;
}

LocalEnergyAudit local_energy_audit(const Trajectory& traj, const TestFunction& phi) {
  require(traj.size() >= 3, ErrorCode::UnderResolved, "local energy audit needs at least 3 slices");
  const PeriodicGrid& g = traj.grid();
  phi.check_support(g, traj.t_first(), traj.t_last());
  const double dv = g.cell_volume();

  LocalEnergyAudit audit;
  audit.records.resize(traj.size());
  parallel_for(traj.size(), [&](std::size_t i) {
    const State& s = traj[i];
    const TestFunction::Slice ph = phi.evaluate(g, s.t);
    const MatrixField gd = grad_T(s.d);
    const Eigen::ArrayXd e = 0.5 * norm_squared(s.u).values() + 0.5 * norm_squared(gd).values();
    Eigen::ArrayXd hess2 = Eigen::ArrayXd::Zero(g.node_count());
    for (int c = 0; c < 3; ++c) hess2 += norm_squared(hessian(component(s.d, c))).values();
    const Eigen::ArrayXd diss = norm_squared(grad_T(s.u)).values() + hess2;
    const Eigen::ArrayXd heat_w = ph.phi_t.values() + ph.lap_phi.values();
    const Eigen::ArrayXd u_gphi = dot(s.u, ph.grad_phi).values();
    // [(u·∇)d]·[(∇φ·∇)d]
    const Eigen::ArrayXd st = dot(transport(gd, s.u), transport(gd, ph.grad_phi)).values();

    LocalEnergyRecord& r = audit.records[i];
    r.t = s.t;
    r.lhs_density = dv * (e * ph.phi.values()).sum();
    r.dissipation = dv * (diss * ph.phi.values()).sum();
    r.heat = dv * (e * heat_w).sum();
    r.heat_abs = dv * (e * heat_w.abs()).sum();
    r.flux = dv * ((e + s.p.values()) * u_gphi).sum();
    r.stress = dv * st.sum();
    r.remainder = dv * rf_density(s.d, gd, ph.phi).values().sum();
    r.d_term = dv * (norm_squared(s.d).values() * norm_squared(gd).values() * ph.phi.values()).sum();
  });

  std::vector<double> a(traj.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = audit.records[i].lhs_density;
  const std::vector<double> da = time_derivative(a, traj.spacing());
  for (std::size_t i = 0; i < a.size(); ++i) {
    LocalEnergyRecord& r = audit.records[i];
    r.ddt = da[i];
    r.residual = r.ddt + r.dissipation - (r.heat + r.flux + r.stress - r.remainder);
    audit.max_residual = std::max(audit.max_residual, std::abs(r.residual));
    audit.max_dissipation = std::max(audit.max_dissipation, r.dissipation);
  }
  return audit;
}

GronwallCheck gronwall_form(const std::vector<LocalEnergyRecord>& records, double T, double slack) {
  require(T >= 0 && std::isfinite(T), ErrorCode::InvalidArgument, "gronwall_form needs a finite T >= 0");
  GronwallCheck out;
  out.T = T;
  out.C_T = 8.0 * T * std::exp(8.0 * T) + 1.0;
  out.slack = slack;
  out.rough_holds = out.absorbed_holds = out.integrated_holds = true;
  if (records.empty()) return out;

  const double growth = 8.0 * std::exp(8.0 * T);
  double int_c = 0.0, int_b = 0.0, prev_c = 0.0, prev_b = 0.0;
  out.margin_rough = out.margin_absorbed = out.margin_integrated = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const LocalEnergyRecord& r = records[i];
    const double c = r.heat_abs + 12.0 * r.d_term + std::abs(r.flux + r.stress);
    if (i > 0) {
      const double dt = r.t - records[i - 1].t;
      int_c += 0.5 * dt * (c + prev_c);
      int_b += 0.5 * dt * (r.dissipation + prev_b);
    }
    prev_c = c;
    prev_b = r.dissipation;
    const double lhs = r.ddt + r.dissipation;

    const double rhs_rough = 8.0 * r.lhs_density + c;
    const double m1 = rhs_rough - lhs;
    out.margin_rough = std::min(out.margin_rough, m1);
    if (m1 < -slack * std::max(1.0, std::abs(rhs_rough))) out.rough_holds = false;

    const double rhs_abs = c + growth * int_c;
    const double m2 = rhs_abs - lhs;
    out.margin_absorbed = std::min(out.margin_absorbed, m2);
    if (m2 < -slack * std::max(1.0, std::abs(rhs_abs))) out.absorbed_holds = false;

    // Integrated form A(t) + ∫B ≤ C_T ∫C, measured from the first record.
    const double rhs_int = out.C_T * int_c;
    const double m3 = rhs_int - (r.lhs_density - records.front().lhs_density + int_b);
    out.margin_integrated = std::min(out.margin_integrated, m3);
    if (m3 < -slack * std::max(1.0, std::abs(rhs_int))) out.integrated_holds = false;
  }
  return out;
}

namespace {

// Trapezoid weights over the slice times; they sum to t_last − t_first.
std::vector<double> trapezoid_weights(const Trajectory& traj) {
  std::vector<double> w(traj.size(), 0.0);
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double dt = traj.time(i) - traj.time(i - 1);
    w[i - 1] += 0.5 * dt;
    w[i] += 0.5 * dt;
  }
  return w;
}

}  // namespace

HeuristicChainReport heuristic_chain_audit(const Trajectory& traj) {
  require(!traj.empty(), ErrorCode::InvalidArgument, "heuristic chain audit needs a nonempty trajectory");
  const PeriodicGrid& g = traj.grid();
  const double dv = g.cell_volume();
  const double V = g.volume();
  const double T = traj.t_last() - traj.t_first();
  const std::vector<double> w = trapezoid_weights(traj);

  struct SliceNorms {
    double d4 = 0, d6 = 0, F1 = 0, F32 = 0, f2 = 0, lap2 = 0, lapf2 = 0;
    double u2 = 0, u6 = 0, u103 = 0, gd2 = 0, gd6 = 0, gd103 = 0;
  };
  std::vector<SliceNorms> sn(traj.size());
  parallel_for(traj.size(), [&](std::size_t i) {
    const State& s = traj[i];
    const Eigen::ArrayXd dd = norm_squared(s.d).values();
    const Eigen::ArrayXd F = potential_F(s.d).values();
    const VectorField f = force_f(s.d);
    const VectorField lap = laplacian(s.d);
    const Eigen::ArrayXd uu = norm_squared(s.u).values();
    const Eigen::ArrayXd gg = norm_squared(grad_T(s.d)).values();
    SliceNorms& n = sn[i];
    n.d4 = dv * dd.square().sum();
    n.d6 = dv * dd.cube().sum();
    n.F1 = dv * F.sum();
    n.F32 = dv * F.pow(1.5).sum();
    n.f2 = dv * norm_squared(f).values().sum();
    n.lap2 = dv * norm_squared(lap).values().sum();
    n.lapf2 = dv * norm_squared(lap - f).values().sum();
    n.u2 = dv * uu.sum();
    n.u6 = dv * uu.cube().sum();
    n.u103 = dv * uu.pow(5.0 / 3.0).sum();
    n.gd2 = dv * gg.sum();
    n.gd6 = dv * gg.cube().sum();
    n.gd103 = dv * gg.pow(5.0 / 3.0).sum();
  });

  auto sup = [&](auto get) {
    double m = 0.0;
    for (const auto& n : sn) m = std::max(m, get(n));
    return m;
  };
  auto time_int = [&](auto get) {
    double s = 0.0;
    for (std::size_t i = 0; i < sn.size(); ++i) s += w[i] * get(sn[i]);
    return s;
  };

  HeuristicChainReport rep;
  auto add = [&rep](const std::string& name, double lhs, double rhs) { rep.lines.push_back({name, lhs, rhs, rhs - lhs}); };

  // ‖d‖²_{L∞L⁴} ≤ ‖F‖^{1/2}_{L∞L¹} + ‖1‖_{L∞L²}
  add("d_L4_squared", std::sqrt(sup([](const SliceNorms& n) { return n.d4; })),
      std::sqrt(sup([](const SliceNorms& n) { return n.F1; })) + std::sqrt(V));
  // ‖F‖^{1/2}_{L∞L^{3/2}} ≤ ‖d‖²_{L∞L⁶} + ‖1‖_{L∞L³}
  const double F32 = std::pow(sup([](const SliceNorms& n) { return n.F32; }), 2.0 / 3.0);
  const double d6sq = std::pow(sup([](const SliceNorms& n) { return n.d6; }), 1.0 / 3.0);
  add("F_L32_sqrt", std::sqrt(F32), d6sq + std::cbrt(V));
  // ‖f‖²_{L∞L²} ≤ 16‖F‖_{L∞L^{3/2}}‖d‖²_{L∞L⁶}
  const double f2 = sup([](const SliceNorms& n) { return n.f2; });
  add("f_L2_squared", f2, 16.0 * F32 * d6sq);
  // ‖Δd‖_{L²L²} ≤ ‖Δd − f‖_{L²L²} + T^{1/2}‖f‖_{L∞L²}
  add("laplacian_d_L2", std::sqrt(time_int([](const SliceNorms& n) { return n.lap2; })),
      std::sqrt(time_int([](const SliceNorms& n) { return n.lapf2; })) + std::sqrt(T * f2));
  // ‖v‖_{L^{10/3}} ≤ ‖v‖^{2/5}_{L∞L²}‖v‖^{3/5}_{L²L⁶} for v = u and ∇d
  add("u_L10_3", std::pow(time_int([](const SliceNorms& n) { return n.u103; }), 0.3),
      std::pow(sup([](const SliceNorms& n) { return n.u2; }), 0.2) *
          std::pow(time_int([](const SliceNorms& n) { return std::cbrt(n.u6); }), 0.3));
  add("grad_d_L10_3", std::pow(time_int([](const SliceNorms& n) { return n.gd103; }), 0.3),
      std::pow(sup([](const SliceNorms& n) { return n.gd2; }), 0.2) *
          std::pow(time_int([](const SliceNorms& n) { return std::cbrt(n.gd6); }), 0.3));

  rep.min_margin = std::numeric_limits<double>::infinity();
  for (const auto& l : rep.lines) rep.min_margin = std::min(rep.min_margin, l.margin);
  return rep;
}

}  // namespace prlab

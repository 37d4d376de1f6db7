#include "prlab/solver.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "prlab/energy.hpp"
#include "prlab/model.hpp"
#include "prlab/spectral.hpp"

namespace prlab {

namespace {

using Coeffs = Eigen::ArrayXcd;
using Vec3 = std::array<Coeffs, 3>;

// Per-mode wavevector components as flat arrays.
struct ModeArrays {
  explicit ModeArrays(const PeriodicGrid& g) : table(g) {
    const Index m = table.size();
    for (int a = 0; a < 3; ++a) k_odd[a].resize(m);
    k2.resize(m);
    k2_odd.resize(m);
    keep.resize(m);
    for (Index i = 0; i < m; ++i) {
      const Eigen::Vector3d ko = table.wavevector_odd(i);
      for (int a = 0; a < 3; ++a) k_odd[a][i] = ko[a];
      k2[i] = table.k_squared(i);
      k2_odd[i] = ko.squaredNorm();
      keep[i] = table.aliased(i) ? 0.0 : 1.0;
    }
  }
  ModeTable table;
  std::array<Eigen::ArrayXd, 3> k_odd;
  Eigen::ArrayXd k2, k2_odd, keep;
};

const Complex I(0.0, 1.0);

void project_in_place(Vec3& v, const ModeArrays& m) {
  const Index n = m.k2.size();
  for (Index i = 0; i < n; ++i) {
    if (m.k2_odd[i] == 0.0) continue;
    const Complex kv = m.k_odd[0][i] * v[0][i] + m.k_odd[1][i] * v[1][i] + m.k_odd[2][i] * v[2][i];
    const Complex s = kv / m.k2_odd[i];
    for (int a = 0; a < 3; ++a) v[a][i] -= m.k_odd[a][i] * s;
  }
}

Vec3 forward3(const VectorField& v) {
  Vec3 out;
  for (int a = 0; a < 3; ++a) out[a] = forward(v.grid(), v.component(a)).coeffs;
  return out;
}

VectorField inverse3(const PeriodicGrid& g, const Vec3& v) {
  VectorField out(g);
  for (int a = 0; a < 3; ++a) out.component(a) = inverse(Spectrum{g, v[a]});
  return out;
}

// Spectral coefficients of p from those of J (six independent entries, i <= j).
Coeffs pressure_coeffs(const std::array<Coeffs, 9>& Jh, const ModeArrays& m) {
  const Index n = m.k2.size();
  Coeffs p = Coeffs::Zero(n);
  for (Index i = 0; i < n; ++i) {
    if (m.k2[i] == 0.0) continue;
    Complex s = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) s += m.k_odd[a][i] * m.k_odd[b][i] * Jh[mat(a, b)][i];
    p[i] = -s / m.k2[i];
  }
  return p;
}

class Integrator {
 public:
  Integrator(const State& s, double dt) : g_(s.grid()), modes_(g_), dt_(dt) {
    decay_ = (-modes_.k2 * dt).exp();
    uh_ = forward3(s.u);
    dh_ = forward3(s.d);
  }

  void advance() {
    Vec3 nu0, nd0;
    nonlinear(uh_, dh_, nu0, nd0);
    Vec3 u1, d1;
    for (int a = 0; a < 3; ++a) {
      u1[a] = decay_ * (uh_[a] + dt_ * nu0[a]);
      d1[a] = decay_ * (dh_[a] + dt_ * nd0[a]);
    }
    project_in_place(u1, modes_);
    Vec3 nu1, nd1;
    nonlinear(u1, d1, nu1, nd1);
    for (int a = 0; a < 3; ++a) {
      uh_[a] = decay_ * uh_[a] + 0.5 * dt_ * (decay_ * nu0[a] + nu1[a]);
      dh_[a] = decay_ * dh_[a] + 0.5 * dt_ * (decay_ * nd0[a] + nd1[a]);
    }
    project_in_place(uh_, modes_);
  }

  bool finite() const {
    for (int a = 0; a < 3; ++a)
      if (!uh_[a].allFinite() || !dh_[a].allFinite()) return false;
    return true;
  }

  VectorField velocity() const { return inverse3(g_, uh_); }

  /// The current state, given its already inverted velocity; fills `energy` when non-null.
  State state(double t, VectorField u, GlobalEnergyRecord* energy = nullptr) const {
    VectorField d = inverse3(g_, dh_);
    const MatrixField gd = gradient_of(dh_);
    const MatrixField J = stress(u, gd);
    std::array<Coeffs, 9> Jh;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        Jh[mat(i, j)] = forward(g_, J.component(mat(i, j))).coeffs;
        if (j != i) Jh[mat(j, i)] = Jh[mat(i, j)];
      }
    ScalarField p(g_, inverse(Spectrum{g_, pressure_coeffs(Jh, modes_)}));
    State s(std::move(u), std::move(d), std::move(p), t);
    if (energy) {
      Vec3 lap;
      for (int a = 0; a < 3; ++a) lap[a] = -modes_.k2 * dh_[a];
      *energy = global_energy(s, gradient_of(uh_), gd, inverse3(g_, lap));
    }
    return s;
  }

 private:
  MatrixField gradient_of(const Vec3& vh) const {
    MatrixField G(g_);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) G.component(mat(i, j)) = inverse(Spectrum{g_, (I * modes_.k_odd[j]) * vh[i]});
    return G;
  }

  void nonlinear(const Vec3& uh, const Vec3& dh, Vec3& nu, Vec3& nd) const {
    const VectorField u = inverse3(g_, uh);
    const VectorField d = inverse3(g_, dh);
    const MatrixField gd = gradient_of(dh);

    const MatrixField J = stress(u, gd);
    std::array<Coeffs, 9> Jh;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        Jh[mat(i, j)] = forward(g_, J.component(mat(i, j))).coeffs * modes_.keep;
        if (j != i) Jh[mat(j, i)] = Jh[mat(i, j)];
      }
    for (int i = 0; i < 3; ++i) {
      nu[i] = Coeffs::Zero(modes_.k2.size());
      for (int j = 0; j < 3; ++j) nu[i] -= (I * modes_.k_odd[j]) * Jh[mat(i, j)];
    }
    project_in_place(nu, modes_);

    const VectorField rate = -(transport(gd, u) + force_f(d));
    for (int a = 0; a < 3; ++a) nd[a] = forward(g_, rate.component(a)).coeffs * modes_.keep;
  }

  PeriodicGrid g_;
  ModeArrays modes_;
  double dt_;
  Eigen::ArrayXd decay_;
  Vec3 uh_, dh_;
};

BlowUpReport blow_up_report(const State& last, double t_failed) {
  BlowUpReport r;
  r.t_last_valid = last.t;
  r.t_failed = t_failed;
  const Eigen::ArrayXd a = norm_squared(last.u).values() + norm_squared(grad_T(last.d)).values();
  Index where = 0;
  a.maxCoeff(&where);
  r.location = last.grid().node(where);
  r.radius = 4.0 * last.grid().spacing();
  std::ostringstream os;
  os << "non-finite or overflowing data after t = " << last.t << "; candidate singularity near ("
     << r.location.transpose() << ")";
  r.message = os.str();
  return r;
}

}  // namespace

void validate(const SolverConfig& c) {
  require(std::isfinite(c.dt) && c.dt > 0, ErrorCode::InvalidArgument, "solver dt must be positive");
  require(std::isfinite(c.t_end) && c.t_end >= 0, ErrorCode::InvalidArgument, "solver t_end must be >= 0");
  require(c.output_stride >= 1, ErrorCode::InvalidArgument, "output stride must be >= 1");
  require(c.energy_stride >= 0, ErrorCode::InvalidArgument, "energy stride must be >= 0");
  require(c.cfl_safety > 0, ErrorCode::InvalidArgument, "CFL safety factor must be positive");
  PeriodicGrid(c.extent, c.resolution);
}

double cfl_limit(const State& s, double safety) {
  const double h = s.grid().spacing();
  const double umax = std::sqrt(norm_squared(s.u).values().maxCoeff());
  const double advective = umax > 0 ? h / umax : std::numeric_limits<double>::infinity();
  return safety * std::min(advective, h * h / 6.0);
}

VectorField leray_project(const VectorField& v) {
  check_finite(v, "leray_project");
  const ModeArrays m(v.grid());
  Vec3 vh = forward3(v);
  project_in_place(vh, m);
  return inverse3(v.grid(), vh);
}

ScalarField pressure_from_stress(const MatrixField& J) {
  check_finite(J, "pressure_from_stress");
  const ModeArrays m(J.grid());
  std::array<Coeffs, 9> Jh;
  for (int c = 0; c < 9; ++c) Jh[c] = forward(J.grid(), J.component(c)).coeffs;
  return ScalarField(J.grid(), inverse(Spectrum{J.grid(), pressure_coeffs(Jh, m)}));
}

ScalarField pressure_solve(const VectorField& u, const VectorField& d) { return pressure_from_stress(stress(u, d)); }

State step(const State& s, double dt, double cfl_safety) {
  const double limit = cfl_limit(s, cfl_safety);
  if (!(dt <= limit)) {
    std::ostringstream os;
    os << "time step " << dt << " exceeds the CFL limit; suggested dt = " << limit;
    throw Error(ErrorCode::CflViolation, os.str());
  }
  Integrator it(s, dt);
  it.advance();
  if (!it.finite()) {
    throw Error(ErrorCode::BlowUp, blow_up_report(s, s.t + dt).message);
  }
  return it.state(s.t + dt, it.velocity());
}

Trajectory simulate(const SolverConfig& config, const State& initial) {
  validate(config);
  const PeriodicGrid g(config.extent, config.resolution);
  require(initial.grid() == g, ErrorCode::GridMismatch, "initial state grid does not match the solver config");
  check_finite(initial.u, "initial u");
  check_finite(initial.d, "initial d");
  const double grad_scale = grad_T(initial.u).max_abs();
  require(divergence(initial.u).max_abs() <= 1e-8 * std::max(grad_scale, 1e-300) || grad_scale == 0.0,
          ErrorCode::InvalidArgument, "initial velocity is not divergence free");

  RunMetadata meta;
  meta.dt = config.dt;
  meta.resolution = config.resolution;
  meta.extent = config.extent;
  meta.t_end = config.t_end;
  meta.output_stride = config.output_stride;
  meta.energy_stride = config.energy_stride == 0 ? config.output_stride : config.energy_stride;
  meta.cfl_safety = config.cfl_safety;
  Trajectory traj(g, meta);

  const long steps = std::lround(config.t_end / config.dt);
  State current(initial.u, initial.d, pressure_solve(initial.u, initial.d), initial.t);
  traj.append(current);
  traj.energy.push_back(global_energy(current));

  Integrator it(current, config.dt);
  double umax = std::sqrt(norm_squared(current.u).values().maxCoeff());
  const double h = g.spacing();
  for (long n = 1; n <= steps; ++n) {
    const double limit = config.cfl_safety * std::min(umax > 0 ? h / umax : std::numeric_limits<double>::infinity(), h * h / 6.0);
    if (!(config.dt <= limit)) {
      std::ostringstream os;
      os << "time step " << config.dt << " exceeds the CFL limit at t = " << initial.t + (n - 1) * config.dt
         << "; suggested dt = " << limit;
      throw Error(ErrorCode::CflViolation, os.str());
    }
    it.advance();
    const double t = initial.t + n * config.dt;
    VectorField u = it.velocity();
    umax = std::sqrt(norm_squared(u).values().maxCoeff());
    if (!it.finite() || !std::isfinite(umax) || umax > 1e100) {
      traj.failure = blow_up_report(current, t);
      return traj;
    }
    const bool out = n % config.output_stride == 0;
    const bool log = n % meta.energy_stride == 0;
    if (out || log) {
      GlobalEnergyRecord rec;
      current = it.state(t, std::move(u), log ? &rec : nullptr);
      if (out) traj.append(current);
      if (log) traj.energy.push_back(rec);
    }
  }
  return traj;
}

void Trajectory::append(State s) {
  require(s.grid() == grid_, ErrorCode::GridMismatch, "trajectory slices must share one grid");
  if (!states_.empty()) {
    require(s.t > states_.back().t, ErrorCode::InvalidArgument, "trajectory times must increase strictly");
    if (states_.size() >= 2) {
      const double tau = states_[1].t - states_[0].t;
      const double gap = s.t - states_.back().t;
      require(std::abs(gap - tau) <= 1e-9 * std::max(1.0, tau), ErrorCode::InvalidArgument,
              "trajectory times must be uniformly spaced");
    }
  }
  states_.push_back(std::move(s));
}

}  // namespace prlab

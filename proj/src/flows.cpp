#include "prlab/flows.hpp"

#include <cmath>
#include <optional>
#include <random>

#include "prlab/parallel.hpp"
#include "prlab/solver.hpp"

namespace prlab {

namespace {

// Hermitian-symmetric random coefficients on |m_i| <= K with the zero mode left empty.
TrigPoly random_poly(double extent, int K, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  TrigPoly t(extent, K);
  for (int mz = -K; mz <= K; ++mz)
    for (int my = -K; my <= K; ++my)
      for (int mx = -K; mx <= K; ++mx) {
        // Lexicographically positive half.
        const bool positive = mz > 0 || (mz == 0 && (my > 0 || (my == 0 && mx > 0)));
        if (!positive) continue;
        const double re = normal(rng), im = normal(rng);
        t.coeff(mx, my, mz) = Complex(re, im);
        t.coeff(-mx, -my, -mz) = Complex(re, -im);
      }
  return t;
}

double max_norm(const Eigen::ArrayXXd& v) {
  return v.size() ? v.square().rowwise().sum().sqrt().maxCoeff() : 0.0;
}

template <int C>
Field<C> scaled_to(Field<C> f, double amplitude) {
  const double m = max_norm(f.values());
  if (m > 0) f *= amplitude / m;
  return f;
}

double power(const TrigPoly& t) {
  double s = 0;
  const int K = t.order();
  for (int mz = -K; mz <= K; ++mz)
    for (int my = -K; my <= K; ++my)
      for (int mx = -K; mx <= K; ++mx) s += std::norm(t.coeff(mx, my, mz));
  return s;
}

}  // namespace

VectorField taylor_green(const PeriodicGrid& g, double amplitude) {
  const double k = 2.0 * M_PI / g.extent();
  return sample_vector(g, [&](const Point& x) {
    return Eigen::Vector3d(amplitude * std::sin(k * x[0]) * std::cos(k * x[1]) * std::cos(k * x[2]),
                           -amplitude * std::cos(k * x[0]) * std::sin(k * x[1]) * std::cos(k * x[2]), 0.0);
  });
}

VectorField banded_director(const PeriodicGrid& g, double amplitude, double overshoot) {
  const double k = 2.0 * M_PI / g.extent();
  return sample_vector(g, [&](const Point& x) {
    const double theta = M_PI * amplitude * std::sin(k * x[2]);
    const double mag = 1.0 + overshoot * std::cos(k * x[2]);
    return Eigen::Vector3d(mag * std::cos(theta), mag * std::sin(theta), 0.0);
  });
}

ScalarField random_scalar(const PeriodicGrid& g, int bandwidth, double amplitude, std::uint64_t seed) {
  require(bandwidth >= 1 && 2 * bandwidth < g.resolution(), ErrorCode::InvalidArgument,
          "bandwidth must lie in [1, N/2)");
  std::mt19937_64 rng(seed);
  return scaled_to(random_poly(g.extent(), bandwidth, rng).sample(g), amplitude);
}

VectorField random_vector(const PeriodicGrid& g, int bandwidth, double amplitude, std::uint64_t seed) {
  require(bandwidth >= 1 && 2 * bandwidth < g.resolution(), ErrorCode::InvalidArgument,
          "bandwidth must lie in [1, N/2)");
  std::mt19937_64 rng(seed);
  VectorField v(g);
  for (int c = 0; c < 3; ++c) v.component(c) = random_poly(g.extent(), bandwidth, rng).sample(g).component(0);
  return scaled_to(std::move(v), amplitude);
}

VectorField random_solenoidal(const PeriodicGrid& g, int bandwidth, double amplitude, std::uint64_t seed) {
  return scaled_to(leray_project(random_vector(g, bandwidth, 1.0, seed)), amplitude);
}

MatrixField random_matrix(const PeriodicGrid& g, int bandwidth, double amplitude, std::uint64_t seed) {
  require(bandwidth >= 1 && 2 * bandwidth < g.resolution(), ErrorCode::InvalidArgument,
          "bandwidth must lie in [1, N/2)");
  std::mt19937_64 rng(seed);
  MatrixField m(g);
  for (int c = 0; c < 9; ++c) m.component(c) = random_poly(g.extent(), bandwidth, rng).sample(g).component(0);
  return scaled_to(std::move(m), amplitude);
}

State initial_state(const PeriodicGrid& g, const InitialRecipe& r) {
  VectorField u(g), d(g);
  if (r.velocity == "taylor_green") {
    u = taylor_green(g, r.amplitude);
  } else if (r.velocity == "random") {
    u = random_solenoidal(g, r.bandwidth, r.amplitude, r.seed);
  } else {
    require(r.velocity == "zero", ErrorCode::Schema, "unknown velocity family '" + r.velocity + "'");
  }
  if (r.director == "banded") {
    d = banded_director(g, r.amplitude, r.overshoot);
  } else if (r.director == "unit") {
    d.component(0).setOnes();
  } else if (r.director == "random") {
    d = random_vector(g, r.bandwidth, r.amplitude, r.seed + 1);
  } else {
    require(r.director == "zero", ErrorCode::Schema, "unknown director family '" + r.director + "'");
  }
  ScalarField p = pressure_solve(u, d);
  return State(std::move(u), std::move(d), std::move(p), 0.0);
}

TrigPoly::TrigPoly(double extent, int order)
    : extent_(extent), order_(order), c_(std::size_t(2 * order + 1) * (2 * order + 1) * (2 * order + 1)) {
  require(order >= 0 && extent > 0, ErrorCode::InvalidArgument, "trigonometric polynomial needs order >= 0");
}

TrigPoly TrigPoly::from_field(const ScalarField& f, int order) {
  const PeriodicGrid& g = f.grid();
  const int n = g.resolution();
  require(2 * order < n, ErrorCode::InvalidArgument, "truncation order must stay below N/2");
  const Spectrum s = forward(g, f.component(0));
  const int nh = n / 2 + 1;
  const double norm = 1.0 / double(g.node_count());
  TrigPoly t(g.extent(), order);
  auto wrap = [n](int m) { return m < 0 ? m + n : m; };
  for (int mz = -order; mz <= order; ++mz)
    for (int my = -order; my <= order; ++my)
      for (int mx = -order; mx <= order; ++mx) {
        if (mx >= 0) {
          t.coeff(mx, my, mz) = s.coeffs[mx + Index(nh) * (wrap(my) + Index(n) * wrap(mz))] * norm;
        } else {
          t.coeff(mx, my, mz) = std::conj(s.coeffs[-mx + Index(nh) * (wrap(-my) + Index(n) * wrap(-mz))]) * norm;
        }
      }
  return t;
}

TrigPoly TrigPoly::derivative(int axis) const {
  TrigPoly t(*this);
  const double kb = 2.0 * M_PI / extent_;
  const int K = order_;
  for (int mz = -K; mz <= K; ++mz)
    for (int my = -K; my <= K; ++my)
      for (int mx = -K; mx <= K; ++mx) {
        const int m = axis == 0 ? mx : axis == 1 ? my : mz;
        t.coeff(mx, my, mz) *= Complex(0.0, kb * m);
      }
  return t;
}

TrigPoly TrigPoly::heat(double time) const {
  TrigPoly t(*this);
  const double kb = 2.0 * M_PI / extent_;
  const int K = order_;
  for (int mz = -K; mz <= K; ++mz)
    for (int my = -K; my <= K; ++my)
      for (int mx = -K; mx <= K; ++mx)
        t.coeff(mx, my, mz) *= std::exp(-kb * kb * double(mx * mx + my * my + mz * mz) * time);
  return t;
}

double TrigPoly::at(const Point& x) const {
  const double kb = 2.0 * M_PI / extent_;
  const int K = order_;
  double s = 0;
  for (int mz = -K; mz <= K; ++mz)
    for (int my = -K; my <= K; ++my)
      for (int mx = -K; mx <= K; ++mx)
        s += (coeff(mx, my, mz) * std::polar(1.0, kb * (mx * x[0] + my * x[1] + mz * x[2]))).real();
  return s;
}

Eigen::ArrayXd TrigPoly::lattice(const Point& origin, double h, int n) const {
  const int K = order_, w = 2 * K + 1, s = 2 * n + 1;
  const double kb = 2.0 * M_PI / extent_;
  std::vector<Complex> E[3];
  for (int a = 0; a < 3; ++a) {
    E[a].resize(std::size_t(w) * s);
    for (int i = 0; i < s; ++i)
      for (int m = 0; m < w; ++m) E[a][m + std::size_t(w) * i] = std::polar(1.0, kb * (m - K) * (origin[a] + h * (i - n)));
  }
  // Sum over mx, then my, then mz.
  std::vector<Complex> t1(std::size_t(s) * w * w, Complex(0));
  for (int mz = 0; mz < w; ++mz)
    for (int my = 0; my < w; ++my) {
      const Complex* c = &c_[std::size_t(w) * (my + std::size_t(w) * mz)];
      for (int i = 0; i < s; ++i) {
        const Complex* e = &E[0][std::size_t(w) * i];
        Complex acc(0);
        for (int mx = 0; mx < w; ++mx) acc += c[mx] * e[mx];
        t1[i + std::size_t(s) * (my + std::size_t(w) * mz)] = acc;
      }
    }
  std::vector<Complex> t2(std::size_t(s) * s * w, Complex(0));
  for (int mz = 0; mz < w; ++mz)
    for (int j = 0; j < s; ++j) {
      const Complex* e = &E[1][std::size_t(w) * j];
      Complex* out = &t2[std::size_t(s) * (j + std::size_t(s) * mz)];
      for (int my = 0; my < w; ++my) {
        const Complex* in = &t1[std::size_t(s) * (my + std::size_t(w) * mz)];
        for (int i = 0; i < s; ++i) out[i] += in[i] * e[my];
      }
    }
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(Index(s) * s * s);
  for (int k = 0; k < s; ++k) {
    const Complex* e = &E[2][std::size_t(w) * k];
    double* o = out.data() + std::size_t(s) * s * k;
    for (int mz = 0; mz < w; ++mz) {
      const Complex* in = &t2[std::size_t(s) * s * mz];
      const double er = e[mz].real(), ei = e[mz].imag();
      for (std::size_t ij = 0; ij < std::size_t(s) * s; ++ij) o[ij] += in[ij].real() * er - in[ij].imag() * ei;
    }
  }
  return out;
}

ScalarField TrigPoly::sample(const PeriodicGrid& g) const {
  const int n = g.resolution(), nh = n / 2 + 1, K = order_;
  require(2 * K < n, ErrorCode::InvalidArgument, "grid too coarse for the polynomial order");
  require(std::abs(g.extent() - extent_) <= 1e-12 * extent_, ErrorCode::GridMismatch,
          "polynomial and grid live on different boxes");
  Eigen::ArrayXcd coeffs = Eigen::ArrayXcd::Zero(Index(nh) * n * n);
  const double scale = double(g.node_count());
  auto wrap = [n](int m) { return m < 0 ? m + n : m; };
  for (int mz = -K; mz <= K; ++mz)
    for (int my = -K; my <= K; ++my)
      for (int mx = 0; mx <= K; ++mx) coeffs[mx + Index(nh) * (wrap(my) + Index(n) * wrap(mz))] = coeff(mx, my, mz) * scale;
  return ScalarField(g, inverse(Spectrum{g, coeffs}));
}

AnalyticFlow::AnalyticFlow(const AnalyticFlowConfig& config) : config_(config) {
  require(config.bandwidth >= 1 && config.bandwidth <= 3, ErrorCode::InvalidArgument,
          "analytic flow bandwidth must lie in [1, 3]");
  require(config.t_last > config.t_first, ErrorCode::InvalidArgument, "analytic flow needs t_last > t_first");
  std::mt19937_64 rng(config.seed);
  const int K = config.bandwidth;
  const double kb = 2.0 * M_PI / config.extent;
  for (int a = 0; a < 3; ++a) u0_.push_back(random_poly(config.extent, K, rng));
  for (int a = 0; a < 3; ++a) d0_.push_back(random_poly(config.extent, K, rng));
  // Remove the longitudinal part of u.
  for (int mz = -K; mz <= K; ++mz)
    for (int my = -K; my <= K; ++my)
      for (int mx = -K; mx <= K; ++mx) {
        const Eigen::Vector3d k(kb * mx, kb * my, kb * mz);
        const double k2 = k.squaredNorm();
        if (k2 == 0) continue;
        Complex kc(0);
        for (int a = 0; a < 3; ++a) kc += k[a] * u0_[a].coeff(mx, my, mz);
        for (int a = 0; a < 3; ++a) u0_[a].coeff(mx, my, mz) -= k[a] * kc / k2;
      }
  double pu = 0, pd = 0;
  for (int a = 0; a < 3; ++a) {
    pu += power(u0_[a]);
    pd += power(d0_[a]);
  }
  for (int a = 0; a < 3; ++a) {
    for (int mz = -K; mz <= K; ++mz)
      for (int my = -K; my <= K; ++my)
        for (int mx = -K; mx <= K; ++mx) {
          u0_[a].coeff(mx, my, mz) *= pu > 0 ? config.u_rms / std::sqrt(pu) : 0.0;
          d0_[a].coeff(mx, my, mz) *= pd > 0 ? config.d_rms / std::sqrt(pd) : 0.0;
        }
    d0_[a].coeff(0, 0, 0) = config.d_mean[a];
  }
}

State AnalyticFlow::state(const PeriodicGrid& g, double t) const {
  VectorField u(g), d(g);
  for (int a = 0; a < 3; ++a) {
    u.component(a) = u0_[a].heat(t - config_.t_first).sample(g).component(0);
    d.component(a) = d0_[a].heat(t - config_.t_first).sample(g).component(0);
  }
  ScalarField p = pressure_solve(u, d);
  return State(std::move(u), std::move(d), std::move(p), t);
}

Trajectory AnalyticFlow::trajectory(const PeriodicGrid& g, double t_start, double tau, int count) const {
  require(count >= 1 && tau > 0, ErrorCode::InvalidArgument, "trajectory needs count >= 1 and tau > 0");
  RunMetadata meta;
  meta.dt = tau;
  meta.resolution = g.resolution();
  meta.extent = g.extent();
  meta.t_end = t_start + tau * (count - 1);
  Trajectory traj(g, meta);
  std::vector<std::optional<State>> states(count);
  parallel_for(std::size_t(count), [&](std::size_t i) { states[i].emplace(state(g, t_start + tau * double(i))); });
  for (auto& s : states) traj.append(std::move(*s));
  return traj;
}

TrigPoly AnalyticFlow::pressure_at(double t) const {
  const int K = config_.bandwidth;
  int n = 8;
  while (n <= 4 * K) n *= 2;
  const PeriodicGrid g(config_.extent, n);
  return TrigPoly::from_field(state(g, t).p, 2 * K);
}

void AnalyticFlow::time_nodes(double t_lo, double t_hi, int min_slices, int preferred, std::vector<double>& times,
                              std::vector<double>& weights) const {
  times.clear();
  weights.clear();
  const int n = std::max({min_slices, preferred, 1});
  const double dt = (t_hi - t_lo) / n;
  for (int i = 0; i < n; ++i) {
    times.push_back(t_lo + (i + 0.5) * dt);
    weights.push_back(dt);
  }
}

double AnalyticFlow::spacing_for(double radius, const SampleRule& rule) const {
  return radius / std::max(rule.spacings, rule.min_spacings);
}

CylinderSamples AnalyticFlow::sample(const Point& center, double radius, double spacing, const std::vector<double>& times,
                                     const std::vector<double>& weights) const {
  require(spacing > 0 && radius > 0, ErrorCode::InvalidArgument, "sample needs positive radius and spacing");
  const int n = int(std::ceil(radius / spacing));
  const int s = 2 * n + 1;
  CylinderSamples out;
  out.center = center;
  out.radius = radius;
  out.spacing = spacing;
  out.cell_volume = spacing * spacing * spacing;
  out.times = times;
  out.weights = weights;
  std::vector<Index> keep;
  std::vector<double> dist;
  for (int k = 0; k < s; ++k)
    for (int j = 0; j < s; ++j)
      for (int i = 0; i < s; ++i) {
        const double r = spacing * std::sqrt(double((i - n) * (i - n) + (j - n) * (j - n) + (k - n) * (k - n)));
        if (r < radius) {
          keep.push_back(i + Index(s) * (j + Index(s) * k));
          dist.push_back(r);
        }
      }
  out.distance = Eigen::Map<Eigen::ArrayXd>(dist.data(), Index(dist.size()));
  const Index m = Index(keep.size());
  auto gather = [&](const Eigen::ArrayXd& full) {
    Eigen::ArrayXd v(m);
    for (Index i = 0; i < m; ++i) v[i] = full[keep[i]];
    return v;
  };
  out.slices.resize(times.size());
  parallel_for(times.size(), [&](std::size_t ti) {
    const double t = times[ti];
    SliceDensity& sd = out.slices[ti];
    sd.u2 = sd.gd2 = sd.diss = sd.d2 = Eigen::ArrayXd::Zero(m);
    for (int a = 0; a < 3; ++a) {
      const TrigPoly ua = u0_[a].heat(t - config_.t_first), da = d0_[a].heat(t - config_.t_first);
      sd.u2 += gather(ua.lattice(center, spacing, n)).square();
      sd.d2 += gather(da.lattice(center, spacing, n)).square();
      for (int b = 0; b < 3; ++b) {
        sd.diss += gather(ua.derivative(b).lattice(center, spacing, n)).square();
        const TrigPoly db = da.derivative(b);
        sd.gd2 += gather(db.lattice(center, spacing, n)).square();
        for (int c = 0; c < 3; ++c) sd.diss += gather(db.derivative(c).lattice(center, spacing, n)).square();
      }
    }
    sd.p = gather(pressure_at(t).lattice(center, spacing, n));
  });
  return out;
}

}  // namespace prlab

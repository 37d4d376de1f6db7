#include "prlab/pressure_local.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "prlab/flows.hpp"
#include "prlab/model.hpp"
#include "prlab/parallel.hpp"
#include "prlab/spectral.hpp"

namespace prlab {

namespace {

constexpr double kFourPi = 4.0 * M_PI;

// Smooth step S(s) and its first two derivatives on [0, 1].
void smooth_step(double s, double& S, double& S1, double& S2) {
  if (s <= 0) {
    S = S1 = S2 = 0;
    return;
  }
  if (s >= 1) {
    S = 1;
    S1 = S2 = 0;
    return;
  }
  const double g = 1.0 / s - 1.0 / (1.0 - s);
  S = 1.0 / (1.0 + std::exp(g));
  const double q = S * (1.0 - S);
  const double phi = 1.0 / (s * s) + 1.0 / ((1.0 - s) * (1.0 - s));
  const double dphi = -2.0 / (s * s * s) + 2.0 / ((1.0 - s) * (1.0 - s) * (1.0 - s));
  S1 = q * phi;
  S2 = S1 * (1.0 - 2.0 * S) * phi + q * dphi;
}

void require_support(const ScalarField& f, const std::vector<Index>& inside, const std::string& what) {
  std::vector<char> mask(std::size_t(f.grid().node_count()), 0);
  for (Index i : inside) mask[std::size_t(i)] = 1;
  const double scale = f.max_abs();
  for (Index i = 0; i < f.grid().node_count(); ++i)
    if (!mask[std::size_t(i)] && std::abs(f(i)) > 1e-12 * scale) {
      throw Error(ErrorCode::SupportViolation, what + " does not vanish outside the declared support ball");
    }
}

// Offset of node index i relative to i0 wrapped into [−N/2, N/2).
int wrap_offset(int i, int i0, int n) {
  int d = (i - i0) % n;
  if (d < -n / 2) d += n;
  if (d >= n / 2) d -= n;
  return d;
}

}  // namespace

double unit_cube_inverse_distance() { return 3.0 * std::log(2.0 + std::sqrt(3.0)) - M_PI / 2.0; }

double lattice_correction() { return 2.8372974794806; }

Cutoff::Cutoff(const Point& center, double inner, double outer) : center_(center), inner_(inner), outer_(outer) {
  require(inner > 0 && outer > inner, ErrorCode::InvalidArgument, "cutoff needs 0 < inner < outer");
}

void Cutoff::profile(double rho, double& P, double& P1, double& P2) const {
  const double w = outer_ - inner_;
  double S, S1, S2;
  smooth_step((rho - inner_) / w, S, S1, S2);
  P = 1.0 - S;
  P1 = -S1 / w;
  P2 = -S2 / (w * w);
}

double Cutoff::value(const Point& y) const {
  double P, P1, P2;
  profile(y.norm(), P, P1, P2);
  return P;
}

Point Cutoff::gradient(const Point& y) const {
  const double rho = y.norm();
  if (rho <= inner_ || rho >= outer_) return Point::Zero();
  double P, P1, P2;
  profile(rho, P, P1, P2);
  return P1 * y / rho;
}

Eigen::Matrix3d Cutoff::hessian(const Point& y) const {
  const double rho = y.norm();
  if (rho <= inner_ || rho >= outer_) return Eigen::Matrix3d::Zero();
  double P, P1, P2;
  profile(rho, P, P1, P2);
  const Point e = y / rho;
  return P2 * e * e.transpose() + (P1 / rho) * (Eigen::Matrix3d::Identity() - e * e.transpose());
}

double Cutoff::derivative_check(int samples, unsigned seed, double delta) const {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> radius(inner_, outer_), unit(-1.0, 1.0);
  double worst = 0;
  const double gscale = gradient_bound() / (outer_ - inner_);
  const double hscale = laplacian_bound() / ((outer_ - inner_) * (outer_ - inner_));
  for (int s = 0; s < samples; ++s) {
    Point dir(unit(rng), unit(rng), unit(rng));
    if (dir.norm() < 1e-3) dir = Point::UnitX();
    const Point y = radius(rng) * dir.normalized();
    Point fd_grad;
    Eigen::Matrix3d fd_hess;
    for (int a = 0; a < 3; ++a) {
      const Point e = delta * Point::Unit(a);
      fd_grad[a] = (value(y + e) - value(y - e)) / (2 * delta);
      fd_hess.col(a) = (gradient(y + e) - gradient(y - e)) / (2 * delta);
    }
    worst = std::max(worst, (fd_grad - gradient(y)).norm() / gscale);
    worst = std::max(worst, (fd_hess - hessian(y)).norm() / hscale);
  }
  return worst;
}

double Cutoff::gradient_bound() const {
  double m = 0;
  for (int i = 1; i < 2000; ++i) {
    const double rho = inner_ + (outer_ - inner_) * i / 2000.0;
    m = std::max(m, gradient(Point(rho, 0, 0)).norm());
  }
  return m * (outer_ - inner_);
}

double Cutoff::laplacian_bound() const {
  double m = 0;
  for (int i = 1; i < 2000; ++i) {
    const double rho = inner_ + (outer_ - inner_) * i / 2000.0;
    m = std::max(m, std::abs(laplacian(Point(rho, 0, 0))));
  }
  return m * (outer_ - inner_) * (outer_ - inner_);
}

Eigen::ArrayXd newtonian_potential(const ScalarField& f, const Point& center, double support_radius,
                                   const std::vector<Index>& targets) {
  const PeriodicGrid& g = f.grid();
  require(support_radius > 0 && support_radius <= 0.25 * g.extent() * (1 + 1e-12), ErrorCode::SupportViolation,
          "support radius must not exceed a quarter of the box");
  const Point c = g.wrap(center);
  const std::vector<Index> src = ball_nodes(g, c, support_radius);
  require_support(f, src, "density");
  const double h = g.spacing(), hv = g.cell_volume();
  const double self = lattice_correction() * h * h / kFourPi;
  std::vector<Point> ys;
  std::vector<double> fs;
  for (Index i : src) {
    if (f(i) == 0.0) continue;
    ys.push_back(g.displacement(c, g.node(i)));
    fs.push_back(f(i));
  }
  Eigen::ArrayXd out(Index(targets.size()));
  parallel_for(targets.size(), [&](std::size_t ti) {
    const Point x = g.displacement(c, g.node(targets[ti]));
    double s = 0;
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const double r = (x - ys[j]).norm();
      s += r < 1e-12 * h ? fs[j] * self : hv * fs[j] / (kFourPi * r);
    }
    out[Index(ti)] = s;
  });
  return out;
}

ScalarField cz_apply(const MatrixField& K, const Point& center, double support_radius) {
  const PeriodicGrid& g = K.grid();
  require(support_radius > 0 && support_radius <= 0.25 * g.extent() * (1 + 1e-12), ErrorCode::SupportViolation,
          "support radius must not exceed a quarter of the box");
  const Point c = g.wrap(center);
  const std::vector<Index> inside = ball_nodes(g, c, support_radius);
  for (int comp = 0; comp < 9; ++comp)
    require_support(ScalarField(g, K.component(comp)), inside, "matrix field");
  const int n = g.resolution();
  const PeriodicGrid pg(2.0 * g.extent(), 2 * n);
  const double h = g.spacing();
  int c0[3];
  for (int a = 0; a < 3; ++a) c0[a] = int(std::floor(c[a] / h + 1e-9));
  auto padded_index = [&](Index node) {
    int i, j, k;
    g.coordinates(node, i, j, k);
    return pg.index(wrap_offset(i, c0[0], n) + n, wrap_offset(j, c0[1], n) + n, wrap_offset(k, c0[2], n) + n);
  };
  std::array<Eigen::ArrayXcd, 9> Kh;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      Eigen::ArrayXd pad = Eigen::ArrayXd::Zero(pg.node_count());
      for (Index node : inside) pad[padded_index(node)] = 0.5 * (K(node, mat(i, j)) + K(node, mat(j, i)));
      Kh[mat(i, j)] = forward(pg, pad).coeffs;
    }
  const ModeTable modes(pg);
  Spectrum out{pg, Eigen::ArrayXcd::Zero(modes.size())};
  for (Index m = 0; m < modes.size(); ++m) {
    const double k2 = modes.k_squared(m);
    if (k2 == 0) continue;
    const Eigen::Vector3d k = modes.wavevector(m), ko = modes.wavevector_odd(m);
    Complex acc(0);
    for (int i = 0; i < 3; ++i) {
      acc += k[i] * k[i] * Kh[mat(i, i)][m];
      for (int j = i + 1; j < 3; ++j) acc += 2.0 * ko[i] * ko[j] * Kh[mat(i, j)][m];
    }
    out.coeffs[m] = -acc / k2;
  }
  const Eigen::ArrayXd full = inverse(out);
  ScalarField result(g);
  for (Index node = 0; node < g.node_count(); ++node) result(node) = full[padded_index(node)];
  return result;
}

PressureDecomposition decompose_pressure(const State& s, const Point& x0, double rho, int n, int refine,
                                         bool with_p3) {
  const PeriodicGrid& g = s.grid();
  require(n >= 2, ErrorCode::InvalidArgument, "decomposition level must be at least 2");
  require(refine >= 1, ErrorCode::InvalidArgument, "refinement factor must be at least 1");
  require(rho > 0 && rho <= 0.25 * g.extent() * (1 + 1e-12), ErrorCode::SupportViolation,
          "B¹ radius must not exceed a quarter of the box");
  auto r_of = [&](int k) { return rho * std::ldexp(1.0, 1 - k); };
  if (r_of(n + 1) < 2 * g.spacing() * (1 - 1e-12)) {
    std::ostringstream os;
    os << "level " << n << " needs radius " << r_of(n + 1) << " >= 2 grid spacings; need N >= "
       << int(std::ceil(2 * g.extent() / r_of(n + 1)));
    throw Error(ErrorCode::UnderResolved, os.str());
  }
  const double hf = g.spacing() / refine;
  const int half = int(std::ceil(2.0 * rho / hf - 1e-9));
  const int M = 2 * half;
  const PeriodicGrid lg(M * hf, M);
  const Point lc = lg.node(half, half, half);

  // u, ∇d and p on the local lattice; offset (i − half)·hf from x0.
  VectorField u(lg);
  MatrixField gd(lg);
  ScalarField p(lg);
  const Point c = g.wrap(x0);
  bool on_node = refine == 1;
  int c0[3] = {0, 0, 0};
  for (int a = 0; a < 3; ++a) {
    const double x = c[a] / g.spacing();
    c0[a] = int(std::lround(x));
    on_node = on_node && std::abs(x - c0[a]) <= 1e-9;
  }
  if (on_node) {
    const MatrixField gd_full = grad_T(s.d);
    const int N = g.resolution();
    for (int k = 0; k < M; ++k)
      for (int j = 0; j < M; ++j)
        for (int i = 0; i < M; ++i) {
          auto w = [N](int v) { return ((v % N) + N) % N; };
          const Index src = g.index(w(c0[0] + i - half), w(c0[1] + j - half), w(c0[2] + k - half));
          const Index dst = lg.index(i, j, k);
          for (int a = 0; a < 3; ++a) u(dst, a) = s.u(src, a);
          for (int a = 0; a < 9; ++a) gd(dst, a) = gd_full(src, a);
          p(dst) = s.p(src);
        }
  } else {
    const int order = g.resolution() / 2 - 1;
    const int S = 2 * half + 1;
    auto place = [&](const Eigen::ArrayXd& lat, auto&& assign) {
      for (int k = 0; k < M; ++k)
        for (int j = 0; j < M; ++j)
          for (int i = 0; i < M; ++i) assign(lg.index(i, j, k), lat[i + Index(S) * (j + Index(S) * k)]);
    };
    for (int a = 0; a < 3; ++a) {
      const TrigPoly ua = TrigPoly::from_field(component(s.u, a), order);
      place(ua.lattice(c, hf, half), [&](Index dst, double v) { u(dst, a) = v; });
      const TrigPoly da = TrigPoly::from_field(component(s.d, a), order);
      for (int b = 0; b < 3; ++b)
        place(da.derivative(b).lattice(c, hf, half), [&](Index dst, double v) { gd(dst, mat(a, b)) = v; });
    }
    place(TrigPoly::from_field(s.p, order).lattice(c, hf, half), [&](Index dst, double v) { p(dst) = v; });
  }
  const MatrixField J = stress(u, gd);

  const Cutoff phi(Point::Zero(), r_of(2), r_of(1));
  const Cutoff chi(Point::Zero(), 0.75 * r_of(n), r_of(n));
  MatrixField K1(lg), K2(lg);
  for (Index node = 0; node < lg.node_count(); ++node) {
    const Point y = lg.displacement(lc, lg.node(node));
    const double ph = phi.value(y), ch = chi.value(y);
    for (int a = 0; a < 9; ++a) {
      K1(node, a) = ch * ph * J(node, a);
      K2(node, a) = (1.0 - ch) * ph * J(node, a);
    }
  }
  const ScalarField p1f = cz_apply(K1, lc, r_of(1));
  const ScalarField p2f = cz_apply(K2, lc, r_of(1));

  // Boundary-layer densities on the shell where ∇φ is supported.
  std::vector<Point> ys;
  std::vector<Point> vecs;   // J∇φ + p∇φ
  std::vector<double> scal;  // ∇²φ:J + pΔφ
  for (Index node = 0; node < lg.node_count(); ++node) {
    const Point y = lg.displacement(lc, lg.node(node));
    const double ry = y.norm();
    if (ry <= r_of(2) || ry >= r_of(1)) continue;
    const Point gp = phi.gradient(y);
    const Eigen::Matrix3d hp = phi.hessian(y);
    Eigen::Matrix3d Jm;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) Jm(a, b) = J(node, mat(a, b));
    ys.push_back(y);
    vecs.push_back(Jm * gp + p(node) * gp);
    scal.push_back((hp.array() * Jm.array()).sum() + p(node) * hp.trace());
  }
  const double hv = lg.cell_volume();
  auto p3_at = [&](const Point& x) {
    double acc = 0;
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const Point d = x - ys[j];
      const double r = d.norm();
      acc += (2.0 * d.dot(vecs[j]) / (r * r * r) + scal[j] / r);
    }
    return hv * acc / kFourPi;
  };

  PressureDecomposition out;
  out.center = x0;
  out.rho = rho;
  out.n = n;
  out.spacing = hf;
  std::vector<Index> targets;
  for (Index node = 0; node < lg.node_count(); ++node) {
    const Point y = lg.displacement(lc, lg.node(node));
    if (y.norm() < r_of(n + 1)) {
      targets.push_back(node);
      out.points.push_back(c + y);
    }
  }
  const Index T = Index(targets.size());
  out.p.resize(T);
  out.p1.resize(T);
  out.p2.resize(T);
  out.p3 = Eigen::ArrayXd::Zero(T);
  for (Index t = 0; t < T; ++t) {
    out.p[t] = p(targets[std::size_t(t)]);
    out.p1[t] = p1f(targets[std::size_t(t)]);
    out.p2[t] = p2f(targets[std::size_t(t)]);
  }
  if (with_p3) {
    parallel_for(targets.size(), [&](std::size_t t) { out.p3[Index(t)] = p3_at(out.points[t] - c); });
    const Eigen::ArrayXd sum = out.p1 + out.p2 + out.p3;
    out.gauge = T > 0 ? (out.p - sum).mean() : 0.0;
    const Eigen::ArrayXd res = sum + out.gauge - out.p;
    out.residual_mean = T > 0 ? res.mean() : 0.0;
    const double pn = std::sqrt(out.p.square().sum());
    const double rn = std::sqrt(res.square().sum());
    out.relative_error = pn > 0 ? rn / pn : rn;

    const double rn1 = r_of(n + 1);
    const double delta = rn1 / 32.0;
    double worst = 0;
    std::vector<Point> probes{Point::Zero()};
    for (int a = 0; a < 3; ++a) {
      probes.push_back(0.5 * rn1 * Point::Unit(a));
      probes.push_back(-0.5 * rn1 * Point::Unit(a));
    }
    for (const Point& x : probes) {
      double lap = -6.0 * p3_at(x);
      for (int a = 0; a < 3; ++a) lap += p3_at(x + delta * Point::Unit(a)) + p3_at(x - delta * Point::Unit(a));
      worst = std::max(worst, std::abs(lap) / (delta * delta));
    }
    const double scale = out.p3.size() ? out.p3.abs().maxCoeff() : 0.0;
    out.harmonic_residual = scale > 0 ? worst * rn1 * rn1 / scale : worst;
  }

  out.p1_norm = std::pow(hv * out.p1.abs().pow(1.5).sum(), 2.0 / 3.0);
  double jn = 0;
  for (Index node = 0; node < lg.node_count(); ++node) {
    if (lg.displacement(lc, lg.node(node)).norm() >= r_of(n)) continue;
    double f = 0;
    for (int a = 0; a < 9; ++a) f += J(node, a) * J(node, a);
    jn += std::pow(f, 0.75);
  }
  out.J_norm = std::pow(hv * jn, 2.0 / 3.0);
  out.cz_ratio = out.J_norm > 0 ? out.p1_norm / out.J_norm : 0.0;
  return out;
}

RepresentationCheck representation_formula(const ScalarField& Pi, const VectorField& v, const Cutoff& psi,
                                           const std::vector<Index>& targets) {
  const PeriodicGrid& g = Pi.grid();
  require(v.grid() == g, ErrorCode::GridMismatch, "Π and v live on different grids");
  require(psi.outer() <= 0.5 * g.extent(), ErrorCode::SupportViolation, "cutoff support exceeds the box");
  const Point c = g.wrap(psi.center());
  const std::vector<Index> src = ball_nodes(g, c, psi.outer());
  ScalarField psi_f(g);
  for (Index i = 0; i < g.node_count(); ++i) psi_f(i) = psi.value(g.displacement(c, g.node(i)));
  const ScalarField div_w = divergence(scale(psi_f, v));
  const double h = g.spacing(), hv = g.cell_volume();

  std::vector<Point> ys, ws, grads;
  std::vector<double> a_term, pis;
  for (Index i : src) {
    const Point y = g.displacement(c, g.node(i));
    const Point vi(v(i, 0), v(i, 1), v(i, 2));
    const Point gp = psi.gradient(y);
    ys.push_back(y);
    ws.push_back(psi_f(i) * vi);
    grads.push_back(gp);
    a_term.push_back(-gp.dot(vi) + psi.laplacian(y) * Pi(i));
    pis.push_back(Pi(i));
  }
  RepresentationCheck out;
  out.targets = targets;
  out.value.resize(Index(targets.size()));
  out.exact.resize(Index(targets.size()));
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const Index node = targets[t];
    const Point x = g.displacement(c, g.node(node));
    require(psi.value(x) == 1.0 && psi.gradient(x).norm() == 0.0, ErrorCode::InvalidArgument,
            "targets must lie where the cutoff equals one");
    double acc = 0;
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const Point r = ys[j] - x;
      const double d = r.norm();
      if (d < 1e-12 * h) continue;
      const double d3 = d * d * d;
      acc += r.dot(ws[j]) / d3 + a_term[j] / d - 2.0 * r.dot(grads[j]) * pis[j] / d3;
    }
    out.value[Index(t)] = hv * acc / kFourPi + lattice_correction() / 3.0 * h * h / kFourPi * div_w(node);
    out.exact[Index(t)] = Pi(node);
  }
  const double scale = out.exact.size() ? out.exact.abs().maxCoeff() : 0.0;
  const double err = out.exact.size() ? (out.value - out.exact).abs().maxCoeff() : 0.0;
  out.max_relative_error = scale > 0 ? err / scale : err;
  return out;
}

}  // namespace prlab

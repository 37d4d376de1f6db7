#include "prlab/cylinders.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "prlab/parallel.hpp"
#include "prlab/spectral.hpp"

namespace prlab {

namespace {

constexpr double kBallConst = 4.0 * M_PI / 3.0;

double ball_volume(double r) { return kBallConst * r * r * r; }

void check_window(const DensitySource& src, double t_lo, double t_hi) {
  const double tol = 1e-9 * std::max(1.0, std::abs(src.t_last() - src.t_first()));
  if (t_lo < src.t_first() - tol || t_hi > src.t_last() + tol) {
    std::ostringstream os;
    os << "cylinder time interval (" << t_lo << ", " << t_hi << "] leaves the trajectory window [" << src.t_first()
       << ", " << src.t_last() << "]";
    throw Error(ErrorCode::WindowViolation, os.str());
  }
}

Eigen::ArrayXd gather(const Eigen::ArrayXd& full, const std::vector<Index>& idx) {
  Eigen::ArrayXd v(Index(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) v[Index(i)] = full[idx[i]];
  return v;
}

}  // namespace

std::vector<Index> CylinderSamples::inside(double r) const {
  std::vector<Index> idx;
  for (Index i = 0; i < distance.size(); ++i)
    if (distance[i] < r) idx.push_back(i);
  return idx;
}

SliceDensity slice_density(const State& s) {
  SliceDensity sd;
  sd.u2 = norm_squared(s.u).component(0);
  sd.gd2 = norm_squared(grad_T(s.d)).component(0);
  Eigen::ArrayXd diss = norm_squared(grad_T(s.u)).component(0);
  for (int a = 0; a < 3; ++a) diss += norm_squared(hessian(component(s.d, a))).component(0);
  sd.diss = std::move(diss);
  sd.p = s.p.component(0);
  sd.d2 = norm_squared(s.d).component(0);
  return sd;
}

TrajectorySource::TrajectorySource(const Trajectory& traj) : traj_(traj) {
  require(traj.size() >= 2, ErrorCode::UnderResolved, "a trajectory source needs at least two slices");
  cache_.resize(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) once_.push_back(std::make_unique<std::once_flag>());
}

const SliceDensity& TrajectorySource::slice_density(std::size_t i) const {
  std::call_once(*once_[i], [&] { cache_[i] = std::make_unique<SliceDensity>(prlab::slice_density(traj_[i])); });
  return *cache_[i];
}

std::size_t TrajectorySource::slice_index(double t) const {
  const double tau = traj_.spacing();
  const double x = (t - traj_.t_first()) / tau;
  const long i = std::lround(x);
  require(i >= 0 && std::size_t(i) < traj_.size() && std::abs(traj_.time(std::size_t(i)) - t) <= 1e-9 * std::max(tau, 1.0),
          ErrorCode::InvalidArgument, "requested time is not a stored slice");
  return std::size_t(i);
}

void TrajectorySource::time_nodes(double t_lo, double t_hi, int min_slices, int, std::vector<double>& times,
                                  std::vector<double>& weights) const {
  times.clear();
  weights.clear();
  const double tau = traj_.spacing();
  const double tol = 1e-9 * tau;
  for (std::size_t i = 0; i < traj_.size(); ++i) {
    const double t = traj_.time(i);
    if (t > t_lo + tol && t <= t_hi + tol) {
      times.push_back(t);
      weights.push_back(tau);
    }
  }
  if (int(times.size()) < min_slices) {
    std::ostringstream os;
    os << "time interval (" << t_lo << ", " << t_hi << "] holds " << times.size() << " slices, need " << min_slices
       << "; use an output spacing <= " << (t_hi - t_lo) / min_slices;
    throw Error(ErrorCode::UnderResolved, os.str());
  }
}

double TrajectorySource::spacing_for(double radius, const SampleRule& rule) const {
  const double h = traj_.grid().spacing();
  if (radius < rule.min_spacings * h * (1 - 1e-12)) {
    std::ostringstream os;
    os << "radius " << radius << " is below " << rule.min_spacings << " grid spacings; need N >= "
       << int(std::ceil(rule.min_spacings * traj_.grid().extent() / radius));
    throw Error(ErrorCode::UnderResolved, os.str());
  }
  require(radius <= 0.5 * traj_.grid().extent() * (1 + 1e-12), ErrorCode::InvalidArgument,
          "radius exceeds half the box");
  return h;
}

CylinderSamples TrajectorySource::sample(const Point& center, double radius, double spacing,
                                         const std::vector<double>& times, const std::vector<double>& weights) const {
  const PeriodicGrid& g = traj_.grid();
  require(std::abs(spacing - g.spacing()) <= 1e-12 * g.spacing(), ErrorCode::InvalidArgument,
          "trajectory samples live on the grid spacing");
  require(radius <= 0.5 * g.extent() * (1 + 1e-12), ErrorCode::InvalidArgument, "radius exceeds half the box");
  const Point c = g.wrap(center);
  const double h = g.spacing();
  CylinderSamples out;
  out.center = center;
  out.radius = radius;
  out.spacing = h;
  out.cell_volume = g.cell_volume();
  out.times = times;
  out.weights = weights;
  std::vector<Index> idx;
  std::vector<double> dist;
  int lo[3], hi[3];
  for (int a = 0; a < 3; ++a) {
    lo[a] = int(std::floor((c[a] - radius) / h));
    hi[a] = int(std::ceil((c[a] + radius) / h));
  }
  const double r2 = radius * radius;
  for (int k = lo[2]; k <= hi[2]; ++k) {
    const double dz = k * h - c[2];
    for (int j = lo[1]; j <= hi[1]; ++j) {
      const double dy = j * h - c[1];
      for (int i = lo[0]; i <= hi[0]; ++i) {
        const double dx = i * h - c[0];
        const double q = dx * dx + dy * dy + dz * dz;
        if (q < r2) {
          idx.push_back(g.index(i, j, k));
          dist.push_back(std::sqrt(q));
        }
      }
    }
  }
  out.distance = Eigen::Map<Eigen::ArrayXd>(dist.data(), Index(dist.size()));
  out.slices.resize(times.size());
  parallel_for(times.size(), [&](std::size_t ti) {
    const SliceDensity& full = slice_density(slice_index(times[ti]));
    SliceDensity& sd = out.slices[ti];
    sd.u2 = gather(full.u2, idx);
    sd.gd2 = gather(full.gd2, idx);
    sd.diss = gather(full.diss, idx);
    sd.p = gather(full.p, idx);
    sd.d2 = gather(full.d2, idx);
  });
  return out;
}

CylinderSamples sample_cylinder(const DensitySource& src, const ParabolicCylinder& cyl, const SampleRule& rule) {
  require(cyl.radius > 0, ErrorCode::InvalidArgument, "cylinder radius must be positive");
  check_window(src, cyl.t_lo(), cyl.t_hi());
  require(cyl.radius <= 0.5 * src.extent() * (1 + 1e-12), ErrorCode::InvalidArgument, "radius exceeds half the box");
  const double h = src.spacing_for(cyl.radius, rule);
  std::vector<double> times, weights;
  src.time_nodes(cyl.t_lo(), cyl.t_hi(), rule.min_slices, rule.slices, times, weights);
  return src.sample(cyl.center, cyl.radius, h, times, weights);
}

double QuantityReport::G_at(double qv) const {
  for (std::size_t i = 0; i < q.size(); ++i)
    if (q[i] == qv) return G[i];
  throw Error(ErrorCode::InvalidArgument, "q value not present in the report");
}

double QuantityReport::M_at(double qv) const {
  for (std::size_t i = 0; i < q.size(); ++i)
    if (q[i] == qv) return M[i];
  throw Error(ErrorCode::InvalidArgument, "q value not present in the report");
}

QuantityReport quantities(const CylinderSamples& s, const ParabolicCylinder& cyl, const std::vector<double>& q_list) {
  for (double q : q_list) require(q >= 0 && q <= 6, ErrorCode::InvalidArgument, "q must lie in [0, 6]");
  QuantityReport rep;
  rep.cylinder = cyl;
  rep.q = q_list;
  rep.nodes = s.nodes();
  rep.slices = s.times.size();
  rep.spacing = s.spacing;
  const double r = cyl.radius;
  const double hv = s.cell_volume;
  double sup = 0, sB = 0, sC = 0, sD = 0, sE = 0, sF = 0;
  std::vector<double> sG(q_list.size(), 0.0);
  for (std::size_t ti = 0; ti < s.slices.size(); ++ti) {
    const SliceDensity& sd = s.slices[ti];
    const double w = s.weights[ti] * hv;
    const Index m = sd.u2.size();
    sup = std::max(sup, hv * (sd.u2 + sd.gd2).sum());
    sB += w * sd.diss.sum();
    const Eigen::ArrayXd umag = sd.u2.sqrt();
    const Eigen::ArrayXd cube = sd.u2 * umag + sd.gd2 * sd.gd2.sqrt();
    sC += w * cube.sum();
    sD += w * sd.p.abs().pow(1.5).sum();
    if (m > 0) {
      const double mu = sd.u2.mean(), mg = sd.gd2.mean();
      sE += w * (umag * ((sd.u2 - mu).abs() + (sd.gd2 - mg).abs())).sum();
    }
    sF += w * (umag * sd.p.abs()).sum();
    for (std::size_t qi = 0; qi < q_list.size(); ++qi) {
      const double q = q_list[qi];
      sG[qi] += w * (sd.d2.pow(0.5 * q) * cube.pow(1.0 - q / 6.0)).sum();
    }
  }
  const double r2inv = std::pow(r, -2.0);
  rep.A = sup / r;
  rep.B = sB / r;
  rep.C = sC * r2inv;
  rep.D = sD * r2inv;
  rep.E = sE * r2inv;
  rep.F = sF * r2inv;
  for (std::size_t qi = 0; qi < q_list.size(); ++qi) {
    const double q = q_list[qi];
    const double G = sG[qi] * std::pow(r, -2.0 - 0.5 * q);
    rep.G.push_back(G);
    rep.M.push_back(q < 6 ? 0.5 * (rep.C + std::pow(G, 6.0 / (6.0 - q))) + rep.D * rep.D + std::pow(rep.E, 1.5) +
                                std::pow(rep.F, 1.5)
                          : std::numeric_limits<double>::quiet_NaN());
  }
  return rep;
}

QuantityReport quantities(const DensitySource& src, const ParabolicCylinder& cyl, const std::vector<double>& q_list,
                          const SampleRule& rule) {
  return quantities(sample_cylinder(src, cyl, rule), cyl, q_list);
}

QuantityReport quantities(const Trajectory& traj, const ParabolicCylinder& cyl, const std::vector<double>& q_list,
                          const SampleRule& rule) {
  const TrajectorySource src(traj);
  return quantities(src, cyl, q_list, rule);
}

InterpolationMargin interpolation_check(const QuantityReport& r, double q, double sigma, double g_sigma) {
  require(0 <= q && q <= sigma && sigma <= 6, ErrorCode::InvalidArgument, "need 0 <= q <= sigma <= 6");
  InterpolationMargin m;
  m.q = q;
  m.sigma = sigma;
  const double Gq = r.G_at(q), Gs = r.G_at(sigma);
  const double rhs = std::pow(Gs, q / sigma) * std::pow(r.C, 1.0 - q / sigma);
  m.margin = rhs - Gq;
  m.scale = std::max(rhs, Gq);
  if (g_sigma > 0 && sigma < 6) {
    const double alpha = (6.0 / sigma) * (sigma - q) / (6.0 - q);
    m.derived_checked = true;
    m.derived_margin =
        std::pow(g_sigma, 6.0 / (6.0 - sigma)) * 2.0 * std::pow(r.M_at(q), alpha) - std::pow(Gq, 6.0 / (6.0 - q));
  }
  return m;
}

std::vector<ScalingMargin> scaling_check(const DensitySource& src, const ParabolicCylinder& cyl,
                                         const std::vector<double>& alphas, const std::vector<double>& q_list,
                                         const SampleRule& rule) {
  const QuantityReport big = quantities(src, cyl, q_list, rule);
  std::vector<ScalingMargin> out;
  for (double a : alphas) {
    require(a > 0 && a <= 1, ErrorCode::InvalidArgument, "scaling factors must lie in (0, 1]");
    ParabolicCylinder small = cyl;
    small.radius = a * cyl.radius;
    const QuantityReport sm = quantities(src, small, q_list, rule);
    ScalingMargin m;
    m.alpha = a;
    double rel = std::numeric_limits<double>::infinity();
    auto record = [&](double lhs, double rhs) {
      const double margin = rhs - lhs;
      rel = std::min(rel, rhs > 0 ? margin / rhs : (margin < 0 ? -std::numeric_limits<double>::infinity() : 0.0));
      return margin;
    };
    m.A = record(sm.A, big.A / a);
    m.B = record(sm.B, big.B / a);
    m.C = record(sm.C, big.C / (a * a));
    m.D = record(sm.D, big.D / (a * a));
    m.F = record(sm.F, big.F / (a * a));
    for (std::size_t qi = 0; qi < q_list.size(); ++qi)
      m.G.push_back(record(sm.G[qi], big.G[qi] * std::pow(a, -2.0 - 0.5 * q_list[qi])));
    m.min_relative = rel;
    out.push_back(m);
  }
  return out;
}

LadderReport ladder(const DensitySource& src, const Point& x0, double t0, int K) {
  require(K >= 1, ErrorCode::InvalidArgument, "ladder depth must be at least 1");
  check_window(src, t0 - 0.25, t0);
  require(0.5 <= 0.5 * src.extent() * (1 + 1e-12), ErrorCode::InvalidArgument,
          "the ladder needs a box of side at least 1");
  const SampleRule rule{2, 2, 2, 2};
  auto r_of = [](int k) { return std::ldexp(1.0, -k); };
  LadderReport rep;
  rep.center = x0;
  rep.t0 = t0;
  rep.requested = K;

  int depth = K;
  double h = 0;
  std::string reason;
  while (depth >= 1) {
    try {
      h = src.spacing_for(r_of(depth), rule);
      std::vector<double> t, w;
      src.time_nodes(t0 - r_of(depth) * r_of(depth), t0, rule.min_slices, rule.slices, t, w);
      break;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UnderResolved) throw;
      if (reason.empty()) reason = e.what();
      --depth;
    }
  }
  if (depth < 1) throw Error(ErrorCode::UnderResolved, "ladder level 1 is not resolvable: " + reason);
  if (depth < K) {
    rep.truncated = true;
    std::ostringstream os;
    os << "ladder truncated from depth " << K << " to " << depth << ": " << reason;
    rep.warning = os.str();
  }
  rep.spacing = h;

  // Time nodes shell by shell: shell k is (t0 − r_k², t0 − r_{k+1}²], the last shell ends at t0.
  std::vector<double> times, weights;
  std::vector<int> shell;
  for (int k = 1; k <= depth; ++k) {
    const double lo = t0 - r_of(k) * r_of(k);
    const double hi = k < depth ? t0 - r_of(k + 1) * r_of(k + 1) : t0;
    std::vector<double> t, w;
    src.time_nodes(lo, hi, k < depth ? 0 : rule.min_slices, 4, t, w);
    times.insert(times.end(), t.begin(), t.end());
    weights.insert(weights.end(), w.begin(), w.end());
    shell.insert(shell.end(), t.size(), k);
  }
  const CylinderSamples s = src.sample(x0, 0.5, h, times, weights);
  const double hv = s.cell_volume;

  {
    const std::vector<Index> idx = s.inside(0.5);
    double acc = 0;
    for (std::size_t ti = 0; ti < s.slices.size(); ++ti) {
      double a = 0;
      for (Index i : idx) a += std::pow(std::abs(s.slices[ti].p[i]), 1.5);
      acc += s.weights[ti] * hv * a;
    }
    rep.pressure_q1 = acc;
  }

  for (int k = 1; k <= depth; ++k) {
    LadderLevel lv;
    lv.k = k;
    lv.r = r_of(k);
    const std::vector<Index> idx = s.inside(lv.r);
    const double vol = ball_volume(lv.r);
    lv.nodes = idx.size();
    double sup = 0, integral = 0, cube = 0, pres = 0;
    for (std::size_t ti = 0; ti < s.slices.size(); ++ti) {
      if (shell[ti] < k) continue;
      ++lv.slices;
      const SliceDensity& sd = s.slices[ti];
      double e = 0, di = 0, cu = 0, pm = 0;
      for (Index i : idx) {
        e += sd.u2[i] + sd.gd2[i];
        di += sd.diss[i];
        cu += sd.u2[i] * std::sqrt(sd.u2[i]) + sd.gd2[i] * std::sqrt(sd.gd2[i]);
        pm += sd.p[i];
      }
      const double pbar = idx.empty() ? 0.0 : pm / double(idx.size());
      double up = 0;
      for (Index i : idx) up += std::sqrt(sd.u2[i]) * std::abs(sd.p[i] - pbar);
      lv.p_bar.push_back(pbar);
      sup = std::max(sup, hv * e);
      integral += s.weights[ti] * hv * di;
      cube += s.weights[ti] * hv * cu;
      pres += s.weights[ti] * hv * up;
    }
    lv.sup_avg = sup / vol;
    lv.int_avg = integral / vol;
    lv.L = lv.sup_avg + lv.int_avg;
    const double qvol = vol * lv.r * lv.r;
    lv.cube_avg = cube / qvol;
    lv.pressure_avg = pres / qvol;
    lv.R = lv.cube_avg + std::cbrt(lv.r) * lv.pressure_avg;
    rep.levels.push_back(std::move(lv));
  }
  return rep;
}

LadderReport ladder(const Trajectory& traj, const Point& x0, double t0, int K) {
  const TrajectorySource src(traj);
  return ladder(src, x0, t0, K);
}

namespace {

// Values of f at x + delta for every node x; an exact roll when delta is a multiple of h.
Eigen::ArrayXd shifted(const PeriodicGrid& g, const Eigen::ArrayXd& f, const int roll[3], const Point& frac) {
  Eigen::ArrayXd src = f;
  if (frac.norm() > 0) {
    Spectrum s = forward(g, f);
    const ModeTable modes(g);
    for (Index m = 0; m < modes.size(); ++m) s.coeffs[m] *= std::polar(1.0, modes.wavevector_odd(m).dot(frac));
    src = inverse(s);
  }
  const int n = g.resolution();
  Eigen::ArrayXd out(g.node_count());
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        out[g.index(i, j, k)] = src[g.index((i + roll[0]) % n, (j + roll[1]) % n, (k + roll[2]) % n)];
  return out;
}

}  // namespace

Trajectory rescale(const Trajectory& traj, const Point& x0, double t0, double r) {
  require(!traj.empty(), ErrorCode::InvalidArgument, "cannot rescale an empty trajectory");
  const PeriodicGrid& g = traj.grid();
  require(r > 0 && r <= 0.5 * g.extent() * (1 + 1e-12), ErrorCode::InvalidArgument,
          "rescaling radius must lie in (0, L/2]");
  const double tol = 1e-9 * std::max(1.0, traj.t_last() - traj.t_first());
  if (t0 - 0.875 * r * r < traj.t_first() - tol || t0 + 0.125 * r * r > traj.t_last() + tol) {
    std::ostringstream os;
    os << "the image of the unit window needs times [" << t0 - 0.875 * r * r << ", " << t0 + 0.125 * r * r
       << "] but the trajectory covers [" << traj.t_first() << ", " << traj.t_last() << "]";
    throw Error(ErrorCode::WindowViolation, os.str());
  }
  const int n = g.resolution();
  const double h = g.spacing();
  const Point c = g.wrap(x0);
  int roll[3];
  Point frac;
  for (int a = 0; a < 3; ++a) {
    const double x = c[a] / h;
    const double rounded = std::round(x);
    if (std::abs(x - rounded) <= 1e-9) {
      roll[a] = int(rounded) % n;
      frac[a] = 0;
    } else {
      roll[a] = int(std::floor(x)) % n;
      frac[a] = c[a] - std::floor(x) * h;
    }
  }
  const PeriodicGrid ng(g.extent() / r, n);
  RunMetadata meta = traj.metadata();
  meta.dt /= r * r;
  meta.extent = ng.extent();
  meta.resolution = n;
  Trajectory out(ng, meta);
  const double stol = 1e-9;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double s = (traj.time(i) - t0) / (r * r);
    if (s < -0.875 - stol || s > 0.125 + stol) continue;
    const State& st = traj[i];
    State ns(ng);
    ns.t = s;
    for (int a = 0; a < 3; ++a) {
      ns.u.component(a) = r * shifted(g, st.u.component(a), roll, frac);
      ns.d.component(a) = shifted(g, st.d.component(a), roll, frac);
    }
    ns.p.component(0) = (r * r) * shifted(g, st.p.component(0), roll, frac);
    out.append(std::move(ns));
  }
  if (!out.empty()) out.metadata().t_end = out.t_last();
  return out;
}

EmbeddingReport embedding_checks(const std::vector<ScalarField>& slices, double tau, const Point& center,
                                 double poincare_q) {
  require(!slices.empty(), ErrorCode::InvalidArgument, "embedding checks need at least one slice");
  require(poincare_q >= 1, ErrorCode::InvalidArgument, "Poincaré exponent must be at least 1");
  require(slices.size() == 1 || tau > 0, ErrorCode::InvalidArgument, "several slices need a positive spacing");
  const PeriodicGrid& g = slices.front().grid();
  const double hv = g.cell_volume();
  std::vector<Eigen::ArrayXd> grad2;
  for (const ScalarField& s : slices) grad2.push_back(norm_squared(gradient(s)).component(0));
  const Eigen::ArrayXd& g_last = slices.back().component(0);
  const Eigen::ArrayXd& gr_last = grad2.back();

  EmbeddingReport rep;
  auto ratio = [](double lhs, double rhs) {
    return rhs > 0 ? lhs / rhs : (lhs > 0 ? std::numeric_limits<double>::infinity() : 0.0);
  };
  for (double r : {g.extent() / 4, g.extent() / 8, g.extent() / 16}) {
    const std::vector<Index> idx = ball_nodes(g, g.wrap(center), r);
    EmbeddingRow row;
    row.r = r;
    double s2 = 0, s6 = 0, sg2 = 0, mean = 0;
    for (Index i : idx) {
      const double v = g_last[i];
      s2 += v * v;
      s6 += std::pow(v, 6);
      sg2 += gr_last[i];
      mean += v;
    }
    mean /= double(idx.size());
    row.sobolev = ratio(std::pow(hv * s6, 1.0 / 6.0), std::sqrt(hv * s2) / r + std::sqrt(hv * sg2));

    double pl = 0, pr = 0;
    for (Index i : idx) {
      pl += std::pow(std::abs(g_last[i] - mean), poincare_q);
      pr += std::pow(gr_last[i], 0.5 * poincare_q);
    }
    row.poincare_lhs = std::pow(hv * pl, 1.0 / poincare_q);
    row.poincare = ratio(row.poincare_lhs, r * std::pow(hv * pr, 1.0 / poincare_q));

    double l3 = 0, sup2 = 0, grad = 0;
    if (slices.size() == 1) {
      double c3 = 0;
      for (Index i : idx) c3 += std::pow(std::abs(g_last[i]), 3);
      l3 = r * r * hv * c3;
      sup2 = hv * s2;
      grad = r * r * hv * sg2;
    } else {
      const std::size_t last = slices.size() - 1;
      for (std::size_t t = 0; t <= last; ++t) {
        if (double(last - t) * tau >= r * r * (1 - 1e-12)) continue;
        const Eigen::ArrayXd& v = slices[t].component(0);
        double c2 = 0, c3 = 0, cg = 0;
        for (Index i : idx) {
          c2 += v[i] * v[i];
          c3 += std::pow(std::abs(v[i]), 3);
          cg += grad2[t][i];
        }
        l3 += tau * hv * c3;
        sup2 = std::max(sup2, hv * c2);
        grad += tau * hv * cg;
      }
    }
    row.multiplicative = ratio(std::pow(r, -1.0 / 6.0) * std::cbrt(l3), std::sqrt(sup2) + std::sqrt(grad));
    rep.rows.push_back(row);
  }
  auto stats = [&](auto get, double& mx, double& spread) {
    double lo = std::numeric_limits<double>::infinity();
    mx = 0;
    for (const auto& row : rep.rows) {
      mx = std::max(mx, get(row));
      lo = std::min(lo, get(row));
    }
    spread = lo > 0 ? mx / lo : std::numeric_limits<double>::infinity();
  };
  stats([](const EmbeddingRow& w) { return w.sobolev; }, rep.max_sobolev, rep.spread_sobolev);
  stats([](const EmbeddingRow& w) { return w.multiplicative; }, rep.max_multiplicative, rep.spread_multiplicative);
  stats([](const EmbeddingRow& w) { return w.poincare; }, rep.max_poincare, rep.spread_poincare);
  return rep;
}

}  // namespace prlab

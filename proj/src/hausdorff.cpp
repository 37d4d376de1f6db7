#include "prlab/hausdorff.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "prlab/cylinders.hpp"

namespace prlab {

namespace {

double periodic_gap(double d, double extent) {
  if (extent > 0) d -= extent * std::round(d / extent);
  return d;
}

bool lex_less(const SpaceTimeBall& a, const SpaceTimeBall& b) {
  if (a.t != b.t) return a.t < b.t;
  for (int i = 0; i < 3; ++i)
    if (a.x[i] != b.x[i]) return a.x[i] < b.x[i];
  return false;
}

}  // namespace

double spatial_distance(const Point& a, const Point& b, double extent) {
  Point d = b - a;
  for (int i = 0; i < 3; ++i) d[i] = periodic_gap(d[i], extent);
  return d.norm();
}

bool cylinders_disjoint(const SpaceTimeBall& a, const SpaceTimeBall& b, double extent) {
  if (a.t_hi() <= b.t_lo() || b.t_hi() <= a.t_lo()) return true;
  return spatial_distance(a.x, b.x, extent) >= a.r + b.r;
}

bool cylinder_contained(const SpaceTimeBall& a, const SpaceTimeBall& b, double factor, double extent) {
  const SpaceTimeBall big{b.x, b.t, factor * b.r};
  return spatial_distance(a.x, b.x, extent) + a.r <= big.r && a.t_lo() >= big.t_lo() && a.t_hi() <= big.t_hi();
}

bool point_in_cylinder(const Point& x, double t, const SpaceTimeBall& b, double factor, double extent) {
  const SpaceTimeBall big{b.x, b.t, factor * b.r};
  return spatial_distance(x, b.x, extent) < big.r && t > big.t_lo() && t < big.t_hi();
}

VitaliCover vitali_select(const std::vector<SpaceTimeBall>& family, double extent) {
  for (const auto& b : family) require(b.r > 0, ErrorCode::InvalidArgument, "cylinder radii must be positive");
  std::vector<std::size_t> order(family.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (family[i].r != family[j].r) return family[i].r > family[j].r;
    return lex_less(family[i], family[j]);
  });
  VitaliCover out;
  for (std::size_t i : order) {
    bool free = true;
    for (std::size_t s : out.selected)
      if (!cylinders_disjoint(family[i], family[s], extent)) {
        free = false;
        break;
      }
    if (free) out.selected.push_back(i);
  }
  out.disjoint = true;
  for (std::size_t a = 0; a < out.selected.size(); ++a)
    for (std::size_t b = a + 1; b < out.selected.size(); ++b)
      if (!cylinders_disjoint(family[out.selected[a]], family[out.selected[b]], extent)) out.disjoint = false;
  out.covers_balls = out.covers_centers = true;
  for (const auto& f : family) {
    bool ball = false, centre = false;
    for (std::size_t s : out.selected) {
      ball = ball || cylinder_contained(f, family[s], out.expansion, extent);
      centre = centre || point_in_cylinder(f.x, f.t, family[s], out.expansion, extent);
      if (ball && centre) break;
    }
    out.covers_balls = out.covers_balls && ball;
    out.covers_centers = out.covers_centers && centre;
  }
  return out;
}

PkEstimate pk_delta(const std::vector<SpaceTimeBall>& points, double k, double delta, double extent) {
  require(k > 0 && delta > 0, ErrorCode::InvalidArgument, "k and delta must be positive");
  PkEstimate est;
  est.k = k;
  est.delta = delta;
  if (points.empty()) return est;
  const double rho = 0.5 * delta;
  // Cells of side <= 2ρ/√3 and duration 7ρ²/8; Q*_ρ centred at the top of a cell holds the cell.
  double side = 2.0 * rho / std::sqrt(3.0);
  if (extent > 0) side = extent / std::ceil(extent / side);
  const double span = 0.875 * rho * rho;
  double t_min = points.front().t;
  for (const auto& p : points) t_min = std::min(t_min, p.t);

  struct Cell {
    SpaceTimeBall centre;
    double need = 0;
  };
  std::map<std::array<long long, 4>, Cell> cells;
  for (const auto& p : points) {
    std::array<long long, 4> key{};
    Point c;
    for (int a = 0; a < 3; ++a) {
      double x = p.x[a];
      if (extent > 0) x -= extent * std::floor(x / extent);
      key[a] = (long long)std::floor(x / side);
      c[a] = (double(key[a]) + 0.5) * side;
    }
    key[3] = (long long)std::floor((p.t - t_min) / span);
    const double tc = t_min + double(key[3] + 1) * span;
    Cell& cell = cells[key];
    cell.centre = {c, tc, 0.0};
    const double dt = tc - p.t;
    cell.need = std::max({cell.need, spatial_distance(c, p.x, extent), std::sqrt(std::max(dt, 0.0) / 0.875)});
  }
  for (const auto& [key, cell] : cells) {
    const double r = cell.need > 0 ? std::min(rho, cell.need * (1 + 1e-9)) : 1e-6 * rho;
    est.cover.push_back({cell.centre.x, cell.centre.t, r});
    est.bound += std::pow(r, k);
  }
  return est;
}

BudgetReport singular_budget(const std::vector<ScalarField>& U, const std::vector<double>& weights, double k,
                             double C_k) {
  require(U.size() == weights.size(), ErrorCode::InvalidArgument, "one weight per slice is required");
  require(C_k > 0 && k > 0, ErrorCode::InvalidArgument, "k and C_k must be positive");
  BudgetReport rep;
  rep.k = k;
  rep.C_k = C_k;
  for (std::size_t i = 0; i < U.size(); ++i) {
    require(U[i].values().minCoeff() >= 0, ErrorCode::InvalidArgument, "U must be non-negative");
    rep.integral += weights[i] * U[i].grid().cell_volume() * U[i].values().sum();
  }
  require(std::isfinite(rep.integral), ErrorCode::NonFinite, "the integral of U is not finite");
  rep.budget = std::pow(5.0, 5.0) * rep.integral / C_k;
  if (k == 5) rep.lebesgue_budget = rep.budget * 4.0 * M_PI / 3.0;
  return rep;
}

std::vector<ScalarField> dissipation_slices(const Trajectory& traj) {
  std::vector<ScalarField> out;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    ScalarField f(traj.grid());
    f.component(0) = slice_density(traj[i]).diss;
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<double> trapezoid_weights(std::size_t count, double tau) {
  std::vector<double> w(count, tau);
  if (count == 1) w[0] = 0;
  if (count >= 2) w.front() = w.back() = 0.5 * tau;
  return w;
}

SingularScanReport singular_scan(const Trajectory& traj, const RegularityConfig& c, double delta_prime) {
  require(delta_prime > 0, ErrorCode::InvalidArgument, "delta' must be positive");
  SingularScanReport rep;
  rep.scan = scan_regularity(traj, c);
  rep.classes = classify(rep.scan);
  const PeriodicGrid& g = traj.grid();
  const std::size_t nodes = rep.scan.nodes();
  for (std::size_t i = 0; i < rep.classes.candidates.size(); ++i) {
    const std::size_t at = rep.classes.candidates[i];
    rep.candidates.push_back({g.node(Index(at % nodes)), rep.scan.times[at / nodes], rep.classes.seed_radius[i]});
  }
  rep.cover = vitali_select(rep.candidates, g.extent());
  rep.k_values = {1.0, 5.0 / 3.0, 2.0, 4.5 + delta_prime};
  for (double k : rep.k_values) {
    std::vector<double> lx, ly;
    for (double r : rep.scan.radii) {
      const PkEstimate e = pk_delta(rep.candidates, k, 2 * r, g.extent());
      rep.table.push_back({k, 2 * r, e.bound, e.cover.size()});
      if (e.bound > 0) {
        lx.push_back(std::log(2 * r));
        ly.push_back(std::log(e.bound));
      }
    }
    double slope = std::numeric_limits<double>::quiet_NaN();
    if (lx.size() >= 2) {
      const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
      const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
      double sxy = 0, sxx = 0;
      for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
      }
      slope = sxy / sxx;
    }
    rep.slopes.push_back(slope);
  }
  rep.budget = singular_budget(dissipation_slices(traj), trapezoid_weights(traj.size(), traj.spacing()), 1.0,
                               c.eps_sigma);
  return rep;
}

}  // namespace prlab

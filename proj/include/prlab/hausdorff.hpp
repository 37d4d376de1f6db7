#pragma once

#include <string>
#include <vector>

#include "prlab/regularity.hpp"

namespace prlab {

/// Centre and radius of Q*_r(x, t) = B_r(x) × (t − 7r²/8, t + r²/8).
struct SpaceTimeBall {
  Point x = Point::Zero();
  double t = 0;
  double r = 0;

  double t_lo() const { return t - 0.875 * r * r; }
  double t_hi() const { return t + 0.125 * r * r; }
};

/// Spatial distance; periodic with the given side when extent > 0.
double spatial_distance(const Point& a, const Point& b, double extent);
bool cylinders_disjoint(const SpaceTimeBall& a, const SpaceTimeBall& b, double extent);
/// Whether Q*_{a.r}(a) ⊂ Q*_{factor·b.r}(b).
bool cylinder_contained(const SpaceTimeBall& a, const SpaceTimeBall& b, double factor, double extent);
/// Whether the point (x, t) lies in Q*_{factor·b.r}(b).
bool point_in_cylinder(const Point& x, double t, const SpaceTimeBall& b, double factor, double extent);

struct VitaliCover {
  std::vector<std::size_t> selected;  // indices into the input, in selection order
  double expansion = 5.0;
  bool disjoint = false;      // selected cylinders pairwise disjoint
  bool covers_balls = false;  // every input cylinder lies in some expanded selected one
  bool covers_centers = false;
};

/// Greedy selection by decreasing radius (ties broken lexicographically on (t, x, y, z)) of a
/// disjoint subfamily whose 5× expansions cover every input cylinder.
VitaliCover vitali_select(const std::vector<SpaceTimeBall>& family, double extent = 0.0);

struct PkEstimate {
  double k = 0, delta = 0;
  double bound = 0;  // Σ r_j^k over the cover; an upper bound for P^k_δ
  std::vector<SpaceTimeBall> cover;
};

/// Covers the points with cylinders of radius at most δ/2 < δ: space-time is cut into fixed cells
/// that Q*_{δ/2} (centred at the top of the cell) holds, and each occupied cell's cylinder is shrunk
/// to the smallest one with the same centre still holding its points. Removing points never
/// increases the bound.
PkEstimate pk_delta(const std::vector<SpaceTimeBall>& points, double k, double delta, double extent = 0.0);

struct BudgetReport {
  double k = 0, C_k = 0;
  double integral = 0;  // ∬ U
  double budget = 0;    // 5⁵ ∬ U / C_k
  double lebesgue_budget = 0;  // 5⁵ (4π/3) ∬ U / C_5 for k = 5, else 0
};

/// U is sampled at slices with the given time weights; the spatial weight is the cell volume.
BudgetReport singular_budget(const std::vector<ScalarField>& U, const std::vector<double>& weights, double k,
                             double C_k);
/// |∇u|² + |∇²d|² of every slice.
std::vector<ScalarField> dissipation_slices(const Trajectory& traj);
/// Trapezoid weights for `count` slices spaced by tau.
std::vector<double> trapezoid_weights(std::size_t count, double tau);

struct PkRow {
  double k = 0, delta = 0, bound = 0;
  std::size_t cylinders = 0;
};

struct SingularScanReport {
  ScanReport scan;
  ScanClassification classes;
  std::vector<SpaceTimeBall> candidates;
  VitaliCover cover;
  std::vector<PkRow> table;        // one row per (k, δ)
  std::vector<double> k_values;    // 1, 5/3, 2, 9/2 + δ'
  std::vector<double> slopes;      // d log bound / d log δ per k; NaN when a bound vanishes
  BudgetReport budget;             // k = 1 with C_1 = ε_σ
};

/// Scan, classification, Vitali cover of the candidate cylinders and the P^k_δ table. δ runs over
/// twice the scanned radii.
SingularScanReport singular_scan(const Trajectory& traj, const RegularityConfig& c, double delta_prime = 0.1);

}  // namespace prlab

#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "prlab/state.hpp"

namespace prlab {

enum class Variant { Lower, Centered };

/// Q_r(x0,t0) = B_r(x0) × (t0 − r², t0) or Q*_r(x0,t0) = B_r(x0) × (t0 − 7r²/8, t0 + r²/8).
struct ParabolicCylinder {
  Point center = Point::Zero();
  double t0 = 0.0;
  double radius = 1.0;
  Variant variant = Variant::Centered;

  double t_lo() const { return variant == Variant::Lower ? t0 - radius * radius : t0 - 0.875 * radius * radius; }
  double t_hi() const { return variant == Variant::Lower ? t0 : t0 + 0.125 * radius * radius; }
  /// The same space-time set written as a lower cylinder.
  ParabolicCylinder lower_form() const { return {center, t_hi(), radius, Variant::Lower}; }
};

/// Pointwise densities of one time slice on the nodes of a ball.
struct SliceDensity {
  Eigen::ArrayXd u2;    // |u|²
  Eigen::ArrayXd gd2;   // |∇d|²
  Eigen::ArrayXd diss;  // |∇u|² + |∇²d|²
  Eigen::ArrayXd p;     // p
  Eigen::ArrayXd d2;    // |d|²
};

/// Discrete cylinder: nodes of a ball (with their distance to the center) at a list of slice
/// times with quadrature weights. Every node carries the same spatial weight.
struct CylinderSamples {
  Point center = Point::Zero();
  double radius = 0.0;
  double spacing = 0.0;
  double cell_volume = 0.0;
  Eigen::ArrayXd distance;
  std::vector<double> times, weights;
  std::vector<SliceDensity> slices;

  std::size_t nodes() const { return std::size_t(distance.size()); }
  /// Indices of the nodes strictly inside radius r.
  std::vector<Index> inside(double r) const;
};

/// Minimum resolution of a cylinder and the preferred one for sources free to choose.
struct SampleRule {
  int min_spacings = 4;
  int min_slices = 4;
  int spacings = 8;
  int slices = 8;
};

/// Anything that can produce pointwise densities on parabolic cylinders.
class DensitySource {
 public:
  virtual ~DensitySource() = default;
  virtual double extent() const = 0;
  virtual double t_first() const = 0;
  virtual double t_last() const = 0;
  /// Slice times in (t_lo, t_hi] and their quadrature weights; at least `min_slices` of them.
  virtual void time_nodes(double t_lo, double t_hi, int min_slices, int preferred, std::vector<double>& times,
                          std::vector<double>& weights) const = 0;
  /// Lattice spacing for a ball of the given radius; throws UnderResolved when impossible.
  virtual double spacing_for(double radius, const SampleRule& rule) const = 0;
  virtual CylinderSamples sample(const Point& center, double radius, double spacing, const std::vector<double>& times,
                                 const std::vector<double>& weights) const = 0;
};

/// Reads densities from stored slices; per-slice densities are computed once and cached.
class TrajectorySource : public DensitySource {
 public:
  explicit TrajectorySource(const Trajectory& traj);

  double extent() const override { return traj_.grid().extent(); }
  double t_first() const override { return traj_.t_first(); }
  double t_last() const override { return traj_.t_last(); }
  void time_nodes(double t_lo, double t_hi, int min_slices, int preferred, std::vector<double>& times,
                  std::vector<double>& weights) const override;
  double spacing_for(double radius, const SampleRule& rule) const override;
  CylinderSamples sample(const Point& center, double radius, double spacing, const std::vector<double>& times,
                         const std::vector<double>& weights) const override;

  const Trajectory& trajectory() const { return traj_; }
  /// Full-grid densities of slice i.
  const SliceDensity& slice_density(std::size_t i) const;
  std::size_t slice_index(double t) const;

 private:
  const Trajectory& traj_;
  mutable std::vector<std::unique_ptr<SliceDensity>> cache_;
  mutable std::vector<std::unique_ptr<std::once_flag>> once_;
};

SliceDensity slice_density(const State& s);

/// Samples the cylinder after checking the window and the resolution rule.
CylinderSamples sample_cylinder(const DensitySource& src, const ParabolicCylinder& cyl, const SampleRule& rule = {});

struct QuantityReport {
  ParabolicCylinder cylinder;
  double A = 0, B = 0, C = 0, D = 0, E = 0, F = 0;
  std::vector<double> q;
  std::vector<double> G;  // G_q per entry of q
  std::vector<double> M;  // M_q per entry of q; NaN for q >= 6
  std::size_t nodes = 0, slices = 0;
  double spacing = 0;

  double G_at(double qv) const;
  double M_at(double qv) const;
};

QuantityReport quantities(const CylinderSamples& s, const ParabolicCylinder& cyl, const std::vector<double>& q_list);
QuantityReport quantities(const DensitySource& src, const ParabolicCylinder& cyl, const std::vector<double>& q_list,
                          const SampleRule& rule = {});
QuantityReport quantities(const Trajectory& traj, const ParabolicCylinder& cyl, const std::vector<double>& q_list,
                          const SampleRule& rule = {});

struct InterpolationMargin {
  double q = 0, sigma = 0;
  double margin = 0;  // G_σ^{q/σ} C^{1−q/σ} − G_q
  double scale = 0;   // max of the two sides
  bool derived_checked = false;
  double derived_margin = 0;  // g_σ^{6/(6−σ)}·2M_q^{α_{σ,q}} − G_q^{6/(6−q)}
};

/// Both G_q and G_σ (and M_q for the derived form) must be present in the report. g_sigma <= 0
/// skips the derived form.
InterpolationMargin interpolation_check(const QuantityReport& r, double q, double sigma, double g_sigma = 0.0);

struct ScalingMargin {
  double alpha = 0;
  // rhs − lhs of X(αρ) ≤ α^{−s} X(ρ) for X = A, B, C, D, F, G_q (one entry per q).
  double A = 0, B = 0, C = 0, D = 0, F = 0;
  std::vector<double> G;
  double min_relative = 0;  // smallest margin divided by its right-hand side
};

/// Evaluates the scaling bounds on nested cylinders Q*_{αρ}(z0) ⊂ Q*_ρ(z0).
std::vector<ScalingMargin> scaling_check(const DensitySource& src, const ParabolicCylinder& cyl,
                                         const std::vector<double>& alphas, const std::vector<double>& q_list,
                                         const SampleRule& rule = {});

struct LadderLevel {
  int k = 0;
  double r = 0;
  double sup_avg = 0;  // esssup_t ⨍_{B^k} |u|² + |∇d|²
  double int_avg = 0;  // ∫_{I^k} ⨍_{B^k} |∇u|² + |∇²d|²
  double L = 0;
  double cube_avg = 0;     // ⨍⨍_{Q^k} |u|³ + |∇d|³
  double pressure_avg = 0; // ⨍⨍_{Q^k} |u||p − p̄_k|
  double R = 0;
  std::vector<double> p_bar;  // p̄_k at each slice of I^k
  std::size_t nodes = 0, slices = 0;
};

struct LadderReport {
  Point center = Point::Zero();
  double t0 = 0;
  int requested = 0;
  bool truncated = false;
  std::string warning;
  std::vector<LadderLevel> levels;  // levels[k−1] holds level k
  double pressure_q1 = 0;  // ∬_{Q^1} |p|^{3/2}
  double spacing = 0;
};

/// L_k and R_k on Q^k = B_{2^{−k}}(x0) × (t0 − 4^{−k}, t0], k = 1..K. Averages use |B_r| = 4πr³/3.
/// Levels the source cannot resolve (fewer than 2 spacings or 2 slices) are dropped with a warning.
LadderReport ladder(const DensitySource& src, const Point& x0, double t0, int K);
LadderReport ladder(const Trajectory& traj, const Point& x0, double t0, int K);

/// u_{z0,r}(x,s) = r u(x0 + r x, t0 + r² s), p_{z0,r} = r² p(…), d_{z0,r} = d(…). The result lives
/// on the box of side L/r with the same N (node 0 maps to x0) and keeps the slices with
/// s ∈ [−7/8, 1/8]. Off-node x0 uses a spectral phase shift.
Trajectory rescale(const Trajectory& traj, const Point& x0, double t0, double r);

struct EmbeddingRow {
  double r = 0;
  double sobolev = 0;         // ‖g‖_{6;B_r} / ((1/r)‖g‖_{2;B_r} + ‖∇g‖_{2;B_r})
  double multiplicative = 0;  // r^{−1/6}‖g‖_{3;Q_r} / (‖g‖_{2,∞;Q_r} + ‖∇g‖_{2;Q_r})
  double poincare = 0;        // ‖g − ḡ‖_{q;B_r} / (r‖∇g‖_{q;B_r})
  double poincare_lhs = 0;
};

struct EmbeddingReport {
  std::vector<EmbeddingRow> rows;
  double max_sobolev = 0, max_multiplicative = 0, max_poincare = 0;
  double spread_sobolev = 0, spread_multiplicative = 0, spread_poincare = 0;  // max/min across r
};

/// Empirical constants of the scaled embedding, multiplicative and Poincaré inequalities on balls
/// around `center` for r ∈ {L/4, L/8, L/16}. The slices are uniformly spaced by tau and the last
/// slice is the top of every Q_r; a single slice is treated as time independent.
EmbeddingReport embedding_checks(const std::vector<ScalarField>& slices, double tau, const Point& center,
                                 double poincare_q = 2.0);

}  // namespace prlab

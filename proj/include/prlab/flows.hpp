#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prlab/cylinders.hpp"
#include "prlab/spectral.hpp"

namespace prlab {

/// u = A(sin kx cos ky cos kz, −cos kx sin ky cos kz, 0), k = 2π/L.
VectorField taylor_green(const PeriodicGrid& g, double amplitude);

/// d = (1 + overshoot·cos kz)(cos θ, sin θ, 0) with θ = πA sin kz.
VectorField banded_director(const PeriodicGrid& g, double amplitude, double overshoot);

/// Random trigonometric polynomials with every |m_i| <= bandwidth, scaled to the given max-norm.
ScalarField random_scalar(const PeriodicGrid& g, int bandwidth, double amplitude, std::uint64_t seed);
VectorField random_vector(const PeriodicGrid& g, int bandwidth, double amplitude, std::uint64_t seed);
VectorField random_solenoidal(const PeriodicGrid& g, int bandwidth, double amplitude, std::uint64_t seed);
MatrixField random_matrix(const PeriodicGrid& g, int bandwidth, double amplitude, std::uint64_t seed);

struct InitialRecipe {
  std::string velocity = "taylor_green";  // zero | taylor_green | random
  std::string director = "banded";        // zero | unit | banded | random
  double amplitude = 0.5;
  double overshoot = 0.0;
  int bandwidth = 2;
  std::uint64_t seed = 0;
};

/// Builds (u, d, p) at t = 0; p solves the pressure equation.
State initial_state(const PeriodicGrid& g, const InitialRecipe& recipe);

/// Real trigonometric polynomial Σ c_m e^{i k_m·x} over |m_i| <= order on a periodic box.
class TrigPoly {
 public:
  TrigPoly(double extent, int order);
  /// Truncation of a sampled field to |m_i| <= order.
  static TrigPoly from_field(const ScalarField& f, int order);

  double extent() const { return extent_; }
  int order() const { return order_; }
  Complex& coeff(int mx, int my, int mz) { return c_[slot(mx, my, mz)]; }
  Complex coeff(int mx, int my, int mz) const { return c_[slot(mx, my, mz)]; }

  TrigPoly derivative(int axis) const;
  /// Heat semigroup e^{tΔ}.
  TrigPoly heat(double t) const;
  double at(const Point& x) const;
  /// Values at origin + h(i, j, k), −n <= i, j, k <= n, with i fastest.
  Eigen::ArrayXd lattice(const Point& origin, double h, int n) const;
  /// Requires order < N/2.
  ScalarField sample(const PeriodicGrid& g) const;

 private:
  std::size_t slot(int mx, int my, int mz) const {
    const int w = 2 * order_ + 1;
    return std::size_t((mx + order_) + w * ((my + order_) + w * (mz + order_)));
  }
  double extent_;
  int order_;
  std::vector<Complex> c_;
};

struct AnalyticFlowConfig {
  double extent = 2.0;
  int bandwidth = 2;
  double u_rms = 0.1;  // root-mean-square of u over the box at t_first
  double d_rms = 0.1;  // root-mean-square of d − d_mean
  Eigen::Vector3d d_mean = Eigen::Vector3d::Zero();
  double t_first = -1.0;
  double t_last = 0.25;
  std::uint64_t seed = 0;
};

/// Heat flow of random band-limited data started at t_first: u(t) = e^{(t−t_first)Δ}u0 (divergence
/// free), d(t) = e^{(t−t_first)Δ}d0 and p(t) solving the pressure equation. It satisfies the local energy inequality with unit
/// constant, and it can be sampled exactly on lattices of any spacing.
class AnalyticFlow : public DensitySource {
 public:
  explicit AnalyticFlow(const AnalyticFlowConfig& config);

  const AnalyticFlowConfig& config() const { return config_; }
  State state(const PeriodicGrid& g, double t) const;
  Trajectory trajectory(const PeriodicGrid& g, double t_start, double tau, int count) const;

  double extent() const override { return config_.extent; }
  double t_first() const override { return config_.t_first; }
  double t_last() const override { return config_.t_last; }
  void time_nodes(double t_lo, double t_hi, int min_slices, int preferred, std::vector<double>& times,
                  std::vector<double>& weights) const override;
  double spacing_for(double radius, const SampleRule& rule) const override;
  CylinderSamples sample(const Point& center, double radius, double spacing, const std::vector<double>& times,
                         const std::vector<double>& weights) const override;

 private:
  TrigPoly pressure_at(double t) const;
  AnalyticFlowConfig config_;
  std::vector<TrigPoly> u0_, d0_;
};

}  // namespace prlab

#pragma once

#include <string>
#include <vector>

#include "prlab/state.hpp"

namespace prlab {

GlobalEnergyRecord global_energy(const State& s);
/// Same, with ∇u, ∇d (transpose-gradients) and Δd supplied.
GlobalEnergyRecord global_energy(const State& s, const MatrixField& grad_u, const MatrixField& grad_d,
                                 const VectorField& lap_d);

/// C-infinity bump b(s) = exp(1 - 1/(1 - s^2)) on |s| < 1 and its first two derivatives.
struct Bump {
  static double value(double s);
  static double d1(double s);
  static double d2(double s);
  /// b'(s)/s, smooth at s = 0.
  static double d1_over_s(double s);
};

/// φ(x,t) = b(|x − c|/R) · b((2t − t_lo − t_hi)/(t_hi − t_lo)), periodic in x.
class TestFunction {
 public:
  TestFunction(const Point& center, double radius, double t_lo, double t_hi);

  struct Slice {
    ScalarField phi, phi_t, lap_phi;
    VectorField grad_phi;
  };
  Slice evaluate(const PeriodicGrid& g, double t) const;

  // Pointwise values (minimum-image distance on g).
  double phi(const PeriodicGrid& g, const Point& x, double t) const;
  double phi_t(const PeriodicGrid& g, const Point& x, double t) const;
  Point grad_phi(const PeriodicGrid& g, const Point& x, double t) const;
  double lap_phi(const PeriodicGrid& g, const Point& x, double t) const;

  /// Largest relative gap between supplied derivatives and centred differences with step `delta`.
  double derivative_check(const PeriodicGrid& g, int samples, unsigned seed, double delta = 1e-4) const;
  /// Throws SupportViolation unless the support lies inside the trajectory window.
  void check_support(const PeriodicGrid& g, double t_first, double t_last) const;

  const Point& center() const { return center_; }
  double radius() const { return radius_; }
  double t_lo() const { return t_lo_; }
  double t_hi() const { return t_hi_; }

 private:
  double eta(double t) const;
  double eta_t(double t) const;
  Point center_;
  double radius_, t_lo_, t_hi_;
};

struct RfTerm {
  double value = 0.0;   // ∫ φ ∇ᵀ[f(d)] : ∇ᵀd via the expansion
  double bound = 0.0;   // ∫ 12|d|²|∇d|²φ + 8(|∇d|²/2)φ
};

/// Pointwise φ ∇ᵀ[f(d)] : ∇ᵀd, evaluated by the algebraic expansion.
ScalarField rf_density(const VectorField& d, const MatrixField& grad_d, const ScalarField& phi);
/// Same density with f(d) differentiated spectrally.
ScalarField rf_density_direct(const VectorField& d, const MatrixField& grad_d, const ScalarField& phi);
ScalarField rf_bound_density(const VectorField& d, const MatrixField& grad_d, const ScalarField& phi);
RfTerm rf_term(const VectorField& d, const ScalarField& phi);

struct LocalEnergyRecord {
  double t = 0.0;
  double lhs_density = 0.0;  // A(t) = ∫(|u|²/2 + |∇d|²/2)φ
  double ddt = 0.0;          // A'(t) by finite differences
  double dissipation = 0.0;  // ∫(|∇u|² + |∇²d|²)φ
  double heat = 0.0;         // ∫(|u|²/2 + |∇d|²/2)(φ_t + Δφ)
  double flux = 0.0;         // ∫(|u|²/2 + |∇d|²/2 + p) u·∇φ
  double stress = 0.0;       // ∫ u⊗∇φ : ∇d⊙∇d
  double remainder = 0.0;    // R_f(d,φ); enters the right-hand side with a minus sign
  double heat_abs = 0.0;     // ∫(|u|²/2 + |∇d|²/2)|φ_t + Δφ|
  double d_term = 0.0;       // ∫ |d|²|∇d|²φ
  double residual = 0.0;     // ddt + dissipation − (heat + flux + stress − remainder)
};

struct LocalEnergyAudit {
  std::vector<LocalEnergyRecord> records;
  double max_residual = 0.0;
  double max_dissipation = 0.0;
};

LocalEnergyAudit local_energy_audit(const Trajectory& traj, const TestFunction& phi);

/// Centred differences inside, second-order one-sided differences at the ends.
std::vector<double> time_derivative(const std::vector<double>& values, double tau);

struct GronwallCheck {
  double T = 0.0;
  double C_T = 0.0;
  double slack = 0.0;
  double margin_rough = 0.0;     // min over t of 8A + C − (A' + B)
  double margin_absorbed = 0.0;  // min over t of C + 8e^{8T}∫C − (A' + B)
  double margin_integrated = 0.0;  // min over t of the C_T form
  bool rough_holds = false;
  bool absorbed_holds = false;
  bool integrated_holds = false;
};

/// Checks the Grönwall-absorbed local inequality and its integrated C_T form. A term passes when
/// margin >= −slack·max(1, |right-hand side|).
GronwallCheck gronwall_form(const std::vector<LocalEnergyRecord>& records, double T, double slack = 1e-2);

struct ChainLine {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs − lhs
};

struct HeuristicChainReport {
  std::vector<ChainLine> lines;
  double min_margin = 0.0;
};

/// Both sides of the global Lebesgue-space estimate chain for d and the 10/3 interpolation
/// bound for u and ∇d, with time norms over the trajectory span (trapezoid weights).
HeuristicChainReport heuristic_chain_audit(const Trajectory& traj);

}  // namespace prlab

#pragma once

#include "prlab/state.hpp"

namespace prlab {

struct SolverConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  int output_stride = 1;
  int energy_stride = 0;  // 0: same as output_stride
  int resolution = 32;
  double extent = 2.0 * 3.14159265358979323846;
  double cfl_safety = 1.0;
};

void validate(const SolverConfig& c);

/// Largest admissible step for the state: safety * min(h / max|u|, h^2 / 6).
double cfl_limit(const State& s, double safety);

/// v − ∇Δ⁻¹(∇·v)
VectorField leray_project(const VectorField& v);
/// Zero-mean solution of −Δp = ∇·(div_T J).
ScalarField pressure_from_stress(const MatrixField& J);
ScalarField pressure_solve(const VectorField& u, const VectorField& d);

/// One integrating-factor RK2 step; refuses steps above the CFL limit.
State step(const State& s, double dt, double cfl_safety = 1.0);

/// Runs from `initial` to config.t_end. On blow-up the partial trajectory is returned with
/// `failure` set. Energy is logged every energy_stride steps.
Trajectory simulate(const SolverConfig& config, const State& initial);

}  // namespace prlab

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "prlab/grid.hpp"

namespace prlab {

struct State {
  VectorField u;
  VectorField d;
  ScalarField p;
  double t = 0.0;

  explicit State(const PeriodicGrid& g) : u(g), d(g), p(g) {}
  State(VectorField u_, VectorField d_, ScalarField p_, double t_)
      : u(std::move(u_)), d(std::move(d_)), p(std::move(p_)), t(t_) {
    require(u.grid() == d.grid() && u.grid() == p.grid(), ErrorCode::GridMismatch, "state fields on different grids");
  }
  const PeriodicGrid& grid() const { return u.grid(); }
};

struct GlobalEnergyRecord {
  double t = 0.0;
  double E = 0.0;  // ∫ |u|²/2 + |∇d|²/2 + F(d)
  double D = 0.0;  // ∫ |∇u|² + |Δd − f(d)|²
};

struct RunMetadata {
  double dt = 0.0;
  int resolution = 0;
  double extent = 0.0;
  double t_end = 0.0;
  int output_stride = 1;
  int energy_stride = 1;
  double cfl_safety = 1.0;
};

/// Emitted when a run aborts on non-finite or overflowing data.
struct BlowUpReport {
  double t_last_valid = 0.0;
  double t_failed = 0.0;
  Point location = Point::Zero();  // node where |u| or |∇d| was largest in the last valid state
  double radius = 0.0;             // suggested cylinder radius around the location
  std::string message;
};

/// Time-ordered snapshots at uniform spacing.
class Trajectory {
 public:
  Trajectory(const PeriodicGrid& grid, RunMetadata meta) : grid_(grid), meta_(meta) {}

  void append(State s);

  const PeriodicGrid& grid() const { return grid_; }
  const RunMetadata& metadata() const { return meta_; }
  RunMetadata& metadata() { return meta_; }
  std::size_t size() const { return states_.size(); }
  bool empty() const { return states_.empty(); }
  const State& operator[](std::size_t i) const { return states_[i]; }
  const std::vector<State>& states() const { return states_; }
  double time(std::size_t i) const { return states_[i].t; }
  /// Output spacing; zero for fewer than two slices.
  double spacing() const { return states_.size() < 2 ? 0.0 : states_[1].t - states_[0].t; }
  double t_first() const { return states_.front().t; }
  double t_last() const { return states_.back().t; }

  std::vector<GlobalEnergyRecord> energy;
  std::optional<BlowUpReport> failure;

 private:
  PeriodicGrid grid_;
  RunMetadata meta_;
  std::vector<State> states_;
};

}  // namespace prlab

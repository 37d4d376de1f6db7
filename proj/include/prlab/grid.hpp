#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "prlab/error.hpp"

namespace prlab {

using Point = Eigen::Vector3d;
using Index = std::int64_t;

/// Uniform periodic sampling of the cube [0, extent)^3 with N nodes per axis.
class PeriodicGrid {
 public:
  PeriodicGrid(double extent, int resolution);

  double extent() const { return extent_; }
  int resolution() const { return n_; }
  double spacing() const { return spacing_; }
  Index node_count() const { return Index(n_) * n_ * n_; }
  double cell_volume() const { return spacing_ * spacing_ * spacing_; }
  double volume() const { return extent_ * extent_ * extent_; }

  // x is the fastest axis.
  Index index(int i, int j, int k) const;
  Point node(Index idx) const;
  Point node(int i, int j, int k) const { return {i * spacing_, j * spacing_, k * spacing_}; }
  void coordinates(Index idx, int& i, int& j, int& k) const;

  /// Minimum-image displacement to - from.
  Point displacement(const Point& from, const Point& to) const;
  double distance(const Point& a, const Point& b) const { return displacement(a, b).norm(); }
  /// Wraps a point into [0, extent)^3.
  Point wrap(const Point& x) const;

  bool operator==(const PeriodicGrid& other) const {
    return n_ == other.n_ && extent_ == other.extent_;
  }
  bool operator!=(const PeriodicGrid& other) const { return !(*this == other); }

 private:
  double extent_;
  int n_;
  double spacing_;
};

/// Samples of a C-component field at the grid nodes, one column per component.
/// Matrix fields use column 3*i + j for entry (i, j).
template <int C>
class Field {
 public:
  using Values = Eigen::Array<double, Eigen::Dynamic, C>;
  static constexpr int components = C;

  explicit Field(const PeriodicGrid& grid) : grid_(grid), values_(Values::Zero(grid.node_count(), C)) {}
  Field(const PeriodicGrid& grid, Values values) : grid_(grid), values_(std::move(values)) {
    require(values_.rows() == grid_.node_count() && values_.cols() == C, ErrorCode::InvalidArgument,
            "field sample count does not match grid");
  }

  const PeriodicGrid& grid() const { return grid_; }
  const Values& values() const { return values_; }
  Values& values() { return values_; }

  auto component(int c) const { return values_.col(c); }
  auto component(int c) { return values_.col(c); }
  double operator()(Index node, int c = 0) const { return values_(node, c); }
  double& operator()(Index node, int c = 0) { return values_(node, c); }

  Field& operator+=(const Field& o) {
    require(grid_ == o.grid_, ErrorCode::GridMismatch, "fields live on different grids");
    values_ += o.values_;
    return *this;
  }
  Field& operator-=(const Field& o) {
    require(grid_ == o.grid_, ErrorCode::GridMismatch, "fields live on different grids");
    values_ -= o.values_;
    return *this;
  }
  Field& operator*=(double s) {
    values_ *= s;
    return *this;
  }
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }
  friend Field operator*(Field a, double s) { return a *= s; }
  friend Field operator-(Field a) {
    a.values_ = -a.values_;
    return a;
  }

  double max_abs() const { return values_.size() ? values_.abs().maxCoeff() : 0.0; }

 private:
  PeriodicGrid grid_;
  Values values_;
};

using ScalarField = Field<1>;
using VectorField = Field<3>;
using MatrixField = Field<9>;

inline int mat(int i, int j) { return 3 * i + j; }

template <typename Fn>
ScalarField sample_scalar(const PeriodicGrid& g, Fn&& fn) {
  ScalarField f(g);
  for (Index n = 0; n < g.node_count(); ++n) f(n) = fn(g.node(n));
  return f;
}

template <typename Fn>
VectorField sample_vector(const PeriodicGrid& g, Fn&& fn) {
  VectorField f(g);
  for (Index n = 0; n < g.node_count(); ++n) {
    const Eigen::Vector3d v = fn(g.node(n));
    for (int c = 0; c < 3; ++c) f(n, c) = v[c];
  }
  return f;
}

/// Throws naming the first non-finite node.
template <int C>
void check_finite(const Field<C>& f, const std::string& what);

// Pointwise algebra.
ScalarField component(const VectorField& v, int c);
VectorField stack(const ScalarField& x, const ScalarField& y, const ScalarField& z);
ScalarField dot(const VectorField& v, const VectorField& w);
ScalarField norm_squared(const VectorField& v);
ScalarField norm_squared(const MatrixField& J);
ScalarField trace(const MatrixField& J);
MatrixField transpose(const MatrixField& J);
MatrixField outer(const VectorField& v, const VectorField& w);
/// (Gv ⊙ Gw)_ij = sum_k v_k,i w_k,j for transpose-gradients Gv, Gw.
MatrixField odot(const MatrixField& grad_v, const MatrixField& grad_w);
ScalarField frobenius(const MatrixField& J, const MatrixField& K);
/// (J v)_i = sum_j J_ij v_j.
VectorField apply(const MatrixField& J, const VectorField& v);
ScalarField multiply(const ScalarField& a, const ScalarField& b);
VectorField scale(const ScalarField& a, const VectorField& v);

// Spectral calculus.
VectorField gradient(const ScalarField& s);
ScalarField divergence(const VectorField& v);
template <int C>
Field<C> laplacian(const Field<C>& f);
/// (grad_T v)_ij = v_i,j
MatrixField grad_T(const VectorField& v);
MatrixField hessian(const ScalarField& s);
/// (div_T J)_i = J_ij,j
VectorField div_T(const MatrixField& J);
/// Zeros every mode with |m| > N/3 on some axis.
template <int C>
Field<C> dealias(const Field<C>& f);

/// Integration region: node centers strictly inside a periodic ball, the full box, or an
/// axis-aligned half-open box [lo, hi) without wrap.
class Region {
 public:
  enum class Kind { Ball, FullBox, Box };

  static Region ball(const Point& center, double radius);
  static Region full_box() { return Region(Kind::FullBox, Point::Zero(), 0.0, Point::Zero(), Point::Zero()); }
  static Region box(const Point& lo, const Point& hi);

  Kind kind() const { return kind_; }
  const Point& center() const { return center_; }
  double radius() const { return radius_; }
  const Point& lo() const { return lo_; }
  const Point& hi() const { return hi_; }

 private:
  Region(Kind k, Point c, double r, Point lo, Point hi)
      : kind_(k), center_(std::move(c)), radius_(r), lo_(std::move(lo)), hi_(std::move(hi)) {}
  Kind kind_;
  Point center_;
  double radius_;
  Point lo_, hi_;
};

/// Node indices inside the region, ascending. Balls need radius in [2h, L/2].
std::vector<Index> region_nodes(const PeriodicGrid& g, const Region& region);
/// Same as region_nodes for balls but without the 2h floor (used by callers with their own rule).
std::vector<Index> ball_nodes(const PeriodicGrid& g, const Point& center, double radius);

double integrate(const ScalarField& f, const Region& region);
double sum_over(const Eigen::Ref<const Eigen::ArrayXd>& values, const std::vector<Index>& nodes);

}  // namespace prlab

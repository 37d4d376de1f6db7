#include "prlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "prlab/spectral.hpp"

namespace prlab {

PeriodicGrid::PeriodicGrid(double extent, int resolution) : extent_(extent), n_(resolution) {
  require(std::isfinite(extent) && extent > 0, ErrorCode::InvalidArgument, "grid extent must be positive");
  require(resolution >= 8 && (resolution & (resolution - 1)) == 0, ErrorCode::InvalidArgument,
          "grid resolution must be a power of two >= 8");
  // extent/N with N a power of two is exact in binary floating point.
  spacing_ = extent / resolution;
}

Index PeriodicGrid::index(int i, int j, int k) const {
  auto w = [this](int a) { return ((a % n_) + n_) % n_; };
  return Index(w(i)) + Index(n_) * (Index(w(j)) + Index(n_) * Index(w(k)));
}

void PeriodicGrid::coordinates(Index idx, int& i, int& j, int& k) const {
  i = int(idx % n_);
  j = int((idx / n_) % n_);
  k = int(idx / (Index(n_) * n_));
}

Point PeriodicGrid::node(Index idx) const {
  int i, j, k;
  coordinates(idx, i, j, k);
  return node(i, j, k);
}

Point PeriodicGrid::displacement(const Point& from, const Point& to) const {
  Point d = to - from;
  for (int a = 0; a < 3; ++a) d[a] -= extent_ * std::round(d[a] / extent_);
  return d;
}

Point PeriodicGrid::wrap(const Point& x) const {
  Point w = x;
  for (int a = 0; a < 3; ++a) {
    w[a] = std::fmod(w[a], extent_);
    if (w[a] < 0) w[a] += extent_;
    if (w[a] >= extent_) w[a] = 0.0;
  }
  return w;
}

template <int C>
void check_finite(const Field<C>& f, const std::string& what) {
  const auto& v = f.values();
  for (Index n = 0; n < v.rows(); ++n) {
    for (int c = 0; c < C; ++c) {
      if (!std::isfinite(v(n, c))) {
        int i, j, k;
        f.grid().coordinates(n, i, j, k);
        std::ostringstream os;
        os << what << ": non-finite sample at node (" << i << ", " << j << ", " << k << ") component " << c;
        throw Error(ErrorCode::NonFinite, os.str());
      }
    }
  }
}
template void check_finite<1>(const Field<1>&, const std::string&);
template void check_finite<3>(const Field<3>&, const std::string&);
template void check_finite<9>(const Field<9>&, const std::string&);

namespace {

void same_grid(const PeriodicGrid& a, const PeriodicGrid& b) {
  require(a == b, ErrorCode::GridMismatch, "fields live on different grids");
}

}  // namespace

ScalarField component(const VectorField& v, int c) { return ScalarField(v.grid(), v.component(c)); }

VectorField stack(const ScalarField& x, const ScalarField& y, const ScalarField& z) {
  same_grid(x.grid(), y.grid());
  same_grid(x.grid(), z.grid());
  VectorField v(x.grid());
  v.component(0) = x.values();
  v.component(1) = y.values();
  v.component(2) = z.values();
  return v;
}

ScalarField dot(const VectorField& v, const VectorField& w) {
  same_grid(v.grid(), w.grid());
  return ScalarField(v.grid(), (v.values() * w.values()).rowwise().sum());
}

ScalarField norm_squared(const VectorField& v) { return ScalarField(v.grid(), v.values().square().rowwise().sum()); }

ScalarField norm_squared(const MatrixField& J) { return ScalarField(J.grid(), J.values().square().rowwise().sum()); }

ScalarField trace(const MatrixField& J) {
  return ScalarField(J.grid(), J.component(0) + J.component(4) + J.component(8));
}

MatrixField transpose(const MatrixField& J) {
  MatrixField T(J.grid());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) T.component(mat(i, j)) = J.component(mat(j, i));
  return T;
}

MatrixField outer(const VectorField& v, const VectorField& w) {
  same_grid(v.grid(), w.grid());
  MatrixField J(v.grid());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) J.component(mat(i, j)) = v.component(i) * w.component(j);
  return J;
}

MatrixField odot(const MatrixField& gv, const MatrixField& gw) {
  same_grid(gv.grid(), gw.grid());
  MatrixField J(gv.grid());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      auto col = J.component(mat(i, j));
      for (int k = 0; k < 3; ++k) col += gv.component(mat(k, i)) * gw.component(mat(k, j));
    }
  return J;
}

ScalarField frobenius(const MatrixField& J, const MatrixField& K) {
  same_grid(J.grid(), K.grid());
  return ScalarField(J.grid(), (J.values() * K.values()).rowwise().sum());
}

VectorField apply(const MatrixField& J, const VectorField& v) {
  same_grid(J.grid(), v.grid());
  VectorField w(v.grid());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) w.component(i) += J.component(mat(i, j)) * v.component(j);
  return w;
}

ScalarField multiply(const ScalarField& a, const ScalarField& b) {
  same_grid(a.grid(), b.grid());
  return ScalarField(a.grid(), a.values() * b.values());
}

VectorField scale(const ScalarField& a, const VectorField& v) {
  same_grid(a.grid(), v.grid());
  VectorField w(v.grid());
  for (int c = 0; c < 3; ++c) w.component(c) = a.values() * v.component(c);
  return w;
}

namespace {

// Multiplies coefficients by i*k_odd along one axis.
Spectrum derivative(const Spectrum& s, const ModeTable& modes, int axis) {
  Spectrum d{s.grid, Eigen::ArrayXcd(s.coeffs.size())};
  for (Index m = 0; m < modes.size(); ++m) {
    int ix, iy, iz;
    modes.axes(m, ix, iy, iz);
    const int idx[3] = {ix, iy, iz};
    d.coeffs[m] = Complex(0.0, modes.k_odd(axis, idx[axis])) * s.coeffs[m];
  }
  return d;
}

}  // namespace

VectorField gradient(const ScalarField& s) {
  check_finite(s, "gradient");
  const ModeTable modes(s.grid());
  const Spectrum hat = forward(s.grid(), s.values());
  VectorField g(s.grid());
  for (int a = 0; a < 3; ++a) g.component(a) = inverse(derivative(hat, modes, a));
  return g;
}

ScalarField divergence(const VectorField& v) {
  check_finite(v, "divergence");
  const ModeTable modes(v.grid());
  Spectrum acc{v.grid(), Eigen::ArrayXcd::Zero(modes.size())};
  for (int a = 0; a < 3; ++a) acc.coeffs += derivative(forward(v.grid(), v.component(a)), modes, a).coeffs;
  return ScalarField(v.grid(), inverse(acc));
}

template <int C>
Field<C> laplacian(const Field<C>& f) {
  check_finite(f, "laplacian");
  const ModeTable modes(f.grid());
  Field<C> out(f.grid());
  for (int c = 0; c < C; ++c) {
    Spectrum hat = forward(f.grid(), f.component(c));
    for (Index m = 0; m < modes.size(); ++m) hat.coeffs[m] *= -modes.k_squared(m);
    out.component(c) = inverse(hat);
  }
  return out;
}
template Field<1> laplacian<1>(const Field<1>&);
template Field<3> laplacian<3>(const Field<3>&);
template Field<9> laplacian<9>(const Field<9>&);

MatrixField grad_T(const VectorField& v) {
  check_finite(v, "grad_T");
  const ModeTable modes(v.grid());
  MatrixField G(v.grid());
  for (int i = 0; i < 3; ++i) {
    const Spectrum hat = forward(v.grid(), v.component(i));
    for (int j = 0; j < 3; ++j) G.component(mat(i, j)) = inverse(derivative(hat, modes, j));
  }
  return G;
}

MatrixField hessian(const ScalarField& s) {
  check_finite(s, "hessian");
  const ModeTable modes(s.grid());
  const Spectrum hat = forward(s.grid(), s.values());
  MatrixField H(s.grid());
  for (int i = 0; i < 3; ++i) {
    const Spectrum di = derivative(hat, modes, i);
    for (int j = i; j < 3; ++j) {
      H.component(mat(i, j)) = inverse(derivative(di, modes, j));
      if (j != i) H.component(mat(j, i)) = H.component(mat(i, j));
    }
  }
  return H;
}

VectorField div_T(const MatrixField& J) {
  check_finite(J, "div_T");
  const ModeTable modes(J.grid());
  VectorField out(J.grid());
  for (int i = 0; i < 3; ++i) {
    Spectrum acc{J.grid(), Eigen::ArrayXcd::Zero(modes.size())};
    for (int j = 0; j < 3; ++j)
      acc.coeffs += derivative(forward(J.grid(), J.component(mat(i, j))), modes, j).coeffs;
    out.component(i) = inverse(acc);
  }
  return out;
}

template <int C>
Field<C> dealias(const Field<C>& f) {
  const ModeTable modes(f.grid());
  Field<C> out(f.grid());
  for (int c = 0; c < C; ++c) {
    Spectrum hat = forward(f.grid(), f.component(c));
    for (Index m = 0; m < modes.size(); ++m)
      if (modes.aliased(m)) hat.coeffs[m] = 0.0;
    out.component(c) = inverse(hat);
  }
  return out;
}
template Field<1> dealias<1>(const Field<1>&);
template Field<3> dealias<3>(const Field<3>&);
template Field<9> dealias<9>(const Field<9>&);

Region Region::ball(const Point& center, double radius) {
  require(std::isfinite(radius) && radius > 0, ErrorCode::InvalidArgument, "ball radius must be positive");
  return Region(Kind::Ball, center, radius, Point::Zero(), Point::Zero());
}

Region Region::box(const Point& lo, const Point& hi) {
  require((hi.array() > lo.array()).all(), ErrorCode::InvalidArgument, "box corners must satisfy lo < hi");
  return Region(Kind::Box, Point::Zero(), 0.0, lo, hi);
}

std::vector<Index> ball_nodes(const PeriodicGrid& g, const Point& center, double radius) {
  require(radius <= 0.5 * g.extent() * (1 + 1e-12), ErrorCode::InvalidArgument,
          "ball radius exceeds half the box; it would overlap itself");
  const double h = g.spacing();
  int lo[3], hi[3];
  for (int a = 0; a < 3; ++a) {
    lo[a] = int(std::floor((center[a] - radius) / h));
    hi[a] = int(std::ceil((center[a] + radius) / h));
  }
  const double r2 = radius * radius;
  std::vector<Index> nodes;
  for (int k = lo[2]; k <= hi[2]; ++k) {
    const double dz = k * h - center[2];
    for (int j = lo[1]; j <= hi[1]; ++j) {
      const double dy = j * h - center[1];
      for (int i = lo[0]; i <= hi[0]; ++i) {
        const double dx = i * h - center[0];
        if (dx * dx + dy * dy + dz * dz < r2) nodes.push_back(g.index(i, j, k));
      }
    }
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

std::vector<Index> region_nodes(const PeriodicGrid& g, const Region& region) {
  std::vector<Index> nodes;
  switch (region.kind()) {
    case Region::Kind::FullBox:
      nodes.resize(g.node_count());
      for (Index n = 0; n < g.node_count(); ++n) nodes[n] = n;
      return nodes;
    case Region::Kind::Ball: {
      std::ostringstream os;
      os << "ball radius " << region.radius() << " is below 2 grid spacings (" << 2 * g.spacing() << ")";
      require(region.radius() >= 2 * g.spacing() * (1 - 1e-12), ErrorCode::UnderResolved, os.str());
      return ball_nodes(g, g.wrap(region.center()), region.radius());
    }
    case Region::Kind::Box: {
      for (Index n = 0; n < g.node_count(); ++n) {
        const Point x = g.node(n);
        if ((x.array() >= region.lo().array()).all() && (x.array() < region.hi().array()).all()) nodes.push_back(n);
      }
      return nodes;
    }
  }
  return nodes;
}

double sum_over(const Eigen::Ref<const Eigen::ArrayXd>& values, const std::vector<Index>& nodes) {
  double s = 0.0;
  for (Index n : nodes) s += values[n];
  return s;
}

double integrate(const ScalarField& f, const Region& region) {
  check_finite(f, "integrate");
  return f.grid().cell_volume() * sum_over(f.values(), region_nodes(f.grid(), region));
}

}  // namespace prlab

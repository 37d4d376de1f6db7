#include "prlab/model.hpp"

namespace prlab {

ScalarField potential_F(const VectorField& d) {
  check_finite(d, "potential_F");
  const Eigen::ArrayXd s = d.values().square().rowwise().sum() - 1.0;
  return ScalarField(d.grid(), s.square());
}

VectorField force_f(const VectorField& d) {
  check_finite(d, "force_f");
  const Eigen::ArrayXd s = 4.0 * (d.values().square().rowwise().sum() - 1.0);
  VectorField f(d.grid());
  for (int c = 0; c < 3; ++c) f.component(c) = s * d.component(c);
  return f;
}

MatrixField stress(const VectorField& u, const MatrixField& grad_d) {
  return outer(u, u) + odot(grad_d, grad_d);
}

MatrixField stress(const VectorField& u, const VectorField& d) {
  require(u.grid() == d.grid(), ErrorCode::GridMismatch, "stress: u and d on different grids");
  return stress(u, grad_T(d));
}

VectorField transport(const MatrixField& grad_d, const VectorField& u) { return apply(grad_d, u); }

Rates rhs(const VectorField& u, const VectorField& d, const ScalarField& p) {
  require(u.grid() == d.grid() && u.grid() == p.grid(), ErrorCode::GridMismatch, "rhs: fields on different grids");
  const MatrixField gd = grad_T(d);
  Rates r{laplacian(u) - div_T(stress(u, gd)) - gradient(p), laplacian(d) - transport(gd, u) - force_f(d)};
  check_finite(r.du, "rhs du/dt");
  check_finite(r.dd, "rhs dd/dt");
  return r;
}

}  // namespace prlab

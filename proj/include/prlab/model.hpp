#pragma once

#include <utility>

#include "prlab/grid.hpp"

namespace prlab {

/// F(d) = (|d|^2 - 1)^2
ScalarField potential_F(const VectorField& d);
/// f(d) = 4(|d|^2 - 1) d
VectorField force_f(const VectorField& d);
/// J = u ⊗ u + ∇d ⊙ ∇d
MatrixField stress(const VectorField& u, const VectorField& d);
/// Same, reusing an already computed transpose-gradient of d.
MatrixField stress(const VectorField& u, const MatrixField& grad_d);
/// (u·∇)d = (grad_T d) u
VectorField transport(const MatrixField& grad_d, const VectorField& u);

struct Rates {
  VectorField du;
  VectorField dd;
};

/// du/dt = Δu − div_T(J) − ∇p,  dd/dt = Δd − (u·∇)d − f(d)
Rates rhs(const VectorField& u, const VectorField& d, const ScalarField& p);

}  // namespace prlab

#pragma once

#include <vector>

#include "prlab/state.hpp"

namespace prlab {

/// ∫_{[−1/2,1/2]³} dy/|y| = 3 ln(2 + √3) − π/2.
double unit_cube_inverse_distance();

/// Lattice correction for f(y)/|y| sums: ∫f/|y| ≈ h³Σ′f(nh)/|nh| + κh²f(0).
double lattice_correction();

/// Radial C∞ profile: 1 on B_inner(c), 0 outside B_outer(c), with S(s) = e^{−1/s}/(e^{−1/s} + e^{−1/(1−s)})
/// as the transition.
class Cutoff {
 public:
  Cutoff(const Point& center, double inner, double outer);

  const Point& center() const { return center_; }
  double inner() const { return inner_; }
  double outer() const { return outer_; }

  // Pointwise values at the displacement y − c (no periodic wrap).
  double value(const Point& y) const;
  Point gradient(const Point& y) const;
  Eigen::Matrix3d hessian(const Point& y) const;
  double laplacian(const Point& y) const { return hessian(y).trace(); }

  /// Largest relative gap between supplied derivatives and centred differences.
  double derivative_check(int samples, unsigned seed, double delta = 1e-5) const;
  /// max|∇ψ|·(outer − inner) and max|Δψ|·(outer − inner)² sampled along a ray.
  double gradient_bound() const;
  double laplacian_bound() const;

 private:
  void profile(double rho, double& P, double& P1, double& P2) const;
  Point center_;
  double inner_, outer_;
};

/// (G * f)(x) = Σ_y h³ f(y)/(4π|x − y|) over the nodes of the support ball, with the host node
/// weighted by κh²/(4π) (lattice_correction). Targets are grid nodes; displacements are taken relative to
/// the support center so the support behaves as a set in R³. The support radius must be <= L/4.
Eigen::ArrayXd newtonian_potential(const ScalarField& f, const Point& center, double support_radius,
                                   const std::vector<Index>& targets);

/// S[K] = ∂_i∂_j(G * K_ij) as the multiplier −ξ_iξ_j/|ξ|² on a box padded to twice the side.
/// K must vanish outside B_R(center) with R <= L/4.
ScalarField cz_apply(const MatrixField& K, const Point& center, double support_radius);

struct PressureDecomposition {
  Point center = Point::Zero();
  double rho = 0;      // radius of B¹; B^k has radius rho·2^{1−k}
  int n = 0;
  double spacing = 0;  // quadrature spacing of the local lattice
  std::vector<Point> points;  // nodes of B^{n+1}
  Eigen::ArrayXd p, p1, p2, p3;
  double gauge = 0;               // constant added to p1 + p2 + p3
  double relative_error = 0;      // relative L² error on B^{n+1}
  double residual_mean = 0;       // mean of p1 + p2 + p3 + gauge − p
  double p1_norm = 0;             // ‖p¹ⁿ‖_{3/2;B^{n+1}}
  double J_norm = 0;              // ‖J‖_{3/2;B^n}
  double cz_ratio = 0;            // p1_norm / J_norm
  double harmonic_residual = 0;   // max |Δp³| · r_{n+1}² / max |p³| near the center
};

/// Splits p = S[χ_n φ J] + S[(1 − χ_n) φ J] + p³ on B^{n+1} for φ ≡ 1 on B², supp φ ⊂ B¹ and
/// χ_n ≡ 1 on B_{3r_n/4}, supp χ_n ⊂ B^n. The fields are evaluated by trigonometric interpolation
/// on a local lattice refined `refine` times; p must be the pressure of (u, d).
PressureDecomposition decompose_pressure(const State& s, const Point& x0, double rho, int n, int refine = 2,
                                         bool with_p3 = true);

struct RepresentationCheck {
  std::vector<Index> targets;
  Eigen::ArrayXd value, exact;
  double max_relative_error = 0;  // relative to max |Π| on the targets
};

/// Π(x) = −∫∇G·ψv + ∫G_{ψ,1}·v + ∫G_{ψ,2}Π for targets in {ψ = 1}, with G_{ψ,1} = −G∇ψ and
/// G_{ψ,2} = 2∇G·∇ψ + GΔψ (∇G taken in y). Requires −ΔΠ = ∇·v.
RepresentationCheck representation_formula(const ScalarField& Pi, const VectorField& v, const Cutoff& psi,
                                           const std::vector<Index>& targets);

}  // namespace prlab

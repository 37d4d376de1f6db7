#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "prlab/grid.hpp"

namespace prlab {

using Complex = std::complex<double>;

/// Half-complex coefficients of a real field: layout ix + (N/2+1)*(iy + N*iz).
struct Spectrum {
  PeriodicGrid grid;
  Eigen::ArrayXcd coeffs;
};

/// Wavenumbers of every stored mode. k holds 2*pi/L*m; k_odd zeroes the Nyquist
/// entry and is used for first derivatives.
class ModeTable {
 public:
  explicit ModeTable(const PeriodicGrid& g);

  int half() const { return nh_; }
  Index size() const { return Index(nh_) * n_ * n_; }
  void axes(Index mode, int& ix, int& iy, int& iz) const {
    ix = int(mode % nh_);
    iy = int((mode / nh_) % n_);
    iz = int(mode / (Index(nh_) * n_));
  }
  // Signed integer mode numbers.
  int mx(int ix) const { return ix; }
  int my(int iy) const { return iy <= n_ / 2 ? iy : iy - n_; }
  double k(int axis, int index) const { return axis == 0 ? kx_[index] : kyz_[index]; }
  double k_odd(int axis, int index) const { return axis == 0 ? kx_odd_[index] : kyz_odd_[index]; }
  Eigen::Vector3d wavevector(Index mode) const;
  Eigen::Vector3d wavevector_odd(Index mode) const;
  double k_squared(Index mode) const;
  /// Every mode with |m| > N/3 on some axis.
  bool aliased(Index mode) const;
  /// Multiplicity of a half-complex mode when reconstructing full-spectrum sums.
  double weight(Index mode) const;

 private:
  int n_, nh_;
  std::vector<double> kx_, kx_odd_, kyz_, kyz_odd_;
};

Spectrum forward(const PeriodicGrid& g, const Eigen::Ref<const Eigen::ArrayXd>& samples);
/// Normalised inverse: inverse(forward(x)) == x.
Eigen::ArrayXd inverse(const Spectrum& s);

}  // namespace prlab

#include "prlab/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace prlab {

namespace {

struct Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

std::mutex plan_mutex;

// Plans are created once per resolution and executed through the new-array interface,
// which is thread safe; buffers belong to the caller.
const Plans& plans_for(int n) {
  static std::map<int, Plans> cache;
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  const Index real_size = Index(n) * n * n;
  const Index complex_size = Index(n / 2 + 1) * n * n;
  double* r = fftw_alloc_real(real_size);
  fftw_complex* c = fftw_alloc_complex(complex_size);
  Plans p;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  p.r2c = fftw_plan_dft_r2c_3d(n, n, n, r, c, flags);
  p.c2r = fftw_plan_dft_c2r_3d(n, n, n, c, r, flags);
  fftw_free(r);
  fftw_free(c);
  return cache.emplace(n, p).first->second;
}

}  // namespace

ModeTable::ModeTable(const PeriodicGrid& g) : n_(g.resolution()), nh_(g.resolution() / 2 + 1) {
  const double base = 2.0 * M_PI / g.extent();
  kx_.resize(nh_);
  kx_odd_.resize(nh_);
  for (int i = 0; i < nh_; ++i) {
    kx_[i] = base * i;
    kx_odd_[i] = (i == n_ / 2) ? 0.0 : kx_[i];
  }
  kyz_.resize(n_);
  kyz_odd_.resize(n_);
  for (int i = 0; i < n_; ++i) {
    kyz_[i] = base * my(i);
    kyz_odd_[i] = (i == n_ / 2) ? 0.0 : kyz_[i];
  }
}

Eigen::Vector3d ModeTable::wavevector(Index mode) const {
  int ix, iy, iz;
  axes(mode, ix, iy, iz);
  return {kx_[ix], kyz_[iy], kyz_[iz]};
}

Eigen::Vector3d ModeTable::wavevector_odd(Index mode) const {
  int ix, iy, iz;
  axes(mode, ix, iy, iz);
  return {kx_odd_[ix], kyz_odd_[iy], kyz_odd_[iz]};
}

double ModeTable::k_squared(Index mode) const {
  int ix, iy, iz;
  axes(mode, ix, iy, iz);
  return kx_[ix] * kx_[ix] + kyz_[iy] * kyz_[iy] + kyz_[iz] * kyz_[iz];
}

bool ModeTable::aliased(Index mode) const {
  int ix, iy, iz;
  axes(mode, ix, iy, iz);
  const int cut = n_ / 3;
  return ix > cut || std::abs(my(iy)) > cut || std::abs(my(iz)) > cut;
}

double ModeTable::weight(Index mode) const {
  const int ix = int(mode % nh_);
  return (ix == 0 || ix == n_ / 2) ? 1.0 : 2.0;
}

Spectrum forward(const PeriodicGrid& g, const Eigen::Ref<const Eigen::ArrayXd>& samples) {
  require(samples.size() == g.node_count(), ErrorCode::InvalidArgument, "sample count does not match grid");
  const int n = g.resolution();
  Spectrum s{g, Eigen::ArrayXcd(Index(n / 2 + 1) * n * n)};
  Eigen::ArrayXd work = samples;
  fftw_execute_dft_r2c(plans_for(n).r2c, work.data(), reinterpret_cast<fftw_complex*>(s.coeffs.data()));
  return s;
}

Eigen::ArrayXd inverse(const Spectrum& s) {
  const int n = s.grid.resolution();
  Eigen::ArrayXcd work = s.coeffs;  // c2r overwrites its input
  Eigen::ArrayXd out(s.grid.node_count());
  fftw_execute_dft_c2r(plans_for(n).c2r, reinterpret_cast<fftw_complex*>(work.data()), out.data());
  out /= double(s.grid.node_count());
  return out;
}

}  // namespace prlab

#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include <fftw3.h>

#include "viscospec/grid.hpp"

namespace viscospec {
namespace fft_detail {

// FFTW plan creation is not thread-safe; execution via the new-array
// interface is. Plans are cached per (d, n, sign) and created with
// FFTW_UNALIGNED so they can be re-executed on arbitrary buffers.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int d, int n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_tuple(d, n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;

    std::size_t total = 1;
    for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(n);
    std::vector<std::complex<double>> scratch(total);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan p = nullptr;
    if (d == 2) {
      p = fftw_plan_dft_2d(n, n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    } else {
      p = fftw_plan_dft_3d(n, n, n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    plans_.emplace(key, p);
    return p;
  }

 private:
  PlanCache() = default;
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

}  // namespace fft_detail

/// Forward transform of real nodal values to complex coefficients,
/// normalized so the coefficient of a constant field c is c at mode 0.
inline std::vector<std::complex<double>> fft_forward(
    const Grid& grid, const std::vector<double>& phys) {
  if (phys.size() != grid.size())
    throw InvalidShape("fft_forward: field size does not match grid");
  std::vector<std::complex<double>> spec(phys.begin(), phys.end());
  fftw_plan p = fft_detail::PlanCache::instance().get(grid.d, grid.n, FFTW_FORWARD);
  auto* buf = reinterpret_cast<fftw_complex*>(spec.data());
  fftw_execute_dft(p, buf, buf);
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (auto& c : spec) c *= scale;
  return spec;
}

/// Inverse transform; returns the real part of the nodal values.
inline std::vector<double> fft_inverse(
    const Grid& grid, const std::vector<std::complex<double>>& spec) {
  if (spec.size() != grid.size())
    throw InvalidShape("fft_inverse: field size does not match grid");
  std::vector<std::complex<double>> work(spec);
  fftw_plan p = fft_detail::PlanCache::instance().get(grid.d, grid.n, FFTW_BACKWARD);
  auto* buf = reinterpret_cast<fftw_complex*>(work.data());
  fftw_execute_dft(p, buf, buf);
  std::vector<double> phys(work.size());
  for (std::size_t i = 0; i < work.size(); ++i) phys[i] = work[i].real();
  return phys;
}

}  // namespace viscospec

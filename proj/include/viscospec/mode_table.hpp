#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "viscospec/grid.hpp"

namespace viscospec {

/// Per-grid lookup tables for the spectral loops, so elementwise kernels
/// avoid re-deriving multi-indices from flat positions. Cached per
/// (d, n, length), shared across threads.
struct ModeTable {
  std::vector<double> kint;     // k_int per axis, [a * size + flat]
  std::vector<double> dk;       // differentiation wavenumber (Nyquist zeroed), scaled
  std::vector<double> k2;       // |k_int|^2 per flat
  std::vector<std::uint8_t> keep;  // 1 where the 2/3-rule keeps the mode
  std::vector<std::size_t> conj_flat;  // flat index of -k

  static const ModeTable& get(const Grid& g) {
    static std::mutex mu;
    static std::map<std::tuple<int, int, double>, std::unique_ptr<ModeTable>>
        cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(g.d, g.n, g.length);
    auto it = cache.find(key);
    if (it == cache.end())
      it = cache.emplace(key, std::make_unique<ModeTable>(build(g))).first;
    return *it->second;
  }

 private:
  static ModeTable build(const Grid& g) {
    const std::size_t N = g.size();
    const int n = g.n;
    const double cut = n / 3.0;
    ModeTable t;
    t.kint.assign(static_cast<std::size_t>(g.d) * N, 0.0);
    t.dk.assign(static_cast<std::size_t>(g.d) * N, 0.0);
    t.k2.assign(N, 0.0);
    t.keep.assign(N, 1);
    t.conj_flat.assign(N, 0);
    for (std::size_t flat = 0; flat < N; ++flat) {
      auto idx = g.unravel(flat);
      std::size_t cf = 0;
      for (int a = 0; a < g.d; ++a) {
        int k = g.k_int(idx[a]);
        t.kint[a * N + flat] = static_cast<double>(k);
        t.dk[a * N + flat] =
            (idx[a] == n / 2) ? 0.0 : k * g.k_scale();
        t.k2[flat] += static_cast<double>(k) * k;
        if (std::abs(k) > cut) t.keep[flat] = 0;
        cf = cf * n + static_cast<std::size_t>((n - idx[a]) % n);
      }
      t.conj_flat[flat] = cf;
    }
    return t;
  }
};

}  // namespace viscospec

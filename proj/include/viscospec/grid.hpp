#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace viscospec {

struct InvalidShape : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Uniform periodic grid on the d-torus [0, length)^d, d = 2 or 3.
/// Every axis carries the same number of modes. Wavenumbers are the
/// integers -n/2 .. n/2-1 scaled by 2*pi/length.
struct Grid {
  int d = 2;
  int n = 0;        // modes per axis, even, >= 8
  double length = 2.0 * M_PI;

  Grid() = default;
  Grid(int d_, int n_, double length_ = 2.0 * M_PI)
      : d(d_), n(n_), length(length_) {
    if (d != 2 && d != 3) throw InvalidShape("Grid: d must be 2 or 3");
    if (n < 8 || n % 2 != 0) throw InvalidShape("Grid: n must be even and >= 8");
    if (length <= 0.0) throw InvalidShape("Grid: length must be positive");
  }

  std::size_t size() const {
    std::size_t s = 1;
    for (int a = 0; a < d; ++a) s *= static_cast<std::size_t>(n);
    return s;
  }

  double k_scale() const { return 2.0 * M_PI / length; }

  /// Integer wavenumber of linear index i along one axis.
  int k_int(int i) const { return i <= n / 2 - 1 ? i : i - n; }

  /// Largest represented wavenumber magnitude (Nyquist), scaled.
  double k_max() const { return (n / 2) * k_scale(); }

  /// Physical coordinate of node index i along one axis.
  double x(int i) const { return length * static_cast<double>(i) / n; }

  /// Cell volume of the quadrature rule (length/n)^d.
  double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < d; ++a) v *= length / n;
    return v;
  }

  /// Decompose a flat row-major index into per-axis indices.
  std::array<int, 3> unravel(std::size_t flat) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = d - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(flat % n);
      flat /= n;
    }
    return idx;
  }

  /// Scaled wavenumber vector of a flat spectral index.
  std::array<double, 3> wavevector(std::size_t flat) const {
    auto idx = unravel(flat);
    std::array<double, 3> k{0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) k[a] = k_int(idx[a]) * k_scale();
    return k;
  }

  bool operator==(const Grid& o) const {
    return d == o.d && n == o.n && length == o.length;
  }
  bool operator!=(const Grid& o) const { return !(*this == o); }
};

}  // namespace viscospec

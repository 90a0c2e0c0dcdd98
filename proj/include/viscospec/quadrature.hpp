#pragma once

#include <cstddef>
#include <vector>

namespace viscospec {

/// Cumulative integral of uniformly sampled values, fourth-order accurate
/// (composite Simpson for even indices, Simpson 3/8 and a quadratic
/// startup rule for odd ones).
inline std::vector<double> cumulative_integral(const std::vector<double>& f,
                                               double dt) {
  std::vector<double> I(f.size(), 0.0);
  if (f.size() < 2) return I;
  if (f.size() == 2) {
    I[1] = 0.5 * dt * (f[0] + f[1]);
    return I;
  }
  I[1] = dt / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2]);
  for (std::size_t i = 2; i < f.size(); ++i) {
    if (i % 2 == 0) {
      I[i] = I[i - 2] + dt / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
    } else if (i >= 3) {
      I[i] = I[i - 3] + 3.0 * dt / 8.0 *
                            (f[i - 3] + 3.0 * f[i - 2] + 3.0 * f[i - 1] + f[i]);
    }
  }
  return I;
}

inline double integral(const std::vector<double>& f, double dt) {
  auto I = cumulative_integral(f, dt);
  return I.empty() ? 0.0 : I.back();
}

/// Plain cumulative trapezoid.
inline std::vector<double> cumulative_trapezoid(const std::vector<double>& f,
                                                double dt) {
  std::vector<double> I(f.size(), 0.0);
  for (std::size_t i = 1; i < f.size(); ++i)
    I[i] = I[i - 1] + 0.5 * dt * (f[i - 1] + f[i]);
  return I;
}

}  // namespace viscospec

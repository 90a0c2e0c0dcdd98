#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "viscospec/fft.hpp"
#include "viscospec/grid.hpp"
#include "viscospec/mode_table.hpp"

namespace viscospec {

using cdouble = std::complex<double>;

/// Scalar field in dual representation: real nodal values and complex
/// Fourier coefficients, kept consistent from construction on.
/// Fields are immutable; operations return new fields.
class ScalarField {
 public:
  ScalarField() = default;

  static ScalarField from_phys(const Grid& grid, std::vector<double> phys) {
    if (phys.size() != grid.size())
      throw InvalidShape("ScalarField: physical size mismatch");
    ScalarField f;
    f.grid_ = grid;
    f.spec_ = fft_forward(grid, phys);
    f.phys_ = std::move(phys);
    return f;
  }

  /// Coefficients are symmetrized so the physical field is exactly real.
  static ScalarField from_spec(const Grid& grid, std::vector<cdouble> spec) {
    if (spec.size() != grid.size())
      throw InvalidShape("ScalarField: spectral size mismatch");
    symmetrize(grid, spec);
    ScalarField f;
    f.grid_ = grid;
    f.phys_ = fft_inverse(grid, spec);
    f.spec_ = std::move(spec);
    return f;
  }

  static ScalarField zero(const Grid& grid) {
    ScalarField f;
    f.grid_ = grid;
    f.phys_.assign(grid.size(), 0.0);
    f.spec_.assign(grid.size(), cdouble(0.0, 0.0));
    return f;
  }

  static ScalarField constant(const Grid& grid, double c) {
    ScalarField f;
    f.grid_ = grid;
    f.phys_.assign(grid.size(), c);
    f.spec_.assign(grid.size(), cdouble(0.0, 0.0));
    f.spec_[0] = c;
    return f;
  }

  const Grid& grid() const { return grid_; }
  const std::vector<double>& phys() const { return phys_; }
  const std::vector<cdouble>& spec() const { return spec_; }

 private:
  // Replace spec by its conjugate-symmetric part, (f(k)+conj(f(-k)))/2.
  static void symmetrize(const Grid& grid, std::vector<cdouble>& spec) {
    const ModeTable& t = ModeTable::get(grid);
    std::vector<cdouble> sym(spec.size());
    for (std::size_t flat = 0; flat < spec.size(); ++flat)
      sym[flat] = 0.5 * (spec[flat] + std::conj(spec[t.conj_flat[flat]]));
    spec.swap(sym);
  }

  Grid grid_;
  std::vector<double> phys_;
  std::vector<cdouble> spec_;
};

/// Velocity-like field: d scalar components on a shared grid.
class VectorField {
 public:
  VectorField() = default;
  VectorField(const Grid& grid, std::vector<ScalarField> comps)
      : grid_(grid), comps_(std::move(comps)) {
    if (static_cast<int>(comps_.size()) != grid_.d)
      throw InvalidShape("VectorField: wrong component count");
    for (const auto& c : comps_)
      if (c.grid() != grid_) throw InvalidShape("VectorField: grid mismatch");
  }

  static VectorField zero(const Grid& grid) {
    std::vector<ScalarField> comps(grid.d, ScalarField::zero(grid));
    return VectorField(grid, std::move(comps));
  }

  const Grid& grid() const { return grid_; }
  const ScalarField& operator[](int i) const { return comps_[i]; }
  int dim() const { return grid_.d; }

 private:
  Grid grid_;
  std::vector<ScalarField> comps_;
};

/// Deformation-gradient-like field: d x d scalar components, row-major.
class TensorField {
 public:
  TensorField() = default;
  TensorField(const Grid& grid, std::vector<ScalarField> comps)
      : grid_(grid), comps_(std::move(comps)) {
    if (static_cast<int>(comps_.size()) != grid_.d * grid_.d)
      throw InvalidShape("TensorField: wrong component count");
    for (const auto& c : comps_)
      if (c.grid() != grid_) throw InvalidShape("TensorField: grid mismatch");
  }

  static TensorField zero(const Grid& grid) {
    std::vector<ScalarField> comps(grid.d * grid.d, ScalarField::zero(grid));
    return TensorField(grid, std::move(comps));
  }

  static TensorField identity(const Grid& grid) {
    std::vector<ScalarField> comps;
    comps.reserve(grid.d * grid.d);
    for (int i = 0; i < grid.d; ++i)
      for (int j = 0; j < grid.d; ++j)
        comps.push_back(i == j ? ScalarField::constant(grid, 1.0)
                               : ScalarField::zero(grid));
    return TensorField(grid, std::move(comps));
  }

  const Grid& grid() const { return grid_; }
  const ScalarField& operator()(int i, int j) const {
    return comps_[i * grid_.d + j];
  }
  int dim() const { return grid_.d; }

 private:
  Grid grid_;
  std::vector<ScalarField> comps_;
};

}  // namespace viscospec

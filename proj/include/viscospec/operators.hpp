#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "viscospec/field.hpp"
#include "viscospec/mode_table.hpp"

namespace viscospec {
namespace spec_ops {

// Raw kernels on spectral coefficient arrays. Index conventions:
// (grad u)_ij = d_j u_i, tensor divergence contracts the first index,
// (div F)_j = sum_i d_i F_ij.

/// Wavenumbers for differentiation; the Nyquist mode carries no usable
/// sign information for odd derivatives and is dropped.
inline std::vector<double> deriv_wavenumbers(const Grid& grid) {
  std::vector<double> k(grid.n);
  for (int i = 0; i < grid.n; ++i)
    k[i] = (i == grid.n / 2) ? 0.0 : grid.k_int(i) * grid.k_scale();
  return k;
}

inline std::vector<cdouble> deriv(const Grid& grid,
                                  const std::vector<cdouble>& spec, int axis) {
  const ModeTable& t = ModeTable::get(grid);
  const double* dk = t.dk.data() + static_cast<std::size_t>(axis) * spec.size();
  std::vector<cdouble> out(spec.size());
  for (std::size_t flat = 0; flat < spec.size(); ++flat)
    out[flat] = cdouble(0.0, dk[flat]) * spec[flat];
  return out;
}

inline std::vector<cdouble> laplacian(const Grid& grid,
                                      const std::vector<cdouble>& spec) {
  const ModeTable& t = ModeTable::get(grid);
  std::vector<cdouble> out(spec.size());
  const double s2 = grid.k_scale() * grid.k_scale();
  for (std::size_t flat = 0; flat < spec.size(); ++flat)
    out[flat] = -t.k2[flat] * s2 * spec[flat];
  return out;
}

/// 2/3-rule truncation: zero every mode with any |k_axis| > n/3.
inline void dealias_inplace(const Grid& grid, std::vector<cdouble>& spec) {
  const ModeTable& t = ModeTable::get(grid);
  for (std::size_t flat = 0; flat < spec.size(); ++flat)
    if (!t.keep[flat]) spec[flat] = cdouble(0.0, 0.0);
}

/// Modewise Leray projector applied to the d spectral component arrays
/// of a vector field: P_k = I - k k^T / |k|^2, identity at k = 0. Uses
/// the same Nyquist-zeroed wavenumbers as differentiation, so P is the
/// exact orthogonal projector onto the kernel of the discrete divergence
/// (and respects conjugate symmetry at the aliased Nyquist pairs).
inline void project_divfree_inplace(const Grid& grid,
                                    std::vector<std::vector<cdouble>>& comps) {
  const ModeTable& t = ModeTable::get(grid);
  const std::size_t total = grid.size();
  for (std::size_t flat = 0; flat < total; ++flat) {
    double k2 = 0.0;
    for (int a = 0; a < grid.d; ++a) {
      double k = t.dk[a * total + flat];
      k2 += k * k;
    }
    if (k2 == 0.0) continue;
    cdouble kdotu(0.0, 0.0);
    for (int a = 0; a < grid.d; ++a)
      kdotu += t.dk[a * total + flat] * comps[a][flat];
    kdotu /= k2;
    for (int a = 0; a < grid.d; ++a)
      comps[a][flat] -= t.dk[a * total + flat] * kdotu;
  }
}

/// Discrete L2 inner product via Parseval, (f,g) = L^d sum_k f_k conj(g_k).
inline double inner(const Grid& grid, const std::vector<cdouble>& f,
                    const std::vector<cdouble>& g) {
  double acc = 0.0;
  double vol = 1.0;
  for (int a = 0; a < grid.d; ++a) vol *= grid.length;
  for (std::size_t i = 0; i < f.size(); ++i)
    acc += f[i].real() * g[i].real() + f[i].imag() * g[i].imag();
  return vol * acc;
}

/// Squared H1 seminorm, |grad f|^2 = L^d sum_k |k|^2 |f_k|^2.
inline double grad_norm2(const Grid& grid, const std::vector<cdouble>& f) {
  double acc = 0.0;
  double vol = 1.0;
  for (int a = 0; a < grid.d; ++a) vol *= grid.length;
  const double s2 = grid.k_scale() * grid.k_scale();
  const ModeTable& t = ModeTable::get(grid);
  for (std::size_t flat = 0; flat < f.size(); ++flat)
    acc += t.k2[flat] * s2 * std::norm(f[flat]);
  return vol * acc;
}

}  // namespace spec_ops

// ---------------------------------------------------------------------------
// Field-level operations.

inline ScalarField derivative(const ScalarField& f, int axis) {
  return ScalarField::from_spec(f.grid(), spec_ops::deriv(f.grid(), f.spec(), axis));
}

inline ScalarField laplacian(const ScalarField& f) {
  return ScalarField::from_spec(f.grid(), spec_ops::laplacian(f.grid(), f.spec()));
}

inline ScalarField dealias(const ScalarField& f) {
  auto spec = f.spec();
  spec_ops::dealias_inplace(f.grid(), spec);
  return ScalarField::from_spec(f.grid(), std::move(spec));
}

/// div u = sum_i d_i u_i.
inline ScalarField divergence_vec(const VectorField& u) {
  const Grid& g = u.grid();
  std::vector<cdouble> acc(g.size(), cdouble(0.0, 0.0));
  for (int i = 0; i < g.d; ++i) {
    auto di = spec_ops::deriv(g, u[i].spec(), i);
    for (std::size_t m = 0; m < acc.size(); ++m) acc[m] += di[m];
  }
  return ScalarField::from_spec(g, std::move(acc));
}

/// (div F)_j = sum_i d_i F_ij, the first-index contraction.
inline VectorField divergence_tensor(const TensorField& F) {
  const Grid& g = F.grid();
  std::vector<ScalarField> comps;
  comps.reserve(g.d);
  for (int j = 0; j < g.d; ++j) {
    std::vector<cdouble> acc(g.size(), cdouble(0.0, 0.0));
    for (int i = 0; i < g.d; ++i) {
      auto di = spec_ops::deriv(g, F(i, j).spec(), i);
      for (std::size_t m = 0; m < acc.size(); ++m) acc[m] += di[m];
    }
    comps.push_back(ScalarField::from_spec(g, std::move(acc)));
  }
  return VectorField(g, std::move(comps));
}

inline VectorField gradient(const ScalarField& f) {
  const Grid& g = f.grid();
  std::vector<ScalarField> comps;
  comps.reserve(g.d);
  for (int a = 0; a < g.d; ++a) comps.push_back(derivative(f, a));
  return VectorField(g, std::move(comps));
}

inline VectorField project_divfree_vec(const VectorField& u) {
  const Grid& g = u.grid();
  std::vector<std::vector<cdouble>> comps(g.d);
  for (int i = 0; i < g.d; ++i) comps[i] = u[i].spec();
  spec_ops::project_divfree_inplace(g, comps);
  std::vector<ScalarField> out;
  out.reserve(g.d);
  for (int i = 0; i < g.d; ++i)
    out.push_back(ScalarField::from_spec(g, std::move(comps[i])));
  return VectorField(g, std::move(out));
}

/// Column-wise Leray projection: for each column j, project the vector
/// (F_1j, ..., F_dj) over the first index.
inline TensorField project_divfree_tensor(const TensorField& F) {
  const Grid& g = F.grid();
  std::vector<ScalarField> out(static_cast<std::size_t>(g.d) * g.d);
  for (int j = 0; j < g.d; ++j) {
    std::vector<std::vector<cdouble>> col(g.d);
    for (int i = 0; i < g.d; ++i) col[i] = F(i, j).spec();
    spec_ops::project_divfree_inplace(g, col);
    for (int i = 0; i < g.d; ++i)
      out[i * g.d + j] = ScalarField::from_spec(g, std::move(col[i]));
  }
  return TensorField(g, std::move(out));
}

/// Pointwise product of nodal values, dealiased (2/3 rule).
inline ScalarField multiply_dealias(const ScalarField& a, const ScalarField& b) {
  if (a.grid() != b.grid()) throw InvalidShape("multiply: grid mismatch");
  const Grid& g = a.grid();
  std::vector<double> prod(g.size());
  for (std::size_t m = 0; m < prod.size(); ++m)
    prod[m] = a.phys()[m] * b.phys()[m];
  auto spec = fft_forward(g, prod);
  spec_ops::dealias_inplace(g, spec);
  return ScalarField::from_spec(g, std::move(spec));
}

inline double inner(const ScalarField& a, const ScalarField& b) {
  if (a.grid() != b.grid()) throw InvalidShape("inner: grid mismatch");
  return spec_ops::inner(a.grid(), a.spec(), b.spec());
}

inline double inner(const VectorField& a, const VectorField& b) {
  if (a.grid() != b.grid()) throw InvalidShape("inner: grid mismatch");
  double acc = 0.0;
  for (int i = 0; i < a.dim(); ++i) acc += inner(a[i], b[i]);
  return acc;
}

inline double inner(const TensorField& a, const TensorField& b) {
  if (a.grid() != b.grid()) throw InvalidShape("inner: grid mismatch");
  double acc = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) acc += inner(a(i, j), b(i, j));
  return acc;
}

inline double norm2(const ScalarField& f) { return inner(f, f); }
inline double norm2(const VectorField& f) { return inner(f, f); }
inline double norm2(const TensorField& f) { return inner(f, f); }

inline double norm(const ScalarField& f) { return std::sqrt(norm2(f)); }
inline double norm(const VectorField& f) { return std::sqrt(norm2(f)); }
inline double norm(const TensorField& f) { return std::sqrt(norm2(f)); }

/// |grad u|^2 summed over components.
inline double grad_norm2(const VectorField& u) {
  double acc = 0.0;
  for (int i = 0; i < u.dim(); ++i)
    acc += spec_ops::grad_norm2(u.grid(), u[i].spec());
  return acc;
}

inline double grad_norm2(const TensorField& F) {
  double acc = 0.0;
  for (int i = 0; i < F.dim(); ++i)
    for (int j = 0; j < F.dim(); ++j)
      acc += spec_ops::grad_norm2(F.grid(), F(i, j).spec());
  return acc;
}

inline double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.phys()) m = std::max(m, std::abs(v));
  return m;
}

/// Max over nodes of the Euclidean vector magnitude.
inline double max_abs(const VectorField& u) {
  double m = 0.0;
  for (std::size_t p = 0; p < u.grid().size(); ++p) {
    double s = 0.0;
    for (int i = 0; i < u.dim(); ++i) s += u[i].phys()[p] * u[i].phys()[p];
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

/// Max over nodes of the pointwise Frobenius norm.
inline double max_abs(const TensorField& F) {
  double m = 0.0;
  for (std::size_t p = 0; p < F.grid().size(); ++p) {
    double s = 0.0;
    for (int i = 0; i < F.dim(); ++i)
      for (int j = 0; j < F.dim(); ++j) {
        double v = F(i, j).phys()[p];
        s += v * v;
      }
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

}  // namespace viscospec

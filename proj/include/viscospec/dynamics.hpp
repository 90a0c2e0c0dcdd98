#pragma once

#include <cmath>
#include <vector>

#include "viscospec/operators.hpp"

namespace viscospec {

/// Instantaneous solver state. The spectral coefficients of u and F are
/// the Galerkin coordinates; eps is the deformation regularization.
struct SimState {
  double t = 0.0;
  VectorField u;
  TensorField F;
  double eps = 0.0;

  const Grid& grid() const { return u.grid(); }
};

struct RhsEval {
  VectorField du_dt;
  TensorField dF_dt;
  double exchange = 0.0;  // (F F^T, grad u) at this state
};

enum class AdvectionForm { convective, divergence };

namespace dynamics_detail {

// Spectral coefficients of the dealiased pointwise product a*b.
inline std::vector<cdouble> product_spec(const Grid& g,
                                         const std::vector<double>& a,
                                         const std::vector<double>& b) {
  std::vector<double> prod(a.size());
  for (std::size_t m = 0; m < prod.size(); ++m) prod[m] = a[m] * b[m];
  auto spec = fft_forward(g, prod);
  spec_ops::dealias_inplace(g, spec);
  return spec;
}

// Dealiased spectra of (F F^T)_ij = sum_k F_ik F_jk, upper triangle only.
inline std::vector<std::vector<cdouble>> ff_transpose_spec(const SimState& s) {
  const Grid& g = s.grid();
  const int d = g.d;
  std::vector<std::vector<cdouble>> P(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      std::vector<double> prod(g.size(), 0.0);
      for (int k = 0; k < d; ++k) {
        const auto& a = s.F(i, k).phys();
        const auto& b = s.F(j, k).phys();
        for (std::size_t m = 0; m < prod.size(); ++m) prod[m] += a[m] * b[m];
      }
      auto spec = fft_forward(g, prod);
      spec_ops::dealias_inplace(g, spec);
      if (i != j) P[j * d + i] = spec;
      P[i * d + j] = std::move(spec);
    }
  return P;
}

inline double exchange_from_spec(const SimState& s,
                                 const std::vector<std::vector<cdouble>>& P) {
  const Grid& g = s.grid();
  const int d = g.d;
  const auto kd = spec_ops::deriv_wavenumbers(g);
  double vol = 1.0;
  for (int a = 0; a < d; ++a) vol *= g.length;
  // (F F^T, grad u) = L^d Re sum_k P_ij(k) conj(i k_j u_i(k))
  const ModeTable& t = ModeTable::get(g);
  double acc = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const auto& p = P[i * d + j];
      const auto& ui = s.u[i].spec();
      const double* dkj = t.dk.data() + static_cast<std::size_t>(j) * g.size();
      for (std::size_t flat = 0; flat < p.size(); ++flat) {
        cdouble dju = cdouble(0.0, dkj[flat]) * ui[flat];
        acc += p[flat].real() * dju.real() + p[flat].imag() * dju.imag();
      }
    }
  return vol * acc;
}

}  // namespace dynamics_detail

/// (F F^T, grad u) evaluated by spectral quadrature on the dealiased
/// product; this is the quantity that cancels between the kinetic and
/// elastic energy balances.
inline double exchange_term(const SimState& s) {
  auto P = dynamics_detail::ff_transpose_spec(s);
  return dynamics_detail::exchange_from_spec(s, P);
}

/// Sum of the two energy productions, computed independently on each
/// side: (u, div(F F^T)) from the velocity balance and ((grad u) F, F)
/// from the deformation balance. Cancels to roundoff on band-limited
/// states.
inline double exchange_cancellation(const SimState& s) {
  const Grid& g = s.grid();
  const int d = g.d;

  // Velocity side: (u, div(F F^T)) with the dealiased product spectrum.
  auto P = dynamics_detail::ff_transpose_spec(s);
  double prod_u = 0.0;
  {
    const ModeTable& t = ModeTable::get(g);
    double vol = 1.0;
    for (int a = 0; a < d; ++a) vol *= g.length;
    for (int j = 0; j < d; ++j) {
      const auto& uj = s.u[j].spec();
      for (int i = 0; i < d; ++i) {
        const auto& p = P[i * d + j];
        const double* dki = t.dk.data() + static_cast<std::size_t>(i) * g.size();
        for (std::size_t flat = 0; flat < p.size(); ++flat) {
          cdouble div_term = cdouble(0.0, dki[flat]) * p[flat];
          prod_u += vol * (div_term.real() * uj[flat].real() +
                           div_term.imag() * uj[flat].imag());
        }
      }
    }
  }

  // Deformation side: (dealias((grad u) F), F) by physical quadrature.
  double prod_F = 0.0;
  std::vector<std::vector<double>> du(static_cast<std::size_t>(d) * d);
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      du[k * d + i] = fft_inverse(g, spec_ops::deriv(g, s.u[i].spec(), k));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      std::vector<double> stretch(g.size(), 0.0);
      for (int k = 0; k < d; ++k) {
        const auto& dku = du[k * d + i];
        const auto& fkj = s.F(k, j).phys();
        for (std::size_t m = 0; m < stretch.size(); ++m)
          stretch[m] += dku[m] * fkj[m];
      }
      auto spec = fft_forward(g, stretch);
      spec_ops::dealias_inplace(g, spec);
      prod_F += spec_ops::inner(g, spec, s.F(i, j).spec());
    }
  return prod_u + prod_F;
}

/// P[-div(u x u) + Lap u + div(F F^T)]; quadratic terms are formed
/// pseudo-spectrally and dealiased before differentiation. The pressure
/// is eliminated by the projection.
inline VectorField momentum_rhs(const SimState& s) {
  const Grid& g = s.grid();
  const int d = g.d;
  const auto kd = spec_ops::deriv_wavenumbers(g);
  const double s2 = g.k_scale() * g.k_scale();

  // Dealiased spectra of u_i u_j (symmetric) and (F F^T)_ij.
  std::vector<std::vector<cdouble>> UU(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      auto spec = dynamics_detail::product_spec(g, s.u[i].phys(), s.u[j].phys());
      if (i != j) UU[j * d + i] = spec;
      UU[i * d + j] = std::move(spec);
    }
  auto P = dynamics_detail::ff_transpose_spec(s);

  const ModeTable& t = ModeTable::get(g);
  std::vector<std::vector<cdouble>> rhs(d);
  for (int j = 0; j < d; ++j) {
    rhs[j].assign(g.size(), cdouble(0.0, 0.0));
    const auto& uj = s.u[j].spec();
    for (std::size_t flat = 0; flat < g.size(); ++flat) {
      cdouble acc = -t.k2[flat] * s2 * uj[flat];  // viscous term
      for (int i = 0; i < d; ++i) {
        cdouble iki(0.0, t.dk[i * g.size() + flat]);
        acc -= iki * UU[i * d + j][flat];  // -div(u x u)
        acc += iki * P[i * d + j][flat];   // +div(F F^T)
      }
      rhs[j][flat] = acc;
    }
  }
  spec_ops::project_divfree_inplace(g, rhs);

  std::vector<ScalarField> comps;
  comps.reserve(d);
  for (int j = 0; j < d; ++j)
    comps.push_back(ScalarField::from_spec(g, std::move(rhs[j])));
  return VectorField(g, std::move(comps));
}

/// dF_ij/dt = -u.grad F_ij + (grad u F)_ij + eps (Lap F)_ij, followed by
/// the column projection. Advection defaults to convective form; the
/// divergence form div(u x F) is available for cross-checking.
inline TensorField deformation_rhs(const SimState& s,
                                   AdvectionForm form = AdvectionForm::convective) {
  const Grid& g = s.grid();
  const int d = g.d;
  const auto kd = spec_ops::deriv_wavenumbers(g);
  const double s2 = g.k_scale() * g.k_scale();

  // Physical gradients of u: du[k][i] = d_k u_i.
  std::vector<std::vector<double>> du(static_cast<std::size_t>(d) * d);
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      du[k * d + i] = fft_inverse(g, spec_ops::deriv(g, s.u[i].spec(), k));

  std::vector<std::vector<cdouble>> rhs(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      std::vector<cdouble> adv;
      if (form == AdvectionForm::convective) {
        // sum_k u_k d_k F_ij, product dealiased.
        std::vector<double> conv(g.size(), 0.0);
        for (int k = 0; k < d; ++k) {
          auto dF = fft_inverse(g, spec_ops::deriv(g, s.F(i, j).spec(), k));
          const auto& uk = s.u[k].phys();
          for (std::size_t m = 0; m < conv.size(); ++m) conv[m] += uk[m] * dF[m];
        }
        adv = fft_forward(g, conv);
        spec_ops::dealias_inplace(g, adv);
      } else {
        // sum_k d_k (u_k F_ij), products dealiased before the derivative.
        adv.assign(g.size(), cdouble(0.0, 0.0));
        const ModeTable& t = ModeTable::get(g);
        for (int k = 0; k < d; ++k) {
          auto prod = dynamics_detail::product_spec(g, s.u[k].phys(),
                                                    s.F(i, j).phys());
          const double* dkk = t.dk.data() + static_cast<std::size_t>(k) * g.size();
          for (std::size_t flat = 0; flat < adv.size(); ++flat)
            adv[flat] += cdouble(0.0, dkk[flat]) * prod[flat];
        }
      }

      // Stretching sum_k (d_k u_i) F_kj, dealiased.
      std::vector<double> st(g.size(), 0.0);
      for (int k = 0; k < d; ++k) {
        const auto& dki = du[k * d + i];
        const auto& fkj = s.F(k, j).phys();
        for (std::size_t m = 0; m < st.size(); ++m) st[m] += dki[m] * fkj[m];
      }
      auto stretch = fft_forward(g, st);
      spec_ops::dealias_inplace(g, stretch);

      const auto& fij = s.F(i, j).spec();
      const auto& k2 = ModeTable::get(g).k2;
      std::vector<cdouble> out(g.size());
      for (std::size_t flat = 0; flat < out.size(); ++flat)
        out[flat] = -adv[flat] + stretch[flat] - s.eps * k2[flat] * s2 * fij[flat];
      rhs[i * d + j] = std::move(out);
    }

  // Column projection (numerical safeguard; Lap F of a column-divergence-
  // free F is already column-divergence-free on the torus).
  for (int j = 0; j < d; ++j) {
    std::vector<std::vector<cdouble>> col(d);
    for (int i = 0; i < d; ++i) col[i] = std::move(rhs[i * d + j]);
    spec_ops::project_divfree_inplace(g, col);
    for (int i = 0; i < d; ++i) rhs[i * d + j] = std::move(col[i]);
  }

  std::vector<ScalarField> comps;
  comps.reserve(static_cast<std::size_t>(d) * d);
  for (auto& r : rhs) comps.push_back(ScalarField::from_spec(g, std::move(r)));
  return TensorField(g, std::move(comps));
}

inline RhsEval rhs_eval(const SimState& s,
                        AdvectionForm form = AdvectionForm::convective) {
  RhsEval e;
  e.du_dt = momentum_rhs(s);
  e.dF_dt = deformation_rhs(s, form);
  e.exchange = exchange_term(s);
  return e;
}

}  // namespace viscospec

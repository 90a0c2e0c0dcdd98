#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "viscospec/diagnostics.hpp"
#include "viscospec/integrator.hpp"
#include "viscospec/quadrature.hpp"

namespace viscospec {

struct GridMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InitialMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Spectral transfer between resolutions

/// Restrict or prolong a field to another grid of the same torus by
/// copying the shared Fourier band.
inline ScalarField resample(const ScalarField& f, const Grid& target) {
  const Grid& src = f.grid();
  if (src.d != target.d || src.length != target.length)
    throw GridMismatch("resample: incompatible domains");
  if (src == target) return f;
  const int kb = std::min(src.n, target.n) / 2 - 1;  // shared band, Nyquist excluded
  std::vector<cdouble> spec(target.size(), cdouble(0.0, 0.0));
  for (std::size_t flat = 0; flat < src.size(); ++flat) {
    auto idx = src.unravel(flat);
    bool keep = true;
    std::size_t tflat = 0;
    for (int a = 0; a < src.d; ++a) {
      int k = src.k_int(idx[a]);
      if (std::abs(k) > kb) {
        keep = false;
        break;
      }
      tflat = tflat * target.n + static_cast<std::size_t>((k + target.n) % target.n);
    }
    if (keep) spec[tflat] = f.spec()[flat];
  }
  return ScalarField::from_spec(target, std::move(spec));
}

inline VectorField resample(const VectorField& u, const Grid& target) {
  std::vector<ScalarField> comps;
  comps.reserve(u.dim());
  for (int i = 0; i < u.dim(); ++i) comps.push_back(resample(u[i], target));
  return VectorField(target, std::move(comps));
}

inline TensorField resample(const TensorField& F, const Grid& target) {
  std::vector<ScalarField> comps;
  comps.reserve(F.dim() * F.dim());
  for (int i = 0; i < F.dim(); ++i)
    for (int j = 0; j < F.dim(); ++j) comps.push_back(resample(F(i, j), target));
  return TensorField(target, std::move(comps));
}

inline SimState resample(const SimState& s, const Grid& target) {
  SimState out;
  out.t = s.t;
  out.eps = s.eps;
  out.u = resample(s.u, target);
  out.F = resample(s.F, target);
  return out;
}

// ---------------------------------------------------------------------------
// Relative energy

/// 0.5|u - u~|^2 + 0.5|F - F~|^2 + (supplied gradient-gap accumulator).
inline double rel_energy(const SimState& s, const SimState& s_ref,
                         double visc_accum_diff) {
  SimState ref = s_ref.grid() == s.grid() ? s_ref : resample(s_ref, s.grid());
  double acc = 0.0;
  for (int i = 0; i < s.grid().d; ++i) {
    acc += norm2(ScalarField::from_spec(
        s.grid(), [&] {
          auto v = s.u[i].spec();
          const auto& w = ref.u[i].spec();
          for (std::size_t m = 0; m < v.size(); ++m) v[m] -= w[m];
          return v;
        }()));
  }
  for (int i = 0; i < s.grid().d; ++i)
    for (int j = 0; j < s.grid().d; ++j) {
      acc += norm2(ScalarField::from_spec(
          s.grid(), [&] {
            auto v = s.F(i, j).spec();
            const auto& w = ref.F(i, j).spec();
            for (std::size_t m = 0; m < v.size(); ++m) v[m] -= w[m];
            return v;
          }()));
    }
  return 0.5 * acc + visc_accum_diff;
}

struct SupNorms {
  double grad_u_inf = 0.0;   // max nodal Frobenius norm of grad u
  double grad_F_inf = 0.0;   // max nodal Frobenius norm of grad F
  double F_inf = 0.0;        // max nodal Frobenius norm of F
  bool tail_warning = false; // spectral tail above 1e-8 of the field norm
};

/// Sup norms of the strong-solution surrogate, evaluated on the grid.
inline SupNorms sup_norms(const SimState& s) {
  const Grid& g = s.grid();
  const int d = g.d;
  SupNorms out;

  std::vector<std::vector<double>> du(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      du[i * d + j] = fft_inverse(g, spec_ops::deriv(g, s.u[i].spec(), j));
  std::vector<std::vector<double>> dF(static_cast<std::size_t>(d) * d * d);
  for (int a = 0; a < d; ++a)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        dF[(a * d + i) * d + j] =
            fft_inverse(g, spec_ops::deriv(g, s.F(i, j).spec(), a));

  for (std::size_t p = 0; p < g.size(); ++p) {
    double su = 0.0;
    for (const auto& c : du) su += c[p] * c[p];
    out.grad_u_inf = std::max(out.grad_u_inf, su);
    double sF = 0.0;
    for (const auto& c : dF) sF += c[p] * c[p];
    out.grad_F_inf = std::max(out.grad_F_inf, sF);
  }
  out.grad_u_inf = std::sqrt(out.grad_u_inf);
  out.grad_F_inf = std::sqrt(out.grad_F_inf);
  out.F_inf = max_abs(s.F);

  // Resolution warning: energy in the outer third of the spectrum.
  auto tail_fraction = [&](const std::vector<cdouble>& spec) {
    double tail = 0.0, total = 0.0;
    const double cut = g.n / 3.0;
    for (std::size_t flat = 0; flat < spec.size(); ++flat) {
      auto idx = g.unravel(flat);
      bool outer = false;
      for (int a = 0; a < d; ++a)
        if (std::abs(g.k_int(idx[a])) > cut) outer = true;
      double e = std::norm(spec[flat]);
      total += e;
      if (outer) tail += e;
    }
    return total > 0.0 ? std::sqrt(tail / total) : 0.0;
  };
  for (int i = 0; i < d; ++i)
    if (tail_fraction(s.u[i].spec()) > 1e-8) out.tail_warning = true;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (tail_fraction(s.F(i, j).spec()) > 1e-8) out.tail_warning = true;
  return out;
}

/// Run with the step tuned so snapshots land exactly on the nsnap uniform
/// times j*t_end/nsnap. Runs at different resolutions then share snapshot
/// times and can be compared pointwise.
inline Trajectory run_aligned(const SimState& initial, IntegratorConfig cfg,
                              int nsnap) {
  if (nsnap < 1) throw std::invalid_argument("run_aligned: nsnap < 1");
  const double ts = cfg.t_end / nsnap;
  double stable = cfl_dt(initial, cfg);
  int m = static_cast<int>(std::ceil(ts / stable - 1e-12));
  if (m < 1) m = 1;
  cfg.dt = ts / m;
  cfg.snapshot_every = m;
  return run(initial, cfg);
}

// ---------------------------------------------------------------------------
// Uniqueness verification

struct RelEnergySeries {
  std::vector<double> t;
  std::vector<double> rel_energy;
  std::vector<double> coeff;              // Gronwall coefficient at t
  std::vector<double> gronwall_envelope;  // rel_energy(0) exp(c int coeff)
};

struct UniquenessReport {
  RelEnergySeries series;
  double initial_gap = 0.0;
  double sup_rel_energy = 0.0;
  double c_used = 1.0;
  double c_fit = 0.0;  // minimal c making the envelope hold within tol
  bool envelope_ok = true;
  bool pass = true;
};

/// Compare a trajectory against a strong-solution surrogate trajectory
/// (typically a higher-resolution run from the same data). Asserts
/// rel_energy(t) <= envelope(t) + tol for all stored times.
inline UniquenessReport verify_uniqueness(const Trajectory& traj,
                                          const Trajectory& traj_ref, double c,
                                          double tol, double tol0 = 1e-10) {
  if (traj.snapshots.empty() || traj_ref.snapshots.empty())
    throw LedgerMissing("verify_uniqueness: empty trajectory");
  if (traj.snapshots.size() != traj_ref.snapshots.size())
    throw GridMismatch("verify_uniqueness: snapshot counts differ");
  const Grid& g = traj.snapshots.front().grid();

  UniquenessReport rep;
  rep.c_used = c;

  const std::size_t count = traj.snapshots.size();
  std::vector<double> grad_gap_rate(count);
  std::vector<SimState> ref_on_grid;
  ref_on_grid.reserve(count);
  for (std::size_t m = 0; m < count; ++m) {
    const SimState& a = traj.snapshots[m];
    const SimState& b = traj_ref.snapshots[m];
    if (std::abs(a.t - b.t) > 1e-9)
      throw GridMismatch("verify_uniqueness: snapshot times differ");
    ref_on_grid.push_back(b.grid() == g ? b : resample(b, g));
    double rate = 0.0;
    for (int i = 0; i < g.d; ++i) {
      auto diff = a.u[i].spec();
      const auto& w = ref_on_grid.back().u[i].spec();
      for (std::size_t x = 0; x < diff.size(); ++x) diff[x] -= w[x];
      rate += spec_ops::grad_norm2(g, diff);
    }
    grad_gap_rate[m] = rate;
  }
  double sdt = count > 1 ? traj.snapshots[1].t - traj.snapshots[0].t : 0.0;
  auto grad_gap = cumulative_trapezoid(grad_gap_rate, sdt);

  std::vector<double> coeff(count);
  for (std::size_t m = 0; m < count; ++m) {
    auto sn = sup_norms(traj_ref.snapshots[m]);
    coeff[m] = sn.grad_u_inf + sn.grad_F_inf + sn.F_inf * sn.F_inf;
  }
  auto coeff_int = cumulative_trapezoid(coeff, sdt);

  for (std::size_t m = 0; m < count; ++m) {
    double re = rel_energy(traj.snapshots[m], ref_on_grid[m], grad_gap[m]);
    rep.series.t.push_back(traj.snapshots[m].t);
    rep.series.rel_energy.push_back(re);
    rep.series.coeff.push_back(coeff[m]);
    rep.sup_rel_energy = std::max(rep.sup_rel_energy, re);
  }
  rep.initial_gap = rep.series.rel_energy.front();
  if (rep.initial_gap > tol0)
    throw InitialMismatch("verify_uniqueness: rel_energy(0) exceeds tolerance");

  for (std::size_t m = 0; m < count; ++m) {
    double env = rep.initial_gap * std::exp(c * coeff_int[m]);
    rep.series.gronwall_envelope.push_back(env);
    if (rep.series.rel_energy[m] > env + tol) rep.envelope_ok = false;
    // Minimal c making the envelope hold at this time.
    if (rep.initial_gap > 0.0 && coeff_int[m] > 0.0) {
      double need = (rep.series.rel_energy[m] - tol) / rep.initial_gap;
      if (need > 1.0) rep.c_fit = std::max(rep.c_fit, std::log(need) / coeff_int[m]);
    }
  }
  rep.pass = rep.envelope_ok;
  return rep;
}

}  // namespace viscospec

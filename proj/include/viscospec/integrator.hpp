#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "viscospec/ledger.hpp"

namespace viscospec {

struct NonFinite : std::runtime_error {
  explicit NonFinite(double t_fail)
      : std::runtime_error("non-finite coefficient at t = " + std::to_string(t_fail)),
        t(t_fail) {}
  double t;
};

struct IntegratorConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  double cfl_safety = 0.5;   // in (0, 1]
  int snapshot_every = 1;    // steps between stored snapshots

  void validate() const {
    if (dt <= 0.0) throw std::invalid_argument("IntegratorConfig: dt must be > 0");
    if (t_end <= 0.0) throw std::invalid_argument("IntegratorConfig: t_end must be > 0");
    if (cfl_safety <= 0.0 || cfl_safety > 1.0)
      throw std::invalid_argument("IntegratorConfig: cfl_safety must be in (0,1]");
    if (snapshot_every < 1)
      throw std::invalid_argument("IntegratorConfig: snapshot_every must be >= 1");
  }
};

struct Trajectory {
  std::vector<SimState> snapshots;  // strictly increasing times, first at t=0
  EnergyLedger ledger;              // one row per step, plus the initial row
  double dt = 0.0;                  // constant step actually used
};

namespace integrator_detail {

inline bool all_finite(const std::vector<cdouble>& v) {
  for (const auto& c : v)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

inline bool state_finite(const SimState& s) {
  for (int i = 0; i < s.grid().d; ++i)
    if (!all_finite(s.u[i].spec())) return false;
  for (int i = 0; i < s.grid().d; ++i)
    for (int j = 0; j < s.grid().d; ++j)
      if (!all_finite(s.F(i, j).spec())) return false;
  return true;
}

// base + coef * increment, followed by both projections.
inline SimState stage_state(const SimState& base, double coef, const RhsEval& k,
                            double t_new) {
  const Grid& g = base.grid();
  const int d = g.d;
  std::vector<std::vector<cdouble>> u(d);
  for (int i = 0; i < d; ++i) {
    u[i] = base.u[i].spec();
    const auto& ki = k.du_dt[i].spec();
    for (std::size_t m = 0; m < u[i].size(); ++m) u[i][m] += coef * ki[m];
  }
  spec_ops::project_divfree_inplace(g, u);

  std::vector<std::vector<cdouble>> F(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      F[i * d + j] = base.F(i, j).spec();
      const auto& kij = k.dF_dt(i, j).spec();
      for (std::size_t m = 0; m < F[i * d + j].size(); ++m)
        F[i * d + j][m] += coef * kij[m];
    }
  for (int j = 0; j < d; ++j) {
    std::vector<std::vector<cdouble>> col(d);
    for (int i = 0; i < d; ++i) col[i] = std::move(F[i * d + j]);
    spec_ops::project_divfree_inplace(g, col);
    for (int i = 0; i < d; ++i) F[i * d + j] = std::move(col[i]);
  }

  SimState out;
  out.t = t_new;
  out.eps = base.eps;
  std::vector<ScalarField> uc;
  uc.reserve(d);
  for (int i = 0; i < d; ++i) uc.push_back(ScalarField::from_spec(g, std::move(u[i])));
  out.u = VectorField(g, std::move(uc));
  std::vector<ScalarField> Fc;
  Fc.reserve(static_cast<std::size_t>(d) * d);
  for (auto& f : F) Fc.push_back(ScalarField::from_spec(g, std::move(f)));
  out.F = TensorField(g, std::move(Fc));
  return out;
}

}  // namespace integrator_detail

struct StepResult {
  SimState state;
  double dvisc = 0.0;  // RK4-stage quadrature of |grad u|^2 over the step
  double dreg = 0.0;   // same for eps |grad F|^2
};

/// Classical four-stage explicit step on (u, F) jointly. Projections are
/// re-applied after every stage. Dissipation integrals are advanced with
/// the same RK4 weights, so the discrete energy balance closes at the
/// scheme's own order.
inline StepResult step_rk4_full(const SimState& s, double dt) {
  auto rate = [](const SimState& st) {
    return std::pair<double, double>(grad_norm2(st.u),
                                     st.eps * grad_norm2(st.F));
  };

  RhsEval k1 = rhs_eval(s);
  auto [v1, r1] = rate(s);
  SimState s1 = integrator_detail::stage_state(s, 0.5 * dt, k1, s.t + 0.5 * dt);
  RhsEval k2 = rhs_eval(s1);
  auto [v2, r2] = rate(s1);
  SimState s2 = integrator_detail::stage_state(s, 0.5 * dt, k2, s.t + 0.5 * dt);
  RhsEval k3 = rhs_eval(s2);
  auto [v3, r3] = rate(s2);
  SimState s3 = integrator_detail::stage_state(s, dt, k3, s.t + dt);
  RhsEval k4 = rhs_eval(s3);
  auto [v4, r4] = rate(s3);

  const Grid& g = s.grid();
  const int d = g.d;
  RhsEval ksum;
  {
    std::vector<ScalarField> uc;
    uc.reserve(d);
    for (int i = 0; i < d; ++i) {
      std::vector<cdouble> acc(g.size());
      const auto& a = k1.du_dt[i].spec();
      const auto& b = k2.du_dt[i].spec();
      const auto& c = k3.du_dt[i].spec();
      const auto& e = k4.du_dt[i].spec();
      for (std::size_t m = 0; m < acc.size(); ++m)
        acc[m] = (a[m] + 2.0 * b[m] + 2.0 * c[m] + e[m]) / 6.0;
      uc.push_back(ScalarField::from_spec(g, std::move(acc)));
    }
    ksum.du_dt = VectorField(g, std::move(uc));
    std::vector<ScalarField> Fc;
    Fc.reserve(static_cast<std::size_t>(d) * d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        std::vector<cdouble> acc(g.size());
        const auto& a = k1.dF_dt(i, j).spec();
        const auto& b = k2.dF_dt(i, j).spec();
        const auto& c = k3.dF_dt(i, j).spec();
        const auto& e = k4.dF_dt(i, j).spec();
        for (std::size_t m = 0; m < acc.size(); ++m)
          acc[m] = (a[m] + 2.0 * b[m] + 2.0 * c[m] + e[m]) / 6.0;
        Fc.push_back(ScalarField::from_spec(g, std::move(acc)));
      }
    ksum.dF_dt = TensorField(g, std::move(Fc));
  }

  StepResult res;
  res.state = integrator_detail::stage_state(s, dt, ksum, s.t + dt);
  res.dvisc = dt * (v1 + 2.0 * v2 + 2.0 * v3 + v4) / 6.0;
  res.dreg = dt * (r1 + 2.0 * r2 + 2.0 * r3 + r4) / 6.0;
  if (!integrator_detail::state_finite(res.state)) throw NonFinite(res.state.t);
  return res;
}

inline SimState step_rk4(const SimState& s, double dt) {
  return step_rk4_full(s, dt).state;
}

/// Stable step estimate: safety * min(advective, diffusive) limit,
/// never larger than the configured dt.
inline double cfl_dt(const SimState& s, const IntegratorConfig& cfg) {
  cfg.validate();
  const double kmax = s.grid().k_max();
  const double umax = max_abs(s.u);
  const double nu_eff = std::max(1.0, s.eps);
  double adv = umax > 0.0 ? 1.0 / (kmax * umax) : std::numeric_limits<double>::infinity();
  double diff = 2.0 / (nu_eff * kmax * kmax);
  double dt = cfg.cfl_safety * std::min(adv, diff);
  return std::min(dt, cfg.dt);
}

/// Integrate from the initial state to t_end with a constant step.
/// The step is min(cfg.dt, CFL bound at the initial state), adjusted so
/// an integer number of steps lands exactly on t_end. A ledger row is
/// appended every step; snapshots every cfg.snapshot_every steps (the
/// first and last states are always stored).
inline Trajectory run(const SimState& initial, const IntegratorConfig& cfg) {
  cfg.validate();
  double dt = cfl_dt(initial, cfg);
  long nsteps = static_cast<long>(std::ceil(cfg.t_end / dt - 1e-12));
  if (nsteps < 1) nsteps = 1;
  dt = cfg.t_end / static_cast<double>(nsteps);

  Trajectory traj;
  traj.dt = dt;
  traj.snapshots.push_back(initial);
  LedgerRow row = ledger_initial(initial);
  const double initial_total = row.kinetic + row.elastic;
  traj.ledger.push_back(row);

  SimState s = initial;
  for (long step = 1; step <= nsteps; ++step) {
    StepResult r = step_rk4_full(s, dt);
    s = std::move(r.state);
    s.t = dt * static_cast<double>(step);  // avoid accumulated roundoff
    row = ledger_update_increments(row, s, r.dvisc, r.dreg, initial_total);
    traj.ledger.push_back(row);
    if (step % cfg.snapshot_every == 0 || step == nsteps)
      traj.snapshots.push_back(s);
  }
  return traj;
}

}  // namespace viscospec

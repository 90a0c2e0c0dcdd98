#pragma once

#include <vector>

#include "viscospec/dynamics.hpp"

namespace viscospec {

/// One energy-ledger row per time step.
struct LedgerRow {
  double t = 0.0;
  double kinetic = 0.0;     // 0.5 |u|^2
  double elastic = 0.0;     // 0.5 |F|^2
  double visc_accum = 0.0;  // int_0^t |grad u|^2
  double reg_accum = 0.0;   // eps int_0^t |grad F|^2
  double exchange = 0.0;    // (F F^T, grad u) at t
  double balance_residual = 0.0;  // total + dissipation - initial total
  // Instantaneous dissipation rates, kept so the trapezoidal update can
  // proceed from the row alone.
  double visc_rate = 0.0;
  double reg_rate = 0.0;
};

using EnergyLedger = std::vector<LedgerRow>;

inline LedgerRow ledger_initial(const SimState& s) {
  LedgerRow row;
  row.t = s.t;
  row.kinetic = 0.5 * norm2(s.u);
  row.elastic = 0.5 * norm2(s.F);
  row.exchange = exchange_term(s);
  row.visc_rate = grad_norm2(s.u);
  row.reg_rate = s.eps * grad_norm2(s.F);
  return row;
}

/// Advance the accumulators by trapezoidal quadrature from the previous
/// row to the new state; exchange is recomputed at the new state.
inline LedgerRow ledger_update(const LedgerRow& prev, const SimState& s,
                               double dt, double initial_total) {
  LedgerRow row;
  row.t = s.t;
  row.kinetic = 0.5 * norm2(s.u);
  row.elastic = 0.5 * norm2(s.F);
  row.visc_rate = grad_norm2(s.u);
  row.reg_rate = s.eps * grad_norm2(s.F);
  row.visc_accum = prev.visc_accum + 0.5 * dt * (prev.visc_rate + row.visc_rate);
  row.reg_accum = prev.reg_accum + 0.5 * dt * (prev.reg_rate + row.reg_rate);
  row.exchange = exchange_term(s);
  row.balance_residual =
      row.kinetic + row.elastic + row.visc_accum + row.reg_accum - initial_total;
  return row;
}

/// Variant taking externally integrated dissipation increments. The
/// integrator supplies RK4-stage quadrature so the balance residual
/// tracks the scheme's own fourth-order band.
inline LedgerRow ledger_update_increments(const LedgerRow& prev, const SimState& s,
                                          double dvisc, double dreg,
                                          double initial_total) {
  LedgerRow row;
  row.t = s.t;
  row.kinetic = 0.5 * norm2(s.u);
  row.elastic = 0.5 * norm2(s.F);
  row.visc_rate = grad_norm2(s.u);
  row.reg_rate = s.eps * grad_norm2(s.F);
  row.visc_accum = prev.visc_accum + dvisc;
  row.reg_accum = prev.reg_accum + dreg;
  row.exchange = exchange_term(s);
  row.balance_residual =
      row.kinetic + row.elastic + row.visc_accum + row.reg_accum - initial_total;
  return row;
}

}  // namespace viscospec

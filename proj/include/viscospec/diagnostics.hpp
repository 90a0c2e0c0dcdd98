#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>
#include <vector>

#include "viscospec/integrator.hpp"
#include "viscospec/quadrature.hpp"
#include "viscospec/scenario.hpp"

namespace viscospec {

struct LedgerMissing : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TestFieldNotDivergenceFree : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Energy inequality

struct EnergyInequalityReport {
  bool pass = true;
  double worst_violation = 0.0;  // max over t of lhs - rhs (positive = violated)
  double worst_t = 0.0;
  double min_slack = 0.0;        // min over t of the dissipation-defect proxy
};

/// Check 0.5(|u|^2+|F|^2) + int |grad u|^2 <= initial total + tol at every
/// ledger time. The slack is the discrete stand-in for the dissipation
/// defect D(t) >= 0.
inline EnergyInequalityReport verify_energy_inequality(const Trajectory& traj,
                                                       double tol) {
  if (traj.ledger.empty()) throw LedgerMissing("trajectory has no ledger");
  const double initial = traj.ledger.front().kinetic + traj.ledger.front().elastic;
  EnergyInequalityReport rep;
  rep.min_slack = std::numeric_limits<double>::infinity();
  rep.worst_violation = -std::numeric_limits<double>::infinity();
  for (const auto& row : traj.ledger) {
    double lhs = row.kinetic + row.elastic + row.visc_accum;
    double violation = lhs - initial - tol;
    if (violation > rep.worst_violation) {
      rep.worst_violation = violation;
      rep.worst_t = row.t;
    }
    rep.min_slack = std::min(rep.min_slack, initial - lhs);
  }
  rep.pass = rep.worst_violation <= 0.0;
  return rep;
}

// ---------------------------------------------------------------------------
// Vanishing-regularization defect study

struct DefectReport {
  std::vector<double> eps_values;  // strictly decreasing; last is the reference
  double dt = 0.0;
  std::vector<double> ledger_t;
  /// D_proxy per eps (same layout as eps_values; reference column is zero):
  /// elastic-energy gap + accumulated viscous-dissipation gap, reference
  /// minus run, reported with sign. Positive when the regularized run has
  /// shed extra energy relative to the reference; tends to 0 as eps -> 0.
  std::vector<std::vector<double>> D_proxy;
  std::vector<double> snapshot_t;
  /// L1 norm of F^r (F^r)^T - F F^T against the reference, per eps.
  std::vector<std::vector<double>> corrector_proxy;
  /// Fitted domination constants: int corrector <= c int max(D,0) + tol.
  std::vector<double> c_fit;
  std::vector<double> reg_accum_final;  // eps int |grad F|^2 at t_end, per eps
};

namespace diagnostics_detail {

inline double corrector_l1(const SimState& a, const SimState& b) {
  const Grid& g = a.grid();
  const int d = g.d;
  double acc = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    double fro2 = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double pa = 0.0, pb = 0.0;
        for (int k = 0; k < d; ++k) {
          pa += a.F(i, k).phys()[p] * a.F(j, k).phys()[p];
          pb += b.F(i, k).phys()[p] * b.F(j, k).phys()[p];
        }
        double diff = pa - pb;
        fro2 += diff * diff;
      }
    acc += std::sqrt(fro2);
  }
  return acc * g.cell_volume();
}

}  // namespace diagnostics_detail

/// Run the integrator once per eps (concurrently), compare each run
/// against the smallest-eps reference, and report the dissipation-defect
/// and corrector proxies. Initial data and the time step are shared
/// across runs so times match exactly.
inline DefectReport defect_study(const Scenario& base,
                                 const std::vector<double>& eps_values,
                                 double tol = 1e-12) {
  if (eps_values.size() < 2)
    throw std::invalid_argument("defect_study: need at least two eps values");
  for (std::size_t i = 1; i < eps_values.size(); ++i)
    if (!(eps_values[i] < eps_values[i - 1]) || eps_values[i] < 0.0)
      throw std::invalid_argument(
          "defect_study: eps values must be strictly decreasing toward 0");

  std::vector<std::future<Trajectory>> futures;
  futures.reserve(eps_values.size());
  for (double eps : eps_values) {
    Scenario sc = base;
    sc.eps = eps;
    futures.push_back(std::async(std::launch::async, [sc]() {
      try {
        return run(make_initial(sc), sc.integrator);
      } catch (const NonFinite& nf) {
        throw std::runtime_error("defect_study: run with eps=" +
                                 std::to_string(sc.eps) +
                                 " became non-finite at t=" + std::to_string(nf.t));
      }
    }));
  }
  std::vector<Trajectory> runs;
  runs.reserve(futures.size());
  for (auto& f : futures) runs.push_back(f.get());  // joined in eps order

  const Trajectory& ref = runs.back();
  DefectReport rep;
  rep.eps_values = eps_values;
  rep.dt = ref.dt;
  for (const auto& row : ref.ledger) rep.ledger_t.push_back(row.t);
  for (const auto& s : ref.snapshots) rep.snapshot_t.push_back(s.t);

  for (std::size_t r = 0; r < runs.size(); ++r) {
    const Trajectory& tr = runs[r];
    if (tr.ledger.size() != ref.ledger.size() ||
        tr.snapshots.size() != ref.snapshots.size())
      throw std::runtime_error("defect_study: mismatched trajectory layout");

    std::vector<double> D(tr.ledger.size());
    for (std::size_t m = 0; m < tr.ledger.size(); ++m) {
      const auto& a = tr.ledger[m];
      const auto& b = ref.ledger[m];
      D[m] = 2.0 * (b.elastic - a.elastic) + (b.visc_accum - a.visc_accum);
    }
    std::vector<double> corr(tr.snapshots.size());
    for (std::size_t m = 0; m < tr.snapshots.size(); ++m)
      corr[m] = diagnostics_detail::corrector_l1(tr.snapshots[m], ref.snapshots[m]);

    // Domination fit at snapshot resolution.
    std::vector<double> Dsnap(tr.snapshots.size());
    for (std::size_t m = 0; m < tr.snapshots.size(); ++m) {
      double t = rep.snapshot_t[m];
      auto it = std::lower_bound(rep.ledger_t.begin(), rep.ledger_t.end(),
                                 t - 1e-12);
      std::size_t li = static_cast<std::size_t>(it - rep.ledger_t.begin());
      Dsnap[m] = std::max(D[std::min(li, D.size() - 1)], 0.0);
    }
    double snap_dt = rep.snapshot_t.size() > 1
                         ? rep.snapshot_t[1] - rep.snapshot_t[0]
                         : rep.dt;
    double int_corr = integral(corr, snap_dt);
    double int_Dpos = integral(Dsnap, snap_dt);
    double c = (int_corr - tol) > 0.0
                   ? (int_corr - tol) / std::max(int_Dpos, 1e-300)
                   : 0.0;

    rep.D_proxy.push_back(std::move(D));
    rep.corrector_proxy.push_back(std::move(corr));
    rep.c_fit.push_back(c);
    rep.reg_accum_final.push_back(tr.ledger.back().reg_accum);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Weak-form residuals

/// Time-constant smooth divergence-free test pair (psi, Psi).
struct TestField {
  VectorField psi;
  TensorField Psi;
};

struct WeakFormResidual {
  std::vector<double> t;
  std::vector<double> momentum;     // residual of the velocity identity
  std::vector<double> deformation;  // residual of the deformation identity
  double max_momentum = 0.0;
  double max_deformation = 0.0;
};

/// Residuals of the two integral identities of the dissipative-solution
/// definition (corrector term omitted) against band-limited
/// divergence-free test fields, evaluated at the stored snapshot times.
inline std::vector<WeakFormResidual> weak_form_residual(
    const Trajectory& traj, const std::vector<TestField>& test_fields) {
  if (traj.snapshots.size() < 3)
    throw LedgerMissing("weak_form_residual: need at least three snapshots");
  const Grid& g = traj.snapshots.front().grid();
  const int d = g.d;

  for (const auto& tf : test_fields) {
    if (norm(divergence_vec(tf.psi)) > 1e-10 * std::max(norm(tf.psi), 1.0))
      throw TestFieldNotDivergenceFree("psi is not divergence-free");
    if (norm(divergence_tensor(tf.Psi)) > 1e-10 * std::max(norm(tf.Psi), 1.0))
      throw TestFieldNotDivergenceFree("Psi is not divergence-free");
  }

  // Uniform snapshot spacing is required for the quadrature below.
  double sdt = traj.snapshots[1].t - traj.snapshots[0].t;
  for (std::size_t m = 1; m < traj.snapshots.size(); ++m) {
    double gap = traj.snapshots[m].t - traj.snapshots[m - 1].t;
    if (std::abs(gap - sdt) > 1e-9 * std::max(1.0, sdt))
      throw LedgerMissing("weak_form_residual: snapshots must be uniformly spaced");
  }

  std::vector<WeakFormResidual> out;
  out.reserve(test_fields.size());
  for (const auto& tf : test_fields) {
    WeakFormResidual res;
    std::vector<double> g1(traj.snapshots.size()), g2(traj.snapshots.size());
    std::vector<double> pairing_u(traj.snapshots.size()),
        pairing_F(traj.snapshots.size());

    // Test-field gradients, computed once.
    std::vector<ScalarField> dpsi(static_cast<std::size_t>(d) * d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) dpsi[i * d + j] = derivative(tf.psi[i], j);
    std::vector<ScalarField> dPsi(static_cast<std::size_t>(d) * d * d);
    for (int a = 0; a < d; ++a)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          dPsi[(a * d + i) * d + j] = derivative(tf.Psi(i, j), a);

    for (std::size_t m = 0; m < traj.snapshots.size(); ++m) {
      const SimState& s = traj.snapshots[m];
      res.t.push_back(s.t);
      pairing_u[m] = inner(s.u, tf.psi);
      pairing_F[m] = inner(s.F, tf.Psi);

      double acc1 = 0.0;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          // (u x u, grad psi)
          acc1 += inner(multiply_dealias(s.u[i], s.u[j]), dpsi[i * d + j]);
          // -(grad u, grad psi)
          acc1 -= inner(derivative(s.u[i], j), dpsi[i * d + j]);
          // -(F F^T, grad psi)
          for (int k = 0; k < d; ++k)
            acc1 -= inner(multiply_dealias(s.F(i, k), s.F(j, k)), dpsi[i * d + j]);
        }
      g1[m] = acc1;

      double acc2 = 0.0;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          // (u x F, grad Psi): sum_a (u_a F_ij, d_a Psi_ij)
          for (int a = 0; a < d; ++a)
            acc2 += inner(multiply_dealias(s.u[a], s.F(i, j)),
                          dPsi[(a * d + i) * d + j]);
          // (grad u F, Psi): sum_k ((d_k u_i) F_kj, Psi_ij)
          for (int k = 0; k < d; ++k)
            acc2 += inner(multiply_dealias(derivative(s.u[i], k), s.F(k, j)),
                          tf.Psi(i, j));
        }
      g2[m] = acc2;
    }

    auto I1 = cumulative_integral(g1, sdt);
    auto I2 = cumulative_integral(g2, sdt);
    for (std::size_t m = 0; m < traj.snapshots.size(); ++m) {
      double r1 = (pairing_u[m] - pairing_u[0]) - I1[m];
      double r2 = (pairing_F[m] - pairing_F[0]) - I2[m];
      res.momentum.push_back(r1);
      res.deformation.push_back(r2);
      res.max_momentum = std::max(res.max_momentum, std::abs(r1));
      res.max_deformation = std::max(res.max_deformation, std::abs(r2));
    }
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace viscospec

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "viscospec/viscospec.hpp"

using namespace viscospec;

namespace {

Scenario small_random(int n, double amplitude, double eps, std::uint64_t seed) {
  Scenario sc;
  sc.generator = "random_divfree";
  sc.n = n;
  sc.amplitude = amplitude;
  sc.eps = eps;
  sc.seed = seed;
  return sc;
}

// Band-limited divergence-free test pair built from low single modes.
TestField make_test_field(const Grid& g, const std::array<int, 3>& mode,
                          double amplitude) {
  using namespace scenario_detail;
  TestField tf{finalize_vec(single_mode_velocity(g, amplitude, mode)),
               finalize_tensor(single_mode_tensor(g, amplitude, mode))};
  return tf;
}

}  // namespace

TEST_CASE("energy inequality holds on a resolved run") {
  Scenario sc = small_random(32, 0.25, 0.05, 7);
  sc.integrator.dt = 2e-3;
  sc.integrator.t_end = 0.5;
  auto traj = run(make_initial(sc), sc.integrator);
  auto rep = verify_energy_inequality(traj, 1e-8);
  CHECK(rep.pass);
  CHECK(rep.worst_violation <= 0.0);
  // The dissipation slack grows once viscosity has acted.
  CHECK(rep.min_slack >= -1e-8);
}

TEST_CASE("energy inequality reports a violated tolerance") {
  Scenario sc = small_random(16, 0.25, 0.0, 3);
  sc.integrator.dt = 5e-3;
  sc.integrator.t_end = 0.1;
  auto traj = run(make_initial(sc), sc.integrator);
  // An absurdly tight negative tolerance must flag every row.
  auto rep = verify_energy_inequality(traj, -1.0);
  CHECK_FALSE(rep.pass);
  CHECK(rep.worst_violation > 0.0);
}

TEST_CASE("energy inequality requires a ledger") {
  Trajectory empty;
  CHECK_THROWS_AS(verify_energy_inequality(empty, 1e-8), LedgerMissing);
}

TEST_CASE("defect study rejects bad eps lists") {
  Scenario sc = small_random(16, 0.25, 0.1, 1);
  CHECK_THROWS_AS(defect_study(sc, {0.1}), std::invalid_argument);
  CHECK_THROWS_AS(defect_study(sc, {0.05, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(defect_study(sc, {0.1, 0.1}), std::invalid_argument);
}

TEST_CASE("defect study layout and reference column") {
  Scenario sc = small_random(16, 0.25, 0.0, 11);
  sc.integrator.dt = 5e-3;
  sc.integrator.t_end = 0.1;
  sc.integrator.snapshot_every = 4;
  std::vector<double> eps = {0.1, 0.05, 0.025};
  auto rep = defect_study(sc, eps);

  REQUIRE(rep.eps_values == eps);
  REQUIRE(rep.D_proxy.size() == eps.size());
  REQUIRE(rep.corrector_proxy.size() == eps.size());
  REQUIRE(rep.c_fit.size() == eps.size());
  REQUIRE(rep.reg_accum_final.size() == eps.size());
  for (const auto& col : rep.D_proxy) CHECK(col.size() == rep.ledger_t.size());
  for (const auto& col : rep.corrector_proxy)
    CHECK(col.size() == rep.snapshot_t.size());

  // The reference run compared against itself is exactly zero.
  for (double v : rep.D_proxy.back()) CHECK(v == 0.0);
  for (double v : rep.corrector_proxy.back()) CHECK(v == 0.0);
  CHECK(rep.c_fit.back() == 0.0);

  // eps int |grad F|^2 shrinks with eps (same initial data, short time).
  CHECK(rep.reg_accum_final[0] > rep.reg_accum_final[2]);
  for (double v : rep.reg_accum_final) CHECK(v >= 0.0);

  // Corrector proxies start at zero (shared initial data) and are
  // nonnegative by construction.
  for (const auto& col : rep.corrector_proxy) {
    CHECK(col.front() == 0.0);
    for (double v : col) CHECK(v >= 0.0);
  }
}

TEST_CASE("weak form residuals vanish on a resolved trajectory") {
  Scenario sc;
  sc.generator = "identity_plus_perturbation";
  sc.n = 32;
  sc.amplitude = 0.2;
  sc.delta = 0.1;
  sc.mode = {1, 2, 0};
  sc.eps = 0.0;
  sc.integrator.dt = 1e-3;
  sc.integrator.t_end = 0.25;
  sc.integrator.snapshot_every = 1;
  auto traj = run(make_initial(sc), sc.integrator);

  const Grid g = sc.grid();
  std::vector<TestField> tests;
  tests.push_back(make_test_field(g, {1, 0, 0}, 1.0));
  tests.push_back(make_test_field(g, {0, 1, 0}, 0.7));
  tests.push_back(make_test_field(g, {2, 1, 0}, 0.5));

  auto reports = weak_form_residual(traj, tests);
  REQUIRE(reports.size() == tests.size());
  for (const auto& rep : reports) {
    CHECK(rep.t.size() == traj.snapshots.size());
    CHECK(rep.momentum.front() == 0.0);
    CHECK(rep.deformation.front() == 0.0);
    CHECK(rep.max_momentum < 1e-8);
    CHECK(rep.max_deformation < 1e-8);
  }
}

TEST_CASE("weak form residual shrinks with the step (self oracle)") {
  auto residual_at = [](double dt) {
    Scenario sc;
    sc.generator = "identity_plus_perturbation";
    sc.n = 16;
    sc.amplitude = 0.5;
    sc.delta = 0.25;
    sc.mode = {1, 1, 0};
    sc.integrator.dt = dt;
    sc.integrator.t_end = 0.2;
    auto traj = run(make_initial(sc), sc.integrator);
    auto reports =
        weak_form_residual(traj, {make_test_field(sc.grid(), {1, 1, 0}, 1.0)});
    return std::max(reports[0].max_momentum, reports[0].max_deformation);
  };
  double coarse = residual_at(1e-2);
  double fine = residual_at(5e-3);
  // Snapshot quadrature and RK4 are both fourth order; allow slack for
  // the roundoff floor.
  CHECK(fine < coarse / 8.0);
}

TEST_CASE("weak form residual validates its inputs") {
  Scenario sc = small_random(16, 0.25, 0.0, 5);
  sc.integrator.dt = 1e-2;
  sc.integrator.t_end = 0.05;
  auto traj = run(make_initial(sc), sc.integrator);
  const Grid g = sc.grid();

  // Not divergence-free: identity tensor paired with a gradient field.
  TestField bad_psi{VectorField(g, {ScalarField::from_phys(g, [&] {
                                      std::vector<double> v(g.size());
                                      for (std::size_t p = 0; p < g.size(); ++p)
                                        v[p] = std::sin(g.x(g.unravel(p)[0]));
                                      return v;
                                    }()),
                                    ScalarField::zero(g)}),
                    TensorField::identity(g)};
  CHECK_THROWS_AS(weak_form_residual(traj, {bad_psi}), TestFieldNotDivergenceFree);

  TestField good = make_test_field(g, {1, 0, 0}, 1.0);
  Trajectory two;
  two.snapshots = {traj.snapshots.front(), traj.snapshots.back()};
  CHECK_THROWS_AS(weak_form_residual(two, {good}), LedgerMissing);
}

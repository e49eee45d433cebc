#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hb/errors.hpp"
#include "hb/functionals.hpp"
#include "hb/quadrature.hpp"
#include "hb/scaling.hpp"

using namespace hb;

namespace {

ProblemSpec stored_spec(double eps, double snapshot_dt, std::size_t stride) {
  ProblemSpec s;
  s.p = 2.0;
  s.eps = eps;
  s.T_max = 70.0;
  s.snapshot_dt = snapshot_dt;
  s.snapshot_stride = stride;
  s.grid = grid_for_horizon(1.0, s.T_max, s.support_radius(), 0.2);
  return s;
}

const SnapshotStore& stored_run() {
  static const SnapshotStore store = evolve_until(stored_spec(0.05, 0.5, 2)).snapshots;
  return store;
}

SnapshotStore zero_store() {
  SnapshotStore z = stored_run();
  for (auto& row : z.w) std::fill(row.begin(), row.end(), 0.0);
  return z;
}

double support_R() { return data_support_radius(1.0, 1.0, 2.0); }

}  // namespace

TEST_CASE("F0 and F1 preconditions") {
  const double R = support_R();
  CHECK(admissible_T0(1.0, R, 1.0) == doctest::Approx(16.0 * R));
  CHECK_THROWS_AS(make_cutoff_params(1.0, R, 1.0, 8.0 * (4.0 + std::numbers::e) - 1.0),
                  PreconditionError);
  CutoffParams low = make_cutoff_params(1.0, R, 1.0, 100.0);
  low.T = 50.0;
  CHECK_THROWS_AS(functional_F0(stored_run(), low, 2.0), PreconditionError);
  CHECK_THROWS_AS(functional_F1(stored_run(), low, 2.0), PreconditionError);
  // Snapshots end at t = 70 < 2T/3.
  const CutoffParams far = make_cutoff_params(1.0, R, 1.0, 120.0);
  CHECK_THROWS_AS(functional_F0(stored_run(), far, 2.0), PreconditionError);
  SnapshotStore empty;
  CHECK_THROWS_AS(functional_F0(empty, make_cutoff_params(1.0, R, 1.0, 90.0), 2.0),
                  PreconditionError);
}

TEST_CASE("F0 and F1 on a stored run") {
  const double R = support_R();
  const SnapshotStore z = zero_store();
  for (double T : {90.0, 100.0}) {
    const CutoffParams cp = make_cutoff_params(1.0, R, 1.0, T);
    const auto f0 = functional_F0(stored_run(), cp, 2.0);
    const auto f1 = functional_F1(stored_run(), cp, 2.0);
    CHECK(f0.name == "F0");
    CHECK(f1.name == "F1");
    CHECK(f0.value > 0.0);
    CHECK(f1.value >= f0.value);
    CHECK(f0.quadrature_error < 0.05 * f0.value);
    CHECK(functional_F0(z, cp, 2.0).value == 0.0);
    CHECK(functional_F1(z, cp, 2.0).value == 0.0);
  }
  CHECK(F0_bound_ratio(3.0, 100.0, 2.0) == doctest::Approx(3.0));
  CHECK(F0_bound_ratio(3.0, 100.0, 3.0) == doctest::Approx(3.0 * std::pow(100.0, -1.0)));
  CHECK(F1_bound_ratio(1.0, 30.0, 2.0, 1.0) == doctest::Approx(std::pow(30.0, 4.0) * std::exp(-10.0)));
}

TEST_CASE("linear regime scales like eps^p") {
  const CutoffParams cp = make_cutoff_params(1.0, support_R(), 1.0, 90.0);
  const SnapshotStore a = evolve_until(stored_spec(0.01, 0.5, 2)).snapshots;
  const SnapshotStore b = evolve_until(stored_spec(0.02, 0.5, 2)).snapshots;
  CHECK(functional_F0(b, cp, 2.0).value / functional_F0(a, cp, 2.0).value ==
        doctest::Approx(4.0).epsilon(0.02));
  CHECK(functional_F1(b, cp, 2.0).value / functional_F1(a, cp, 2.0).value ==
        doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("refining the snapshot store stays within the error estimate") {
  const CutoffParams cp = make_cutoff_params(1.0, support_R(), 1.0, 100.0);
  const SnapshotStore fine = evolve_until(stored_spec(0.05, 0.25, 1)).snapshots;
  for (int which = 0; which < 2; ++which) {
    const auto coarse = which == 0 ? functional_F0(stored_run(), cp, 2.0)
                                   : functional_F1(stored_run(), cp, 2.0);
    const auto refined = which == 0 ? functional_F0(fine, cp, 2.0) : functional_F1(fine, cp, 2.0);
    CHECK(std::abs(refined.value - coarse.value) <= coarse.quadrature_error);
  }
}

TEST_CASE("C1") {
  ProblemSpec s = stored_spec(1.0, 0.0, 1);
  auto g = make_grid(1.0, eigen_left_edge(1.0, 0.5), 20.0, 0.01);
  const EigenFn e = solve_eigenfunction(0.5, g);
  const C1Value c = constant_C1(s, e);
  CHECK(c.f_part > 0.0);
  CHECK(c.g_part == doctest::Approx(c.f_part));
  CHECK(c.value == doctest::Approx(1.5 * c.f_part));

  // Independent evaluation in r with Gauss-Legendre panels.
  const auto rule = gauss_legendre(20);
  double oracle = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double a = 3.0 + k / 50.0;
    const double b = a + 1.0 / 50.0;
    for (std::size_t m = 0; m < rule.nodes.size(); ++m) {
      const double r = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[m];
      const double rs = tortoise(1.0, r);
      const double phi = e.scaled_at(rs) * std::exp(0.5 * rs) / r;
      oracle += 0.5 * (b - a) * rule.weights[m] * r * r / metric_factor(1.0, r) * data_f(s, r) * phi;
    }
  }
  CHECK(c.f_part == doctest::Approx(4.0 * std::numbers::pi * oracle).epsilon(1e-6));

  s.g_scale = 0.0;
  const C1Value c0 = constant_C1(s, e);
  CHECK(c0.g_part == 0.0);
  CHECK(c0.value == doctest::Approx(0.5 * c0.f_part));

  auto short_grid = make_grid(1.0, eigen_left_edge(1.0, 0.5), 4.0, 0.01);
  CHECK_THROWS_AS(constant_C1(s, solve_eigenfunction(0.5, short_grid)), ConfigError);
}

TEST_CASE("Y") {
  const double R = support_R();
  const CutoffParams cp = make_cutoff_params(1.0, R, 1.0, 105.0);
  BqOptions o;
  o.lambda_floor = bq_lambda_floor(105.0);
  const BqWeight bank =
      BqWeight::build(2.0 - std::numbers::sqrt2, 1.0, stored_run().grid->rstar_max(), 0.2, o);
  const auto y1 = functional_Y(stored_run(), bank, cp, 2.0, 16.0 * R);
  const auto y2 = functional_Y(stored_run(), bank, cp, 2.0, 100.0);
  CHECK(y1.name == "Y");
  CHECK(y1.value > 0.0);
  // alpha_L shrinks pointwise as L grows, so Y need not be monotone in L.
  CHECK(y2.value > 0.0);
  SnapshotStore doubled = stored_run();
  for (auto& row : doubled.w) {
    for (double& v : row) v *= 2.0;
  }
  const auto y4 = functional_Y(doubled, bank, cp, 2.0, 100.0);
  CHECK(y4.value == doctest::Approx(4.0 * y2.value).epsilon(1e-12));
  CHECK(y4.derivative == doctest::Approx(4.0 * y2.derivative).epsilon(1e-12));
  CHECK(y1.derivative > 0.0);
  CHECK(y2.derivative > 0.0);
  CHECK(y1.quadrature_error < 0.05 * y1.value);
  CHECK(functional_Y(zero_store(), bank, cp, 2.0, 100.0).value == 0.0);
  CHECK_THROWS_AS(functional_Y(stored_run(), bank, cp, 2.0, 16.0 * R - 1.0), PreconditionError);
  CHECK_THROWS_AS(functional_Y(stored_run(), bank, cp, 2.0, 106.0), PreconditionError);
}

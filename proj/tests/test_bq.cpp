#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hb/bq.hpp"
#include "hb/cutoffs.hpp"
#include "hb/errors.hpp"

using namespace hb;

namespace {

const double kQ = 2.0 - std::sqrt(2.0);
const double kR = 4.0 + 2.0 * std::log(2.0);
const double kR0 = 4.0 + std::numbers::e;

const BqWeight& critical_bank() {
  static const BqWeight bank = [] {
    BqOptions o;
    o.lambda_floor = bq_lambda_floor(1e4 + kR);
    return BqWeight::build(kQ, 1.0, 40.0, 0.05, o);
  }();
  return bank;
}

}  // namespace

TEST_CASE("quadrature structure") {
  const BqWeight& b = critical_bank();
  CHECK(b.q() == kQ);
  for (double w : b.quad_weights()) CHECK(w > 0.0);
  for (double l : b.lambda_nodes()) {
    CHECK(l > 0.0);
    CHECK(l < 1.0);
  }
  CHECK(b.eigen_bank().size() == b.lambda_nodes().size());
  // Sum of weights is int_0^1 lambda^{q-1} d lambda = 1/q.
  double sum = 0.0;
  for (double w : b.quad_weights()) sum += w;
  CHECK(sum == doctest::Approx(1.0 / kQ).epsilon(1e-13));
}

TEST_CASE("time derivative is -b_{q+1}") {
  const BqWeight& b = critical_bank();
  for (double t : {50.0, 300.0, 2000.0}) {
    for (double rs : {kR0, 15.0, 35.0}) {
      const double dt = 1e-3 * t;
      const double fd = (b.bq(t + dt, rs).value - b.bq(t - dt, rs).value) / (2.0 * dt);
      const double b1 = b.bq_plus1(t, rs).value;
      CHECK(fd < 0.0);
      CHECK(std::abs(-fd - b1) / b1 <= 1e-5);
      CHECK(bq_time_derivative_mismatch(b, t, rs, dt) <= 1e-5);
    }
  }
}

TEST_CASE("monotonicity in t and r*") {
  const BqWeight& b = critical_bank();
  double prev = INFINITY;
  for (double t = 0.0; t <= 500.0; t += 25.0) {
    const double v = b.bq(t, kR0).value;
    CHECK(v < prev);
    prev = v;
  }
  prev = 0.0;
  for (double rs = -100.0; rs <= 39.0; rs += 3.5) {
    const double v = b.bq(200.0, rs).value;
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("decay law at r* = 4M + e") {
  const BqWeight& b = critical_bank();
  std::vector<double> ts;
  for (int k = 0; k <= 8; ++k) ts.push_back(100.0 * std::pow(100.0, k / 8.0));
  const BqBoundsReport rep = verify_bq_bounds(b, ts, {kR0, 10.0, 20.0, 39.0}, kR);
  CHECK(rep.slope == doctest::Approx(-kQ).epsilon(0.05));
  CHECK(rep.bq_scaled_min > 0.0);
  CHECK(std::isfinite(rep.bq1_scaled_max));
  CHECK(rep.max_quadrature_error <= 1e-6);
  CHECK_THROWS_AS(verify_bq_bounds(b, ts, {3.0}, kR), PreconditionError);
}

TEST_CASE("homogeneous equation") {
  // (r^2/F) d_t^2 b - d_r(r (r - 2M) d_r b) = (r^2/F) [b_{q+2} - r^{-2} d_{r*}(r^2 d_{r*} b)].
  const BqWeight& b = critical_bank();
  const double d = 0.1;  // two bank cells
  for (double rs : {kR0, 12.0, 25.0}) {
    for (double t : {60.0, 400.0}) {
      auto r_of = [](double s) { return radius_from_tortoise(1.0, s); };
      const double rp = r_of(rs + 0.5 * d);
      const double rm = r_of(rs - 0.5 * d);
      const double r = r_of(rs);
      const double flux_p = rp * rp * (b.value(t, rs + d) - b.value(t, rs)) / d;
      const double flux_m = rm * rm * (b.value(t, rs) - b.value(t, rs - d)) / d;
      const double spatial = (flux_p - flux_m) / d / (r * r);
      const double dt = 0.5;
      const double temporal =
          (b.value(t + dt, rs) - 2.0 * b.value(t, rs) + b.value(t - dt, rs)) / (dt * dt);
      CHECK(temporal == doctest::Approx(b.value(t, rs, 2)).epsilon(1e-4));
      CHECK(std::abs(temporal - spatial) / temporal <= 1e-3);
    }
  }
}

TEST_CASE("free case with q = 1 has a closed form") {
  BqOptions o;
  o.eigen.free_potential = true;
  o.lambda_floor = bq_lambda_floor(1e3);
  const BqWeight b = BqWeight::build(1.0, 1.0, 60.0, 0.05, o);
  for (double t : {10.0, 100.0, 900.0}) {
    for (double rs : {5.0, 50.0}) {
      if (rs > t) continue;
      const double r = radius_from_tortoise(1.0, rs);
      const double x = t - rs;
      const double exact = (1.0 - std::exp(-x)) / (x * r);
      CHECK(b.bq(t, rs).value == doctest::Approx(exact).epsilon(1e-10));
    }
  }
}

TEST_CASE("errors") {
  const BqWeight& b = critical_bank();
  CHECK_THROWS_AS(b.bq(10.0, 100.0), DomainError);
  CHECK_THROWS_AS(b.bq(-1.0, 5.0), PreconditionError);
  CHECK_THROWS_AS(BqWeight::build(0.0, 1.0, 10.0, 0.1), ConfigError);
  BqOptions o;
  o.nodes_per_panel = 3;
  CHECK_THROWS_AS(BqWeight::build(0.5, 1.0, 10.0, 0.1, o), ConfigError);
  // A two-node rule cannot resolve the decay at late times.
  BqOptions crude;
  crude.nodes_per_panel = 2;
  crude.lambda_floor = 0.25;
  const BqWeight rough = BqWeight::build(0.5, 1.0, 10.0, 0.1, crude);
  CHECK_THROWS_AS(rough.bq(1000.0, 7.0), NumericalError);
}

#include "hb/bq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hb/errors.hpp"
#include "hb/quadrature.hpp"
#include "hb/scaling.hpp"

namespace hb {

double bq_lambda_floor(double t_max) {
  return std::min(1e-3, 1e-4 / std::max(t_max, 1.0));
}

BqWeight::BqWeight(double q, std::shared_ptr<const RadialGrid> grid, Rule fine, Rule coarse,
                   double tolerance)
    : q_(q),
      grid_(std::move(grid)),
      fine_(std::move(fine)),
      coarse_(std::move(coarse)),
      tolerance_(tolerance) {}

BqWeight BqWeight::build(double q, double M, double rstar_max, double h, BqOptions options) {
  if (!(q > 0.0)) throw ConfigError("b_q: q must be positive");
  if (options.nodes_per_panel < 2 || options.nodes_per_panel % 2 != 0) {
    throw ConfigError("b_q: nodes_per_panel must be even and >= 2");
  }
  if (!(options.lambda_floor > 0.0 && options.lambda_floor < 1.0)) {
    throw ConfigError("b_q: lambda_floor must lie in (0, 1)");
  }

  // mu-breakpoints: 1, 2^{-q}, 2^{-2q}, ..., floor^q, 0.
  std::vector<double> breaks{1.0};
  double lam = 1.0;
  while (lam > options.lambda_floor) {
    lam *= 0.5;
    breaks.push_back(std::pow(lam, q));
  }
  breaks.push_back(0.0);

  auto make_rule = [&](std::size_t n) {
    Rule rule;
    const GaussRule gl = gauss_legendre(n);
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
      const double hi = breaks[k];
      const double lo = breaks[k + 1];
      for (std::size_t j = 0; j < n; ++j) {
        const double mu = 0.5 * (hi + lo) + 0.5 * (hi - lo) * gl.nodes[j];
        rule.lambda.push_back(std::pow(mu, 1.0 / q));
        rule.weight.push_back(0.5 * (hi - lo) * gl.weights[j] / q);
      }
    }
    return rule;
  };
  Rule fine = make_rule(options.nodes_per_panel);
  Rule coarse = make_rule(options.nodes_per_panel / 2);

  const double lambda_min =
      std::min(*std::min_element(fine.lambda.begin(), fine.lambda.end()),
               *std::min_element(coarse.lambda.begin(), coarse.lambda.end()));
  const double left = options.eigen.free_potential ? std::min(-40.0 * M, rstar_max - h)
                                                   : eigen_left_edge(M, lambda_min);
  auto grid = make_grid(M, left, rstar_max, h);

  for (Rule* rule : {&fine, &coarse}) {
    rule->bank.reserve(rule->lambda.size());
    for (double l : rule->lambda) rule->bank.push_back(solve_eigenfunction(l, grid, options.eigen));
  }
  return BqWeight(q, std::move(grid), std::move(fine), std::move(coarse), options.tolerance);
}

double BqWeight::sum(const Rule& rule, const RadialGrid& g, double t, double rstar, int shift) {
  const std::size_t i = g.cell_of(rstar);
  const double h = g.h();
  const double s = std::clamp((rstar - g.rstar(i)) / h, 0.0, 1.0);
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = (s3 - 2.0 * s2 + s) * h;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = (s3 - s2) * h;
  const double r = background_at(g.M(), rstar).r;
  const double lag = rstar - t;

  double total = 0.0;
  for (std::size_t k = 0; k < rule.bank.size(); ++k) {
    const double lambda = rule.lambda[k];
    const auto& psi = rule.bank[k].scaled();
    const auto& dpsi = rule.bank[k].dscaled();
    const double interp = h00 * psi[i] + h10 * dpsi[i] + h01 * psi[i + 1] + h11 * dpsi[i + 1];
    // e^{-lambda t} phi_lambda(r) = psi e^{lambda (r* - t)} / r.
    double term = rule.weight[k] * interp * std::exp(lambda * lag);
    for (int j = 0; j < shift; ++j) term *= lambda;
    total += term;
  }
  return total / r;
}

double BqWeight::value(double t, double rstar, int shift) const {
  const RadialGrid& g = *grid_;
  if (rstar < g.rstar_min() || rstar > g.rstar_max()) {
    throw DomainError("b_q: r* outside the eigen bank grid");
  }
  return sum(fine_, g, t, rstar, shift);
}

BqWeight::Value BqWeight::evaluate(double t, double rstar, int shift) const {
  if (!(t >= 0.0)) throw PreconditionError("b_q: t must be nonnegative");
  const double fine = value(t, rstar, shift);
  const double coarse = sum(coarse_, *grid_, t, rstar, shift);
  Value v;
  v.value = fine;
  v.error = fine != 0.0 ? std::abs(fine - coarse) / std::abs(fine) : std::abs(coarse);
  if (!(v.error <= tolerance_)) {
    std::ostringstream msg;
    msg << "b_q quadrature did not converge at t = " << t << ", r* = " << rstar
        << ": fine = " << fine << ", coarse = " << coarse << ", relative error = " << v.error;
    throw NumericalError(msg.str());
  }
  return v;
}

BqBoundsReport verify_bq_bounds(const BqWeight& bank, const std::vector<double>& t_grid,
                                const std::vector<double>& rstar_grid, double R) {
  const double M = bank.grid().M();
  const double rstar_floor = 4.0 * M + std::numbers::e;
  if (t_grid.empty() || rstar_grid.empty()) throw ConfigError("verify_bq_bounds: empty grid");
  for (double rs : rstar_grid) {
    if (rs < rstar_floor - 1e-12) {
      throw PreconditionError("verify_bq_bounds: r* must be >= 4M + e");
    }
  }
  const double q = bank.q();
  BqBoundsReport rep;
  rep.bq_scaled_min = std::numeric_limits<double>::infinity();
  std::vector<double> log_tr;
  std::vector<double> log_bq;
  for (double t : t_grid) {
    const double tr = t + R;
    for (std::size_t j = 0; j < rstar_grid.size(); ++j) {
      const double rs = rstar_grid[j];
      if (rs > tr) continue;
      const auto b0 = bank.bq(t, rs);
      const auto b1 = bank.bq_plus1(t, rs);
      const double s0 = b0.value * std::pow(tr, q);
      const double s1 = b1.value * tr * std::pow(tr + 1.0 - rs, q);
      rep.bq_scaled_min = std::min(rep.bq_scaled_min, s0);
      rep.bq_scaled_max = std::max(rep.bq_scaled_max, s0);
      rep.bq1_scaled_max = std::max(rep.bq1_scaled_max, s1);
      if (rs <= 0.5 * tr) {
        rep.bq1_scaled_max_inner = std::max(rep.bq1_scaled_max_inner, s1);
      } else {
        rep.bq1_scaled_max_outer = std::max(rep.bq1_scaled_max_outer, s1);
      }
      rep.max_quadrature_error = std::max({rep.max_quadrature_error, b0.error, b1.error});
      ++rep.points;
      if (j == 0) {
        log_tr.push_back(std::log(tr));
        log_bq.push_back(std::log(b0.value));
      }
    }
  }
  if (log_tr.size() >= 2) {
    const LineFit fit = fit_line(log_tr, log_bq);
    rep.slope = fit.slope;
    rep.slope_r_squared = fit.r_squared;
  }
  return rep;
}

double bq_time_derivative_mismatch(const BqWeight& bank, double t, double rstar, double dt) {
  const double plus = bank.bq(t + dt, rstar).value;
  const double minus = bank.bq(t - dt, rstar).value;
  const double deriv = (plus - minus) / (2.0 * dt);
  const double b1 = bank.bq_plus1(t, rstar).value;
  return std::abs(std::abs(deriv) - b1) / b1;
}

}  // namespace hb

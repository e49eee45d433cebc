#include "hb/scaling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "hb/errors.hpp"
#include "hb/quadrature.hpp"

namespace hb {

ParamSet make_param_set(double p, double M) {
  if (!(p >= 2.0 && p <= 1.0 + std::sqrt(2.0) + 1e-12)) {
    throw ConfigError("p: must lie in [2, 1+sqrt(2)]");
  }
  if (!(M > 0.0)) throw ConfigError("M: must be positive");
  ParamSet ps;
  ps.p = p;
  ps.p_prime = p / (p - 1.0);
  const double base = 8.0 / (M * p * (p - 1.0));
  ps.lambda0 = 1.1 * std::max(base, 1.0);
  ps.critical = std::abs(p - (1.0 + std::sqrt(2.0))) <= 1e-12;
  ps.lambda_choice = ps.critical ? base : 0.5 * (0.5 * base + ps.lambda0);
  return ps;
}

double theory_exponent(double p) {
  if (!(p >= 2.0)) throw DomainError("theory_exponent: p must be >= 2");
  const double den = 1.0 + 2.0 * p - p * p;
  if (!(den > 1e-12)) {
    throw DomainError("theory_exponent: critical power, the denominator 1 + 2p - p^2 vanishes");
  }
  return p * (p - 1.0) / den;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw NumericalError("fit: need at least two (x, y) pairs");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw NumericalError("fit: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += e * e;
  }
  f.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return f;
}

FitResult make_fit(const LineFit& fit, double theory_slope, std::size_t points) {
  FitResult r;
  r.slope = fit.slope;
  r.intercept = fit.intercept;
  r.r_squared = fit.r_squared;
  r.theory_slope = theory_slope;
  r.rel_error = std::abs(fit.slope - theory_slope) / std::abs(theory_slope);
  r.points = points;
  return r;
}

FitResult fit_power_law(const std::vector<LifespanRecord>& records) {
  if (records.size() < 6) throw NumericalError("fit: need at least 6 records");
  std::vector<double> x;
  std::vector<double> y;
  const double p = records.front().p;
  for (const auto& r : records) {
    if (r.status != RunStatus::blewup) throw NumericalError("fit: every record must have blown up");
    if (r.p != p) throw NumericalError("fit: records mix different p");
    x.push_back(std::log(r.eps));
    y.push_back(std::log(r.T_fit));
  }
  return make_fit(fit_line(x, y), -theory_exponent(p), records.size());
}

namespace {

LifespanRecord run_one(const ProblemSpec& base, double eps, double h) {
  ProblemSpec spec = base;
  spec.eps = eps;
  spec.snapshot_dt = 0.0;
  spec.grid = grid_for_horizon(base.M, base.T_max, base.support_radius(), h);
  return evolve_until(spec).record;
}

}  // namespace

std::vector<LifespanRecord> sweep_lifespan(const ProblemSpec& base,
                                           const std::vector<double>& eps_list,
                                           SweepOptions options) {
  if (eps_list.empty()) throw ConfigError("eps_list: empty");
  if (!base.grid) throw ConfigError("grid: missing");
  if (eps_list.size() < 6) throw ConfigError("eps_list: need at least 6 points");
  for (double e : eps_list) {
    if (!(e > 0.0 && std::isfinite(e))) throw ConfigError("eps_list: entries must be positive");
  }
  // Geometric spacing, either direction, to 1e-4 relative in the ratio.
  const double ratio = eps_list[1] / eps_list[0];
  for (std::size_t k = 1; k < eps_list.size(); ++k) {
    const double rk = eps_list[k] / eps_list[k - 1];
    if (ratio == 1.0 || std::abs(rk - ratio) > 1e-4 * ratio) {
      throw ConfigError("eps_list: must be geometric with distinct entries");
    }
  }
  const double h = base.grid->h();
  std::vector<LifespanRecord> out(eps_list.size());
  std::vector<std::exception_ptr> errors(eps_list.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= eps_list.size()) return;
      try {
        LifespanRecord rec = run_one(base, eps_list[k], h);
        if (options.gate && rec.status == RunStatus::blewup) {
          const LifespanRecord fine = run_one(base, eps_list[k], 0.5 * h);
          rec.gate_change = fine.status == RunStatus::blewup
                                ? std::abs(fine.T_threshold - rec.T_threshold) / rec.T_threshold
                                : 1.0;
          rec.support_excess = std::max(rec.support_excess, fine.support_excess);
          rec.support_checks += fine.support_checks;
        }
        out[k] = rec;
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  std::size_t workers = options.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, eps_list.size());
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < workers; ++i) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::sort(out.begin(), out.end(),
            [](const LifespanRecord& a, const LifespanRecord& b) { return a.eps < b.eps; });
  for (const auto& r : out) {
    if (r.status == RunStatus::boundary_touched) {
      throw RejectedRunError("sweep: run at eps = " + std::to_string(r.eps) +
                              " touched the grid boundary");
    }
    if (r.status == RunStatus::survived_horizon) {
      std::ostringstream msg;
      msg << "sweep: run at eps = " << r.eps << " survived to T_max = " << base.T_max
          << "; horizon too short, try T_max = " << 4.0 * base.T_max;
      throw NumericalError(msg.str());
    }
  }
  return out;
}

double lemma51_integral(double alpha, double beta, double L, double t) {
  if (!(alpha >= 0.0 && beta > 0.0 && L > 0.0 && t >= 0.0)) {
    throw ConfigError("lemma51: need alpha >= 0, beta > 0, L > 0, t >= 0");
  }
  static const GaussRule gl = gauss_legendre(20);
  // y = t + L - s runs over [0, t + L]; the kernel is e^{-beta (y - L)}.
  const double top = t + L;
  double total = 0.0;
  double a = 0.0;
  double b = std::min(1.0, top);
  while (a < top) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double panel = 0.0;
    for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
      const double y = mid + half * gl.nodes[j];
      panel += gl.weights[j] * std::pow(1.0 + top - y, alpha) * std::exp(-beta * (y - L));
    }
    total += half * panel;
    a = b;
    b = std::min(2.0 * b, top);
  }
  return total;
}

double lemma51_oracle(double alpha, double beta, double L, const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw ConfigError("lemma51: empty t grid");
  double worst = 0.0;
  for (double t : t_grid) {
    worst = std::max(worst, lemma51_integral(alpha, beta, L, t) / std::pow(t + L, alpha));
  }
  return worst;
}

double lemma62_log_blowup_time(double p1, double p2, double delta, Lemma62Options o) {
  if (!(p1 > 1.0 && p2 > 1.0 && p2 < p1 + 1.0)) {
    throw ConfigError("lemma62: need p1 > 1, p2 > 1, p2 < p1 + 1");
  }
  if (!(o.t0 > 2.0)) throw ConfigError("lemma62: t0 must exceed 2");
  if (!(delta > 0.0 && o.K1 > 0.0 && o.K2 > 0.0)) {
    throw ConfigError("lemma62: delta, K1, K2 must be positive");
  }
  const double tau0 = std::log(o.t0);
  const double slope1 = delta / o.K1;  // d phi / d tau before the switch
  // Switch where slope1 = phi^{p1} / (K2 tau^{p2-1}) with phi = slope1 (tau - tau0);
  // the log-gap below is increasing in tau because p2 - 1 < p1.
  auto gap = [&](double tau) {
    return p1 * std::log(slope1 * (tau - tau0)) - std::log(slope1 * o.K2) -
           (p2 - 1.0) * std::log(tau);
  };
  double lo = tau0;
  double hi = tau0 + 1.0;
  while (gap(hi) < 0.0) {
    lo = hi;
    hi = tau0 + 2.0 * (hi - tau0);
    if (hi > 1e300) throw NumericalError("lemma62: no switch point before overflow");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) < 0.0 ? lo : hi) = mid;
  }
  double tau = hi;
  double phi = slope1 * (tau - tau0);

  auto f = [&](double s, double y) { return std::pow(y, p1) / (o.K2 * std::pow(s, p2 - 1.0)); };
  auto time_left = [&](double s, double y) {
    return std::pow(y, 1.0 - p1) * o.K2 * std::pow(s, p2 - 1.0) / (p1 - 1.0);
  };
  constexpr std::size_t kMaxSteps = 10'000'000;
  std::size_t steps = 0;
  while (phi < o.phi_stop) {
    if (++steps > kMaxSteps || !std::isfinite(tau) || tau > 1e300) {
      throw NumericalError(
          "lemma62: no divergence before the horizon; delta too large or p2 too large");
    }
    const double dt = o.step_fraction * time_left(tau, phi);
    const double k1 = f(tau, phi);
    const double k2 = f(tau + 0.5 * dt, phi + 0.5 * dt * k1);
    const double k3 = f(tau + 0.5 * dt, phi + 0.5 * dt * k2);
    const double k4 = f(tau + dt, phi + dt * k3);
    phi += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    tau += dt;
  }
  return tau + time_left(tau, phi);
}

FitResult lemma62_oracle(double p1, double p2, const std::vector<double>& deltas,
                         Lemma62Options options) {
  if (deltas.size() < 2) throw ConfigError("lemma62: need at least two deltas");
  std::vector<double> x;
  std::vector<double> y;
  for (double d : deltas) {
    x.push_back(std::log(d));
    y.push_back(std::log(lemma62_log_blowup_time(p1, p2, d, options)));
  }
  return make_fit(fit_line(x, y), -(p1 - 1.0) / (p1 - p2 + 1.0), deltas.size());
}

}  // namespace hb

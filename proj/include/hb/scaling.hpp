#pragma once

// Lifespan sweeps, regressions against the predicted exponents, and two
// standalone oracles: the convolution bound with an exponential kernel and
// the blow-up time of the saturated two-regime ODE inequality.

#include <cstddef>
#include <vector>

#include "hb/evolve.hpp"

namespace hb {

struct ParamSet {
  double p = 2.0;
  double p_prime = 2.0;
  double lambda0 = 0.0;
  double lambda_choice = 0.0;
  bool critical = false;
};

// lambda0 = 1.1 max{8/(M p (p-1)), 1}; lambda_choice = 8/(M p (p-1)) for the
// critical power, else midway between 4/(M p (p-1)) and lambda0.
ParamSet make_param_set(double p, double M);

// p(p-1) / (1 + 2p - p^2). Throws DomainError at (and beyond) p = 1 + sqrt(2).
double theory_exponent(double p);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Ordinary least squares y = intercept + slope x. Throws NumericalError for
// fewer than two points or identical abscissae.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double theory_slope = 0.0;
  double rel_error = 0.0;
  std::size_t points = 0;
};

FitResult make_fit(const LineFit& fit, double theory_slope, std::size_t points);

// Least squares on (ln eps, ln T_fit) against -theory_exponent(p). Needs at
// least 6 records, all blown up.
FitResult fit_power_law(const std::vector<LifespanRecord>& records);

struct SweepOptions {
  std::size_t workers = 0;  // 0 = hardware concurrency
  bool gate = true;         // rerun every point at h/2 and record the change
  double gate_tolerance = 0.03;
};

// One evolution per eps on a grid sized from base.T_max (base.grid supplies
// M and h only). Records come back sorted by eps. Throws ConfigError unless
// eps_list is geometric with at least 6 points, NumericalError when a run survives the horizon and
// RejectedRunError when a run touches the boundary.
std::vector<LifespanRecord> sweep_lifespan(const ProblemSpec& base,
                                           const std::vector<double>& eps_list,
                                           SweepOptions options = {});

// I(t) = int_0^{t+L} (1+s)^alpha e^{-beta (t-s)} ds, and the oracle
// max over t_grid of I(t) / (t+L)^alpha.
double lemma51_integral(double alpha, double beta, double L, double t);
double lemma51_oracle(double alpha, double beta, double L, const std::vector<double>& t_grid);

struct Lemma62Options {
  double K1 = 1.0;
  double K2 = 1.0;
  double t0 = 3.0;
  double step_fraction = 0.01;  // RK4 step relative to the local time to blow-up
  double phi_stop = 1e10;
};

// ln of the divergence time, tau_T = ln T, of the trajectory
//   phi(t0) = 0,  phi' = delta / (K1 t)                       before the switch,
//                 phi' = phi^{p1} / (K2 t (ln t)^{p2-1})       after it,
// switching where the two right-hand sides agree.
double lemma62_log_blowup_time(double p1, double p2, double delta, Lemma62Options options = {});

// Fit of ln ln T against ln delta; theory slope -(p1-1)/(p1-p2+1).
FitResult lemma62_oracle(double p1, double p2, const std::vector<double>& deltas,
                         Lemma62Options options = {});

}  // namespace hb

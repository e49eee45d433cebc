#include "hb/cutoffs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hb/errors.hpp"

namespace hb {

namespace {

double rho(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

}  // namespace

double bridge(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = rho(s);
  return a / (a + rho(1.0 - s));
}

double eta(double s) { return bridge(3.0 * (2.0 / 3.0 - s)); }

double alpha(double s) { return bridge(8.0 * (s - 1.0 / 8.0)); }

double chi(double s) { return bridge(12.0 * (5.0 / 6.0 - s)); }

double eta_star(double s) { return s >= 1.0 / 8.0 ? eta(s) : 0.0; }

double admissible_T0(double M, double R, double R3) {
  return std::max({8.0 * (4.0 * M + std::numbers::e), 12.0 * (R + R3), 16.0 * R});
}

CutoffParams make_cutoff_params(double M, double R, double R3, double T) {
  if (!(R > 0.0) || !(R3 > 0.0)) throw ConfigError("cutoff params: R and R3 must be positive");
  CutoffParams cp;
  cp.T = T;
  cp.R = R;
  cp.R3 = R3;
  cp.T0 = admissible_T0(M, R, R3);
  if (!(T >= cp.T0)) {
    throw PreconditionError("cutoff params: T = " + std::to_string(T) +
                            " is below the admissible T0 = " + std::to_string(cp.T0));
  }
  return cp;
}

double data_support_radius(double M, double R1, double R2) {
  return std::max(std::abs(tortoise(M, 2.0 * M + R1)), std::abs(tortoise(M, 2.0 * M + R2)));
}

double Phi_lambda(const EigenFn& e, const CutoffParams& cp, double p, double t, double rstar) {
  const double two_pp = 2.0 * p / (p - 1.0);
  const double time_cut = eta_T(t, cp.T);
  const double char_cut = chi_T(t - rstar + cp.R3, cp.T);
  if (time_cut == 0.0 || char_cut == 0.0) return 0.0;
  const double r = background_at(e.grid().M(), rstar).r;
  // e^{-lambda t} phi r^2 = psi e^{lambda (r* - t)} r.
  const double weight = e.scaled_at(rstar) * std::exp(e.lambda() * (rstar - t)) * r;
  return std::pow(time_cut, two_pp) * std::pow(char_cut, two_pp) * weight;
}

}  // namespace hb

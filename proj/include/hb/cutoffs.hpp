#pragma once

// Smooth cutoffs used by the test-function constructions. Each is built from
// the exponential bridge B, a C-infinity monotone step from 0 (s <= 0) to
// 1 (s >= 1), and realizes the plateau values exactly:
//
//   eta(s)   = 1 on [0, 1/3],  0 on [2/3, inf)
//   alpha(s) = 0 on (-inf, 1/8], 1 on [1/4, inf)
//   chi(s)   = 1 on [0, 3/4],  0 on [5/6, inf)
//   eta*(s)  = eta(s) restricted to s >= 1/8
//
// The T-scaled versions are plain reparametrizations, eta_T(t) = eta(t / T).

#include "hb/eigen.hpp"

namespace hb {

double bridge(double s);

double eta(double s);
double alpha(double s);
double chi(double s);
double eta_star(double s);

inline double eta_T(double t, double T) { return eta(t / T); }
inline double alpha_T(double rstar, double T) { return alpha(rstar / T); }
inline double chi_T(double theta, double T) { return chi(theta / T); }
inline double eta_star_T(double t, double T) { return eta_star(t / T); }

// T0 = max{8(4M + e), 12(R + R3), 16R}.
double admissible_T0(double M, double R, double R3);

struct CutoffParams {
  double T = 0.0;   // time scale of the cutoffs
  double R3 = 1.0;  // shift of the characteristic cutoff
  double R = 0.0;   // data support radius in r*
  double T0 = 0.0;  // smallest admissible T
};

// Throws ConfigError for R <= 0 or R3 <= 0 and PreconditionError for T < T0.
CutoffParams make_cutoff_params(double M, double R, double R3, double T);

// Support radius R = max |r*| over the data support r in [2M + R1, 2M + R2].
double data_support_radius(double M, double R1, double R2);

// Phi_lambda(t, r) = eta_T^{2p'}(t) chi_T^{2p'}(t - r* + R3) e^{-lambda t} phi_lambda(r) r^2,
// with p' = p / (p - 1).
double Phi_lambda(const EigenFn& e, const CutoffParams& cp, double p, double t, double rstar);

}  // namespace hb

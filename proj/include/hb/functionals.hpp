#pragma once

// Space-time integral functionals evaluated on stored evolutions. All
// integrals are over dr dt with the radial symmetry collapsing the sphere to
// 4 pi; the snapshot grid lives in r*, so dr = F dr* inside the quadrature.
// Error estimates compare against the same rule on every other snapshot and
// every other stored node.

#include <string>

#include "hb/bq.hpp"
#include "hb/cutoffs.hpp"
#include "hb/evolve.hpp"

namespace hb {

struct FunctionalSample {
  std::string name;
  double T_or_L = 0.0;
  double value = 0.0;
  double quadrature_error = 0.0;
  // Y only: the sigma = L inner integral, used as L Y'(L).
  double derivative = 0.0;
};

// F0(T) = 4 pi int int |u|^p eta_T^{2p'} alpha_T^{2p'} r^2 dr dt.
FunctionalSample functional_F0(const SnapshotStore& store, const CutoffParams& cp, double p);
// F1(T): F0 without the spatial cutoff.
FunctionalSample functional_F1(const SnapshotStore& store, const CutoffParams& cp, double p);

// F0 T^{2p'-4} and F1 T^{2p'} e^{-T/(3M(p-1))}.
double F0_bound_ratio(double F0, double T, double p);
double F1_bound_ratio(double F1, double T, double p, double M);

struct C1Value {
  double f_part = 0.0;  // 4 pi int r^2/F f phi dr
  double g_part = 0.0;  // 4 pi int r^2/F g phi dr
  double value = 0.0;   // lambda f_part + g_part
};

// C1 = 4 pi int (r^2 / F)(lambda f + g) phi_lambda dr over the data support.
C1Value constant_C1(const ProblemSpec& spec, const EigenFn& e);

// Y(L) = int_1^L I(sigma, L) dsigma / sigma with
// I(sigma, L) = 4 pi int int |u|^p b_q eta*_sigma^{2p'} alpha_L^{2p'} r^2 dr dt,
// outer integral on 48 log-spaced sigma nodes, spatial sum cut at the light
// cone r* <= t + R. derivative = I(L, L).
// Precondition: 16 R <= L <= T.
FunctionalSample functional_Y(const SnapshotStore& store, const BqWeight& bank,
                              const CutoffParams& cp, double p, double L);

}  // namespace hb

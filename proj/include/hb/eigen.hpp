#pragma once

// Growing solutions of the static l = 0 Regge-Wheeler equation
//
//   d^2 varphi / dr*^2 - V(r) varphi = lambda^2 varphi,  varphi ~ e^{lambda r*} as r* -> -inf,
//
// and the derived radial function phi = varphi / r.
//
// Samples are kept in the scaled form psi = varphi e^{-lambda r*} (and psi'),
// which is bounded for all r*; unscaled accessors are provided where they fit
// in double precision.

#include <cstddef>
#include <memory>
#include <vector>

#include "hb/geometry.hpp"

namespace hb {

struct EigenOptions {
  // Test hook: integrate with V = 0 (varphi = e^{lambda r*} exactly).
  bool free_potential = false;
};

class EigenFn {
 public:
  EigenFn(double lambda, std::shared_ptr<const RadialGrid> grid, std::vector<double> scaled,
          std::vector<double> dscaled, bool free_potential);

  double lambda() const { return lambda_; }
  const RadialGrid& grid() const { return *grid_; }
  const std::shared_ptr<const RadialGrid>& grid_ptr() const { return grid_; }
  bool free_potential() const { return free_potential_; }
  // Left-asymptote constant: varphi e^{-lambda r*} -> normalization.
  double normalization() const { return 1.0; }

  // psi_i = varphi(r*_i) e^{-lambda r*_i} and its r*-derivative.
  const std::vector<double>& scaled() const { return scaled_; }
  const std::vector<double>& dscaled() const { return dscaled_; }

  double varphi(std::size_t i) const;
  double dvarphi(std::size_t i) const;
  // Throws RangeError when lambda * |r*| exceeds the double range guard (600).
  std::vector<double> varphi_samples() const;
  std::vector<double> dvarphi_samples() const;

  // Cubic Hermite interpolation of psi (and psi') at arbitrary r* on the grid.
  double scaled_at(double rstar) const;
  double dscaled_at(double rstar) const;

  // Max over interior nodes of the centered second-difference residual of the
  // ODE, relative to varphi_i.
  double ode_residual() const;

 private:
  double lambda_;
  std::shared_ptr<const RadialGrid> grid_;
  std::vector<double> scaled_;
  std::vector<double> dscaled_;
  bool free_potential_;
};

// Classical RK4 on the grid nodes (V at half nodes from RadialGrid::V_mid),
// from varphi = e^{lambda rstar_min}, varphi' = lambda varphi at the left edge.
// Preconditions: lambda > 0, rstar_min <= -40 M and V(rstar_min) <= 1e-8 lambda^2.
EigenFn solve_eigenfunction(double lambda, std::shared_ptr<const RadialGrid> grid,
                            EigenOptions options = {});

// Leftmost r* at which the potential is below 1e-8 lambda^2 (and <= -40 M).
double eigen_left_edge(double M, double lambda);

// phi = varphi / r at each node. Throws RangeError on overflow.
std::vector<double> phi_from_varphi(const EigenFn& e);
// phi e^{-lambda r*} = psi / r.
std::vector<double> phi_scaled(const EigenFn& e);

// d phi / dr = (varphi' / F - varphi / r) / r at each node. Throws RangeError
// on overflow.
std::vector<double> dphi_dr(const EigenFn& e);
// e^{-lambda r*} d phi / dr.
std::vector<double> dphi_dr_scaled(const EigenFn& e);

struct AsymptoticsReport {
  double ratio_min = 0.0;  // min of phi r e^{-lambda r*}
  double ratio_max = 0.0;  // max of phi r e^{-lambda r*}
  double derived_C = 0.0;  // max of |d phi/dr| (r - 2M) e^{-lambda r*} / lambda
  double derivative_ratio_min = 0.0;
  double min_dphi_dr_scaled = 0.0;  // sign check of d phi / dr
  double ode_residual = 0.0;
};

AsymptoticsReport check_asymptotics(const EigenFn& e);

}  // namespace hb

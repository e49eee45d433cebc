#pragma once

// The superposed weight
//
//   b_q(t, r) = int_0^1 e^{-lambda t} phi_lambda(r) lambda^{q-1} d lambda,
//
// evaluated from a cached bank of eigenfunctions. The substitution
// mu = lambda^q turns lambda^{q-1} d lambda into d mu / q and removes the
// endpoint singularity; mu is then integrated by composite Gauss-Legendre on
// panels whose lambda-breakpoints halve geometrically down to lambda_floor,
// plus one bottom panel [0, lambda_floor^q]. Every evaluation is done with n
// and n/2 nodes per panel and the difference reported as the error estimate.

#include <cstddef>
#include <memory>
#include <vector>

#include "hb/eigen.hpp"

namespace hb {

struct BqOptions {
  std::size_t nodes_per_panel = 16;  // fine rule; the coarse rule uses half
  double lambda_floor = 1e-8;
  double tolerance = 1e-6;  // relative; exceeded -> NumericalError
  EigenOptions eigen;
};

// Smallest lambda_floor that keeps the bottom panel negligible up to time t_max.
double bq_lambda_floor(double t_max);

class BqWeight {
 public:
  struct Value {
    double value = 0.0;
    double error = 0.0;  // |fine - coarse| / |fine|
  };

  // Builds the eigen bank on a grid [eigen_left_edge(lambda_min), rstar_max]
  // with spacing h.
  static BqWeight build(double q, double M, double rstar_max, double h, BqOptions options = {});

  double q() const { return q_; }
  const RadialGrid& grid() const { return *grid_; }
  const std::shared_ptr<const RadialGrid>& grid_ptr() const { return grid_; }
  // Fine-rule nodes and weights in lambda (weights include the 1/q Jacobian).
  const std::vector<double>& lambda_nodes() const { return fine_.lambda; }
  const std::vector<double>& quad_weights() const { return fine_.weight; }
  const std::vector<EigenFn>& eigen_bank() const { return fine_.bank; }
  std::size_t bank_size() const { return fine_.bank.size() + coarse_.bank.size(); }

  // b_{q + shift}(t, r(r*)): shift = 0 gives b_q, shift = 1 gives b_{q+1}.
  Value evaluate(double t, double rstar, int shift = 0) const;
  Value bq(double t, double rstar) const { return evaluate(t, rstar, 0); }
  Value bq_plus1(double t, double rstar) const { return evaluate(t, rstar, 1); }

  // Unchecked fine-rule value, used in bulk functional evaluation.
  double value(double t, double rstar, int shift = 0) const;

 private:
  struct Rule {
    std::vector<double> lambda;
    std::vector<double> weight;
    std::vector<EigenFn> bank;
  };

  BqWeight(double q, std::shared_ptr<const RadialGrid> grid, Rule fine, Rule coarse,
           double tolerance);

  static double sum(const Rule& rule, const RadialGrid& g, double t, double rstar, int shift);

  double q_;
  std::shared_ptr<const RadialGrid> grid_;
  Rule fine_;
  Rule coarse_;
  double tolerance_;
};

struct BqBoundsReport {
  double bq_scaled_min = 0.0;   // min of b_q (t+R)^q
  double bq_scaled_max = 0.0;   // max of b_q (t+R)^q
  double bq1_scaled_max = 0.0;  // max of b_{q+1} (t+R)(t+R+1-r*)^q
  double bq1_scaled_max_inner = 0.0;  // ... restricted to r* <= (t+R)/2
  double bq1_scaled_max_outer = 0.0;  // ... restricted to r* >= (t+R)/2
  double slope = 0.0;           // d ln b_q / d ln(t+R) at r* = rstar_grid.front()
  double slope_r_squared = 0.0;
  double max_quadrature_error = 0.0;
  std::size_t points = 0;
};

// Scans the product grid with r* <= t + R. Precondition: every r* >= 4M + e.
BqBoundsReport verify_bq_bounds(const BqWeight& bank, const std::vector<double>& t_grid,
                                const std::vector<double>& rstar_grid, double R);

// | |d_t b_q| - b_{q+1} | / b_{q+1} using a centered difference with step dt.
double bq_time_derivative_mismatch(const BqWeight& bank, double t, double rstar, double dt);

}  // namespace hb

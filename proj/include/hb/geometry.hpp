#pragma once

// Schwarzschild exterior background: metric factor, Regge-Wheeler tortoise
// coordinate and its inverse, the l = 0 potential, and the shared r* grid.
//
// Geometric units throughout: r and M carry the same length unit, and the
// tortoise coordinate is r* = r + 2M ln(r - 2M) with the logarithm taken of
// the bare length (no 2M rescaling inside the log).

#include <cstddef>
#include <memory>
#include <vector>

namespace hb {

struct SchwarzschildParams {
  double M = 1.0;

  // Throws ConfigError unless M is finite and positive.
  void validate() const;
};

// F(r) = 1 - 2M/r. Throws DomainError for r <= 2M.
double metric_factor(double M, double r);

// r* = r + 2M ln(r - 2M). Throws DomainError for r <= 2M.
double tortoise(double M, double r);

// Same as tortoise() but parameterized by x = ln(r - 2M), which stays exact
// arbitrarily close to the horizon where r itself rounds to 2M.
double tortoise_from_log_excess(double M, double x);

// Inverse of tortoise_from_log_excess: returns x = ln(r - 2M) for any finite
// r*. Safeguarded Newton on the convex residual with a bisection fallback.
double log_excess_from_tortoise(double M, double rstar);

// Unique r > 2M with tortoise(r) = rstar (rounds to 2M for r* << -70M).
double radius_from_tortoise(double M, double rstar);

// Regge-Wheeler potential V(r) = 2M F(r) / r^3 for the l = 0 reduction.
double potential(double M, double r);

// Background quantities at r(r*) evaluated through the log excess, so F and V
// decay smoothly to zero instead of hitting the r = 2M rounding floor.
struct BackgroundPoint {
  double log_excess;  // ln(r - 2M)
  double r;
  double F;
  double V;
};
BackgroundPoint background_at(double M, double rstar);

// Uniform sampling of the tortoise coordinate with precomputed background
// tables. Immutable after construction.
class RadialGrid {
 public:
  double M() const { return M_; }
  double rstar_min() const { return rstar_min_; }
  double rstar_max() const { return rstar_max_; }
  double h() const { return h_; }
  std::size_t size() const { return r_.size(); }

  double rstar(std::size_t i) const { return rstar_min_ + static_cast<double>(i) * h_; }

  const std::vector<double>& log_excess() const { return log_excess_; }
  const std::vector<double>& r() const { return r_; }
  const std::vector<double>& F() const { return F_; }
  const std::vector<double>& V() const { return V_; }
  // Potential at the cell midpoints rstar(i) + h/2, size() - 1 entries.
  const std::vector<double>& V_mid() const { return V_mid_; }

  // Largest node index i with rstar(i) <= rstar, clamped to [0, size() - 2].
  std::size_t cell_of(double rstar) const;

 private:
  friend RadialGrid build_grid(double M, double rstar_min, double rstar_max, double h);

  double M_ = 1.0;
  double rstar_min_ = 0.0;
  double rstar_max_ = 0.0;
  double h_ = 1.0;
  std::vector<double> log_excess_;
  std::vector<double> r_;
  std::vector<double> F_;
  std::vector<double> V_;
  std::vector<double> V_mid_;
};

// Nodes rstar_min + i*h for i = 0..n-1, with n the smallest count reaching
// rstar_max (the stored rstar_max is the last node). Throws ConfigError on
// non-finite input, M <= 0, h <= 0 or rstar_min >= rstar_max.
RadialGrid build_grid(double M, double rstar_min, double rstar_max, double h);

std::shared_ptr<const RadialGrid> make_grid(double M, double rstar_min, double rstar_max,
                                            double h);

}  // namespace hb

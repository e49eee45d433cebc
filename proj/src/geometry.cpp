#include "hb/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hb/errors.hpp"

namespace hb {

namespace {

void require_exterior(double M, double r, const char* what) {
  if (!(r > 2.0 * M)) {
    throw DomainError(std::string(what) + ": r = " + std::to_string(r) +
                      " is not outside the horizon r = 2M");
  }
}

// g(x) = 2M + e^x + 2M x - r*, increasing and convex in x.
double residual(double M, double x, double rstar) {
  return tortoise_from_log_excess(M, x) - rstar;
}

}  // namespace

void SchwarzschildParams::validate() const {
  if (!std::isfinite(M) || M <= 0.0) {
    throw ConfigError("M must be finite and positive");
  }
}

double metric_factor(double M, double r) {
  require_exterior(M, r, "metric_factor");
  return 1.0 - 2.0 * M / r;
}

double tortoise(double M, double r) {
  require_exterior(M, r, "tortoise");
  return r + 2.0 * M * std::log(r - 2.0 * M);
}

double tortoise_from_log_excess(double M, double x) {
  return 2.0 * M + std::exp(x) + 2.0 * M * x;
}

double log_excess_from_tortoise(double M, double rstar) {
  if (!std::isfinite(rstar)) {
    throw DomainError("log_excess_from_tortoise: r* must be finite");
  }
  const double two_m = 2.0 * M;

  // Asymptotic guesses: r ~ r* far out, r - 2M ~ exp((r* - 2M)/2M) near the
  // horizon.
  double x = 0.0;
  if (rstar > two_m + 1.0) {
    const double r_guess = rstar - two_m * std::log(std::max(rstar - two_m, 1.0));
    x = std::log(std::max(r_guess - two_m, std::numeric_limits<double>::min()));
  } else {
    x = (rstar - two_m) / two_m;
  }

  // Bracket the root; g is strictly increasing.
  double lo = x - 1.0;
  double hi = x + 1.0;
  double step = 1.0;
  while (residual(M, lo, rstar) > 0.0) {
    step *= 2.0;
    lo -= step;
  }
  step = 1.0;
  while (residual(M, hi, rstar) < 0.0) {
    step *= 2.0;
    hi += step;
  }
  x = std::clamp(x, lo, hi);

  const double tol = 1e-15 * std::max(1.0, std::abs(rstar));
  for (int iter = 0; iter < 200; ++iter) {
    const double g = residual(M, x, rstar);
    if (g == 0.0) return x;
    if (g < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double dg = std::exp(x) + two_m;
    double next = x - g / dg;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-16 * std::max(1.0, std::abs(x)) || hi - lo <= tol) {
      return next;
    }
    x = next;
  }
  return x;
}

double radius_from_tortoise(double M, double rstar) {
  return 2.0 * M + std::exp(log_excess_from_tortoise(M, rstar));
}

double potential(double M, double r) {
  const double F = metric_factor(M, r);
  return 2.0 * M * F / (r * r * r);
}

BackgroundPoint background_at(double M, double rstar) {
  BackgroundPoint b{};
  b.log_excess = log_excess_from_tortoise(M, rstar);
  const double excess = std::exp(b.log_excess);
  b.r = 2.0 * M + excess;
  b.F = excess / b.r;
  b.V = 2.0 * M * b.F / (b.r * b.r * b.r);
  return b;
}

std::size_t RadialGrid::cell_of(double rstar) const {
  const double s = (rstar - rstar_min_) / h_;
  if (!(s > 0.0)) return 0;
  const auto i = static_cast<std::size_t>(std::floor(s));
  return std::min(i, size() - 2);
}

RadialGrid build_grid(double M, double rstar_min, double rstar_max, double h) {
  if (!std::isfinite(M) || !std::isfinite(rstar_min) || !std::isfinite(rstar_max) ||
      !std::isfinite(h)) {
    throw ConfigError("build_grid: non-finite input");
  }
  if (M <= 0.0) throw ConfigError("build_grid: M must be positive");
  if (h <= 0.0) throw ConfigError("build_grid: h must be positive");
  if (!(rstar_min < rstar_max)) throw ConfigError("build_grid: need rstar_min < rstar_max");

  const double cells = (rstar_max - rstar_min) / h;
  const auto n_cells = static_cast<std::size_t>(std::ceil(cells - 1e-9 * std::max(1.0, cells)));
  const std::size_t n = std::max<std::size_t>(n_cells, 1) + 1;

  RadialGrid g;
  g.M_ = M;
  g.rstar_min_ = rstar_min;
  g.h_ = h;
  g.rstar_max_ = rstar_min + static_cast<double>(n - 1) * h;
  g.log_excess_.resize(n);
  g.r_.resize(n);
  g.F_.resize(n);
  g.V_.resize(n);
  g.V_mid_.resize(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const BackgroundPoint b = background_at(M, g.rstar(i));
    g.log_excess_[i] = b.log_excess;
    g.r_[i] = b.r;
    g.F_[i] = b.F;
    g.V_[i] = b.V;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    g.V_mid_[i] = background_at(M, g.rstar(i) + 0.5 * h).V;
  }
  return g;
}

std::shared_ptr<const RadialGrid> make_grid(double M, double rstar_min, double rstar_max,
                                            double h) {
  return std::make_shared<const RadialGrid>(build_grid(M, rstar_min, rstar_max, h));
}

}  // namespace hb

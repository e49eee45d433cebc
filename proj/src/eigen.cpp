#include "hb/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hb/errors.hpp"

namespace hb {

namespace {

constexpr double kExpGuard = 600.0;
constexpr double kLeftPotentialRatio = 1e-8;

}  // namespace

EigenFn::EigenFn(double lambda, std::shared_ptr<const RadialGrid> grid, std::vector<double> scaled,
                 std::vector<double> dscaled, bool free_potential)
    : lambda_(lambda),
      grid_(std::move(grid)),
      scaled_(std::move(scaled)),
      dscaled_(std::move(dscaled)),
      free_potential_(free_potential) {}

double EigenFn::varphi(std::size_t i) const {
  return scaled_[i] * std::exp(lambda_ * grid_->rstar(i));
}

double EigenFn::dvarphi(std::size_t i) const {
  return (dscaled_[i] + lambda_ * scaled_[i]) * std::exp(lambda_ * grid_->rstar(i));
}

std::vector<double> EigenFn::varphi_samples() const {
  if (lambda_ * std::max(std::abs(grid_->rstar_min()), std::abs(grid_->rstar_max())) >
      kExpGuard) {
    throw RangeError("varphi overflows double range; use the scaled samples psi = varphi e^{-lambda r*}");
  }
  std::vector<double> out(scaled_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = varphi(i);
  return out;
}

std::vector<double> EigenFn::dvarphi_samples() const {
  if (lambda_ * std::max(std::abs(grid_->rstar_min()), std::abs(grid_->rstar_max())) >
      kExpGuard) {
    throw RangeError("dvarphi overflows double range; use the scaled samples");
  }
  std::vector<double> out(scaled_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = dvarphi(i);
  return out;
}

double EigenFn::scaled_at(double rstar) const {
  const RadialGrid& g = *grid_;
  if (rstar < g.rstar_min() - 1e-12 * g.h() || rstar > g.rstar_max() + 1e-12 * g.h()) {
    throw DomainError("EigenFn::scaled_at: r* outside the eigenfunction grid");
  }
  const std::size_t i = g.cell_of(rstar);
  const double h = g.h();
  const double s = std::clamp((rstar - g.rstar(i)) / h, 0.0, 1.0);
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return h00 * scaled_[i] + h10 * h * dscaled_[i] + h01 * scaled_[i + 1] +
         h11 * h * dscaled_[i + 1];
}

double EigenFn::dscaled_at(double rstar) const {
  const RadialGrid& g = *grid_;
  if (rstar < g.rstar_min() - 1e-12 * g.h() || rstar > g.rstar_max() + 1e-12 * g.h()) {
    throw DomainError("EigenFn::dscaled_at: r* outside the eigenfunction grid");
  }
  const std::size_t i = g.cell_of(rstar);
  const double h = g.h();
  const double s = std::clamp((rstar - g.rstar(i)) / h, 0.0, 1.0);
  const double s2 = s * s;
  const double d00 = (6.0 * s2 - 6.0 * s) / h;
  const double d10 = 3.0 * s2 - 4.0 * s + 1.0;
  const double d01 = (-6.0 * s2 + 6.0 * s) / h;
  const double d11 = 3.0 * s2 - 2.0 * s;
  return d00 * scaled_[i] + d10 * dscaled_[i] + d01 * scaled_[i + 1] + d11 * dscaled_[i + 1];
}

double EigenFn::ode_residual() const {
  const RadialGrid& g = *grid_;
  const double h = g.h();
  const double up = std::exp(lambda_ * h);
  const double down = std::exp(-lambda_ * h);
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < scaled_.size(); ++i) {
    const double V = free_potential_ ? 0.0 : g.V()[i];
    const double second =
        (up * scaled_[i + 1] - 2.0 * scaled_[i] + down * scaled_[i - 1]) / (h * h * scaled_[i]);
    worst = std::max(worst, std::abs(second - (V + lambda_ * lambda_)));
  }
  return worst;
}

double eigen_left_edge(double M, double lambda) {
  // V ~ (r - 2M) / (8 M^3) and r - 2M ~ e^{(r* - 2M)/(2M)} near the horizon;
  // start from that estimate and walk left until the bound holds.
  const double target = kLeftPotentialRatio * lambda * lambda;
  double rstar = std::min(-40.0 * M, 2.0 * M + 2.0 * M * std::log(8.0 * M * M * M * target));
  while (background_at(M, rstar).V > target) rstar -= 2.0 * M;
  return std::floor(rstar);
}

EigenFn solve_eigenfunction(double lambda, std::shared_ptr<const RadialGrid> grid,
                            EigenOptions options) {
  if (!grid) throw ConfigError("solve_eigenfunction: null grid");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw PreconditionError("solve_eigenfunction: lambda must be positive");
  }
  const RadialGrid& g = *grid;
  const double M = g.M();
  if (!options.free_potential) {
    const double V0 = g.V().front();
    if (g.rstar_min() > -40.0 * M || V0 > kLeftPotentialRatio * lambda * lambda) {
      std::ostringstream msg;
      msg << "solve_eigenfunction: grid too short on the left (rstar_min = " << g.rstar_min()
          << ", V = " << V0 << "); need rstar_min <= " << eigen_left_edge(M, lambda);
      throw PreconditionError(msg.str());
    }
  }
  if (g.size() < 2) throw PreconditionError("solve_eigenfunction: grid needs two nodes");

  const std::size_t n = g.size();
  const double h = g.h();
  const double two_lambda = 2.0 * lambda;
  std::vector<double> psi(n);
  std::vector<double> dpsi(n);
  psi[0] = 1.0;
  dpsi[0] = 0.0;

  // y = (psi, chi): psi' = chi, chi' = -2 lambda chi + V psi.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double V0 = options.free_potential ? 0.0 : g.V()[i];
    const double Vm = options.free_potential ? 0.0 : g.V_mid()[i];
    const double V1 = options.free_potential ? 0.0 : g.V()[i + 1];
    const double y = psi[i];
    const double c = dpsi[i];

    const double k1y = c;
    const double k1c = -two_lambda * c + V0 * y;
    const double y2 = y + 0.5 * h * k1y;
    const double c2 = c + 0.5 * h * k1c;
    const double k2y = c2;
    const double k2c = -two_lambda * c2 + Vm * y2;
    const double y3 = y + 0.5 * h * k2y;
    const double c3 = c + 0.5 * h * k2c;
    const double k3y = c3;
    const double k3c = -two_lambda * c3 + Vm * y3;
    const double y4 = y + h * k3y;
    const double c4 = c + h * k3c;
    const double k4y = c4;
    const double k4c = -two_lambda * c4 + V1 * y4;

    psi[i + 1] = y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    dpsi[i + 1] = c + h / 6.0 * (k1c + 2.0 * k2c + 2.0 * k3c + k4c);
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!(psi[i] > 0.0) || !(dpsi[i] + lambda * psi[i] > 0.0) || psi[i] < 1.0 - 1e-6 ||
        !std::isfinite(psi[i]) || !std::isfinite(dpsi[i])) {
      std::ostringstream msg;
      msg << "solve_eigenfunction: invariant violated at r* = " << g.rstar(i)
          << " (psi = " << psi[i] << ", psi' = " << dpsi[i] << ")";
      throw NumericalError(msg.str());
    }
  }
  return EigenFn(lambda, std::move(grid), std::move(psi), std::move(dpsi), options.free_potential);
}

std::vector<double> phi_from_varphi(const EigenFn& e) {
  const auto varphi = e.varphi_samples();
  std::vector<double> out(varphi.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = varphi[i] / e.grid().r()[i];
  return out;
}

std::vector<double> phi_scaled(const EigenFn& e) {
  std::vector<double> out(e.scaled().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = e.scaled()[i] / e.grid().r()[i];
  return out;
}

std::vector<double> dphi_dr_scaled(const EigenFn& e) {
  const RadialGrid& g = e.grid();
  std::vector<double> out(e.scaled().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double r = g.r()[i];
    const double dvar = e.dscaled()[i] + e.lambda() * e.scaled()[i];
    // varphi' / F = varphi' r / (r - 2M), with r - 2M = exp(log_excess).
    const double inv_F = r * std::exp(-g.log_excess()[i]);
    out[i] = (dvar * inv_F - e.scaled()[i] / r) / r;
  }
  return out;
}

std::vector<double> dphi_dr(const EigenFn& e) {
  const RadialGrid& g = e.grid();
  if (e.lambda() * std::max(std::abs(g.rstar_min()), std::abs(g.rstar_max())) > kExpGuard) {
    throw RangeError("dphi_dr overflows double range; use dphi_dr_scaled");
  }
  auto out = dphi_dr_scaled(e);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= std::exp(e.lambda() * g.rstar(i));
  return out;
}

AsymptoticsReport check_asymptotics(const EigenFn& e) {
  const RadialGrid& g = e.grid();
  const double lambda = e.lambda();
  AsymptoticsReport rep;
  rep.ratio_min = std::numeric_limits<double>::infinity();
  rep.derivative_ratio_min = std::numeric_limits<double>::infinity();
  rep.min_dphi_dr_scaled = std::numeric_limits<double>::infinity();
  const auto dphi = dphi_dr_scaled(e);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double psi = e.scaled()[i];
    rep.ratio_min = std::min(rep.ratio_min, psi);
    rep.ratio_max = std::max(rep.ratio_max, psi);
    // |d phi/dr| (r - 2M) e^{-lambda r*} / lambda = |psi' + lambda psi - psi F / r| / lambda.
    const double d = std::abs(e.dscaled()[i] + lambda * psi - psi * g.F()[i] / g.r()[i]) / lambda;
    rep.derived_C = std::max(rep.derived_C, d);
    rep.derivative_ratio_min = std::min(rep.derivative_ratio_min, d);
    rep.min_dphi_dr_scaled = std::min(rep.min_dphi_dr_scaled, dphi[i]);
  }
  rep.ode_residual = e.ode_residual();
  return rep;
}

}  // namespace hb

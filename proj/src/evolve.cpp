#include "hb/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hb/cutoffs.hpp"
#include "hb/errors.hpp"
#include "hb/scaling.hpp"

namespace hb {

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::blewup:
      return "blewup";
    case RunStatus::survived_horizon:
      return "survived_horizon";
    case RunStatus::boundary_touched:
      return "boundary_touched";
  }
  return "unknown";
}

void ProblemSpec::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  need(std::isfinite(M) && M > 0.0, "M: must be positive");
  need(p >= 2.0 && p <= 1.0 + std::sqrt(2.0) + 1e-12, "p: must lie in [2, 1+sqrt(2)]");
  need(std::isfinite(eps) && eps > 0.0, "eps: must be positive");
  need(R1 > 0.0 && R2 > R1 && std::isfinite(R2), "R1, R2: need 0 < R1 < R2");
  need(profile == "bump", "profile: only 'bump' is available");
  need(std::isfinite(g_scale) && g_scale >= 0.0, "g_scale: must be nonnegative");
  need(grid != nullptr, "grid: missing");
  need(grid->M() == M, "grid: built for a different M");
  need(cfl > 0.0 && cfl <= 1.0, "cfl: must lie in (0, 1]");
  need(blowup_threshold > 0.0 && secondary_threshold > 0.0, "blowup_threshold: must be positive");
  need(dt_min > 0.0, "dt_min: must be positive");
  need(std::isfinite(T_max) && T_max > 0.0, "T_max: must be positive");
  need(snapshot_dt >= 0.0, "snapshot_dt: must be nonnegative");
  need(snapshot_stride >= 1, "snapshot_stride: must be >= 1");
  const double lo = tortoise(M, 2.0 * M + R1);
  const double hi = tortoise(M, 2.0 * M + R2);
  need(lo > grid->rstar_min() && hi < grid->rstar_max(), "grid: data support lies outside the grid");
}

double ProblemSpec::support_radius() const { return data_support_radius(M, R1, R2); }

std::shared_ptr<const RadialGrid> grid_for_horizon(double M, double T_max, double R, double h) {
  const double half = T_max + R + 10.0 * h + 2.0;
  return make_grid(M, -half, half, h);
}

double bump(double s) {
  if (!(s > 0.0 && s < 1.0)) return 0.0;
  return std::exp(-1.0 / (s * (1.0 - s)));
}

double data_f(const ProblemSpec& spec, double r) {
  return bump((r - (2.0 * spec.M + spec.R1)) / (spec.R2 - spec.R1));
}

double data_g(const ProblemSpec& spec, double r) { return spec.g_scale * data_f(spec, r); }

WaveState make_initial_data(const ProblemSpec& spec) {
  spec.validate();
  const RadialGrid& g = *spec.grid;
  WaveState s;
  s.w.assign(g.size(), 0.0);
  s.wt.assign(g.size(), 0.0);
  for (std::size_t i = 1; i + 1 < g.size(); ++i) {
    const double r = g.r()[i];
    s.w[i] = spec.eps * r * data_f(spec, r);
    s.wt[i] = spec.eps * r * data_g(spec, r);
  }
  return s;
}

Integrator::Integrator(const ProblemSpec& spec) : spec_(spec) {
  if (!spec_.grid) throw ConfigError("grid: missing");
  const RadialGrid& g = *spec_.grid;
  const std::size_t n = g.size();
  potential_.assign(n, 0.0);
  coupling_.assign(n, 0.0);
  inv_r_.assign(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!spec_.flat) {
      potential_[i] = g.V()[i];
      inv_r_[i] = 1.0 / g.r()[i];
    }
    if (spec_.nonlinear) {
      coupling_[i] = spec_.flat ? 1.0 : g.F()[i] * std::pow(g.r()[i], 1.0 - spec_.p);
    }
  }
  acc_.assign(n, 0.0);
}

void Integrator::rhs(const std::vector<double>& w, std::vector<double>& acc) const {
  acc.assign(w.size(), 0.0);
  if (w.size() >= 3) rhs_range(w, acc, 1, w.size() - 2);
}

void Integrator::rhs_range(const std::vector<double>& w, std::vector<double>& acc,
                           std::size_t lo, std::size_t hi) const {
  const double inv_h2 = 1.0 / (spec_.grid->h() * spec_.grid->h());
  const double p = spec_.p;
  const bool square = p == 2.0;
  for (std::size_t i = lo; i <= hi; ++i) {
    const double wi = w[i];
    double a = (w[i + 1] - 2.0 * wi + w[i - 1]) * inv_h2 - potential_[i] * wi;
    if (coupling_[i] != 0.0 && wi != 0.0) {
      const double aw = std::abs(wi);
      a += coupling_[i] * (square ? aw * aw : std::pow(aw, p));
    }
    acc[i] = a;
  }
}

void Integrator::step(WaveState& state, double dt) {
  const std::size_t n = state.w.size();
  if (n < 3) return;
  if (!primed_ || acc_.size() != n) {
    // Active window: outside [lo_, hi_] the fields and the acceleration are
    // exactly zero, so skipping those nodes leaves every bit unchanged.
    lo_ = n;
    hi_ = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (state.w[i] != 0.0 || state.wt[i] != 0.0) {
        lo_ = std::min(lo_, i);
        hi_ = i;
      }
    }
    if (lo_ > hi_) {
      lo_ = 1;
      hi_ = 0;
    } else {
      lo_ = std::max<std::size_t>(lo_, 2) - 1;
      hi_ = std::min(hi_ + 1, n - 2);
    }
    acc_.assign(n, 0.0);
    if (lo_ <= hi_) rhs_range(state.w, acc_, lo_, hi_);
    primed_ = true;
  }
  const double half = 0.5 * dt;
  for (std::size_t i = lo_; i <= hi_ && i + 1 < n; ++i) {
    state.wt[i] += half * acc_[i];
    state.w[i] += dt * state.wt[i];
  }
  if (lo_ <= hi_) {
    lo_ = std::max<std::size_t>(lo_, 2) - 1;
    hi_ = std::min(hi_ + 1, n - 2);
    rhs_range(state.w, acc_, lo_, hi_);
    for (std::size_t i = lo_; i <= hi_; ++i) state.wt[i] += half * acc_[i];
  }
  state.t += dt;
}

double Integrator::amplitude(const std::vector<double>& w) const {
  std::size_t lo = 0;
  std::size_t hi = w.size();
  if (primed_ && acc_.size() == w.size()) {
    lo = lo_;
    hi = std::min(hi_ + 1, w.size());
  }
  double a = 0.0;
  for (std::size_t i = lo; i < hi; ++i) a = std::max(a, std::abs(w[i]) * inv_r_[i]);
  return a;
}

std::vector<double> rhs(const WaveState& state, const ProblemSpec& spec) {
  Integrator integ(spec);
  std::vector<double> acc;
  integ.rhs(state.w, acc);
  return acc;
}

WaveState step(const WaveState& state, const ProblemSpec& spec, double dt) {
  if (!(dt > 0.0) || dt > spec.cfl * spec.grid->h() * (1.0 + 1e-12)) {
    throw PreconditionError("step: dt must lie in (0, cfl h]");
  }
  Integrator integ(spec);
  WaveState next = state;
  integ.step(next, dt);
  return next;
}

double energy(const WaveState& state, const ProblemSpec& spec, double dt) {
  const RadialGrid& g = *spec.grid;
  const double h = g.h();
  const std::size_t n = state.w.size();
  const auto& w = state.w;
  double kinetic = 0.0;
  double gradient = 0.0;
  double pot = 0.0;
  double correction = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double V = spec.flat ? 0.0 : g.V()[i];
    kinetic += state.wt[i] * state.wt[i];
    pot += V * w[i] * w[i];
    if (i + 1 < n) {
      const double d = (w[i + 1] - w[i]) / h;
      gradient += d * d;
    }
    if (dt > 0.0 && i > 0 && i + 1 < n) {
      const double kw = -(w[i + 1] - 2.0 * w[i] + w[i - 1]) / (h * h) + V * w[i];
      correction += kw * kw;
    }
  }
  return h * (0.5 * (kinetic + gradient + pot) - dt * dt / 8.0 * correction);
}

double support_radius(const WaveState& state, const RadialGrid& grid) {
  double peak = 0.0;
  for (double v : state.w) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return 0.0;
  const double cut = 1e-12 * peak;
  double radius = 0.0;
  for (std::size_t i = 0; i < state.w.size(); ++i) {
    if (std::abs(state.w[i]) > cut) radius = std::max(radius, std::abs(grid.rstar(i)));
  }
  return radius;
}

double detect_blowup(const AmplitudeHistory& history, double p, double threshold,
                     double fallback) {
  std::vector<double> t;
  std::vector<double> y;
  const double expo = -(p - 1.0) / 2.0;
  for (std::size_t k = 0; k < history.t.size(); ++k) {
    if (history.amplitude[k] > 0.01 * threshold && std::isfinite(history.amplitude[k])) {
      t.push_back(history.t[k]);
      y.push_back(std::pow(history.amplitude[k], expo));
    }
  }
  if (t.size() < 8) return fallback;
  for (std::size_t k = 1; k < y.size(); ++k) {
    if (!(y[k] < y[k - 1])) return fallback;
  }
  const LineFit fit = fit_line(t, y);
  if (!(fit.slope < 0.0)) return fallback;
  const double T = -fit.intercept / fit.slope;
  if (!std::isfinite(T)) return fallback;
  return std::max(T, t.back());
}

EvolveResult evolve_until(const ProblemSpec& spec) {
  return evolve_from(spec, make_initial_data(spec));
}

EvolveResult evolve_from(const ProblemSpec& spec, WaveState state) {
  spec.validate();
  const RadialGrid& g = *spec.grid;
  if (state.w.size() != g.size() || state.wt.size() != g.size()) {
    throw ConfigError("initial state does not match the grid");
  }
  Integrator integ(spec);
  const double h = g.h();
  const double R = spec.support_radius();
  const double edge = std::min(-g.rstar_min(), g.rstar_max());
  const double expo = (spec.p - 1.0) / 2.0;
  const double dt_base = spec.cfl * h;
  const double monitor_dt = spec.snapshot_dt > 0.0 ? spec.snapshot_dt : 1.0;

  EvolveResult out;
  LifespanRecord& rec = out.record;
  rec.p = spec.p;
  rec.eps = spec.eps;
  rec.M = spec.M;
  rec.h = h;
  out.snapshots.grid = spec.grid;
  out.snapshots.stride = spec.snapshot_stride;

  double amp = integ.amplitude(state.w);
  if (!(amp > 0.0)) throw ConfigError("initial data vanish identically");
  const double c_amp = 0.5 * dt_base * std::pow(amp, expo);
  double next_monitor = state.t;

  auto monitor = [&] {
    const double excess = support_radius(state, g) - (state.t + R + 2.0 * h);
    if (rec.support_checks == 0 || excess > rec.support_excess) rec.support_excess = excess;
    ++rec.support_checks;
    if (spec.snapshot_dt > 0.0) {
      std::vector<double> row;
      row.reserve(state.w.size() / spec.snapshot_stride + 1);
      for (std::size_t i = 0; i < state.w.size(); i += spec.snapshot_stride) {
        row.push_back(state.w[i]);
      }
      out.snapshots.times.push_back(state.t);
      out.snapshots.w.push_back(std::move(row));
      if (spec.snapshot_velocity) {
        std::vector<double> vel;
        for (std::size_t i = 0; i < state.wt.size(); i += spec.snapshot_stride) {
          vel.push_back(state.wt[i]);
        }
        out.snapshots.wt.push_back(std::move(vel));
      }
    }
  };

  for (;;) {
    rec.max_amplitude = std::max(rec.max_amplitude, amp);
    if (amp > 0.01 * spec.blowup_threshold || !std::isfinite(amp)) {
      out.history.t.push_back(state.t);
      out.history.amplitude.push_back(amp);
    }
    if (rec.T_secondary == 0.0 && amp > spec.secondary_threshold) rec.T_secondary = state.t;
    if (amp > spec.blowup_threshold || !std::isfinite(amp)) {
      rec.status = RunStatus::blewup;
      rec.T_threshold = state.t;
      break;
    }
    const bool at_horizon = state.t >= spec.T_max * (1.0 - 1e-14);
    if (state.t >= next_monitor - 1e-9 * monitor_dt || at_horizon) {
      monitor();
      next_monitor += monitor_dt;
    }
    if (at_horizon) {
      rec.status = RunStatus::survived_horizon;
      break;
    }
    if (state.t + R + 2.0 * h >= edge) {
      rec.status = RunStatus::boundary_touched;
      break;
    }
    double dt = dt_base;
    if (spec.nonlinear) dt = std::min(dt_base, c_amp * std::pow(amp, -expo));
    if (dt < spec.dt_min) {
      rec.status = RunStatus::blewup;
      rec.T_threshold = state.t;
      break;
    }
    if (state.t + dt > spec.T_max) dt = spec.T_max - state.t;
    integ.step(state, dt);
    ++rec.steps;
    amp = integ.amplitude(state.w);
  }

  rec.t_end = state.t;
  if (rec.status == RunStatus::blewup) {
    if (rec.T_secondary == 0.0) rec.T_secondary = rec.T_threshold;
    rec.T_fit = detect_blowup(out.history, spec.p, spec.blowup_threshold, rec.T_threshold);
  }
  return out;
}

}  // namespace hb

#pragma once

// Radially reduced semilinear wave equation on the Schwarzschild exterior.
// With w = r u the equation box u = |u|^p becomes
//
//   w_tt = w_{r*r*} - V w + F r^{1-p} |w|^p
//
// on the tortoise line. Second-order centered differences in r*, velocity
// Verlet in t, homogeneous Dirichlet values at the two end nodes. The grid is
// sized so that the end nodes are never causally reached; a run that gets
// there is flagged and rejected instead of patched.

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "hb/geometry.hpp"

namespace hb {

enum class RunStatus { blewup, survived_horizon, boundary_touched };

std::string to_string(RunStatus s);

struct ProblemSpec {
  double M = 1.0;
  double p = 2.0;
  double eps = 1.0;
  double R1 = 1.0;
  double R2 = 2.0;
  std::string profile = "bump";
  double g_scale = 1.0;  // g = g_scale * f
  std::shared_ptr<const RadialGrid> grid;
  double cfl = 0.5;
  double blowup_threshold = 1e8;
  double secondary_threshold = 1e6;
  double dt_min = 1e-12;
  double T_max = 100.0;
  // Snapshot store: one record every snapshot_dt time units (0 disables),
  // keeping every snapshot_stride-th node.
  double snapshot_dt = 0.0;
  std::size_t snapshot_stride = 1;
  bool snapshot_velocity = false;  // also store wt
  // Test hooks.
  bool nonlinear = true;
  bool flat = false;  // V = 0, F = 1, r^{1-p} = 1

  // Throws ConfigError naming the offending field.
  void validate() const;
  // Support radius R = max |r*| over the data support.
  double support_radius() const;
};

// Symmetric grid [-(T_max + R + pad), T_max + R + pad] with pad = 10h + 2.
std::shared_ptr<const RadialGrid> grid_for_horizon(double M, double T_max, double R, double h);

struct WaveState {
  double t = 0.0;
  std::vector<double> w;   // r u
  std::vector<double> wt;  // d_t (r u)
};

// bump(s) = exp(-1 / (s (1 - s))) on (0, 1), 0 elsewhere.
double bump(double s);
// Unscaled data profiles f(r) and g(r) = g_scale f(r).
double data_f(const ProblemSpec& spec, double r);
double data_g(const ProblemSpec& spec, double r);

WaveState make_initial_data(const ProblemSpec& spec);

// Acceleration field of the reduced equation. Caches per-node coefficients.
class Integrator {
 public:
  explicit Integrator(const ProblemSpec& spec);

  const ProblemSpec& spec() const { return spec_; }
  void rhs(const std::vector<double>& w, std::vector<double>& acc) const;
  // One kick-drift-kick step. The acceleration of the end state is cached and
  // reused by the next call; call invalidate() after editing a state by hand.
  void step(WaveState& state, double dt);
  void invalidate() { primed_ = false; }
  // max |w| / r (over the active window once stepping has started).
  double amplitude(const std::vector<double>& w) const;

 private:
  ProblemSpec spec_;
  std::vector<double> potential_;
  std::vector<double> coupling_;
  std::vector<double> inv_r_;
  void rhs_range(const std::vector<double>& w, std::vector<double>& acc, std::size_t lo,
                 std::size_t hi) const;

  std::vector<double> acc_;
  bool primed_ = false;
  std::size_t lo_ = 1;
  std::size_t hi_ = 0;
};

std::vector<double> rhs(const WaveState& state, const ProblemSpec& spec);
WaveState step(const WaveState& state, const ProblemSpec& spec, double dt);

// Discrete energy h sum(wt^2/2 + (D+ w)^2/2 + V w^2/2). With dt > 0 the
// velocity Verlet correction -dt^2/8 h |K w|^2 (K = -D2 + V) is included,
// which the linear scheme conserves to rounding.
double energy(const WaveState& state, const ProblemSpec& spec, double dt = 0.0);

// Largest |r*| with |w| > 1e-12 max|w|; 0 for the zero state.
double support_radius(const WaveState& state, const RadialGrid& grid);

struct SnapshotStore {
  std::shared_ptr<const RadialGrid> grid;
  std::size_t stride = 1;
  std::vector<double> times;
  std::vector<std::vector<double>> w;   // nodes 0, stride, 2 stride, ...
  std::vector<std::vector<double>> wt;  // empty unless velocities were requested

  std::size_t nodes() const { return w.empty() ? 0 : w.front().size(); }
  double rstar(std::size_t j) const { return grid->rstar(j * stride); }
};

struct LifespanRecord {
  double p = 0.0;
  double eps = 0.0;
  double M = 0.0;
  double h = 0.0;
  double T_threshold = 0.0;  // first time with max|u| > blowup_threshold
  double T_secondary = 0.0;  // first time with max|u| > secondary_threshold
  double T_fit = 0.0;
  RunStatus status = RunStatus::survived_horizon;
  std::size_t steps = 0;
  double t_end = 0.0;
  double max_amplitude = 0.0;
  // Finite speed of propagation monitor: max of support_radius - (t + R + 2h)
  // over all monitored instants, and how many instants were checked.
  double support_excess = 0.0;
  std::size_t support_checks = 0;
  // Relative change of T_threshold under h -> h/2 (filled by the sweep gate).
  double gate_change = -1.0;
};

struct AmplitudeHistory {
  std::vector<double> t;
  std::vector<double> amplitude;
};

// Blow-up time from the terminal window (samples above 0.01 threshold, at
// least 8) of a history assumed to follow c (T - t)^{-2/(p-1)}: the quantity
// amplitude^{-(p-1)/2} is linear in t and its root is T. Returns fallback
// when the window is too short, non-monotone or not decreasing.
double detect_blowup(const AmplitudeHistory& history, double p, double threshold,
                     double fallback);

struct EvolveResult {
  LifespanRecord record;
  SnapshotStore snapshots;
  AmplitudeHistory history;  // terminal part only
};

EvolveResult evolve_until(const ProblemSpec& spec);
EvolveResult evolve_from(const ProblemSpec& spec, WaveState state);

}  // namespace hb

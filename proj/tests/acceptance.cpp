// Acceptance gate: one PASS/FAIL line per criterion, tolerances pinned below.
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "hb/bq.hpp"
#include "hb/cli.hpp"
#include "hb/config.hpp"
#include "hb/eigen.hpp"
#include "hb/evolve.hpp"
#include "hb/functionals.hpp"
#include "hb/scaling.hpp"

using namespace hb;
namespace fs = std::filesystem;

namespace {

// Criterion 1.
constexpr double kSweepH = 0.2;
constexpr double kSweepTmax = 6000.0;
constexpr double kSlopeTol = 0.15;
constexpr double kGateTol = 0.03;
constexpr double kSweepSeconds = 600.0;
// Criterion 2.
constexpr double kLemma62Tol = 0.05;
constexpr double kLemma62Seconds = 60.0;
// Criterion 3.
constexpr double kEigenFloor = 1.0 - 1e-6;
constexpr double kResidualOrder = 1.9;
constexpr double kDerivedCSpread = 3.0;
// Criterion 4.
constexpr double kExactRelErr = 1e-3;
constexpr double kExactRatio = 3.5;
// Criterion 5.
constexpr double kEnergyDrift = 1e-6;
// Criterion 7.
constexpr double kBqSlopeTol = 0.05;
constexpr double kBqDtTol = 1e-4;
constexpr double kBoundedSpread = 50.0;
constexpr double kBqSeconds = 120.0;
// Criterion 9. The ratio creeps up to its large-t limit from below.
constexpr double kClosedFormTol = 1e-8;
constexpr double kBeyondGridSlack = 1e-3;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> geomspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(n - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

// Support excesses of every accepted evolution, gathered for criterion 6.
struct SupportLog {
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t runs = 0;
  std::size_t checks = 0;
  void add(const LifespanRecord& r) {
    worst = std::max(worst, r.support_excess);
    ++runs;
    checks += r.support_checks;
  }
};

SupportLog g_support;

Outcome lifespan_scaling() {
  const auto t0 = std::chrono::steady_clock::now();
  ProblemSpec base;
  base.p = 2.0;
  base.T_max = kSweepTmax;
  base.grid = make_grid(1.0, -1.0, 1.0, kSweepH);
  const std::vector<double> eps = geomspace(4.0, 0.4, 7);
  const auto records = sweep_lifespan(base, eps);
  const FitResult fit = fit_power_law(records);
  double gate = 0.0;
  for (const auto& r : records) {
    gate = std::max(gate, r.gate_change);
    g_support.add(r);
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = fit.rel_error <= kSlopeTol && gate < kGateTol && secs <= kSweepSeconds;
  o.detail = "slope " + fmt("%.4f", fit.slope) + " vs " + fmt("%.4f", fit.theory_slope) +
             ", rel err " + fmt("%.4f", fit.rel_error) + " (tol " + fmt("%.2f", kSlopeTol) +
             "), r^2 " + fmt("%.4f", fit.r_squared) + ", max gate change " + fmt("%.4f", gate) +
             " (tol " + fmt("%.2f", kGateTol) + "), " + std::to_string(records.size()) +
             " runs, " + fmt("%.0f", secs) + " s";
  return o;
}

Outcome critical_ode() {
  const auto t0 = std::chrono::steady_clock::now();
  const double p = 1.0 + std::numbers::sqrt2;
  const FitResult fit = lemma62_oracle(p, p, geomspace(1e-4, 1e-2, 9));
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = fit.rel_error <= kLemma62Tol && secs <= kLemma62Seconds;
  o.detail = "slope " + fmt("%.5f", fit.slope) + " vs " + fmt("%.5f", fit.theory_slope) +
             ", rel err " + fmt("%.2e", fit.rel_error) + " (tol " + fmt("%.2f", kLemma62Tol) +
             "), " + fmt("%.2f", secs) + " s";
  return o;
}

Outcome eigen_suite() {
  auto g1 = make_grid(1.0, -40.0, 60.0, 0.01);
  auto g2 = make_grid(1.0, -40.0, 60.0, 0.005);
  double floor = std::numeric_limits<double>::infinity();
  double order = std::numeric_limits<double>::infinity();
  double dphi = std::numeric_limits<double>::infinity();
  double cmin = std::numeric_limits<double>::infinity();
  double cmax = 0.0;
  for (double lambda : {0.1, 0.25, 0.5, 1.0}) {
    const EigenFn e1 = solve_eigenfunction(lambda, g1);
    const EigenFn e2 = solve_eigenfunction(lambda, g2);
    const AsymptoticsReport a = check_asymptotics(e1);
    floor = std::min(floor, a.ratio_min);
    order = std::min(order, std::log2(e1.ode_residual() / e2.ode_residual()));
    dphi = std::min(dphi, a.min_dphi_dr_scaled);
    cmin = std::min(cmin, a.derived_C);
    cmax = std::max(cmax, a.derived_C);
  }
  const double spread = cmax / cmin;
  Outcome o;
  o.pass = floor >= kEigenFloor && order >= kResidualOrder && dphi >= 0.0 && std::isfinite(cmax) &&
           spread <= kDerivedCSpread;
  o.detail = "min phi e^{-lambda r*} " + fmt("%.9f", floor) + ", min residual order " +
             fmt("%.3f", order) + ", min d_r phi (scaled) " + fmt("%.3e", dphi) +
             ", derived C in [" + fmt("%.3f", cmin) + ", " + fmt("%.3f", cmax) + "] spread " +
             fmt("%.3f", spread) + " (tol " + fmt("%.0f", kDerivedCSpread) + ")";
  return o;
}

// Linear run from (varphi, sign lambda varphi) to t = 20; max relative error
// against e^{sign lambda t} varphi where the end nodes cannot have reached.
double exact_mode_error(double h, double sign) {
  const double lambda = 0.5;
  const double T = 20.0;
  const double half = 60.0;
  ProblemSpec s;
  s.nonlinear = false;
  s.grid = make_grid(1.0, -half, half, h);
  const EigenFn e = solve_eigenfunction(lambda, s.grid);
  WaveState st;
  st.w = e.varphi_samples();
  st.wt = st.w;
  for (double& v : st.wt) v *= sign * lambda;
  Integrator integ(s);
  const double dt = 0.5 * h;
  const long n = std::lround(T / dt);
  for (long k = 0; k < n; ++k) integ.step(st, dt);
  double err = 0.0;
  for (std::size_t i = 0; i < st.w.size(); ++i) {
    const double x = s.grid->rstar(i);
    if (std::abs(x) > half - T - 5.0) continue;
    const double exact = std::exp(sign * lambda * T) * e.varphi(i);
    err = std::max(err, std::abs(st.w[i] - exact) / exact);
  }
  return err;
}

Outcome exact_solution() {
  const double e1 = exact_mode_error(0.02, -1.0);
  const double e2 = exact_mode_error(0.01, -1.0);
  const double g1 = exact_mode_error(0.02, 1.0);
  const double g2 = exact_mode_error(0.01, 1.0);
  Outcome o;
  o.pass = e1 <= kExactRelErr && e1 / e2 >= kExactRatio;
  o.detail = "decaying mode rel err " + fmt("%.3e", e1) + " at h=0.02 (tol " +
             fmt("%.0e", kExactRelErr) + "), ratio " + fmt("%.3f", e1 / e2) + " (tol " +
             fmt("%.1f", kExactRatio) + "); growing-mode control " + fmt("%.3e", g1) + ", ratio " +
             fmt("%.3f", g1 / g2);
  return o;
}

Outcome energy_conservation() {
  ProblemSpec s;
  s.nonlinear = false;
  s.T_max = 100.0;
  s.grid = grid_for_horizon(1.0, s.T_max, s.support_radius(), 0.05);
  WaveState st = make_initial_data(s);
  const double dt = s.cfl * 0.05;
  const double e0 = energy(st, s, dt);
  const double plain0 = energy(st, s);
  Integrator integ(s);
  double drift = 0.0;
  double plain = 0.0;
  const long n = std::lround(s.T_max / dt);
  for (long k = 1; k <= n; ++k) {
    integ.step(st, dt);
    if (k % 40 == 0) {
      drift = std::max(drift, std::abs(energy(st, s, dt) - e0) / e0);
      plain = std::max(plain, std::abs(energy(st, s) - plain0) / plain0);
    }
  }
  Outcome o;
  o.pass = drift <= kEnergyDrift;
  o.detail = "max relative drift " + fmt("%.3e", drift) + " (tol " + fmt("%.0e", kEnergyDrift) +
             ") over t in [0, 100]; uncorrected energy oscillation " + fmt("%.3e", plain);
  return o;
}

Outcome finite_speed() {
  Outcome o;
  o.pass = g_support.runs > 0 && g_support.worst <= 0.0;
  o.detail = "max support radius - (t + R + 2h) = " + fmt("%.3f", g_support.worst) +
             " over " + std::to_string(g_support.runs) + " runs, " +
             std::to_string(g_support.checks) + " monitored instants (1e-12 relative cut)";
  return o;
}

Outcome bq_decay() {
  const auto t0 = std::chrono::steady_clock::now();
  const double q = 2.0 - std::numbers::sqrt2;
  const double R = data_support_radius(1.0, 1.0, 2.0);
  const double r0 = 4.0 + std::numbers::e;
  const auto ts = geomspace(1e2, 1e4, 9);
  const auto rs = geomspace(r0, 1e4 + R, 6);
  const double dt = 1e-2;
  BqOptions opts;
  opts.lambda_floor = bq_lambda_floor(1e4 + R);
  const BqWeight bank = BqWeight::build(q, 1.0, 1e4 + R + 1.0, 0.25, opts);
  const BqBoundsReport rep = verify_bq_bounds(bank, ts, rs, R);
  const double slope_err = std::abs(rep.slope + q) / q;
  // Largest scaled b_{q+1} per t over r* in [4M + e, t + R], then its spread
  // across t.
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  double mismatch = 0.0;
  for (double t : ts) {
    double row = 0.0;
    for (double r : geomspace(r0, t + R, 12)) {
      row = std::max(row, bank.bq_plus1(t, r).value * (t + R) * std::pow(t + R + 1.0 - r, q));
      mismatch = std::max(mismatch, bq_time_derivative_mismatch(bank, t, r, dt));
    }
    lo = std::min(lo, row);
    hi = std::max(hi, row);
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = slope_err <= kBqSlopeTol && hi / lo <= kBoundedSpread && mismatch <= kBqDtTol &&
           secs <= kBqSeconds;
  o.detail = "slope " + fmt("%.4f", rep.slope) + " vs " + fmt("%.4f", -q) + " (rel err " +
             fmt("%.4f", slope_err) + ", tol " + fmt("%.2f", kBqSlopeTol) +
             "), scaled b_{q+1} max " + fmt("%.3f", hi) + " spread " + fmt("%.2f", hi / lo) +
             " (tol " + fmt("%.0f", kBoundedSpread) + "), |d_t b_q| vs b_{q+1} " +
             fmt("%.2e", mismatch) + " (tol " + fmt("%.0e", kBqDtTol) + "), " +
             fmt("%.1f", secs) + " s";
  return o;
}

Outcome functional_bounds() {
  ProblemSpec s;
  s.p = 2.0;
  s.eps = 0.75;
  s.T_max = 400.0;
  s.snapshot_dt = 0.5;
  s.snapshot_stride = 2;
  s.grid = grid_for_horizon(1.0, s.T_max, s.support_radius(), 0.1);
  const EvolveResult res = evolve_until(s);
  g_support.add(res.record);
  const double R = s.support_radius();
  const double T0 = admissible_T0(1.0, R, 1.0);
  double f0_lo = std::numeric_limits<double>::infinity();
  double f0_hi = 0.0;
  double f1_lo = std::numeric_limits<double>::infinity();
  double f1_hi = 0.0;
  for (double T : geomspace(T0, 1.5 * res.snapshots.times.back(), 12)) {
    const CutoffParams cp = make_cutoff_params(1.0, R, 1.0, T);
    const double r0 = F0_bound_ratio(functional_F0(res.snapshots, cp, s.p).value, T, s.p);
    const double r1 = F1_bound_ratio(functional_F1(res.snapshots, cp, s.p).value, T, s.p, s.M);
    f0_lo = std::min(f0_lo, r0);
    f0_hi = std::max(f0_hi, r0);
    f1_lo = std::min(f1_lo, r1);
    f1_hi = std::max(f1_hi, r1);
  }
  const bool f0_ok = f0_hi / f0_lo <= kBoundedSpread;
  const bool f1_ok = f1_hi / f1_lo <= kBoundedSpread;
  Outcome o;
  o.pass = res.record.status == RunStatus::survived_horizon && f0_ok && f1_ok;
  o.detail = std::string("F0 ") + (f0_ok ? "ok" : "FAIL") + ": ratio in [" + fmt("%.3g", f0_lo) +
             ", " + fmt("%.3g", f0_hi) + "] spread " + fmt("%.3g", f0_hi / f0_lo) + "; F1 " +
             (f1_ok ? "ok" : "FAIL") + ": ratio in [" + fmt("%.3g", f1_lo) + ", " +
             fmt("%.3g", f1_hi) + "] spread " + fmt("%.3g", f1_hi / f1_lo) + " (tol " +
             fmt("%.0f", kBoundedSpread) + ", T in [" + fmt("%.1f", T0) + ", " +
             fmt("%.0f", 1.5 * res.snapshots.times.back()) + "])";
  return o;
}

Outcome convolution_bound() {
  const auto ts = geomspace(1.0, 1e4, 41);
  double worst = 0.0;
  double closed = 0.0;
  bool finite = true;
  double beyond = -1.0;
  for (double alpha : {0.0, 1.0, 2.0}) {
    for (double beta : {0.5, 1.0}) {
      for (double L : {1.0, 10.0}) {
        const double c = lemma51_oracle(alpha, beta, L, ts);
        finite = finite && std::isfinite(c);
        worst = std::max(worst, c);
        const double far = lemma51_integral(alpha, beta, L, 1e7) / std::pow(1e7 + L, alpha);
        beyond = std::max(beyond, far / c - 1.0);
        if (alpha == 0.0) {
          for (double t : ts) {
            const double exact = (std::exp(beta * L) - std::exp(-beta * t)) / beta;
            closed = std::max(closed, std::abs(lemma51_integral(0.0, beta, L, t) - exact) / exact);
          }
        }
      }
    }
  }
  Outcome o;
  o.pass = finite && beyond <= kBeyondGridSlack && closed <= kClosedFormTol;
  o.detail = "max ratio " + fmt("%.6g", worst) + " over 41 t in [1, 1e4], excess at t = 1e7 " +
             fmt("%.1e", beyond) + " (tol " + fmt("%.0e", kBeyondGridSlack) +
             "), alpha=0 closed form " + fmt("%.2e", closed) + " (tol " +
             fmt("%.0e", kClosedFormTol) + ")";
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "hb-acceptance-determinism";
  fs::remove_all(root);
  struct Job {
    std::string command;
    std::string target;
    std::vector<std::string> overrides;
  };
  const std::string sweep_csv = (root / "a" / "sweep" / "sweep.csv").string();
  const std::vector<Job> jobs{
      {"grid", "", {}},
      {"eigen", "", {}},
      {"testfn", "", {}},
      {"evolve", "", {"eps=2", "h=0.2", "T_max=200", "snapshot_dt=10", "snapshot_stride=5"}},
      {"sweep", "", {"h=0.4", "T_max=200", "eps_list=16,11.3137085,8,5.65685425,4,2.82842712"}},
      {"fit", "", {"input=" + sweep_csv}},
      {"verify", "lemma51", {}},
      {"verify", "lemma62", {}},
      {"verify", "bq", {}},
      {"verify", "functionals", {}},
      {"verify", "asymptotics", {}},
  };
  std::ostringstream log;
  std::size_t files = 0;
  std::vector<std::string> differing;
  for (const Job& j : jobs) {
    const std::string name = j.target.empty() ? j.command : j.command + "-" + j.target;
    for (const char* side : {"a", "b"}) {
      run(parse_config(j.command, j.target, std::nullopt, j.overrides, root / side / name), log);
    }
    for (const auto& entry : fs::directory_iterator(root / "a" / name)) {
      const std::string file = entry.path().filename().string();
      if (file == "timing.txt") continue;
      ++files;
      if (slurp(entry.path()) != slurp(root / "b" / name / file)) {
        differing.push_back(name + "/" + file);
      }
    }
  }
  Outcome o;
  o.pass = differing.empty() && files > jobs.size();
  o.detail = std::to_string(jobs.size()) + " commands run twice, " + std::to_string(files) +
             " artifacts compared, " + std::to_string(differing.size()) + " differ";
  for (const auto& d : differing) o.detail += " " + d;
  fs::remove_all(root);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 subcritical lifespan scaling", lifespan_scaling},
      {"2 critical ODE exponent", critical_ode},
      {"3 eigenfunction suite", eigen_suite},
      {"4 exact-solution evolution", exact_solution},
      {"5 energy conservation", energy_conservation},
      {"7 b_q decay law", bq_decay},
      {"8 functional bounds", functional_bounds},
      {"6 finite speed of propagation", finite_speed},
      {"9 convolution bound oracle", convolution_bound},
      {"10 determinism", determinism},
  };
  std::vector<std::pair<std::string, Outcome>> results;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw: ") + e.what();
    }
    results.emplace_back(name, o);
    std::fflush(stdout);
  }
  // Criterion 6 aggregates runs made by 1 and 8; print in numeric order.
  std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) {
    return std::stoi(a.first) < std::stoi(b.first);
  });
  int failed = 0;
  for (const auto& [name, o] : results) {
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    if (!o.pass) ++failed;
  }
  std::printf("acceptance: %zu of %zu criteria pass\n", results.size() - failed, results.size());
  return failed == 0 ? 0 : 1;
}

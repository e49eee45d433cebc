#include "hb/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <ostream>

#include <json.hpp>

#include "hb/bq.hpp"
#include "hb/cutoffs.hpp"
#include "hb/eigen.hpp"
#include "hb/errors.hpp"
#include "hb/evolve.hpp"
#include "hb/functionals.hpp"
#include "hb/io.hpp"
#include "hb/scaling.hpp"

namespace hb {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::vector<double> geomspace(double lo, double hi, std::size_t n) {
  if (n < 2) return {lo};
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(n - 1);
    out[k] = std::exp(std::log(lo) + s * (std::log(hi) - std::log(lo)));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

// Open files relative to the run directory and remember their names.
class Artifacts {
 public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) {}
  std::ofstream open(const std::string& name) {
    files_.push_back(name);
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (dir_ / name).string());
    return out;
  }
  const std::vector<std::string>& files() const { return files_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

json record_json(const LifespanRecord& r) {
  json j;
  j["p"] = r.p;
  j["eps"] = r.eps;
  j["M"] = r.M;
  j["h"] = r.h;
  j["status"] = to_string(r.status);
  j["T_threshold"] = r.T_threshold;
  j["T_secondary"] = r.T_secondary;
  j["T_fit"] = r.T_fit;
  j["t_end"] = r.t_end;
  j["steps"] = r.steps;
  j["max_amplitude"] = r.max_amplitude;
  j["support_excess"] = r.support_excess;
  j["support_checks"] = r.support_checks;
  if (r.gate_change >= 0.0) j["gate_change"] = r.gate_change;
  return j;
}

json fit_json(const FitResult& f) {
  json j;
  j["slope"] = f.slope;
  j["intercept"] = f.intercept;
  j["r_squared"] = f.r_squared;
  j["theory_slope"] = f.theory_slope;
  j["rel_error"] = f.rel_error;
  j["points"] = f.points;
  return j;
}

ProblemSpec spec_from(const RunConfig& c) {
  ProblemSpec s;
  s.M = c.num("M");
  s.p = c.num("p");
  if (c.values.count("eps")) s.eps = c.num("eps");
  s.R1 = c.num("R1");
  s.R2 = c.num("R2");
  s.g_scale = c.num("g_scale");
  s.cfl = c.num("cfl");
  s.T_max = c.num("T_max");
  s.blowup_threshold = c.num("threshold");
  s.secondary_threshold = c.num("secondary_threshold");
  s.dt_min = c.num("dt_min");
  s.nonlinear = c.flag("nonlinear");
  if (c.values.count("snapshot_dt")) s.snapshot_dt = c.num("snapshot_dt");
  if (c.values.count("snapshot_stride")) s.snapshot_stride = c.count("snapshot_stride");
  const double half = c.values.count("domain_half_width") ? c.num("domain_half_width") : 0.0;
  const double h = c.num("h");
  s.grid = half > 0.0 ? make_grid(s.M, -half, half, h)
                      : grid_for_horizon(s.M, s.T_max, s.support_radius(), h);
  return s;
}

json run_grid(const RunConfig& c, Artifacts& art) {
  const RadialGrid g = build_grid(c.num("M"), c.num("rstar_min"), c.num("rstar_max"), c.num("h"));
  auto out = art.open("grid.csv");
  CsvWriter csv(out, {"rstar", "r", "F", "V"}, true);
  for (std::size_t i = 0; i < g.size(); ++i) csv.row({g.rstar(i), g.r()[i], g.F()[i], g.V()[i]});
  json j;
  j["nodes"] = g.size();
  j["rstar_min"] = g.rstar_min();
  j["rstar_max"] = g.rstar_max();
  j["h"] = g.h();
  return j;
}

json asymptotics_json(const AsymptoticsReport& a) {
  json j;
  j["ratio_min"] = a.ratio_min;
  j["ratio_max"] = a.ratio_max;
  j["derived_C"] = a.derived_C;
  j["derivative_ratio_min"] = a.derivative_ratio_min;
  j["min_dphi_dr_scaled"] = a.min_dphi_dr_scaled;
  j["ode_residual"] = a.ode_residual;
  return j;
}

json run_eigen(const RunConfig& c, Artifacts& art) {
  const double M = c.num("M");
  auto grid = make_grid(M, c.num("rstar_min"), c.num("rstar_max"), c.num("h"));
  EigenOptions opts;
  opts.free_potential = c.flag("free_potential");
  const EigenFn e = solve_eigenfunction(c.num("lambda"), grid, opts);
  const auto varphi = e.varphi_samples();
  const auto dvarphi = e.dvarphi_samples();
  const auto phi = phi_from_varphi(e);
  const auto dphi = dphi_dr(e);
  auto out = art.open("eigen.csv");
  CsvWriter csv(out, {"rstar", "r", "varphi", "dvarphi", "phi", "dphi_dr", "ratio"});
  for (std::size_t i = 0; i < grid->size(); ++i) {
    csv.row({grid->rstar(i), grid->r()[i], varphi[i], dvarphi[i], phi[i], dphi[i],
             e.scaled()[i]});
  }
  json j;
  j["lambda"] = e.lambda();
  j["normalization"] = e.normalization();
  j["asymptotics"] = asymptotics_json(check_asymptotics(e));
  return j;
}

json run_testfn(const RunConfig& c, Artifacts& art) {
  const double M = c.num("M");
  const double R = data_support_radius(M, c.num("R1"), c.num("R2"));
  const auto ts = c.list("t_list");
  const auto rs = c.list("rstar_list");
  double t_max = 0.0;
  double r_max = 0.0;
  for (double t : ts) t_max = std::max(t_max, t);
  for (double r : rs) r_max = std::max(r_max, r);
  BqOptions opts;
  opts.lambda_floor = bq_lambda_floor(t_max + R);
  const BqWeight bank = BqWeight::build(c.num("q"), M, r_max + 1.0, c.num("h"), opts);
  const double q = bank.q();
  auto out = art.open("testfn.csv");
  CsvWriter csv(out, {"t", "rstar", "bq", "bq_plus1", "bq_scaled", "bq1_scaled", "bq_error",
                      "bq1_error"});
  for (double t : ts) {
    for (double r : rs) {
      const auto b0 = bank.bq(t, r);
      const auto b1 = bank.bq_plus1(t, r);
      csv.row({t, r, b0.value, b1.value, b0.value * std::pow(t + R, q),
               b1.value * (t + R) * std::pow(t + R + 1.0 - r, q), b0.error, b1.error});
    }
  }
  json j;
  j["q"] = q;
  j["R"] = R;
  j["bank_size"] = bank.bank_size();
  return j;
}

json run_evolve(const RunConfig& c, Artifacts& art, int& exit_code) {
  ProblemSpec spec = spec_from(c);
  spec.snapshot_velocity = true;
  const EvolveResult res = evolve_until(spec);
  if (spec.snapshot_dt > 0.0) {
    auto out = art.open("snapshots.csv");
    CsvWriter csv(out, {"t", "rstar", "w", "wt"});
    const auto& s = res.snapshots;
    for (std::size_t k = 0; k < s.times.size(); ++k) {
      for (std::size_t j = 0; j < s.nodes(); ++j) {
        csv.row({s.times[k], s.rstar(j), s.w[k][j], s.wt[k][j]});
      }
    }
  }
  if (res.record.status == RunStatus::boundary_touched) exit_code = kExitRejected;
  json j;
  j["support_radius"] = spec.support_radius();
  j["grid"] = {{"rstar_min", spec.grid->rstar_min()},
               {"rstar_max", spec.grid->rstar_max()},
               {"nodes", spec.grid->size()}};
  j["record"] = record_json(res.record);
  return j;
}

json run_sweep(const RunConfig& c, Artifacts& art) {
  ProblemSpec base = spec_from(c);
  SweepOptions opts;
  opts.workers = c.count("workers");
  opts.gate = c.flag("gate");
  const auto records = sweep_lifespan(base, c.list("eps_list"), opts);
  auto out = art.open("sweep.csv");
  CsvWriter csv(out, {"p", "eps", "T_threshold", "T_secondary", "T_fit", "h", "status",
                      "gate_change", "support_excess"});
  for (const auto& r : records) {
    csv.row({csv.cell(r.p), csv.cell(r.eps), csv.cell(r.T_threshold), csv.cell(r.T_secondary),
             csv.cell(r.T_fit), csv.cell(r.h), to_string(r.status), csv.cell(r.gate_change),
             csv.cell(r.support_excess)});
  }
  json j;
  j["records"] = json::array();
  for (const auto& r : records) j["records"].push_back(record_json(r));
  return j;
}

json run_fit(const RunConfig& c, Artifacts& art) {
  const CsvTable table = read_csv(c.str("input"));
  const std::size_t cp = table.column("p");
  const std::size_t ce = table.column("eps");
  const std::size_t ct = table.column("T_fit");
  const std::size_t cs = table.column("status");
  std::vector<LifespanRecord> recs;
  for (const auto& row : table.rows) {
    LifespanRecord r;
    r.p = parse_double(row[cp], "p");
    r.eps = parse_double(row[ce], "eps");
    r.T_fit = parse_double(row[ct], "T_fit");
    r.status = row[cs] == "blewup" ? RunStatus::blewup : RunStatus::survived_horizon;
    recs.push_back(r);
  }
  const FitResult f = fit_power_law(recs);
  auto out = art.open("fit.json");
  json j = fit_json(f);
  out << json{{"schema_version", kManifestSchemaVersion}, {"fit", j}}.dump(2) << '\n';
  return j;
}

json run_lemma51(const RunConfig& c, Artifacts& art) {
  const auto ts = geomspace(c.num("t_min"), c.num("t_max"), c.count("t_count"));
  auto out = art.open("lemma51.csv");
  CsvWriter csv(out, {"alpha", "beta", "L", "max_ratio", "closed_form_error"});
  json j;
  j["cases"] = json::array();
  double worst = 0.0;
  double worst_closed = 0.0;
  for (double a : c.list("alpha_list")) {
    for (double b : c.list("beta_list")) {
      for (double L : c.list("L_list")) {
        const double ratio = lemma51_oracle(a, b, L, ts);
        double closed = 0.0;
        if (a == 0.0) {
          for (double t : ts) {
            const double exact = (std::exp(b * L) - std::exp(-b * t)) / b;
            closed = std::max(closed, std::abs(lemma51_integral(0.0, b, L, t) - exact) / exact);
          }
        }
        worst = std::max(worst, ratio);
        worst_closed = std::max(worst_closed, closed);
        csv.row({a, b, L, ratio, closed});
        j["cases"].push_back(
            {{"alpha", a}, {"beta", b}, {"L", L}, {"max_ratio", ratio}, {"closed_form_error", closed}});
      }
    }
  }
  j["max_ratio"] = worst;
  j["max_closed_form_error"] = worst_closed;
  return j;
}

json run_lemma62(const RunConfig& c, Artifacts& art) {
  Lemma62Options o;
  o.K1 = c.num("K1");
  o.K2 = c.num("K2");
  o.t0 = c.num("t0");
  o.step_fraction = c.num("step_fraction");
  const double p1 = c.num("p1");
  const double p2 = c.num("p2");
  const auto deltas = geomspace(c.num("delta_min"), c.num("delta_max"), c.count("delta_count"));
  auto out = art.open("lemma62.csv");
  CsvWriter csv(out, {"delta", "log_T"});
  for (double d : deltas) csv.row({d, lemma62_log_blowup_time(p1, p2, d, o)});
  json j = fit_json(lemma62_oracle(p1, p2, deltas, o));
  return j;
}

json run_verify_bq(const RunConfig& c, Artifacts& art) {
  const double M = c.num("M");
  const double R = data_support_radius(M, c.num("R1"), c.num("R2"));
  const double t_max = c.num("t_max");
  const auto ts = geomspace(c.num("t_min"), t_max, c.count("t_count"));
  const double r0 = 4.0 * M + std::numbers::e;
  const auto rs = geomspace(r0, t_max + R, c.count("rstar_count"));
  BqOptions opts;
  opts.lambda_floor = bq_lambda_floor(t_max + R);
  const BqWeight bank = BqWeight::build(c.num("q"), M, t_max + R + 1.0, c.num("h"), opts);
  const BqBoundsReport rep = verify_bq_bounds(bank, ts, rs, R);
  auto out = art.open("bq.csv");
  CsvWriter csv(out, {"t", "bq", "bq_plus1", "dt_mismatch"});
  double worst = 0.0;
  for (double t : ts) {
    const double mismatch = bq_time_derivative_mismatch(bank, t, r0, 1e-2);
    worst = std::max(worst, mismatch);
    csv.row({t, bank.bq(t, r0).value, bank.bq_plus1(t, r0).value, mismatch});
  }
  json j;
  j["q"] = bank.q();
  j["R"] = R;
  j["bank_size"] = bank.bank_size();
  j["bq_scaled_min"] = rep.bq_scaled_min;
  j["bq_scaled_max"] = rep.bq_scaled_max;
  j["bq1_scaled_max"] = rep.bq1_scaled_max;
  j["bq1_scaled_max_inner"] = rep.bq1_scaled_max_inner;
  j["bq1_scaled_max_outer"] = rep.bq1_scaled_max_outer;
  j["slope"] = rep.slope;
  j["theory_slope"] = -bank.q();
  j["slope_r_squared"] = rep.slope_r_squared;
  j["max_quadrature_error"] = rep.max_quadrature_error;
  j["max_dt_mismatch"] = worst;
  j["points"] = rep.points;
  return j;
}

json run_verify_functionals(const RunConfig& c, Artifacts& art) {
  ProblemSpec spec = spec_from(c);
  if (!(spec.snapshot_dt > 0.0)) throw ConfigError("snapshot_dt: must be positive here");
  const EvolveResult res = evolve_until(spec);
  const double R = spec.support_radius();
  const double T0 = admissible_T0(spec.M, R, c.num("R3"));
  const double T_hi = 1.5 * res.snapshots.times.back();
  if (!(T_hi > T0)) {
    throw PreconditionError("verify functionals: the run ends before 2 T0 / 3; raise T_max");
  }
  const auto Ts = geomspace(T0, T_hi, c.count("T_count"));
  auto out = art.open("functionals.csv");
  CsvWriter csv(out, {"name", "T", "value", "quadrature_error", "bound", "ratio"});
  const double pp = spec.p / (spec.p - 1.0);
  double f0_min = INFINITY, f0_max = 0.0, f1_min = INFINITY, f1_max = 0.0;
  for (double T : Ts) {
    const CutoffParams cp = make_cutoff_params(spec.M, R, c.num("R3"), T);
    const auto f0 = functional_F0(res.snapshots, cp, spec.p);
    const auto f1 = functional_F1(res.snapshots, cp, spec.p);
    const double b0 = std::pow(T, 4.0 - 2.0 * pp);
    const double b1 = std::pow(T, -2.0 * pp) * std::exp(T / (3.0 * spec.M * (spec.p - 1.0)));
    const double r0 = f0.value / b0;
    const double r1 = f1.value / b1;
    f0_min = std::min(f0_min, r0);
    f0_max = std::max(f0_max, r0);
    f1_min = std::min(f1_min, r1);
    f1_max = std::max(f1_max, r1);
    csv.row({std::string("F0"), csv.cell(T), csv.cell(f0.value), csv.cell(f0.quadrature_error),
             csv.cell(b0), csv.cell(r0)});
    csv.row({std::string("F1"), csv.cell(T), csv.cell(f1.value), csv.cell(f1.quadrature_error),
             csv.cell(b1), csv.cell(r1)});
  }
  // Y on the same run, L from 16R up to the last admissible value.
  const double L_lo = 16.0 * R;
  double ly_min = INFINITY;
  if (c.count("L_count") > 0 && T_hi > L_lo) {
    BqOptions bo;
    bo.lambda_floor = bq_lambda_floor(T_hi);
    const BqWeight bank =
        BqWeight::build(c.num("q"), spec.M, spec.grid->rstar_max(), c.num("h"), bo);
    const double eps_p = std::pow(spec.eps, spec.p);
    for (double L : geomspace(L_lo, T_hi, c.count("L_count"))) {
      const CutoffParams cp = make_cutoff_params(spec.M, R, c.num("R3"), std::max(L, T0));
      const auto y = functional_Y(res.snapshots, bank, cp, spec.p, L);
      const double ratio = y.derivative / eps_p;
      ly_min = std::min(ly_min, ratio);
      csv.row({std::string("Y"), csv.cell(L), csv.cell(y.value), csv.cell(y.quadrature_error),
               csv.cell(eps_p), csv.cell(ratio)});
    }
  }
  const ParamSet ps = make_param_set(spec.p, spec.M);
  auto eg = make_grid(spec.M, eigen_left_edge(spec.M, ps.lambda_choice), 20.0, c.num("h"));
  const C1Value c1 = constant_C1(spec, solve_eigenfunction(ps.lambda_choice, eg));
  json j;
  j["record"] = record_json(res.record);
  j["T0"] = T0;
  j["F0_ratio_min"] = f0_min;
  j["F0_ratio_max"] = f0_max;
  j["F0_spread"] = f0_max / f0_min;
  j["F1_ratio_min"] = f1_min;
  j["F1_ratio_max"] = f1_max;
  j["F1_spread"] = f1_max / f1_min;
  if (std::isfinite(ly_min)) j["LYprime_over_eps_p_min"] = ly_min;
  j["lambda"] = ps.lambda_choice;
  j["C1"] = {{"f_part", c1.f_part}, {"g_part", c1.g_part}, {"value", c1.value}};
  return j;
}

json run_verify_asymptotics(const RunConfig& c, Artifacts& art) {
  const double M = c.num("M");
  const double h = c.num("h");
  auto g1 = make_grid(M, c.num("rstar_min"), c.num("rstar_max"), h);
  auto g2 = make_grid(M, c.num("rstar_min"), c.num("rstar_max"), 0.5 * h);
  auto out = art.open("asymptotics.csv");
  CsvWriter csv(out, {"lambda", "ratio_min", "ratio_max", "derived_C", "min_dphi_dr_scaled",
                      "ode_residual", "residual_order"});
  double cmin = INFINITY, cmax = 0.0;
  json j;
  j["cases"] = json::array();
  for (double lambda : c.list("lambda_list")) {
    const EigenFn e1 = solve_eigenfunction(lambda, g1);
    const EigenFn e2 = solve_eigenfunction(lambda, g2);
    const AsymptoticsReport a = check_asymptotics(e1);
    const double order = std::log2(e1.ode_residual() / e2.ode_residual());
    cmin = std::min(cmin, a.derived_C);
    cmax = std::max(cmax, a.derived_C);
    csv.row({lambda, a.ratio_min, a.ratio_max, a.derived_C, a.min_dphi_dr_scaled, a.ode_residual,
             order});
    json row = asymptotics_json(a);
    row["lambda"] = lambda;
    row["residual_order"] = order;
    j["cases"].push_back(row);
  }
  j["derived_C_spread"] = cmax / cmin;
  return j;
}

}  // namespace

fs::path resolve_output_dir(const fs::path& requested) {
  if (const char* env = std::getenv("HB_OUTPUT_DIR"); env != nullptr && *env != '\0') {
    return fs::path(env);
  }
  return requested;
}

fs::path create_unique_dir(const fs::path& base) {
  if (!base.parent_path().empty()) fs::create_directories(base.parent_path());
  fs::path candidate = base;
  for (int k = 1;; ++k) {
    if (fs::create_directory(candidate)) return candidate;
    candidate = base;
    candidate += "-" + std::to_string(k);
  }
}

RunOutcome run(const RunConfig& config, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  RunOutcome outcome;
  outcome.dir = create_unique_dir(config.output_dir);
  Artifacts art(outcome.dir);
  json results;
  const std::string& cmd = config.command;
  try {
    if (cmd == "grid") {
      results = run_grid(config, art);
    } else if (cmd == "eigen") {
      results = run_eigen(config, art);
    } else if (cmd == "testfn") {
      results = run_testfn(config, art);
    } else if (cmd == "evolve") {
      results = run_evolve(config, art, outcome.exit_code);
    } else if (cmd == "sweep") {
      results = run_sweep(config, art);
    } else if (cmd == "fit") {
      results = run_fit(config, art);
    } else if (cmd == "verify") {
      const std::string& t = config.target;
      if (t == "lemma51") {
        results = run_lemma51(config, art);
      } else if (t == "lemma62") {
        results = run_lemma62(config, art);
      } else if (t == "bq") {
        results = run_verify_bq(config, art);
      } else if (t == "functionals") {
        results = run_verify_functionals(config, art);
      } else if (t == "asymptotics") {
        results = run_verify_asymptotics(config, art);
      } else {
        throw ConfigError("verify: unknown target '" + t + "'");
      }
    } else {
      throw ConfigError("unknown command '" + cmd + "'");
    }
  } catch (const RejectedRunError& e) {
    log << "rejected: " << e.what() << '\n';
    outcome.exit_code = kExitRejected;
    results = json{{"rejected", e.what()}};
  }

  json manifest;
  manifest["schema_version"] = kManifestSchemaVersion;
  manifest["command"] = cmd;
  if (!config.target.empty()) manifest["target"] = config.target;
  manifest["config"] = json::object();
  for (const auto& [k, v] : config.values) manifest["config"][k] = v;
  manifest["results"] = results;
  manifest["exit_code"] = outcome.exit_code;
  manifest["files"] = art.files();
  {
    std::ofstream out(outcome.dir / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << '\n';
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  {
    std::ofstream out(outcome.dir / "timing.txt", std::ios::binary);
    out << "wall_seconds " << format_double(wall) << '\n';
  }
  log << cmd << (config.target.empty() ? "" : " " + config.target) << ": wrote "
      << outcome.dir.string() << " (" << format_double(wall) << " s)\n";
  return outcome;
}

}  // namespace hb

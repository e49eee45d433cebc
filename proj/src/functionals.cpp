#include "hb/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "hb/errors.hpp"
#include "hb/quadrature.hpp"

namespace hb {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

void check_store(const SnapshotStore& store, double t_needed) {
  if (!store.grid || store.times.size() < 3) {
    throw PreconditionError("functional: snapshot store has fewer than 3 snapshots");
  }
  if (store.times.back() < t_needed * (1.0 - 1e-12)) {
    throw PreconditionError("functional: snapshots end at t = " +
                            std::to_string(store.times.back()) + ", need t >= " +
                            std::to_string(t_needed));
  }
}

void check_T(const CutoffParams& cp) {
  if (!(cp.T >= cp.T0)) {
    throw PreconditionError("functional: T = " + std::to_string(cp.T) + " below T0 = " +
                            std::to_string(cp.T0));
  }
}

// Space-time trapezoid of |u|^p r^2 F time_w(t) space_w(j), using every
// `skip`-th snapshot and stored node. Snapshots beyond t_end are ignored.
double integrate(const SnapshotStore& store, double p, std::size_t skip, double t_end,
                 const std::function<double(double)>& time_w,
                 const std::vector<double>& space_w) {
  const RadialGrid& g = *store.grid;
  const std::size_t nodes = store.nodes();
  const double dx = g.h() * static_cast<double>(store.stride * skip);
  std::vector<double> ts;
  std::vector<double> vals;
  for (std::size_t k = 0; k < store.times.size(); k += skip) {
    const double t = store.times[k];
    if (t > t_end) break;
    const double tw = time_w(t);
    double row = 0.0;
    if (tw != 0.0) {
      const auto& w = store.w[k];
      // Trapezoid over the stored nodes; the ends carry zero data.
      for (std::size_t j = 0; j < nodes; j += skip) {
        if (space_w[j] == 0.0 || w[j] == 0.0) continue;
        const std::size_t i = j * store.stride;
        const double r = g.r()[i];
        const double u = std::abs(w[j]) / r;
        row += std::pow(u, p) * r * r * g.F()[i] * space_w[j];
      }
      row *= dx * tw;
    }
    ts.push_back(t);
    vals.push_back(row);
  }
  if (ts.size() < 2) return 0.0;
  return kFourPi * trapezoid(ts, vals);
}

FunctionalSample time_space_functional(const char* name, const SnapshotStore& store,
                                       const CutoffParams& cp, double p, bool spatial_cut) {
  check_T(cp);
  const double t_end = 2.0 * cp.T / 3.0;
  check_store(store, t_end);
  const double two_pp = 2.0 * p / (p - 1.0);
  std::vector<double> space_w(store.nodes(), 1.0);
  if (spatial_cut) {
    for (std::size_t j = 0; j < space_w.size(); ++j) {
      space_w[j] = std::pow(alpha_T(store.rstar(j), cp.T), two_pp);
    }
  }
  auto time_w = [&](double t) { return std::pow(eta_T(t, cp.T), two_pp); };
  FunctionalSample s;
  s.name = name;
  s.T_or_L = cp.T;
  s.value = integrate(store, p, 1, t_end, time_w, space_w);
  const double coarse = integrate(store, p, 2, t_end, time_w, space_w);
  s.quadrature_error = std::abs(s.value - coarse);
  return s;
}

}  // namespace

FunctionalSample functional_F0(const SnapshotStore& store, const CutoffParams& cp, double p) {
  return time_space_functional("F0", store, cp, p, true);
}

FunctionalSample functional_F1(const SnapshotStore& store, const CutoffParams& cp, double p) {
  return time_space_functional("F1", store, cp, p, false);
}

double F0_bound_ratio(double F0, double T, double p) {
  const double pp = p / (p - 1.0);
  return F0 * std::pow(T, 2.0 * pp - 4.0);
}

double F1_bound_ratio(double F1, double T, double p, double M) {
  const double pp = p / (p - 1.0);
  return F1 * std::pow(T, 2.0 * pp) * std::exp(-T / (3.0 * M * (p - 1.0)));
}

C1Value constant_C1(const ProblemSpec& spec, const EigenFn& e) {
  const RadialGrid& g = e.grid();
  if (g.M() != spec.M) throw ConfigError("C1: eigenfunction grid built for a different M");
  const double lo = tortoise(spec.M, 2.0 * spec.M + spec.R1);
  const double hi = tortoise(spec.M, 2.0 * spec.M + spec.R2);
  if (lo < g.rstar_min() || hi > g.rstar_max()) {
    throw ConfigError("C1: data support lies outside the eigenfunction grid");
  }
  // (r^2 / F) dr = r^2 dr*; phi = psi e^{lambda r*} / r.
  std::vector<double> fv(g.size(), 0.0);
  std::vector<double> gv(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.r()[i];
    const double f = data_f(spec, r);
    if (f == 0.0) continue;
    const double phi_r2 = e.scaled()[i] * std::exp(e.lambda() * g.rstar(i)) * r;
    fv[i] = f * phi_r2;
    gv[i] = data_g(spec, r) * phi_r2;
  }
  C1Value c;
  c.f_part = kFourPi * trapezoid(fv, g.h());
  c.g_part = kFourPi * trapezoid(gv, g.h());
  c.value = e.lambda() * c.f_part + c.g_part;
  return c;
}

FunctionalSample functional_Y(const SnapshotStore& store, const BqWeight& bank,
                              const CutoffParams& cp, double p, double L) {
  check_T(cp);
  if (!(L >= 16.0 * cp.R && L <= cp.T)) {
    throw PreconditionError("functional Y: need 16 R <= L <= T, got L = " + std::to_string(L));
  }
  const double t_end = 2.0 * L / 3.0;
  check_store(store, t_end);
  const RadialGrid& g = *store.grid;
  const double two_pp = 2.0 * p / (p - 1.0);
  const double dx = g.h() * static_cast<double>(store.stride);

  // S_k = int |u|^p b_q alpha_L^{2p'} r^2 F dr* at snapshot k.
  std::vector<double> ts;
  std::vector<double> rows;
  double bq_error = 0.0;
  for (std::size_t k = 0; k < store.times.size(); ++k) {
    const double t = store.times[k];
    if (t > t_end) break;
    double row = 0.0;
    if (t >= 1.0 / 8.0) {
      const auto& w = store.w[k];
      for (std::size_t j = 0; j < store.nodes(); ++j) {
        if (w[j] == 0.0) continue;
        const double rs = store.rstar(j);
        // The exact solution vanishes beyond the light cone; discretization
        // precursors there would meet b_q ~ e^{lambda (r* - t)}.
        if (rs > t + cp.R) break;
        const double a = alpha_T(rs, L);
        if (a == 0.0) continue;
        const std::size_t i = j * store.stride;
        const double r = g.r()[i];
        const auto b = bank.bq(t, rs);
        bq_error = std::max(bq_error, b.error);
        row += std::pow(std::abs(w[j]) / r, p) * b.value * std::pow(a, two_pp) * r * r * g.F()[i];
      }
    }
    ts.push_back(t);
    rows.push_back(row * dx);
  }

  auto inner = [&](double sigma) {
    std::vector<double> v(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      v[k] = rows[k] == 0.0 ? 0.0 : rows[k] * std::pow(eta_star_T(ts[k], sigma), two_pp);
    }
    return ts.size() < 2 ? 0.0 : kFourPi * trapezoid(ts, v);
  };
  auto outer = [&](std::size_t n) {
    // Trapezoid in ln sigma on [0, ln L].
    std::vector<double> x(n);
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) {
      x[k] = std::log(L) * static_cast<double>(k) / static_cast<double>(n - 1);
      v[k] = inner(std::exp(x[k]));
    }
    return trapezoid(x, v);
  };

  FunctionalSample s;
  s.name = "Y";
  s.T_or_L = L;
  s.value = outer(48);
  s.quadrature_error = std::abs(s.value - outer(24)) + bq_error * s.value;
  s.derivative = inner(L);
  return s;
}

}  // namespace hb

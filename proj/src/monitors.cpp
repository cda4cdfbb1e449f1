#include "fhrt/monitors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

namespace fhrt {

namespace {

double central(double t0, double y0, double t1, double y1, double t2, double y2) {
  const double h1 = t1 - t0;
  const double h2 = t2 - t1;
  return ((y2 - y1) * h1 / h2 + (y1 - y0) * h2 / h1) / (h1 + h2);
}

/// Central differences at interior records and their self-refinement error
/// (spacing h against 2h); end points borrow the nearest estimate.
struct Differences {
  std::vector<std::size_t> index;
  std::vector<double> value;
  std::vector<double> error;
  bool ok = false;
};

template <typename Get>
Differences differentiate(const std::vector<DiagnosticsRecord>& recs, Get get) {
  Differences d;
  const std::size_t n = recs.size();
  if (n < 3) return d;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    d.index.push_back(i);
    d.value.push_back(central(recs[i - 1].t, get(recs[i - 1]), recs[i].t, get(recs[i]), recs[i + 1].t, get(recs[i + 1])));
    d.error.push_back(std::numeric_limits<double>::quiet_NaN());
  }
  bool any = false;
  for (std::size_t k = 0; k < d.index.size(); ++k) {
    const std::size_t i = d.index[k];
    if (i >= 2 && i + 2 < n) {
      const double wide = central(recs[i - 2].t, get(recs[i - 2]), recs[i].t, get(recs[i]), recs[i + 2].t, get(recs[i + 2]));
      d.error[k] = std::abs(d.value[k] - wide) / 3.0;
      any = true;
    }
  }
  if (!any) return d;
  for (std::size_t k = 0; k < d.error.size(); ++k) {
    if (!std::isnan(d.error[k])) continue;
    for (std::size_t s = 1; s < d.error.size(); ++s) {
      if (k >= s && !std::isnan(d.error[k - s])) {
        d.error[k] = d.error[k - s];
        break;
      }
      if (k + s < d.error.size() && !std::isnan(d.error[k + s])) {
        d.error[k] = d.error[k + s];
        break;
      }
    }
  }
  d.ok = true;
  return d;
}

struct VirialBudget {
  Differences dilation;
  std::vector<double> tol;
  bool ok = false;
};

VirialBudget virial_budget(const std::vector<DiagnosticsRecord>& recs, double alpha) {
  VirialBudget b;
  b.dilation = differentiate(recs, [](const DiagnosticsRecord& r) { return r.dilation; });
  if (!b.dilation.ok) return b;
  const double e0 = recs.front().energy.total;
  b.ok = true;
  for (std::size_t k = 0; k < b.dilation.index.size(); ++k) {
    const std::size_t i = b.dilation.index[k];
    double e_time = 0.0;
    for (std::size_t j = i - 1; j <= i + 1; ++j) e_time = std::max(e_time, 2.0 * alpha * std::abs(recs[j].energy.total - e0));
    const auto& r = recs[i];
    const double e_space = r.rate_refinement;
    const double scale = std::abs(r.rate.kinetic_part) + std::abs(r.rate.potential_part);
    const double e_tail = r.spectral_tail * scale;
    const double tol = 10.0 * (b.dilation.error[k] + e_time + e_space + e_tail);
    if (!std::isfinite(tol)) b.ok = false;
    b.tol.push_back(tol);
  }
  return b;
}

}  // namespace

VirialReport virial_report(const Trajectory& traj, double alpha, const PotentialSpec& pot) {
  VirialReport rep;
  const auto& recs = traj.records;
  rep.equality_applicable = !pot.enabled() || (pot.psi == PsiFamily::one && pot.gamma == alpha);
  rep.inequality_applicable = !pot.enabled() || (pot.gamma >= alpha && pot.coupling > 0.0);
  if (recs.empty()) {
    rep.inconclusive = true;
    return rep;
  }
  rep.bound = 2.0 * alpha * recs.front().energy.total;
  const VirialBudget b = virial_budget(recs, alpha);
  if (!b.ok) {
    rep.inconclusive = true;
    return rep;
  }
  rep.max_violation = -std::numeric_limits<double>::infinity();
  rep.min_margin = std::numeric_limits<double>::infinity();
  rep.max_derivative = -std::numeric_limits<double>::infinity();
  rep.decreasing = true;
  for (std::size_t k = 0; k < b.dilation.index.size(); ++k) {
    const auto& r = recs[b.dilation.index[k]];
    const double d = b.dilation.value[k];
    const double tol = b.tol[k];
    rep.times.push_back(r.t);
    rep.derivative.push_back(d);
    rep.tol_v.push_back(tol);
    rep.remainder.push_back(r.rate.continuum - 2.0 * alpha * r.energy.total);
    rep.max_violation = std::max(rep.max_violation, d - rep.bound - tol);
    rep.min_margin = std::min(rep.min_margin, rep.bound + tol - d);
    rep.equality_residual = std::max(rep.equality_residual, std::abs(d - rep.bound));
    rep.equality_ratio = std::max(rep.equality_ratio, tol > 0.0 ? std::abs(d - rep.bound) / tol
                                                                 : (d == rep.bound ? 0.0 : std::numeric_limits<double>::infinity()));
    rep.max_derivative = std::max(rep.max_derivative, d);
    if (!(d < tol)) rep.decreasing = false;
  }
  rep.equality_holds = rep.equality_applicable && rep.equality_ratio <= 1.0;
  rep.inequality_holds = rep.inequality_applicable && rep.max_violation <= 0.0;
  return rep;
}

MomentReport moment_report(const Trajectory& traj, double alpha) {
  MomentReport rep;
  rep.alpha_two_branch = alpha == 2.0;
  const auto& recs = traj.records;
  if (recs.empty()) {
    rep.inconclusive = true;
    return rep;
  }
  double scale = 1.0;
  for (const auto& r : recs) scale = std::max(scale, std::abs(r.virial_moment));
  rep.nonnegative = std::all_of(recs.begin(), recs.end(), [&](const DiagnosticsRecord& r) {
    return r.virial_moment >= -1e-10 * scale;
  });
  const Differences dm = differentiate(recs, [](const DiagnosticsRecord& r) { return r.virial_moment; });
  const VirialBudget b = virial_budget(recs, alpha);
  if (!dm.ok || !b.ok) {
    rep.inconclusive = true;
    return rep;
  }
  const double m0 = recs.front().mass;
  const double e0 = recs.front().energy.total;
  const double a0 = recs.front().dilation;
  const double M0 = recs.front().virial_moment;
  rep.c_fit = -std::numeric_limits<double>::infinity();
  double fd_error = 0.0;
  for (std::size_t k = 0; k < dm.index.size(); ++k) {
    const auto& r = recs[dm.index[k]];
    const double res = dm.value[k] - 2.0 * alpha * r.dilation;
    rep.times.push_back(r.t);
    rep.moment.push_back(r.virial_moment);
    rep.derivative.push_back(dm.value[k]);
    rep.residual.push_back(res);
    rep.c_fit = std::max(rep.c_fit, m0 > 0.0 ? res / (m0 * m0) : 0.0);
    rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(res));
    fd_error = std::max(fd_error, dm.error[k]);
  }
  rep.residual_tolerance = 10.0 * fd_error;
  const double c = std::max(rep.c_fit, 0.0);
  const double tol_v = *std::max_element(b.tol.begin(), b.tol.end());
  rep.max_envelope_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < rep.times.size(); ++k) {
    const double t = rep.times[k];
    const double env = 2.0 * alpha * alpha * t * t * e0 + 2.0 * alpha * t * (a0 + c * m0 * m0) + M0;
    const double tol = 2.0 * alpha * t * t * tol_v + t * rep.residual_tolerance + 1e-12 * scale;
    rep.envelope.push_back(env);
    rep.tol_m.push_back(tol);
    rep.max_envelope_violation = std::max(rep.max_envelope_violation, rep.moment[k] - env - tol);
  }
  rep.envelope_holds = rep.max_envelope_violation <= 0.0;
  return rep;
}

ScalingResult scaling_test(const Field& phi, double lambda, double T, const RunConfig& cfg, int checkpoints,
                           bool with_budget) {
  if (!(lambda >= 0.5 && lambda <= 2.0)) throw ConfigError("scaling test needs lambda in [1/2, 2]");
  if (cfg.pot.enabled() && cfg.pot.psi != PsiFamily::one) throw ConfigError("scaling test needs psi = one");
  if (checkpoints < 1) throw ConfigError("scaling test needs at least one checkpoint");
  const Field start = to_physical(phi);
  if (!(start.engine().spec() == cfg.grid)) throw ConfigError("scaling datum lives on a different grid");
  const int n = cfg.grid.n;
  // u_λ(t,x) = λ^{n/2 - (γ-α)/2} u(λ^α t, λx)
  const double shift = cfg.pot.enabled() ? 0.5 * (cfg.pot.gamma - cfg.alpha) : 0.0;
  const double amp = std::pow(lambda, 0.5 * n - shift);
  const double time_scale = std::pow(lambda, cfg.alpha);

  RunConfig base = cfg;
  base.guards = {std::numeric_limits<double>::max(), 1.0, 1.0};
  base.record_every = 1 << 30;
  RunConfig c1 = base;
  c1.T = time_scale * T / checkpoints;
  c1.dt0 = time_scale * cfg.dt0;
  c1.dt_min = time_scale * cfg.dt_min;
  RunConfig c2 = base;
  c2.grid.extent = cfg.grid.extent / lambda;
  c2.T = T / checkpoints;

  auto march = [&](const RunConfig& c, Field u) {
    std::vector<Field> out;
    for (int j = 0; j < checkpoints; ++j) {
      u = evolve(c, u).final_state;
      out.push_back(u);
    }
    return out;
  };
  auto relative = [](const Field& a, const Field& b) {
    const auto& w = b.engine().weights();
    const double den = weighted_norm2(w, b.data);
    const double num = weighted_norm2(w, (a.data - b.data).eval());
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  };

  const auto g2 = make_grid(c2.grid);
  const Field phi2 = make_field(g2, (amp * start.data).eval());
  const auto u1 = march(c1, start);
  const auto u2 = march(c2, phi2);
  ScalingResult res;
  for (int j = 0; j < checkpoints; ++j) {
    const Field mapped = make_field(g2, (amp * u1[static_cast<std::size_t>(j)].data).eval());
    res.per_checkpoint.push_back(relative(mapped, u2[static_cast<std::size_t>(j)]));
    res.mismatch = std::max(res.mismatch, res.per_checkpoint.back());
  }
  if (with_budget) {
    auto refinement = [&](const RunConfig& c, const Field& init, const std::vector<Field>& coarse) {
      RunConfig fine = c;
      fine.grid.points *= 2;
      const auto u = march(fine, resample(init, fine.grid));
      std::vector<double> out;
      for (int j = 0; j < checkpoints; ++j) {
        out.push_back(relative(resample(coarse[static_cast<std::size_t>(j)], fine.grid), u[static_cast<std::size_t>(j)]));
      }
      return out;
    };
    const auto b1 = refinement(c1, start, u1);
    const auto b2 = refinement(c2, phi2, u2);
    for (int j = 0; j < checkpoints; ++j) {
      res.budget = std::max(res.budget, b1[static_cast<std::size_t>(j)] + b2[static_cast<std::size_t>(j)]);
    }
  }
  return res;
}

int worker_count() {
  int n = 0;
  if (const char* env = std::getenv("FHRT_THREADS")) n = std::atoi(env);
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(n, 1);
}

SweepResult critical_amplitude_sweep(const RunConfig& cfg, double a_min, double a_max, int steps) {
  cfg.validate();
  if (cfg.datum.family != DatumFamily::gaussian) throw ConfigError("amplitude sweep needs the gaussian datum family");
  if (steps < 0) throw ConfigError("sweep steps must be >= 0");
  if (steps > 0 && !(a_min >= 0.0 && a_max >= a_min)) throw ConfigError("sweep needs 0 <= amin <= amax");
  DatumSpec unit = cfg.datum;
  unit.amplitude = 1.0;
  const Field g = make_datum(make_grid(cfg.grid), unit);
  const EnergyBreakdown e = energy(g, cfg.alpha, cfg.pot);
  if (!(e.potential < 0.0)) throw ConfigError("sweep needs a focusing potential: V(g) >= 0");
  SweepResult out;
  out.kinetic = e.kinetic;
  out.potential = e.potential;
  out.a_star = std::sqrt(e.kinetic / -e.potential);

  auto energy_at = [&](double a) { return energy(make_field(g.grid, (a * g.data).eval()), cfg.alpha, cfg.pot).total; };
  double lo = 0.5 * out.a_star;
  double hi = 2.0 * out.a_star;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * out.a_star; ++it) {
    const double mid = 0.5 * (lo + hi);
    (energy_at(mid) > 0.0 ? lo : hi) = mid;
  }
  out.a_star_bisect = 0.5 * (lo + hi);

  out.rows.resize(static_cast<std::size_t>(steps));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < steps; i = next++) {
      RunConfig c = cfg;
      c.datum.amplitude = steps == 1 ? a_min : a_min + (a_max - a_min) * i / (steps - 1);
      const Trajectory tr = evolve(c);
      SweepRow& row = out.rows[static_cast<std::size_t>(i)];
      row.amplitude = c.datum.amplitude;
      row.energy = tr.records.front().energy.total;
      row.termination = tr.termination;
      row.final_time = tr.final_time;
      const double h0 = tr.records.front().hs_norm;
      row.hs_growth = h0 > 0.0 ? tr.records.back().hs_norm / h0 : 0.0;
      row.records = tr.records;
    }
  };
  const int threads = std::min(worker_count(), std::max(steps, 1));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

std::vector<std::pair<std::string, bool>> hypothesis_check(const RunConfig& cfg) {
  const int n = cfg.grid.n;
  const double a = cfg.alpha;
  std::vector<std::pair<std::string, bool>> out;
  out.emplace_back("n >= 4", n >= 4);
  out.emplace_back("alpha in [1,2) or (2, 1+n/2)", (a >= 1.0 && a < 2.0) || (a > 2.0 && a < 1.0 + 0.5 * n));
  out.emplace_back("mass-critical gamma = alpha", cfg.pot.gamma == a);
  out.emplace_back("focusing (coupling > 0)", cfg.pot.coupling > 0.0);
  out.emplace_back("psi in {1, e^{-mu r}} (nonincreasing)", cfg.pot.psi == PsiFamily::one || cfg.pot.mu >= 0.0);
  out.emplace_back("datum radial", cfg.grid.engine == Engine::radial ||
                                       (cfg.datum.family == DatumFamily::gaussian &&
                                        std::all_of(cfg.datum.center.begin(), cfg.datum.center.end(),
                                                    [](double c) { return c == 0.0; })));
  out.emplace_back("weighted moments |x|^l d^j phi finite", cfg.datum.family == DatumFamily::gaussian);
  return out;
}

}  // namespace fhrt

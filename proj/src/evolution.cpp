#include "fhrt/evolution.hpp"

#include "fhrt/io.hpp"
#include "fhrt/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace fhrt {

namespace {

RealVector symbol_power(const GridEngine& g, double alpha) {
  const RealVector& k = g.wavenumber_magnitude();
  RealVector out(k.size());
  for (Eigen::Index i = 0; i < k.size(); ++i) out[i] = k[i] == 0.0 ? 0.0 : std::pow(k[i], alpha);
  return out;
}

ComplexVector phases(const RealVector& rate, double t) {
  ComplexVector out(rate.size());
  for (Eigen::Index i = 0; i < rate.size(); ++i) out[i] = std::polar(1.0, -t * rate[i]);
  return out;
}

class Stepper {
 public:
  Stepper(std::shared_ptr<const GridEngine> grid, double alpha, const PotentialSpec& pot)
      : grid_(std::move(grid)), ka_(symbol_power(*grid_, alpha)) {
    if (pot.enabled()) op_ = hartree_operator(grid_, pot);
  }

  [[nodiscard]] ComplexVector step(const ComplexVector& u, double dt) const {
    if (dt == 0.0) return u;
    const ComplexVector half = phases(ka_, 0.5 * dt);
    ComplexVector s = grid_->forward(u);
    s.array() *= half.array();
    ComplexVector v = grid_->inverse(s);
    if (op_) {
      const RealVector pot = op_->apply(v.cwiseAbs2());
      for (Eigen::Index i = 0; i < v.size(); ++i) v[i] *= std::polar(1.0, dt * pot[i]);
    }
    s = grid_->forward(v);
    s.array() *= half.array();
    return grid_->inverse(s);
  }

  [[nodiscard]] const GridEngine& engine() const { return *grid_; }

 private:
  std::shared_ptr<const GridEngine> grid_;
  RealVector ka_;
  std::shared_ptr<const HartreeOperator> op_;
};

double relative_l2(const GridEngine& g, const ComplexVector& a, const ComplexVector& b) {
  const double denom = weighted_norm2(g.weights(), b);
  const double num = weighted_norm2(g.weights(), (a - b).eval());
  if (denom == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num / denom);
}

}  // namespace

const char* to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::blowup_guard: return "blowup_guard";
    case Termination::resolution_guard: return "resolution_guard";
    case Termination::boundary_guard: return "boundary_guard";
    case Termination::dt_floor: return "dt_floor";
  }
  return "unknown";
}

Field make_datum(std::shared_ptr<const GridEngine> grid, const DatumSpec& datum) {
  const GridSpec& spec = grid->spec();
  const int n = spec.n;
  if (datum.family == DatumFamily::file) {
    const Checkpoint c = read_checkpoint(datum.path);
    if (c.grid.engine != spec.engine || c.grid.n != n || c.grid.points != spec.points || c.grid.extent != spec.extent) {
      throw ConfigError("checkpoint grid does not match the configured grid: " + datum.path);
    }
    return make_field(grid, c.data);
  }
  if (!(datum.amplitude >= 0.0)) throw ConfigError("datum amplitude must be >= 0");
  std::vector<double> c = datum.center;
  if (c.empty()) c.assign(static_cast<std::size_t>(spec.engine == Engine::torus ? n : 1), 0.0);
  ComplexVector u(grid->size());
  if (datum.family == DatumFamily::mode) {
    const auto* t = dynamic_cast<const TorusEngine*>(grid.get());
    if (t == nullptr) throw ConfigError("mode datum needs the torus engine");
    if (static_cast<int>(datum.mode.size()) != n) throw ConfigError("datum.mode needs one integer per axis");
    u.setZero();
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      double phase = 0.0;
      for (int a = 0; a < n; ++a) {
        phase += 2.0 * std::numbers::pi / spec.extent * datum.mode[static_cast<std::size_t>(a)] * t->coordinate(a)[i];
      }
      u[i] = datum.amplitude * std::polar(1.0, phase);
    }
    return make_field(grid, u);
  }
  if (!(datum.width > 0.0)) throw ConfigError("datum width must be positive");
  RealVector r2(grid->size());
  if (spec.engine == Engine::radial) {
    if (c.size() != 1 || c[0] != 0.0) throw ConfigError("radial datum must be centred at the origin");
    r2 = grid->radius().array().square().matrix();
  } else {
    if (static_cast<int>(c.size()) != n) throw ConfigError("datum.center needs one value per axis");
    r2.setZero();
    for (int a = 0; a < n; ++a) r2.array() += (grid->coordinate(a).array() - c[static_cast<std::size_t>(a)]).square();
  }
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    u[i] = datum.amplitude * std::exp(-0.5 * r2[i] / (datum.width * datum.width)) *
           std::polar(1.0, datum.chirp * r2[i]);
  }
  return make_field(grid, u);
}

void RunConfig::validate() const {
  grid.validate();
  pot.validate(grid.n);
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be positive");
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("T must be positive");
  if (!(dt_min > 0.0) || !(dt_min <= dt0)) throw ConfigError("need 0 < dt_min <= dt0");
  if (!(tol_step > 0.0)) throw ConfigError("tol_step must be positive");
  if (!(guards.hs > 0.0) || !(guards.tail > 0.0) || !(guards.boundary > 0.0)) {
    throw ConfigError("guard thresholds must be positive");
  }
  if (record_every < 1) throw ConfigError("record_every must be >= 1");
  if (pot.mass_critical && pot.gamma != alpha) throw ConfigError("mass-critical mode requires gamma = alpha");
}

std::vector<std::string> hypothesis_warnings(const RunConfig& cfg) {
  std::vector<std::string> out;
  const int n = cfg.grid.n;
  const double a = cfg.alpha;
  if (n < 4) out.push_back("n < 4: outside the dimension range of the blowup theorems");
  if (!((a >= 1.0 && a < 2.0) || (a > 2.0 && a < 1.0 + 0.5 * n))) {
    out.push_back("alpha outside [1,2) U (2, 1+n/2)");
  }
  if (cfg.pot.gamma != a) out.push_back("gamma != alpha: not mass-critical");
  if (cfg.pot.coupling <= 0.0) out.push_back("coupling <= 0: not focusing");
  return out;
}

Field step_strang(const Field& u, double dt, double alpha, const PotentialSpec& pot) {
  const Field p = to_physical(u);
  const Stepper stepper(p.grid, alpha, pot);
  Field out{p.grid, Representation::physical, stepper.step(p.data, dt)};
  return u.rep == Representation::physical ? out : to_spectral(out);
}

Trajectory evolve(const RunConfig& cfg) {
  cfg.validate();
  const auto grid = make_grid(cfg.grid);
  return evolve(cfg, make_datum(grid, cfg.datum));
}

Trajectory evolve(const RunConfig& cfg, const Field& initial) {
  cfg.validate();
  const Field start = to_physical(initial);
  if (!(start.engine().spec() == cfg.grid)) throw ConfigError("initial state lives on a different grid");
  const Stepper stepper(start.grid, cfg.alpha, cfg.pot);
  const GridEngine& g = stepper.engine();

  Trajectory tr;
  tr.warnings = hypothesis_warnings(cfg);
  ComplexVector u = start.data;
  double t = 0.0;
  double dt = std::min(cfg.dt0, cfg.T);
  const double dt_max = 10.0 * cfg.dt0;
  const double hs_exponent = 0.5 * cfg.pot.gamma;

  auto record = [&](double step) {
    tr.records.push_back(diagnose(make_field(start.grid, u), t, step, cfg.alpha, cfg.pot, true));
  };
  auto guard = [&]() -> bool {
    const Field f = make_field(start.grid, u);
    if (spectral_tail(f) > cfg.guards.tail) {
      tr.termination = Termination::resolution_guard;
    } else if (sobolev_norm(f, hs_exponent) > cfg.guards.hs) {
      tr.termination = Termination::blowup_guard;
    } else if (boundary_fraction(f) > cfg.guards.boundary) {
      tr.termination = Termination::boundary_guard;
    } else {
      return false;
    }
    return true;
  };

  record(0.0);
  bool stopped = guard();
  double last_step = 0.0;
  while (!stopped && t < cfg.T) {
    const double h = std::min(dt, cfg.T - t);
    const ComplexVector full = stepper.step(u, h);
    const ComplexVector half = stepper.step(stepper.step(u, 0.5 * h), 0.5 * h);
    const double err = relative_l2(g, full, half);
    const double factor = err == 0.0 ? 2.0 : std::clamp(0.9 * std::cbrt(cfg.tol_step / err), 0.2, 2.0);
    if (!(err <= cfg.tol_step)) {
      ++tr.rejected_steps;
      dt = h * std::min(factor, 0.9);
      if (dt < cfg.dt_min) {
        tr.termination = Termination::dt_floor;
        stopped = true;
      }
      continue;
    }
    u = half;
    t = (cfg.T - t - h <= 1e-14 * cfg.T) ? cfg.T : t + h;
    last_step = h;
    ++tr.accepted_steps;
    if (h == dt) dt = std::clamp(h * factor, cfg.dt_min, dt_max);
    stopped = guard();
    if (stopped || tr.accepted_steps % cfg.record_every == 0) record(h);
  }
  if (tr.records.back().t != t) record(last_step);
  tr.final_time = t;
  tr.final_state = make_field(start.grid, u);
  return tr;
}

Trajectory evolve_fixed(const Field& initial, double alpha, const PotentialSpec& pot, double T, int steps,
                        int record_every) {
  if (steps < 1) throw ConfigError("need at least one step");
  if (record_every < 1) throw ConfigError("record_every must be >= 1");
  const Field start = to_physical(initial);
  const Stepper stepper(start.grid, alpha, pot);
  const double dt = T / steps;
  Trajectory tr;
  ComplexVector u = start.data;
  tr.records.push_back(diagnose(start, 0.0, 0.0, alpha, pot));
  for (int s = 1; s <= steps; ++s) {
    u = stepper.step(u, dt);
    ++tr.accepted_steps;
    if (s % record_every == 0 || s == steps) {
      tr.records.push_back(diagnose(make_field(start.grid, u), s == steps ? T : s * dt, dt, alpha, pot));
    }
  }
  tr.final_time = T;
  tr.final_state = make_field(start.grid, u);
  return tr;
}

std::pair<Field, PicardReport> picard_solve(const Field& phi, double T, int iters, double alpha,
                                            const PotentialSpec& pot, int nodes) {
  if (!(T > 0.0)) throw ConfigError("Picard horizon must be positive");
  if (iters < 2) throw ConfigError("Picard needs at least 2 iterations");
  if (nodes < 2) throw ConfigError("Picard needs at least 2 time nodes");
  const Field start = to_physical(phi);
  const GridEngine& g = start.engine();
  const RealVector ka = symbol_power(g, alpha);
  const GaussLegendreRule mesh = gauss_legendre(nodes, 0.0, T);
  const auto q = static_cast<std::size_t>(nodes);

  // S(i, j) = ∫_0^{t_i} ℓ_j(s) ds for the Lagrange basis on the mesh
  Eigen::MatrixXd S(nodes, nodes);
  for (int i = 0; i < nodes; ++i) {
    const GaussLegendreRule sub = gauss_legendre(nodes, 0.0, mesh.nodes[i]);
    for (int j = 0; j < nodes; ++j) {
      double acc = 0.0;
      for (int p = 0; p < nodes; ++p) {
        double l = 1.0;
        for (int m = 0; m < nodes; ++m) {
          if (m != j) l *= (sub.nodes[p] - mesh.nodes[m]) / (mesh.nodes[j] - mesh.nodes[m]);
        }
        acc += sub.weights[p] * l;
      }
      S(i, j) = acc;
    }
  }

  std::shared_ptr<const HartreeOperator> op;
  if (pot.enabled()) op = hartree_operator(start.grid, pot);
  const ComplexVector phi_hat = g.forward(start.data);
  auto propagate = [&](const ComplexVector& spectral, double t) {
    return g.inverse((spectral.array() * phases(ka, t).array()).matrix());
  };

  std::vector<ComplexVector> current(q + 1);
  for (std::size_t i = 0; i < q; ++i) current[i] = propagate(phi_hat, mesh.nodes[static_cast<Eigen::Index>(i)]);
  current[q] = propagate(phi_hat, T);

  PicardReport report;
  report.T = T;
  const double floor = 1e-13 * std::sqrt(weighted_norm2(g.weights(), start.data));
  int streak = 0;
  for (int it = 0; it < iters; ++it) {
    // G_j = U(-t_j) F(u(t_j)), F(u) = -V_γ(|u|²) u
    std::vector<ComplexVector> G(q);
    for (std::size_t j = 0; j < q; ++j) {
      ComplexVector F = ComplexVector::Zero(g.size());
      if (op) F = -(op->apply(current[j].cwiseAbs2()).array() * current[j].array()).matrix();
      G[j] = (g.forward(F).array() * phases(ka, -mesh.nodes[static_cast<Eigen::Index>(j)]).array()).matrix();
    }
    std::vector<ComplexVector> next(q + 1);
    for (std::size_t i = 0; i <= q; ++i) {
      ComplexVector duhamel = ComplexVector::Zero(g.size());
      for (std::size_t j = 0; j < q; ++j) {
        const double c = i < q ? S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))
                               : mesh.weights[static_cast<Eigen::Index>(j)];
        duhamel += c * G[j];
      }
      const double ti = i < q ? mesh.nodes[static_cast<Eigen::Index>(i)] : T;
      next[i] = propagate((phi_hat - Complex(0.0, 1.0) * duhamel).eval(), ti);
    }
    double d = 0.0;
    for (std::size_t i = 0; i <= q; ++i) {
      d = std::max(d, std::sqrt(weighted_norm2(g.weights(), (next[i] - current[i]).eval())));
    }
    // below the roundoff floor the ratio of distances is noise
    if (!report.distances.empty() && report.distances.back() > floor) {
      const double ratio = d / report.distances.back();
      report.ratios.push_back(ratio);
      report.ratio = std::max(report.ratio, ratio);
      streak = ratio >= 1.0 ? streak + 1 : 0;
      if (streak >= 3) report.diverged = true;
    }
    report.distances.push_back(d);
    current = std::move(next);
    ++report.iterates;
  }
  return {make_field(start.grid, current[q]), report};
}

PicardVerification picard_verify(const Field& phi, double T, int iters, double alpha, const PotentialSpec& pot,
                                 int split_steps) {
  if (split_steps < 1) throw ConfigError("split-step comparison needs at least one step");
  PicardVerification v;
  const auto [u, full] = picard_solve(phi, T, iters, alpha, pot, 16);
  const auto [u_fine, fine_report] = picard_solve(phi, T, iters, alpha, pot, 24);
  v.full = full;
  v.half = picard_solve(phi, 0.5 * T, iters, alpha, pot, 16).second;
  const Field s1 = evolve_fixed(phi, alpha, pot, T, split_steps, split_steps).final_state;
  const Field s2 = evolve_fixed(phi, alpha, pot, T, 2 * split_steps, 2 * split_steps).final_state;
  const auto& w = s2.engine().weights();
  const double scale = std::sqrt(weighted_norm2(w, s2.data));
  auto dist = [&](const Field& a, const Field& b) {
    return std::sqrt(weighted_norm2(w, (a.data - b.data).eval())) / (scale > 0.0 ? scale : 1.0);
  };
  v.mismatch = dist(u, s2);
  v.e_mesh = dist(u, u_fine);
  v.e_split = dist(s1, s2);
  const double r = full.ratio;
  const double d = full.distances.empty() ? 0.0 : full.distances.back() / (scale > 0.0 ? scale : 1.0);
  v.e_iter = r < 1.0 ? d * r / (1.0 - r) : std::numeric_limits<double>::infinity();
  v.budget = v.e_iter + v.e_mesh + v.e_split;
  v.contracting = !full.ratios.empty() &&
                  std::all_of(full.ratios.begin(), full.ratios.end(), [](double x) { return x < 1.0; });
  v.ratios_decrease = v.half.ratio < full.ratio;
  v.agrees = v.mismatch <= v.budget;
  return v;
}

BlowupFit fit_blowup_time(const std::vector<DiagnosticsRecord>& records) {
  BlowupFit best;
  if (records.size() < 4) return best;
  const double top = records.back().hs_norm;
  std::vector<const DiagnosticsRecord*> tail;
  for (const auto& r : records) {
    if (r.hs_norm >= 0.1 * top) tail.push_back(&r);
  }
  if (tail.size() < 4 || top < 3.0 * records.front().hs_norm) return best;
  double best_score = std::numeric_limits<double>::infinity();
  for (double sigma = 0.05; sigma <= 5.0; sigma *= 1.02) {
    const auto m = static_cast<double>(tail.size());
    double st = 0.0;
    double sy = 0.0;
    double stt = 0.0;
    double sty = 0.0;
    double syy = 0.0;
    for (const auto* r : tail) {
      const double y = std::pow(r->hs_norm, -1.0 / sigma);
      st += r->t;
      sy += y;
      stt += r->t * r->t;
      sty += r->t * y;
      syy += y * y;
    }
    const double vt = stt - st * st / m;
    const double vy = syy - sy * sy / m;
    const double cty = sty - st * sy / m;
    if (vt <= 0.0 || vy <= 0.0) continue;
    const double slope = cty / vt;
    const double score = 1.0 - cty * cty / (vt * vy);
    if (slope < 0.0 && score < best_score) {
      best_score = score;
      const double intercept = (sy - slope * st) / m;
      best.valid = true;
      best.sigma = sigma;
      best.t_star = -intercept / slope;
      best.residual = score;
      best.points = static_cast<int>(tail.size());
    }
  }
  return best;
}

}  // namespace fhrt

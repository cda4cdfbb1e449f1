#include "fhrt/monitors.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>

using namespace fhrt;

namespace {

RunConfig small_torus(double alpha = 1.5) {
  RunConfig cfg;
  cfg.grid = {Engine::torus, 2, 64, 24.0, false};
  cfg.alpha = alpha;
  cfg.pot = {alpha};
  cfg.T = 0.4;
  cfg.dt0 = 1e-2;
  cfg.tol_step = 1e-10;
  cfg.record_every = 5;
  cfg.guards.tail = 1e-3;
  cfg.guards.boundary = 1e-3;
  return cfg;
}

RunConfig small_radial(double alpha = 1.5) {
  RunConfig cfg = small_torus(alpha);
  cfg.grid = {Engine::radial, 4, 256, 16.0, false};
  return cfg;
}

double a_star(const RunConfig& cfg) { return critical_amplitude_sweep(cfg, 0, 0, 0).a_star; }

}  // namespace

TEST_CASE("critical amplitude: closed form matches bisection") {
  for (const RunConfig& base : {small_torus(), small_radial()}) {
    const SweepResult s = critical_amplitude_sweep(base, 0, 0, 0);
    CHECK(s.potential < 0.0);
    CHECK(std::abs(s.a_star_bisect / s.a_star - 1.0) < 1e-6);
    RunConfig c = base;
    c.datum.amplitude = s.a_star;
    CHECK(std::abs(energy(make_datum(make_grid(c.grid), c.datum), c.alpha, c.pot).total) < 1e-10 * s.kinetic * s.a_star * s.a_star);
  }
  RunConfig repulsive = small_torus();
  repulsive.pot.coupling = -1.0;
  CHECK_THROWS_AS(critical_amplitude_sweep(repulsive, 0, 0, 0), ConfigError);
}

TEST_CASE("sweep rows are ordered and independent of the worker count") {
  RunConfig cfg = small_torus();
  cfg.grid.points = 32;
  cfg.T = 0.05;
  const double a = a_star(cfg);
  setenv("FHRT_THREADS", "1", 1);
  const SweepResult one = critical_amplitude_sweep(cfg, 0.5 * a, 1.5 * a, 3);
  setenv("FHRT_THREADS", "3", 1);
  const SweepResult three = critical_amplitude_sweep(cfg, 0.5 * a, 1.5 * a, 3);
  unsetenv("FHRT_THREADS");
  REQUIRE(one.rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(one.rows[i].amplitude == three.rows[i].amplitude);
    CHECK(one.rows[i].energy == three.rows[i].energy);
    CHECK(one.rows[i].hs_growth == three.rows[i].hs_growth);
  }
  CHECK(one.rows[1].amplitude == doctest::Approx(a).epsilon(1e-14));
  CHECK(one.rows[0].energy > 0.0);
  CHECK(std::abs(one.rows[1].energy) < 1e-10 * one.rows[0].energy);
  CHECK(one.rows[2].energy < 0.0);
}

TEST_CASE("virial equality in the mass-critical case") {
  for (RunConfig cfg : {small_torus(), small_radial()}) {
    cfg.datum.amplitude = 0.5 * a_star(cfg);
    const Trajectory tr = evolve(cfg);
    REQUIRE(tr.termination == Termination::completed);
    const VirialReport v = virial_report(tr, cfg.alpha, cfg.pot);
    CHECK(v.equality_applicable);
    CHECK_FALSE(v.inconclusive);
    CHECK(v.equality_holds);
    CHECK(v.equality_ratio <= 1.0);
    CHECK(v.inequality_holds);
    for (double r : v.remainder) CHECK(std::abs(r) < 1e-6 * std::abs(v.bound) + 1e-8);
  }
}

TEST_CASE("free flow: dilation grows at rate 2αK") {
  RunConfig cfg = small_torus();
  cfg.pot.coupling = 0.0;
  cfg.datum.chirp = 0.1;
  cfg.dt0 = 5e-3;
  cfg.record_every = 1;
  const Trajectory tr = evolve(cfg);
  REQUIRE(tr.termination == Termination::completed);
  const VirialReport v = virial_report(tr, cfg.alpha, cfg.pot);
  CHECK(v.equality_applicable);
  CHECK(v.equality_holds);
  CHECK(v.bound == doctest::Approx(2.0 * cfg.alpha * tr.records.front().energy.kinetic).epsilon(1e-14));
}

TEST_CASE("one-sided virial bound for gamma > alpha and exponential psi") {
  RunConfig cfg = small_radial();
  cfg.datum.amplitude = 0.8;
  SUBCASE("gamma > alpha") { cfg.pot.gamma = 1.8; }
  SUBCASE("psi = exp(-r)") {
    cfg.pot.psi = PsiFamily::exponential;
    cfg.pot.mu = 1.0;
  }
  const Trajectory tr = evolve(cfg);
  REQUIRE(tr.termination == Termination::completed);
  const VirialReport v = virial_report(tr, cfg.alpha, cfg.pot);
  CHECK_FALSE(v.equality_applicable);
  CHECK(v.inequality_applicable);
  CHECK(v.inequality_holds);
  CHECK(v.min_margin >= 0.0);
  for (double r : v.remainder) CHECK(r < 0.0);
}

TEST_CASE("virial report without enough records is inconclusive") {
  RunConfig cfg = small_torus();
  cfg.T = 0.02;
  cfg.record_every = 1000;
  const Trajectory tr = evolve(cfg);
  CHECK(virial_report(tr, cfg.alpha, cfg.pot).inconclusive);
  CHECK(moment_report(tr, cfg.alpha).inconclusive);
}

TEST_CASE("moment monitor: nonnegative, envelope holds") {
  for (RunConfig cfg : {small_torus(), small_radial()}) {
    cfg.datum.amplitude = 0.7 * a_star(cfg);
    const Trajectory tr = evolve(cfg);
    REQUIRE(tr.termination == Termination::completed);
    const MomentReport m = moment_report(tr, cfg.alpha);
    CHECK_FALSE(m.inconclusive);
    CHECK(m.nonnegative);
    CHECK(m.envelope_holds);
    CHECK(std::isfinite(m.c_fit));
    CHECK_FALSE(m.alpha_two_branch);
    CHECK(m.residual.size() == m.times.size());
  }
}

TEST_CASE("moment residual vanishes for α = 2") {
  RunConfig cfg = small_torus(2.0);
  cfg.pot = {1.5};
  cfg.datum.amplitude = 0.5;
  const Trajectory tr = evolve(cfg);
  REQUIRE(tr.termination == Termination::completed);
  const MomentReport m = moment_report(tr, cfg.alpha);
  CHECK(m.alpha_two_branch);
  CHECK(m.max_abs_residual <= m.residual_tolerance);
}

TEST_CASE("scaling covariance") {
  RunConfig cfg = small_torus();
  cfg.grid.points = 32;
  cfg.tol_step = 1e-11;
  cfg.datum.amplitude = 0.5 * a_star(cfg);
  const Field phi = make_datum(make_grid(cfg.grid), cfg.datum);
  const ScalingResult same = scaling_test(phi, 1.0, 0.1, cfg, 2, false);
  CHECK(same.mismatch <= 1e-12);
  const ScalingResult two = scaling_test(phi, 2.0, 0.1, cfg, 2);
  CHECK(two.mismatch <= two.budget);
  CHECK(two.budget < 1e-2);
  CHECK_THROWS_AS(scaling_test(phi, 3.0, 0.1, cfg), ConfigError);
  RunConfig exp_cfg = cfg;
  exp_cfg.pot.psi = PsiFamily::exponential;
  exp_cfg.pot.mu = 1.0;
  CHECK_THROWS_AS(scaling_test(phi, 2.0, 0.1, exp_cfg), ConfigError);
}

TEST_CASE("hypothesis check") {
  RunConfig cfg = small_radial();
  auto all = [](const std::vector<std::pair<std::string, bool>>& h) {
    bool ok = true;
    for (const auto& [what, holds] : h) ok = ok && holds;
    return ok;
  };
  CHECK(all(hypothesis_check(cfg)));
  cfg.grid.n = 3;
  CHECK_FALSE(all(hypothesis_check(cfg)));
  cfg = small_radial();
  cfg.pot.gamma = 1.2;
  CHECK_FALSE(all(hypothesis_check(cfg)));
  cfg = small_radial(2.0);
  CHECK_FALSE(all(hypothesis_check(cfg)));
}

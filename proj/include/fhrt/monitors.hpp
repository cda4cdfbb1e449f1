#pragma once

#include "fhrt/evolution.hpp"

#include <string>
#include <utility>
#include <vector>

namespace fhrt {

/// d/dt⟨u,Au⟩ checked against 2αE(φ) at interior record times.
///
/// tol_v = 10·(e_fd + e_time + e_space + e_tail) per point: e_fd is the
/// self-refinement of the central difference (spacing h against 2h), e_time
/// = 2α max|E - E(φ)| over the stencil, e_space the change of the
/// instantaneous rate under grid refinement, e_tail the spectral tail
/// fraction times the size of the rate.
struct VirialReport {
  std::vector<double> times;
  std::vector<double> derivative;
  std::vector<double> tol_v;
  /// continuum rate minus 2αE(t): 0 in the mass-critical ψ ≡ 1 case,
  /// 2(γ-α)V for ψ ≡ 1, more negative for ψ = e^{-μr}
  std::vector<double> remainder;
  double bound = 0.0;
  double max_violation = 0.0;  ///< max(derivative - bound - tol_v); <= 0 means the inequality holds
  double min_margin = 0.0;     ///< min(bound + tol_v - derivative)
  double equality_residual = 0.0;  ///< max |derivative - bound|
  double equality_ratio = 0.0;     ///< max |derivative - bound| / tol_v
  double max_derivative = 0.0;
  bool equality_applicable = false;
  bool inequality_applicable = false;
  bool inconclusive = false;
  bool equality_holds = false;
  bool inequality_holds = false;
  /// every derivative below its tolerance: ⟨u,Au⟩ decreasing within tol_v
  bool decreasing = false;
};

VirialReport virial_report(const Trajectory& traj, double alpha, const PotentialSpec& pot);

/// R(t) = d𝓜/dt - 2α⟨u,Au⟩ and the quadratic envelope
/// 𝓜(t) <= 2α²t²E(φ) + 2αt(⟨φ,Aφ⟩ + C m(φ)²) + 𝓜(φ) + tol_m, C = max(C_fit, 0).
struct MomentReport {
  std::vector<double> times;       ///< interior record times
  std::vector<double> moment;      ///< 𝓜 at those times
  std::vector<double> derivative;  ///< d𝓜/dt
  std::vector<double> residual;    ///< R(t)
  std::vector<double> envelope;    ///< right-hand side without tol_m
  std::vector<double> tol_m;
  double c_fit = 0.0;
  double max_abs_residual = 0.0;
  double residual_tolerance = 0.0;  ///< 10·max FD self-refinement of d𝓜/dt
  double max_envelope_violation = 0.0;
  bool nonnegative = false;
  bool envelope_holds = false;
  bool inconclusive = false;
  bool alpha_two_branch = false;
};

MomentReport moment_report(const Trajectory& traj, double alpha);

/// Evolves φ to λ^α T on `grid` and φ_λ = λ^{n/2}φ(λ·) to T on the grid with
/// extent L/λ, and compares u_λ with the exact rescaling of u at `checkpoints`
/// equally spaced times.
struct ScalingResult {
  double mismatch = 0.0;  ///< max relative L² mismatch over checkpoints
  /// same comparison for each run against a run at twice the points; the
  /// dual-resolution discretization budget is their sum
  double budget = 0.0;
  std::vector<double> per_checkpoint;
};

ScalingResult scaling_test(const Field& phi, double lambda, double T, const RunConfig& cfg, int checkpoints = 4,
                           bool with_budget = true);

/// One sampled amplitude of the sweep.
struct SweepRow {
  double amplitude = 0.0;
  double energy = 0.0;
  Termination termination = Termination::completed;
  double final_time = 0.0;
  double hs_growth = 0.0;  ///< final hs_norm / initial hs_norm
  std::vector<DiagnosticsRecord> records;
};

struct SweepResult {
  double a_star = 0.0;         ///< √(K(g)/|V(g)|)
  double a_star_bisect = 0.0;  ///< root of E(A g) by bisection
  double kinetic = 0.0;        ///< K(g)
  double potential = 0.0;      ///< V(g)
  std::vector<SweepRow> rows;
};

/// A* for the datum template scaled by amplitude, with `steps` runs sampled
/// uniformly on [a_min, a_max] (none when steps == 0). Runs in parallel on
/// worker_count() threads; rows are ordered by amplitude index.
SweepResult critical_amplitude_sweep(const RunConfig& cfg, double a_min, double a_max, int steps);

/// FHRT_THREADS caps worker threads; 0 or unset means hardware concurrency.
int worker_count();

/// Which theorem hypotheses a configuration meets, as (statement, holds).
std::vector<std::pair<std::string, bool>> hypothesis_check(const RunConfig& cfg);

}  // namespace fhrt

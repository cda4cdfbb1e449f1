#pragma once

#include "fhrt/functionals.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace fhrt {

enum class DatumFamily { gaussian, mode, file };

/// Initial datum φ. Gaussian: A e^{-|x-c|²/(2w²)} e^{ib|x-c|²}. Mode:
/// A e^{ik·x} with k = 2π m/L for integer mode indices m (torus only).
/// File: a checkpoint whose grid must match the run grid.
struct DatumSpec {
  DatumFamily family = DatumFamily::gaussian;
  double amplitude = 1.0;
  double width = 1.0;
  double chirp = 0.0;
  std::vector<int> mode;
  std::string path;
  std::vector<double> center;
};

Field make_datum(std::shared_ptr<const GridEngine> grid, const DatumSpec& datum);

struct Guards {
  double hs = 1e4;
  double tail = 1e-8;
  double boundary = 1e-8;
};

struct RunConfig {
  GridSpec grid;
  double alpha = 2.0;
  PotentialSpec pot;
  DatumSpec datum;
  double T = 1.0;
  double dt0 = 1e-3;
  double dt_min = 1e-10;
  double tol_step = 1e-8;
  Guards guards;
  int record_every = 10;
  std::string out_dir = "out";
  std::uint64_t seed = 0;

  void validate() const;
};

/// Notes on where the run sits relative to the blowup theorems' hypotheses.
/// Never fatal.
std::vector<std::string> hypothesis_warnings(const RunConfig& cfg);

enum class Termination { completed, blowup_guard, resolution_guard, boundary_guard, dt_floor };

const char* to_string(Termination t);

struct Trajectory {
  std::vector<DiagnosticsRecord> records;
  Field final_state;
  Termination termination = Termination::completed;
  double final_time = 0.0;
  int accepted_steps = 0;
  int rejected_steps = 0;
  std::vector<std::string> warnings;
};

/// One Strang step: half linear, full nonlinear phase, half linear. Any
/// sign of dt; dt = 0 is the identity.
Field step_strang(const Field& u, double dt, double alpha, const PotentialSpec& pot);

/// Adaptive run from the configured datum.
Trajectory evolve(const RunConfig& cfg);

/// Adaptive run from a given initial state on cfg.grid.
Trajectory evolve(const RunConfig& cfg, const Field& initial);

/// Fixed-step run without guards; records every `record_every` steps.
Trajectory evolve_fixed(const Field& initial, double alpha, const PotentialSpec& pot, double T, int steps,
                        int record_every);

struct PicardReport {
  double T = 0.0;
  int iterates = 0;
  std::vector<double> distances;
  std::vector<double> ratios;
  double ratio = 0.0;
  bool diverged = false;
};

/// Fixed-point iteration of the Duhamel map on a Gauss–Legendre time mesh.
std::pair<Field, PicardReport> picard_solve(const Field& phi, double T, int iters, double alpha,
                                            const PotentialSpec& pot, int nodes = 16);

/// Picard state against split-step at T, and the same iteration at T/2.
/// budget = e_iter + e_mesh + e_split: the contraction tail d·r/(1-r), the
/// change under a finer time mesh, and the split-step state's distance to
/// the run with twice the steps.
struct PicardVerification {
  PicardReport full;
  PicardReport half;
  double mismatch = 0.0;  ///< relative L² distance, Picard against split-step
  double e_iter = 0.0;
  double e_mesh = 0.0;
  double e_split = 0.0;
  double budget = 0.0;
  bool contracting = false;       ///< every consecutive ratio < 1 at T
  bool ratios_decrease = false;   ///< max ratio at T/2 below that at T
  bool agrees = false;            ///< mismatch <= budget
};

PicardVerification picard_verify(const Field& phi, double T, int iters, double alpha, const PotentialSpec& pot,
                                 int split_steps = 64);

/// Descriptive fit ‖u‖_{H^{γ/2}}^{-1/σ} ≈ a (T* - t) over the last decade of
/// growth, σ chosen by least squares.
struct BlowupFit {
  bool valid = false;
  double t_star = 0.0;
  double sigma = 0.0;
  double residual = 0.0;
  int points = 0;
};
BlowupFit fit_blowup_time(const std::vector<DiagnosticsRecord>& records);

}  // namespace fhrt

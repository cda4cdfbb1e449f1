#pragma once

#include "fhrt/hartree.hpp"

#include <limits>
#include <vector>

namespace fhrt {

struct EnergyBreakdown {
  double kinetic = 0.0;
  double potential = 0.0;
  double total = 0.0;
};

struct WeightedMoment {
  double ell = 0.0;
  int order = 0;
  double value = 0.0;
};

/// d/dt⟨u,Au⟩ two ways: `discrete` differentiates the grid functional along
/// the semi-discrete flow i u_t = |∇|^α u - V_γ(|u|²)u; `continuum` is
/// 2αK + 2V_w with V_w the potential energy of -x·∇(ψ|x|^{-γ}). They agree
/// up to the spatial discretization of the commutator identity. NaN
/// potential_part when the ψ = e^{-μr} remainder needs γ <= 1.
struct DilationRate {
  double discrete = 0.0;
  double continuum = 0.0;
  double kinetic_part = 0.0;
  double potential_part = 0.0;
};
struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  EnergyBreakdown energy;
  double dilation = 0.0;
  double virial_moment = 0.0;
  double hs_norm = 0.0;
  std::vector<WeightedMoment> weighted_moments;
  double spectral_tail = 0.0;
  double boundary_fraction = 0.0;
  double dt = 0.0;
  DilationRate rate;
  /// |Δ rate.discrete| under grid refinement; NaN unless requested
  double rate_refinement = std::numeric_limits<double>::quiet_NaN();
};

/// ∫|u|².
double mass(const Field& f);

/// K = ½⟨u, |∇|^α u⟩, V = -¼⟨u, V_γ(|u|²)u⟩.
EnergyBreakdown energy(const Field& f, double alpha, const PotentialSpec& pot);

/// Kinetic part alone.
double kinetic_energy(const Field& f, double alpha);

/// ⟨u, Au⟩ = Im ∫ ū x·∇u. `residue` is |Re ∫ ū x·∇u + (n/2) m| / (n/2 m),
/// which vanishes exactly in the continuum.
struct DilationValue {
  double value = 0.0;
  double residue = 0.0;
};
DilationValue dilation_detail(const Field& f);
DilationRate dilation_rate(const Field& f, double alpha, const PotentialSpec& pot);

/// Spatial self-refinement of rate.discrete: the sum of its changes when the
/// state is resampled to half the spacing, and to twice the domain.
double dilation_rate_refinement(const Field& f, double alpha, const PotentialSpec& pot);

double dilation_expectation(const Field& f);

/// Σ_k ⟨x_k u, |∇|^{2-α} x_k u⟩ by two independent routes. For α ≤ 2 the
/// reported value is the sum of squares Σ_k ‖|∇|^{(2-α)/2}(x_k u)‖² ≥ 0;
/// for α > 2 only the direct pairing exists and the torus zero mode of
/// x_k u is dropped (`zero_mode_dropped`).
struct VirialMomentValue {
  double value = 0.0;
  double sum_of_squares = 0.0;
  double direct = 0.0;
  bool zero_mode_dropped = false;
  bool boundary_flag = false;
};
VirialMomentValue virial_moment_detail(const Field& f, double alpha);
double virial_moment(const Field& f, double alpha);

/// ‖(1 + |k|²)^{s/2} û‖.
double sobolev_norm(const Field& f, double s);

/// Torus: ‖|x|^ℓ ∇^d u‖ over the full derivative tensor. Radial: ‖r^ℓ ∂_r^d u‖.
double weighted_moment(const Field& f, double ell, int d);
/// Torus only: ‖|x|^ℓ ∂^j u‖ for a multi-index j.
double weighted_moment(const Field& f, double ell, const std::vector<int>& multi_index);

/// Share of the spectral ℓ² mass on the top third of the spectrum.
double spectral_tail(const Field& f);

/// Share of the physical mass in the outer boundary layer.
double boundary_fraction(const Field& f);

/// Every tracked functional at one instant.
DiagnosticsRecord diagnose(const Field& f, double t, double dt, double alpha, const PotentialSpec& pot,
                           bool refine_rate = false);

}  // namespace fhrt

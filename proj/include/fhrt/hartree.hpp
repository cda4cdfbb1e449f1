#pragma once

#include "fhrt/grid.hpp"

#include <memory>

namespace fhrt {

enum class PsiFamily { one, exponential };

/// Kernel ψ(|x|)|x|^{-γ} of the Hartree potential, with an overall coupling
/// (1 is the focusing equation, 0 switches the nonlinearity off).
struct PotentialSpec {
  double gamma = 1.0;
  PsiFamily psi = PsiFamily::one;
  double mu = 0.0;
  bool mass_critical = false;
  double coupling = 1.0;

  void validate(int n) const;
  [[nodiscard]] double profile(double r) const;
  [[nodiscard]] double kernel(double r) const;
  [[nodiscard]] bool enabled() const { return coupling != 0.0; }
  friend bool operator==(const PotentialSpec&, const PotentialSpec&) = default;
};

/// Radial Fourier transform of ψ(|x|)|x|^{-γ} at |ξ| = k > 0.
double kernel_transform(int n, const PotentialSpec& pot, double k);

/// Exact average of ψ(|y|)|y|^{-γ} over the cube of side h centred at h·d.
double kernel_cell_average(int n, const int* d, double h, const PotentialSpec& pot);

/// V_γ(ρ) = (ψ|·|^{-γ}) ∗ ρ on one grid. Torus: aperiodic convolution on a
/// zero-padded (2N)^n grid against cell-averaged kernel values. Radial:
/// Hankel multiplier applied to ρ - m g with the potential of the unit
/// Gaussian g added back analytically, so the Dirichlet truncation at R
/// does not see the monopole tail.
class HartreeOperator {
 public:
  HartreeOperator(std::shared_ptr<const GridEngine> grid, const PotentialSpec& pot);
  ~HartreeOperator();

  [[nodiscard]] RealVector apply(const RealVector& density) const;
  [[nodiscard]] const PotentialSpec& potential() const { return pot_; }
  [[nodiscard]] const GridEngine& engine() const { return *grid_; }

  /// Radial only: spectral multiplier at the engine wavenumbers.
  [[nodiscard]] const RealVector& multiplier() const { return multiplier_; }
  /// Radial only: width of the reference Gaussian.
  [[nodiscard]] double reference_width() const { return sigma_; }

 private:
  RealVector apply_torus(const RealVector& density) const;
  RealVector apply_radial(const RealVector& density) const;
  RealVector convolve_padded(const RealVector& rho) const;

  std::shared_ptr<const GridEngine> grid_;
  PotentialSpec pot_;
  // torus
  std::unique_ptr<RealFftPlan> padded_plan_;
  RealVector kernel_hat_;
  std::vector<int> padded_dims_;
  // radial
  RealVector multiplier_;
  RealVector reference_density_;
  RealVector reference_potential_;
  RealVector reference_defect_;
  double sigma_ = 0.0;
};

/// Shared, cached operator for (grid, pot).
std::shared_ptr<const HartreeOperator> hartree_operator(std::shared_ptr<const GridEngine> grid,
                                                        const PotentialSpec& pot);

struct HartreeResult {
  Field potential;
  /// Set when the density reaches the boundary layer, where the truncated
  /// domain no longer represents the whole-space convolution.
  bool resolution_flag = false;
  double boundary_fraction = 0.0;
};

HartreeResult hartree_potential(const Field& f, const PotentialSpec& pot);

/// |u|² of a physical field.
RealVector density(const Field& f);

}  // namespace fhrt

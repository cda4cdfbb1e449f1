#pragma once

#include "fhrt/fft.hpp"
#include "fhrt/types.hpp"

#include <memory>
#include <mutex>
#include <vector>

namespace fhrt {

enum class Engine { torus, radial };

/// Geometry of a simulation grid.
///
/// Torus: n axes of `points` nodes on [-extent/2, extent/2). Radial:
/// `points` Fourier–Bessel nodes on [0, extent) for radial functions on R^n.
struct GridSpec {
  Engine engine = Engine::torus;
  int n = 1;
  int points = 64;
  double extent = 1.0;
  bool dealias = false;

  void validate() const;
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

enum class Representation { physical, spectral };
enum class Direction { forward, inverse };

/// Sentinel axis meaning "|x|" (torus) or "r" (radial).
inline constexpr int kRadialAxis = -1;

/// Transforms, quadrature and coordinates for one grid. Immutable after
/// construction; share through std::shared_ptr<const GridEngine>.
///
/// Spectral data follow û(ξ) = ∫ e^{-iξ·x} u(x) dx with (2π)^{-n} on
/// inversion, so Plancherel reads Σ weights·|u|² = Σ spectral_weights·|û|².
class GridEngine {
 public:
  virtual ~GridEngine() = default;

  [[nodiscard]] const GridSpec& spec() const { return spec_; }
  [[nodiscard]] int dimension() const { return spec_.n; }
  [[nodiscard]] Eigen::Index size() const { return radius_.size(); }

  [[nodiscard]] const RealVector& weights() const { return weights_; }
  [[nodiscard]] const RealVector& spectral_weights() const { return spectral_weights_; }
  [[nodiscard]] const RealVector& wavenumber_magnitude() const { return kmag_; }
  [[nodiscard]] const RealVector& radius() const { return radius_; }
  /// 1 on the top third of the spectrum, 0 elsewhere.
  [[nodiscard]] const RealVector& tail_mask() const { return tail_mask_; }
  /// 1 on the outer boundary layer of the domain, 0 elsewhere.
  [[nodiscard]] const RealVector& boundary_mask() const { return boundary_mask_; }

  [[nodiscard]] virtual ComplexVector forward(const ComplexVector& physical) const = 0;
  [[nodiscard]] virtual ComplexVector inverse(const ComplexVector& spectral) const = 0;

  /// ∂_axis (torus, spectral) or ∂_r (radial, 4th-order differences).
  [[nodiscard]] virtual ComplexVector derivative(const ComplexVector& physical, int axis) const = 0;

  /// Centred coordinate x_axis (torus) or r (radial, axis = kRadialAxis).
  [[nodiscard]] virtual RealVector coordinate(int axis) const = 0;

 protected:
  explicit GridEngine(GridSpec spec) : spec_(spec) {}

  GridSpec spec_;
  RealVector weights_;
  RealVector spectral_weights_;
  RealVector kmag_;
  RealVector radius_;
  RealVector tail_mask_;
  RealVector boundary_mask_;
};

class TorusEngine final : public GridEngine {
 public:
  explicit TorusEngine(GridSpec spec);

  ComplexVector forward(const ComplexVector& physical) const override;
  ComplexVector inverse(const ComplexVector& spectral) const override;
  ComplexVector derivative(const ComplexVector& physical, int axis) const override;
  RealVector coordinate(int axis) const override;

  [[nodiscard]] double spacing() const { return spacing_; }
  [[nodiscard]] int points_per_axis() const { return spec_.points; }
  /// Signed wavenumber along `axis` for every spectral slot (FFT order).
  [[nodiscard]] const RealVector& wavenumber(int axis) const { return axis_k_[axis]; }
  /// Signed integer mode index along `axis` for every spectral slot.
  [[nodiscard]] const Eigen::VectorXi& mode_index(int axis) const { return axis_mode_[axis]; }
  /// x_axis as the periodic sawtooth: equal to the node coordinate except
  /// at the seam node -L/2, where the jump is split and the value is 0.
  [[nodiscard]] const RealVector& sawtooth(int axis) const { return axis_saw_[axis]; }
  /// 1 where every axis mode satisfies |m| < N/3 (2/3 rule), else 0.
  [[nodiscard]] const RealVector& dealias_mask() const { return dealias_mask_; }

 private:
  double spacing_;
  FftPlan plan_;
  RealVector phase_sign_;
  std::vector<RealVector> axis_k_;
  std::vector<Eigen::VectorXi> axis_mode_;
  std::vector<RealVector> axis_x_;
  std::vector<RealVector> axis_saw_;
  RealVector dealias_mask_;
};

/// Fourier–Bessel engine for radial functions on R^n, n >= 2.
///
/// Nodes r_j = z_j R / z_{M+1} and wavenumbers k_m = z_m / R with z_j the
/// positive zeros of J_ν, ν = n/2 - 1. The symmetric transform matrix is
/// replaced by its orthogonal polar factor, so forward∘inverse is the
/// identity and Plancherel holds to roundoff.
class RadialEngine final : public GridEngine {
 public:
  explicit RadialEngine(GridSpec spec);

  ComplexVector forward(const ComplexVector& physical) const override;
  ComplexVector inverse(const ComplexVector& spectral) const override;
  ComplexVector derivative(const ComplexVector& physical, int axis) const override;
  RealVector coordinate(int axis) const override;

  [[nodiscard]] double order() const { return nu_; }
  [[nodiscard]] double radius_limit() const { return spec_.extent; }
  /// Quadrature weights for ∫_0^R f(r) r dr on the nodes.
  [[nodiscard]] const RealVector& hankel_weights() const { return w_; }
  /// Quadrature weights for ∫_0^K F(k) k dk on the wavenumbers.
  [[nodiscard]] const RealVector& dual_weights() const { return v_; }
  /// Orthogonality defect max|Q² - I| of the transform matrix.
  [[nodiscard]] double orthogonality_defect() const { return defect_; }

  /// d/dr of an even (odd = false) or odd radial profile.
  [[nodiscard]] ComplexVector radial_derivative(const ComplexVector& physical, bool odd) const;

  /// |F(x u)|(k_m) / (2π)^{n/2} k_m^{-ν}: the order ν+1 Hankel transform of
  /// r^{ν+1} u by quadrature on the nodes, i.e. the radial profile of ∇_ξ û.
  [[nodiscard]] ComplexVector vector_profile_transform(const ComplexVector& physical) const;

  /// Evaluates the band-limited interpolant of a spectral vector at radii.
  [[nodiscard]] ComplexVector interpolate(const ComplexVector& spectral, const RealVector& radii) const;
  /// The linear map behind interpolate(), one row per radius.
  [[nodiscard]] Eigen::MatrixXd interpolation_matrix(const RealVector& radii) const;

  /// Σ_k ⟨x_k u, s(|∇|)(x_k u)⟩ computed in physical space on a companion
  /// order ν+1 Fourier–Bessel grid (the l = 1 harmonic sector).
  [[nodiscard]] double vector_sector_expectation(const ComplexVector& physical, double exponent) const;

 private:
  struct Companion;
  const Companion& companion() const;
  const Eigen::MatrixXd& vector_matrix() const;

  double nu_;
  RealVector w_;
  RealVector v_;
  RealVector to_scaled_;    // r^ν √w
  RealVector from_scaled_;  // (2π)^{n/2} k^{-ν} / √v
  Eigen::MatrixXd transform_;
  double defect_ = 0.0;
  // derivative stencils: 5 weights and the extended-node offset per node
  Eigen::Matrix<double, Eigen::Dynamic, 5> stencil_;
  Eigen::VectorXi stencil_start_;

  mutable std::once_flag companion_once_;
  mutable std::unique_ptr<Companion> companion_;
  mutable std::once_flag vector_once_;
  mutable Eigen::MatrixXd vector_matrix_;
};

/// Builds (or returns a cached) immutable engine for `spec`.
std::shared_ptr<const GridEngine> make_grid(const GridSpec& spec);

/// Orthogonal polar factor of a symmetric, nearly orthogonal matrix by
/// Newton–Schulz iteration. Returns the final defect max|Q² - I|.
double orthogonalize_symmetric(Eigen::MatrixXd& q, int max_iterations = 6);

/// Samples of u on a grid engine with their representation tag.
struct Field {
  std::shared_ptr<const GridEngine> grid;
  Representation rep = Representation::physical;
  ComplexVector data;

  [[nodiscard]] const GridEngine& engine() const { return *grid; }
  [[nodiscard]] const TorusEngine* torus() const { return dynamic_cast<const TorusEngine*>(grid.get()); }
  [[nodiscard]] const RadialEngine* radial() const { return dynamic_cast<const RadialEngine*>(grid.get()); }
};

Field make_field(std::shared_ptr<const GridEngine> grid, ComplexVector physical);
Field zero_field(std::shared_ptr<const GridEngine> grid);

Field transform(const Field& f, Direction direction);
Field to_physical(const Field& f);
Field to_spectral(const Field& f);

/// Fourier multiplier evaluated at |k| ≥ 0.
struct Symbol {
  enum class Kind { fractional_laplacian, half_virial, bessel, riesz };
  Kind kind = Kind::fractional_laplacian;
  double parameter = 0.0;

  static Symbol fractional_laplacian(double alpha);
  /// |k|^{(2-α)/2}, the square root of the virial multiplier.
  static Symbol half_virial(double alpha);
  /// (1 + |k|²)^{s/2}.
  static Symbol bessel(double s);
  /// c_{n,γ}|k|^{γ-n}: convolution with |x|^{-γ}. Parameter is γ - n.
  static Symbol riesz(double exponent);

  [[nodiscard]] double operator()(double k, int n) const;
};

Field apply_symbol(const Field& f, const Symbol& s);

/// Multiplies spectral data by an arbitrary per-slot multiplier.
Field apply_multiplier(const Field& f, const RealVector& multiplier);

Field coordinate_multiply(const Field& f, int axis);
Field gradient(const Field& f, int axis);

/// Band-limited transfer onto another grid of the same engine and n. Torus:
/// the target spacing must divide h and the old nodes must be target nodes
/// (L' >= L); the field is zero outside the old box. Radial: the Fourier–Bessel
/// interpolant at the target nodes, zero beyond the old R.
Field resample(const Field& f, const GridSpec& target);

}  // namespace fhrt

#pragma once

#include "fhrt/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fhrt {

enum class RadialKind { gaussian, bump, power_cutoff, random_mix };

/// Nonnegative radial profile on ℝⁿ.
///   gaussian(w):          e^{-r²/(2w²)}
///   bump(r0, width):      e^{1 - 1/(1-t²)}, t = (r - r0)/width, zero for |t| >= 1
///   power_cutoff(a, r0):  r^{-a} for r < r0
///   random_mix(seed, k):  Σ c_j e^{-r²/(2w_j²)}, c_j in [0.1, 1], w_j from a
///                         fixed geometric dictionary of Gaussian widths
class RadialTestFunction {
 public:
  static RadialTestFunction gaussian(int n, double width);
  static RadialTestFunction bump(int n, double r0, double width);
  static RadialTestFunction power_cutoff(int n, double a, double r0);
  static RadialTestFunction random_mix(int n, std::uint64_t seed, int terms);

  /// Widths the random_mix family draws from.
  static const std::vector<double>& mix_dictionary();

  double operator()(double r) const;
  /// s^{n/2} f(s r); L²-normalised dilation.
  RadialTestFunction dilated(double s) const;
  RadialTestFunction scaled(double c) const;

  int n() const { return n_; }
  RadialKind kind() const { return kind_; }
  std::string id() const;
  /// f vanishes (or is below 1e-19 of its peak) beyond this radius.
  double reach() const;
  double length_scale() const;
  bool compact() const { return kind_ == RadialKind::bump || kind_ == RadialKind::power_cutoff; }
  bool radially_decreasing() const;
  std::vector<double> breaks() const;
  /// f ∈ Lᵖ(ℝⁿ)
  bool in_lp(double p) const;
  /// f ∈ Ḣ^{s}(ℝⁿ), s = γ/2
  bool in_hdot(double s) const;

  /// random_mix only: the (coefficient, width) pairs
  const std::vector<std::pair<double, double>>& terms() const { return terms_; }

 private:
  RadialKind kind_ = RadialKind::gaussian;
  int n_ = 3;
  double amp_ = 1.0;
  double p1_ = 1.0;
  double p2_ = 0.0;
  std::uint64_t seed_ = 0;
  std::vector<std::pair<double, double>> terms_;
};

/// ∫ |f|^p over ℝⁿ, raised to 1/p.
double radial_lp_norm(const RadialTestFunction& f, double p, int level = 1);

/// (|·|^{-λ} ∗ f)(x) at |x| = x_mag by (s, θ) adaptive quadrature.
double riesz_convolution(const RadialTestFunction& f, double lambda, double x_mag, int level = 1);

struct RatioSample {
  std::string id;
  double x = 0.0;  ///< evaluation radius (weighted convolution, sampled Hardy–Sobolev)
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

/// Quadrature levels: 0 coarse, 1 fine. Suites report the fine values and
/// the relative change of sup_ratio between the two.
struct RatioReport {
  std::string suite;
  int n = 0;
  double gamma = 0.0;  ///< weighted convolution and Hardy–Sobolev exponent
  double p = 0.0;      ///< Stein–Weiss
  double beta = 0.0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::vector<RatioSample> samples;
  double sup_ratio = 0.0;
  double refinement_delta = 0.0;
  bool accepted() const;
};

/// lhs/(|x|^{-γ}‖f‖₁); needs n >= 2, 0 < γ < n-1.
RatioSample weighted_convolution_sample(const RadialTestFunction& f, double gamma, double x_mag, int level = 1);
double weighted_convolution_ratio(const RadialTestFunction& f, double gamma, double x_mag, int level = 1);

/// ‖|x|^{-β}(|·|^{-λ} ∗ f)‖_p / ‖f‖_p; needs 0 < λ < n, β < n/p, β + λ = n.
RatioSample stein_weiss_sample(const RadialTestFunction& f, double p, double beta, double lambda, int level = 1);
double stein_weiss_ratio(const RadialTestFunction& f, double p, double beta, double lambda, int level = 1);

/// sup_x ∫|u(x-y)|²|y|^{-γ}dy / ‖u‖²_{Ḣ^{γ/2}}; the sup is the origin value
/// for radially decreasing u and a sampled max otherwise. Needs 0 < γ < n.
RatioSample hardy_sobolev_sample(const RadialTestFunction& u, double gamma, int level = 1);
double hardy_sobolev_ratio(const RadialTestFunction& u, double gamma, int level = 1);

/// Max relative deviation of the Hardy–Sobolev ratio over the dilations
/// u_s, s in `scales`, from its value at s = 1.
double hardy_sobolev_dilation_drift(const RadialTestFunction& u, double gamma, const std::vector<double>& scales);

RatioReport weighted_convolution_suite(int n, double gamma, std::uint64_t seed = 1);
/// Deterministic families plus `mixes` random_mix functions from `seed`.
RatioReport stein_weiss_suite(int n, double p, double beta, std::uint64_t seed = 1, int mixes = 100);
RatioReport hardy_sobolev_suite(int n, double gamma, std::uint64_t seed = 1);

void write_ratio_report(const RatioReport& report, const std::string& path);
std::string ratio_summary(const RatioReport& report);

}  // namespace fhrt

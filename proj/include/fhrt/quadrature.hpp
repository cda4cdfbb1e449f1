#pragma once

#include "fhrt/types.hpp"

#include <functional>
#include <vector>

namespace fhrt {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

struct QuadratureTolerance {
  double absolute = 1e-12;
  double relative = 1e-10;
  int max_intervals = 4000;
};

/// Globally adaptive 15-point Gauss–Kronrod on [a, b]. Integrable endpoint
/// singularities are fine; interior ones should be split by the caller.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           QuadratureTolerance tol = {});

/// Splits [a, b] at the given interior points and sums adaptive pieces.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const std::vector<double>& breaks, QuadratureTolerance tol = {});

/// ∫_a^∞ through t = a + s/(1-s).
QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       QuadratureTolerance tol = {});

/// Panels for composite rules: geometric grading towards `a` (for algebraic
/// endpoint singularities) followed by uniform panels up to b.
std::vector<double> graded_panels(double a, double b, double grading_end, int geometric_levels,
                                  double uniform_width);

/// Fixed composite Gauss–Legendre nodes/weights over the given panel edges.
struct CompositeRule {
  RealVector nodes;
  RealVector weights;
};
CompositeRule composite_gauss_legendre(const std::vector<double>& edges, int points_per_panel);

}  // namespace fhrt

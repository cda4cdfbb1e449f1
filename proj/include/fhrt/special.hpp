#pragma once

#include "fhrt/types.hpp"

#include <vector>

namespace fhrt {

/// J_nu(x) for x >= 0; fast paths for integer and half-integer orders.
double bessel_j(double nu, double x);

/// First `count` positive zeros of J_nu, ascending.
std::vector<double> bessel_zeros(double nu, int count);

/// Surface area of the unit sphere S^{n-1} in R^n.
double sphere_area(int n);

/// Fourier transform constant of the Riesz kernel under the convention
/// f^(k) = ∫ e^{-ik.x} f(x) dx:  F[|x|^{-gamma}](k) = c |k|^{gamma-n}.
double riesz_constant(int n, double gamma);

struct GaussLegendreRule {
  RealVector nodes;    ///< on [-1, 1], ascending
  RealVector weights;
};

GaussLegendreRule gauss_legendre(int points);

/// Maps the rule onto [a, b].
GaussLegendreRule gauss_legendre(int points, double a, double b);

}  // namespace fhrt

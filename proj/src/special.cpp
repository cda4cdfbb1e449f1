#include "fhrt/special.hpp"

#include <cmath>
#include <numbers>

namespace fhrt {

double bessel_j(double nu, double x) {
  if (nu == 0.0) return ::j0(x);
  if (nu == 1.0) return ::j1(x);
  if (nu == std::floor(nu) && nu < 64.0) return ::jn(static_cast<int>(nu), x);
  if (x > 0.0 && nu == 0.5) return std::sqrt(2.0 / (std::numbers::pi * x)) * std::sin(x);
  if (x > 0.0 && nu == 1.5) {
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (std::sin(x) / x - std::cos(x));
  }
  return std::cyl_bessel_j(nu, x);
}

namespace {

// McMahon's expansion, good enough as a Newton seed for every zero once
// nu is small (orders used here are n/2 - 1 and n/2 for n <= 8).
double mcmahon_guess(double nu, int m) {
  const double mu = 4.0 * nu * nu;
  const double beta = (m + 0.5 * nu - 0.25) * std::numbers::pi;
  const double e = 8.0 * beta;
  return beta - (mu - 1.0) / e - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e * e * e);
}

}  // namespace

std::vector<double> bessel_zeros(double nu, int count) {
  if (nu < 0.0) throw ConfigError("bessel_zeros: order must be nonnegative");
  std::vector<double> zeros;
  zeros.reserve(static_cast<std::size_t>(count));
  for (int m = 1; m <= count; ++m) {
    double x = mcmahon_guess(nu, m);
    for (int it = 0; it < 100; ++it) {
      const double f = bessel_j(nu, x);
      const double df = nu / x * f - bessel_j(nu + 1.0, x);
      const double dx = f / df;
      x -= dx;
      if (std::abs(dx) < 1e-15 * x) break;
    }
    if (!zeros.empty() && !(x > zeros.back() + 1.0)) {
      throw std::runtime_error("bessel_zeros: root finder skipped or repeated a zero");
    }
    zeros.push_back(x);
  }
  return zeros;
}

double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

double riesz_constant(int n, double gamma) {
  return std::pow(2.0, n - gamma) * std::pow(std::numbers::pi, 0.5 * n) *
         std::tgamma(0.5 * (n - gamma)) / std::tgamma(0.5 * gamma);
}

GaussLegendreRule gauss_legendre(int points) {
  GaussLegendreRule rule{RealVector(points), RealVector(points)};
  const int half = (points + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= points; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = points * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[points - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[points - 1 - i] = w;
  }
  return rule;
}

GaussLegendreRule gauss_legendre(int points, double a, double b) {
  GaussLegendreRule rule = gauss_legendre(points);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  rule.nodes = (rule.nodes.array() * half + mid).matrix();
  rule.weights *= half;
  return rule;
}

}  // namespace fhrt

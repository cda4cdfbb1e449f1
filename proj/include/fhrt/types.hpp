#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace fhrt {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Invalid parameters or inconsistent configuration, detected before any
/// computation runs.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// API misuse: wrong representation, axis out of range, and similar.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Neumaier-compensated accumulator. Quadrature loops that feed drift
/// measurements at the 1e-10 level go through this.
template <typename Scalar = double>
class CompensatedSum {
 public:
  void add(Scalar x) {
    const Scalar t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(Scalar x) {
    add(x);
    return *this;
  }
  [[nodiscard]] Scalar value() const { return sum_ + carry_; }

 private:
  Scalar sum_{0};
  Scalar carry_{0};
};

template <typename Derived>
typename Derived::Scalar compensated_sum(const Eigen::DenseBase<Derived>& v) {
  CompensatedSum<typename Derived::Scalar> acc;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc.add(v.derived().coeff(i));
  return acc.value();
}

/// Σ_i w_i |a_i|^2 with compensation.
template <typename Weights, typename Values>
double weighted_norm2(const Eigen::MatrixBase<Weights>& w, const Eigen::MatrixBase<Values>& a) {
  CompensatedSum<double> acc;
  for (Eigen::Index i = 0; i < a.size(); ++i) acc.add(w.coeff(i) * std::norm(a.coeff(i)));
  return acc.value();
}

/// Σ_i w_i conj(a_i) b_i with compensation on both parts.
template <typename Weights, typename A, typename B>
Complex weighted_inner(const Eigen::MatrixBase<Weights>& w, const Eigen::MatrixBase<A>& a,
                       const Eigen::MatrixBase<B>& b) {
  CompensatedSum<double> re;
  CompensatedSum<double> im;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const Complex z = w.coeff(i) * std::conj(Complex(a.coeff(i))) * Complex(b.coeff(i));
    re.add(z.real());
    im.add(z.imag());
  }
  return {re.value(), im.value()};
}

}  // namespace fhrt

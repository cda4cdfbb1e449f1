#pragma once

#include "fhrt/types.hpp"

#include <memory>
#include <vector>

namespace fhrt {

/// Unnormalized n-dimensional complex FFT on a row-major tensor.
///
/// Plans are created once (FFTW_ESTIMATE, so the algorithm choice and hence
/// the bits of every result are reproducible run to run) and executed through
/// the new-array interface, which is reentrant. An FftPlan is immutable after
/// construction and may be shared across threads.
class FftPlan {
 public:
  explicit FftPlan(std::vector<int> dims);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  [[nodiscard]] Eigen::Index size() const { return size_; }
  [[nodiscard]] const std::vector<int>& dims() const { return dims_; }

  /// In place, sign -1.
  void forward(Complex* data) const;
  /// In place, sign +1, no 1/N.
  void backward(Complex* data) const;

 private:
  std::vector<int> dims_;
  Eigen::Index size_;
  void* forward_plan_;
  void* backward_plan_;
};

/// Real-to-half-complex companion used by the zero-padded convolutions.
class RealFftPlan {
 public:
  explicit RealFftPlan(std::vector<int> dims);
  ~RealFftPlan();
  RealFftPlan(const RealFftPlan&) = delete;
  RealFftPlan& operator=(const RealFftPlan&) = delete;

  [[nodiscard]] Eigen::Index real_size() const { return real_size_; }
  [[nodiscard]] Eigen::Index complex_size() const { return complex_size_; }

  void forward(double* in, Complex* out) const;
  /// Destroys the contents of `in`.
  void backward(Complex* in, double* out) const;

 private:
  std::vector<int> dims_;
  Eigen::Index real_size_;
  Eigen::Index complex_size_;
  void* forward_plan_;
  void* backward_plan_;
};

}  // namespace fhrt

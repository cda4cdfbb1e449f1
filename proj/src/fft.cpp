#include "fhrt/fft.hpp"

#include <fftw3.h>

#include <functional>
#include <mutex>
#include <numeric>

namespace fhrt {

namespace {

// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr unsigned kFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

Eigen::Index product(const std::vector<int>& dims) {
  return std::accumulate(dims.begin(), dims.end(), Eigen::Index{1}, std::multiplies<>());
}

}  // namespace

FftPlan::FftPlan(std::vector<int> dims) : dims_(std::move(dims)), size_(product(dims_)) {
  std::lock_guard lock(planner_mutex());
  auto* scratch = fftw_alloc_complex(static_cast<std::size_t>(size_));
  const int rank = static_cast<int>(dims_.size());
  forward_plan_ = fftw_plan_dft(rank, dims_.data(), scratch, scratch, FFTW_FORWARD, kFlags);
  backward_plan_ = fftw_plan_dft(rank, dims_.data(), scratch, scratch, FFTW_BACKWARD, kFlags);
  fftw_free(scratch);
}

FftPlan::~FftPlan() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

void FftPlan::forward(Complex* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), p, p);
}

void FftPlan::backward(Complex* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), p, p);
}

RealFftPlan::RealFftPlan(std::vector<int> dims) : dims_(std::move(dims)), real_size_(product(dims_)) {
  complex_size_ = real_size_ / dims_.back() * (dims_.back() / 2 + 1);
  std::lock_guard lock(planner_mutex());
  auto* r = fftw_alloc_real(static_cast<std::size_t>(real_size_));
  auto* c = fftw_alloc_complex(static_cast<std::size_t>(complex_size_));
  const int rank = static_cast<int>(dims_.size());
  forward_plan_ = fftw_plan_dft_r2c(rank, dims_.data(), r, c, kFlags);
  backward_plan_ = fftw_plan_dft_c2r(rank, dims_.data(), c, r, kFlags);
  fftw_free(r);
  fftw_free(c);
}

RealFftPlan::~RealFftPlan() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

void RealFftPlan::forward(double* in, Complex* out) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), in,
                       reinterpret_cast<fftw_complex*>(out));
}

void RealFftPlan::backward(Complex* in, double* out) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(backward_plan_),
                       reinterpret_cast<fftw_complex*>(in), out);
}

}  // namespace fhrt

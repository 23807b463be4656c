#pragma once

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>

namespace nudgevisc::detail {

struct fftw_free_deleter {
  void operator()(std::complex<double>* p) const noexcept { fftw_free(p); }
};

/// SIMD-aligned complex work array owned through fftw_malloc.
class fft_buffer {
 public:
  fft_buffer() = default;
  explicit fft_buffer(std::size_t n)
      : data_(reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(n))), size_(n) {
    std::fill_n(data_.get(), n, std::complex<double>{});
  }

  std::complex<double>* data() noexcept { return data_.get(); }
  const std::complex<double>* data() const noexcept { return data_.get(); }
  std::size_t size() const noexcept { return size_; }
  std::complex<double>& operator[](std::size_t i) noexcept { return data_[i]; }
  const std::complex<double>& operator[](std::size_t i) const noexcept { return data_[i]; }
  std::span<std::complex<double>> span() noexcept { return {data_.get(), size_}; }

 private:
  std::unique_ptr<std::complex<double>[], fftw_free_deleter> data_;
  std::size_t size_ = 0;
};

/// In-place 2D complex transform pair of size m x m.
///
/// Plans are made with FFTW_ESTIMATE so the chosen algorithm, and therefore
/// every output bit, is identical from run to run.  Execution goes through
/// the new-array interface, which is safe to call concurrently.
class fft2d {
 public:
  explicit fft2d(int m) : m_(m) {
    fft_buffer scratch(static_cast<std::size_t>(m) * m);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    forward_ = fftw_plan_dft_2d(m, m, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_2d(m, m, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fft2d(const fft2d&) = delete;
  fft2d& operator=(const fft2d&) = delete;
  ~fft2d() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  int size() const noexcept { return m_; }

  /// Unnormalised sum_x f(x) e^{-i k.x}.
  void forward(fft_buffer& b) const noexcept {
    auto* p = reinterpret_cast<fftw_complex*>(b.data());
    fftw_execute_dft(forward_, p, p);
  }

  /// Unnormalised sum_k c(k) e^{+i k.x}.
  void backward(fft_buffer& b) const noexcept {
    auto* p = reinterpret_cast<fftw_complex*>(b.data());
    fftw_execute_dft(backward_, p, p);
  }

 private:
  int m_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

/// Process-wide plan cache; FFTW planning itself is not thread-safe.
inline const fft2d& plan_for(int m) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<fft2d>> plans;
  std::lock_guard lock(mutex);
  auto& slot = plans[m];
  if (!slot) slot = std::make_unique<fft2d>(m);
  return *slot;
}

}  // namespace nudgevisc::detail

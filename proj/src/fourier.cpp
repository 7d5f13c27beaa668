#include "otoclab/fourier.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <stdexcept>

namespace otoclab {

FftEngine::FftEngine(int n) : n_(n) {
  if (n < 2) throw std::invalid_argument("FftEngine: length must be >= 2");
  buf_in_ = fftw_alloc_complex(static_cast<std::size_t>(n));
  buf_out_ = fftw_alloc_complex(static_cast<std::size_t>(n));
  if (!buf_in_ || !buf_out_) throw std::bad_alloc();
  plan_fwd_ = fftw_plan_dft_1d(n, static_cast<fftw_complex*>(buf_in_),
                               static_cast<fftw_complex*>(buf_out_), FFTW_FORWARD,
                               FFTW_ESTIMATE);
  plan_bwd_ = fftw_plan_dft_1d(n, static_cast<fftw_complex*>(buf_in_),
                               static_cast<fftw_complex*>(buf_out_), FFTW_BACKWARD,
                               FFTW_ESTIMATE);
  if (!plan_fwd_ || !plan_bwd_) throw std::runtime_error("FftEngine: planning failed");
}

FftEngine::~FftEngine() {
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
  fftw_free(buf_in_);
  fftw_free(buf_out_);
}

// Copy through the plan's own aligned buffers: fftw_execute is then always
// legal regardless of caller alignment, and in/out may alias.
void FftEngine::forward(const std::complex<double>* x, std::complex<double>* y) {
  const std::size_t bytes = sizeof(fftw_complex) * static_cast<std::size_t>(n_);
  std::memcpy(buf_in_, x, bytes);
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
  std::memcpy(y, buf_out_, bytes);
}

void FftEngine::backward(const std::complex<double>* x, std::complex<double>* y) {
  const std::size_t bytes = sizeof(fftw_complex) * static_cast<std::size_t>(n_);
  std::memcpy(buf_in_, x, bytes);
  fftw_execute(static_cast<fftw_plan>(plan_bwd_));
  std::memcpy(y, buf_out_, bytes);
}

FftEngine& fft_engine(int n) {
  thread_local std::map<int, std::unique_ptr<FftEngine>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<FftEngine>(n);
  return *slot;
}

}  // namespace otoclab

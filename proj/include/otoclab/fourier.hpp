#pragma once
// FFTW complex-to-complex wrapper, one engine per transform length.
// Plans use FFTW_ESTIMATE (deterministic planning: the algorithm depends only
// on the length, never on timing), and execution stays single threaded so
// transform output is bitwise identical for any worker count.

#include <complex>
#include <cstddef>

namespace otoclab {

class FftEngine {
 public:
  explicit FftEngine(int n);
  ~FftEngine();
  FftEngine(const FftEngine&) = delete;
  FftEngine& operator=(const FftEngine&) = delete;

  // forward:  y_k = sum_j x_j exp(-2 pi i j k / n)
  // backward: y_j = sum_k x_k exp(+2 pi i j k / n)   (unnormalized)
  void forward(const std::complex<double>* x, std::complex<double>* y);
  void backward(const std::complex<double>* x, std::complex<double>* y);

  int size() const { return n_; }

 private:
  int n_;
  void* plan_fwd_;
  void* plan_bwd_;
  void* buf_in_;
  void* buf_out_;
};

// thread-local engine cache; evolution loops reuse plans across kicks
FftEngine& fft_engine(int n);

}  // namespace otoclab

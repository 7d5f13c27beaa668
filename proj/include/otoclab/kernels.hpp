#pragma once
// Low-level numeric kernels. Every kernel has a serial twin in kernels::ref
// with the same signature; tests compare the two and the benchmark times them.
//
// Reproducibility rules:
//  * elementwise kernels write one slot per index, so any schedule gives
//    bitwise-identical results;
//  * reductions run over fixed-size blocks (serial inside a block, blocks
//    combined in index order), so the summation tree does not depend on the
//    worker count. ref:: reductions are plain left folds, a numerically
//    independent route.

#include <complex>
#include <cstddef>
#include <cstdint>

namespace otoclab::kernels {

using cplx = std::complex<double>;

int max_threads();
void set_threads(int n);   // clamp to >= 1; no-op when built without OpenMP
int threads_from_env();    // OTOCLAB_THREADS, or 0 if unset/invalid

// deterministic reductions
double block_sum(const double* x, std::size_t n);
double sum_abs2(const cplx* x, std::size_t n);
double sum_abs2_weighted(const cplx* x, const double* w, std::size_t n);
cplx inner(const cplx* a, const cplx* b, std::size_t n);  // sum conj(a) b

// elementwise state kernels
void phase_multiply(cplx* x, const cplx* phase, std::size_t n);
// x_j *= exp(i coef |x_j|^2): the nonlinear kick phase evaluated on the grid
void density_phase(cplx* x, std::size_t n, double coef);
void scale(cplx* x, std::size_t n, double s);

// classical ensemble kernels
//   f[i]  = sum_{n=1..ncut} n   K[n-1] sin(n theta[i])
//   df[i] = sum_{n=1..ncut} n^2 K[n-1] cos(n theta[i])   (tangent coefficient)
void force_eval(const double* theta, std::size_t m, const double* K, int ncut,
                double* f, double* df = nullptr);
// kick + drift with precomputed forces: p += f; theta = wrap(theta + p)
void kick_drift(double* theta, double* p, const double* f, std::size_t m);

double wrap_angle(double a);         // into [0, 2pi)
double wrap_angle_pm(double a);      // into [-pi, pi)

// counter-based Gaussian pairs: value depends only on (seed, idx), never on
// evaluation order, so sampling is reproducible under any parallel schedule
struct GaussPair {
  double z0, z1;
};
GaussPair gauss_pair(std::uint64_t seed, std::uint64_t idx);

namespace ref {
double block_sum(const double* x, std::size_t n);
double sum_abs2(const cplx* x, std::size_t n);
double sum_abs2_weighted(const cplx* x, const double* w, std::size_t n);
cplx inner(const cplx* a, const cplx* b, std::size_t n);
void phase_multiply(cplx* x, const cplx* phase, std::size_t n);
void density_phase(cplx* x, std::size_t n, double coef);
void force_eval(const double* theta, std::size_t m, const double* K, int ncut,
                double* f, double* df = nullptr);
void kick_drift(double* theta, double* p, const double* f, std::size_t m);
}  // namespace ref

}  // namespace otoclab::kernels

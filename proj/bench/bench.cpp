// Micro-benchmark of the parallel kernels against their serial reference
// twins. Not a test: it prints a table of timings and the relative spread of
// the two routes' results, so kernel changes can be sanity-checked by eye.
//
//   usage: otoclab_bench [size] [reps]
//
// Respects OTOCLAB_THREADS for the parallel column.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "otoclab/kernels.hpp"

using otoclab::kernels::cplx;
namespace k = otoclab::kernels;

namespace {

double now() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <typename F>
double time_best(int reps, F&& body) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const double t0 = now();
    body();
    best = std::min(best, now() - t0);
  }
  return best;
}

void row(const char* name, double serial, double parallel, double dev) {
  std::printf("%-18s %10.3f ms %10.3f ms %8.2fx   %.1e\n", name, 1e3 * serial,
              1e3 * parallel, serial / parallel, dev);
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : (1u << 20);
  const int reps = argc > 2 ? std::atoi(argv[2]) : 7;
  const int threads = k::threads_from_env() > 0 ? k::threads_from_env() : k::max_threads();
  k::set_threads(threads);
  std::printf("kernels: n = %zu, reps = %d, threads = %d\n", n, reps, threads);
  std::printf("%-18s %13s %13s %9s   %s\n", "kernel", "serial", "parallel", "speedup",
              "route dev");

  std::vector<cplx> a(n), b(n);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto g = k::gauss_pair(42, i);
    a[i] = cplx{g.z0, g.z1};
    b[i] = cplx{g.z1, -g.z0};
    w[i] = 1.0 + 0.5 * g.z0;
  }

  {
    double s = 0.0, p = 0.0;
    const double ts = time_best(reps, [&] { s = k::ref::sum_abs2(a.data(), n); });
    const double tp = time_best(reps, [&] { p = k::sum_abs2(a.data(), n); });
    row("sum_abs2", ts, tp, std::abs(s - p) / std::abs(s));
  }
  {
    double s = 0.0, p = 0.0;
    const double ts = time_best(reps, [&] { s = k::ref::sum_abs2_weighted(a.data(), w.data(), n); });
    const double tp = time_best(reps, [&] { p = k::sum_abs2_weighted(a.data(), w.data(), n); });
    row("sum_abs2_weighted", ts, tp, std::abs(s - p) / std::abs(s));
  }
  {
    cplx s{}, p{};
    const double ts = time_best(reps, [&] { s = k::ref::inner(a.data(), b.data(), n); });
    const double tp = time_best(reps, [&] { p = k::inner(a.data(), b.data(), n); });
    row("inner", ts, tp, std::abs(s - p) / std::abs(s));
  }
  {
    auto xs = a, xp = a;
    const double ts = time_best(reps, [&] { k::ref::phase_multiply(xs.data(), b.data(), n); });
    const double tp = time_best(reps, [&] { k::phase_multiply(xp.data(), b.data(), n); });
    double dev = 0.0;
    for (std::size_t i = 0; i < n; ++i) dev = std::max(dev, std::abs(xs[i] - xp[i]));
    row("phase_multiply", ts, tp, dev);
  }
  {
    auto xs = a, xp = a;
    const double ts = time_best(reps, [&] { k::ref::density_phase(xs.data(), n, -0.7); });
    const double tp = time_best(reps, [&] { k::density_phase(xp.data(), n, -0.7); });
    double dev = 0.0;
    for (std::size_t i = 0; i < n; ++i) dev = std::max(dev, std::abs(xs[i] - xp[i]));
    row("density_phase", ts, tp, dev);
  }
  {
    const std::size_t m = std::min<std::size_t>(n, 1u << 16);
    const int ncut = 512;
    std::vector<double> theta(m), K(static_cast<std::size_t>(ncut));
    for (std::size_t i = 0; i < m; ++i) theta[i] = k::wrap_angle(7.1 * static_cast<double>(i));
    for (int i = 0; i < ncut; ++i)
      K[static_cast<std::size_t>(i)] = std::exp(-0.01 * i) / (1.0 + i);
    std::vector<double> fs(m), fp(m), dfs(m), dfp(m);
    const double ts = time_best(
        reps, [&] { k::ref::force_eval(theta.data(), m, K.data(), ncut, fs.data(), dfs.data()); });
    const double tp = time_best(
        reps, [&] { k::force_eval(theta.data(), m, K.data(), ncut, fp.data(), dfp.data()); });
    double dev = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      dev = std::max({dev, std::abs(fs[i] - fp[i]), std::abs(dfs[i] - dfp[i])});
    char label[64];
    std::snprintf(label, sizeof label, "force_eval %dx%zu", ncut, m);
    row(label, ts, tp, dev);
  }
  return 0;
}

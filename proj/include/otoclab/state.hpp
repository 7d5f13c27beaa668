#pragma once
// Quantum state on the ring: truncated angular-momentum basis |phi_n> with
// p|phi_n> = n hbar |phi_n>, n in {-N/2, ..., N/2-1}, dual angle grid
// theta_j = 2 pi j / N. Operations are pure functions returning new values.
//
// Conventions:
//   psi(theta_j) = sum_n psi_n exp(i n theta_j) / sqrt(2 pi)
//   momentum norm  sum_n |psi_n|^2  ==  angle norm  sum_j |u_j|^2 dtheta
// Two angle branches coexist deliberately: the Gaussian packet is built on
// [-pi, pi) (centered at 0), while the theta operator and its second moment
// use [0, 2 pi) to match the matrix elements
// <n|theta|m> = pi (m = n), 1/(i(m-n)) otherwise.

#include <complex>
#include <vector>

namespace otoclab::core {

using cplx = std::complex<double>;

struct GridSpec {
  int N = 1024;
  double hbar = 0.6;

  void validate() const;  // throws std::invalid_argument naming the violated rule
  double dtheta() const;
  double theta(int j) const;  // grid point in [0, 2 pi)
  int nmin() const { return -N / 2; }
  int nmax() const { return N / 2 - 1; }
};

// Amplitudes are stored in FFT frequency order (n >= 0 first, then negative)
// so transforms need no reshuffle; go through amp()/set_amp for signed access.
struct QuantumState {
  GridSpec grid;
  std::vector<cplx> a;

  QuantumState() = default;
  explicit QuantumState(GridSpec g) : grid(g), a(static_cast<std::size_t>(g.N)) {}

  int idx(int n) const { return n >= 0 ? n : n + grid.N; }
  cplx amp(int n) const { return a[static_cast<std::size_t>(idx(n))]; }
  void set_amp(int n, cplx v) { a[static_cast<std::size_t>(idx(n))] = v; }
};

struct Distribution {
  enum class Kind { Momentum, Angle };
  Kind kind = Kind::Momentum;
  GridSpec grid;
  // Momentum: signed order, values[i] for n = i - N/2. Angle: grid order j.
  std::vector<double> values;

  double at_mode(int n) const { return values[static_cast<std::size_t>(n + grid.N / 2)]; }
};

// Gaussian packet (sigma/pi)^{1/4} exp(-sigma theta^2 / 2) on [-pi, pi),
// periodized over images k in [-3, 3], then renormalized to exactly 1.
// Rejects sigma so small that the dropped images carry > 1e-8 of the norm.
QuantumState make_gaussian_state(double sigma, GridSpec grid);

double norm(const QuantumState& s);                 // sum |psi_n|^2
double mean_energy(const QuantumState& s);          // sum (n hbar)^2 |psi_n|^2, unnormalized
double theta_second_moment(const QuantumState& s);  // ||theta psi||^2 of the truncated operator

QuantumState apply_p(const QuantumState& s);      // psi_n -> n hbar psi_n
QuantumState apply_theta(const QuantumState& s);  // exact truncated-matrix action (see .cpp)

Distribution momentum_distribution(const QuantumState& s);
Distribution angle_distribution(const QuantumState& s);

std::vector<cplx> to_angle_grid(const QuantumState& s);
QuantumState from_angle_grid(GridSpec grid, const std::vector<cplx>& u);
cplx inner(const QuantumState& a, const QuantumState& b);

}  // namespace otoclab::core

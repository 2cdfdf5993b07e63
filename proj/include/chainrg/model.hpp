#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace chainrg {

using cplx = std::complex<double>;

// Even pair potential stored for x = 0, 1, ..., range; v(-x) = v(x).
struct Potential {
  std::vector<double> values{0.0, 0.5};

  double operator()(int x) const {
    const auto a = static_cast<std::size_t>(x < 0 ? -x : x);
    return a < values.size() ? values[a] : 0.0;
  }
  int range() const { return static_cast<int>(values.size()) - 1; }
};

struct ModelParams {
  double lambda = 0.0;
  double r = 0.25;
  double gamma = 2.0;
  int L = 10;
  double beta = 20.0;
  int M = 8;
  Potential potential;

  // Fermionic chemical potential term h in the Hamiltonian.
  double h() const { return -1.0 + r; }
  void validate() const;
};

class NoFermiPoint : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct FermiData {
  double pF;
  double vF;
};

struct Momentum {
  double k0;
  double k;
};

double dispersion(double k, double r);
FermiData fermi_data(double r);
double potential_fourier(const Potential& v, double k);

// 1/(-i k0 + cos k + h).
cplx free_propagator_momentum(Momentum kk, double r);

// Fermionic Matsubara frequencies (2pi/beta)(n + 1/2), n = -nmax..nmax-1.
std::vector<double> matsubara_grid(double beta, int nmax);
// Lattice momenta 2 pi m / L folded into [-pi, pi).
std::vector<double> momentum_grid(int L);

// Time-ordered free two-point function at (x0, x) from the closed-form k-sum.
// x0 is reduced into (-beta, beta] by antiperiodicity; x0 = 0 gives the
// average of the two one-sided limits.
double free_schwinger_time(double x0, int x, double r, int L, double beta);

// Same quantity from the Matsubara representation
// S(x) = -(1/(beta L)) sum_k e^{i(k0 x0 + k x)} Shat(k), summed frequency by
// frequency with the analytic large-frequency tail restored.
double free_schwinger_matsubara(double x0, int x, double r, int L, double beta, int nmax = 4096);

// Ground-state equal-time correlator <a+_x a-_0> on the infinite chain.
double ground_state_density_matrix(int x, double r);

// Solves (1+alpha) cos pF = (1+alpha) - r - gamma^hstar mu + gamma^hstar nu.
double solve_interacting_pf(double lambda, double r, double alpha, double mu, double nu,
                            double gamma, int hstar);

}  // namespace chainrg

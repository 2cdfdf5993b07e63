#include "chainrg/model.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <numbers>
#include <string>

#include "chainrg/kernels.hpp"

namespace chainrg {

using std::numbers::pi;

void ModelParams::validate() const {
  if (!(gamma > 1.0 && gamma <= 2.0)) throw std::invalid_argument("gamma must lie in (1, 2]");
  if (L <= 0) throw std::invalid_argument("L must be positive");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (M <= 0) throw std::invalid_argument("M must be positive");
  if (potential.values.empty()) throw std::invalid_argument("potential must have at least v(0)");
}

double dispersion(double k, double r) { return -std::cos(k) - (-1.0 + r); }

FermiData fermi_data(double r) {
  if (!(r > 0.0 && r < 2.0)) throw NoFermiPoint("no Fermi point for r = " + std::to_string(r));
  const double pF = std::acos(1.0 - r);
  return {pF, std::sqrt(2.0 * r - r * r)};
}

double potential_fourier(const Potential& v, double k) {
  double s = v(0);
  for (int x = 1; x <= v.range(); ++x) s += 2.0 * v(x) * std::cos(k * x);
  return s;
}

cplx free_propagator_momentum(Momentum kk, double r) {
  return 1.0 / cplx(std::cos(kk.k) + (-1.0 + r), -kk.k0);
}

std::vector<double> matsubara_grid(double beta, int nmax) {
  std::vector<double> w;
  w.reserve(2 * nmax);
  for (int n = -nmax; n < nmax; ++n) w.push_back(2.0 * pi / beta * (n + 0.5));
  return w;
}

std::vector<double> momentum_grid(int L) {
  std::vector<double> k;
  k.reserve(L);
  for (int m = 0; m < L; ++m) {
    int mm = m;
    if (2 * mm >= L) mm -= L;
    k.push_back(2.0 * pi * mm / L);
  }
  return k;
}

namespace {

// e^{-t e}/(1 + e^{-beta e}) for 0 <= t <= beta without overflow.
double thermal_factor(double t, double e, double beta) {
  if (e >= 0.0) return std::exp(-t * e) / (1.0 + std::exp(-beta * e));
  return std::exp((beta - t) * e) / (std::exp(beta * e) + 1.0);
}

// Reduces x0 into (-beta, beta]; returns the sign picked up.
double reduce_time(double& x0, double beta) {
  double sign = 1.0;
  while (x0 > beta) {
    x0 -= beta;
    sign = -sign;
  }
  while (x0 <= -beta) {
    x0 += beta;
    sign = -sign;
  }
  return sign;
}

std::vector<double> cos_row(int x, int L) {
  std::vector<double> c(L);
  const auto ks = momentum_grid(L);
  for (int m = 0; m < L; ++m) c[m] = std::cos(ks[m] * x);
  return c;
}

}  // namespace

double free_schwinger_time(double x0, int x, double r, int L, double beta) {
  const double sign = reduce_time(x0, beta);
  const auto ks = momentum_grid(L);
  const auto c = cos_row(x, L);
  std::vector<double> f(L);
  for (int m = 0; m < L; ++m) {
    const double e = dispersion(ks[m], r);
    if (x0 > 0.0)
      f[m] = thermal_factor(x0, e, beta);
    else if (x0 < 0.0)
      f[m] = -thermal_factor(beta + x0, e, beta);
    else
      f[m] = 0.5 * (thermal_factor(0.0, e, beta) - thermal_factor(beta, e, beta));
  }
  return sign * kernels::dot(c.data(), f.data(), L) / L;
}

namespace {

// (1/beta) sum_n e^{i w_n t} / (i w_n + e) for 0 <= t < beta; at t = 0 the
// symmetric limit. The terms through (i w)^-4 are summed in closed form via
// Euler polynomials, the remainder frequency by frequency.
double matsubara_one_mode(double t, double e, double beta, int nmax, bool symmetric) {
  const auto w = matsubara_grid(beta, nmax);
  const std::size_t n = w.size();
  std::vector<double> pr(n), pi_(n), rr(n), ri(n);
  const double e4 = e * e * e * e;
  for (std::size_t j = 0; j < n; ++j) {
    pr[j] = std::cos(w[j] * t);
    pi_[j] = std::sin(w[j] * t);
    const cplx iw(0.0, w[j]);
    const cplx rem = e4 / (iw * iw * iw * iw * (iw + e));
    rr[j] = rem.real();
    ri[j] = rem.imag();
  }
  const double R = kernels::cdot(pr.data(), pi_.data(), rr.data(), ri.data(), n).real() / beta;
  auto tail = [&](double x) {
    const double be = beta * e;
    const double E1 = x - 0.5, E2 = x * x - x, E3 = x * x * x - 1.5 * x * x + 0.25;
    return 0.5 * (1.0 + E1 * be + E2 * be * be / 2.0 + E3 * be * be * be / 6.0);
  };
  if (symmetric) return R + 0.5 * (tail(1.0) - tail(0.0));
  return R + tail(1.0 - t / beta);
}

}  // namespace

double free_schwinger_matsubara(double x0, int x, double r, int L, double beta, int nmax) {
  double sign = reduce_time(x0, beta);
  const bool symmetric = (x0 == 0.0);
  if (x0 < 0.0) {
    x0 += beta;
    sign = -sign;
  }
  const auto ks = momentum_grid(L);
  const auto c = cos_row(x, L);
  std::vector<double> f(L);
  for (int m = 0; m < L; ++m)
    f[m] = matsubara_one_mode(x0, dispersion(ks[m], r), beta, nmax, symmetric);
  return sign * kernels::dot(c.data(), f.data(), L) / L;
}

double ground_state_density_matrix(int x, double r) {
  if (r <= 0.0) return 0.0;
  if (r >= 2.0) return x == 0 ? 1.0 : 0.0;
  const double pF = std::acos(1.0 - r);
  if (x == 0) return pF / pi;
  return std::sin(pF * x) / (pi * x);
}

double solve_interacting_pf(double /*lambda*/, double r, double alpha, double mu, double nu,
                            double gamma, int hstar) {
  const double scale = std::pow(gamma, hstar);
  const double rhs = (1.0 + alpha) - r - scale * mu + scale * nu;
  const double c = rhs / (1.0 + alpha);
  if (!(c > -1.0 && c < 1.0)) throw NoFermiPoint("no metallic solution for the Fermi momentum");
  auto f = [&](double p) { return (1.0 + alpha) * std::cos(p) - rhs; };
  boost::uintmax_t iters = 200;
  auto tol = [](double a, double b) { return std::fabs(b - a) <= 1e-13 * std::fabs(a + b); };
  const auto [lo, hi] = boost::math::tools::toms748_solve(f, 0.0, pi, tol, iters);
  return 0.5 * (lo + hi);
}

}  // namespace chainrg

#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <stdexcept>
#include <vector>

#include "chainrg/model.hpp"
#include "chainrg/scale.hpp"
#include "chainrg/torus.hpp"

namespace chainrg {

class DiagramError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Perturbation theory on a finite index set. g_ab = <psi^-_a psi^+_b>, the
// Grassmann weight is e^U with U = (1/2) sum_{a != b} V_ab n_a n_b and
// n = psi^+ psi^-. The self-energy Sigma is defined by G = g + g Sigma g + ...
Eigen::MatrixXd hartree_fock_self_energy(const Eigen::MatrixXd& g, const Eigen::MatrixXd& V);
Eigen::MatrixXd sunset_self_energy(const Eigen::MatrixXd& g, const Eigen::MatrixXd& V);
// <psi^-_a psi^+_b> through second order in V.
Eigen::MatrixXd interacting_propagator_order2(const Eigen::MatrixXd& g, const Eigen::MatrixXd& V);

// First-order kernel 2 lambda [vhat(0) rho(0) - sum_z v(z) e^{-ikz} rho(z)] from
// equal-time values rho(z) = rho(-z), z = 0..range of v.
cplx first_order_kernel(double lambda, const Potential& v, const std::vector<double>& rho, Momentum kk);

// -Sigma_sun(X) on a unit-spacing torus for the pair potential 2 lambda v with
// equal-time vertices; g is the antiperiodic position-space covariance.
TorusField sunset_kernel_r1(const TorusField& g, const Potential& v, double lambda);

struct DiagramOptions {
  int window = 4;             // scales above the integrated one that enter a second-order kernel
  double time_factor = 40.0;  // torus time length in units of gamma^{-h}/a0
  double space_factor = 160.0; // torus length in units of the scale-h decay length
  double step = 1e-2;         // stencil step in units of gamma^h a0 (divided by vF in regime 2)
  int order = 2;
};

// Sampling grid: n0 times over a torus of length beta and n1 sites spaced by
// `spacing` lattice units.
struct DiagramGrid {
  double beta = 1.0;
  int n0 = 0;
  int n1 = 0;
  int spacing = 1;
};

// Kernel values on the stencil k0 = j dk0 (k = 0) and k = j dk (k0 = 0),
// j = -2..2, momenta measured from 0 (regime 1) or from pF (regime 2).
struct SecondOrderKernel {
  int h = 0;
  Regime regime = Regime::One;
  double dk0 = 0.0;
  double dk = 0.0;
  std::array<cplx, 5> time{};
  std::array<cplx, 5> space{};
  DiagramGrid grid;

  cplx value() const { return time[2]; }
  // Five-point central differences.
  cplx d0() const;
  cplx d1() const;
  cplx d11() const;
  // Three-point second difference, for the stencil coarseness check.
  cplx d11_coarse() const;
};

struct Folded;

// Quadratic kernel generated by integrating regime-1 scale h at first and
// second order in lambda: the tadpole/exchange graph on g^{(h)} and the
// sunset increment carrying at least one line on h and the others on
// h+1..min(h+window, 0). Kernel convention: the inverse two-point function
// is shifted by +K, so the local parts add directly to (mu, z, alpha).
class KernelR1 {
 public:
  KernelR1(int h, const ScaleContext& ctx, double lambda, const Potential& v, const DiagramOptions& opt = {});

  int scale() const { return h_; }
  cplx operator()(Momentum kk) const { return first_order(kk) + second_order(kk); }
  cplx first_order(Momentum kk) const;
  cplx second_order(Momentum kk) const;
  SecondOrderKernel stencil() const;
  const DiagramGrid& grid() const { return grid_; }
  // Equal-time single-scale propagator g^{(h)}(0, x) for |x| <= range of v.
  const std::vector<double>& equal_time() const { return equal_time_; }

 private:
  int h_;
  double gamma_, a0_, lambda_;
  Potential v_;
  double step_;
  DiagramGrid grid_;
  std::vector<double> equal_time_;
  std::shared_ptr<const Folded> sunset_;  // position-space sunset, time folded to (-beta/2, beta/2]
};

// First-order kernel of everything above scale 0, built from the equal-time
// ground-state density rho(x) minus the equal-time cumulative propagator on
// scales <= 0.
class UltravioletKernel {
 public:
  UltravioletKernel(const ScaleContext& ctx, double lambda, const Potential& v, const QuadratureOptions& opt = {});
  cplx operator()(Momentum kk) const;
  SecondOrderKernel stencil(double step) const;
  const std::vector<double>& density() const { return rho_uv_; }

 private:
  double lambda_;
  Potential v_;
  std::vector<double> rho_uv_;
};

// Local coefficients: K(0), the coefficient of -i k0 and of (cos k - 1).
struct LocalParts {
  double value = 0.0;
  double z = 0.0;
  double alpha = 0.0;
};

// Refuses when the five- and three-point second differences disagree by more
// than `tolerance` relative to their size (stencil too coarse).
LocalParts localize_r1(const SecondOrderKernel& kernel, double tolerance = 1e-3);

// Kernel of the lambda_h n_+ n_- interaction between the two quasi-particle
// species, stripped of Fermi phases, for species omega = +1 (the -1 species
// follows from x -> -x). Everything is coupling independent:
//   tadpole          g_-^{(h)}(0, 0)
//   nu_insertion     sum of g_- g_- over the window (graph with a mass insertion)
//   delta_insertion  same with the relative momentum k' inserted
//   bubble           sum_X g_+(X) [g_-(X) + g_-(-X)]
//   sunset           sum_X e^{-ikX} g_+(X) g_-(X) g_-(-X)
// Products carry at least one line on h and the others on h+1..min(h+window, h*).
struct QpDiagrams {
  int h = 0;
  double tadpole = 0.0;
  double nu_insertion = 0.0;
  double delta_insertion = 0.0;
  double bubble = 0.0;
  SecondOrderKernel sunset;
  DiagramGrid grid;
};

QpDiagrams qp_diagrams(int h, const Regime2Frame& fr, const DiagramOptions& opt = {}, bool luttinger_only = false);

}  // namespace chainrg

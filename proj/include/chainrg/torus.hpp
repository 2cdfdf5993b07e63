#pragma once

#include <vector>

#include "chainrg/model.hpp"

namespace chainrg {

// Complex field on an n0 x n1 torus, stored row-major with rows indexed by
// time (or fermionic frequency) and columns by site (or lattice momentum).
// Frequency row n represents k0 = (2 pi / beta)(n' + 1/2) with n' = n for
// n < n0/2 and n - n0 otherwise; column m represents k = 2 pi m' / n1 with the
// same folding. Position row a is the time a * beta / n0 and column x the site.
struct TorusField {
  double beta = 1.0;
  int n0 = 0;
  int n1 = 0;
  std::vector<cplx> data;

  TorusField() = default;
  TorusField(double beta_, int n0_, int n1_) : beta(beta_), n0(n0_), n1(n1_), data(std::size_t(n0_) * n1_) {}

  cplx& operator()(int a, int b) { return data[std::size_t(a) * n1 + b]; }
  const cplx& operator()(int a, int b) const { return data[std::size_t(a) * n1 + b]; }

  double k0(int n) const;
  double k(int m) const;
  double time(int a) const { return a * beta / n0; }
  int folded_site(int x) const { return 2 * x >= n1 ? x - n1 : x; }
};

// g(tau_a, x) = (1/(beta n1)) sum_{k0,k} e^{i(k0 tau_a + k x)} F(k0, k).
TorusField momentum_to_position(const TorusField& mom);
// F(k0, k) = (beta/n0) sum_{a,x} e^{-i(k0 tau_a + k x)} g(tau_a, x).
TorusField position_to_momentum(const TorusField& pos);

// Value of an antiperiodic-in-time field at a grid time index that may be
// negative or exceed n0 (antiperiodicity in tau, periodicity in x).
cplx antiperiodic_at(const TorusField& pos, int a, int x);

// Direct evaluation of (1/(beta n1)) sum e^{i(k0 x0 + k x)} F at an arbitrary
// point; x may be non-integer (continuum interpolation of the lattice sum).
cplx evaluate_position(const TorusField& mom, double x0, double x);

}  // namespace chainrg

namespace chainrg {

// Momentum samples on an n0 x n1 torus keeping only columns (lattice momenta)
// where the function can be nonzero. Column c holds k-index cols[c] and its
// n0 frequency values at values[c * n0 + n].
struct SparseMomentum {
  double beta = 1.0;
  int n0 = 0;
  int n1 = 0;
  std::vector<int> cols;
  std::vector<cplx> values;

  double k0(int n) const;
  double k(int m) const;
};

template <class Fn, class Pred>
SparseMomentum sample_momentum(double beta, int n0, int n1, Fn&& fn, Pred&& column_may_be_nonzero) {
  SparseMomentum s;
  s.beta = beta;
  s.n0 = n0;
  s.n1 = n1;
  for (int m = 0; m < n1; ++m) {
    const double k = s.k(m);
    if (!column_may_be_nonzero(k)) continue;
    s.cols.push_back(m);
    for (int n = 0; n < n0; ++n) s.values.push_back(fn(Momentum{s.k0(n), k}));
  }
  return s;
}

cplx evaluate_position(const SparseMomentum& mom, double x0, double x);

// Position values on all n0 times and the sites |x| <= xhalf.
struct PositionWindow {
  double beta = 1.0;
  int n0 = 0;
  int xhalf = 0;
  std::vector<cplx> data;

  cplx& operator()(int a, int x) { return data[std::size_t(a) * (2 * xhalf + 1) + (x + xhalf)]; }
  const cplx& operator()(int a, int x) const { return data[std::size_t(a) * (2 * xhalf + 1) + (x + xhalf)]; }
  double time(int a) const { return a * beta / n0; }
  double sup_norm() const;
};

PositionWindow sparse_to_window(const SparseMomentum& mom, int xhalf);

}  // namespace chainrg

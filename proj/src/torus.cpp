#include "chainrg/torus.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "chainrg/kernels.hpp"

namespace chainrg {

using std::numbers::pi;

double TorusField::k0(int n) const {
  const int nn = 2 * n >= n0 ? n - n0 : n;
  return 2.0 * pi / beta * (nn + 0.5);
}

double TorusField::k(int m) const {
  const int mm = 2 * m >= n1 ? m - n1 : m;
  return 2.0 * pi * mm / n1;
}

namespace {

void fft2(std::vector<cplx>& v, int n0, int n1, int sign) {
  auto* p = reinterpret_cast<fftw_complex*>(v.data());
  fftw_plan plan = fftw_plan_dft_2d(n0, n1, p, p, sign, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
}

}  // namespace

TorusField momentum_to_position(const TorusField& mom) {
  TorusField out = mom;
  fft2(out.data, out.n0, out.n1, FFTW_BACKWARD);
  const double norm = 1.0 / (mom.beta * mom.n1);
  for (int a = 0; a < out.n0; ++a) {
    const cplx tw = std::polar(norm, pi * a / out.n0);
    for (int x = 0; x < out.n1; ++x) out(a, x) *= tw;
  }
  return out;
}

TorusField position_to_momentum(const TorusField& pos) {
  TorusField out = pos;
  const double norm = pos.beta / pos.n0;
  for (int a = 0; a < out.n0; ++a) {
    const cplx tw = std::polar(norm, -pi * a / out.n0);
    for (int x = 0; x < out.n1; ++x) out(a, x) *= tw;
  }
  fft2(out.data, out.n0, out.n1, FFTW_FORWARD);
  return out;
}

cplx antiperiodic_at(const TorusField& pos, int a, int x) {
  double sign = 1.0;
  while (a < 0) {
    a += pos.n0;
    sign = -sign;
  }
  while (a >= pos.n0) {
    a -= pos.n0;
    sign = -sign;
  }
  x %= pos.n1;
  if (x < 0) x += pos.n1;
  return sign * pos(a, x);
}

cplx evaluate_position(const TorusField& mom, double x0, double x) {
  std::vector<double> fr, fi, er, ei;
  fr.reserve(mom.data.size());
  fi.reserve(mom.data.size());
  er.reserve(mom.data.size());
  ei.reserve(mom.data.size());
  for (int n = 0; n < mom.n0; ++n) {
    const double p0 = mom.k0(n) * x0;
    for (int m = 0; m < mom.n1; ++m) {
      const cplx f = mom(n, m);
      if (f == cplx(0.0)) continue;
      const double ph = p0 + mom.k(m) * x;
      fr.push_back(f.real());
      fi.push_back(f.imag());
      er.push_back(std::cos(ph));
      ei.push_back(std::sin(ph));
    }
  }
  return kernels::cdot(er.data(), ei.data(), fr.data(), fi.data(), fr.size()) / (mom.beta * mom.n1);
}

}  // namespace chainrg

namespace chainrg {

double SparseMomentum::k0(int n) const {
  const int nn = 2 * n >= n0 ? n - n0 : n;
  return 2.0 * pi / beta * (nn + 0.5);
}

double SparseMomentum::k(int m) const {
  const int mm = 2 * m >= n1 ? m - n1 : m;
  return 2.0 * pi * mm / n1;
}

cplx evaluate_position(const SparseMomentum& mom, double x0, double x) {
  std::vector<double> tr(mom.n0), ti(mom.n0);
  for (int n = 0; n < mom.n0; ++n) {
    tr[n] = std::cos(mom.k0(n) * x0);
    ti[n] = std::sin(mom.k0(n) * x0);
  }
  const std::size_t nc = mom.cols.size();
  std::vector<double> cr(nc), ci(nc), pr(nc), pi_(nc), vr(mom.n0), vi(mom.n0);
  for (std::size_t c = 0; c < nc; ++c) {
    const cplx* col = mom.values.data() + c * mom.n0;
    for (int n = 0; n < mom.n0; ++n) {
      vr[n] = col[n].real();
      vi[n] = col[n].imag();
    }
    const cplx s = kernels::cdot(tr.data(), ti.data(), vr.data(), vi.data(), mom.n0);
    cr[c] = s.real();
    ci[c] = s.imag();
    const double ph = mom.k(mom.cols[c]) * x;
    pr[c] = std::cos(ph);
    pi_[c] = std::sin(ph);
  }
  return kernels::cdot(pr.data(), pi_.data(), cr.data(), ci.data(), nc) / (mom.beta * mom.n1);
}

double PositionWindow::sup_norm() const {
  double s = 0.0;
  for (const auto& v : data) s = std::max(s, std::abs(v));
  return s;
}

PositionWindow sparse_to_window(const SparseMomentum& mom, int xhalf) {
  xhalf = std::min(xhalf, (mom.n1 - 1) / 2);
  const std::size_t nc = mom.cols.size();
  // Frequency to time along each stored column.
  std::vector<cplx> cols(mom.values);
  {
    std::vector<cplx> buf(mom.n0);
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_plan plan = fftw_plan_dft_1d(mom.n0, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
    for (std::size_t c = 0; c < nc; ++c) {
      std::copy_n(cols.begin() + c * mom.n0, mom.n0, buf.begin());
      fftw_execute(plan);
      std::copy_n(buf.begin(), mom.n0, cols.begin() + c * mom.n0);
    }
    fftw_destroy_plan(plan);
  }
  PositionWindow w;
  w.beta = mom.beta;
  w.n0 = mom.n0;
  w.xhalf = xhalf;
  w.data.assign(std::size_t(mom.n0) * (2 * xhalf + 1), 0.0);
  std::vector<cplx> row(mom.n1);
  auto* p = reinterpret_cast<fftw_complex*>(row.data());
  fftw_plan plan = fftw_plan_dft_1d(mom.n1, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
  const double norm = 1.0 / (mom.beta * mom.n1);
  for (int a = 0; a < mom.n0; ++a) {
    std::fill(row.begin(), row.end(), cplx(0.0));
    for (std::size_t c = 0; c < nc; ++c) row[mom.cols[c]] = cols[c * mom.n0 + a];
    fftw_execute(plan);
    const cplx tw = std::polar(norm, pi * a / mom.n0);
    for (int x = -xhalf; x <= xhalf; ++x) w(a, x) = tw * row[x < 0 ? x + mom.n1 : x];
  }
  fftw_destroy_plan(plan);
  return w;
}

}  // namespace chainrg

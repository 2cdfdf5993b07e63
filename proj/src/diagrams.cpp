#include "chainrg/diagrams.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "chainrg/kernels.hpp"
#include "chainrg/torus.hpp"

namespace chainrg {

using std::numbers::pi;

Eigen::MatrixXd hartree_fock_self_energy(const Eigen::MatrixXd& g, const Eigen::MatrixXd& V) {
  const Eigen::Index n = g.rows();
  Eigen::MatrixXd s = V.cwiseProduct(g);
  for (Eigen::Index a = 0; a < n; ++a) s(a, a) -= V.row(a).dot(g.diagonal());
  return s;
}

Eigen::MatrixXd sunset_self_energy(const Eigen::MatrixXd& g, const Eigen::MatrixXd& V) {
  const Eigen::Index n = g.rows();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      double t = 0.0;
      for (Eigen::Index c = 0; c < n; ++c) {
        if (V(a, c) == 0.0) continue;
        for (Eigen::Index e = 0; e < n; ++e)
          t += V(a, c) * V(b, e) * (-g(a, b) * g(c, e) * g(e, c) + g(a, e) * g(e, c) * g(c, b));
      }
      s(a, b) = t;
    }
  return s;
}

Eigen::MatrixXd interacting_propagator_order2(const Eigen::MatrixXd& g, const Eigen::MatrixXd& V) {
  const Eigen::MatrixXd s1 = hartree_fock_self_energy(g, V);
  const Eigen::MatrixXd g1 = g * s1 * g;
  const Eigen::MatrixXd s2 = sunset_self_energy(g, V) + hartree_fock_self_energy(g1, V);
  return g + g1 + g1 * s1 * g + g * s2 * g;
}

cplx SecondOrderKernel::d0() const {
  return (time[0] - 8.0 * time[1] + 8.0 * time[3] - time[4]) / (12.0 * dk0);
}

cplx SecondOrderKernel::d1() const {
  return (space[0] - 8.0 * space[1] + 8.0 * space[3] - space[4]) / (12.0 * dk);
}

cplx SecondOrderKernel::d11() const {
  return (-space[0] + 16.0 * space[1] - 30.0 * space[2] + 16.0 * space[3] - space[4]) / (12.0 * dk * dk);
}

cplx SecondOrderKernel::d11_coarse() const { return (space[1] - 2.0 * space[2] + space[3]) / (dk * dk); }

namespace {

using MomentumFn = std::function<cplx(Momentum)>;

// Momentum samples of fn at fermionic frequencies and relative momenta
// 2 pi m / (n1 spacing).
TorusField sample_grid(const DiagramGrid& gr, const MomentumFn& fn) {
  TorusField mom(gr.beta, gr.n0, gr.n1);
  for (int n = 0; n < gr.n0; ++n)
    for (int m = 0; m < gr.n1; ++m) mom(n, m) = fn(Momentum{mom.k0(n), mom.k(m) / gr.spacing});
  return mom;
}

// Position values g(tau_a, j spacing) of the lattice function whose
// momentum samples are given.
TorusField to_position(const TorusField& mom, int spacing) {
  TorusField pos = momentum_to_position(mom);
  for (auto& c : pos.data) c /= spacing;
  return pos;
}

// Value at (-tau_a, -j) by antiperiodicity in time.
inline cplx reflected(const TorusField& g, int a, int x) {
  const int xm = x == 0 ? 0 : g.n1 - x;
  return a == 0 ? g(0, xm) : -g(g.n0 - a, xm);
}

inline cplx shifted(const TorusField& g, int a, int x, int dx) {
  int y = (x + dx) % g.n1;
  if (y < 0) y += g.n1;
  return g(a, y);
}

inline cplx reflected_shifted(const TorusField& g, int a, int x, int dx) {
  int y = (x + dx) % g.n1;
  if (y < 0) y += g.n1;
  return reflected(g, a, y);
}

}  // namespace

TorusField sunset_kernel_r1(const TorusField& g, const Potential& v, double lambda) {
  TorusField out(g.beta, g.n0, g.n1);
  const int R = v.range();
  const double c = 4.0 * lambda * lambda;
  for (int z1 = -R; z1 <= R; ++z1) {
    if (v(z1) == 0.0) continue;
    for (int z2 = -R; z2 <= R; ++z2) {
      if (v(z2) == 0.0) continue;
      const double w = c * v(z1) * v(z2);
      for (int a = 0; a < g.n0; ++a)
        for (int x = 0; x < g.n1; ++x) {
          const cplx direct = g(a, x) * shifted(g, a, x, z1 - z2) * reflected_shifted(g, a, x, z1 - z2);
          const cplx exchange =
              shifted(g, a, x, -z2) * reflected_shifted(g, a, x, z1 - z2) * shifted(g, a, x, z1);
          out(a, x) += w * (direct - exchange);
        }
    }
  }
  return out;
}

cplx first_order_kernel(double lambda, const Potential& v, const std::vector<double>& rho, Momentum kk) {
  double s = potential_fourier(v, 0.0) * rho[0];
  cplx ex = 0.0;
  for (int z = -v.range(); z <= v.range(); ++z)
    if (v(z) != 0.0) ex += v(z) * std::polar(1.0, -kk.k * z) * rho[std::abs(z)];
  return 2.0 * lambda * (s - ex);
}

// Folded representation for sum_X e^{-i k X} F(X) with X over Z x R.
struct Folded {
  std::vector<double> times;  // folded tau per row
  std::vector<double> sites;  // folded x per column, in lattice units
  std::vector<double> re, im; // weighted values, row-major
  int n0 = 0, n1 = 0;
};

namespace {

Folded fold(const TorusField& f, int spacing) {
  Folded out;
  out.n0 = f.n0;
  out.n1 = f.n1;
  const double w = f.beta / f.n0 * spacing;
  out.times.resize(f.n0);
  out.sites.resize(f.n1);
  for (int x = 0; x < f.n1; ++x) out.sites[x] = static_cast<double>(f.folded_site(x)) * spacing;
  out.re.resize(f.data.size());
  out.im.resize(f.data.size());
  for (int a = 0; a < f.n0; ++a) {
    const bool wrap = 2 * a > f.n0;
    out.times[a] = wrap ? f.time(a) - f.beta : f.time(a);
    const double s = wrap ? -w : w;
    for (int x = 0; x < f.n1; ++x) {
      out.re[std::size_t(a) * f.n1 + x] = s * f(a, x).real();
      out.im[std::size_t(a) * f.n1 + x] = s * f(a, x).imag();
    }
  }
  return out;
}

cplx transform(const Folded& f, Momentum kk) {
  std::vector<double> cr(f.n1), ci(f.n1);
  for (int x = 0; x < f.n1; ++x) {
    cr[x] = std::cos(kk.k * f.sites[x]);
    ci[x] = -std::sin(kk.k * f.sites[x]);
  }
  std::vector<double> rr(f.n0), ri(f.n0), tr(f.n0), ti(f.n0);
  for (int a = 0; a < f.n0; ++a) {
    const cplx row = kernels::cdot(cr.data(), ci.data(), f.re.data() + std::size_t(a) * f.n1,
                                   f.im.data() + std::size_t(a) * f.n1, f.n1);
    rr[a] = row.real();
    ri[a] = row.imag();
    tr[a] = std::cos(kk.k0 * f.times[a]);
    ti[a] = -std::sin(kk.k0 * f.times[a]);
  }
  return kernels::cdot(tr.data(), ti.data(), rr.data(), ri.data(), f.n0);
}

// Largest |F| on the outer rim of the folded torus relative to the largest
// |F| anywhere; refuses when the torus does not contain the decay.
void check_decay(const TorusField& f, const std::string& what) {
  double peak = 0.0, rim = 0.0;
  for (int a = 0; a < f.n0; ++a)
    for (int x = 0; x < f.n1; ++x) {
      const double m = std::abs(f(a, x));
      peak = std::max(peak, m);
      const bool edge = std::abs(4 * a - 2 * f.n0) <= 2 || std::abs(2 * x - f.n1) <= 1;
      if (edge) rim = std::max(rim, m);
    }
  if (peak > 0.0 && rim > 1e-7 * peak) {
    char buf[96];
    std::snprintf(buf, sizeof buf, ": relative tail %.3g at the torus edge", rim / peak);
    throw QuadratureError(what + buf);
  }
}

std::string grid_label(const char* what, int h, const DiagramGrid& g) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s on scale %d (grid %d x %d, beta %.6g, spacing %d)", what, h, g.n0, g.n1,
                g.beta, g.spacing);
  return buf;
}

int rows_for_band(double k0band, double beta) {
  return fft_size(static_cast<int>(std::ceil(k0band * beta / (2.0 * pi))) + 8);
}

SecondOrderKernel make_stencil(int h, Regime regime, double dk0, double dk, const DiagramGrid& grid,
                               const std::function<cplx(Momentum)>& fn) {
  SecondOrderKernel s;
  s.h = h;
  s.regime = regime;
  s.dk0 = dk0;
  s.dk = dk;
  s.grid = grid;
  for (int j = -2; j <= 2; ++j) {
    s.time[j + 2] = fn(Momentum{j * dk0, 0.0});
    s.space[j + 2] = fn(Momentum{0.0, j * dk});
  }
  return s;
}

void require_local_free(const Potential& v) {
  if (v(0) != 0.0) throw DiagramError("the diagram expansion requires v(0) = 0");
}

}  // namespace

// ---------------------------------------------------------------------------

KernelR1::KernelR1(int h, const ScaleContext& ctx, double lambda, const Potential& v, const DiagramOptions& opt)
    : h_(h), gamma_(ctx.gamma), a0_(ctx.a0()), lambda_(lambda), v_(v) {
  require_local_free(v);
  if (h > 0) throw DiagramError("regime-1 kernels live on scales h <= 0");
  if (!(a0_ > 0.0)) throw DiagramError("regime-1 kernels need r < 1/2");
  const int top = std::min(h + (opt.order >= 2 ? opt.window : 0), 0);
  const double gh = std::pow(gamma_, h);
  step_ = opt.step * gh * a0_;
  grid_.beta = opt.time_factor / (gh * a0_);
  const double band = 1.5 * gamma_ * std::pow(gamma_, top) * a0_;
  grid_.n0 = rows_for_band((opt.order >= 2 ? 6.0 : 2.0) * band, grid_.beta);
  grid_.n1 = std::max(torus_for_r1(h, ctx, opt.space_factor).n1, fft_size(4 * v.range() + 8));
  grid_.spacing = 1;

  const TorusField mom_h = sample_grid(grid_, [&](Momentum kk) { return single_scale_momentum(h, kk, ctx); });
  const TorusField g_h = to_position(mom_h, 1);
  // The tadpole needs the equal-time value to full accuracy; the cutoff's
  // slow time decay makes the sunset torus too short for that.
  equal_time_.resize(v.range() + 1);
  for (int x = 0; x <= v.range(); ++x) equal_time_[x] = single_scale_propagator(h, 0.0, x, ctx).real();

  if (opt.order < 2 || lambda == 0.0) return;
  TorusField g_above(grid_.beta, grid_.n0, grid_.n1);
  if (top > h) {
    const TorusField mom_a = sample_grid(grid_, [&](Momentum kk) {
      cplx s = 0.0;
      for (int j = h + 1; j <= top; ++j) s += single_scale_momentum(j, kk, ctx);
      return s;
    });
    g_above = to_position(mom_a, 1);
  }
  TorusField g_all = g_above;
  for (std::size_t j = 0; j < g_all.data.size(); ++j) g_all.data[j] += g_h.data[j];
  TorusField sun = sunset_kernel_r1(g_all, v, lambda);
  if (top > h) {
    const TorusField upper = sunset_kernel_r1(g_above, v, lambda);
    for (std::size_t j = 0; j < sun.data.size(); ++j) sun.data[j] -= upper.data[j];
  }
  check_decay(sun, grid_label("regime-1 sunset", h, grid_));
  sunset_ = std::make_shared<const Folded>(fold(sun, 1));
}

cplx KernelR1::first_order(Momentum kk) const { return first_order_kernel(lambda_, v_, equal_time_, kk); }

cplx KernelR1::second_order(Momentum kk) const {
  if (!sunset_) return 0.0;
  return transform(*sunset_, kk);
}

SecondOrderKernel KernelR1::stencil() const {
  return make_stencil(h_, Regime::One, step_, step_, grid_, [this](Momentum kk) { return (*this)(kk); });
}

namespace {

// Free g^{(<=0)}(0, x) on the infinite chain. The k0 integral of
// chi0 c/(k0^2 + c^2), c = cos k - 1 + r, is done in closed form where chi0 = 1;
// the k integral is split where c crosses 0, +-a0 and +-gamma a0, so each
// piece is smooth.
double cumulative_equal_time(int x, double r, double gamma, double tol) {
  using boost::math::quadrature::gauss_kronrod;
  const double a0 = aperture(r, gamma), top = gamma * a0;
  auto frequency_integral = [&](double c) {
    if (std::abs(c) >= top) return 0.0;
    double q = 0.0, base = 0.0;
    if (std::abs(c) < a0) {
      q = std::sqrt(a0 * a0 - c * c);
      base = c == 0.0 ? 0.0 : std::atan(q / c);
    }
    const double qmax = std::sqrt(top * top - c * c);
    auto f = [&](double k0) { return chi0(std::hypot(k0, c) / a0, gamma) * c / (k0 * k0 + c * c); };
    return (base + gauss_kronrod<double, 31>::integrate(f, q, qmax, 10, tol)) / pi;
  };
  std::vector<double> cuts{0.0, pi};
  for (double t : {0.0, a0, -a0, top, -top}) {
    const double c = 1.0 - r + t;
    if (c > -1.0 && c < 1.0) cuts.push_back(std::acos(c));
  }
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
    if (cuts[j + 1] - cuts[j] < 1e-15) continue;
    auto g = [&](double k) { return std::cos(k * x) * frequency_integral(std::cos(k) - 1.0 + r); };
    total += gauss_kronrod<double, 31>::integrate(g, cuts[j], cuts[j + 1], 10, tol);
  }
  return total / pi;
}

}  // namespace

UltravioletKernel::UltravioletKernel(const ScaleContext& ctx, double lambda, const Potential& v,
                                     const QuadratureOptions& opt)
    : lambda_(lambda), v_(v) {
  require_local_free(v);
  rho_uv_.resize(v.range() + 1);
  for (int x = 0; x <= v.range(); ++x)
    rho_uv_[x] = ground_state_density_matrix(x, ctx.r) - cumulative_equal_time(x, ctx.r, ctx.gamma, opt.rel_tol);
}

cplx UltravioletKernel::operator()(Momentum kk) const { return first_order_kernel(lambda_, v_, rho_uv_, kk); }

SecondOrderKernel UltravioletKernel::stencil(double step) const {
  return make_stencil(1, Regime::One, step, step, DiagramGrid{}, [this](Momentum kk) { return (*this)(kk); });
}

LocalParts localize_r1(const SecondOrderKernel& kernel, double tolerance) {
  const cplx fine = kernel.d11(), coarse = kernel.d11_coarse();
  double peak = 0.0;
  for (const cplx& c : kernel.space) peak = std::max(peak, std::abs(c));
  const double floor = 1e4 * 2.2e-16 * peak / (kernel.dk * kernel.dk);
  if (std::abs(fine - coarse) > tolerance * std::max(std::abs(fine), floor)) {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "stencil too coarse on scale %d: second differences %.6g (5-point) vs %.6g (3-point), step %.3g",
                  kernel.h, fine.real(), coarse.real(), kernel.dk);
    throw DiagramError(buf);
  }
  LocalParts p;
  p.value = kernel.value().real();
  p.z = -kernel.d0().imag();
  p.alpha = -fine.real();
  return p;
}

// ---------------------------------------------------------------------------

QpDiagrams qp_diagrams(int h, const Regime2Frame& fr, const DiagramOptions& opt, bool luttinger_only) {
  if (h > fr.hstar) throw DiagramError("quasi-particle diagrams live on scales h <= h*");
  const int top = std::min(h + opt.window, fr.hstar);
  const double a0 = fr.a0(), gh = std::pow(fr.gamma, h), vel = (1.0 + fr.alpha) * fr.vF;
  DiagramGrid grid;
  grid.beta = opt.time_factor / (gh * a0);
  const double band = 1.5 * fr.gamma * std::pow(fr.gamma, top) * a0;
  grid.n0 = rows_for_band(6.0 * band, grid.beta);
  // Widest relative momentum reached by the top scale.
  const double c = band / (1.0 + fr.alpha), cp = std::cos(fr.pF);
  const double klo = cp + c >= 1.0 ? -0.5 * fr.pF : std::acos(cp + c);
  const double khi = cp - c <= -1.0 ? pi : std::acos(cp - c);
  const double kmax = std::max(fr.pF - klo, khi - fr.pF);
  grid.spacing = std::max(1, static_cast<int>(std::floor(2.0 * pi / (3.3 * kmax))));
  const double decay = vel / (gh * a0);
  grid.n1 = fft_size(std::max(16, static_cast<int>(std::ceil(opt.space_factor * decay / grid.spacing))));

  auto single = [&](int j, Momentum kk) {
    const Momentum abs{kk.k0, fr.pF + kk.k};
    return luttinger_only ? luttinger_momentum(j, +1, abs, fr) : qp_momentum(j, +1, abs, fr);
  };
  const TorusField mom_h = sample_grid(grid, [&](Momentum kk) { return single(h, kk); });
  TorusField mom_a(grid.beta, grid.n0, grid.n1);
  if (top > h)
    mom_a = sample_grid(grid, [&](Momentum kk) {
      if (!luttinger_only) {
        const Momentum abs{kk.k0, fr.pF + kk.k};
        return qp_momentum(top, +1, abs, fr, true) - qp_momentum(h, +1, abs, fr, true);
      }
      cplx s = 0.0;
      for (int j = h + 1; j <= top; ++j) s += single(j, kk);
      return s;
    });

  QpDiagrams out;
  out.h = h;
  out.grid = grid;
  // Momentum-space insertions: (1/(beta L)) sum over the window of g_-^2 (and
  // g_-^2 k'), with g_-(k0, k') = g_+(k0, -k').
  const double norm = 1.0 / (grid.beta * grid.n1 * grid.spacing);
  cplx nu = 0.0, de = 0.0;
  for (int n = 0; n < grid.n0; ++n)
    for (int m = 0; m < grid.n1; ++m) {
      const cplx all = mom_h(n, m) + mom_a(n, m), up = mom_a(n, m);
      const cplx sq = all * all - up * up;
      nu += sq;
      de -= sq * (mom_h.k(m) / grid.spacing);
    }
  out.nu_insertion = (nu * norm).real();
  out.delta_insertion = (de * norm).real();

  const TorusField g_h = to_position(mom_h, grid.spacing);
  const TorusField g_a = to_position(mom_a, grid.spacing);
  out.tadpole = g_h(0, 0).real();

  TorusField g_all = g_a;
  for (std::size_t j = 0; j < g_all.data.size(); ++j) g_all.data[j] += g_h.data[j];
  // g_-(X) = g_+(x0, -x), g_-(-X) = g_+(-x0, x).
  auto minus = [](const TorusField& g, int a, int x) { return g(a, x == 0 ? 0 : g.n1 - x); };
  auto minus_reflected = [](const TorusField& g, int a, int x) { return a == 0 ? g(0, x) : -g(g.n0 - a, x); };
  TorusField sun(grid.beta, grid.n0, grid.n1);
  cplx bubble = 0.0;
  const double w = grid.beta / grid.n0 * grid.spacing;
  for (int a = 0; a < grid.n0; ++a)
    for (int x = 0; x < grid.n1; ++x) {
      const cplx p = g_all(a, x), m = minus(g_all, a, x), mr = minus_reflected(g_all, a, x);
      const cplx pu = g_a(a, x), mu = minus(g_a, a, x), mru = minus_reflected(g_a, a, x);
      sun(a, x) = p * m * mr - pu * mu * mru;
      bubble += p * (m + mr) - pu * (mu + mru);
    }
  out.bubble = (bubble * w).real();
  check_decay(sun, grid_label("quasi-particle sunset", h, grid));
  const Folded f = fold(sun, grid.spacing);
  const double dk0 = opt.step * gh * a0;
  out.sunset = make_stencil(h, Regime::Two, dk0, dk0 / vel, grid, [&f](Momentum kk) { return transform(f, kk); });
  return out;
}

}  // namespace chainrg

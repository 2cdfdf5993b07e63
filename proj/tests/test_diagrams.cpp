#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "chainrg/diagrams.hpp"
#include "chainrg/ed.hpp"
#include "chainrg/grassmann.hpp"
#include "doctest.h"

using namespace chainrg;
using std::numbers::pi;

namespace {

// Brute-force <psi^-_x psi^+_y> from the Grassmann moments of e^U through
// second order, with points placed at distinct times 2^p so the covariance
// can be looked up from the time difference alone.
struct BruteForce {
  Eigen::MatrixXd g, V;
  std::map<long, double> table;

  double cov(double t) const {
    const long k = std::lround(t);
    return k == 0 ? g(0, 0) : table.at(k);
  }

  static Field at(int p, int sign) { return Field{double(1 << p), 0, sign, 0}; }

  std::pair<double, double> orders(int x, int y) const {
    const int P = static_cast<int>(g.rows());
    const Covariance c = [this](double t, int) { return cov(t); };
    auto E = [&](const std::vector<Field>& f) { return wick_moment(f, c); };
    auto n = [](int p, std::vector<Field>& f) {
      f.push_back(at(p, 1));
      f.push_back(at(p, -1));
    };
    const double N0 = E({at(x, -1), at(y, 1)});
    double N1 = 0, N2 = 0, D1 = 0, D2 = 0;
    for (int a = 0; a < P; ++a)
      for (int b = 0; b < P; ++b) {
        if (a == b) continue;
        const double c1 = V(a, b) / 2;
        std::vector<Field> num{at(x, -1), at(y, 1)}, den;
        n(a, num), n(b, num), n(a, den), n(b, den);
        N1 += c1 * E(num);
        D1 += c1 * E(den);
        for (int cc = 0; cc < P; ++cc)
          for (int dd = 0; dd < P; ++dd) {
            if (cc == dd) continue;
            const double c2 = c1 * V(cc, dd) / 4;
            auto num2 = num, den2 = den;
            n(cc, num2), n(dd, num2), n(cc, den2), n(dd, den2);
            N2 += c2 * E(num2);
            D2 += c2 * E(den2);
          }
      }
    return {N1 - N0 * D1, N2 - N1 * D1 - N0 * D2 + N0 * D1 * D1};
  }
};

}  // namespace

TEST_SUITE("diagrams") {
  TEST_CASE("second-order propagator matches the Grassmann moments") {
    const int P = 4;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    BruteForce bf;
    bf.g.resize(P, P);
    bf.V = Eigen::MatrixXd::Zero(P, P);
    const double diag = u(rng);
    for (int a = 0; a < P; ++a)
      for (int b = 0; b < P; ++b) {
        bf.g(a, b) = a == b ? diag : u(rng);
        if (a != b) bf.table[(1L << a) - (1L << b)] = bf.g(a, b);
      }
    for (int a = 0; a < P; ++a)
      for (int b = a + 1; b < P; ++b) bf.V(a, b) = bf.V(b, a) = u(rng);

    const Eigen::MatrixXd s1 = hartree_fock_self_energy(bf.g, bf.V);
    const Eigen::MatrixXd full = interacting_propagator_order2(bf.g, bf.V);
    for (auto [x, y] : {std::pair{0, 1}, std::pair{2, 3}, std::pair{1, 1}}) {
      const auto [first, second] = bf.orders(x, y);
      CHECK(first == doctest::Approx((bf.g * s1 * bf.g)(x, y)).epsilon(1e-12));
      CHECK(second == doctest::Approx(full(x, y) - bf.g(x, y) - first).epsilon(1e-10));
    }
  }

  TEST_CASE("torus sunset equals the matrix sunset on a translation-invariant system") {
    const int n0 = 4, n1 = 5;
    const double beta = 2.0, dt = beta / n0, lambda = 0.3;
    const Potential v{{0.0, 0.5}};
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    TorusField G(beta, n0, n1);
    for (auto& c : G.data) c = u(rng);
    const int P = n0 * n1;
    Eigen::MatrixXd g(P, P), V = Eigen::MatrixXd::Zero(P, P);
    auto idx = [&](int a, int x) { return a * n1 + x; };
    for (int a = 0; a < n0; ++a)
      for (int x = 0; x < n1; ++x)
        for (int b = 0; b < n0; ++b)
          for (int y = 0; y < n1; ++y) {
            const int d = a - b, dx = ((x - y) % n1 + n1) % n1;
            g(idx(a, x), idx(b, y)) = d >= 0 ? G(d, dx).real() : -G(d + n0, dx).real();
            const int m = std::min(dx, n1 - dx);
            if (a == b && dx != 0) V(idx(a, x), idx(b, y)) = 2.0 * lambda * v(m) * dt;
          }
    const Eigen::MatrixXd sun = sunset_self_energy(g, V);
    const TorusField K = sunset_kernel_r1(G, v, lambda);
    double worst = 0.0;
    for (int a = 0; a < n0; ++a)
      for (int x = 0; x < n1; ++x)
        worst = std::max(worst, std::abs(-sun(idx(a, x), 0) / (dt * dt) - K(a, x).real()));
    CHECK(worst < 1e-12);
  }

  TEST_CASE("first-order kernel reproduces the linear response of the exact spectrum") {
    const int L = 8;
    const double beta = 8.0, r = 0.3, lam = 1e-3;
    const Potential v{{0.0, 0.5}};
    const SpectralData free = diagonalize(build_hamiltonian(L, 0.0, r, v), beta);
    const SpectralData plus = diagonalize(build_hamiltonian(L, lam, r, v), beta);
    const SpectralData minus = diagonalize(build_hamiltonian(L, -lam, r, v), beta);
    std::vector<double> rho{density_matrix(0, free), density_matrix(1, free)};
    for (int m = 0; m <= L / 2; ++m)
      for (int n : {0, 1, -2}) {
        const Momentum kk{2 * pi / beta * (n + 0.5), 2 * pi * m / L};
        const cplx g0 = free_propagator_momentum(kk, r);
        const cplx slope = (schwinger_momentum(kk, plus) - schwinger_momentum(kk, minus)) / (2 * lam);
        const cplx predicted = -g0 * g0 * first_order_kernel(1.0, v, rho, kk);
        CHECK(std::abs(slope - predicted) < 1e-5 * std::abs(g0 * g0));
      }
  }

  TEST_CASE("zero coupling gives a zero kernel") {
    ScaleContext ctx;
    ctx.r = 0.0;
    const KernelR1 K(-1, ctx, 0.0, Potential{}, {});
    const SecondOrderKernel s = K.stencil();
    for (const cplx& c : s.time) CHECK(c == cplx(0.0));
    for (const cplx& c : s.space) CHECK(c == cplx(0.0));
    const LocalParts p = localize_r1(s);
    CHECK(p.value == 0.0);
    CHECK(p.z == 0.0);
    CHECK(p.alpha == 0.0);
  }

  TEST_CASE("potential with an on-site value is refused") {
    ScaleContext ctx;
    CHECK_THROWS_AS(KernelR1(0, ctx, 0.1, Potential{{0.2, 0.5}}, {}), DiagramError);
  }

  TEST_CASE("localization of manufactured kernels") {
    const double c = 0.37, step = 1e-3;
    SecondOrderKernel s;
    s.dk0 = s.dk = step;
    for (int j = -2; j <= 2; ++j) {
      s.space[j + 2] = c * (std::cos(j * step) - 1.0);
      s.time[j + 2] = 0.0;
    }
    CHECK(localize_r1(s).alpha == doctest::Approx(c).epsilon(1e-8));
    CHECK(localize_r1(s).z == 0.0);
    // A -i k0 term and a constant.
    for (int j = -2; j <= 2; ++j) {
      s.time[j + 2] = 0.25 + cplx(0.0, -0.11 * j * step);
      s.space[j + 2] = 0.25;
    }
    const LocalParts p = localize_r1(s);
    CHECK(p.value == doctest::Approx(0.25));
    CHECK(p.z == doctest::Approx(0.11).epsilon(1e-10));
    CHECK(std::abs(p.alpha) < 1e-6);
    // Variation on the scale of the step cannot be localized.
    for (int j = -2; j <= 2; ++j) s.space[j + 2] = std::cos(200.0 * j * step);
    CHECK_THROWS_AS(localize_r1(s), DiagramError);
  }

  TEST_CASE("parity: the k-derivative of the regime-1 kernel vanishes") {
    ScaleContext ctx;
    ctx.r = 0.0;
    for (int h : {0, -2}) {
      const KernelR1 K(h, ctx, 0.05, Potential{}, {});
      const SecondOrderKernel s = K.stencil();
      CHECK(std::abs(s.d1()) < 1e-8);
      CHECK(std::abs(K.second_order({0.0, 0.0})) > 0.0);
    }
  }

  TEST_CASE("first-order kernels telescope to zero on the empty band") {
    ScaleContext ctx;
    ctx.r = 0.0;
    const double lam = 0.05;
    DiagramOptions opt;
    opt.order = 1;
    cplx total = UltravioletKernel(ctx, lam, Potential{})({0.0, 0.0});
    double previous = std::abs(total);
    for (int h = 0; h >= -12; --h) {
      total += KernelR1(h, ctx, lam, Potential{}, opt)({0.0, 0.0});
      if (h % 4 == 0) {
        CHECK(std::abs(total) < previous);
        previous = std::abs(total);
      }
    }
    CHECK(std::abs(total) < 1e-4 * lam);
  }

  TEST_CASE("second-order kernel is stable under grid refinement") {
    ScaleContext ctx;
    ctx.r = 0.0;
    DiagramOptions coarse, fine;
    fine.time_factor = 2 * coarse.time_factor;
    fine.space_factor = 2 * coarse.space_factor;
    const cplx a = KernelR1(-2, ctx, 0.05, Potential{}, coarse).second_order({0.0, 0.0});
    const cplx b = KernelR1(-2, ctx, 0.05, Potential{}, fine).second_order({0.0, 0.0});
    CHECK(std::abs(a - b) < 1e-3 * std::abs(b));
  }

  TEST_CASE("Luttinger parts: parity cancellation and velocity covariance") {
    const Regime2Frame f5 = regime2_frame(1.0 / 32, 2.0), f7 = regime2_frame(1.0 / 128, 2.0);
    DiagramOptions opt;
    opt.space_factor = 80.0;
    const QpDiagrams a = qp_diagrams(f5.hstar - 6, f5, opt, true);
    const QpDiagrams deep = qp_diagrams(f5.hstar - 10, f5, opt, true);
    const QpDiagrams b = qp_diagrams(f7.hstar - 6, f7, opt, true);
    // Mass-type terms of the linear model cancel up to the lattice cutoff
    // asymmetry, which dies faster than the dimensional size of each graph.
    auto slope = [](const QpDiagrams& d, const Regime2Frame& f) {
      return std::abs(d.sunset.d0()) * std::pow(f.gamma, d.h) * f.a0();
    };
    const double s_a = std::abs(a.sunset.value()) / slope(a, f5), s_deep = std::abs(deep.sunset.value()) / slope(deep, f5);
    const double t_a = std::abs(a.tadpole) / std::pow(2.0, a.h), t_deep = std::abs(deep.tadpole) / std::pow(2.0, deep.h);
    CHECK(s_a < 0.05);
    CHECK(s_deep < s_a / 8);
    CHECK(t_a < 0.01);
    CHECK(t_deep < t_a / 8);
    CHECK(std::abs(deep.bubble) < std::abs(a.bubble) / 64);
    // z with lambda_h proportional to vF does not depend on vF.
    const double za = (cplx(0, 1) * a.sunset.d0()).real() * f5.vF * f5.vF;
    const double zb = (cplx(0, 1) * b.sunset.d0()).real() * f7.vF * f7.vF;
    CHECK(za > 0.0);
    CHECK(za == doctest::Approx(zb).epsilon(0.01));
  }
}

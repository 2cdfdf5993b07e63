#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "chainrg/ed.hpp"
#include "chainrg/model.hpp"
#include "doctest.h"

using namespace chainrg;
using std::numbers::pi;

namespace {

Potential nearest_neighbour() { return Potential{{0.0, 0.5}}; }

std::vector<double> sorted_spectrum(const ManyBodyOperator& H, int N) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H.sectors[N].H, Eigen::EigenvaluesOnly);
  std::vector<double> e(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return e;
}

}  // namespace

TEST_SUITE("ed") {
  TEST_CASE("free spectrum is a filling of single-particle levels") {
    const double r = 0.3;
    const auto H = build_hamiltonian(4, 0.0, r, nearest_neighbour());
    const double ks[] = {0.0, pi / 2, -pi / 2, pi};
    for (int N = 0; N <= 4; ++N) {
      std::vector<double> fill;
      for (int mask = 0; mask < 16; ++mask) {
        if (__builtin_popcount(mask) != N) continue;
        double e = 0.0;
        for (int j = 0; j < 4; ++j)
          if (mask >> j & 1) e += dispersion(ks[j], r);
        fill.push_back(e);
      }
      std::sort(fill.begin(), fill.end());
      const auto spec = sorted_spectrum(H, N);
      REQUIRE(spec.size() == fill.size());
      for (std::size_t i = 0; i < fill.size(); ++i) CHECK(spec[i] == doctest::Approx(fill[i]).epsilon(1e-12));
    }
  }

  TEST_CASE("hermitian and number conserving") {
    const auto H = build_hamiltonian(6, 0.25, 0.1, nearest_neighbour());
    const Eigen::MatrixXd M = H.dense();
    CHECK((M - M.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int a = 0; a < M.rows(); ++a)
      for (int b = 0; b < M.cols(); ++b)
        if (__builtin_popcount(a) != __builtin_popcount(b)) REQUIRE(M(a, b) == 0.0);
  }

  TEST_CASE("refusals") {
    CHECK_THROWS_AS(build_hamiltonian(15, 0.1, 0.1, nearest_neighbour()), EdLimitError);
    CHECK_THROWS_AS(build_hamiltonian(4, 0.1, 0.1, Potential{{0.0, 0.5, 0.2}}), EdLimitError);
    const auto H = build_hamiltonian(13, 0.0, 0.1, nearest_neighbour());
    CHECK_THROWS_AS(diagonalize(H, 10.0), EdLimitError);
  }

  TEST_CASE("free thermal two-point function") {
    const int L = 8;
    const double beta = 8.0;
    for (double r : {-0.2, 0.0, 0.25, 1.0}) {
      const auto sd = diagonalize(build_hamiltonian(L, 0.0, r, nearest_neighbour()), beta);
      double worst = 0.0;
      for (int x = 0; x < L; ++x)
        for (double tau : {-7.5, -4.0, -1.0, -0.01, 0.0, 0.01, 0.5, 2.0, 6.0, 7.99})
          worst = std::max(worst, std::fabs(thermal_two_point(x, tau, sd) - free_schwinger_time(tau, x, r, L, beta)));
      CHECK(worst < 1e-8);
    }
  }

  TEST_CASE("antiperiodicity and the equal-time jump") {
    const auto sd = diagonalize(build_hamiltonian(6, 0.3, 0.2, nearest_neighbour()), 5.0);
    for (int x = 0; x < 6; ++x)
      for (double tau : {0.3, 1.7, 4.2}) {
        const double a = thermal_two_point(x, tau, sd), b = thermal_two_point(x, tau - 5.0, sd);
        CHECK(std::fabs(a + b) <= 1e-13 * std::max(1.0, std::fabs(a)));
      }
    for (int x = 0; x < 6; ++x) {
      const double jump = thermal_two_point(x, 1e-12, sd) - thermal_two_point(x, -1e-12, sd);
      CHECK(jump == doctest::Approx(x == 0 ? 1.0 : 0.0).epsilon(1e-9));
    }
  }

  TEST_CASE("free momentum-space propagator") {
    const int L = 6;
    const double beta = 6.0;
    const double r = 0.25;
    const auto sd = diagonalize(build_hamiltonian(L, 0.0, r, nearest_neighbour()), beta);
    double worst = 0.0;
    for (double k : momentum_grid(L))
      for (double k0 : matsubara_grid(beta, 4)) {
        const cplx want = free_propagator_momentum({k0, k}, r);
        worst = std::max(worst, std::abs(schwinger_momentum({k0, k}, sd) - want));
      }
    CHECK(worst < 1e-10);
  }

  TEST_CASE("insulating bound from exact diagonalization") {
    const int L = 8;
    const double beta = 4.0 * L;
    for (double lam : {0.0, 0.05}) {
      const double r = -0.1;
      const auto sd = diagonalize(build_hamiltonian(L, lam, r, nearest_neighbour()), beta);
      double mx = 0.0;
      for (double k : momentum_grid(L))
        for (double k0 : matsubara_grid(beta, 8)) mx = std::max(mx, std::abs(schwinger_momentum({k0, k}, sd)));
      CHECK(mx <= 2.0 / std::fabs(r));
    }
  }

  TEST_CASE("particle-hole map between complementary sectors") {
    const int L = 6;
    const double lam = 0.2, r = 0.15;
    const Potential v = nearest_neighbour();
    const auto A = build_hamiltonian(L, lam, r, v);
    // h -> -h - 2 lambda vhat(0), i.e. r' = 2 - r - 2 lambda vhat(0).
    const double rp = 2.0 - r - 2.0 * lam * potential_fourier(v, 0.0);
    const auto B = build_hamiltonian(L, lam, rp, v);
    const double shift = -A.h * L - lam * L * potential_fourier(v, 0.0);
    for (int N = 0; N <= L; ++N) {
      const auto ea = sorted_spectrum(A, N);
      auto eb = sorted_spectrum(B, L - N);
      for (auto& e : eb) e += shift;
      REQUIRE(ea.size() == eb.size());
      for (std::size_t i = 0; i < ea.size(); ++i) CHECK(ea[i] == doctest::Approx(eb[i]).epsilon(1e-12));
    }
  }

  TEST_CASE("phase diagnostics") {
    const auto rows = phase_diagnostics(8, 32.0, {-0.2, 1.0}, {0.0}, nearest_neighbour());
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].ground_density == 0.0);
    CHECK(rows[0].charge_gap >= 0.2 - 1e-12);
    CHECK(rows[0].thermal_density < 1e-2);
    CHECK(rows[1].ground_density == doctest::Approx(0.5));
    CHECK(rows[1].thermal_density == doctest::Approx(0.5).epsilon(1e-12));
    double total = 0.0;
    for (double n : rows[1].occupation) total += n;
    CHECK(total == doctest::Approx(4.0).epsilon(1e-10));
  }

  TEST_CASE("spectral cache round trip") {
    const auto sd = diagonalize(build_hamiltonian(6, 0.1, 0.3, nearest_neighbour()), 4.0);
    const std::string path = "ed_cache_roundtrip.bin";
    save_spectral(sd, path);
    const auto back = load_spectral(path);
    std::remove(path.c_str());
    CHECK(back.L == 6);
    CHECK(back.ground_energy == sd.ground_energy);
    CHECK(back.log_reduced_partition == sd.log_reduced_partition);
    for (std::size_t N = 0; N < sd.energies.size(); ++N) {
      CHECK(back.energies[N] == sd.energies[N]);
      CHECK(back.vectors[N] == sd.vectors[N]);
    }
    CHECK(thermal_two_point(2, 1.3, back) == thermal_two_point(2, 1.3, sd));
  }
}

#include <cstring>
#include <random>
#include <vector>

#include "chainrg/kernels.hpp"
#include "doctest.h"

using namespace chainrg;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double spread) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng) * std::pow(10.0, spread * u(rng));
  return v;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("real dot: AVX2 and scalar agree bit for bit") {
    if (kernels::detected_isa() != kernels::Isa::Avx2) return;
    std::mt19937_64 rng(7);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 64u, 1001u, 65537u}) {
      for (double spread : {0.0, 6.0}) {
        const auto a = random_vector(rng, n, spread), b = random_vector(rng, n, spread);
        CHECK(same_bits(kernels::dot_scalar(a.data(), b.data(), n), kernels::dot_avx2(a.data(), b.data(), n)));
      }
    }
  }

  TEST_CASE("complex dot: AVX2 and scalar agree bit for bit") {
    if (kernels::detected_isa() != kernels::Isa::Avx2) return;
    std::mt19937_64 rng(11);
    for (std::size_t n : {0u, 2u, 7u, 8u, 33u, 4097u}) {
      const auto ar = random_vector(rng, n, 3.0), ai = random_vector(rng, n, 3.0);
      const auto br = random_vector(rng, n, 3.0), bi = random_vector(rng, n, 3.0);
      const auto s = kernels::cdot_scalar(ar.data(), ai.data(), br.data(), bi.data(), n);
      const auto v = kernels::cdot_avx2(ar.data(), ai.data(), br.data(), bi.data(), n);
      CHECK(same_bits(s.real(), v.real()));
      CHECK(same_bits(s.imag(), v.imag()));
    }
  }

  TEST_CASE("compensated dot matches an extended-precision reference") {
    std::mt19937_64 rng(3);
    const std::size_t n = 20000;
    const auto a = random_vector(rng, n, 8.0), b = random_vector(rng, n, 8.0);
    long double ref = 0.0L, mag = 0.0L;
    for (std::size_t j = 0; j < n; ++j) {
      ref += static_cast<long double>(a[j]) * b[j];
      mag += std::fabs(static_cast<long double>(a[j]) * b[j]);
    }
    for (auto isa : {kernels::Isa::Scalar, kernels::Isa::Avx2}) {
      kernels::set_isa(isa);
      CHECK(std::fabs(kernels::dot(a.data(), b.data(), n) - static_cast<double>(ref)) <= 1e-15 * static_cast<double>(mag));
    }
    kernels::set_isa(kernels::detected_isa());
  }

  TEST_CASE("cancellation: sum of +x and -x pairs is exactly zero") {
    std::vector<double> a{1e16, 1.0, -1e16, -1.0, 3.5, -3.5, 1e-300, -1e-300, 2.0};
    std::vector<double> ones(a.size(), 1.0);
    CHECK(kernels::dot_scalar(a.data(), ones.data(), a.size()) == 2.0);
    CHECK(kernels::sum(a.data(), a.size()) == 2.0);
  }
}

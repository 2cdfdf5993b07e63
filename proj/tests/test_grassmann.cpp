#include <cmath>
#include <random>

#include "chainrg/grassmann.hpp"
#include "doctest.h"

using namespace chainrg;

namespace {

// Generic non-symmetric covariance for combinatorial checks.
double toy(double t, int x) { return std::exp(-0.7 * std::fabs(t) - 0.2 * x * x) * (1.0 + 0.3 * t) + 0.05 * x; }

}  // namespace

TEST_SUITE("grassmann") {
  TEST_CASE("one and two pairs") {
    const Field m1{0.3, 1, -1, 0}, p1{-0.2, 0, +1, 0}, m2{1.1, -2, -1, 0}, p2{0.5, 3, +1, 0};
    CHECK(wick_moment({m1, p1}, toy) == doctest::Approx(toy(0.5, 1)));
    CHECK(wick_moment({p1, m1}, toy) == doctest::Approx(-toy(0.5, 1)));
    const double expect = toy(0.5, 1) * toy(0.6, -5) - toy(-0.2, -2) * toy(1.3, -2);
    CHECK(wick_moment({m1, p1, m2, p2}, toy) == doctest::Approx(expect));
    CHECK(wick_moment({m1, m2}, toy) == 0.0);
    CHECK(wick_moment({m1, p1, p2}, toy) == 0.0);
  }

  TEST_CASE("determinant matches the permutation sum") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> t(-2, 2);
    std::uniform_int_distribution<int> x(-3, 3), coin(0, 1);
    for (int it = 0; it < 200; ++it) {
      std::vector<Field> f;
      for (int j = 0; j < 4; ++j) f.push_back({t(rng), x(rng), -1, 0});
      for (int j = 0; j < 4; ++j) f.push_back({t(rng), x(rng), +1, 0});
      std::shuffle(f.begin(), f.end(), rng);
      CHECK(wick_moment(f, toy) == doctest::Approx(wick_moment_permutations(f, toy)).epsilon(1e-12));
    }
  }

  TEST_CASE("swapping like fields flips the sign") {
    std::vector<Field> f{{0.1, 0, -1, 0}, {0.4, 2, -1, 0}, {-0.3, 1, +1, 0}, {0.9, -1, +1, 0}};
    const double v = wick_moment(f, toy);
    std::swap(f[0], f[1]);
    CHECK(wick_moment(f, toy) == doctest::Approx(-v));
    std::swap(f[2], f[3]);
    CHECK(wick_moment(f, toy) == doctest::Approx(v));
  }

  TEST_CASE("truncated expectation examples") {
    const std::vector<Field> one{{0.1, 0, -1, 0}, {0.4, 2, +1, 0}, {0.2, 1, -1, 0}, {-0.5, 0, +1, 0}};
    CHECK(truncated_expectation_cumulant(one, toy) == doctest::Approx(wick_moment(one, toy)));
    CHECK(connected_contractions(one, toy) == doctest::Approx(wick_moment(one, toy)));

    // Covariance vanishing between clusters located far apart.
    auto local = [](double t, int x) { return std::abs(x) > 50 ? 0.0 : toy(t, x); };
    const std::vector<Field> apart{{0, 0, -1, 0}, {0.3, 1, +1, 0}, {0, 100, -1, 1}, {0.2, 101, +1, 1}};
    CHECK(truncated_expectation_cumulant(apart, local) == doctest::Approx(0.0).scale(1.0));
    CHECK(connected_contractions(apart, local) == 0.0);

    // Two clusters psi^- psi^+ each: only the crossing pairing connects them.
    const Field a{0.2, 0, -1, 0}, b{0.7, 1, +1, 0}, c{-0.4, 2, -1, 1}, d{0.1, -1, +1, 1};
    const double hand = -toy(a.x0 - d.x0, a.x - d.x) * toy(c.x0 - b.x0, c.x - b.x);
    CHECK(truncated_expectation_cumulant({a, b, c, d}, toy) == doctest::Approx(hand));
    CHECK(connected_contractions({a, b, c, d}, toy) == doctest::Approx(hand));
  }

  TEST_CASE("cumulant and connected contractions agree exhaustively") {
    const auto sweep = exhaustive_truncation_check(3, 8, toy, 17);
    CHECK(sweep.configurations > 1000);
    CHECK(sweep.max_difference <= 1e-10 * std::max(1.0, sweep.max_magnitude));
  }

  TEST_CASE("size limits are refused") {
    std::vector<Field> f;
    for (int c = 0; c < 5; ++c) {
      f.push_back({0, c, -1, c});
      f.push_back({0, c, +1, c});
    }
    CHECK_THROWS_AS(truncated_expectation_cumulant(f, toy), std::invalid_argument);
    CHECK_THROWS_AS(connected_contractions({{0, 0, -1, 0}}, toy), std::invalid_argument);
  }

  TEST_CASE("Gram factors reproduce the propagator and respect Hadamard") {
    ScaleContext ctx;
    const GramFactors gf(-4, ctx);
    // Single cluster, t = 1: the inner product is the propagator itself.
    const cplx ip = gf.a(3.0, 2).dot(gf.b(-1.0, 0));
    CHECK(std::abs(ip - gf.propagator(4.0, 2)) < 1e-12 * gf.norm() * gf.norm());
    CHECK(gf.propagator(0.0, 0) == doctest::Approx(single_scale_propagator(-4, 0.0, 0, ctx).real()).epsilon(1e-3));
    const auto rep = gram_check(gf, 100, 4);
    CHECK(rep.violations == 0);
    CHECK(rep.max_inner_product_error < 1e-12);
    CHECK(rep.max_det_over_bound <= 1.0);
  }

  TEST_CASE("Gram norms scale as gamma^{h/2}") {
    ScaleContext ctx;
    double lo = 1e300, hi = 0.0;
    for (int h = -2; h >= -7; --h) {
      const double v = GramFactors(h, ctx).norm() * GramFactors(h, ctx).norm() / std::pow(ctx.gamma, h / 2.0);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(hi / lo < 2.0);
  }
}

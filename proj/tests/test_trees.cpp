#include <cmath>
#include <random>
#include <set>

#include "chainrg/model.hpp"
#include "chainrg/scale.hpp"
#include "chainrg/trees.hpp"
#include "doctest.h"

using namespace chainrg;

namespace {

// Root -> v0 -> ... -> endpoint, every vertex keeping the same |P|.
GNTree chain(int h_root, int length, int fields, int p) {
  GNTree t;
  t.root_scale = h_root;
  for (int i = 0; i < length; ++i) {
    TreeNode nd;
    nd.scale = h_root + 1 + i;
    nd.parent = i - 1;
    nd.p = p;
    if (i + 1 < length) nd.children = {i + 1};
    t.nodes.push_back(nd);
  }
  t.nodes.back().endpoint = true;
  t.nodes.back().fields = fields;
  t.nodes.back().p = fields / 2;
  return t;
}

}  // namespace

TEST_SUITE("trees") {
  TEST_CASE("single endpoint gives one chain per endpoint scale") {
    for (int d = 1; d <= 5; ++d) {
      const auto ts = enumerate_trees(-d, 1);
      REQUIRE(ts.size() == static_cast<std::size_t>(d + 1));
      std::set<int> scales;
      for (const auto& t : ts) {
        for (int v : t.non_endpoints()) CHECK(t.nodes[v].children.size() == 1);
        scales.insert(t.nodes[t.endpoints()[0]].scale);
      }
      CHECK(scales.size() == ts.size());
    }
  }

  TEST_CASE("counts agree with the recursive counter") {
    // n = 2 by hand: depth 1 {v0(e e)}; depth 2 adds chains below either leg.
    CHECK(count_trees(-1, 2) == 1);
    CHECK(count_trees(-2, 2) == 5);
    CHECK(count_trees(-3, 2) == 14);
    for (int d = 1; d <= 3; ++d)
      for (int n = 1; n <= 5; ++n) CHECK(enumerate_trees(-d, n).size() == static_cast<std::size_t>(count_trees(-d, n)));
    for (int d = 4; d <= 6; ++d)
      for (int n = 1; n <= 3; ++n) CHECK(enumerate_trees(-d, n).size() == static_cast<std::size_t>(count_trees(-d, n)));
    CHECK(enumerate_trees(-7, 2, -4).size() == static_cast<std::size_t>(count_trees(-3, 2)));
  }

  TEST_CASE("topology counts settle once the depth exceeds n") {
    const long long expect[] = {1, 1, 3, 11, 45};
    for (int n = 1; n <= 5; ++n) {
      CHECK(count_topologies(enumerate_trees(-4, n)) == expect[n - 1]);
      CHECK(count_topologies(enumerate_trees(-5, n)) == expect[n - 1]);
    }
  }

  TEST_CASE("limits are refused") {
    CHECK_THROWS_AS(enumerate_trees(-3, 6), TreeLimitError);
    CHECK_THROWS_AS(enumerate_trees(-9, 2), TreeLimitError);
    CHECK_THROWS_AS(count_trees(-9, 2), TreeLimitError);
    CHECK_THROWS_AS(enumerate_trees(0, 2), TreeLimitError);
  }

  TEST_CASE("branch count identity on every shape") {
    for (int n = 1; n <= 5; ++n)
      for (const auto& t : enumerate_trees(-3, n)) {
        int s = 0;
        for (int v : t.non_endpoints()) s += static_cast<int>(t.nodes[v].children.size()) - 1;
        CHECK(s == n - 1);
      }
  }

  TEST_CASE("chain tree with constant P") {
    const GNTree t = chain(-5, 4, 4, 1);
    CHECK(validate_tree(t).empty());
    CHECK(check_identities(t).ok);
    int lhs = 0;
    for (int v : t.non_endpoints()) {
      int kids = 0;
      for (int c : t.nodes[v].children) kids += 2 * t.nodes[c].p;
      lhs += kids - 2 * t.nodes[v].p;
    }
    CHECK(lhs == 4 - 2);
  }

  TEST_CASE("exhaustive assignments up to three endpoints") {
    long long cases = 0;
    for (int n = 1; n <= 3; ++n)
      for (const auto& s : enumerate_trees(-3, n))
        for (const auto& lt : label_endpoints(s, {2, 4, 6}))
          for_each_assignment(lt, [&](const GNTree& t) {
            ++cases;
            const auto rep = check_identities(t);
            if (!rep.ok) FAIL(rep.failures.front());
          });
    CHECK(cases > 1000);
  }

  TEST_CASE("random assignments up to four endpoints") {
    std::mt19937_64 rng(7);
    std::vector<GNTree> shapes;
    for (int n = 1; n <= 4; ++n)
      for (auto& t : enumerate_trees(-4, n)) shapes.push_back(std::move(t));
    std::uniform_int_distribution<std::size_t> pick(0, shapes.size() - 1);
    std::uniform_int_distribution<int> size(1, 4);
    for (int i = 0; i < 1000; ++i) {
      GNTree t = shapes[pick(rng)];
      for (int e : t.endpoints()) {
        t.nodes[e].fields = 2 * size(rng);
        t.nodes[e].p = t.nodes[e].fields / 2;
      }
      t = sample_assignment(t, rng);
      REQUIRE(validate_tree(t).empty());
      const auto rep = check_identities(t);
      if (!rep.ok) FAIL(rep.failures.front());
    }
  }

  TEST_CASE("malformed trees name the broken invariant") {
    GNTree t = chain(-4, 3, 4, 1);
    t.nodes[2].scale += 1;
    CHECK(validate_tree(t).find("increase by one") != std::string::npos);
    CHECK_THROWS_AS(check_identities(t), std::invalid_argument);
    t = chain(-4, 3, 4, 1);
    t.nodes[1].p = 3;
    CHECK(validate_tree(t).find("union") != std::string::npos);
    t = chain(-4, 3, 4, 1);
    t.nodes[2].p = 1;
    CHECK(validate_tree(t).find("P_v = I_v") != std::string::npos);
  }

  TEST_CASE("vertex dimensions") {
    CHECK(vertex_dimension(TreeRegime::One, 2) == Rational(1, 2));
    CHECK(vertex_dimension(TreeRegime::One, 8) == Rational(1, 2));
    CHECK(vertex_dimension(TreeRegime::One, 2, false) == Rational(-1));
    CHECK(vertex_dimension(TreeRegime::Two, 4) == Rational(1));
    CHECK(vertex_dimension(TreeRegime::Two, 2) == Rational(1));
    for (int p = 2; p <= 40; p += 2) {
      CHECK(vertex_dimension(TreeRegime::One, p) >= Rational(1, 2));
      CHECK(vertex_dimension(TreeRegime::Two, p) >= Rational(1));
    }
    CHECK_THROWS_AS(vertex_dimension(TreeRegime::One, 3), std::invalid_argument);
    CHECK_THROWS_AS(vertex_dimension(TreeRegime::Two, 0), std::invalid_argument);
  }

  TEST_CASE("single endpoint bound is the endpoint factor") {
    GNTree t = enumerate_trees(-3, 1)[0];
    REQUIRE(t.nodes.size() == 1);
    t.nodes[0].fields = 4;
    t.nodes[0].p = 2;
    const auto b = bound_product(t, TreeRegime::One, 2.0);
    CHECK(b.gamma_exponent_raw == Rational(-3));
    CHECK(b.gamma_exponent_collected == Rational(-3));
    CHECK(b.raw_value == doctest::Approx(0.125));
  }

  TEST_CASE("regime 2 vF powers telescope exactly") {
    const double r = 1.0 / 64, gamma = 2.0;
    const int hs = crossover_scale(r, gamma);
    const double vF = fermi_data(r).vF;
    long long cases = 0;
    for (int n = 1; n <= 3; ++n)
      for (const auto& s : enumerate_trees(hs - 3, n, hs))
        for (const auto& lt : label_endpoints(s, {2, 4, 6}, TreeRegime::Two, hs))
          for_each_assignment(lt, [&](const GNTree& t) {
            ++cases;
            const auto b = bound_product(t, TreeRegime::Two, gamma, hs, vF);
            CHECK(b.vf_exponent_raw == Rational(t.external_size(), 2) - 1);
            CHECK(b.gamma_exponent_raw == b.gamma_exponent_collected);
            CHECK(b.min_dimension >= Rational(1));
            CHECK(b.raw_value == doctest::Approx(b.collected_value).epsilon(1e-12));
          });
    CHECK(cases > 100);
  }

  TEST_CASE("short memory gain survives to the root") {
    for (int n = 1; n <= 3; ++n)
      for (const auto& s : enumerate_trees(-4, n))
        for (const auto& lt : label_endpoints(s, {2, 4}))
          for_each_assignment(lt, [&](const GNTree& t) {
            CHECK(short_memory_margin(t, Rational(1, 2)) >= Rational(0));
            CHECK(short_memory_margin(t, Rational(1, 10)) >= Rational(0));
          });
  }

  TEST_CASE("crossover ratio") {
    const double gamma = 2.0;
    for (int e = 3; e <= 10; ++e) {
      const double r = std::ldexp(1.0, -e);
      CHECK(crossover_consistency(2, r, gamma) == doctest::Approx(1.0));
      for (int l : {2, 4, 6}) {
        const double q = crossover_consistency(l, r, gamma);
        CHECK(q >= 1.0 / (gamma * gamma));
        CHECK(q <= gamma * gamma);
      }
      // At gamma^{h*} = vF^2 the two bounds coincide identically.
      const double vF = fermi_data(r).vF;
      for (int l : {2, 4, 6}) {
        const double r1 = std::pow(vF * vF, 1.5 - l / 4.0);
        const double r2 = std::pow(vF * vF, 2.0 - l / 2.0) * std::pow(vF, l / 2.0 - 1.0);
        CHECK(r1 / r2 == doctest::Approx(1.0).epsilon(1e-14));
      }
    }
    CHECK_THROWS_AS(crossover_consistency(3, 0.1, gamma), std::invalid_argument);
    CHECK_THROWS_AS(crossover_consistency(2, 0.0, gamma), std::invalid_argument);
  }

  TEST_CASE("json dump") {
    auto t = label_endpoints(enumerate_trees(-2, 2)[0], {4})[0];
    for_each_assignment(t, [&](const GNTree& u) { t = u; });
    const auto j = tree_to_json(t);
    CHECK(j["root_scale"] == -2);
    CHECK(j["endpoints"] == 2);
    CHECK(j["vertices"].size() == t.nodes.size());
  }
}

#include <cmath>
#include <numbers>

#include "chainrg/fit.hpp"
#include "chainrg/flow.hpp"
#include "doctest.h"

using namespace chainrg;
using std::numbers::pi;

namespace {

// Ladder with identical made-up diagrams on every scale.
QpLadder synthetic_ladder(double r, int depth, double tadpole, double sunset_value) {
  QpLadder l;
  l.frame = regime2_frame(r, 2.0);
  l.hmin = l.frame.hstar - depth;
  for (int i = 0; i < depth; ++i) {
    QpDiagrams d;
    d.h = l.frame.hstar - i;
    d.tadpole = tadpole * std::pow(2.0, 2 * d.h);
    d.nu_insertion = -3e-4;
    d.sunset.time.fill(sunset_value * std::pow(2.0, 2 * d.h));
    d.sunset.space = d.sunset.time;
    d.sunset.dk0 = d.sunset.dk = 1e-3;
    l.diagrams.push_back(d);
  }
  return l;
}

}  // namespace

TEST_SUITE("flow") {
  TEST_CASE("line fits") {
    const LineFit f = fit_loglog({1, 2, 4, 8}, {3, 12, 48, 192});
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(std::exp(f.intercept) == doctest::Approx(3.0));
    CHECK_THROWS(fit_loglog({1, -2}, {1, 1}));
  }

  TEST_CASE("zero coupling: couplings stay zero and the assembly is the free propagator") {
    const Regime1Flow f = flow_regime1(0.0, -0.1, Potential{}, 2.0);
    for (int h = -1; h >= f.stop; --h) {
      CHECK(f.ctx.couplings.at(h).z == 0.0);
      CHECK(f.ctx.couplings.at(h).mu == 0.0);
    }
    for (const Momentum kk : {Momentum{0.1, 0.0}, Momentum{-0.7, 1.3}, Momentum{2.0, pi}}) {
      const cplx s = two_point_regime1(kk, f).value;
      CHECK(std::abs(s - free_propagator_momentum(kk, -0.1)) < 1e-14);
    }
  }

  TEST_CASE("insulating flow: parity, bounded couplings and the 1/|r| bound") {
    const double r = -0.1, lam = 0.05;
    const Regime1Flow f = flow_regime1(lam, r, Potential{}, 2.0);
    CHECK(f.stop == crossover_scale(r, 2.0));
    for (const Regime1Step& s : f.steps) CHECK(s.d1 < 1e-8);
    double worst = 0.0;
    for (double k0 : {0.05, 0.3, 1.5})
      for (double k : {0.0, 0.5, 2.0, pi}) worst = std::max(worst, std::abs(two_point_regime1({k0, k}, f).value));
    CHECK(worst <= 2.0 / std::abs(r));
    CHECK_THROWS_AS(two_point_regime1({0.0, 0.0}, flow_regime1(lam, 0.1, Potential{}, 2.0)), FlowError);
  }

  TEST_CASE("coupling bound violation aborts with the scale") {
    FlowOptions opt;
    opt.bound_r1 = 1e-3;
    try {
      flow_regime1(0.05, -0.1, Potential{}, 2.0, opt);
      FAIL("expected a bound violation");
    } catch (const FlowError& e) {
      CHECK(std::string(e.what()).find("on scale -1") != std::string::npos);
    }
  }

  TEST_CASE("nu is relevant with multiplier gamma when its beta function vanishes") {
    CouplingsR2 c;
    c.nu = 0.3;
    c.lambda = 0.01;
    const CouplingsR2 n = step_r2(c, BetaR2{}, 2.0);
    CHECK(n.nu == 0.6);
    CHECK(n.lambda == 0.01);
    CHECK(n.Z == 1.0);
  }

  TEST_CASE("zero diagrams give zero betas") {
    QpDiagrams d;
    d.sunset.dk0 = d.sunset.dk = 1e-3;
    CouplingsR2 c;
    c.lambda = 0.02;
    c.delta = 1e-3;
    const BetaR2 b = beta_r2(d, c, 2.0, 0.3);
    CHECK(b.z == 0.0);
    CHECK(b.lambda == 0.0);
    CHECK(b.delta == 0.0);
    CHECK(b.nu == 0.0);
  }

  TEST_CASE("initial quartic coupling for nearest-neighbour v") {
    const double lam = 0.07;
    for (double r : {1.0 / 1024, 1.0 / 64, 1.0 / 8, 0.4}) {
      const FermiData fd = fermi_data(r);
      const CouplingsR2 c = initial_couplings_r2(lam, Potential{}, fd.pF);
      CHECK(c.lambda == doctest::Approx(2.0 * lam * fd.vF * fd.vF).epsilon(1e-12));
      CHECK(c.lambda / r <= 4.0 * lam);
      CHECK(c.delta == 0.0);
      CHECK(c.Z == 1.0);
    }
    CHECK(initial_couplings_r2(0.0, Potential{}, 0.5).lambda == 0.0);
  }

  TEST_CASE("eta does not depend on the normalization of Z") {
    QpLadder l = synthetic_ladder(1.0 / 32, 14, 0.0, 1.0);
    for (QpDiagrams& d : l.diagrams)
      for (int j = -2; j <= 2; ++j) d.sunset.time[j + 2] = cplx(0.0, -2.0 * j * d.sunset.dk0);
    FlowOptions opt;
    CouplingsR2 c = initial_couplings_r2(0.05, Potential{}, l.frame.pF);
    const double a = run_regime2(l, c, 0.05, opt).eta;
    c.Z = 7.5;
    const double b = run_regime2(l, c, 0.05, opt).eta;
    CHECK(a > 0.0);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }

  TEST_CASE("shooting: zero coupling and the relevance of nu") {
    FlowOptions opt;
    const QpLadder zero = synthetic_ladder(1.0 / 32, 20, 0.0, 0.0);
    const Shooting s0 = nu_shooting(zero, CouplingsR2{}, 0.0, opt);
    CHECK(s0.nu_hstar == 0.0);
    CHECK(s0.run.eta == 0.0);
    for (const Regime2Row& row : s0.run.rows) CHECK(row.couplings.Z == 1.0);

    const QpLadder l = synthetic_ladder(1.0 / 32, 20, 0.5, 0.2);
    const double lam = 0.05;
    const CouplingsR2 start = initial_couplings_r2(lam, Potential{}, l.frame.pF);
    const Shooting s = nu_shooting(l, start, lam, opt);
    CHECK(s.nu_hstar != 0.0);
    CHECK(std::abs(s.nu_hmin) <= 1e-8 * lam);
    std::vector<double> hs, logs;
    for (const Regime2Row& row : s.run.rows)
      if (row.h < l.frame.hstar - 2 && row.h > l.hmin + 2) {
        hs.push_back(row.h);
        logs.push_back(std::log(std::abs(row.couplings.nu)));
      }
    CHECK(fit_line(hs, logs).slope / std::log(2.0) >= opt.theta - 0.05);

    CouplingsR2 off = start;
    off.nu = 1.1 * s.nu_hstar;
    const Regime2Run run = run_regime2(l, off, lam, opt);
    hs.clear();
    logs.clear();
    for (std::size_t i = run.rows.size() - 8; i < run.rows.size(); ++i) {
      hs.push_back(-run.rows[i].h);
      logs.push_back(std::log(std::abs(run.rows[i].couplings.nu)));
    }
    CHECK(fit_line(hs, logs).slope >= 0.9 * std::log(2.0));
  }

  TEST_CASE("regime-2 flow at r = 1/32: eta of order lambda^2 r and bounded couplings") {
    FlowOptions opt;
    opt.depth_r2 = 8;
    opt.eta_window = 4;
    const double r = 1.0 / 32;
    const QpLadder l = build_ladder(regime2_frame(r, 2.0), crossover_scale(r, 2.0) - opt.depth_r2, opt.regime2);
    const FlowTrajectory a = run_flow(0.05, r, Potential{}, 2.0, opt, &l);
    const FlowTrajectory b = run_flow(0.025, r, Potential{}, 2.0, opt, &l);
    CHECK(a.eta > 0.0);
    CHECK(a.eta / b.eta == doctest::Approx(4.0).epsilon(0.05));
    CHECK(a.eta / (0.05 * 0.05 * r) == doctest::Approx(0.4).epsilon(0.1));
    CHECK(a.rows.front().h == -1);
    CHECK(a.rows.back().h == a.hmin);
    // Continuity at h*: the regime-1 couplings and the regime-2 start share a row.
    for (const TrajectoryRow& row : a.rows)
      if (row.h == a.hstar) {
        CHECK(row.alpha.has_value());
        CHECK(row.lambda.has_value());
        CHECK(*row.Z == 1.0);
      }
  }
}

#include "chainrg/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "chainrg/csv.hpp"

namespace chainrg {

namespace {

std::string at_scale(const char* what, int h, double value, double limit) {
  char buf[200];
  std::snprintf(buf, sizeof buf, "%s on scale %d: |%.6g| exceeds %.6g", what, h, value, limit);
  return buf;
}

void check_r1(const CouplingsR1& c, int h, double limit) {
  if (std::abs(c.z) > limit) throw FlowError(at_scale("z", h, c.z, limit));
  if (std::abs(c.alpha) > limit) throw FlowError(at_scale("alpha", h, c.alpha, limit));
  if (std::abs(c.mu) > limit) throw FlowError(at_scale("mu", h, c.mu, limit));
}

}  // namespace

cplx Regime1Flow::total_kernel(Momentum kk) const {
  cplx s = ultraviolet ? (*ultraviolet)(kk) : cplx(0.0);
  for (const auto& k : kernels) s += (*k)(kk);
  return s;
}

Regime1Flow flow_regime1(double lambda, double r, const Potential& v, double gamma, const FlowOptions& opt) {
  if (r > 0.5) throw FlowError("regime-1 flow needs r <= 1/2");
  Regime1Flow f;
  f.lambda = lambda;
  f.v = v;
  f.ctx.r = r;
  f.ctx.gamma = gamma;
  if (r == 0.0) {
    f.stop = opt.floor_r1;
    f.lowest = opt.floor_r1;
  } else {
    f.stop = crossover_scale(r, gamma);
    f.lowest = r > 0.0 ? f.stop + 2 : f.stop;
  }
  const double limit = opt.bound_r1 * std::abs(lambda);

  auto apply = [&](int h, const SecondOrderKernel& s, double sunset) {
    Regime1Step step;
    step.h = h;
    step.local = localize_r1(s, opt.localize_tolerance);
    step.d1 = std::abs(s.d1());
    step.sunset = sunset;
    const CouplingsR1 prev = f.ctx.couplings.at(h - 1);
    CouplingsR1 next;
    next.z = prev.z + step.local.z;
    next.alpha = prev.alpha + step.local.alpha;
    next.mu = gamma * prev.mu + std::pow(gamma, -(h - 2)) * step.local.value;
    check_r1(next, h - 2, limit);
    f.ctx.couplings.set(h - 2, next);
    step.couplings = next;
    f.steps.push_back(step);
  };

  if (lambda == 0.0) {
    for (int h = -1; h >= f.lowest - 2; --h) f.ctx.couplings.set(h, {});
    return f;
  }
  f.ultraviolet = std::make_shared<const UltravioletKernel>(f.ctx, lambda, v);
  const double uv_step = opt.regime1.step * gamma * f.ctx.a0();
  apply(1, f.ultraviolet->stencil(uv_step), 0.0);
  for (int h = 0; h >= f.lowest; --h) {
    auto k = std::make_shared<const KernelR1>(h, f.ctx, lambda, v, opt.regime1);
    apply(h, k->stencil(), std::abs(k->second_order({0.0, 0.0})));
    f.kernels.push_back(std::move(k));
  }
  return f;
}

TwoPoint two_point_regime1(Momentum kk, const Regime1Flow& flow) {
  if (flow.ctx.r > 0.0) throw FlowError("the regime-1 assembly covers r <= 0 only");
  const ScaleContext& ctx = flow.ctx;
  if (chi_leq(flow.lowest - 1, kk, ctx) > 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "momentum (%.6g, %.6g) reaches below the resolved scale %d", kk.k0, kk.k,
                  flow.lowest);
    throw FlowError(buf);
  }
  const cplx free = inverse_propagator_r1(0, kk, ctx);
  const cplx full = free + flow.total_kernel(kk);
  TwoPoint out;
  out.value = 0.0;
  for (int j = 1; j >= flow.lowest; --j) {
    const cplx g = j == 1 ? ultraviolet_momentum(kk, ctx.r, ctx.gamma) : single_scale_momentum(j, kk, ctx);
    if (g == cplx(0.0)) continue;
    const cplx d = j == 1 ? free : inverse_propagator_r1(j - 1, kk, ctx);
    const cplx q = 1.0 - (full - d) / d;
    out.value += g * q;
    out.q_deviation = std::max(out.q_deviation, std::abs(q - 1.0));
    out.lowest_scale = j;
  }
  return out;
}

// ---------------------------------------------------------------------------

BetaR2 beta_r2(const QpDiagrams& d, const CouplingsR2& c, double gamma, double vel) {
  const double lam = c.lambda, gh = std::pow(gamma, d.h), l2 = 4.0 * lam * lam;
  BetaR2 b;
  b.z = l2 * (cplx(0.0, 1.0) * d.sunset.d0()).real();
  b.lambda = 2.0 * lam * lam * d.bubble;
  b.delta = -l2 * d.sunset.d1().real() - b.z * vel;
  const double k0 = 2.0 * lam * (d.tadpole - gh * c.nu * d.nu_insertion - c.delta * d.delta_insertion) +
                    l2 * d.sunset.value().real();
  b.nu = k0 / gh;
  return b;
}

CouplingsR2 step_r2(const CouplingsR2& c, const BetaR2& b, double gamma) {
  const double w = 1.0 + b.z;
  CouplingsR2 n;
  n.lambda = (c.lambda + b.lambda) / (w * w);
  n.delta = (c.delta + b.delta) / w;
  n.nu = gamma * (c.nu + b.nu) / w;
  n.Z = c.Z * w;
  return n;
}

CouplingsR2 initial_couplings_r2(double lambda, const Potential& v, double pF) {
  CouplingsR2 c;
  c.lambda = lambda * (potential_fourier(v, 0.0) - potential_fourier(v, 2.0 * pF));
  return c;
}

QpLadder build_ladder(const Regime2Frame& fr, int hmin, const DiagramOptions& opt) {
  QpLadder l;
  l.frame = fr;
  l.hmin = hmin;
  for (int h = fr.hstar; h > hmin; --h) l.diagrams.push_back(qp_diagrams(h, fr, opt));
  return l;
}

double extract_eta(const std::vector<Regime2Row>& rows, double gamma, int window) {
  const int n = static_cast<int>(rows.size()) - 1;  // steps
  if (n <= 0) return 0.0;
  const int w = std::min(window, n);
  double s = 0.0;
  for (int i = n - w; i < n; ++i) s += std::log(rows[i + 1].couplings.Z / rows[i].couplings.Z);
  return s / (w * std::log(gamma));
}

Regime2Run run_regime2(const QpLadder& ladder, const CouplingsR2& start, double lambda, const FlowOptions& opt,
                       bool check_bounds) {
  const Regime2Frame& fr = ladder.frame;
  const double limit = opt.bound_r2 * std::abs(lambda) * std::pow(fr.r, 0.5 + opt.theta);
  const double vel = (1.0 + fr.alpha) * fr.vF;
  Regime2Run run;
  CouplingsR2 c = start;
  int h = fr.hstar;
  for (const QpDiagrams& d : ladder.diagrams) {
    if (check_bounds) {
      if (std::abs(c.lambda) > limit * (1 + 1e-12)) throw FlowError(at_scale("lambda_h", h, c.lambda, limit));
      if (std::abs(c.delta) > limit * (1 + 1e-12)) throw FlowError(at_scale("delta_h", h, c.delta, limit));
    }
    const BetaR2 b = beta_r2(d, c, fr.gamma, vel);
    run.rows.push_back({h, c, b.z});
    c = step_r2(c, b, fr.gamma);
    --h;
  }
  run.rows.push_back({h, c, 0.0});
  run.eta = extract_eta(run.rows, fr.gamma, opt.eta_window);
  return run;
}

Shooting nu_shooting(const QpLadder& ladder, CouplingsR2 start, double lambda, const FlowOptions& opt) {
  Shooting s;
  const double limit = opt.bound_r1 * std::abs(lambda);
  const double tol = 1e-8 * std::abs(lambda);
  auto end = [&](double nu) {
    start.nu = nu;
    return run_regime2(ladder, start, lambda, opt).rows.back().couplings.nu;
  };
  double x0 = 0.0, f0 = end(x0);
  double x1 = limit > 0.0 ? 1e-3 * limit : 1e-12, f1 = end(x1);
  s.iterations = 2;
  while (std::abs(f1) > tol && s.iterations < 12) {
    if (f1 == f0) throw FlowError("nu shooting: the end value does not depend on nu_h*");
    const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = end(x1);
    ++s.iterations;
  }
  if (std::abs(x1) > limit && lambda != 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "nu shooting: solution nu_h* = %.6g outside |nu_h*| <= %.6g", x1, limit);
    throw FlowError(buf);
  }
  if (std::abs(f1) > tol) throw FlowError("nu shooting did not converge");
  s.nu_hstar = lambda == 0.0 ? 0.0 : x1;
  start.nu = s.nu_hstar;
  s.run = run_regime2(ladder, start, lambda, opt);
  s.nu_hmin = s.run.rows.back().couplings.nu;
  return s;
}

// ---------------------------------------------------------------------------

FlowTrajectory run_flow(double lambda, double r, const Potential& v, double gamma, const FlowOptions& opt,
                        const QpLadder* ladder) {
  FlowTrajectory t;
  t.lambda = lambda;
  t.r = r;
  t.gamma = gamma;
  const Regime1Flow f1 = flow_regime1(lambda, r, v, gamma, opt);
  t.hstar = r == 0.0 ? kNoCrossover : f1.stop;
  std::map<int, TrajectoryRow> rows;
  for (int h = -1; h >= f1.stop; --h) {
    const CouplingsR1 c = f1.ctx.couplings.at(h);
    TrajectoryRow& row = rows[h];
    row.h = h;
    row.z = c.z;
    row.alpha = c.alpha;
    row.mu = c.mu;
  }
  t.hmin = f1.stop;
  if (r > 0.0) {
    t.hmin = t.hstar - opt.depth_r2;
    std::optional<QpLadder> own;
    if (!ladder || ladder->frame.hstar != t.hstar || ladder->hmin != t.hmin || ladder->frame.r != r) {
      own = build_ladder(regime2_frame(r, gamma), t.hmin, opt.regime2);
      ladder = &*own;
    }
    const CouplingsR2 start = initial_couplings_r2(lambda, v, ladder->frame.pF);
    t.shooting = nu_shooting(*ladder, start, lambda, opt);
    t.eta = t.shooting->run.eta;
    for (const Regime2Row& r2 : t.shooting->run.rows) {
      TrajectoryRow& row = rows[r2.h];
      row.h = r2.h;
      if (r2.h != t.hstar) row.z = r2.z;
      row.lambda = r2.couplings.lambda;
      row.delta = r2.couplings.delta;
      row.nu = r2.couplings.nu;
      row.Z = r2.couplings.Z;
    }
  }
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) t.rows.push_back(it->second);
  return t;
}

void FlowTrajectory::write_csv(const std::filesystem::path& path) const {
  CsvTable table({"h", "z", "alpha", "mu", "lambda", "delta", "nu", "Z"});
  auto cell = [](const std::optional<double>& v) { return v ? csv_number(*v) : std::string(); };
  for (const TrajectoryRow& r : rows)
    table.add_row({csv_number(static_cast<long long>(r.h)), cell(r.z), cell(r.alpha), cell(r.mu), cell(r.lambda),
                   cell(r.delta), cell(r.nu), cell(r.Z)});
  table.write(path);
}

nlohmann::ordered_json FlowTrajectory::summary() const {
  nlohmann::ordered_json j;
  j["schema"] = "chainrg.flow/1";
  j["lambda"] = lambda;
  j["r"] = r;
  j["gamma"] = gamma;
  if (hstar == kNoCrossover)
    j["hstar"] = nullptr;
  else
    j["hstar"] = hstar;
  j["hmin"] = hmin;
  j["eta"] = eta;
  if (shooting) {
    j["nu_hstar"] = shooting->nu_hstar;
    j["nu_hmin"] = shooting->nu_hmin;
    j["shooting_iterations"] = shooting->iterations;
  }
  return j;
}

}  // namespace chainrg

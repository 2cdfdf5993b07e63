#include "chainrg/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>

#include "chainrg/commands.hpp"
#include "chainrg/ed.hpp"
#include "chainrg/fit.hpp"
#include "chainrg/grassmann.hpp"
#include "chainrg/trees.hpp"

namespace chainrg {

using std::numbers::pi;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string format(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

std::string num(double v) { return csv_number(v); }
std::string num(int v) { return csv_number(static_cast<long long>(v)); }

// max / min of positive values.
double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi / *lo;
}

double rational_value(const Rational& q) { return static_cast<double>(q.numerator()) / q.denominator(); }

// Matsubara frequencies 2pi/beta (n + 1/2), n = -nfreq..nfreq-1, times lattice momenta 0..pi.
std::vector<Momentum> probe_grid(int L, double beta, int nfreq) {
  std::vector<Momentum> out;
  for (int n = -nfreq; n < nfreq; ++n)
    for (int m = 0; m <= L / 2; ++m) out.push_back({2.0 * pi / beta * (n + 0.5), 2.0 * pi * m / L});
  return out;
}

// Least-squares alpha in S (-i k0 + alpha (cos k - 1)) = 1 and the largest residual.
struct CriticalFit {
  double alpha = 1.0;
  double residual = 0.0;
};

CriticalFit fit_critical(const std::vector<Momentum>& ks, const std::vector<cplx>& s) {
  cplx numer = 0.0;
  double denom = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const cplx a = s[i] * (std::cos(ks[i].k) - 1.0);
    const cplx b = 1.0 + cplx(0.0, ks[i].k0) * s[i];
    numer += std::conj(a) * b;
    denom += std::norm(a);
  }
  CriticalFit f;
  f.alpha = numer.real() / denom;
  for (std::size_t i = 0; i < s.size(); ++i)
    f.residual = std::max(
        f.residual, std::abs(s[i] * (cplx(0.0, -ks[i].k0) + f.alpha * (std::cos(ks[i].k) - 1.0)) - 1.0));
  return f;
}

// log|nu_h| against the scale index over rows selected by keep.
template <class Keep>
LineFit nu_fit(const std::vector<Regime2Row>& rows, double sign, Keep keep) {
  std::vector<double> x, y;
  for (const Regime2Row& row : rows)
    if (keep(row) && row.couplings.nu != 0.0) {
      x.push_back(sign * row.h);
      y.push_back(std::log(std::abs(row.couplings.nu)));
    }
  return fit_line(x, y);
}

bool same_bytes(const std::filesystem::path& a, const std::filesystem::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  return std::equal(std::istreambuf_iterator<char>(fa), std::istreambuf_iterator<char>(),
                    std::istreambuf_iterator<char>(fb), std::istreambuf_iterator<char>());
}

}  // namespace

// ---------------------------------------------------------------------------
// Tables

CsvTable free_crosscheck(const std::vector<double>& rs, int L, double beta, int samples) {
  CsvTable t({"r", "x", "x0", "time_domain", "matsubara", "difference"});
  for (double r : rs)
    for (int x = 0; x < L; ++x)
      for (int j = -samples + 1; j < samples; ++j) {
        const double x0 = beta * j / samples;
        const double a = free_schwinger_time(x0, x, r, L, beta);
        const double b = free_schwinger_matsubara(x0, x, r, L, beta);
        t.add_row({num(r), num(x), num(x0), num(a), num(b), num(std::fabs(a - b))});
      }
  return t;
}

CsvTable regime1_scaling(double r, double gamma, int hmin, const QuadratureOptions& opt) {
  CsvTable t({"h", "sup", "sup_over_gamma_h2", "time_length", "space_length", "refinement_change"});
  ScaleContext ctx;
  ctx.r = r;
  ctx.gamma = gamma;
  for (int h = -2; h >= hmin; --h) {
    const PropagatorTable p = tabulate_single_scale(h, ctx, opt);
    const DecayLengths d = envelope_decay_lengths(p.values);
    t.add_row({num(h), num(p.sup_norm()), num(p.sup_norm() / std::pow(gamma, 0.5 * h)), num(d.time), num(d.space),
               num(p.refinement_change)});
  }
  return t;
}

CsvTable regime2_scaling(double r, double gamma, int depth, const QuadratureOptions& opt) {
  CsvTable t({"h", "sup", "sup_over_gamma_h_vF", "remainder_relative"});
  const Regime2Frame fr = regime2_frame(r, gamma);
  for (int h = fr.hstar - 1; h >= fr.hstar - depth; --h) {
    const LuttingerTables lt = tabulate_luttinger(h, 1, fr, opt);
    const double sup = lt.full.sup_norm();
    t.add_row({num(h), num(sup), num(sup / (std::pow(gamma, h) / fr.vF)), num(lt.remainder.sup_norm() / sup)});
  }
  return t;
}

CsvTable tree_identities(int max_n, int depth, int samples, std::uint64_t seed) {
  CsvTable t({"regime", "n", "shapes", "checked", "failures", "min_dimension", "vf_mismatches", "first_failure"});
  std::mt19937_64 rng(seed);
  const double gamma = 2.0, r2 = 1.0 / 64;
  const int hs = crossover_scale(r2, gamma);
  const double vF = fermi_data(r2).vF;
  for (TreeRegime regime : {TreeRegime::One, TreeRegime::Two}) {
    const bool one = regime == TreeRegime::One;
    for (int n = 1; n <= max_n; ++n) {
      const std::vector<GNTree> shapes = one ? enumerate_trees(-depth, n) : enumerate_trees(hs - depth, n, hs);
      long long checked = 0, failures = 0, vf_bad = 0;
      Rational min_dim(1000);
      std::string first;
      auto check = [&](const GNTree& tree) {
        ++checked;
        const IdentityReport rep = check_identities(tree);
        if (!rep.ok) {
          ++failures;
          if (first.empty()) first = rep.failures.front();
        }
        const BoundReport b = one ? bound_product(tree, regime, gamma) : bound_product(tree, regime, gamma, hs, vF);
        min_dim = std::min(min_dim, b.min_dimension);
        if (!one && b.vf_exponent_raw != Rational(tree.external_size(), 2) - 1) ++vf_bad;
      };
      for (const GNTree& s : shapes) {
        const std::vector<GNTree> labelled = label_endpoints(s, {2, 4, 6}, regime, hs);
        if (n <= 3) {
          for (const GNTree& lt : labelled) for_each_assignment(lt, check);
        } else {
          std::uniform_int_distribution<std::size_t> pick(0, labelled.size() - 1);
          check(sample_assignment(labelled[pick(rng)], rng));
        }
      }
      if (n > 3) {
        std::uniform_int_distribution<std::size_t> pick_shape(0, shapes.size() - 1);
        for (int i = 0; i < samples; ++i) {
          const std::vector<GNTree> labelled = label_endpoints(shapes[pick_shape(rng)], {2, 4, 6}, regime, hs);
          std::uniform_int_distribution<std::size_t> pick(0, labelled.size() - 1);
          check(sample_assignment(labelled[pick(rng)], rng));
        }
      }
      t.add_row({one ? "1" : "2", num(n), csv_number(static_cast<long long>(shapes.size())), csv_number(checked),
                 csv_number(failures), num(rational_value(min_dim)), csv_number(vf_bad), first});
    }
  }
  return t;
}

CsvTable crossover_table(double gamma) {
  CsvTable t({"l", "r", "hstar", "vF", "ratio"});
  for (int e = 3; e <= 10; ++e) {
    const double r = std::ldexp(1.0, -e);
    for (int l : {2, 4, 6})
      t.add_row({num(l), num(r), num(crossover_scale(r, gamma)), num(fermi_data(r).vF),
                 num(crossover_consistency(l, r, gamma))});
  }
  return t;
}

namespace {
std::size_t column_index(const CsvTable& t, const std::string& column) {
  const auto it = std::find(t.header().begin(), t.header().end(), column);
  if (it == t.header().end()) throw std::invalid_argument("no column " + column);
  return static_cast<std::size_t>(it - t.header().begin());
}
}  // namespace

double column_max(const CsvTable& t, const std::string& column) {
  const std::size_t j = column_index(t, column);
  double m = -HUGE_VAL;
  for (const auto& row : t.rows()) m = std::max(m, std::stod(row[j]));
  return m;
}

double column_min(const CsvTable& t, const std::string& column) {
  const std::size_t j = column_index(t, column);
  double m = HUGE_VAL;
  for (const auto& row : t.rows()) m = std::min(m, std::stod(row[j]));
  return m;
}

// ---------------------------------------------------------------------------
// Acceptance rows

const QpLadder& Experiments::ladder(double r) {
  auto it = ladders_.find(r);
  if (it == ladders_.end()) {
    const Regime2Frame fr = regime2_frame(r, cfg_.model.gamma);
    it = ladders_.emplace(r, build_ladder(fr, fr.hstar - cfg_.flow.depth_r2, cfg_.flow.regime2)).first;
  }
  return it->second;
}

namespace {

struct Row {
  bool pass = false;
  std::string detail;
};

Row free_equivalence(Experiments&) {
  const auto t0 = Clock::now();
  const CsvTable t = free_crosscheck({-0.2, 0.0, 0.25, 1.0}, 10, 20.0);
  const double worst = column_max(t, "difference");
  const double secs = seconds_since(t0);
  return {worst < 1e-8 && secs < 60.0,
          format("max |time - Matsubara| = %.2e over %zu points, %.1f s", worst, t.rows().size(), secs)};
}

Row ed_oracle(Experiments& e) {
  const int L = 8;
  const double beta = 8.0;
  double worst_t = 0.0, worst_k = 0.0;
  for (double r : {-0.2, 0.0, 0.25, 1.0}) {
    const SpectralData sd = diagonalize(build_hamiltonian(L, 0.0, r, e.config().model.potential), beta);
    for (int x = 0; x < L; ++x)
      for (int j = -31; j < 32; ++j) {
        const double tau = beta * j / 32;
        worst_t = std::max(worst_t, std::fabs(thermal_two_point(x, tau, sd) - free_schwinger_time(tau, x, r, L, beta)));
      }
    for (double k : momentum_grid(L))
      for (double k0 : matsubara_grid(beta, 8))
        worst_k = std::max(worst_k, std::abs(schwinger_momentum({k0, k}, sd) - free_propagator_momentum({k0, k}, r)));
  }
  return {worst_t < 1e-8 && worst_k < 1e-10,
          format("time domain %.2e (< 1e-8), momentum %.2e (< 1e-10)", worst_t, worst_k)};
}

Row regime1_envelopes(Experiments& e) {
  const double gamma = e.config().model.gamma;
  const CsvTable t = regime1_scaling(0.0, gamma, -8, e.config().quadrature);
  std::vector<double> sup, scale_t, scale_x, len_t, len_x;
  const std::size_t jh = column_index(t, "h"), js = column_index(t, "sup_over_gamma_h2"),
                    jt = column_index(t, "time_length"), jx = column_index(t, "space_length");
  for (const auto& row : t.rows()) {
    const int h = std::stoi(row[jh]);
    sup.push_back(std::stod(row[js]));
    scale_t.push_back(std::pow(gamma, -h));
    len_t.push_back(std::stod(row[jt]));
    len_x.push_back(std::stod(row[jx]));
  }
  const double st = fit_loglog(scale_t, len_t).slope, sx = fit_loglog(scale_t, len_x).slope;
  const double sp = spread(sup);
  return {sp < 2.0 && std::fabs(st - 1.0) <= 0.15 && std::fabs(sx - 0.5) <= 0.075,
          format("sup/gamma^{h/2} spread %.3f (< 2); time-length exponent %.3f, space-length exponent %.3f", sp, st,
                 sx)};
}

Row regime2_envelopes(Experiments& e) {
  const CsvTable t = regime2_scaling(std::ldexp(1.0, -6), e.config().model.gamma, 6, e.config().quadrature);
  const double sp = column_max(t, "sup_over_gamma_h_vF") / column_min(t, "sup_over_gamma_h_vF");
  return {sp < 2.0, format("sup/(gamma^h/vF) spread %.3f over h*-1..h*-6 (< 2)", sp)};
}

Row crossover_matching(Experiments& e) {
  const double gamma = e.config().model.gamma;
  const CsvTable t = crossover_table(gamma);
  const double lo = column_min(t, "ratio"), hi = column_max(t, "ratio");
  return {lo >= 1.0 / (gamma * gamma) && hi <= gamma * gamma,
          format("ratio in [%.3f, %.3f] (bounds [%.3f, %.3f])", lo, hi, 1.0 / (gamma * gamma), gamma * gamma)};
}

Row truncated_expectations(Experiments& e) {
  const Covariance g = [](double x0, int x) { return free_schwinger_time(x0, x, 0.25, 10, 20.0); };
  const TruncationSweep s = exhaustive_truncation_check(3, 8, g, e.config().seed);
  const double tol = 1e-10 * std::max(1.0, s.max_magnitude);
  return {s.max_difference <= tol, format("%ld configurations, max difference %.2e (magnitude up to %.2e)",
                                          s.configurations, s.max_difference, s.max_magnitude)};
}

Row gram_hadamard(Experiments& e) {
  ScaleContext ctx;
  ctx.gamma = e.config().model.gamma;
  int instances = 0, violations = 0;
  std::vector<double> norms;
  for (int h = -2; h >= -7; --h) {
    const GramFactors gf(h, ctx);
    const GramReport rep = gram_check(gf, 200, e.config().seed + static_cast<std::uint64_t>(-h));
    instances += rep.instances;
    violations += rep.violations;
    norms.push_back(gf.norm() * gf.norm() / std::pow(ctx.gamma, 0.5 * h));
  }
  const double sp = spread(norms);
  return {instances >= 1000 && violations == 0 && sp < 2.0,
          format("%d instances, %d violations; |A||B|/gamma^{h/2} spread %.3f (< 2)", instances, violations, sp)};
}

Row tree_rows(Experiments& e) {
  const CsvTable t = tree_identities(5, e.config().tree_depth, e.config().tree_samples, e.config().seed);
  long long checked = 0, failures = 0, vf_bad = 0;
  double min1 = HUGE_VAL, min2 = HUGE_VAL;
  for (const auto& row : t.rows()) {
    checked += std::stoll(row[3]);
    failures += std::stoll(row[4]);
    vf_bad += std::stoll(row[6]);
    (row[0] == "1" ? min1 : min2) = std::min(row[0] == "1" ? min1 : min2, std::stod(row[5]));
  }
  return {failures == 0 && vf_bad == 0 && min1 >= 0.5,
          format("%lld trees checked, %lld identity failures, %lld vF mismatches; min dimension %.3g (regime 1), "
                 "%.3g (regime 2)",
                 checked, failures, vf_bad, min1, min2)};
}

Row parity(Experiments& e) {
  ScaleContext ctx;
  ctx.r = 0.0;
  ctx.gamma = e.config().model.gamma;
  double worst = 0.0, smallest = HUGE_VAL;
  for (int h : {0, -2, -4}) {
    const KernelR1 k(h, ctx, 0.05, e.config().model.potential, e.config().flow.regime1);
    worst = std::max(worst, std::abs(k.stencil().d1()));
    smallest = std::min(smallest, std::abs(k.second_order({0.0, 0.0})));
  }
  return {worst < 1e-8 && smallest > 0.0,
          format("max |d/dk W2(0)| = %.2e at h in {0,-2,-4}; smallest |W2(0)| = %.2e", worst, smallest)};
}

Row nu_shooting_row(Experiments& e) {
  const RunConfig& cfg = e.config();
  const double r = std::ldexp(1.0, -5), lam = 0.05, gamma = cfg.model.gamma;
  const QpLadder& l = e.ladder(r);
  const FlowTrajectory traj = run_flow(lam, r, cfg.model.potential, gamma, cfg.flow, &l);
  const Shooting& s = *traj.shooting;
  double c = 0.0;
  for (const Regime2Row& row : s.run.rows)
    c = std::max(c, std::abs(row.couplings.nu) / (std::abs(lam) * std::pow(gamma, row.h / 4.0)));
  const double decay = nu_fit(s.run.rows, 1.0, [&](const Regime2Row& row) {
    return row.h < l.frame.hstar - 2 && row.h > l.hmin + 2;
  }).slope / std::log(gamma);

  CouplingsR2 off = initial_couplings_r2(lam, cfg.model.potential, l.frame.pF);
  off.nu = 1.1 * s.nu_hstar;
  const Regime2Run run = run_regime2(l, off, lam, cfg.flow, false);
  const double growth =
      nu_fit(run.rows, -1.0, [&](const Regime2Row& row) { return row.h < l.hmin + 8; }).slope;
  return {c <= cfg.flow.bound_r1 && growth >= 0.9 * std::log(gamma),
          format("nu* = %.4e after %d iterations; C = %.3f (<= %g); shot decay %.2f per scale in log_gamma; "
                 "perturbed growth %.3f (>= %.3f)",
                 s.nu_hstar, s.iterations, c, cfg.flow.bound_r1, decay, growth, 0.9 * std::log(gamma))};
}

Row eta_scaling(Experiments& e) {
  const auto t0 = Clock::now();
  const RunConfig& cfg = e.config();
  const double gamma = cfg.model.gamma;
  std::vector<double> lams{0.02, 0.04, 0.06, 0.08, 0.1}, eta_l;
  const double r_fixed = std::ldexp(1.0, -5);
  for (double lam : lams)
    eta_l.push_back(run_flow(lam, r_fixed, cfg.model.potential, gamma, cfg.flow, &e.ladder(r_fixed)).eta);
  std::vector<double> rs, eta_r;
  std::string bs;
  for (int k = 8; k >= 3; --k) {
    const double r = std::ldexp(1.0, -k);
    rs.push_back(r);
    eta_r.push_back(run_flow(0.05, r, cfg.model.potential, gamma, cfg.flow, &e.ladder(r)).eta);
    bs += format("%s%.3f", bs.empty() ? "" : ",", eta_r.back() / (0.05 * 0.05 * r));
  }
  const double sl = fit_loglog(lams, eta_l).slope, sr = fit_loglog(rs, eta_r).slope;
  const double secs = seconds_since(t0);
  return {std::fabs(sl - 2.0) <= 0.1 && std::fabs(sr - 1.0) <= 0.2 && secs < 600.0,
          format("slope in lambda %.3f, slope in r %.3f; eta/(lambda^2 r) = {%s}; %.0f s", sl, sr, bs.c_str(), secs)};
}

Row insulating_bound(Experiments& e) {
  const RunConfig& cfg = e.config();
  const int L = cfg.ed_L;
  const double beta = cfg.ed_beta_or_default();
  const std::vector<Momentum> ks = probe_grid(L, beta, 6);
  bool pass = true;
  std::string detail;
  for (double r : {-0.05, -0.1, -0.2})
    for (double lam : {0.0, 0.05}) {
      const Regime1Flow f = flow_regime1(lam, r, cfg.model.potential, cfg.model.gamma, cfg.flow);
      const SpectralData sd = diagonalize(build_hamiltonian(L, lam, r, cfg.model.potential), beta);
      double ma = 0.0, me = 0.0;
      for (const Momentum& kk : ks) {
        ma = std::max(ma, std::abs(two_point_regime1(kk, f).value));
        me = std::max(me, std::abs(schwinger_momentum(kk, sd)));
      }
      const double bound = 2.0 / std::fabs(r);
      pass = pass && ma <= bound && me <= bound;
      detail += format("%sr=%g lambda=%g: %.3f / %.3f", detail.empty() ? "" : "; ", r, lam, ma, me);
    }
  return {pass, "max|S| assembly / ED vs 2/|r|: " + detail};
}

Row critical_structure(Experiments& e) {
  const RunConfig& cfg = e.config();
  const int L = cfg.ed_L;
  const double beta = cfg.ed_beta_or_default();
  const std::vector<Momentum> grid = probe_grid(L, beta, 6);
  bool pass = true;
  std::string detail;
  for (double lam : {0.05, 0.025}) {
    const Regime1Flow f = flow_regime1(lam, 0.0, cfg.model.potential, cfg.model.gamma, cfg.flow);
    const SpectralData sd = diagonalize(build_hamiltonian(L, lam, 0.0, cfg.model.potential), beta);
    std::vector<Momentum> ka;
    std::vector<cplx> sa, se;
    int refused = 0;
    for (const Momentum& kk : grid) {
      se.push_back(schwinger_momentum(kk, sd));
      try {
        sa.push_back(two_point_regime1(kk, f).value);
        ka.push_back(kk);
      } catch (const FlowError&) {
        ++refused;
      }
    }
    const CriticalFit a = fit_critical(ka, sa), b = fit_critical(grid, se);
    const double ca = a.residual / lam, cb = b.residual / lam;
    pass = pass && ca <= 1.0 && cb <= 1.0 && std::fabs(a.alpha - 1.0) <= lam && std::fabs(b.alpha - 1.0) <= lam;
    detail += format("%slambda=%g: assembly C=%.4f alpha-1=%.2e, ED C=%.4f alpha-1=%.2e", detail.empty() ? "" : "; ",
                     lam, ca, a.alpha - 1.0, cb, b.alpha - 1.0);
    if (refused) detail += format(" (%d momenta below the floor)", refused);
  }
  return {pass, detail + "; bounds C <= 1, |alpha-1| <= lambda"};
}

Row determinism(Experiments& e) {
  RunConfig small = e.config();
  small.model.L = 6;
  small.model.beta = 8.0;
  small.model.r = 0.125;
  small.model.lambda = 0.05;
  small.ed_L = 6;
  small.ed_beta = 12.0;
  small.tree_endpoints = 3;
  small.tree_depth = 3;
  small.tree_samples = 50;
  small.flow.depth_r2 = 4;
  small.flow.eta_window = 2;
  const std::filesystem::path root = e.config().out / "determinism";
  std::ostringstream log;
  for (const char* run : {"a", "b"}) {
    RunConfig c = small;
    c.out = root / run;
    for (const char* cmd : {"free", "trees", "ed", "crossover", "flow"}) run_subcommand(cmd, c, log);
    c.model.r = -0.1;
    c.out = root / run / "insulating";
    run_subcommand("flow", c, log);
  }
  int files = 0, differ = 0;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root / "a")) {
    if (!entry.is_regular_file()) continue;
    ++files;
    if (!same_bytes(entry.path(), root / "b" / std::filesystem::relative(entry.path(), root / "a"))) ++differ;
  }
  return {files > 0 && differ == 0, format("%d artifacts compared, %d differ", files, differ)};
}

using RowFn = Row (*)(Experiments&);
struct RowSpec {
  const char* name;
  RowFn fn;
};

const RowSpec kRows[kCriterionCount] = {
    {"free-theory equivalence", free_equivalence},
    {"ED oracle at zero coupling", ed_oracle},
    {"regime-1 propagator scaling", regime1_envelopes},
    {"quasi-particle propagator scaling", regime2_envelopes},
    {"crossover matching", crossover_matching},
    {"truncated expectations", truncated_expectations},
    {"Gram-Hadamard bound", gram_hadamard},
    {"tree identities", tree_rows},
    {"parity and localization", parity},
    {"nu shooting", nu_shooting_row},
    {"anomalous exponent scaling", eta_scaling},
    {"insulating bound", insulating_bound},
    {"critical-point structure", critical_structure},
    {"determinism", determinism},
};

}  // namespace

CriterionResult Experiments::run(int id) {
  if (id < 1 || id > kCriterionCount) throw std::out_of_range("criterion id " + std::to_string(id));
  CriterionResult res;
  res.id = id;
  res.name = kRows[id - 1].name;
  const auto t0 = Clock::now();
  try {
    const Row row = kRows[id - 1].fn(*this);
    res.pass = row.pass;
    res.detail = row.detail;
  } catch (const std::exception& ex) {
    res.pass = false;
    res.detail = std::string("error: ") + ex.what();
  }
  res.seconds = seconds_since(t0);
  return res;
}

std::vector<CriterionResult> Experiments::run_all(const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) {
    out.push_back(run(id));
    if (on_result) on_result(out.back());
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  return format("[%s] %2d %s: %s (%.1f s)", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str(),
                r.seconds);
}

CsvTable report_table(const std::vector<CriterionResult>& results) {
  CsvTable t({"id", "criterion", "pass", "detail", "seconds"});
  for (const CriterionResult& r : results)
    t.add_row({num(r.id), r.name, r.pass ? "true" : "false", r.detail, format("%.1f", r.seconds)});
  return t;
}

nlohmann::ordered_json report_json(const std::vector<CriterionResult>& results) {
  nlohmann::ordered_json j;
  j["schema"] = "chainrg.report/1";
  bool all = true;
  j["criteria"] = nlohmann::ordered_json::array();
  for (const CriterionResult& r : results) {
    all = all && r.pass;
    j["criteria"].push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail},
                             {"seconds", r.seconds}});
  }
  j["pass"] = all;
  return j;
}

}  // namespace chainrg

#include "chainrg/scale.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>

#include "chainrg/csv.hpp"
#include "json.hpp"

namespace chainrg {

using std::numbers::pi;

namespace {

double mollifier(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }

double clamp_cos(double c) { return std::clamp(c, -1.0, 1.0); }

double fold_momentum(double k) { return std::remainder(k, 2.0 * pi); }

}  // namespace

double chi0(double t, double gamma) {
  t = std::fabs(t);
  if (t <= 1.0) return 1.0;
  if (t >= gamma) return 0.0;
  const double s = (t - 1.0) / (gamma - 1.0);
  const double a = mollifier(1.0 - s), b = mollifier(s);
  return a / (a + b);
}

double smooth_step(double u) {
  if (u <= -0.5) return 0.0;
  if (u >= 0.5) return 1.0;
  const double s = u + 0.5;
  const double a = mollifier(s), b = mollifier(1.0 - s);
  return a / (a + b);
}

double aperture(double r, double gamma) { return (0.5 - r) / gamma; }

int crossover_scale(double r, double gamma) {
  if (r == 0.0) return kNoCrossover;
  const double a0 = aperture(r, gamma);
  // a0 gamma^{h+1} grows with h; walk down until it no longer exceeds |r|.
  int h = 0;
  while (a0 * std::pow(gamma, h + 1) > std::fabs(r)) --h;
  while (!(a0 * std::pow(gamma, h + 1) > std::fabs(r))) ++h;
  return h;
}

CouplingsR1 CouplingHistory::at(int h) const {
  auto it = values_.find(h);
  return it == values_.end() ? CouplingsR1{} : it->second;
}

double chi_leq(int h, Momentum kk, const ScaleContext& ctx) {
  const CouplingsR1 c = ctx.freeze_cutoff ? CouplingsR1{} : ctx.couplings.at(h);
  const double gh = std::pow(ctx.gamma, h);
  const double t0 = (1.0 + c.z) * kk.k0;
  const double t1 = (1.0 + c.alpha) * (std::cos(kk.k) - 1.0) + ctx.r + gh * c.mu;
  return chi0(std::sqrt(t0 * t0 + t1 * t1) / (gh * ctx.a0()), ctx.gamma);
}

cplx inverse_propagator_r1(int h, Momentum kk, const ScaleContext& ctx) {
  const CouplingsR1 c = ctx.couplings.at(h);
  return {(1.0 + c.alpha) * (std::cos(kk.k) - 1.0) + ctx.r + std::pow(ctx.gamma, h) * c.mu, -(1.0 + c.z) * kk.k0};
}

cplx single_scale_momentum(int h, Momentum kk, const ScaleContext& ctx, bool cumulative) {
  const double f = cumulative ? chi_leq(h, kk, ctx) : chi_leq(h, kk, ctx) - chi_leq(h - 1, kk, ctx);
  if (f == 0.0) return 0.0;
  return f / inverse_propagator_r1(h - 1, kk, ctx);
}

cplx ultraviolet_momentum(Momentum kk, double r, double gamma) {
  ScaleContext ctx;
  ctx.r = r;
  ctx.gamma = gamma;
  const double f = 1.0 - chi_leq(0, kk, ctx);
  if (f == 0.0) return 0.0;
  return f * free_propagator_momentum(kk, r);
}

Regime2Frame regime2_frame(double r, double gamma, const CouplingsR1& at_hstar) {
  const FermiData fd = fermi_data(r);
  Regime2Frame fr;
  fr.r = r;
  fr.gamma = gamma;
  fr.pF = fd.pF;
  fr.vF = fd.vF;
  fr.z = at_hstar.z;
  fr.alpha = at_hstar.alpha;
  fr.hstar = crossover_scale(r, gamma);
  return fr;
}

double chi_leq_r2(int h, Momentum kk, const Regime2Frame& fr) {
  const double gh = std::pow(fr.gamma, h);
  const double t0 = (1.0 + fr.z) * kk.k0;
  const double t1 = (1.0 + fr.alpha) * (std::cos(kk.k) - std::cos(fr.pF));
  return chi0(std::sqrt(t0 * t0 + t1 * t1) / (gh * fr.a0()), fr.gamma);
}

double qp_weight(int omega, double k, double pF) { return smooth_step(omega * fold_momentum(k) / pF); }

cplx inverse_propagator_r2(Momentum kk, const Regime2Frame& fr) {
  return {(1.0 + fr.alpha) * (std::cos(kk.k) - std::cos(fr.pF)), -(1.0 + fr.z) * kk.k0};
}

namespace {

double qp_cutoff(int h, int omega, Momentum kk, const Regime2Frame& fr, bool cumulative) {
  const double w = qp_weight(omega, kk.k, fr.pF);
  if (w == 0.0) return 0.0;
  const double c = chi_leq_r2(h, kk, fr);
  return w * (cumulative ? c : c - chi_leq_r2(h - 1, kk, fr));
}

}  // namespace

cplx qp_momentum(int h, int omega, Momentum kk, const Regime2Frame& fr, bool cumulative) {
  const double f = qp_cutoff(h, omega, kk, fr, cumulative);
  if (f == 0.0) return 0.0;
  return f / inverse_propagator_r2(kk, fr);
}

cplx luttinger_momentum(int h, int omega, Momentum kk, const Regime2Frame& fr) {
  const double f = qp_cutoff(h, omega, kk, fr, false);
  if (f == 0.0) return 0.0;
  const double kp = fold_momentum(kk.k - omega * fr.pF);
  return f / cplx(-(1.0 + fr.alpha) * omega * fr.vF * kp, -(1.0 + fr.z) * kk.k0);
}

int fft_size(int n) {
  n = std::max(n, 1);
  for (int m = n;; ++m) {
    int q = m;
    for (int p : {2, 3, 5})
      while (q % p == 0) q /= p;
    if (q == 1) return m;
  }
}

namespace {

// Frequency rows needed to cover |k0| <= k0max with fourfold time oversampling.
int rows_for(double k0max, double beta) {
  const int half = static_cast<int>(std::ceil(k0max * beta / (2.0 * pi))) + 1;
  return fft_size(4 * half);
}

}  // namespace

TorusSize torus_for_r1(int h, const ScaleContext& ctx, double size_factor) {
  const double a0 = ctx.a0(), gh = std::pow(ctx.gamma, h);
  TorusSize ts;
  ts.beta = size_factor / (gh * a0);
  const double k0max = 1.5 * ctx.gamma * gh * a0;
  ts.n0 = rows_for(k0max, ts.beta);
  const double kout = std::acos(clamp_cos(1.0 - ctx.r - 1.5 * ctx.gamma * gh * a0));
  const double kin = std::acos(clamp_cos(1.0 - ctx.r + gh * a0 / ctx.gamma));
  const double width = std::max(kout - kin, 1e-3);
  const double resolve = kout > 0.0 ? 16.0 * pi / kout : 8.0;
  ts.n1 = fft_size(static_cast<int>(std::ceil(std::max(size_factor / width, resolve))));
  return ts;
}

TorusSize torus_for_r2(int h, const Regime2Frame& fr, double size_factor) {
  const double a0 = fr.a0(), gh = std::pow(fr.gamma, h);
  TorusSize ts;
  ts.beta = size_factor / (gh * a0);
  ts.n0 = rows_for(1.5 * fr.gamma * gh * a0, ts.beta);
  const double width = gh * a0 / fr.vF;
  ts.n1 = fft_size(static_cast<int>(std::ceil(std::max(size_factor / width, 16.0 * pi / width))));
  return ts;
}

namespace {

using MomentumFn = std::function<cplx(Momentum)>;
using ColumnPred = std::function<bool(double)>;
using Sizer = std::function<TorusSize(double)>;

SparseMomentum sample(const TorusSize& ts, const MomentumFn& fn, const ColumnPred& pred) {
  return sample_momentum(ts.beta, ts.n0, ts.n1, fn, pred);
}

// Probe points: origin, the largest tabulated value and a few offsets.
std::vector<std::pair<double, double>> probes(const PositionWindow& pos) {
  std::size_t arg = 0;
  for (std::size_t j = 0; j < pos.data.size(); ++j)
    if (std::abs(pos.data[j]) > std::abs(pos.data[arg])) arg = j;
  const int width = 2 * pos.xhalf + 1;
  const int a = static_cast<int>(arg / width), x = static_cast<int>(arg % width) - pos.xhalf;
  const double t = pos.time(a) > pos.beta / 2 ? pos.time(a) - pos.beta : pos.time(a);
  const double b = pos.beta, l = pos.xhalf;
  return {{0.0, 0.0},        {t, double(x)},          {b / 64, 0.0},          {-b / 64, 0.0},
          {0.0, std::round(l / 4)}, {b / 32, std::round(l / 2)}, {-b / 128, std::round(l / 8)}};
}

struct Refined {
  SparseMomentum momentum;
  PositionWindow position;
  double change;
};

Refined refine_table(const Sizer& sizer, const MomentumFn& fn, const ColumnPred& pred, int xhalf,
                     const QuadratureOptions& opt, const std::string& what) {
  double factor = opt.size_factor;
  SparseMomentum mom = sample(sizer(factor), fn, pred);
  PositionWindow pos = sparse_to_window(mom, xhalf);
  double change = 0.0;
  for (int d = 0; d <= opt.max_doublings; ++d) {
    SparseMomentum mom2 = sample(sizer(2.0 * factor), fn, pred);
    const double sup = pos.sup_norm();
    change = 0.0;
    for (auto [x0, x] : probes(pos))
      change = std::max(change, std::abs(evaluate_position(mom, x0, x) - evaluate_position(mom2, x0, x)));
    change = sup > 0.0 ? change / sup : 0.0;
    if (change <= opt.rel_tol) return {std::move(mom), std::move(pos), change};
    factor *= 2.0;
    mom = std::move(mom2);
    pos = sparse_to_window(mom, xhalf);
  }
  throw QuadratureError(what + ": relative change " + std::to_string(change) + " under refinement exceeds " +
                        std::to_string(opt.rel_tol) + " at torus factor " + std::to_string(factor));
}

cplx refine_point(const Sizer& sizer, const MomentumFn& fn, const ColumnPred& pred, double x0, double x,
                  const QuadratureOptions& opt, const std::string& what) {
  double factor = opt.size_factor;
  cplx v = evaluate_position(sample(sizer(factor), fn, pred), x0, x);
  double change = 0.0;
  for (int d = 0; d <= opt.max_doublings; ++d) {
    const SparseMomentum mom2 = sample(sizer(2.0 * factor), fn, pred);
    const cplx v2 = evaluate_position(mom2, x0, x);
    const double ref = std::max({std::abs(v2), std::abs(evaluate_position(mom2, 0.0, 0.0)), 1e-300});
    change = std::abs(v2 - v) / ref;
    if (change <= opt.rel_tol) return v2;
    factor *= 2.0;
    v = v2;
  }
  throw QuadratureError(what + ": point value not converged, relative change " + std::to_string(change));
}

std::string scale_label(const char* what, int h) { return std::string(what) + " on scale " + std::to_string(h); }

ColumnPred r1_columns(int h, const ScaleContext& ctx) {
  return [h, &ctx](double k) { return chi_leq(h, {0.0, k}, ctx) > 0.0; };
}

ColumnPred r2_columns(int h, int omega, const Regime2Frame& fr) {
  return [h, omega, &fr](double k) { return qp_weight(omega, k, fr.pF) > 0.0 && chi_leq_r2(h, {0.0, k}, fr) > 0.0; };
}

int window_r1(int h, const ScaleContext& ctx) {
  const double gh = std::pow(ctx.gamma, h);
  return static_cast<int>(std::ceil(16.0 / std::sqrt(gh * ctx.a0()))) + 2;
}

int window_r2(int h, const Regime2Frame& fr) {
  return static_cast<int>(std::ceil(16.0 * fr.vF / (std::pow(fr.gamma, h) * fr.a0()))) + 2;
}

// Multiplies column x by e^{-i omega pF x}.
void strip_fermi_phase(PositionWindow& pos, int omega, double pF) {
  for (int x = -pos.xhalf; x <= pos.xhalf; ++x) {
    const cplx ph = std::polar(1.0, -omega * pF * x);
    for (int a = 0; a < pos.n0; ++a) pos(a, x) *= ph;
  }
}

}  // namespace

double PropagatorTable::sup_norm() const { return values.sup_norm(); }

void PropagatorTable::write_csv(const std::filesystem::path& path) const {
  CsvTable t({"h", "omega", "x0", "x", "re", "im"});
  for (int a = 0; a < values.n0; ++a)
    for (int x = -values.xhalf; x <= values.xhalf; ++x) {
      const cplx v = values(a, x);
      t.add_row({csv_number(static_cast<long long>(h)), csv_number(static_cast<long long>(omega)),
                 csv_number(values.time(a)), csv_number(static_cast<long long>(x)), csv_number(v.real()),
                 csv_number(v.imag())});
    }
  t.write(path);
}

void PropagatorTable::write_metadata(const std::filesystem::path& path) const {
  nlohmann::ordered_json j;
  j["schema"] = "chainrg.propagator_table/1";
  j["h"] = h;
  j["regime"] = regime == Regime::One ? 1 : 2;
  j["omega"] = omega;
  j["kind"] = kind;
  j["r"] = r;
  j["gamma"] = gamma;
  j["beta_torus"] = values.beta;
  j["n0"] = values.n0;
  j["n1"] = torus_sites;
  j["xhalf"] = values.xhalf;
  j["refinement_change"] = refinement_change;
  j["sup_norm"] = sup_norm();
  auto& c = j["couplings"] = nlohmann::ordered_json::array();
  for (const auto& [s, v] : couplings) c.push_back({{"h", s}, {"z", v.z}, {"alpha", v.alpha}, {"mu", v.mu}});
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << j.dump(2) << "\n";
}

PropagatorTable tabulate_single_scale(int h, const ScaleContext& ctx, const QuadratureOptions& opt,
                                      bool cumulative, Derivative d) {
  auto sizer = [&](double f) { return torus_for_r1(h, ctx, f); };
  auto fn = [&](Momentum kk) {
    cplx v = single_scale_momentum(h, kk, ctx, cumulative);
    for (int j = 0; j < d.time; ++j) v *= cplx(0.0, kk.k0);
    for (int j = 0; j < d.space; ++j) v *= cplx(0.0, std::sin(kk.k));
    return v;
  };
  Refined rf = refine_table(sizer, fn, r1_columns(h, ctx), window_r1(h, ctx), opt,
                            scale_label("regime-1 propagator table", h));
  PropagatorTable t;
  t.h = h;
  t.regime = Regime::One;
  t.r = ctx.r;
  t.gamma = ctx.gamma;
  t.kind = cumulative ? "cumulative" : "single_scale";
  t.couplings = ctx.couplings.values();
  t.torus_sites = rf.momentum.n1;
  t.values = std::move(rf.position);
  t.refinement_change = rf.change;
  return t;
}

PropagatorTable tabulate_qp(int h, int omega, const Regime2Frame& fr, const QuadratureOptions& opt,
                            bool cumulative) {
  auto sizer = [&](double f) { return torus_for_r2(h, fr, f); };
  auto fn = [&](Momentum kk) { return qp_momentum(h, omega, kk, fr, cumulative); };
  Refined rf = refine_table(sizer, fn, r2_columns(h, omega, fr), window_r2(h, fr), opt,
                            scale_label("quasi-particle table", h));
  PropagatorTable t;
  t.h = h;
  t.regime = Regime::Two;
  t.omega = omega;
  t.r = fr.r;
  t.gamma = fr.gamma;
  t.kind = cumulative ? "cumulative" : "single_scale";
  t.torus_sites = rf.momentum.n1;
  t.values = std::move(rf.position);
  strip_fermi_phase(t.values, omega, fr.pF);
  t.refinement_change = rf.change;
  return t;
}

cplx single_scale_propagator(int h, double x0, int x, const ScaleContext& ctx, const QuadratureOptions& opt) {
  auto sizer = [&](double f) { return torus_for_r1(h, ctx, f); };
  auto fn = [&](Momentum kk) { return single_scale_momentum(h, kk, ctx); };
  return refine_point(sizer, fn, r1_columns(h, ctx), x0, x, opt, scale_label("regime-1 propagator", h));
}

cplx qp_propagator(int h, int omega, double x0, int x, const Regime2Frame& fr, const QuadratureOptions& opt,
                   bool cumulative) {
  auto sizer = [&](double f) { return torus_for_r2(h, fr, f); };
  auto fn = [&](Momentum kk) { return qp_momentum(h, omega, kk, fr, cumulative); };
  return std::polar(1.0, -omega * fr.pF * x) *
         refine_point(sizer, fn, r2_columns(h, omega, fr), x0, x, opt, scale_label("quasi-particle propagator", h));
}

LuttingerSplit luttinger_decompose(int h, int omega, double x0, int x, const Regime2Frame& fr,
                                   const QuadratureOptions& opt) {
  const cplx full = qp_propagator(h, omega, x0, x, fr, opt);
  auto sizer = [&](double f) { return torus_for_r2(h, fr, f); };
  auto fn = [&](Momentum kk) { return luttinger_momentum(h, omega, kk, fr); };
  const cplx lut = std::polar(1.0, -omega * fr.pF * x) *
                   refine_point(sizer, fn, r2_columns(h, omega, fr), x0, x, opt,
                                scale_label("Luttinger propagator", h));
  return {lut, full - lut};
}

LuttingerTables tabulate_luttinger(int h, int omega, const Regime2Frame& fr, const QuadratureOptions& opt) {
  LuttingerTables out;
  out.full = tabulate_qp(h, omega, fr, opt);
  // Same torus as the full table so that the difference is pointwise.
  TorusSize ts{out.full.values.beta, out.full.values.n0, out.full.torus_sites};
  auto fn = [&](Momentum kk) { return luttinger_momentum(h, omega, kk, fr); };
  out.luttinger = out.full;
  out.luttinger.kind = "luttinger";
  out.luttinger.values = sparse_to_window(sample(ts, fn, r2_columns(h, omega, fr)), out.full.values.xhalf);
  strip_fermi_phase(out.luttinger.values, omega, fr.pF);
  out.remainder = out.full;
  out.remainder.kind = "remainder";
  for (std::size_t j = 0; j < out.full.values.data.size(); ++j)
    out.remainder.values.data[j] = out.full.values.data[j] - out.luttinger.values.data[j];
  return out;
}

double support_measure_r1(int h, const ScaleContext& ctx) {
  const double a0 = ctx.a0(), gh = std::pow(ctx.gamma, h);
  const double k0max = 1.5 * ctx.gamma * gh * a0;
  const double kmax = std::acos(clamp_cos(1.0 - ctx.r - 1.5 * ctx.gamma * gh * a0));
  const int n = 800;
  const double d0 = 2.0 * k0max / n, d1 = 2.0 * kmax / n;
  std::vector<double> row(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double k0 = -k0max + i * d0;
    double s = 0.0;
    for (int j = 0; j <= n; ++j) {
      const Momentum kk{k0, -kmax + j * d1};
      s += chi_leq(h, kk, ctx) - chi_leq(h - 1, kk, ctx);
    }
    row[i] = s * d1;
  }
  double total = 0.0;
  for (double v : row) total += v;
  return total * d0 / (4.0 * pi * pi);
}

}  // namespace chainrg

namespace chainrg {

namespace {

// First abscissa where the running maximum from the right drops below
// max/e, interpolated linearly in log between samples.
double efold(const std::vector<double>& mag, double step) {
  std::vector<double> env(mag.size());
  double run = 0.0;
  for (std::size_t j = mag.size(); j-- > 0;) env[j] = run = std::max(run, mag[j]);
  const double target = env[0] / std::exp(1.0);
  for (std::size_t j = 1; j < env.size(); ++j) {
    if (env[j] <= target) {
      const double l0 = std::log(env[j - 1]), l1 = std::log(env[j]);
      const double frac = l0 == l1 ? 0.0 : (l0 - std::log(target)) / (l0 - l1);
      return (j - 1 + frac) * step;
    }
  }
  return static_cast<double>(env.size()) * step;
}

}  // namespace

DecayLengths envelope_decay_lengths(const PositionWindow& pos) {
  std::vector<double> t(pos.n0 / 2 + 1), s(pos.xhalf + 1);
  for (std::size_t a = 0; a < t.size(); ++a) t[a] = std::abs(pos(static_cast<int>(a), 0));
  for (int x = 0; x <= pos.xhalf; ++x) s[x] = std::abs(pos(0, x));
  return {efold(t, pos.beta / pos.n0), efold(s, 1.0)};
}

}  // namespace chainrg

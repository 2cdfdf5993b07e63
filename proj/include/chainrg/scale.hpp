#pragma once

#include <climits>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

#include "chainrg/model.hpp"
#include "chainrg/torus.hpp"

namespace chainrg {

// Returned by crossover_scale when no crossover exists (r = 0).
inline constexpr int kNoCrossover = INT_MIN;

// Even smooth bump: 1 on |t| <= 1, 0 on |t| >= gamma, built from the
// exp(-1/u) mollifier and monotone in between.
double chi0(double t, double gamma);

// Smooth step with smooth_step(u) + smooth_step(-u) = 1, equal to 0 for
// u <= -1/2 and 1 for u >= 1/2.
double smooth_step(double u);

// gamma^{-1} (1/2 - r).
double aperture(double r, double gamma);

int crossover_scale(double r, double gamma);

struct CouplingsR1 {
  double z = 0.0;
  double alpha = 0.0;
  double mu = 0.0;  // rescaled: the mass shift on scale h is gamma^h mu_h
};

// Regime-1 couplings by scale; scales never set read as zero.
class CouplingHistory {
 public:
  CouplingsR1 at(int h) const;
  void set(int h, const CouplingsR1& c) { values_[h] = c; }
  const std::map<int, CouplingsR1>& values() const { return values_; }

 private:
  std::map<int, CouplingsR1> values_;
};

struct ScaleContext {
  double r = 0.0;
  double gamma = 2.0;
  CouplingHistory couplings;
  bool freeze_cutoff = false;  // evaluate the cutoff argument with zero couplings

  double a0() const { return aperture(r, gamma); }
};

// Regime-1 cumulative cutoff chi_{<=h}.
double chi_leq(int h, Momentum kk, const ScaleContext& ctx);
// (1+z_h)(-i k0) + (1+alpha_h)(cos k - 1) + r + gamma^h mu_h.
cplx inverse_propagator_r1(int h, Momentum kk, const ScaleContext& ctx);
// f_h / D_{h-1}; with cumulative set, chi_{<=h} / D_{h-1}.
cplx single_scale_momentum(int h, Momentum kk, const ScaleContext& ctx, bool cumulative = false);
// Ultraviolet remainder (1 - chi_{<=0}) / D_free.
cplx ultraviolet_momentum(Momentum kk, double r, double gamma);

// Data fixed at the crossover for the quasi-particle regime.
struct Regime2Frame {
  double r = 0.0;
  double gamma = 2.0;
  double pF = 0.0;
  double vF = 0.0;
  double z = 0.0;      // z_{h*}
  double alpha = 0.0;  // alpha_{h*}
  int hstar = 0;

  double a0() const { return aperture(r, gamma); }
};

Regime2Frame regime2_frame(double r, double gamma, const CouplingsR1& at_hstar = {});

// chi_{<=h} for h <= h*, measured from the Fermi surface.
double chi_leq_r2(int h, Momentum kk, const Regime2Frame& fr);
// Quasi-particle weight smooth_step(omega k / pF), k folded into [-pi, pi).
double qp_weight(int omega, double k, double pF);
// -i k0 (1+z*) + (1+alpha*)(cos k - cos pF).
cplx inverse_propagator_r2(Momentum kk, const Regime2Frame& fr);
// Quasi-particle single-scale (or cumulative, chi_{<=h}) propagator at
// lattice momentum k. Position space carries the extra phase e^{-i omega pF x}.
cplx qp_momentum(int h, int omega, Momentum kk, const Regime2Frame& fr, bool cumulative = false);
// Same cutoff over the linearized denominator -i k0 - omega vF (k - omega pF).
cplx luttinger_momentum(int h, int omega, Momentum kk, const Regime2Frame& fr);

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadratureOptions {
  double rel_tol = 1e-7;
  double size_factor = 256.0;  // torus extent in units of the scale's decay lengths
  int max_doublings = 3;
};

// Torus extents adapted to one scale: time length in units of gamma^{-h}/a0,
// length in units of the inverse momentum width of the support.
struct TorusSize {
  double beta = 1.0;
  int n0 = 0;
  int n1 = 0;
};

TorusSize torus_for_r1(int h, const ScaleContext& ctx, double size_factor);
TorusSize torus_for_r2(int h, const Regime2Frame& fr, double size_factor);

// Smallest 2^a 3^b 5^c not below n.
int fft_size(int n);

enum class Regime { One, Two };

struct PropagatorTable {
  int h = 0;
  Regime regime = Regime::One;
  int omega = 0;  // 0 when no quasi-particle index applies
  double r = 0.0;
  double gamma = 2.0;
  std::string kind;            // "single_scale", "cumulative", "luttinger", "remainder"
  std::map<int, CouplingsR1> couplings;
  PositionWindow values;       // position space, sites |x| <= xhalf
  int torus_sites = 0;
  double refinement_change = 0.0;

  double sup_norm() const;
  void write_csv(const std::filesystem::path& path) const;
  void write_metadata(const std::filesystem::path& path) const;
};

// Position-space tables by FFT; each is compared against a torus twice as
// large in both directions and refused when the relative change exceeds
// rel_tol.
// Derivatives act in momentum space: d0 multiplies by i k0 and the lattice
// derivative by i sin k.
struct Derivative {
  int time = 0;
  int space = 0;
};

PropagatorTable tabulate_single_scale(int h, const ScaleContext& ctx, const QuadratureOptions& opt = {},
                                      bool cumulative = false, Derivative d = {});
PropagatorTable tabulate_qp(int h, int omega, const Regime2Frame& fr, const QuadratureOptions& opt = {},
                            bool cumulative = false);

// Point evaluations with the same refinement rule.
cplx single_scale_propagator(int h, double x0, int x, const ScaleContext& ctx, const QuadratureOptions& opt = {});
cplx qp_propagator(int h, int omega, double x0, int x, const Regime2Frame& fr, const QuadratureOptions& opt = {},
                   bool cumulative = false);

struct LuttingerSplit {
  cplx luttinger;
  cplx remainder;
};
LuttingerSplit luttinger_decompose(int h, int omega, double x0, int x, const Regime2Frame& fr,
                                   const QuadratureOptions& opt = {});

// Sup-norm tables of the Luttinger part and the remainder on a common torus.
struct LuttingerTables {
  PropagatorTable full;
  PropagatorTable luttinger;
  PropagatorTable remainder;
};
LuttingerTables tabulate_luttinger(int h, int omega, const Regime2Frame& fr, const QuadratureOptions& opt = {});

// Measure (1/(2 pi)^2) int dk0 dk f_h of the regime-1 single-scale support.
double support_measure_r1(int h, const ScaleContext& ctx);

}  // namespace chainrg

namespace chainrg {

// e-folding lengths of the running-maximum envelope of |g| along the time
// axis (x = 0, tau in [0, beta/2]) and the site axis (tau = 0, x >= 0).
struct DecayLengths {
  double time = 0.0;
  double space = 0.0;
};
DecayLengths envelope_decay_lengths(const PositionWindow& pos);

}  // namespace chainrg

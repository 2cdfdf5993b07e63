#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "chainrg/diagrams.hpp"
#include "json.hpp"

namespace chainrg {

// A coupling left its admissible range; the message names the scale.
class FlowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FlowOptions {
  DiagramOptions regime1;
  DiagramOptions regime2{4, 40.0, 80.0, 1e-2, 2};
  int floor_r1 = -8;       // lowest regime-1 scale integrated at r = 0
  int depth_r2 = 24;       // hmin = h* - depth_r2
  int eta_window = 10;     // eta averaged over the last scales of the run
  double bound_r1 = 10.0;  // |z_h|, |alpha_h|, |mu_h| < bound_r1 |lambda|
  double bound_r2 = 4.0;   // |lambda_h|, |delta_h| <= bound_r2 |lambda| r^{1/2 + theta}
  double theta = 0.25;
  double localize_tolerance = 1e-3;
};

// ---------------------------------------------------------------------------
// Regime 1

struct Regime1Step {
  int h = 0;           // scale whose integration generated the kernel (1 = ultraviolet)
  LocalParts local;
  double d1 = 0.0;     // |d/dk K(0)|, zero by parity
  double sunset = 0.0; // |second-order part at 0|
  CouplingsR1 couplings; // couplings on scale h - 2 after the update
};

struct Regime1Flow {
  double lambda = 0.0;
  Potential v;
  ScaleContext ctx;     // running couplings by scale
  int stop = 0;         // h* for r != 0, floor_r1 at r = 0
  int lowest = 0;       // lowest scale whose kernel was computed
  std::shared_ptr<const UltravioletKernel> ultraviolet;
  std::vector<std::shared_ptr<const KernelR1>> kernels;  // scales 0, -1, ..., lowest
  std::vector<Regime1Step> steps;

  CouplingsR1 at_stop() const { return ctx.couplings.at(stop); }
  // Ultraviolet plus every computed kernel at kk.
  cplx total_kernel(Momentum kk) const;
};

// c_{h-2} = c_{h-1} + L K(h), with K(1) the ultraviolet kernel and the mass
// in rescaled form: mu_{h-2} = gamma mu_{h-1} + gamma^{-(h-2)} K(h)(0).
// Runs to h* for r != 0 (kernels down to h*+2 when r > 0, down to h* when
// r < 0) and to floor_r1 at r = 0.
Regime1Flow flow_regime1(double lambda, double r, const Potential& v, double gamma, const FlowOptions& opt = {});

// Two-point function assembled from the dressed single-scale propagators:
// S(k) = sum_j g^{(j)}(k) Q_j(k), Q_j = 1 - (K_tot(k) - L_j(k)) / D_{j-1}(k),
// where L_j = D_{j-1} - D_free is the local part already in the propagator
// of scale j and K_tot the sum of all kernels. Exact at first order in the
// part of the kernel not yet localized; r <= 0 only.
struct TwoPoint {
  cplx value;
  double q_deviation = 0.0;  // max_j |Q_j - 1|
  int lowest_scale = 1;      // h_k
};
TwoPoint two_point_regime1(Momentum kk, const Regime1Flow& flow);

// ---------------------------------------------------------------------------
// Regime 2

struct CouplingsR2 {
  double lambda = 0.0;
  double delta = 0.0;
  double nu = 0.0;
  double Z = 1.0;
};

// One-loop increments on scale h for species +:
//   z      4 lambda^2 Re(i dS/dk0)
//   lambda 2 lambda^2 bubble
//   delta  -4 lambda^2 dS/dk - z vel
//   nu     gamma^{-h} K(0), K(0) = 2 lambda [tadpole - gamma^h nu nu_ins - delta delta_ins] + 4 lambda^2 S(0)
struct BetaR2 {
  double z = 0.0;
  double lambda = 0.0;
  double delta = 0.0;
  double nu = 0.0;
};

BetaR2 beta_r2(const QpDiagrams& d, const CouplingsR2& c, double gamma, double vel);
// lambda_{h-1} = (lambda_h + b_lambda)/(1+z)^2, delta_{h-1} = (delta_h + b_delta)/(1+z),
// nu_{h-1} = gamma (nu_h + b_nu)/(1+z), Z_{h-1} = Z_h (1+z).
CouplingsR2 step_r2(const CouplingsR2& c, const BetaR2& b, double gamma);

// lambda (vhat(0) - vhat(2 pF)); delta = nu = 0, Z = 1.
CouplingsR2 initial_couplings_r2(double lambda, const Potential& v, double pF);

// Coupling-independent diagrams on scales h*, h*-1, ..., hmin+1.
struct QpLadder {
  Regime2Frame frame;
  int hmin = 0;
  std::vector<QpDiagrams> diagrams;  // index i is scale h* - i
};
QpLadder build_ladder(const Regime2Frame& fr, int hmin, const DiagramOptions& opt);

struct Regime2Row {
  int h = 0;
  CouplingsR2 couplings;
  double z = 0.0;  // z_h producing Z_{h-1}
};

struct Regime2Run {
  std::vector<Regime2Row> rows;  // h*, h*-1, ..., hmin
  double eta = 0.0;
};

// Runs the ladder from c at h*; throws FlowError on a bound violation unless
// check_bounds is false.
Regime2Run run_regime2(const QpLadder& ladder, const CouplingsR2& start, double lambda, const FlowOptions& opt,
                       bool check_bounds = true);

// eta = log_gamma(Z_{h-1}/Z_h) averaged over the last `window` steps.
double extract_eta(const std::vector<Regime2Row>& rows, double gamma, int window);

struct Shooting {
  double nu_hstar = 0.0;
  double nu_hmin = 0.0;
  int iterations = 0;
  Regime2Run run;
};
// Secant iteration on nu_{h*} until |nu_hmin| <= target; the solution must lie
// within |nu_{h*}| <= bound_r1 |lambda|.
Shooting nu_shooting(const QpLadder& ladder, CouplingsR2 start, double lambda, const FlowOptions& opt);

// ---------------------------------------------------------------------------

struct TrajectoryRow {
  int h = 0;
  std::optional<double> z, alpha, mu, lambda, delta, nu, Z;
};

struct FlowTrajectory {
  double lambda = 0.0;
  double r = 0.0;
  double gamma = 2.0;
  int hstar = 0;
  int hmin = 0;
  double eta = 0.0;
  std::optional<Shooting> shooting;
  std::vector<TrajectoryRow> rows;

  void write_csv(const std::filesystem::path& path) const;
  nlohmann::ordered_json summary() const;
};

// Regime 1 then, for r > 0, regime 2 with nu shooting. The ladder may be
// supplied to reuse diagrams across couplings.
FlowTrajectory run_flow(double lambda, double r, const Potential& v, double gamma, const FlowOptions& opt,
                        const QpLadder* ladder = nullptr);

}  // namespace chainrg

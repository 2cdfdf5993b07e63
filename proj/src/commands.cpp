#include "chainrg/commands.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "chainrg/ed.hpp"
#include "chainrg/experiments.hpp"
#include "chainrg/fit.hpp"
#include "chainrg/flow.hpp"
#include "chainrg/scale.hpp"

namespace chainrg {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

std::vector<double> numeric_column(const CsvTable& t, const std::string& name) {
  std::size_t j = 0;
  while (j < t.header().size() && t.header()[j] != name) ++j;
  std::vector<double> out;
  for (const auto& row : t.rows()) out.push_back(std::stod(row.at(j)));
  return out;
}

int cmd_free(const RunConfig& cfg, std::ostream& log) {
  const CsvTable t = free_crosscheck({cfg.model.r}, cfg.model.L, cfg.model.beta);
  t.write(cfg.out / "free.csv");
  const double worst = column_max(t, "difference");
  write_json(cfg.out / "free.json", {{"schema", "chainrg.free/1"},
                                     {"r", cfg.model.r},
                                     {"L", cfg.model.L},
                                     {"beta", cfg.model.beta},
                                     {"points", t.rows().size()},
                                     {"max_difference", worst}});
  log << "free: max |time - Matsubara| = " << worst << " over " << t.rows().size() << " points\n";
  return 0;
}

int cmd_propagator(const RunConfig& cfg, std::ostream& log) {
  const double r = cfg.model.r, gamma = cfg.model.gamma;
  ScaleContext ctx;
  ctx.r = r;
  ctx.gamma = gamma;
  json j{{"schema", "chainrg.propagator/1"}, {"r", r}, {"gamma", gamma}};

  const PropagatorTable top = tabulate_single_scale(-2, ctx, cfg.quadrature);
  top.write_csv(cfg.out / "propagator_h-2.csv");
  top.write_metadata(cfg.out / "propagator_h-2.json");

  const int hstar = r == 0.0 ? kNoCrossover : crossover_scale(r, gamma);
  const int hmin = r == 0.0 ? cfg.flow.floor_r1 : std::max(hstar, cfg.flow.floor_r1);
  const CsvTable r1 = regime1_scaling(r, gamma, hmin, cfg.quadrature);
  r1.write(cfg.out / "propagator_r1.csv");
  json j1{{"hmin", hmin}};
  const std::vector<double> sup = numeric_column(r1, "sup_over_gamma_h2");
  if (!sup.empty()) j1["sup_spread"] = column_max(r1, "sup_over_gamma_h2") / column_min(r1, "sup_over_gamma_h2");
  if (sup.size() >= 3) {
    std::vector<double> scale;
    for (double h : numeric_column(r1, "h")) scale.push_back(std::pow(gamma, -h));
    j1["time_length_exponent"] = fit_loglog(scale, numeric_column(r1, "time_length")).slope;
    j1["space_length_exponent"] = fit_loglog(scale, numeric_column(r1, "space_length")).slope;
  }
  j["regime1"] = j1;
  log << "propagator: regime 1 on scales -2.." << hmin << '\n';

  if (r > 0.0) {
    const CsvTable r2 = regime2_scaling(r, gamma, 6, cfg.quadrature);
    r2.write(cfg.out / "propagator_r2.csv");
    const std::vector<double> hs = numeric_column(r2, "h"), rem = numeric_column(r2, "remainder_relative");
    std::vector<double> logs;
    for (double v : rem) logs.push_back(std::log(v));
    j["regime2"] = {
        {"hstar", hstar},
        {"vF", fermi_data(r).vF},
        {"sup_spread", column_max(r2, "sup_over_gamma_h_vF") / column_min(r2, "sup_over_gamma_h_vF")},
        // Relative remainder against gamma^h: 1 means gamma^h/vF^2 suppression, 2 means gamma^{2h}/vF^2.
        {"remainder_exponent", fit_line(hs, logs).slope / std::log(gamma)}};
    log << "propagator: regime 2 on scales " << hstar - 1 << ".." << hstar - 6 << '\n';
  }
  write_json(cfg.out / "propagator.json", j);
  return 0;
}

int cmd_trees(const RunConfig& cfg, std::ostream& log) {
  const CsvTable t = tree_identities(cfg.tree_endpoints, cfg.tree_depth, cfg.tree_samples, cfg.seed);
  t.write(cfg.out / "trees.csv");
  long long checked = 0, failures = 0, vf_bad = 0;
  double min1 = HUGE_VAL;
  for (const auto& row : t.rows()) {
    checked += std::stoll(row[3]);
    failures += std::stoll(row[4]);
    vf_bad += std::stoll(row[6]);
    if (row[0] == "1") min1 = std::min(min1, std::stod(row[5]));
  }
  const bool ok = failures == 0 && vf_bad == 0 && min1 >= 0.5;
  write_json(cfg.out / "trees.json", {{"schema", "chainrg.trees/1"},
                                      {"endpoints", cfg.tree_endpoints},
                                      {"depth", cfg.tree_depth},
                                      {"seed", cfg.seed},
                                      {"checked", checked},
                                      {"identity_failures", failures},
                                      {"vf_mismatches", vf_bad},
                                      {"min_dimension_regime1", min1},
                                      {"pass", ok}});
  log << "trees: " << checked << " trees, " << failures << " identity failures, " << vf_bad << " vF mismatches\n";
  return ok ? 0 : 1;
}

int cmd_flow(const RunConfig& cfg, std::ostream& log) {
  const FlowTrajectory t = run_flow(cfg.model.lambda, cfg.model.r, cfg.model.potential, cfg.model.gamma, cfg.flow);
  t.write_csv(cfg.out / "flow.csv");
  write_json(cfg.out / "flow.json", t.summary());
  log << "flow: eta = " << t.eta << " over " << t.rows.size() << " scales\n";
  return 0;
}

int cmd_ed(const RunConfig& cfg, std::ostream& log) {
  const int L = cfg.ed_L;
  const double beta = cfg.ed_beta_or_default(), lam = cfg.model.lambda, r = cfg.model.r;
  const Potential& v = cfg.model.potential;

  const std::vector<double> rs{-0.2, -0.1, 0.0, 0.1, 0.25, 0.5, 1.0};
  std::vector<double> lams{0.0};
  if (lam != 0.0) lams.push_back(lam);
  CsvTable phase({"r", "lambda", "ground_density", "thermal_density", "charge_gap"});
  for (const PhaseRow& p : phase_diagnostics(L, beta, rs, lams, v))
    phase.add_row({csv_number(p.r), csv_number(p.lambda), csv_number(p.ground_density), csv_number(p.thermal_density),
                   csv_number(p.charge_gap)});
  phase.write(cfg.out / "ed_phase.csv");

  const SpectralData sd = diagonalize(build_hamiltonian(L, lam, r, v), beta);
  CsvTable time({"x", "tau", "S"});
  for (int x = 0; x < L; ++x)
    for (int j = 0; j < 16; ++j) {
      const double tau = beta * j / 16;
      time.add_row({csv_number(static_cast<long long>(x)), csv_number(tau), csv_number(thermal_two_point(x, tau, sd))});
    }
  time.write(cfg.out / "ed_two_point.csv");

  CsvTable mom({"k0", "k", "re", "im"});
  double largest = 0.0;
  for (double k0 : matsubara_grid(beta, 4))
    for (double k : momentum_grid(L)) {
      const cplx s = schwinger_momentum({k0, k}, sd);
      largest = std::max(largest, std::abs(s));
      mom.add_row({csv_number(k0), csv_number(k), csv_number(s.real()), csv_number(s.imag())});
    }
  mom.write(cfg.out / "ed_momentum.csv");
  save_spectral(sd, (cfg.out / "ed_spectral.bin").string());

  write_json(cfg.out / "ed.json", {{"schema", "chainrg.ed/1"},
                                   {"L", L},
                                   {"beta", beta},
                                   {"lambda", lam},
                                   {"r", r},
                                   {"ground_energy", sd.ground_energy},
                                   {"max_abs_momentum", largest}});
  log << "ed: L = " << L << ", beta = " << beta << ", ground energy " << sd.ground_energy << '\n';
  return 0;
}

int cmd_crossover(const RunConfig& cfg, std::ostream& log) {
  const double gamma = cfg.model.gamma;
  const CsvTable t = crossover_table(gamma);
  t.write(cfg.out / "crossover.csv");
  const double lo = column_min(t, "ratio"), hi = column_max(t, "ratio");
  const bool ok = lo >= 1.0 / (gamma * gamma) && hi <= gamma * gamma;
  write_json(cfg.out / "crossover.json",
             {{"schema", "chainrg.crossover/1"}, {"gamma", gamma}, {"min_ratio", lo}, {"max_ratio", hi}, {"pass", ok}});
  log << "crossover: ratios in [" << lo << ", " << hi << "]\n";
  return ok ? 0 : 1;
}

int cmd_report(const RunConfig& cfg, std::ostream& log) {
  Experiments ex(cfg);
  const std::vector<CriterionResult> results =
      ex.run_all([&](const CriterionResult& r) { log << format_result(r) << std::endl; });
  report_table(results).write(cfg.out / "report.csv");
  const json j = report_json(results);
  write_json(cfg.out / "report.json", j);
  return j["pass"].get<bool>() ? 0 : 1;
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names{"free", "propagator", "trees", "flow", "ed", "crossover", "report"};
  return names;
}

int run_subcommand(const std::string& name, const RunConfig& cfg, std::ostream& log) {
  fs::create_directories(cfg.out);
  if (name == "free") return cmd_free(cfg, log);
  if (name == "propagator") return cmd_propagator(cfg, log);
  if (name == "trees") return cmd_trees(cfg, log);
  if (name == "flow") return cmd_flow(cfg, log);
  if (name == "ed") return cmd_ed(cfg, log);
  if (name == "crossover") return cmd_crossover(cfg, log);
  if (name == "report") return cmd_report(cfg, log);
  throw std::invalid_argument("unknown subcommand '" + name + "'");
}

}  // namespace chainrg

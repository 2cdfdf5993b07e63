#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chainrg/commands.hpp"
#include "chainrg/config.hpp"

using namespace chainrg;

namespace {

// A numeric override bound to every subcommand that accepts it.
template <class T>
struct Override {
  T value{};
  std::vector<CLI::Option*> options;

  void add(CLI::App* sub, const std::string& flag, const std::string& help = "") {
    options.push_back(sub->add_option(flag, value, help));
  }
  void apply(T& target) const {
    for (const CLI::Option* o : options)
      if (o->count() > 0) target = value;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiscale analysis of an interacting fermion chain"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", out, "output directory (overrides CHAINRG_OUT and the config)");
  CLI::Option* seed_opt = app.add_option("--seed", seed, "random seed");

  Override<double> lambda, r, gamma, beta;
  Override<int> L, n, depth, samples;

  auto* free = app.add_subcommand("free", "time-domain vs Matsubara free propagator");
  r.add(free, "--r");
  L.add(free, "--L");
  beta.add(free, "--beta");

  auto* prop = app.add_subcommand("propagator", "single-scale propagator tables and scaling");
  r.add(prop, "--r");
  gamma.add(prop, "--gamma");

  auto* trees = app.add_subcommand("trees", "tree identity checks");
  n.add(trees, "--n", "largest endpoint count");
  depth.add(trees, "--depth");
  samples.add(trees, "--samples");

  auto* flow = app.add_subcommand("flow", "renormalization-group flow of the running couplings");
  lambda.add(flow, "--lambda");
  r.add(flow, "--r");
  depth.add(flow, "--depth", "regime-2 scales below the crossover");

  auto* ed = app.add_subcommand("ed", "exact diagonalization scans");
  L.add(ed, "--L");
  beta.add(ed, "--beta");
  lambda.add(ed, "--lambda");
  r.add(ed, "--r");

  auto* cross = app.add_subcommand("crossover", "regime-1 / regime-2 bound matching");
  gamma.add(cross, "--gamma");

  app.add_subcommand("report", "run every acceptance check");

  CLI11_PARSE(app, argc, argv);
  const std::string name = app.get_subcommands().front()->get_name();

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (const char* env = std::getenv("CHAINRG_OUT"); env && *env) cfg.out = env;
    if (!out.empty()) cfg.out = out;
    if (seed_opt->count() > 0) cfg.seed = seed;
    lambda.apply(cfg.model.lambda);
    r.apply(cfg.model.r);
    gamma.apply(cfg.model.gamma);
    if (name == "ed") {
      L.apply(cfg.ed_L);
      beta.apply(cfg.ed_beta);
    } else {
      L.apply(cfg.model.L);
      beta.apply(cfg.model.beta);
    }
    n.apply(cfg.tree_endpoints);
    samples.apply(cfg.tree_samples);
    if (name == "flow")
      depth.apply(cfg.flow.depth_r2);
    else
      depth.apply(cfg.tree_depth);
    try {
      cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("invalid settings: ") + e.what());
    }
    return run_subcommand(name, cfg, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << name << ": " << e.what() << '\n';
    return 1;
  }
}

#include <filesystem>
#include <fstream>
#include <sstream>

#include "chainrg/commands.hpp"
#include "chainrg/config.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace chainrg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "chainrg-cli-test" / name;
  fs::remove_all(p);
  return p;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "run.ini");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config sections and defaults") {
    const RunConfig c = parse_config(
        "; comment\n"
        "[model]\n"
        "lambda = 0.05\n"
        "r = -0.1\n"
        "potential = 0, 0.5, 0.25 ; v(0), v(1), v(2)\n"
        "[flow]\n"
        "depth_r2 = 30   # scales\n"
        "[ed]\n"
        "L = 8\n"
        "[run]\n"
        "seed = 42\n"
        "out = results\n");
    CHECK(c.model.lambda == 0.05);
    CHECK(c.model.r == -0.1);
    CHECK(c.model.potential.values == std::vector<double>{0.0, 0.5, 0.25});
    CHECK(c.flow.depth_r2 == 30);
    CHECK(c.ed_L == 8);
    CHECK(c.ed_beta_or_default() == 32.0);
    CHECK(c.seed == 42);
    CHECK(c.out == fs::path("results"));
    CHECK(c.model.gamma == 2.0);
    CHECK(c.tree_endpoints == 3);
  }

  TEST_CASE("config errors carry the line") {
    CHECK(error_of("[model]\nlambda = 0.1\nlamda = 0.2\n").rfind("run.ini:3: unknown key 'model.lamda'", 0) == 0);
    CHECK(error_of("[model]\n\nr = abc\n").rfind("run.ini:3: model.r: cannot parse", 0) == 0);
    CHECK(error_of("[flow]\ntheta = 0.25\n[trees\n").rfind("run.ini:3:", 0) == 0);
    CHECK(error_of("[model]\ngamma = 3\n").find("gamma must lie in (1, 2]") != std::string::npos);
    CHECK(error_of("[flow]\ndepth_r2 = 5\n").find("depth_r2") != std::string::npos);
    CHECK_THROWS_AS(load_config("/nonexistent/run.ini"), ConfigError);
  }

  TEST_CASE("free with defaults stays below 1e-8") {
    RunConfig c;
    c.out = scratch("free");
    std::ostringstream log;
    CHECK(run_subcommand("free", c, log) == 0);
    const auto j = read_json(c.out / "free.json");
    CHECK(j["schema"] == "chainrg.free/1");
    CHECK(j["max_difference"].get<double>() < 1e-8);
    CHECK(fs::exists(c.out / "free.csv"));
  }

  TEST_CASE("trees with three endpoints all pass") {
    RunConfig c;
    c.out = scratch("trees");
    c.tree_endpoints = 3;
    c.tree_depth = 3;
    std::ostringstream log;
    CHECK(run_subcommand("trees", c, log) == 0);
    const auto j = read_json(c.out / "trees.json");
    CHECK(j["pass"] == true);
    CHECK(j["identity_failures"] == 0);
  }

  TEST_CASE("flow at zero coupling: eta = 0 and all couplings zero") {
    for (double r : {-0.1, 0.25}) {
      RunConfig c;
      c.out = scratch("flow");
      c.model.lambda = 0.0;
      c.model.r = r;
      c.flow.depth_r2 = 4;
      c.flow.eta_window = 2;
      std::ostringstream log;
      CHECK(run_subcommand("flow", c, log) == 0);
      CHECK(read_json(c.out / "flow.json")["eta"] == 0.0);
      std::istringstream csv(read_text(c.out / "flow.csv"));
      std::string line;
      std::getline(csv, line);
      CHECK(line == "h,z,alpha,mu,lambda,delta,nu,Z\r");
      int rows = 0;
      while (std::getline(csv, line)) {
        ++rows;
        std::istringstream cells(line.substr(0, line.size() - 1));
        std::string cell;
        std::getline(cells, cell, ',');  // h
        for (int k = 0; k < 6 && std::getline(cells, cell, ','); ++k)
          if (!cell.empty()) CHECK(std::stod(cell) == 0.0);
      }
      CHECK(rows > 0);
    }
  }

  TEST_CASE("identical config and seed give identical bytes") {
    RunConfig c;
    c.tree_endpoints = 4;
    c.tree_depth = 3;
    c.tree_samples = 200;
    c.seed = 11;
    std::ostringstream log;
    const fs::path first = scratch("det_a");
    c.out = first;
    run_subcommand("trees", c, log);
    run_subcommand("crossover", c, log);
    c.out = scratch("det_b");
    run_subcommand("trees", c, log);
    run_subcommand("crossover", c, log);
    for (const char* f : {"trees.csv", "trees.json", "crossover.csv"})
      CHECK(read_text(first / f) == read_text(c.out / f));
  }

  TEST_CASE("unknown subcommand") {
    RunConfig c;
    c.out = scratch("unknown");
    std::ostringstream log;
    CHECK_THROWS_AS(run_subcommand("plot", c, log), std::invalid_argument);
    CHECK(subcommand_names().size() == 7);
  }
}

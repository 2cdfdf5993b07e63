#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "chainrg/flow.hpp"
#include "chainrg/model.hpp"
#include "chainrg/scale.hpp"

namespace chainrg {

// Message carries "<source>:<line>: " whenever a line is known.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  ModelParams model;
  QuadratureOptions quadrature;
  FlowOptions flow;
  int tree_endpoints = 3;
  int tree_depth = 4;
  int tree_samples = 1000;
  int ed_L = 10;
  double ed_beta = 0.0;  // 0 selects 4 L
  std::filesystem::path out = "out";
  std::uint64_t seed = 1;

  double ed_beta_or_default() const { return ed_beta > 0.0 ? ed_beta : 4.0 * ed_L; }
  void validate() const;
};

// INI text: [section] headers and key = value lines, ';' or '#' comments.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

}  // namespace chainrg

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "chainrg/config.hpp"

namespace chainrg {

const std::vector<std::string>& subcommand_names();

// Runs one subcommand with its artifacts under cfg.out and progress lines on
// log. Returns the exit status; refusals from the modules propagate as
// exceptions.
int run_subcommand(const std::string& name, const RunConfig& cfg, std::ostream& log);

}  // namespace chainrg

#include "chainrg/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace chainrg {

namespace pt = boost::property_tree;

namespace {

// Line of `key` inside [section]; 0 when absent.
int line_of(const std::string& text, const std::string& section, const std::string& key) {
  std::istringstream in(text);
  std::string line, current;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::string t = boost::trim_copy(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      current = boost::trim_copy(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq != std::string::npos && current == section && boost::trim_copy(t.substr(0, eq)) == key) return n;
  }
  return 0;
}

template <class T>
T parse_value(const std::string& s) {
  try {
    return boost::lexical_cast<T>(boost::trim_copy(s));
  } catch (const boost::bad_lexical_cast&) {
    throw std::invalid_argument("cannot parse '" + s + "'");
  }
}

Potential parse_potential(const std::string& s) {
  Potential v;
  v.values.clear();
  std::vector<std::string> parts;
  boost::split(parts, s, boost::is_any_of(","));
  for (const auto& p : parts) v.values.push_back(parse_value<double>(p));
  return v;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"model.lambda", [](RunConfig& c, const std::string& s) { c.model.lambda = parse_value<double>(s); }},
      {"model.r", [](RunConfig& c, const std::string& s) { c.model.r = parse_value<double>(s); }},
      {"model.gamma", [](RunConfig& c, const std::string& s) { c.model.gamma = parse_value<double>(s); }},
      {"model.L", [](RunConfig& c, const std::string& s) { c.model.L = parse_value<int>(s); }},
      {"model.beta", [](RunConfig& c, const std::string& s) { c.model.beta = parse_value<double>(s); }},
      {"model.M", [](RunConfig& c, const std::string& s) { c.model.M = parse_value<int>(s); }},
      {"model.potential", [](RunConfig& c, const std::string& s) { c.model.potential = parse_potential(s); }},
      {"quadrature.rel_tol", [](RunConfig& c, const std::string& s) { c.quadrature.rel_tol = parse_value<double>(s); }},
      {"quadrature.size_factor",
       [](RunConfig& c, const std::string& s) { c.quadrature.size_factor = parse_value<double>(s); }},
      {"quadrature.max_doublings",
       [](RunConfig& c, const std::string& s) { c.quadrature.max_doublings = parse_value<int>(s); }},
      {"diagrams.window",
       [](RunConfig& c, const std::string& s) { c.flow.regime1.window = c.flow.regime2.window = parse_value<int>(s); }},
      {"diagrams.time_factor",
       [](RunConfig& c, const std::string& s) {
         c.flow.regime1.time_factor = c.flow.regime2.time_factor = parse_value<double>(s);
       }},
      {"diagrams.space_factor_r1",
       [](RunConfig& c, const std::string& s) { c.flow.regime1.space_factor = parse_value<double>(s); }},
      {"diagrams.space_factor_r2",
       [](RunConfig& c, const std::string& s) { c.flow.regime2.space_factor = parse_value<double>(s); }},
      {"diagrams.step",
       [](RunConfig& c, const std::string& s) { c.flow.regime1.step = c.flow.regime2.step = parse_value<double>(s); }},
      {"flow.floor_r1", [](RunConfig& c, const std::string& s) { c.flow.floor_r1 = parse_value<int>(s); }},
      {"flow.depth_r2", [](RunConfig& c, const std::string& s) { c.flow.depth_r2 = parse_value<int>(s); }},
      {"flow.eta_window", [](RunConfig& c, const std::string& s) { c.flow.eta_window = parse_value<int>(s); }},
      {"flow.bound_r1", [](RunConfig& c, const std::string& s) { c.flow.bound_r1 = parse_value<double>(s); }},
      {"flow.bound_r2", [](RunConfig& c, const std::string& s) { c.flow.bound_r2 = parse_value<double>(s); }},
      {"flow.theta", [](RunConfig& c, const std::string& s) { c.flow.theta = parse_value<double>(s); }},
      {"flow.localize_tolerance",
       [](RunConfig& c, const std::string& s) { c.flow.localize_tolerance = parse_value<double>(s); }},
      {"trees.endpoints", [](RunConfig& c, const std::string& s) { c.tree_endpoints = parse_value<int>(s); }},
      {"trees.depth", [](RunConfig& c, const std::string& s) { c.tree_depth = parse_value<int>(s); }},
      {"trees.samples", [](RunConfig& c, const std::string& s) { c.tree_samples = parse_value<int>(s); }},
      {"ed.L", [](RunConfig& c, const std::string& s) { c.ed_L = parse_value<int>(s); }},
      {"ed.beta", [](RunConfig& c, const std::string& s) { c.ed_beta = parse_value<double>(s); }},
      {"run.out", [](RunConfig& c, const std::string& s) { c.out = boost::trim_copy(s); }},
      {"run.seed", [](RunConfig& c, const std::string& s) { c.seed = parse_value<std::uint64_t>(s); }},
  };
  return table;
}

// Drops a trailing "; ..." or "# ..." comment.
std::string strip_comment(const std::string& value) {
  for (std::size_t i = 1; i < value.size(); ++i)
    if ((value[i] == ';' || value[i] == '#') && std::isspace(static_cast<unsigned char>(value[i - 1])))
      return boost::trim_copy(value.substr(0, i));
  return value;
}

std::string where(const std::string& source, int line) {
  return line > 0 ? source + ":" + std::to_string(line) + ": " : source + ": ";
}

}  // namespace

void RunConfig::validate() const {
  model.validate();
  if (flow.depth_r2 < 20) throw std::invalid_argument("flow.depth_r2 must be at least 20");
  if (flow.eta_window < 1 || flow.eta_window > flow.depth_r2)
    throw std::invalid_argument("flow.eta_window must lie in [1, depth_r2]");
  if (flow.floor_r1 > 0) throw std::invalid_argument("flow.floor_r1 must be <= 0");
  if (tree_endpoints < 1 || tree_endpoints > 5) throw std::invalid_argument("trees.endpoints must lie in 1..5");
  if (tree_depth < 1 || tree_depth > 8) throw std::invalid_argument("trees.depth must lie in 1..8");
  if (ed_L < 2 || ed_L > 12) throw std::invalid_argument("ed.L must lie in 2..12");
  if (!(quadrature.rel_tol > 0.0)) throw std::invalid_argument("quadrature.rel_tol must be positive");
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(where(source, static_cast<int>(e.line())) + e.message());
  }
  RunConfig cfg;
  for (const auto& [section, keys] : tree) {
    if (keys.empty() && !keys.data().empty())
      throw ConfigError(where(source, line_of(text, "", section)) + "key '" + section + "' outside a section");
    for (const auto& [key, value] : keys) {
      const int line = line_of(text, section, key);
      const auto it = setters().find(section + "." + key);
      if (it == setters().end()) throw ConfigError(where(source, line) + "unknown key '" + section + "." + key + "'");
      try {
        it->second(cfg, strip_comment(value.data()));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(where(source, line) + section + "." + key + ": " + e.what());
      }
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where(source, 0) + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  std::ostringstream s;
  s << in.rdbuf();
  return parse_config(s.str(), path.string());
}

}  // namespace chainrg

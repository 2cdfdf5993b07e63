#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "chainrg/config.hpp"
#include "chainrg/csv.hpp"
#include "chainrg/flow.hpp"
#include "json.hpp"

namespace chainrg {

// ---------------------------------------------------------------------------
// Tables shared by the subcommands and the acceptance rows

// Time-domain vs Matsubara S0 on x = 0..L-1, x0 = beta j / samples for
// |j| < samples (x0 = 0 included).
CsvTable free_crosscheck(const std::vector<double>& rs, int L, double beta, int samples = 64);

// Regime-1 envelopes on scales -2..hmin: sup|g|, sup|g| / gamma^{h/2}, decay lengths.
CsvTable regime1_scaling(double r, double gamma, int hmin, const QuadratureOptions& opt);
// Quasi-particle envelopes on h*-1..h*-depth, with the Luttinger split.
CsvTable regime2_scaling(double r, double gamma, int depth, const QuadratureOptions& opt);

// Identity checks per endpoint count and regime. Assignments are exhaustive
// up to three endpoints and sampled (per labelled tree) beyond.
CsvTable tree_identities(int max_n, int depth, int samples, std::uint64_t seed);

// Regime-1 over regime-2 envelope bound at h* for l in {2, 4, 6}, r = 2^-3..2^-10.
CsvTable crossover_table(double gamma);

// Largest entry of a numeric column.
double column_max(const CsvTable& t, const std::string& column);
double column_min(const CsvTable& t, const std::string& column);

// ---------------------------------------------------------------------------
// Acceptance rows

inline constexpr int kCriterionCount = 14;

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

class Experiments {
 public:
  explicit Experiments(RunConfig cfg) : cfg_(std::move(cfg)) {}

  const RunConfig& config() const { return cfg_; }
  // Exceptions inside a row turn into a failed row carrying the message.
  CriterionResult run(int id);
  std::vector<CriterionResult> run_all(const std::function<void(const CriterionResult&)>& on_result = {});

  // Regime-2 ladder over depth_r2 scales, built once per r.
  const QpLadder& ladder(double r);

 private:
  RunConfig cfg_;
  std::map<double, QpLadder> ladders_;
};

std::string format_result(const CriterionResult& r);
CsvTable report_table(const std::vector<CriterionResult>& results);
nlohmann::ordered_json report_json(const std::vector<CriterionResult>& results);

}  // namespace chainrg

#include <cstdio>
#include <filesystem>

#include "chainrg/experiments.hpp"

using namespace chainrg;

int main() {
  RunConfig cfg;
  cfg.out = std::filesystem::temp_directory_path() / "chainrg-acceptance";
  Experiments ex(cfg);
  int failed = 0;
  for (int id = 1; id <= kCriterionCount; ++id) {
    const CriterionResult r = ex.run(id);
    if (!r.pass) ++failed;
    std::printf("%s\n", format_result(r).c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria pass\n", kCriterionCount - failed, kCriterionCount);
  return failed == 0 ? 0 : 1;
}

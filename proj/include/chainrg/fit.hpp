#pragma once

#include <vector>

namespace chainrg {

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
};

// Ordinary least squares y = intercept + slope x.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
// Same on (log x, log y); every value must be positive.
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace chainrg

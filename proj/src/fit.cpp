#include "chainrg/fit.hpp"

#include <boost/math/statistics/linear_regression.hpp>

#include <cmath>
#include <stdexcept>

namespace chainrg {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("line fit needs two or more matched points");
  const auto [c0, c1] = boost::math::statistics::simple_ordinary_least_squares(x, y);
  return {c0, c1};
}

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw std::invalid_argument("log-log fit needs positive values");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit_line(lx, ly);
}

}  // namespace chainrg

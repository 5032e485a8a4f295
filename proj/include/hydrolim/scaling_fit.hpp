#pragma once

#include <vector>

namespace hydrolim {

struct ScalingFit {
  std::vector<double> x, y;
  double slope = 0.0;
  double intercept = 0.0;  ///< of log y against log x
  double r_squared = 0.0;
};

/// Least-squares line through (log x, log y).  Needs at least three points
/// with x, y > 0.
ScalingFit fit_slope(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace hydrolim

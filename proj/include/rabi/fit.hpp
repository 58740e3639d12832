#pragma once

#include <cstddef>
#include <vector>

namespace rabi {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t count = 0;
};

// Least squares for y = slope x + intercept.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Least-squares slope of log|y| against log x; entries with y == 0 are skipped.
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

// Pearson correlation; NaN when either series is constant.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

double median(std::vector<double> v);

}  // namespace rabi

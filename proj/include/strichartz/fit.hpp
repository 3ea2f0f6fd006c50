#pragma once

#include <cmath>
#include <span>
#include <utility>

#include "strichartz/error.hpp"

namespace strichartz {

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  int points = 0;
};

/// Ordinary least squares of log y against log x.
inline LogLogFit fit_loglog(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw DomainError("fit_loglog needs at least two points");
  const double n = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) throw DomainError("fit_loglog needs positive data");
    sx += std::log(x);
    sy += std::log(y);
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    const double dx = std::log(x) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y) - my);
  }
  if (!(sxx > 0.0)) throw DomainError("fit_loglog needs at least two distinct x values");
  LogLogFit fit;
  fit.points = static_cast<int>(points.size());
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (points.size() > 2) {
    double ssr = 0.0;
    for (const auto& [x, y] : points) {
      const double r = std::log(y) - (fit.intercept + fit.slope * std::log(x));
      ssr += r * r;
    }
    fit.stderr_slope = std::sqrt(ssr / (n - 2.0) / sxx);
  }
  return fit;
}

}  // namespace strichartz

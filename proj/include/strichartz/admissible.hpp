#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "strichartz/error.hpp"

namespace strichartz {

/// Exponent pair (p, q) with 1/p + 1/q = 1/2 and p > 2. q may be +infinity.
class AdmissiblePair {
 public:
  static constexpr double kTolerance = 1e-12;

  static AdmissiblePair make(double p, double q) {
    if (std::isnan(p) || std::isnan(q)) throw ConfigError("admissible pair: NaN exponent");
    if (!(p > 2.0)) {
      std::ostringstream os;
      os << "pair (" << p << ", " << q << ") is not admissible: p > 2 is violated";
      throw ConfigError(os.str());
    }
    const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
    const double defect = 1.0 / p + inv_q - 0.5;
    if (!(std::fabs(defect) <= kTolerance)) {
      std::ostringstream os;
      os.precision(17);
      os << "pair (" << p << ", " << q << ") is not admissible: 1/p + 1/q - 1/2 = " << defect;
      throw ConfigError(os.str());
    }
    return AdmissiblePair(p, q);
  }

  static bool is_admissible(double p, double q) noexcept {
    try {
      make(p, q);
      return true;
    } catch (const Error&) {
      return false;
    }
  }

  /// The partner exponent q = 2p / (p - 2).
  static AdmissiblePair from_p(double p) {
    if (!(p > 2.0)) throw ConfigError("admissible pair: p > 2 is violated");
    return make(p, 2.0 * p / (p - 2.0));
  }

  double p() const noexcept { return p_; }
  double q() const noexcept { return q_; }

  /// Derivative loss of the sharp estimate.
  double loss() const noexcept { return 1.0 / p_; }

 private:
  AdmissiblePair(double p, double q) : p_(p), q_(q) {}
  double p_;
  double q_;
};

}  // namespace strichartz

#pragma once

// Smooth compactly supported cutoffs. Everything is built from
// g(x) = exp(-1/x) (x > 0), whose derivatives all vanish at 0.

#include <cmath>

namespace strichartz {

namespace bump {

inline double flat_zero(double x) noexcept { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

/// C-infinity step: 0 for x <= 0, 1 for x >= 1.
inline double smooth_step(double x) noexcept {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = flat_zero(x);
  const double b = flat_zero(1.0 - x);
  return a / (a + b);
}

/// 1 on |r| <= 1, 0 on |r| >= 2, smooth monotone bridge in between.
inline double chi(double r) noexcept {
  const double a = std::fabs(r);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  return smooth_step(2.0 - a);
}

/// Bump supported in (-1/2, 1/2) with eta(0) = 1.
inline double eta(double x) noexcept {
  const double y = 4.0 * x * x;
  if (y >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - y));
}

}  // namespace bump

/// The cutoffs used for the frequency projectors and the concentration family.
///
/// phi(r) = chi(|r|) localizes the 2D symbol h^2 |k|^2 to [0, 2], so the
/// squared support radius is 2. psi(r) = chi(|r| / 4) equals one on [-4, 4],
/// which contains [-2, 2], hence psi(-h^2 m^2) psi(-h^2 n^2) = 1 wherever
/// phi(-h^2 (m^2 + n^2)) != 0.
struct BumpProfile {
  double phi_support_sq = 2.0;   // phi(r) = 0 for |r| >= this
  double psi_plateau = 4.0;      // psi(r) = 1 for |r| <= this
  double psi_support = 8.0;      // psi(r) = 0 for |r| >= this
  double eta_half_width = 0.5;   // eta supported in (-1/2, 1/2)

  double chi(double r) const noexcept { return bump::chi(r); }
  double phi(double r) const noexcept { return bump::chi(r); }
  double psi(double r) const noexcept { return bump::chi(r / psi_plateau); }
  double eta(double x) const noexcept { return bump::eta(x); }

  /// Largest |n| with psi(-h^2 n^2) != 0 is strictly below this radius.
  double psi_radius(double h) const noexcept { return std::sqrt(psi_support) / h; }
};

}  // namespace strichartz

#pragma once

// Schwartz kernels of the frequency-localized 1D half-propagators
//
//   K1(t, z) = (2 pi)^-1 sum_n psi(-h^2 n^2) exp(-i t n^2) exp(i n z)
//   K2(t, z) = (2 pi)^-1 sum_n psi(-h^2 n^2) exp(+i t n^2) exp(i n z)
//
// and their sup norms, which control the L^1 -> L^infinity decay of the
// localized 2D propagator through K = K1 (x) K2.

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <vector>

#include "strichartz/bump.hpp"
#include "strichartz/lattice.hpp"
#include "strichartz/transform.hpp"

namespace strichartz {

/// Truncation radius covering the whole support of psi(-h^2 n^2).
inline int kernel_radius(double h, const BumpProfile& profile = {}) {
  if (!(h > 0.0 && h <= 1.0)) throw DomainError("h must lie in (0, 1]");
  return static_cast<int>(std::ceil(profile.psi_radius(h)));
}

inline int min_zgrid_size(double h, const BumpProfile& profile = {}) { return 4 * (2 * kernel_radius(h, profile) + 1); }

/// K(t, .) tabulated on z_j = 2 pi j / Z, together with its defining series.
class KernelTable {
 public:
  KernelTable(double t, double h, int sign, const BumpProfile& profile, int zgrid_size)
      : t_(t), h_(h), sign_(sign >= 0 ? +1 : -1), n_max_(kernel_radius(h, profile)) {
    if (zgrid_size < 4 * (2 * n_max_ + 1))
      throw ConfigError("kernel z-grid too coarse: need at least 4(2 n_max + 1) points");
    SpectralField series(Dim::One, n_max_);
    auto c = series.coeffs();
    for (int n = -n_max_; n <= n_max_; ++n) {
      const double n2 = static_cast<double>(n) * n;
      c[static_cast<std::size_t>(n + n_max_)] = profile.psi(-h * h * n2) * std::polar(1.0, -sign_ * t * n2) / kTwoPi;
    }
    coeffs_.assign(c.begin(), c.end());
    GridSpec g;
    g.N = n_max_;
    g.M_x = zgrid_size;
    values_ = synthesize(series, g).storage();
  }

  double t() const noexcept { return t_; }
  double h() const noexcept { return h_; }
  int sign() const noexcept { return sign_; }
  int n_max() const noexcept { return n_max_; }
  int zgrid_size() const noexcept { return static_cast<int>(values_.size()); }
  std::span<const Complex> values() const noexcept { return values_; }
  std::span<const Complex> series() const noexcept { return coeffs_; }

  double z(int j) const noexcept { return kTwoPi * j / static_cast<double>(values_.size()); }

  /// Direct evaluation of the series at an arbitrary point.
  Complex eval(double z) const {
    Complex acc{};
    for (int n = -n_max_; n <= n_max_; ++n) acc += coeffs_[static_cast<std::size_t>(n + n_max_)] * std::polar(1.0, n * z);
    return acc;
  }

  /// Largest |K| over the tabulated points.
  double grid_max() const {
    double best = 0.0;
    for (const auto& v : values_) best = std::max(best, std::abs(v));
    return best;
  }

  /// sup_z |K(t, z)|: grid maxima refined by golden-section search between neighbours.
  double sup() const {
    const int Z = zgrid_size();
    const double gmax = grid_max();
    double best = gmax;
    for (int j = 0; j < Z; ++j) {
      const double here = std::abs(values_[static_cast<std::size_t>(j)]);
      if (here < kCandidateFraction * gmax) continue;
      const double left = std::abs(values_[static_cast<std::size_t>((j + Z - 1) % Z)]);
      const double right = std::abs(values_[static_cast<std::size_t>((j + 1) % Z)]);
      if (here < left || here < right) continue;
      best = std::max(best, refine(z(j - 1), z(j + 1)));
    }
    return best;
  }

 private:
  static constexpr double kCandidateFraction = 0.9;

  double refine(double lo, double hi) const {
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double fc = std::abs(eval(c));
    double fd = std::abs(eval(d));
    for (int it = 0; it < 60; ++it) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - ratio * (b - a);
        fc = std::abs(eval(c));
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + ratio * (b - a);
        fd = std::abs(eval(d));
      }
    }
    return std::max(fc, fd);
  }

  double t_;
  double h_;
  int sign_;
  int n_max_;
  std::vector<Complex> coeffs_;
  std::vector<Complex> values_;
};

/// Table of K1 (sign = +1) or K2 (sign = -1).
inline KernelTable kernel_1d(double t, double h, const BumpProfile& profile, int zgrid_size, int sign = +1) {
  return KernelTable(t, h, sign, profile, zgrid_size);
}

inline KernelTable kernel_1d(double t, double h, const BumpProfile& profile = {}) {
  return KernelTable(t, h, +1, profile, min_zgrid_size(h, profile));
}

/// sup |K1(t)| * sup |K2(t)|, the sup of the tensorized 2D kernel.
inline double kernel_2d_sup(double t, double h, const BumpProfile& profile = {}, int zgrid_size = 0) {
  const int Z = zgrid_size > 0 ? zgrid_size : min_zgrid_size(h, profile);
  return kernel_1d(t, h, profile, Z, +1).sup() * kernel_1d(t, h, profile, Z, -1).sup();
}

struct DispersiveSample {
  double t = 0.0;
  double sup = 0.0;     // sup_z |K1(t, z)|
  double scaled = 0.0;  // |t|^(1/2) sup_z |K1(t, z)|
};

inline std::vector<DispersiveSample> dispersive_profile(double h, std::span<const double> t_points,
                                                        const BumpProfile& profile = {}, int zgrid_size = 0) {
  if (t_points.empty()) throw DomainError("dispersive_profile needs at least one time");
  const int Z = zgrid_size > 0 ? zgrid_size : min_zgrid_size(h, profile);
  std::vector<DispersiveSample> out;
  out.reserve(t_points.size());
  for (double t : t_points) {
    if (!(t > 0.0 && t <= 1.0)) throw DomainError("dispersive_profile times must lie in (0, 1]");
    const double s = kernel_1d(t, h, profile, Z).sup();
    out.push_back({t, s, std::sqrt(t) * s});
  }
  return out;
}

/// n log-spaced times in [lo, hi].
inline std::vector<double> log_spaced(double lo, double hi, int n) {
  if (n < 1 || !(lo > 0.0) || !(hi >= lo)) throw DomainError("invalid log-spaced range");
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double step = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  out.back() = hi;
  return out;
}

namespace detail {
inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}
}  // namespace detail

/// Largest beta (scanning upward over the sampled t/h values) such that, for
/// every h, max |t|^(1/2) sup|K1| over t <= beta h stays within `factor`
/// times its median over the same range.
inline double estimate_alpha(const std::map<double, std::vector<DispersiveSample>>& profiles, double factor = 2.0) {
  std::vector<double> betas;
  for (const auto& [h, recs] : profiles)
    for (const auto& r : recs) betas.push_back(r.t / h);
  if (betas.empty()) throw DomainError("estimate_alpha needs samples");
  std::sort(betas.begin(), betas.end());
  betas.erase(std::unique(betas.begin(), betas.end()), betas.end());

  double alpha = betas.front();
  for (double beta : betas) {
    bool ok = true;
    for (const auto& [h, recs] : profiles) {
      std::vector<double> window;
      for (const auto& r : recs)
        if (r.t <= beta * h * (1.0 + 1e-12)) window.push_back(r.scaled);
      if (window.empty()) continue;
      const double mx = *std::max_element(window.begin(), window.end());
      if (mx > factor * detail::median(window)) {
        ok = false;
        break;
      }
    }
    if (!ok) break;
    alpha = beta;
  }
  return alpha;
}

}  // namespace strichartz

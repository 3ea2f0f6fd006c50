#pragma once

#include <cmath>
#include <span>

#include "strichartz/lattice.hpp"

namespace strichartz {

namespace detail {

/// |z|^q computed from |z|^2, with repeated multiplication for small even q.
class AbsPow {
 public:
  explicit AbsPow(double q) : q_(q), half_(q / 2.0) {
    if (q == 2.0) mode_ = Mode::Two;
    else if (q == 4.0) mode_ = Mode::Four;
    else if (q == 6.0) mode_ = Mode::Six;
    else if (q == 8.0) mode_ = Mode::Eight;
  }

  double operator()(double abs2) const noexcept {
    switch (mode_) {
      case Mode::Two: return abs2;
      case Mode::Four: return abs2 * abs2;
      case Mode::Six: return abs2 * abs2 * abs2;
      case Mode::Eight: {
        const double a4 = abs2 * abs2;
        return a4 * a4;
      }
      case Mode::General: break;
    }
    return abs2 > 0.0 ? std::pow(abs2, half_) : 0.0;
  }

  /// |z|^(q-2), the factor appearing in the derivative of |z|^q.
  double derivative_factor(double abs2) const noexcept {
    switch (mode_) {
      case Mode::Two: return 1.0;
      case Mode::Four: return abs2;
      case Mode::Six: return abs2 * abs2;
      case Mode::Eight: return abs2 * abs2 * abs2;
      case Mode::General: break;
    }
    return abs2 > 0.0 ? std::pow(abs2, half_ - 1.0) : 0.0;
  }

  double q() const noexcept { return q_; }

 private:
  enum class Mode { Two, Four, Six, Eight, General };
  double q_;
  double half_;
  Mode mode_ = Mode::General;
};

inline double sum_abs_pow(std::span<const Complex> samples, const AbsPow& pw) noexcept {
  double acc = 0.0;
  for (const Complex& z : samples) acc += pw(std::norm(z));
  return acc;
}

/// Quadrature weight (2 pi / M)^d.
inline double cell_volume(Dim dim, int M) noexcept {
  const double h = kTwoPi / static_cast<double>(M);
  return dim == Dim::One ? h : h * h;
}

}  // namespace detail

/// Rectangle-rule (integral of |u|^q over T^d)^(1/q).
inline double lq_norm(const PhysicalField& u, double q) {
  if (!(q >= 1.0)) throw DomainError("lq_norm requires q >= 1");
  const detail::AbsPow pw(q);
  const double integral = detail::cell_volume(u.dim(), u.M()) * detail::sum_abs_pow(u.samples(), pw);
  return integral > 0.0 ? std::pow(integral, 1.0 / q) : 0.0;
}

inline double lq_norm(const PhysicalField& u, double q, const GridSpec& g) {
  if (u.M() != g.M_x) throw ConfigError("sample grid does not match GridSpec");
  return lq_norm(u, q);
}

/// ((2 pi)^d sum_k (1+|k|^2)^s |c(k)|^2)^(1/2); equals the L^2 norm at s = 0.
inline double hs_norm(const SpectralField& f, double s) {
  const int N = f.N();
  const auto c = f.coeffs();
  double acc = 0.0;
  if (f.dim() == Dim::One) {
    for (int m = -N; m <= N; ++m) {
      const double w = s == 0.0 ? 1.0 : std::pow(1.0 + static_cast<double>(m) * m, s);
      acc += w * std::norm(c[static_cast<std::size_t>(m + N)]);
    }
    return std::sqrt(kTwoPi * acc);
  }
  std::size_t i = 0;
  for (int m = -N; m <= N; ++m)
    for (int n = -N; n <= N; ++n, ++i) {
      const double w = s == 0.0 ? 1.0 : std::pow(1.0 + static_cast<double>(m) * m + static_cast<double>(n) * n, s);
      acc += w * std::norm(c[i]);
    }
  return std::sqrt(kTwoPi * kTwoPi * acc);
}

/// Streaming midpoint-rule accumulator for (int_0^T ||u(t)||_q^p dt)^(1/p).
class MixedNormAccumulator {
 public:
  MixedNormAccumulator(double p, double q, int time_samples, double window = 1.0)
      : p_(p), q_(q), weight_(window / static_cast<double>(time_samples)) {
    if (!(p >= 1.0) || !(q >= 1.0)) throw DomainError("mixed_norm requires p, q >= 1");
    if (time_samples < 1) throw DomainError("mixed_norm requires a nonempty trajectory");
    if (!(window > 0.0)) throw DomainError("time window must be positive");
  }

  void add(const PhysicalField& slice) { add_norm(lq_norm(slice, q_)); }
  void add_norm(double lq) {
    acc_ += weight_ * std::pow(lq, p_);
    ++count_;
  }

  int count() const noexcept { return count_; }

  double value() const {
    if (count_ == 0) throw DomainError("mixed_norm of an empty trajectory");
    return acc_ > 0.0 ? std::pow(acc_, 1.0 / p_) : 0.0;
  }

 private:
  double p_;
  double q_;
  double weight_;
  double acc_ = 0.0;
  int count_ = 0;
};

/// Mixed L^p_t L^q_x norm of a trajectory sampled at the midpoints
/// t_k = (k + 1/2) T / M_t of [0, T].
inline double mixed_norm(std::span<const PhysicalField> trajectory, double p, double q, double window = 1.0) {
  if (trajectory.empty()) throw DomainError("mixed_norm of an empty trajectory");
  MixedNormAccumulator acc(p, q, static_cast<int>(trajectory.size()), window);
  for (const auto& slice : trajectory) acc.add(slice);
  return acc.value();
}

inline double mixed_norm(std::span<const PhysicalField> trajectory, double p, double q, const GridSpec& g, double window = 1.0) {
  if (static_cast<int>(trajectory.size()) != g.M_t) throw ConfigError("trajectory length does not match M_t");
  return mixed_norm(trajectory, p, q, window);
}

}  // namespace strichartz

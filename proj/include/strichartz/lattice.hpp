#pragma once

// Coefficient-space and sample-space representations of functions on the
// one- and two-dimensional torus, plus the discretization parameters that
// tie them together.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "strichartz/error.hpp"

namespace strichartz {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

enum class Dim : int { One = 1, Two = 2 };

inline int dim_value(Dim d) noexcept { return static_cast<int>(d); }

/// Lattice point (m, n); `n` is unused for 1D fields.
struct FrequencyIndex {
  int m = 0;
  int n = 0;

  friend bool operator==(const FrequencyIndex&, const FrequencyIndex&) = default;
};

/// Integer power with overflow detection for the size arithmetic below.
inline std::size_t checked_pow(std::size_t base, int exponent) {
  std::size_t out = 1;
  for (int i = 0; i < exponent; ++i) {
    if (base != 0 && out > std::numeric_limits<std::size_t>::max() / base)
      throw ResourceError("size overflow");
    out *= base;
  }
  return out;
}

/// Fourier coefficients on the symmetric box {-N..N}^d.
///
/// Layout is row-major with the x-frequency `m` as the slow index:
/// coefficient (m, n) lives at `(m + N) * (2N + 1) + (n + N)`.
class SpectralField {
 public:
  SpectralField() = default;

  SpectralField(Dim dim, int N) : dim_(dim), N_(N) {
    if (N < 0) throw ConfigError("truncation radius must be nonnegative");
    coeffs_.assign(checked_pow(side(), dim_value(dim)), Complex{});
  }

  SpectralField(Dim dim, int N, std::vector<Complex> coeffs) : dim_(dim), N_(N), coeffs_(std::move(coeffs)) {
    if (N < 0) throw ConfigError("truncation radius must be nonnegative");
    if (coeffs_.size() != checked_pow(side(), dim_value(dim)))
      throw ConfigError("coefficient array length does not match (2N+1)^d");
    for (const auto& c : coeffs_)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw DomainError("non-finite coefficient");
  }

  static SpectralField unit(Dim dim, int N, FrequencyIndex k) {
    SpectralField f(dim, N);
    f.at(k) = 1.0;
    return f;
  }

  Dim dim() const noexcept { return dim_; }
  int N() const noexcept { return N_; }
  std::size_t side() const noexcept { return static_cast<std::size_t>(2 * N_ + 1); }
  std::size_t size() const noexcept { return coeffs_.size(); }

  std::span<Complex> coeffs() noexcept { return coeffs_; }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }

  bool contains(FrequencyIndex k) const noexcept {
    if (k.m < -N_ || k.m > N_) return false;
    if (dim_ == Dim::One) return true;
    return k.n >= -N_ && k.n <= N_;
  }

  std::size_t offset(FrequencyIndex k) const noexcept {
    if (dim_ == Dim::One) return static_cast<std::size_t>(k.m + N_);
    return static_cast<std::size_t>(k.m + N_) * side() + static_cast<std::size_t>(k.n + N_);
  }

  FrequencyIndex index_of(std::size_t offset) const noexcept {
    if (dim_ == Dim::One) return {static_cast<int>(offset) - N_, 0};
    return {static_cast<int>(offset / side()) - N_, static_cast<int>(offset % side()) - N_};
  }

  Complex& at(FrequencyIndex k) { return coeffs_[checked_offset(k)]; }
  const Complex& at(FrequencyIndex k) const { return coeffs_[checked_offset(k)]; }

  /// Zero-pads (or truncates) to a different radius.
  SpectralField resized(int N) const {
    SpectralField out(dim_, N);
    const int r = std::min(N, N_);
    if (dim_ == Dim::One) {
      for (int m = -r; m <= r; ++m) out.coeffs_[out.offset({m, 0})] = coeffs_[offset({m, 0})];
    } else {
      for (int m = -r; m <= r; ++m)
        for (int n = -r; n <= r; ++n) out.coeffs_[out.offset({m, n})] = coeffs_[offset({m, n})];
    }
    return out;
  }

  bool is_zero() const noexcept {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Complex& c) { return c == Complex{}; });
  }

 private:
  std::size_t checked_offset(FrequencyIndex k) const {
    if (!contains(k)) throw ConfigError("frequency index outside truncation box");
    return offset(k);
  }

  Dim dim_ = Dim::One;
  int N_ = 0;
  std::vector<Complex> coeffs_;
};

/// Samples on the uniform grid x_j = 2*pi*j/M (tensor grid in 2D, x slow).
class PhysicalField {
 public:
  PhysicalField() = default;
  PhysicalField(Dim dim, int M) : dim_(dim), M_(M) {
    samples_.assign(checked_pow(static_cast<std::size_t>(M), dim_value(dim)), Complex{});
  }
  PhysicalField(Dim dim, int M, std::vector<Complex> samples) : dim_(dim), M_(M), samples_(std::move(samples)) {
    if (samples_.size() != checked_pow(static_cast<std::size_t>(M), dim_value(dim)))
      throw ConfigError("sample count does not match M^d");
  }

  Dim dim() const noexcept { return dim_; }
  int M() const noexcept { return M_; }
  std::span<Complex> samples() noexcept { return samples_; }
  std::span<const Complex> samples() const noexcept { return samples_; }
  std::vector<Complex>& storage() noexcept { return samples_; }

 private:
  Dim dim_ = Dim::One;
  int M_ = 0;
  std::vector<Complex> samples_;
};

/// Discretization of the torus and of the time window.
struct GridSpec {
  int N = 0;
  int M_x = 1;
  int M_t = 1;
  double oversample = 1.0;  // M_x / (2N+1)

  void validate() const {
    if (N < 0) throw ConfigError("grid truncation radius must be nonnegative");
    if (M_x < 2 * N + 1) throw ConfigError("grid is not alias free: M_x < 2N+1");
    if (M_t < 1) throw ConfigError("time grid must have at least one sample");
  }

  GridSpec with_space(int m_x) const {
    GridSpec g = *this;
    g.M_x = m_x;
    g.oversample = static_cast<double>(m_x) / static_cast<double>(2 * N + 1);
    return g;
  }
  GridSpec with_time(int m_t) const {
    GridSpec g = *this;
    g.M_t = m_t;
    return g;
  }
};

/// Smallest integer >= n whose only prime factors are 2, 3, 5 and 7.
inline int next_fast_size(long long n) {
  if (n <= 1) return 1;
  for (long long m = n;; ++m) {
    if (m > (1LL << 30)) throw ResourceError("requested transform size too large");
    long long r = m;
    for (int p : {2, 3, 5, 7})
      while (r % p == 0) r /= p;
    if (r == 1) return static_cast<int>(m);
  }
}

inline constexpr int kMaxSpatialSize = 1 << 15;
inline constexpr long long kMaxTimeSamples = 1LL << 26;

/// Time samples for the phase rate 2N^2 of the non-elliptic multiplier,
/// scaled to the window length.
inline int time_samples(int N, double c, double window = 1.0) {
  const double want = std::ceil(c * static_cast<double>(N) * static_cast<double>(N) * window);
  if (!(want < static_cast<double>(kMaxTimeSamples))) throw ResourceError("time grid too large");
  return std::max(16, static_cast<int>(want));
}

/// M_x = smallest fast size >= oversample*(2N+1); M_t = max(16, ceil(c N^2)).
inline GridSpec make_grid(int N, double oversample, double c) {
  if (N < 1) throw ConfigError("make_grid: N must be >= 1");
  if (!(oversample >= 1.0)) throw ConfigError("make_grid: oversample must be >= 1");
  if (!(c >= 1.0)) throw ConfigError("make_grid: time resolution factor must be >= 1");
  const double want = std::ceil(oversample * static_cast<double>(2 * N + 1) - 1e-9);
  if (!(want <= kMaxSpatialSize)) throw ResourceError("spatial grid too large");
  GridSpec g;
  g.N = N;
  g.M_x = next_fast_size(static_cast<long long>(want));
  if (g.M_x > kMaxSpatialSize) throw ResourceError("spatial grid too large");
  g.M_t = time_samples(N, c);
  g.oversample = static_cast<double>(g.M_x) / static_cast<double>(2 * N + 1);
  return g;
}

/// Even integer exponents admit exact rectangle-rule quadrature.
inline bool is_even_integer(double q) noexcept {
  return q >= 2.0 && q == std::floor(q) && static_cast<long long>(q) % 2 == 0;
}

/// Grid for an L^q computation: exact size qN+1 for even q, otherwise the
/// oversampled default.
inline GridSpec make_grid_for(int N, double q, double oversample, double c) {
  GridSpec g = make_grid(N, oversample, c);
  if (is_even_integer(q)) {
    const long long want = std::max<long long>(static_cast<long long>(q) * N + 1, 2LL * N + 1);
    if (want > kMaxSpatialSize) throw ResourceError("spatial grid too large");
    g = g.with_space(next_fast_size(want));
  }
  return g;
}

}  // namespace strichartz

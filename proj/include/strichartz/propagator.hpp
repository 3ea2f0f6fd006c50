#pragma once

// Exact Fourier-multiplier evolution and the frequency projectors.

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "strichartz/bump.hpp"
#include "strichartz/lattice.hpp"
#include "strichartz/transform.hpp"

namespace strichartz {

/// Which propagator to apply. Every kind acts on coefficients as
/// c(k) -> exp(-i t omega(k)) c(k):
///   NonElliptic2D  omega = m^2 - n^2     exp(-itP), P = -d_xx + d_yy
///   Elliptic2D     omega = m^2 + n^2     exp(it Laplacian)
///   Line1D(+1)     omega = k^2           exp(+it d_xx)
///   Line1D(-1)     omega = -k^2          exp(-it d_xx)
struct EvolutionKind {
  enum class Tag { NonElliptic2D, Elliptic2D, Line1D };

  Tag tag = Tag::NonElliptic2D;
  int sign = +1;

  static EvolutionKind non_elliptic() { return {Tag::NonElliptic2D, +1}; }
  static EvolutionKind elliptic() { return {Tag::Elliptic2D, +1}; }
  static EvolutionKind line(int sign) { return {Tag::Line1D, sign >= 0 ? +1 : -1}; }

  Dim dim() const noexcept { return tag == Tag::Line1D ? Dim::One : Dim::Two; }

  /// omega = a m^2 + b n^2.
  double a() const noexcept { return tag == Tag::Line1D ? static_cast<double>(sign) : 1.0; }
  double b() const noexcept {
    switch (tag) {
      case Tag::NonElliptic2D: return -1.0;
      case Tag::Elliptic2D: return 1.0;
      case Tag::Line1D: return 0.0;
    }
    return 0.0;
  }

  double omega(FrequencyIndex k) const noexcept {
    const double m = k.m;
    const double n = k.n;
    return a() * m * m + b() * n * n;
  }

  std::string name() const {
    switch (tag) {
      case Tag::NonElliptic2D: return "nonelliptic";
      case Tag::Elliptic2D: return "elliptic";
      case Tag::Line1D: return sign > 0 ? "line+" : "line-";
    }
    return "?";
  }

  friend bool operator==(const EvolutionKind&, const EvolutionKind&) = default;
};

/// A Fourier multiplier tabulated on the box {-N..N}^d (same layout as SpectralField).
class MultiplierSymbol {
 public:
  MultiplierSymbol() = default;
  MultiplierSymbol(Dim dim, int N, std::vector<Complex> values) : dim_(dim), N_(N), values_(std::move(values)) {
    if (values_.size() != checked_pow(static_cast<std::size_t>(2 * N + 1), dim_value(dim)))
      throw ConfigError("multiplier table size does not match lattice");
    for (const auto& v : values_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw DomainError("non-finite multiplier value");
  }

  /// Tabulates fn(k) over the box.
  template <class Fn>
  static MultiplierSymbol tabulate(Dim dim, int N, Fn&& fn) {
    std::vector<Complex> v;
    v.reserve(checked_pow(static_cast<std::size_t>(2 * N + 1), dim_value(dim)));
    if (dim == Dim::One) {
      for (int m = -N; m <= N; ++m) v.emplace_back(fn(FrequencyIndex{m, 0}));
    } else {
      for (int m = -N; m <= N; ++m)
        for (int n = -N; n <= N; ++n) v.emplace_back(fn(FrequencyIndex{m, n}));
    }
    return MultiplierSymbol(dim, N, std::move(v));
  }

  static MultiplierSymbol constant(Dim dim, int N, Complex value) {
    return tabulate(dim, N, [value](FrequencyIndex) { return value; });
  }

  Dim dim() const noexcept { return dim_; }
  int N() const noexcept { return N_; }
  std::span<const Complex> values() const noexcept { return values_; }

  bool matches(const SpectralField& f) const noexcept { return f.dim() == dim_ && f.N() == N_; }

  /// Pointwise product of two tables on the same lattice.
  friend MultiplierSymbol operator*(const MultiplierSymbol& a, const MultiplierSymbol& b) {
    if (a.dim_ != b.dim_ || a.N_ != b.N_) throw ConfigError("multiplier lattices differ");
    std::vector<Complex> v(a.values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.values_[i] * b.values_[i];
    return MultiplierSymbol(a.dim_, a.N_, std::move(v));
  }

 private:
  Dim dim_ = Dim::Two;
  int N_ = 0;
  std::vector<Complex> values_;
};

/// Coefficient-wise product.
inline SpectralField apply_multiplier(const SpectralField& f, const MultiplierSymbol& sym) {
  if (!sym.matches(f)) throw ConfigError("multiplier lattice does not match field");
  SpectralField out = f;
  auto c = out.coeffs();
  const auto v = sym.values();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= v[i];
  return out;
}

inline void check_kind(const SpectralField& f, const EvolutionKind& kind) {
  if (f.dim() != kind.dim()) throw ConfigError("evolution kind " + kind.name() + " does not match field dimension");
}

/// c(k) -> exp(-i t omega(k)) c(k).
inline SpectralField evolve(const SpectralField& f, double t, const EvolutionKind& kind) {
  check_kind(f, kind);
  SpectralField out = f;
  auto c = out.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double w = kind.omega(out.index_of(i));
    c[i] *= std::polar(1.0, -t * w);
  }
  return out;
}

/// Midpoint time samples t_k = (k + 1/2) T / M_t on [0, T].
inline double time_sample(int k, int M_t, double window = 1.0) noexcept {
  return (static_cast<double>(k) + 0.5) * window / static_cast<double>(M_t);
}

/// Reusable buffers producing time slices of exp(-it omega) applied to fixed
/// coefficients. The phase is evaluated as exp(-ita m^2) exp(-itb n^2).
class SliceSynthesizer {
 public:
  SliceSynthesizer(const SpectralField& f, const GridSpec& g, const EvolutionKind& kind)
      : dim_(f.dim()), N_(f.N()), M_(g.M_x), kind_(kind), coeffs_(f.coeffs().begin(), f.coeffs().end()) {
    detail::check_grid(g, f.N());
    check_kind(f, kind);
    phased_.resize(coeffs_.size());
    px_.resize(static_cast<std::size_t>(2 * N_ + 1));
    py_.resize(static_cast<std::size_t>(2 * N_ + 1));
    buffer_.resize(checked_pow(static_cast<std::size_t>(M_), dim_value(dim_)));
  }

  /// Samples of the evolved field at time t; valid until the next call.
  std::span<const Complex> at(double t) {
    phases(t);
    apply_phases(coeffs_, phased_);
    detail::scatter_band(phased_, dim_, N_, M_, buffer_);
    detail::synthesize_in_place(buffer_, dim_, N_, M_);
    return buffer_;
  }

  /// Writes exp(-it omega(k)) into the per-axis phase tables.
  void phases(double t) {
    const double a = kind_.a();
    const double b = kind_.b();
    for (int m = -N_; m <= N_; ++m) {
      const double m2 = static_cast<double>(m) * m;
      px_[static_cast<std::size_t>(m + N_)] = std::polar(1.0, -t * a * m2);
      py_[static_cast<std::size_t>(m + N_)] = std::polar(1.0, -t * b * m2);
    }
  }

  /// out(k) = phase(k) in(k), using the tables from the last phases() call.
  void apply_phases(std::span<const Complex> in, std::span<Complex> out) const {
    if (dim_ == Dim::One) {
      for (std::size_t i = 0; i < in.size(); ++i) out[i] = px_[i] * in[i];
      return;
    }
    const std::size_t side = px_.size();
    for (std::size_t i = 0; i < side; ++i)
      for (std::size_t j = 0; j < side; ++j) out[i * side + j] = (px_[i] * py_[j]) * in[i * side + j];
  }

  /// out(k) += conj(phase(k)) in(k).
  void accumulate_conj_phases(std::span<const Complex> in, std::span<Complex> out) const {
    if (dim_ == Dim::One) {
      for (std::size_t i = 0; i < in.size(); ++i) out[i] += std::conj(px_[i]) * in[i];
      return;
    }
    const std::size_t side = px_.size();
    for (std::size_t i = 0; i < side; ++i)
      for (std::size_t j = 0; j < side; ++j) out[i * side + j] += std::conj(px_[i] * py_[j]) * in[i * side + j];
  }

  Dim dim() const noexcept { return dim_; }
  int N() const noexcept { return N_; }
  int M() const noexcept { return M_; }
  std::span<Complex> buffer() noexcept { return buffer_; }

 private:
  Dim dim_;
  int N_;
  int M_;
  EvolutionKind kind_;
  std::vector<Complex> coeffs_;
  std::vector<Complex> phased_;
  std::vector<Complex> px_, py_;
  std::vector<Complex> buffer_;
};

/// Streams synthesize(evolve(f, t_k)) for the midpoint grid of [0, window],
/// one slice at a time.
inline void for_each_slice(const SpectralField& f, const GridSpec& g, const EvolutionKind& kind, double window,
                           const std::function<void(int, double, const PhysicalField&)>& visit) {
  SliceSynthesizer synth(f, g, kind);
  PhysicalField slice(f.dim(), g.M_x);
  for (int k = 0; k < g.M_t; ++k) {
    const double t = time_sample(k, g.M_t, window);
    const auto s = synth.at(t);
    std::copy(s.begin(), s.end(), slice.samples().begin());
    visit(k, t, slice);
  }
}

inline constexpr std::size_t kDefaultTrajectoryBudgetBytes = std::size_t{1} << 30;

/// Materialized trajectory on the midpoint time grid. Throws ResourceError when
/// M_t * M_x^d samples exceed the budget; use for_each_slice instead.
inline std::vector<PhysicalField> trajectory(const SpectralField& f, const GridSpec& g, const EvolutionKind& kind,
                                             double window = 1.0,
                                             std::size_t budget_bytes = kDefaultTrajectoryBudgetBytes) {
  const std::size_t per_slice = checked_pow(static_cast<std::size_t>(g.M_x), dim_value(f.dim()));
  const double bytes = static_cast<double>(per_slice) * static_cast<double>(g.M_t) * sizeof(Complex);
  if (bytes > static_cast<double>(budget_bytes))
    throw ResourceError("trajectory exceeds memory budget; stream slices with for_each_slice");
  std::vector<PhysicalField> out;
  out.reserve(static_cast<std::size_t>(g.M_t));
  for_each_slice(f, g, kind, window, [&](int, double, const PhysicalField& s) { out.push_back(s); });
  return out;
}

/// phi(h^2 Laplacian) and the pair psi(h^2 d_xx), psi(h^2 d_yy) on the box {-N..N}^2.
struct PhiPsi {
  MultiplierSymbol phi2d;
  MultiplierSymbol psi_x;
  MultiplierSymbol psi_y;

  MultiplierSymbol psi_pair() const { return psi_x * psi_y; }
};

inline PhiPsi build_phi_psi(double h, int N, const BumpProfile& profile = {}) {
  if (!(h > 0.0 && h <= 1.0)) throw DomainError("h must lie in (0, 1]");
  if (N < 0) throw ConfigError("N must be nonnegative");
  const double h2 = h * h;
  PhiPsi out;
  out.phi2d = MultiplierSymbol::tabulate(Dim::Two, N, [&](FrequencyIndex k) {
    const double r = h2 * (static_cast<double>(k.m) * k.m + static_cast<double>(k.n) * k.n);
    return Complex(profile.phi(-r));
  });
  out.psi_x = MultiplierSymbol::tabulate(Dim::Two, N, [&](FrequencyIndex k) {
    return Complex(profile.psi(-h2 * static_cast<double>(k.m) * k.m));
  });
  out.psi_y = MultiplierSymbol::tabulate(Dim::Two, N, [&](FrequencyIndex k) {
    return Complex(profile.psi(-h2 * static_cast<double>(k.n) * k.n));
  });
  return out;
}

/// Number of dyadic pieces after theta_0: ceil(log2 N) + 1.
inline int lp_levels(int N) {
  int j = 0;
  while ((1LL << j) < N) ++j;
  return j + 1;
}

/// Smooth dyadic partition theta_0 = chi(|k|), theta_j = chi(2^-j |k|) - chi(2^(1-j) |k|).
inline std::vector<MultiplierSymbol> lp_family(int N) {
  if (N < 1) throw ConfigError("lp_family requires N >= 1");
  const int J = lp_levels(N);
  std::vector<MultiplierSymbol> out;
  out.reserve(static_cast<std::size_t>(J + 1));
  for (int j = 0; j <= J; ++j) {
    out.push_back(MultiplierSymbol::tabulate(Dim::Two, N, [j](FrequencyIndex k) {
      const double r = std::hypot(static_cast<double>(k.m), static_cast<double>(k.n));
      if (j == 0) return Complex(bump::chi(r));
      return Complex(bump::chi(std::ldexp(r, -j)) - bump::chi(std::ldexp(r, 1 - j)));
    }));
  }
  return out;
}

}  // namespace strichartz

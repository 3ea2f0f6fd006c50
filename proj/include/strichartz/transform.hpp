#pragma once

// Transforms between coefficient space and the uniform sample grid with the
// convention u(x) = sum_k c(k) exp(i k.x). The 2D transforms skip the rows
// that are identically zero outside the band |m| <= N.

#include <algorithm>
#include <span>
#include <vector>

#include "strichartz/fft.hpp"
#include "strichartz/lattice.hpp"

namespace strichartz {

namespace detail {

inline std::size_t wrap(int k, int M) noexcept { return static_cast<std::size_t>(((k % M) + M) % M); }

/// Writes band coefficients into a zeroed M^d buffer at wrapped positions.
inline void scatter_band(std::span<const Complex> coeffs, Dim dim, int N, int M, std::span<Complex> buffer) {
  std::fill(buffer.begin(), buffer.end(), Complex{});
  const std::size_t side = static_cast<std::size_t>(2 * N + 1);
  if (dim == Dim::One) {
    for (int m = -N; m <= N; ++m) buffer[wrap(m, M)] = coeffs[static_cast<std::size_t>(m + N)];
    return;
  }
  for (int m = -N; m <= N; ++m) {
    Complex* row = buffer.data() + wrap(m, M) * static_cast<std::size_t>(M);
    const Complex* src = coeffs.data() + static_cast<std::size_t>(m + N) * side;
    for (int n = -N; n <= N; ++n) row[wrap(n, M)] = src[n + N];
  }
}

/// Reads band coefficients out of an M^d buffer, multiplied by `scale`.
inline void gather_band(std::span<const Complex> buffer, Dim dim, int N, int M, double scale, std::span<Complex> coeffs) {
  const std::size_t side = static_cast<std::size_t>(2 * N + 1);
  if (dim == Dim::One) {
    for (int m = -N; m <= N; ++m) coeffs[static_cast<std::size_t>(m + N)] = scale * buffer[wrap(m, M)];
    return;
  }
  for (int m = -N; m <= N; ++m) {
    const Complex* row = buffer.data() + wrap(m, M) * static_cast<std::size_t>(M);
    Complex* dst = coeffs.data() + static_cast<std::size_t>(m + N) * side;
    for (int n = -N; n <= N; ++n) dst[n + N] = scale * row[wrap(n, M)];
  }
}

/// Transforms along the fast axis, restricted to the band rows.
inline void band_rows(std::span<Complex> buffer, int N, int M, FftSign sign) {
  auto& plans = FftPlans::instance();
  execute(plans.rows(M, N + 1, sign), buffer.data());
  if (N > 0) execute(plans.rows(M, N, sign), buffer.data() + static_cast<std::size_t>(M - N) * static_cast<std::size_t>(M));
}

/// In-place band-limited synthesis: buffer holds scattered coefficients.
inline void synthesize_in_place(std::span<Complex> buffer, Dim dim, int N, int M) {
  auto& plans = FftPlans::instance();
  if (dim == Dim::One) {
    execute(plans.rows(M, 1, FftSign::Backward), buffer.data());
    return;
  }
  band_rows(buffer, N, M, FftSign::Backward);
  execute(plans.cols(M, FftSign::Backward), buffer.data());
}

/// In-place unnormalized forward transform; only band entries are valid afterwards.
inline void adjoint_in_place(std::span<Complex> buffer, Dim dim, int N, int M) {
  auto& plans = FftPlans::instance();
  if (dim == Dim::One) {
    execute(plans.rows(M, 1, FftSign::Forward), buffer.data());
    return;
  }
  execute(plans.cols(M, FftSign::Forward), buffer.data());
  band_rows(buffer, N, M, FftSign::Forward);
}

inline void check_grid(const GridSpec& g, int N) {
  g.validate();
  if (g.N != N) throw ConfigError("grid truncation does not match field truncation");
}

}  // namespace detail

/// Evaluates the trigonometric polynomial on the grid.
inline PhysicalField synthesize(const SpectralField& f, const GridSpec& g) {
  detail::check_grid(g, f.N());
  PhysicalField u(f.dim(), g.M_x);
  detail::scatter_band(f.coeffs(), f.dim(), f.N(), g.M_x, u.samples());
  detail::synthesize_in_place(u.samples(), f.dim(), f.N(), g.M_x);
  return u;
}

/// Discrete Fourier coefficients on the band, normalized so that
/// analyze(synthesize(f)) == f.
inline SpectralField analyze(const PhysicalField& u, const GridSpec& g) {
  g.validate();
  if (u.M() != g.M_x) throw ConfigError("sample grid does not match GridSpec");
  std::vector<Complex> work(u.samples().begin(), u.samples().end());
  detail::adjoint_in_place(work, u.dim(), g.N, g.M_x);
  SpectralField f(u.dim(), g.N);
  const double scale = 1.0 / static_cast<double>(checked_pow(static_cast<std::size_t>(g.M_x), dim_value(u.dim())));
  detail::gather_band(work, u.dim(), g.N, g.M_x, scale, f.coeffs());
  return f;
}

}  // namespace strichartz

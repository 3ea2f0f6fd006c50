#pragma once

// Explicit test families: the concentrating bump eta(lambda x) on the circle
// and the stationary non-elliptic solution f(x + y) built from it.

#include <cmath>
#include <vector>

#include "strichartz/admissible.hpp"
#include "strichartz/bump.hpp"
#include "strichartz/lattice.hpp"
#include "strichartz/norms.hpp"
#include "strichartz/propagator.hpp"
#include "strichartz/transform.hpp"

namespace strichartz {

inline constexpr double kDefaultBandFactor = 8.0;
inline constexpr double kDefaultTailTolerance = 0.02;

struct FamilyParams {
  double lambda = 1.0;
  double s = 0.0;
  double band_factor = kDefaultBandFactor;  // N_auto = ceil(band_factor * lambda)
  double tail_tolerance = kDefaultTailTolerance;

  void validate() const {
    if (!(lambda >= 1.0)) throw DomainError("family scale lambda must be >= 1");
    if (!(band_factor >= 1.0)) throw ConfigError("band factor must be >= 1");
  }

  int N_auto() const {
    validate();
    return static_cast<int>(std::ceil(band_factor * lambda - 1e-9));
  }
};

/// Fine 1D grid used to compute near-exact Fourier coefficients of the bump.
inline GridSpec family_analysis_grid(int N) {
  GridSpec g;
  g.N = N;
  g.M_x = next_fast_size(8LL * (2 * N + 1));
  g.M_t = 1;
  g.oversample = static_cast<double>(g.M_x) / (2 * N + 1);
  return g;
}

inline PhysicalField sample_bump(double lambda, int M, const BumpProfile& profile = {}) {
  PhysicalField u(Dim::One, M);
  auto s = u.samples();
  for (int j = 0; j < M; ++j) {
    double x = kTwoPi * j / M;
    if (x > kPi) x -= kTwoPi;
    s[static_cast<std::size_t>(j)] = profile.eta(lambda * x);
  }
  return u;
}

/// Fraction of the L^2 energy of eta(lambda x) carried by frequencies |k| > N.
inline double bump_tail_energy(double lambda, int N, const BumpProfile& profile = {}) {
  const GridSpec fine = family_analysis_grid(N);
  const PhysicalField u = sample_bump(lambda, fine.M_x, profile);
  const SpectralField c = analyze(u, fine);
  double band = 0.0;
  for (const auto& z : c.coeffs()) band += std::norm(z);
  double total = 0.0;
  for (const auto& z : u.samples()) total += std::norm(z);
  total /= static_cast<double>(fine.M_x);
  return total > 0.0 ? std::max(0.0, 1.0 - band / total) : 0.0;
}

/// Coefficients of the periodic extension of eta(lambda x), lambda >= 1,
/// analyzed from samples on g. Fails when the band |k| <= g.N misses more
/// than `tail_tolerance` of the energy.
inline SpectralField bump_1d(double lambda, const GridSpec& g, double tail_tolerance = kDefaultTailTolerance,
                             const BumpProfile& profile = {}) {
  if (!(lambda >= 1.0)) throw DomainError("bump_1d requires lambda >= 1");
  g.validate();
  const double tail = bump_tail_energy(lambda, g.N, profile);
  if (tail > tail_tolerance)
    throw ConfigError("truncation N = " + std::to_string(g.N) + " too small for lambda = " + std::to_string(lambda) +
                      " (tail energy " + std::to_string(tail) + ")");
  return analyze(sample_bump(lambda, g.M_x, profile), g);
}

/// f(x) -> f(x + y): coefficients placed on the diagonal m = n, where the
/// non-elliptic symbol m^2 - n^2 vanishes.
inline SpectralField stationary_2d(const SpectralField& f) {
  if (f.dim() != Dim::One) throw ConfigError("stationary_2d expects a 1D field");
  const int N = f.N();
  SpectralField out(Dim::Two, N);
  for (int m = -N; m <= N; ++m) out.at({m, m}) = f.at({m, 0});
  return out;
}

/// Same construction on the anti-diagonal, giving f(x - y).
inline SpectralField stationary_2d_minus(const SpectralField& f) {
  if (f.dim() != Dim::One) throw ConfigError("stationary_2d_minus expects a 1D field");
  const int N = f.N();
  SpectralField out(Dim::Two, N);
  for (int m = -N; m <= N; ++m) out.at({m, -m}) = f.at({m, 0});
  return out;
}

/// ||f||_{L^q(T)} / ||f||_{H^s(T)} for f = eta(lambda x) analyzed on g.
inline double sobolev_ratio(double lambda, double q, double s, const GridSpec& g,
                            double tail_tolerance = kDefaultTailTolerance) {
  if (!(q >= 2.0)) throw DomainError("sobolev_ratio requires q >= 2");
  const SpectralField f = bump_1d(lambda, g, tail_tolerance);
  const double den = hs_norm(f, s);
  if (!(den > 0.0)) throw DegeneracyError("zero H^s norm");
  return lq_norm(synthesize(f, g), q) / den;
}

/// Mixed L^p L^q norm of the stationary solution eta(lambda (x + y)) over the
/// time grid of g. Slices are streamed, so only one M_x^2 buffer is live.
inline double stationary_mixed_norm(double lambda, const AdmissiblePair& pair, const GridSpec& g,
                                    double tail_tolerance = kDefaultTailTolerance, double window = 1.0) {
  g.validate();
  const SpectralField f2 = stationary_2d(bump_1d(lambda, family_analysis_grid(g.N), tail_tolerance));
  SliceSynthesizer synth(f2, g, EvolutionKind::non_elliptic());
  const detail::AbsPow pw(pair.q());
  const double cell = detail::cell_volume(Dim::Two, g.M_x);
  MixedNormAccumulator acc(pair.p(), pair.q(), g.M_t, window);
  for (int k = 0; k < g.M_t; ++k) {
    const auto u = synth.at(time_sample(k, g.M_t, window));
    acc.add_norm(std::pow(cell * detail::sum_abs_pow(u, pw), 1.0 / pair.q()));
  }
  return acc.value();
}

/// Mixed norm of the stationary solution divided by its H^s norm.
inline double strichartz_ratio_family(double lambda, const AdmissiblePair& pair, double s, const GridSpec& g,
                                      double tail_tolerance = kDefaultTailTolerance, double window = 1.0) {
  const double num = stationary_mixed_norm(lambda, pair, g, tail_tolerance, window);
  const double den = hs_norm(stationary_2d(bump_1d(lambda, family_analysis_grid(g.N), tail_tolerance)), s);
  if (!(den > 0.0)) throw DegeneracyError("zero H^s norm");
  return num / den;
}

}  // namespace strichartz

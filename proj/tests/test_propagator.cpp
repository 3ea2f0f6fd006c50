#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "strichartz/strichartz.hpp"

using namespace strichartz;

namespace {

SpectralField random_field(Dim dim, int N, std::uint64_t seed) {
  rng::CounterStream s(seed, 7);
  SpectralField f(dim, N);
  for (auto& c : f.coeffs()) c = s.complex_normal();
  return f;
}

double max_diff(const SpectralField& a, const SpectralField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.coeffs()[i] - b.coeffs()[i]));
  return m;
}

double max_abs(const SpectralField& a) {
  double m = 0.0;
  for (const auto& z : a.coeffs()) m = std::max(m, std::abs(z));
  return m;
}

const std::vector<EvolutionKind> kKinds2D = {EvolutionKind::non_elliptic(), EvolutionKind::elliptic()};

}  // namespace

TEST(Evolve, ClosedFormPhases) {
  const double t = 0.3;
  auto phase = [&](const EvolutionKind& kind, FrequencyIndex k) {
    const auto f = SpectralField::unit(kind.dim(), 3, k);
    return evolve(f, t, kind).at(k);
  };
  EXPECT_NEAR(std::abs(phase(EvolutionKind::non_elliptic(), {2, 1}) - std::polar(1.0, -3 * t)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(phase(EvolutionKind::non_elliptic(), {1, 2}) - std::polar(1.0, 3 * t)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(phase(EvolutionKind::elliptic(), {2, 1}) - std::polar(1.0, -5 * t)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(phase(EvolutionKind::line(+1), {3, 0}) - std::polar(1.0, -9 * t)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(phase(EvolutionKind::line(-1), {3, 0}) - std::polar(1.0, 9 * t)), 0.0, 1e-15);
  EXPECT_THROW(evolve(SpectralField(Dim::One, 2), t, EvolutionKind::elliptic()), ConfigError);
}

TEST(Evolve, Unitarity) {
  for (int N : {1, 8, 64})
    for (const auto& kind : kKinds2D) {
      const auto f = random_field(Dim::Two, N, N);
      for (double t : {-0.7, 0.01, 1.0, 13.3}) {
        const double a = hs_norm(f, 0.0), b = hs_norm(evolve(f, t, kind), 0.0);
        EXPECT_LE(std::fabs(a - b), 1e-12 * a);
        EXPECT_LE(std::fabs(hs_norm(f, 0.5) - hs_norm(evolve(f, t, kind), 0.5)), 1e-12 * hs_norm(f, 0.5));
      }
    }
}

TEST(Evolve, GroupLaw) {
  for (int N : {4, 64})
    for (const auto& kind : kKinds2D) {
      const auto f = random_field(Dim::Two, N, 3 + N);
      const double scale = max_abs(f);
      EXPECT_LE(max_diff(evolve(evolve(f, 0.37, kind), 0.21, kind), evolve(f, 0.58, kind)), 1e-12 * scale);
      EXPECT_LE(max_diff(evolve(evolve(f, 0.37, kind), -0.37, kind), f), 1e-12 * scale);
      EXPECT_LE(max_diff(evolve(f, 0.0, kind), f), 0.0);
    }
}

TEST(Evolve, CommutesWithMultipliers) {
  const int N = 32;
  const auto f = random_field(Dim::Two, N, 5);
  const auto pp = build_phi_psi(0.125, N);
  std::vector<MultiplierSymbol> syms = {pp.phi2d, pp.psi_x, pp.psi_pair()};
  for (const auto& s : lp_family(N)) syms.push_back(s);
  for (const auto& kind : kKinds2D)
    for (const auto& s : syms) {
      const auto a = apply_multiplier(evolve(f, 0.77, kind), s);
      const auto b = evolve(apply_multiplier(f, s), 0.77, kind);
      EXPECT_LE(max_diff(a, b), 1e-12 * max_abs(f));
    }
}

TEST(Evolve, NonEllipticTensorizesIntoOpposite1DFlows) {
  const int N = 6;
  const auto a = random_field(Dim::One, N, 1);
  const auto b = random_field(Dim::One, N, 2);
  SpectralField ab(Dim::Two, N);
  for (int m = -N; m <= N; ++m)
    for (int n = -N; n <= N; ++n) ab.at({m, n}) = a.at({m, 0}) * b.at({n, 0});
  const double t = 0.41;
  const auto e = evolve(ab, t, EvolutionKind::non_elliptic());
  const auto ea = evolve(a, t, EvolutionKind::line(+1));
  const auto eb = evolve(b, t, EvolutionKind::line(-1));
  double err = 0.0;
  for (int m = -N; m <= N; ++m)
    for (int n = -N; n <= N; ++n) err = std::max(err, std::abs(e.at({m, n}) - ea.at({m, 0}) * eb.at({n, 0})));
  EXPECT_LT(err, 1e-13);
}

TEST(Evolve, DiagonalDataIsStationary) {
  for (int N : {4, 64}) {
    const auto f = random_field(Dim::One, N, 9);
    for (const auto& f2 : {stationary_2d(f), stationary_2d_minus(f)}) {
      for (double t : {0.1, 1.0, 123.0}) EXPECT_LE(max_diff(evolve(f2, t, EvolutionKind::non_elliptic()), f2), 1e-12 * max_abs(f2));
      // the elliptic flow moves the same data
      EXPECT_GT(max_diff(evolve(f2, 0.1, EvolutionKind::elliptic()), f2), 1e-3);
    }
  }
}

TEST(Evolve, SliceSynthesizerMatchesEvolveThenSynthesize) {
  const int N = 5;
  const auto f = random_field(Dim::Two, N, 4);
  GridSpec g = make_grid(N, 2.0, 1.0);
  g.M_t = 6;
  int count = 0;
  for_each_slice(f, g, EvolutionKind::non_elliptic(), 0.5, [&](int k, double t, const PhysicalField& u) {
    EXPECT_DOUBLE_EQ(t, (k + 0.5) * 0.5 / 6);
    const auto ref = synthesize(evolve(f, t, EvolutionKind::non_elliptic()), g);
    for (std::size_t i = 0; i < u.samples().size(); ++i) EXPECT_LT(std::abs(u.samples()[i] - ref.samples()[i]), 1e-12);
    ++count;
  });
  EXPECT_EQ(count, 6);
  EXPECT_THROW(trajectory(f, g.with_time(1000), EvolutionKind::non_elliptic(), 1.0, 1024), ResourceError);
}

TEST(Projectors, PsiPairDominatesPhi) {
  for (double h : {1.0, 0.5, 0.25, 0.125, 0.0625}) {
    const int N = 64;
    const auto pp = build_phi_psi(h, N);
    const auto prod = pp.psi_pair() * pp.phi2d;
    double err = 0.0;
    for (std::size_t i = 0; i < prod.values().size(); ++i) err = std::max(err, std::abs(prod.values()[i] - pp.phi2d.values()[i]));
    EXPECT_EQ(err, 0.0) << "h=" << h;
  }
  EXPECT_THROW(build_phi_psi(0.0, 4), DomainError);
  EXPECT_THROW(build_phi_psi(1.5, 4), DomainError);
}

TEST(Projectors, PsiSupportRadius) {
  for (double h : {0.5, 0.125, 0.0625}) {
    const int N = 64;
    const auto pp = build_phi_psi(h, N);
    const double R = BumpProfile{}.psi_radius(h);
    EXPECT_NEAR(R, 2.0 * std::sqrt(2.0) / h, 1e-12);
    for (int m = -N; m <= N; ++m) {
      const double v = std::abs(pp.psi_x.values()[static_cast<std::size_t>((m + N) * (2 * N + 1))]);
      if (std::abs(m) >= R) {
        EXPECT_EQ(v, 0.0);
      }
      if (std::abs(m) <= 2.0 / h) {
        EXPECT_EQ(v, 1.0);
      }
    }
  }
}

TEST(Projectors, LittlewoodPaleyPartitionOfUnity) {
  for (int N : {1, 7, 16, 64}) {
    const auto fam = lp_family(N);
    EXPECT_EQ(static_cast<int>(fam.size()), lp_levels(N) + 1);
    const std::size_t n = fam.front().values().size();
    for (std::size_t i = 0; i < n; ++i) {
      Complex acc{};
      for (const auto& s : fam) {
        acc += s.values()[i];
        EXPECT_GE(s.values()[i].real(), -1e-15);
      }
      EXPECT_NEAR(std::abs(acc - 1.0), 0.0, 1e-12);
    }
  }
}

TEST(Projectors, BridgeIsSmoothAndMonotone) {
  double prev = 1.0;
  for (int i = 0; i <= 2000; ++i) {
    const double r = 1.0 + i / 2000.0;
    const double v = bump::chi(r);
    EXPECT_LE(v, prev + 1e-15);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    prev = v;
  }
  EXPECT_EQ(bump::chi(1.0), 1.0);
  EXPECT_EQ(bump::chi(2.0), 0.0);
  EXPECT_NEAR(bump::chi(1.5), 0.5, 1e-15);
  EXPECT_NEAR(bump::chi(-1.2), bump::chi(1.2), 0.0);
  // flat at both ends: difference quotients vanish faster than any power
  EXPECT_LT(1.0 - bump::chi(1.0 + 1e-2), 1e-30);
  EXPECT_LT(bump::chi(2.0 - 1e-2), 1e-30);
  EXPECT_EQ(bump::eta(0.0), 1.0);
  EXPECT_EQ(bump::eta(0.5), 0.0);
}

TEST(Projectors, MultiplierLatticeChecks) {
  const auto s = MultiplierSymbol::constant(Dim::Two, 3, 2.0);
  EXPECT_THROW(apply_multiplier(SpectralField(Dim::Two, 4), s), ConfigError);
  EXPECT_THROW(s * MultiplierSymbol::constant(Dim::Two, 2, 1.0), ConfigError);
  EXPECT_THROW(MultiplierSymbol(Dim::One, 1, {1.0, 2.0}), ConfigError);
  const auto f = random_field(Dim::Two, 3, 1);
  EXPECT_LE(max_diff(apply_multiplier(f, s), [&] {
              auto g = f;
              for (auto& z : g.coeffs()) z *= 2.0;
              return g;
            }()),
            0.0);
}

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <vector>

#include "strichartz/strichartz.hpp"

using namespace strichartz;

namespace {

// K(t, z) = (2 pi)^-1 sum_{|n| <= R} psi(-h^2 n^2) exp(-i sign t n^2 + i n z), summed term by term.
Complex kernel_oracle(double t, double h, double z, int sign, int R) {
  const BumpProfile prof;
  Complex acc{};
  for (int n = -R; n <= R; ++n) {
    const double w = prof.psi(-h * h * n * n);
    acc += w * std::polar(1.0, -sign * t * n * n + n * z);
  }
  return acc / kTwoPi;
}

}  // namespace

TEST(Kernel, RadiusCoversPsiSupport) {
  EXPECT_EQ(kernel_radius(0.5), 6);
  EXPECT_EQ(kernel_radius(0.125), 23);
  EXPECT_EQ(kernel_radius(1.0), 3);
  const BumpProfile prof;
  for (double h : {1.0, 0.5, 0.125, 0.03125}) {
    const int R = kernel_radius(h);
    EXPECT_EQ(prof.psi(-h * h * (R + 1.0) * (R + 1.0)), 0.0);
    EXPECT_EQ(prof.psi(-h * h * R * R), 0.0);
    EXPECT_GT(prof.psi(-h * h * (R - 1.0) * (R - 1.0)), 0.0);
  }
  EXPECT_THROW(kernel_radius(0.0), DomainError);
  EXPECT_THROW(kernel_1d(0.1, 0.5, BumpProfile{}, 8), ConfigError);
}

TEST(Kernel, TermByTermOracleAtHalf) {
  const double h = 0.5;
  const int Z = 4 * (2 * kernel_radius(h) + 1);
  for (int sign : {+1, -1})
    for (double t : {0.0, 0.013, 0.25, 0.9}) {
      const auto K = kernel_1d(t, h, BumpProfile{}, Z, sign);
      for (int j = 0; j < Z; ++j) {
        const Complex ref = kernel_oracle(t, h, K.z(j), sign, 40);
        EXPECT_LT(std::abs(K.values()[j] - ref), 1e-14) << "t=" << t << " j=" << j;
        EXPECT_LT(std::abs(K.eval(K.z(j)) - ref), 1e-14);
      }
    }
}

TEST(Kernel, TimeZeroIsRealEvenAndPeaksAtOrigin) {
  const double h = 0.125;
  const auto K = kernel_1d(0.0, h);
  Complex sum{};
  for (const auto& w : K.series()) sum += w;
  EXPECT_NEAR(std::abs(K.values()[0] - sum), 0.0, 1e-13);
  EXPECT_NEAR(K.sup(), std::abs(sum), 1e-13);
  const int Z = K.zgrid_size();
  for (int j = 1; j < Z; ++j) {
    EXPECT_NEAR(std::abs(K.values()[j] - K.values()[Z - j]), 0.0, 1e-13);
    EXPECT_NEAR(K.values()[j].imag(), 0.0, 1e-13);
  }
}

TEST(Kernel, EvenInZForAllTimes) {
  const auto K = kernel_1d(0.37, 0.0625);
  const int Z = K.zgrid_size();
  for (int j = 1; j < Z; ++j) EXPECT_NEAR(std::abs(K.values()[j] - K.values()[Z - j]), 0.0, 1e-13);
}

TEST(Kernel, SecondFactorIsConjugateOfFirst) {
  for (double h : {0.5, 0.0625})
    for (double t : {0.01, 0.3}) {
      const int Z = min_zgrid_size(h);
      const auto K1 = kernel_1d(t, h, BumpProfile{}, Z, +1);
      const auto K2 = kernel_1d(t, h, BumpProfile{}, Z, -1);
      const auto K1m = kernel_1d(-t, h, BumpProfile{}, Z, +1);
      for (int j = 0; j < Z; ++j) {
        EXPECT_NEAR(std::abs(K2.values()[j] - std::conj(K1.values()[j])), 0.0, 1e-13);
        EXPECT_NEAR(std::abs(K2.values()[j] - K1m.values()[j]), 0.0, 1e-13);
      }
      EXPECT_NEAR(K1.sup(), K2.sup(), 1e-13);
      EXPECT_NEAR(kernel_2d_sup(t, h), K1.sup() * K2.sup(), 1e-13);
    }
}

TEST(Kernel, SupConvergesUnderZGridDoubling) {
  for (double h : {0.125, 0.03125})
    for (double t : {0.5 * h * h, 0.3 * h, h}) {
      const int Z = min_zgrid_size(h);
      const double a = kernel_1d(t, h, BumpProfile{}, 4 * Z).sup();
      const double b = kernel_1d(t, h, BumpProfile{}, 8 * Z).sup();
      EXPECT_LT(std::fabs(a - b), 1e-6 * b) << "h=" << h << " t=" << t;
      // refinement never reports less than the tabulated maximum
      const auto K = kernel_1d(t, h, BumpProfile{}, Z);
      EXPECT_GE(K.sup(), K.grid_max());
      EXPECT_LT(std::fabs(K.sup() - b), 1e-6 * b);
    }
}

TEST(Kernel, TensorizedKernelMatchesLocalizedPropagator) {
  // The localized 2D propagator applied to a delta has kernel K1(t, x) K2(t, y).
  const double h = 0.25, t = 0.07;
  const int R = kernel_radius(h);
  const auto pp = build_phi_psi(h, R);
  SpectralField delta(Dim::Two, R);
  for (auto& c : delta.coeffs()) c = 1.0 / (kTwoPi * kTwoPi);
  const auto u = evolve(apply_multiplier(delta, pp.psi_pair()), t, EvolutionKind::non_elliptic());
  GridSpec g;
  g.N = R;
  g.M_x = 4 * (2 * R + 1);
  const auto field = synthesize(u, g);
  const auto K1 = kernel_1d(t, h, BumpProfile{}, g.M_x, +1);
  const auto K2 = kernel_1d(t, h, BumpProfile{}, g.M_x, -1);
  double err = 0.0, gmax = 0.0;
  for (int a = 0; a < g.M_x; ++a)
    for (int b = 0; b < g.M_x; ++b) {
      const Complex ref = K1.values()[a] * K2.values()[b];
      err = std::max(err, std::abs(field.samples()[static_cast<std::size_t>(a * g.M_x + b)] - ref));
      gmax = std::max(gmax, std::abs(ref));
    }
  EXPECT_LT(err, 1e-13);
  EXPECT_NEAR(gmax, K1.grid_max() * K2.grid_max(), 1e-13);
}

TEST(Kernel, DispersiveScalingOnShortTimes) {
  // |t|^(1/2) sup |K1| stays within a fixed band for t in [h^2/10, h].
  for (double h : {0.125, 0.0625, 0.03125}) {
    const auto ts = log_spaced(0.1 * h * h, h, 20);
    const auto prof = dispersive_profile(h, ts);
    ASSERT_EQ(prof.size(), 20u);
    for (const auto& s : prof) {
      EXPECT_GT(s.scaled, 0.05);
      EXPECT_LT(s.scaled, 1.0);
      EXPECT_NEAR(s.scaled, std::sqrt(s.t) * s.sup, 1e-15);
    }
  }
  EXPECT_THROW(dispersive_profile(0.5, std::vector<double>{}), DomainError);
  EXPECT_THROW(dispersive_profile(0.5, std::vector<double>{2.0}), DomainError);
}

TEST(Kernel, LogSpacingAndAlphaRule) {
  const auto v = log_spaced(1e-3, 1.0, 4);
  ASSERT_EQ(v.size(), 4u);
  EXPECT_NEAR(v[0], 1e-3, 1e-18);
  EXPECT_NEAR(v[1], 1e-2, 1e-15);
  EXPECT_NEAR(v[3], 1.0, 1e-15);

  // synthetic profiles: flat up to t/h = 0.25, then a jump by 5
  std::map<double, std::vector<DispersiveSample>> m;
  for (double h : {0.5, 0.25}) {
    std::vector<DispersiveSample> rec;
    for (double beta : {0.0625, 0.125, 0.25, 0.5, 1.0}) rec.push_back({beta * h, 0.0, beta > 0.3 ? 5.0 : 1.0});
    m[h] = rec;
  }
  EXPECT_DOUBLE_EQ(estimate_alpha(m, 2.0), 0.25);
  EXPECT_DOUBLE_EQ(estimate_alpha(m, 10.0), 1.0);
  EXPECT_THROW(estimate_alpha({}, 2.0), DomainError);
}

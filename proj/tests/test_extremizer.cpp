#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "strichartz/strichartz.hpp"

using namespace strichartz;

namespace {

std::vector<Complex> random_coeffs(std::size_t n, std::uint64_t seed) {
  rng::CounterStream s(seed, 3);
  std::vector<Complex> c(n);
  for (auto& z : c) z = s.complex_normal();
  return c;
}

NormProblem problem(double p, double q, double s, int N, int Mt, EvolutionKind kind = EvolutionKind::non_elliptic()) {
  NormProblem prob;
  prob.p = p;
  prob.q = q;
  prob.s = s;
  prob.kind = kind;
  prob.grid = make_grid_for(N, q, 2, 1).with_time(Mt);
  return prob;
}

double real_inner(std::span<const Complex> a, std::span<const Complex> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (std::conj(a[i]) * b[i]).real();
  return acc;
}

double norm2(std::span<const Complex> a) { return std::sqrt(real_inner(a, a)); }

// Radical inverse in base b.
double halton(std::uint64_t i, int b) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= b;
    r += f * static_cast<double>(i % static_cast<std::uint64_t>(b));
    i /= static_cast<std::uint64_t>(b);
  }
  return r;
}

}  // namespace

TEST(Objective, L2InTimeAndSpaceIsConserved) {
  for (double window : {1.0, 0.25}) {
    auto prob = problem(2, 2, 0, 4, 16);
    prob.window = window;
    const auto c = random_coeffs(81, 1);
    const auto g = gradient(prob, c);
    EXPECT_NEAR(g.value, 0.5 * std::log(window), 1e-12);
    EXPECT_LT(norm2(g.grad), 1e-12 * norm2(c) / ObjectiveEvaluator(prob).hs_squared(c));
  }
}

TEST(Objective, SingleModeClosedForm) {
  for (double q : {4.0, 8.0 / 3.0, 6.0}) {
    const double p = 2 * q / (q - 2);
    const auto prob = problem(p, q, 0, 3, 32);
    const auto c = SpectralField::unit(Dim::Two, 3, {2, -1});
    EXPECT_NEAR(ratio_at(prob, c), std::pow(kTwoPi, 2 / q - 1), 1e-12) << "q=" << q;
  }
  const auto prob = problem(4, 4, 0.5, 3, 32);
  EXPECT_NEAR(ratio_at(prob, SpectralField::unit(Dim::Two, 3, {1, 1})), std::pow(kTwoPi, -0.5) / std::sqrt(std::sqrt(3.0)), 1e-12);
}

TEST(Objective, MatchesMixedNormComposition) {
  for (auto [p, q] : {std::pair{4.0, 4.0}, std::pair{8.0, 8.0 / 3.0}, std::pair{10.0 / 3.0, 5.0}}) {
    auto prob = problem(p, q, 0.25, 2, 40);
    prob.window = 0.5;
    prob.projector = build_phi_psi(1.0, 2).psi_pair();
    const SpectralField c(Dim::Two, 2, random_coeffs(25, 2));
    const auto pc = apply_multiplier(c, *prob.projector);
    const double ref = mixed_norm(trajectory(pc, prob.grid, prob.kind, 0.5), p, q, prob.grid, 0.5) / hs_norm(c, 0.25);
    EXPECT_NEAR(ratio_at(prob, c), ref, 1e-12 * ref) << "p=" << p;
  }
}

// Dense oracle: Gauss-Legendre panels in time, direct summation in space.
TEST(Objective, DenseQuadratureOracle) {
  const int N = 2;
  const auto prob = problem(4, 4, 0, N, 4096);
  const SpectralField c(Dim::Two, N, random_coeffs(25, 5));
  const double gl_x[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  const double gl_w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const int panels = 400, Ms = 12;
  double acc = 0.0;
  for (int k = 0; k < panels; ++k)
    for (int i = 0; i < 3; ++i) {
      const double t = (k + 0.5 + 0.5 * gl_x[i]) / panels;
      const SpectralField e = evolve(c, t, prob.kind);
      double sp = 0.0;
      for (int a = 0; a < Ms; ++a)
        for (int b = 0; b < Ms; ++b) {
          Complex u{};
          for (int m = -N; m <= N; ++m)
            for (int n = -N; n <= N; ++n) u += e.at({m, n}) * std::polar(1.0, kTwoPi * (m * a + n * b) / Ms);
          sp += std::pow(std::abs(u), 4);
        }
      acc += 0.5 * gl_w[i] / panels * sp * std::pow(kTwoPi / Ms, 2);
    }
  const double oracle = std::pow(acc, 0.25) / hs_norm(c, 0);
  EXPECT_LT(std::fabs(ratio_at(prob, c) - oracle), 1e-6 * oracle);
}

TEST(Objective, GradientMatchesCentralDifferences) {
  struct Case {
    double p, q, s;
    bool project;
    EvolutionKind kind;
  };
  const std::vector<Case> cases = {{4, 4, 0, false, EvolutionKind::non_elliptic()},
                                   {8, 8.0 / 3.0, 0.25, false, EvolutionKind::non_elliptic()},
                                   {10.0 / 3.0, 5, 0.1, true, EvolutionKind::non_elliptic()},
                                   {4, 4, 0.25, false, EvolutionKind::elliptic()},
                                   {6, 3, 0, false, EvolutionKind::line(+1)}};
  for (const auto& cs : cases) {
    auto prob = problem(cs.p, cs.q, cs.s, 3, 24, cs.kind);
    if (cs.project) prob.projector = build_phi_psi(1.0, 3).psi_pair();
    const std::size_t n = cs.kind.dim() == Dim::Two ? 49 : 7;
    const auto c = random_coeffs(n, 11);
    const auto g = gradient(prob, c);
    ObjectiveEvaluator ev(prob);
    const double eps = 1e-5;
    for (std::uint64_t d = 0; d < 20; ++d) {
      auto dir = random_coeffs(n, 100 + d);
      if (prob.projector)
        for (std::size_t i = 0; i < n; ++i)
          if (!prob.in_set(i)) dir[i] = 0;
      std::vector<Complex> cp(n), cm(n);
      for (std::size_t i = 0; i < n; ++i) {
        cp[i] = c[i] + eps * dir[i];
        cm[i] = c[i] - eps * dir[i];
      }
      const double fd = (ev.value(cp) - ev.value(cm)) / (2 * eps);
      const double an = real_inner(g.grad, dir);
      EXPECT_LT(std::fabs(fd - an), 1e-5 * norm2(g.grad) * norm2(dir)) << "p=" << cs.p << " dir=" << d;
    }
  }
}

TEST(Objective, ScaleInvarianceAndRadialGradient) {
  const auto prob = problem(8, 8.0 / 3.0, 0.25, 3, 24);
  const auto c = random_coeffs(49, 4);
  const auto g = gradient(prob, c);
  EXPECT_LT(std::fabs(real_inner(g.grad, c)), 1e-12 * norm2(g.grad) * norm2(c));
  std::vector<Complex> c2 = c;
  for (auto& z : c2) z *= Complex(-3.0, 2.0);
  EXPECT_NEAR(objective(prob, c2), g.value, 1e-12);
}

TEST(Objective, ErrorCodes) {
  auto prob = problem(4, 4, 0, 2, 8);
  EXPECT_THROW(objective(prob, std::vector<Complex>(25)), DomainError);
  EXPECT_THROW(objective(prob, std::vector<Complex>(9, 1.0)), ConfigError);
  prob.projector = build_phi_psi(1.0, 2).psi_pair();
  std::vector<Complex> outside(25);
  outside[0] = 1.0;  // (-2, -2): inside the psi support at h = 1, outside the single-mode set below
  EXPECT_NO_THROW(objective(prob, outside));
  prob.projector = MultiplierSymbol::tabulate(Dim::Two, 2, [](FrequencyIndex k) { return Complex(k.m == 0 && k.n == 0 ? 1.0 : 0.0); });
  EXPECT_THROW(objective(prob, outside), AnnihilatedError);
  prob.projector = MultiplierSymbol::constant(Dim::Two, 2, 0.0);
  EXPECT_THROW(prob.validate(), ConfigError);

  auto p1 = problem(1, 4, 0, 2, 8);
  EXPECT_NO_THROW(objective(p1, random_coeffs(25, 1)));
  EXPECT_THROW(gradient(p1, random_coeffs(25, 1)), DomainError);
  auto p0 = problem(0.5, 4, 0, 2, 8);
  EXPECT_THROW(objective(p0, random_coeffs(25, 1)), DomainError);
  auto pw = problem(4, 4, 0, 2, 8);
  pw.window = 1.5;
  EXPECT_THROW(objective(pw, random_coeffs(25, 1)), DomainError);
}

TEST(Estimator, RandomProbingIsMonotoneInDraws) {
  const auto prob = problem(4, 4, 0, 3, 32);
  double prev = 0.0;
  for (int d : {1, 2, 4, 8, 16}) {
    const auto e = estimate_random(prob, d, 42);
    EXPECT_GE(e.value, prev);
    EXPECT_EQ(e.method, EstimateMethod::Random);
    EXPECT_EQ(static_cast<int>(e.start_values.size()), d);
    prev = e.value;
  }
  EXPECT_THROW(estimate_random(prob, 0, 1), ConfigError);
}

TEST(Estimator, DenseSphereOracleInOneDimension) {
  // N = 1 on the line: 3 complex coefficients; scan 5000 quasi-random points of the unit sphere.
  const auto prob = problem(4, 4, 0, 1, 64, EvolutionKind::line(+1));
  ObjectiveEvaluator ev(prob);
  double oracle = -1e300;
  for (std::uint64_t i = 1; i <= 5000; ++i) {
    std::vector<Complex> c(3);
    const int bases[6] = {2, 3, 5, 7, 11, 13};
    for (int j = 0; j < 3; ++j) {
      const double u1 = halton(i, bases[2 * j]), u2 = halton(i, bases[2 * j + 1]);
      const double r = std::sqrt(-2.0 * std::log(std::max(u1, 1e-300)));
      c[static_cast<std::size_t>(j)] = std::polar(r, kTwoPi * u2);
    }
    oracle = std::max(oracle, ev.value(c));
  }
  oracle = std::exp(oracle);
  const auto rnd = estimate_random(prob, 256, 7);
  const auto asc = estimate_ascent(prob, 2, 7);
  EXPECT_GT(rnd.value, 0.98 * oracle);
  EXPECT_GT(asc.value, 0.99 * oracle);
  EXPECT_LT(asc.value, 1.01 * oracle);
  EXPECT_GE(asc.value, rnd.start_values.front());
}

TEST(Estimator, AscentImprovesOnItsStart) {
  const auto prob = problem(4, 4, 0, 4, 64);
  AscentOptions opts;
  opts.draws_per_restart = 3;
  const auto asc = estimate_ascent(prob, 1, 9, opts);
  const auto rnd = estimate_random(prob, 3, 9);
  EXPECT_GE(asc.value, rnd.value);
  EXPECT_GT(asc.iterations, 0);
  EXPECT_GE(asc.evaluations, asc.iterations + 1);
  EXPECT_EQ(asc.restarts, 1);
  EXPECT_THROW(estimate_ascent(prob, 0, 1), ConfigError);
}

TEST(Estimator, DeterministicAcrossThreadCounts) {
  const auto prob = problem(4, 4, 0.1, 3, 32);
  AscentOptions a, b;
  a.threads = 1;
  b.threads = 3;
  a.max_iterations = b.max_iterations = 40;
  const auto ea = estimate_ascent(prob, 3, 123, a);
  const auto eb = estimate_ascent(prob, 3, 123, b);
  EXPECT_EQ(ea.value, eb.value);
  EXPECT_EQ(ea.iterations, eb.iterations);
  EXPECT_EQ(ea.evaluations, eb.evaluations);
  ASSERT_EQ(ea.witness.size(), eb.witness.size());
  for (std::size_t i = 0; i < ea.witness.size(); ++i) EXPECT_EQ(ea.witness.coeffs()[i], eb.witness.coeffs()[i]);
  const auto ec = estimate_ascent(prob, 3, 124, a);
  EXPECT_NE(ea.start_values, ec.start_values);
}

TEST(Estimator, WitnessReproducesReportedValue) {
  const auto prob = problem(8, 8.0 / 3.0, 0, 3, 32);
  const auto e = estimate_ascent(prob, 2, 5);
  EXPECT_NEAR(ratio_at(prob, e.witness), e.value, 1e-14 * e.value);
  EXPECT_NEAR(hs_norm(e.witness, 0.0), 1.0, 1e-12);
  const auto r = estimate_random(prob, 5, 5);
  EXPECT_NEAR(ratio_at(prob, r.witness), r.value, 1e-14 * r.value);
}

TEST(Estimator, LargerBoxSeededWithSmallerWitnessDoesNotDecrease) {
  const auto small = estimate_ascent(problem(4, 4, 0, 4, 64), 1, 3);
  AscentOptions opts;
  opts.initial_witnesses = {small.witness};
  const auto big = estimate_ascent(problem(4, 4, 0, 8, 256), 1, 3, opts);
  EXPECT_GE(big.value, small.value * (1 - 1e-3));
  EXPECT_EQ(big.restarts, 2);
}

TEST(Estimator, ProjectorRestrictsWitness) {
  auto prob = problem(4, 4, 0, 6, 64);
  prob.projector = build_phi_psi(0.5, 6).psi_pair();
  const auto e = estimate_ascent(prob, 1, 2);
  for (std::size_t i = 0; i < e.witness.size(); ++i)
    if (!prob.in_set(i)) {
      EXPECT_EQ(e.witness.coeffs()[i], Complex{});
    }
}

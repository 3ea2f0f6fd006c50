#pragma once

// Lower-bound estimation of Strichartz constants
//
//   sup_c  || exp(-it omega) P c ||_{L^p([0,T]) L^q} / || c ||_{H^s}
//
// over a truncated coefficient box, by random probing and by gradient ascent
// on the H^s unit sphere. Every reported value is the ratio attained at the
// returned witness.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "strichartz/fit.hpp"
#include "strichartz/lattice.hpp"
#include "strichartz/norms.hpp"
#include "strichartz/parallel.hpp"
#include "strichartz/propagator.hpp"
#include "strichartz/random.hpp"
#include "strichartz/transform.hpp"

namespace strichartz {

struct NormProblem {
  double p = 4.0;
  double q = 4.0;
  double s = 0.0;
  EvolutionKind kind = EvolutionKind::non_elliptic();
  GridSpec grid;        // M_t samples the window [0, window]
  double window = 1.0;  // T_w
  std::optional<MultiplierSymbol> projector;  // applied before evolution; its support is the frequency set

  Dim dim() const noexcept { return kind.dim(); }
  int N() const noexcept { return grid.N; }

  void validate() const {
    grid.validate();
    if (!(p >= 1.0) || !(q >= 1.0)) throw DomainError("norm exponents must be >= 1");
    if (!(window > 0.0 && window <= 1.0)) throw DomainError("time window must lie in (0, 1]");
    if (projector) {
      if (projector->dim() != dim() || projector->N() != grid.N) throw ConfigError("projector lattice mismatch");
      const auto v = projector->values();
      if (std::none_of(v.begin(), v.end(), [](const Complex& z) { return z != Complex{}; }))
        throw ConfigError("frequency set is empty");
    }
  }

  /// (1 + |k|^2)^s, in field layout.
  std::vector<double> sobolev_weights() const {
    const int n = grid.N;
    std::vector<double> w;
    w.reserve(checked_pow(static_cast<std::size_t>(2 * n + 1), dim_value(dim())));
    if (dim() == Dim::One) {
      for (int m = -n; m <= n; ++m) w.push_back(std::pow(1.0 + static_cast<double>(m) * m, s));
    } else {
      for (int m = -n; m <= n; ++m)
        for (int k = -n; k <= n; ++k) w.push_back(std::pow(1.0 + static_cast<double>(m) * m + static_cast<double>(k) * k, s));
    }
    return w;
  }

  bool in_set(std::size_t i) const noexcept { return !projector || projector->values()[i] != Complex{}; }

  NormProblem with_grid(const GridSpec& g) const {
    NormProblem out = *this;
    out.grid = g;
    return out;
  }
};

/// Evaluates the log-ratio objective and its gradient with reusable buffers.
///
/// The gradient is with respect to (Re c, Im c), packed as a complex array.
/// It is exact for the discretized objective: the derivative of the
/// synthesis step is its adjoint (the unnormalized forward transform).
class ObjectiveEvaluator {
 public:
  explicit ObjectiveEvaluator(NormProblem prob)
      : prob_(std::move(prob)),
        synth_(SpectralField(prob_.dim(), prob_.N()), prob_.grid, prob_.kind),
        pw_(prob_.q),
        weights_(prob_.sobolev_weights()) {
    prob_.validate();
    const std::size_t n = weights_.size();
    projected_.resize(n);
    phased_.resize(n);
    band_.resize(n);
    accum_.resize(n);
  }

  const NormProblem& problem() const noexcept { return prob_; }
  std::span<const double> weights() const noexcept { return weights_; }

  double value(std::span<const Complex> c) { return run(c, nullptr); }

  double value_and_gradient(std::span<const Complex> c, std::span<Complex> grad) {
    if (!(prob_.p > 1.0) || !(prob_.q > 1.0)) throw DomainError("gradient requires p > 1 and q > 1");
    return run(c, &grad);
  }

  /// (2 pi)^d sum W |c|^2.
  double hs_squared(std::span<const Complex> c) const noexcept {
    double acc = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) acc += weights_[i] * std::norm(c[i]);
    return volume() * acc;
  }

  double volume() const noexcept { return prob_.dim() == Dim::One ? kTwoPi : kTwoPi * kTwoPi; }

 private:
  double run(std::span<const Complex> c, std::span<Complex>* grad) {
    if (c.size() != weights_.size()) throw ConfigError("coefficient array does not match problem lattice");
    const double h2 = hs_squared(c);
    if (!(h2 > 0.0)) throw DomainError("objective of the zero field");

    const auto proj = prob_.projector ? prob_.projector->values() : std::span<const Complex>{};
    for (std::size_t i = 0; i < c.size(); ++i) projected_[i] = proj.empty() ? c[i] : proj[i] * c[i];
    if (std::all_of(projected_.begin(), projected_.end(), [](const Complex& z) { return z == Complex{}; }))
      throw AnnihilatedError("pre-projector annihilated the input");

    const int N = prob_.N();
    const int M = prob_.grid.M_x;
    const int Mt = prob_.grid.M_t;
    const Dim dim = prob_.dim();
    const double p = prob_.p;
    const double q = prob_.q;
    const double w = prob_.window / static_cast<double>(Mt);
    const double cell = detail::cell_volume(dim, M);
    auto buffer = synth_.buffer();

    if (grad) std::fill(accum_.begin(), accum_.end(), Complex{});
    double total = 0.0;
    for (int k = 0; k < Mt; ++k) {
      synth_.phases(time_sample(k, Mt, prob_.window));
      synth_.apply_phases(projected_, phased_);
      detail::scatter_band(phased_, dim, N, M, buffer);
      detail::synthesize_in_place(buffer, dim, N, M);
      const double nk = cell * detail::sum_abs_pow(buffer, pw_);
      total += w * (p == q ? nk : std::pow(nk, p / q));
      if (!grad) continue;

      if (nk < 1e-300 && p < q) throw DegeneracyError("time slice with vanishing L^q norm");
      const double factor = w * cell * (p == q ? 1.0 : std::pow(nk, p / q - 1.0));
      for (auto& z : buffer) z *= factor * pw_.derivative_factor(std::norm(z));
      detail::adjoint_in_place(buffer, dim, N, M);
      detail::gather_band(buffer, dim, N, M, 1.0, band_);
      synth_.accumulate_conj_phases(band_, accum_);
    }
    if (!(total > 0.0)) throw DegeneracyError("space-time norm vanished");
    const double value = std::log(total) / p - 0.5 * std::log(h2);

    if (grad) {
      auto& g = *grad;
      const double vol = volume();
      for (std::size_t i = 0; i < c.size(); ++i) {
        const Complex a = proj.empty() ? accum_[i] : std::conj(proj[i]) * accum_[i];
        g[i] = a / total - (vol * weights_[i] / h2) * c[i];
      }
    }
    return value;
  }

  NormProblem prob_;
  SliceSynthesizer synth_;
  detail::AbsPow pw_;
  std::vector<double> weights_;
  std::vector<Complex> projected_, phased_, band_, accum_;
};

/// log ||T c||_{L^p L^q} - log ||c||_{H^s}; invariant under c -> t c.
inline double objective(const NormProblem& prob, std::span<const Complex> c) {
  return ObjectiveEvaluator(prob).value(c);
}

struct ObjectiveGradient {
  double value = 0.0;
  std::vector<Complex> grad;
};

inline ObjectiveGradient gradient(const NormProblem& prob, std::span<const Complex> c) {
  ObjectiveEvaluator ev(prob);
  ObjectiveGradient out;
  out.grad.resize(c.size());
  out.value = ev.value_and_gradient(c, out.grad);
  return out;
}

enum class EstimateMethod { Random, Ascent };

inline std::string method_name(EstimateMethod m) { return m == EstimateMethod::Random ? "random" : "ascent"; }

struct NormEstimate {
  double value = 0.0;  // attained ratio (not its logarithm)
  SpectralField witness;
  EstimateMethod method = EstimateMethod::Random;
  int iterations = 0;  // of the winning start
  long evaluations = 0;  // objective evaluations over all starts
  int restarts = 0;    // number of starts tried
  bool converged = false;
  std::uint64_t seed = 0;
  std::vector<double> start_values;  // per start, for dispersion reports
};

namespace detail {

/// Draw `index` of the Gaussian prior scaled by (1+|k|^2)^(-s/2), restricted
/// to the frequency set.
inline std::vector<Complex> prior_draw(const NormProblem& prob, std::span<const double> weights, std::uint64_t seed,
                                       std::uint64_t index) {
  rng::CounterStream stream(seed, index);
  std::vector<Complex> c(weights.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Complex z = stream.complex_normal();
    c[i] = prob.in_set(i) ? z / std::sqrt(weights[i]) : Complex{};
  }
  return c;
}

inline void normalize_hs(const ObjectiveEvaluator& ev, std::vector<Complex>& c) {
  const double norm = std::sqrt(ev.hs_squared(c));
  if (!(norm > 0.0)) throw DomainError("cannot normalize the zero field");
  for (auto& z : c) z /= norm;
}

}  // namespace detail

/// Best ratio over `draws` prior samples keyed by (seed, draw index).
inline NormEstimate estimate_random(const NormProblem& prob, int draws, std::uint64_t seed) {
  if (draws < 1) throw ConfigError("estimate_random needs at least one draw");
  ObjectiveEvaluator ev(prob);
  std::vector<Complex> best;
  double best_value = 0.0;
  NormEstimate out;
  for (int d = 0; d < draws; ++d) {
    auto c = detail::prior_draw(prob, ev.weights(), seed, static_cast<std::uint64_t>(d));
    detail::normalize_hs(ev, c);
    const double v = ev.value(c);
    out.start_values.push_back(std::exp(v));
    if (best.empty() || v > best_value) {
      best_value = v;
      best = std::move(c);
    }
  }
  out.value = std::exp(best_value);
  out.witness = SpectralField(prob.dim(), prob.N(), std::move(best));
  out.method = EstimateMethod::Random;
  out.restarts = draws;
  out.converged = true;
  out.seed = seed;
  return out;
}

struct AscentOptions {
  int draws_per_restart = 4;
  int max_iterations = 500;
  int stall_window = 20;
  double stall_tolerance = 1e-4;  // on the log objective, i.e. relative gain
  int max_backtracks = 40;
  int threads = 1;
  /// Extra starting points, run after the random restarts.
  std::vector<SpectralField> initial_witnesses;
};

namespace detail {

struct AscentRun {
  double log_value = 0.0;
  std::vector<Complex> witness;
  int iterations = 0;
  long evaluations = 0;
  bool converged = false;
};

/// Normalized-gradient ascent in whitened coordinates a = W^(1/2) c, where
/// the constraint ||c||_{H^s} = 1 becomes a sphere. The first trial step is
/// the fixed-point step a + |a|^2 grad_a; backtracking halves it.
inline AscentRun ascend(ObjectiveEvaluator& ev, std::vector<Complex> c, const AscentOptions& opts) {
  const auto weights = ev.weights();
  const std::size_t n = c.size();
  std::vector<double> root(n);
  for (std::size_t i = 0; i < n; ++i) root[i] = std::sqrt(weights[i]);

  normalize_hs(ev, c);
  AscentRun run;
  std::vector<Complex> grad(n), trial(n), trial_grad(n), a(n), ga(n);
  double f = ev.value_and_gradient(c, grad);
  run.evaluations = 1;
  std::vector<double> history{f};

  for (int it = 0; it < opts.max_iterations; ++it) {
    double a2 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = root[i] * c[i];
      ga[i] = grad[i] / root[i];
      a2 += std::norm(a[i]);
      g2 += std::norm(ga[i]);
    }
    const double gnorm = std::sqrt(g2);
    if (gnorm * std::sqrt(a2) < 1e-12) {
      run.converged = true;
      break;
    }
    double step = a2 * gnorm;
    bool accepted = false;
    double ft = 0.0;
    for (int bt = 0; bt <= opts.max_backtracks; ++bt, step *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = (a[i] + (step / gnorm) * ga[i]) / root[i];
      normalize_hs(ev, trial);
      ft = ev.value_and_gradient(trial, trial_grad);
      ++run.evaluations;
      if (ft > f) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      run.converged = true;
      break;
    }
    c.swap(trial);
    grad.swap(trial_grad);
    f = ft;
    history.push_back(f);
    run.iterations = it + 1;
    const std::size_t h = history.size();
    if (static_cast<int>(h) > opts.stall_window && history[h - 1] - history[h - 1 - static_cast<std::size_t>(opts.stall_window)] < opts.stall_tolerance) {
      run.converged = true;
      break;
    }
  }
  run.log_value = f;
  run.witness = std::move(c);
  return run;
}

}  // namespace detail

/// Best of: `restarts` ascents, each started from the best of its
/// `draws_per_restart` prior draws, followed by ascents from the supplied
/// witnesses. Ties go to the lowest start index.
inline NormEstimate estimate_ascent(const NormProblem& prob, int restarts, std::uint64_t seed,
                                    const AscentOptions& opts = {}) {
  if (restarts < 1) throw ConfigError("estimate_ascent needs at least one restart");
  if (opts.draws_per_restart < 1) throw ConfigError("estimate_ascent needs at least one draw per restart");
  prob.validate();

  const std::size_t random_starts = static_cast<std::size_t>(restarts);
  const std::size_t total = random_starts + opts.initial_witnesses.size();
  std::vector<std::optional<detail::AscentRun>> runs(total);

  parallel_for(total, opts.threads, [&](std::size_t r) {
    ObjectiveEvaluator ev(prob);
    std::vector<Complex> start;
    if (r < random_starts) {
      double best = 0.0;
      for (int d = 0; d < opts.draws_per_restart; ++d) {
        const auto index = static_cast<std::uint64_t>(r) * static_cast<std::uint64_t>(opts.draws_per_restart) + static_cast<std::uint64_t>(d);
        auto c = detail::prior_draw(prob, ev.weights(), seed, index);
        detail::normalize_hs(ev, c);
        const double v = ev.value(c);
        if (start.empty() || v > best) {
          best = v;
          start = std::move(c);
        }
      }
    } else {
      const SpectralField& w = opts.initial_witnesses[r - random_starts];
      if (w.dim() != prob.dim()) throw ConfigError("initial witness has the wrong dimension");
      const SpectralField sized = w.resized(prob.N());
      start.assign(sized.coeffs().begin(), sized.coeffs().end());
      for (std::size_t i = 0; i < start.size(); ++i)
        if (!prob.in_set(i)) start[i] = Complex{};
      if (std::all_of(start.begin(), start.end(), [](const Complex& z) { return z == Complex{}; })) return;
    }
    runs[r] = detail::ascend(ev, std::move(start), opts);
  });

  NormEstimate out;
  out.method = EstimateMethod::Ascent;
  out.seed = seed;
  std::optional<std::size_t> best;
  for (std::size_t r = 0; r < total; ++r) {
    if (!runs[r]) continue;
    ++out.restarts;
    out.evaluations += runs[r]->evaluations;
    out.start_values.push_back(std::exp(runs[r]->log_value));
    if (!best || runs[r]->log_value > runs[*best]->log_value) best = r;
  }
  if (!best) throw DomainError("no usable starting point");
  auto& win = *runs[*best];
  out.value = std::exp(win.log_value);
  out.iterations = win.iterations;
  out.converged = win.converged;
  out.witness = SpectralField(prob.dim(), prob.N(), std::move(win.witness));
  return out;
}

/// Ratio attained at a coefficient field, evaluated on a (possibly refined) problem.
inline double ratio_at(const NormProblem& prob, const SpectralField& c) { return std::exp(objective(prob, c.coeffs())); }

}  // namespace strichartz

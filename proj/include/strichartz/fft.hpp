#pragma once

// Thin FFTW wrapper. Plans are created once under a lock and executed with
// the new-array interface, which FFTW documents as thread safe. Only
// FFTW_ESTIMATE plans are built so results are reproducible run to run.

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <tuple>

#include "strichartz/lattice.hpp"

namespace strichartz::detail {

enum class FftSign : int { Forward = FFTW_FORWARD, Backward = FFTW_BACKWARD };

class FftPlans {
 public:
  static FftPlans& instance() {
    static FftPlans plans;
    return plans;
  }

  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

  ~FftPlans() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  /// `count` contiguous transforms of length M, consecutive ones M apart.
  fftw_plan rows(int M, int count, FftSign sign) { return get(Kind::Rows, M, count, sign); }

  /// M transforms of length M with stride M (the slow axis of an MxM array).
  fftw_plan cols(int M, FftSign sign) { return get(Kind::Cols, M, M, sign); }

 private:
  enum class Kind { Rows, Cols };
  using Key = std::tuple<Kind, int, int, int>;

  FftPlans() = default;

  fftw_plan get(Kind kind, int M, int count, FftSign sign) {
    std::lock_guard<std::mutex> lock(mu_);
    const Key key{kind, M, count, static_cast<int>(sign)};
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    const std::size_t total = static_cast<std::size_t>(M) * static_cast<std::size_t>(kind == Kind::Rows ? count : M);
    auto* scratch = fftw_alloc_complex(total);
    if (scratch == nullptr) throw ResourceError("fftw allocation failed");
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    int n[1] = {M};
    fftw_plan plan = nullptr;
    if (kind == Kind::Rows) {
      plan = fftw_plan_many_dft(1, n, count, scratch, nullptr, 1, M, scratch, nullptr, 1, M, static_cast<int>(sign), flags);
    } else {
      plan = fftw_plan_many_dft(1, n, M, scratch, nullptr, M, 1, scratch, nullptr, M, 1, static_cast<int>(sign), flags);
    }
    fftw_free(scratch);
    if (plan == nullptr) throw ResourceError("fftw planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

  std::mutex mu_;
  std::map<Key, fftw_plan> plans_;
};

inline fftw_complex* as_fftw(Complex* p) noexcept { return reinterpret_cast<fftw_complex*>(p); }

inline void execute(fftw_plan plan, Complex* data) { fftw_execute_dft(plan, as_fftw(data), as_fftw(data)); }

}  // namespace strichartz::detail

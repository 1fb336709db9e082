#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace relaysec {

// Philox 4x32-10 counter-based generator (Salmon et al., SC'11).  State is
// just (key, stream, block counter), so a (seed, stream) pair names an
// independent substream and any block can be produced out of order; that is
// what makes per-trial streams reproducible regardless of which worker runs
// the trial.
class SubstreamRng {
 public:
  SubstreamRng(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  std::uint64_t next_u64() {
    if (idx_ >= 4) refill();
    const std::uint64_t lo = buf_[idx_];
    const std::uint64_t hi = buf_[idx_ + 1];
    idx_ += 2;
    return lo | (hi << 32);
  }

  // uniform on (0, 1]: never zero, so -log stays finite
  double uniform01() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1p-53; }

  // uniform on [lo, hi)
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(next_u64() >> 11) * 0x1p-53);
  }

  // unit-mean exponential
  double exponential() { return -std::log(uniform01()); }

  std::uint64_t poisson(double mean) {
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be >= 0");
    if (mean == 0.0) return 0;
    if (mean < 10.0) {
      // multiplicative inversion
      const double limit = std::exp(-mean);
      std::uint64_t k = 0;
      double prod = uniform01();
      while (prod > limit) {
        ++k;
        prod *= uniform01();
      }
      return k;
    }
    return poisson_ptrs(mean);
  }

 private:
  void refill() {
    std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    std::array<std::uint32_t, 2> key = key_;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = 0xD2511F53ull * ctr[0];
      const std::uint64_t p1 = 0xCD9E8D57ull * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(p0)};
      key[0] += 0x9E3779B9u;
      key[1] += 0xBB67AE85u;
    }
    buf_ = ctr;
    ++block_;
    idx_ = 0;
  }

  // Hormann's PTRS transformed rejection, exact for mean >= 10
  std::uint64_t poisson_ptrs(double mean) {
    const double log_mean = std::log(mean);
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      const double u = uniform01() - 0.5;
      const double v = uniform01();
      const double us = 0.5 - std::fabs(u);
      const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(k);
      if (k < 0.0 || (us < 0.013 && v > us)) continue;
      if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
          k * log_mean - mean - std::lgamma(k + 1.0))
        return static_cast<std::uint64_t>(k);
    }
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int idx_ = 4;
};

}  // namespace relaysec

#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "analytics.hpp"
#include "model.hpp"

namespace relaysec {

struct HopSearchResult {
  SchemeKind scheme = SchemeKind::Oft;
  int n_best = 1;
  RateDesign rates_best;
  double throughput_best = 0.0;
  std::vector<std::pair<int, double>> profile;  // (n_hops, throughput), n = 1..n_max
};

// Exhaustive search over the hop count, each candidate evaluated at its own
// optimal rates.  Ties break toward fewer hops.
inline HopSearchResult optimize_hops(const NetworkConfig& cfg, SchemeKind scheme, int n_max = 50) {
  if (n_max < 1) throw std::invalid_argument("optimize_hops: n_max must be >= 1");
  HopSearchResult best;
  best.scheme = scheme;
  best.throughput_best = -1.0;
  best.profile.reserve(n_max);
  for (int n = 1; n <= n_max; ++n) {
    const RateDesign rates = optimal_rates(cfg, scheme, n);
    const double u = throughput(cfg, scheme, n, rates);
    best.profile.emplace_back(n, u);
    if (u > best.throughput_best) {
      best.n_best = n;
      best.rates_best = rates;
      best.throughput_best = u;
    }
  }
  return best;
}

struct RateGridResult {
  double codeword_rate_best = 0.0;
  double throughput_best = 0.0;
  double grid_step = 0.0;
};

// Brute-force check of the closed-form rate optimum: walk the codeword rate
// over {Re + k*step : k >= 1} up to codeword_rate_max and keep the argmax of
// the true objective.  Deliberately avoids the Lambert W solution.
inline RateGridResult brute_force_rates(const NetworkConfig& cfg, SchemeKind scheme, int n_hops,
                                        double grid_step, double codeword_rate_max) {
  if (!(grid_step > 0.0)) throw std::invalid_argument("brute_force_rates: step must be positive");
  const double re = rate_redundancy(cfg, n_hops);
  if (!(codeword_rate_max > re))
    throw std::invalid_argument("brute_force_rates: codeword_rate_max must exceed the redundancy");
  const auto count = static_cast<std::int64_t>((codeword_rate_max - re) / grid_step);
  RateGridResult best;
  best.grid_step = grid_step;
  best.throughput_best = -1.0;
  for (std::int64_t k = 1; k <= count; ++k) {
    const double rt = re + static_cast<double>(k) * grid_step;
    const double u = throughput(cfg, scheme, n_hops, rates_from(rt, rt - re));
    if (u > best.throughput_best) {
      best.codeword_rate_best = rt;
      best.throughput_best = u;
    }
  }
  return best;
}

}  // namespace relaysec

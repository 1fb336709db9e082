#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "analytics.hpp"
#include "model.hpp"
#include "rng.hpp"

namespace relaysec {

// Axis-aligned sampling window for eavesdropper positions.
struct SimRegion {
  double width_m = 2000.0;
  double height_m = 2000.0;
  double center_x_m = 0.0;
  double center_y_m = 0.0;
};

// Window centered on the midpoint of the relay line.
inline SimRegion default_region(const NetworkConfig& cfg, double width_m = 2000.0,
                                double height_m = 2000.0) {
  return {width_m, height_m, 0.5 * cfg.length_m, 0.0};
}

enum class MobilityModel {
  IndependentPerHop,  // fresh eavesdropper positions every hop
  FixedAcrossHops,    // one realization overhears the whole path
};

inline const char* to_string(MobilityModel m) {
  return m == MobilityModel::IndependentPerHop ? "independent" : "fixed";
}

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline std::vector<Point2> sample_eavesdroppers(const SimRegion& region, double density,
                                                SubstreamRng& rng) {
  if (!(region.width_m > 0.0 && region.height_m > 0.0))
    throw std::invalid_argument("sample_eavesdroppers: region dimensions must be positive");
  if (!(density >= 0.0)) throw std::invalid_argument("sample_eavesdroppers: density must be >= 0");
  const std::uint64_t count = rng.poisson(density * region.width_m * region.height_m);
  const double x_lo = region.center_x_m - 0.5 * region.width_m;
  const double x_hi = region.center_x_m + 0.5 * region.width_m;
  const double y_lo = region.center_y_m - 0.5 * region.height_m;
  const double y_hi = region.center_y_m + 0.5 * region.height_m;
  std::vector<Point2> points(count);
  for (Point2& pt : points) {
    pt.x = rng.uniform(x_lo, x_hi);
    pt.y = rng.uniform(y_lo, y_hi);
  }
  return points;
}

struct SimEstimate {
  std::uint64_t trials = 0;  // independent observations behind the estimate
  double mean = 0.0;
  double std_error = 0.0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
  bool low_count = false;  // Wald interval backed by < 30 successes or failures
};

struct SimReport {
  SchemeKind scheme = SchemeKind::Oft;
  int n_hops = 0;
  SimEstimate transmit_prob_hop;
  SimEstimate connect_prob_path;
  SimEstimate secrecy_outage_path;
  SimEstimate throughput;            // ratio of means: Rs * sum(delivered) / sum(slots)
  SimEstimate throughput_per_trial;  // mean of per-trial ratios
  SimEstimate slots_per_hop;
  std::uint64_t master_seed = 0;
};

// A retry loop exceeded the per-hop slot budget: the decode threshold is so
// far above the channel that delivery is effectively impossible.
class SlotCapError : public std::runtime_error {
 public:
  SlotCapError(std::uint64_t trial, int hop, std::uint64_t cap)
      : std::runtime_error("slot cap " + std::to_string(cap) + " exceeded at trial " +
                           std::to_string(trial) + ", hop " + std::to_string(hop) +
                           ": decode threshold unreachable at this SNR"),
        trial_(trial),
        hop_(hop),
        cap_(cap) {}
  std::uint64_t trial() const { return trial_; }
  int hop() const { return hop_; }
  std::uint64_t cap() const { return cap_; }

 private:
  std::uint64_t trial_;
  int hop_;
  std::uint64_t cap_;
};

namespace detail {

inline double dist_pow(double r2, double alpha) {
  if (alpha == 2.0) return r2;
  if (alpha == 3.0) return r2 * std::sqrt(r2);
  if (alpha == 4.0) return r2 * r2;
  return std::pow(r2, 0.5 * alpha);
}

inline SimEstimate wald_estimate(std::uint64_t successes, std::uint64_t n) {
  SimEstimate e;
  e.trials = n;
  e.mean = static_cast<double>(successes) / static_cast<double>(n);
  e.std_error = std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(n));
  e.ci95_low = std::fmax(e.mean - 1.96 * e.std_error, 0.0);
  e.ci95_high = std::fmin(e.mean + 1.96 * e.std_error, 1.0);
  e.low_count = successes < 30 || n - successes < 30;
  return e;
}

// a quantity that is 1 (or 0) by construction, not by sampling
inline SimEstimate exact_estimate(std::uint64_t n, double value) {
  return {n, value, 0.0, value, value, false};
}

}  // namespace detail

// Monte Carlo of the full chain: per-hop Rayleigh fading, PPP eavesdroppers
// redrawn per hop or frozen per trial, feedback retries under Oft.  Each
// trial owns substream `trial index` of `master_seed`, and the reduction
// walks trials in index order, so results are bit-identical for any worker
// count.  Memory: ~22 bytes per trial.
inline SimReport simulate(const NetworkConfig& cfg, SchemeKind scheme, int n_hops,
                          const RateDesign& rates, MobilityModel mobility, const SimRegion& region,
                          std::uint64_t trials, std::uint64_t master_seed, int workers = 1,
                          std::uint64_t slot_cap = 1000000) {
  cfg.validate();
  if (n_hops < 1) throw std::invalid_argument("simulate: n_hops must be >= 1");
  if (trials < 1) throw std::invalid_argument("simulate: trials must be >= 1");
  if (slot_cap < 1) throw std::invalid_argument("simulate: slot_cap must be >= 1");
  if (!(region.width_m > 0.0 && region.height_m > 0.0))
    throw std::invalid_argument("simulate: region dimensions must be positive");

  const double hop_d = hop_distance(cfg, n_hops);
  const double hop_gain = path_gain(hop_d, cfg.path_loss_exp);
  const double alpha = cfg.path_loss_exp;
  const double density = cfg.eavesdropper_density;
  const bool oft = scheme == SchemeKind::Oft;

  std::vector<std::uint64_t> slots(trials);
  std::vector<std::uint32_t> first_pass(trials);
  std::vector<std::uint8_t> delivered(trials);
  std::vector<std::uint8_t> outage(trials);

  auto run_trial = [&](std::uint64_t t) {
    SubstreamRng rng(master_seed, t);
    std::vector<Point2> fixed_points;
    if (mobility == MobilityModel::FixedAcrossHops)
      fixed_points = sample_eavesdroppers(region, density, rng);
    std::vector<Point2> hop_points;
    std::uint64_t total_slots = 0;
    std::uint32_t first = 0;
    bool all_hops_decoded = true;
    bool intercepted = false;
    for (int hop = 0; hop < n_hops; ++hop) {
      if (oft) {
        std::uint64_t s = 0;
        for (;;) {
          ++s;
          if (s > slot_cap) throw SlotCapError(t, hop + 1, slot_cap);
          if (cfg.snr * rng.exponential() * hop_gain > rates.decode_threshold) break;
        }
        if (s == 1) ++first;
        total_slots += s;
      } else {
        ++total_slots;
        if (cfg.snr * rng.exponential() * hop_gain > rates.decode_threshold)
          ++first;
        else
          all_hops_decoded = false;
      }
      // eavesdroppers only see the slot that actually carried the message
      if (mobility == MobilityModel::IndependentPerHop)
        hop_points = sample_eavesdroppers(region, density, rng);
      const std::vector<Point2>& points =
          mobility == MobilityModel::FixedAcrossHops ? fixed_points : hop_points;
      const double tx_x = hop * hop_d;
      for (const Point2& pt : points) {
        const double dx = pt.x - tx_x;
        const double r2 = dx * dx + pt.y * pt.y;
        const double gain = 1.0 / (1.0 + detail::dist_pow(r2, alpha));
        if (cfg.snr * rng.exponential() * gain > rates.eavesdrop_threshold) intercepted = true;
      }
    }
    slots[t] = total_slots;
    first_pass[t] = first;
    delivered[t] = oft ? 1 : static_cast<std::uint8_t>(all_hops_decoded);
    outage[t] = static_cast<std::uint8_t>(intercepted);
  };

  const int worker_count = std::max(1, workers);
  if (worker_count == 1) {
    for (std::uint64_t t = 0; t < trials; ++t) run_trial(t);
  } else {
    struct WorkerFailure {
      bool failed = false;
      std::uint64_t trial = 0;
      std::exception_ptr error;
    };
    std::vector<WorkerFailure> failures(worker_count);
    const std::uint64_t chunk = (trials + worker_count - 1) / worker_count;
    std::vector<std::thread> pool;
    pool.reserve(worker_count);
    for (int w = 0; w < worker_count; ++w) {
      pool.emplace_back([&, w] {
        const std::uint64_t lo = static_cast<std::uint64_t>(w) * chunk;
        const std::uint64_t hi = std::min(trials, lo + chunk);
        try {
          for (std::uint64_t t = lo; t < hi; ++t) run_trial(t);
        } catch (const SlotCapError& e) {
          failures[w] = {true, e.trial(), std::current_exception()};
        } catch (...) {
          failures[w] = {true, lo, std::current_exception()};
        }
      });
    }
    for (std::thread& th : pool) th.join();
    // earliest failing trial wins, so the surfaced error does not depend on
    // how trials were split across workers
    const WorkerFailure* chosen = nullptr;
    for (const WorkerFailure& f : failures)
      if (f.failed && (!chosen || f.trial < chosen->trial)) chosen = &f;
    if (chosen) std::rethrow_exception(chosen->error);
  }

  // single-pass reduction in trial order; float sums see one fixed order
  std::uint64_t sum_slots = 0, n_delivered = 0, n_outage = 0, n_first = 0;
  double sum_ratio = 0.0, sum_ratio_sq = 0.0;
  double sum_slots_sq = 0.0, sum_cross = 0.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    sum_slots += slots[t];
    n_delivered += delivered[t];
    n_outage += outage[t];
    n_first += first_pass[t];
    const double s = static_cast<double>(slots[t]);
    const double ratio = rates.secrecy_rate * delivered[t] / s;
    sum_ratio += ratio;
    sum_ratio_sq += ratio * ratio;
    sum_slots_sq += s * s;
    sum_cross += s * delivered[t];
  }

  const auto nt = static_cast<double>(trials);
  SimReport rep;
  rep.scheme = scheme;
  rep.n_hops = n_hops;
  rep.master_seed = master_seed;

  rep.transmit_prob_hop = oft ? detail::wald_estimate(n_first, trials * n_hops)
                              : detail::exact_estimate(trials * n_hops, 1.0);
  rep.connect_prob_path = oft ? detail::exact_estimate(trials, 1.0)
                              : detail::wald_estimate(n_delivered, trials);
  rep.secrecy_outage_path = detail::wald_estimate(n_outage, trials);

  {
    SimEstimate e;
    e.trials = trials;
    const double mean_slots = static_cast<double>(sum_slots) / nt;
    e.mean = mean_slots / n_hops;
    if (trials > 1) {
      const double var_slots = std::fmax(sum_slots_sq - nt * mean_slots * mean_slots, 0.0) / (nt - 1.0);
      e.std_error = std::sqrt(var_slots / nt) / n_hops;
    }
    e.ci95_low = e.mean - 1.96 * e.std_error;
    e.ci95_high = e.mean + 1.96 * e.std_error;
    rep.slots_per_hop = e;
  }
  {
    // delta method on Rs * mean(delivered) / mean(slots)
    SimEstimate e;
    e.trials = trials;
    const double m_d = static_cast<double>(n_delivered) / nt;
    const double m_s = static_cast<double>(sum_slots) / nt;
    e.mean = rates.secrecy_rate * m_d / m_s;
    if (trials > 1) {
      const double v_d = std::fmax(static_cast<double>(n_delivered) - nt * m_d * m_d, 0.0) / (nt - 1.0);
      const double v_s = std::fmax(sum_slots_sq - nt * m_s * m_s, 0.0) / (nt - 1.0);
      const double c_ds = (sum_cross - nt * m_d * m_s) / (nt - 1.0);
      const double g = m_d / m_s;
      const double var =
          std::fmax(v_d - 2.0 * g * c_ds + g * g * v_s, 0.0) * (rates.secrecy_rate / m_s) *
          (rates.secrecy_rate / m_s);
      e.std_error = std::sqrt(var / nt);
    }
    e.ci95_low = e.mean - 1.96 * e.std_error;
    e.ci95_high = e.mean + 1.96 * e.std_error;
    rep.throughput = e;
  }
  {
    SimEstimate e;
    e.trials = trials;
    e.mean = sum_ratio / nt;
    if (trials > 1) {
      const double var = std::fmax(sum_ratio_sq - nt * e.mean * e.mean, 0.0) / (nt - 1.0);
      e.std_error = std::sqrt(var / nt);
    }
    e.ci95_low = e.mean - 1.96 * e.std_error;
    e.ci95_high = e.mean + 1.96 * e.std_error;
    rep.throughput_per_trial = e;
  }
  return rep;
}

struct MetricComparison {
  std::string metric;
  double analytic = 0.0;
  double empirical = 0.0;
  double std_error = 0.0;
  double z = 0.0;
  bool flagged = false;  // |z| > 4
};

struct ValidationRecord {
  SimReport report;
  std::vector<MetricComparison> metrics;
  bool any_flagged = false;
};

// Runs the simulator against the closed forms and z-scores each metric.
inline ValidationRecord validate_against_analytics(const NetworkConfig& cfg, SchemeKind scheme,
                                                   int n_hops, const RateDesign& rates,
                                                   std::uint64_t trials, std::uint64_t master_seed,
                                                   int workers = 1,
                                                   std::uint64_t slot_cap = 1000000,
                                                   std::optional<SimRegion> region = std::nullopt) {
  ValidationRecord rec;
  rec.report = simulate(cfg, scheme, n_hops, rates, MobilityModel::IndependentPerHop,
                        region.value_or(default_region(cfg)), trials, master_seed, workers,
                        slot_cap);
  const PerformanceReport expected = analyze(cfg, scheme, n_hops, rates);
  // Degenerate samples (all successes or all failures) leave the Wald standard
  // error at zero; fall back to the score standard error under the analytic value.
  auto score_se = [](double p0, double n_obs) {
    return std::sqrt(std::fmax(p0 * (1.0 - p0), 0.0) / n_obs);
  };
  rec.metrics.reserve(4);
  auto add = [&rec](const char* name, double analytic, const SimEstimate& est,
                    double fallback_se) {
    MetricComparison c;
    c.metric = name;
    c.analytic = analytic;
    c.empirical = est.mean;
    c.std_error = est.std_error;
    const double diff = est.mean - analytic;
    const double se = est.std_error > 0.0 ? est.std_error : fallback_se;
    if (se > 0.0)
      c.z = diff / se;
    else
      c.z = diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
    c.flagged = !(std::fabs(c.z) <= 4.0);
    rec.any_flagged = rec.any_flagged || c.flagged;
    rec.metrics.push_back(std::move(c));
  };
  const double n_trials = static_cast<double>(trials);
  const double n_first = n_trials * static_cast<double>(n_hops);
  double throughput_fallback;
  if (scheme == SchemeKind::Oft) {
    // delivery is certain; the variance comes from the geometric slot counts
    const double p = expected.transmit_prob_hop;
    const double n3 = static_cast<double>(n_hops) * n_hops * n_hops;
    throughput_fallback =
        rates.secrecy_rate * p * std::sqrt(std::fmax(1.0 - p, 0.0) / (n3 * n_trials));
  } else {
    throughput_fallback = rates.secrecy_rate / static_cast<double>(n_hops) *
                          score_se(expected.connect_prob_path, n_trials);
  }
  add("transmit_prob_hop", expected.transmit_prob_hop, rec.report.transmit_prob_hop,
      score_se(expected.transmit_prob_hop, n_first));
  add("connect_prob_path", expected.connect_prob_path, rec.report.connect_prob_path,
      score_se(expected.connect_prob_path, n_trials));
  add("secrecy_outage_path", expected.secrecy_outage_path, rec.report.secrecy_outage_path,
      score_se(expected.secrecy_outage_path, n_trials));
  add("throughput", expected.throughput, rec.report.throughput, throughput_fallback);
  return rec;
}

}  // namespace relaysec

#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include "model.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"

namespace relaysec {

inline constexpr double kLn2 = std::numbers::ln2;

// pi * density * Gamma(2/alpha + 1): the constant that scales every
// interception expression under the bounded path loss.
inline double density_constant(const NetworkConfig& cfg) {
  return std::numbers::pi * cfg.eavesdropper_density * gamma_fn(2.0 / cfg.path_loss_exp + 1.0);
}

// Mean number of eavesdroppers (per hop, over the whole plane) whose received
// SNR clears the threshold.  Diverges as the threshold goes to zero: with no
// redundancy every eavesdropper anywhere overhears something.
inline double mean_intercept_count(const NetworkConfig& cfg, double eavesdrop_threshold) {
  if (!(eavesdrop_threshold > 0.0))
    throw std::invalid_argument("mean_intercept_count: threshold must be positive");
  const double ratio = eavesdrop_threshold / cfg.snr;
  return density_constant(cfg) *
         std::exp((-2.0 / cfg.path_loss_exp) * std::log(ratio) - ratio);
}

// Secrecy outage probability of a single hop against the PPP of independent
// eavesdroppers, at a given eavesdropper SNR threshold 2^redundancy - 1.
inline double sop_per_hop(const NetworkConfig& cfg, double eavesdrop_threshold) {
  if (!(eavesdrop_threshold >= 0.0))
    throw std::invalid_argument("sop_per_hop: threshold must be >= 0");
  if (cfg.eavesdropper_density == 0.0) return 0.0;
  if (eavesdrop_threshold == 0.0) return 1.0;
  return -std::expm1(-mean_intercept_count(cfg, eavesdrop_threshold));
}

// End-to-end secrecy outage over n_hops hops with per-hop randomization:
// the intercept counts add, so the complement stays a single exponential.
inline double sop_end_to_end(const NetworkConfig& cfg, int n_hops, double eavesdrop_threshold) {
  if (n_hops < 1) throw std::invalid_argument("sop_end_to_end: n_hops must be >= 1");
  if (!(eavesdrop_threshold >= 0.0))
    throw std::invalid_argument("sop_end_to_end: threshold must be >= 0");
  if (cfg.eavesdropper_density == 0.0) return 0.0;
  if (eavesdrop_threshold == 0.0) return 1.0;
  return -std::expm1(-n_hops * mean_intercept_count(cfg, eavesdrop_threshold));
}

// Smallest eavesdropper SNR threshold that pins the end-to-end secrecy outage
// to the configured cap.  Empty when there are no eavesdroppers: any
// redundancy (including none) satisfies the constraint then.
inline std::optional<double> eavesdrop_threshold_for_outage(const NetworkConfig& cfg, int n_hops) {
  if (n_hops < 1)
    throw std::invalid_argument("eavesdrop_threshold_for_outage: n_hops must be >= 1");
  if (cfg.eavesdropper_density == 0.0) return std::nullopt;
  const double a = cfg.path_loss_exp;
  const double budget = -std::log1p(-cfg.max_secrecy_outage);  // ln(1/(1-eps))
  const double per_hop = budget / (n_hops * density_constant(cfg));
  const double arg = 0.5 * a * std::exp(-0.5 * a * std::log(per_hop));
  return (2.0 * cfg.snr / a) * lambert_w0(arg);
}

// Redundancy rate that meets the outage cap at n_hops; zero without
// eavesdroppers.
inline double rate_redundancy(const NetworkConfig& cfg, int n_hops) {
  const auto beta_e = eavesdrop_threshold_for_outage(cfg, n_hops);
  return beta_e ? std::log1p(*beta_e) / kLn2 : 0.0;
}

// Factor multiplying the decode threshold inside the success exponent:
// per-hop for the feedback scheme, summed over the path without feedback.
inline double k_factor(const NetworkConfig& cfg, SchemeKind scheme, int n_hops) {
  const double base =
      (std::pow(hop_distance(cfg, n_hops), cfg.path_loss_exp) + 1.0) / cfg.snr;
  return scheme == SchemeKind::Noft ? n_hops * base : base;
}

// Probability that a hop's first (and under feedback, any given) slot decodes.
inline double transmission_prob_oft(const NetworkConfig& cfg, int n_hops, double decode_threshold) {
  if (!(decode_threshold >= 0.0))
    throw std::invalid_argument("transmission_prob_oft: threshold must be >= 0");
  return std::exp(-k_factor(cfg, SchemeKind::Oft, n_hops) * decode_threshold);
}

// Probability that all n_hops hops decode in their single allotted slot.
inline double connection_prob_noft(const NetworkConfig& cfg, int n_hops, double decode_threshold) {
  if (!(decode_threshold >= 0.0))
    throw std::invalid_argument("connection_prob_noft: threshold must be >= 0");
  return std::exp(-k_factor(cfg, SchemeKind::Noft, n_hops) * decode_threshold);
}

// Throughput-maximizing wiretap rates at a fixed hop count.  The redundancy
// binds the secrecy outage to the cap (when eavesdroppers exist at all) and
// the secrecy rate solves the first-order condition
//   1 = ln2 * K * 2^Rt * (Rt - Re)
// in closed form through Lambert W.  The W argument 2^-Re / K is evaluated
// as 1 / (K * (beta_e + 1)) to dodge the exp2/log2 round trip.
inline RateDesign optimal_rates(const NetworkConfig& cfg, SchemeKind scheme, int n_hops) {
  const auto beta_e = eavesdrop_threshold_for_outage(cfg, n_hops);
  const double re = beta_e ? std::log1p(*beta_e) / kLn2 : 0.0;
  const double k = k_factor(cfg, scheme, n_hops);
  const double rs = lambert_w0(1.0 / (k * (beta_e.value_or(0.0) + 1.0))) / kLn2;
  return rates_from(re + rs, rs);
}

// Secret bits per slot, normalized by the number of hops sharing the channel.
inline double throughput(const NetworkConfig& cfg, SchemeKind scheme, int n_hops,
                         const RateDesign& rates) {
  const double success = scheme == SchemeKind::Oft
                             ? transmission_prob_oft(cfg, n_hops, rates.decode_threshold)
                             : connection_prob_noft(cfg, n_hops, rates.decode_threshold);
  return success * rates.secrecy_rate / n_hops;
}

struct HighSnrLimit {
  double secrecy_rate_limit = 0.0;  // bits per channel use
  double throughput_limit = 0.0;
  double k_constant = 0.0;  // limit of K * (beta_e + 1) as snr grows
};

// Limits of the optimal design as the transmit SNR goes to infinity.  The
// threshold ratio beta_e / snr converges, so the limiting problem has the
// same Lambert W shape with a finite constant.
inline HighSnrLimit high_snr_limit(const NetworkConfig& cfg, SchemeKind scheme, int n_hops) {
  if (n_hops < 1) throw std::invalid_argument("high_snr_limit: n_hops must be >= 1");
  if (!(cfg.eavesdropper_density > 0.0))
    throw std::invalid_argument("high_snr_limit: requires a positive eavesdropper density");
  const double a = cfg.path_loss_exp;
  const double budget = -std::log1p(-cfg.max_secrecy_outage);
  const double per_hop = budget / (n_hops * density_constant(cfg));
  const double w_thresh = lambert_w0(0.5 * a * std::exp(-0.5 * a * std::log(per_hop)));
  double k = (2.0 / a) * (std::pow(hop_distance(cfg, n_hops), a) + 1.0) * w_thresh;
  if (scheme == SchemeKind::Noft) k *= n_hops;
  const double w = lambert_w0(1.0 / k);
  HighSnrLimit lim;
  lim.k_constant = k;
  lim.secrecy_rate_limit = w / kLn2;
  lim.throughput_limit = w / (n_hops * kLn2) * std::exp(-k * std::exp(w));
  return lim;
}

struct PerformanceReport {
  SchemeKind scheme = SchemeKind::Oft;
  int n_hops = 0;
  RateDesign rates;
  double transmit_prob_hop = 0.0;
  double connect_prob_hop = 0.0;
  double connect_prob_path = 0.0;
  double secrecy_outage_hop = 0.0;
  double secrecy_outage_path = 0.0;
  double throughput = 0.0;
};

inline PerformanceReport analyze(const NetworkConfig& cfg, SchemeKind scheme, int n_hops,
                                 const RateDesign& rates) {
  PerformanceReport rep;
  rep.scheme = scheme;
  rep.n_hops = n_hops;
  rep.rates = rates;
  const double hop_success =
      std::exp(-k_factor(cfg, SchemeKind::Oft, n_hops) * rates.decode_threshold);
  if (scheme == SchemeKind::Oft) {
    // retransmit until decoded: delivery is certain, only the slot count varies
    rep.transmit_prob_hop = hop_success;
    rep.connect_prob_hop = 1.0;
    rep.connect_prob_path = 1.0;
  } else {
    rep.transmit_prob_hop = 1.0;
    rep.connect_prob_hop = hop_success;
    rep.connect_prob_path = connection_prob_noft(cfg, n_hops, rates.decode_threshold);
  }
  rep.secrecy_outage_hop = sop_per_hop(cfg, rates.eavesdrop_threshold);
  rep.secrecy_outage_path = sop_end_to_end(cfg, n_hops, rates.eavesdrop_threshold);
  rep.throughput = throughput(cfg, scheme, n_hops, rates);
  return rep;
}

inline PerformanceReport analyze(const NetworkConfig& cfg, SchemeKind scheme, int n_hops) {
  return analyze(cfg, scheme, n_hops, optimal_rates(cfg, scheme, n_hops));
}

// Raised when the deterministic integration cannot certify the requested
// tolerance; carries the best estimate and its error bound.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(double best_estimate, double error_bound)
      : std::runtime_error("quadrature failed to reach tolerance (best estimate " +
                           std::to_string(best_estimate) + ", error bound " +
                           std::to_string(error_bound) + ")"),
        best_estimate_(best_estimate),
        error_bound_(error_bound) {}
  double best_estimate() const { return best_estimate_; }
  double error_bound() const { return error_bound_; }

 private:
  double best_estimate_;
  double error_bound_;
};

// Integration boundary for the fixed-eavesdropper outage: covers the relay
// line plus the margin where the per-transmitter integrand falls below
// tolerance / (10 * area).  Two passes, since the area depends on the radius.
inline double fixed_sop_truncation_radius(const NetworkConfig& cfg, double eavesdrop_threshold,
                                          double tolerance) {
  if (!(eavesdrop_threshold > 0.0))
    throw std::invalid_argument("fixed_sop_truncation_radius: threshold must be positive");
  if (!(tolerance > 0.0))
    throw std::invalid_argument("fixed_sop_truncation_radius: tolerance must be positive");
  const double scale = eavesdrop_threshold / cfg.snr;
  double radius = 3.0 * cfg.length_m;
  for (int pass = 0; pass < 2; ++pass) {
    const double area = 4.0 * radius * radius;
    const double cutoff = tolerance / (10.0 * area);
    const double t = -std::log(cutoff) / scale - 1.0;  // beyond r: exp(-scale(r^a+1)) < cutoff
    const double r_tail = t > 0.0 ? std::exp(std::log(t) / cfg.path_loss_exp) : 0.0;
    radius = std::fmax(3.0 * cfg.length_m, 0.5 * cfg.length_m + r_tail);
  }
  return radius;
}

// End-to-end secrecy outage when one eavesdropper realization overhears every
// hop (positions frozen, fading still fresh per hop).  No closed form: the
// expectation over the PPP leaves a 2-D integral, evaluated adaptively over
// [cx - R, cx + R] x [-R, R] around the path midpoint cx.  The mass outside
// the box is bounded per transmitter and folded into the error budget.
inline double sop_fixed_eavesdroppers(const NetworkConfig& cfg, int n_hops,
                                      double eavesdrop_threshold, double truncation_radius_m,
                                      double tolerance, int max_segments = 20000) {
  if (n_hops < 1) throw std::invalid_argument("sop_fixed_eavesdroppers: n_hops must be >= 1");
  if (!(eavesdrop_threshold > 0.0))
    throw std::invalid_argument("sop_fixed_eavesdroppers: threshold must be positive");
  if (!(truncation_radius_m > 0.0))
    throw std::invalid_argument("sop_fixed_eavesdroppers: radius must be positive");
  if (!(tolerance > 0.0))
    throw std::invalid_argument("sop_fixed_eavesdroppers: tolerance must be positive");
  const double density = cfg.eavesdropper_density;
  if (density == 0.0) return 0.0;

  const double d = hop_distance(cfg, n_hops);
  const double half_a = 0.5 * cfg.path_loss_exp;
  const double scale = eavesdrop_threshold / cfg.snr;

  // P(overhears >= 1 hop) at (x, y); the product over hops stays in logs
  auto integrand = [&](double x, double y) {
    double log_miss = 0.0;
    for (int hop = 0; hop < n_hops; ++hop) {
      const double dx = x - hop * d;
      const double r2 = dx * dx + y * y;
      const double p_hit = std::exp(-scale * (std::pow(r2, half_a) + 1.0));
      log_miss += std::log1p(-p_hit);
    }
    return -std::expm1(log_miss);
  };

  const double cx = 0.5 * cfg.length_m;
  const double radius = truncation_radius_m;
  // |dP/dI| <= density, so an integral budget of tolerance/density suffices;
  // half goes to the quadrature, the rest absorbs the truncated tail.
  const double quad_tol = 0.25 * tolerance / density;
  auto half_plane =
      quad::integrate_2d(integrand, cx - radius, cx + radius, 0.0, radius, quad_tol, max_segments);
  const double integral = 2.0 * half_plane.value;  // symmetric in y

  // tail: past each transmitter's distance to the boundary, the union bound
  // over hops reduces to n ring integrals of the per-hop hit probability
  double tail = 0.0;
  for (int hop = 0; hop < n_hops; ++hop) {
    const double margin = radius - std::fabs(hop * d - cx);
    const double r_cut = std::exp(std::log(745.0 / scale) / cfg.path_loss_exp);
    if (r_cut <= margin) continue;
    auto ring = [&](double s) {
      return 2.0 * std::numbers::pi * s * std::exp(-scale * (std::pow(s * s, half_a) + 1.0));
    };
    auto t = quad::integrate(ring, margin, r_cut, 0.1 * quad_tol / n_hops, 2000);
    tail += t.value + t.error;
  }

  const double result = std::fmax(-std::expm1(-density * integral), 0.0);
  const double error_bound = density * (2.0 * half_plane.error + tail);
  if (!half_plane.converged || !(error_bound <= tolerance))
    throw QuadratureError(result, error_bound);
  return result;
}

}  // namespace relaysec

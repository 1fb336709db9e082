#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace relaysec {

enum class SchemeKind { Oft, Noft };

inline const char* to_string(SchemeKind s) {
  return s == SchemeKind::Oft ? "oft" : "noft";
}

// Scenario parameters.  Distances in meters; SNR on a linear scale with
// receiver noise normalized to one (convert from dB at the boundary).
struct NetworkConfig {
  double length_m = 50.0;             // source-destination separation, > 0
  double path_loss_exp = 3.0;         // alpha, in [2, 6]
  double snr = 1e10;                  // transmit SNR p, > 0
  double eavesdropper_density = 1e-5; // nodes per square meter, >= 0
  double max_secrecy_outage = 0.05;   // end-to-end outage cap epsilon, in (0, 1)

  void validate() const {
    if (!(length_m > 0.0) || !std::isfinite(length_m))
      throw std::invalid_argument("length_m must be positive and finite");
    if (!(path_loss_exp >= 2.0 && path_loss_exp <= 6.0))
      throw std::invalid_argument("path_loss_exp must lie in [2, 6]");
    if (!(snr > 0.0) || !std::isfinite(snr))
      throw std::invalid_argument("snr must be positive and finite");
    if (!(eavesdropper_density >= 0.0) || !std::isfinite(eavesdropper_density))
      throw std::invalid_argument("eavesdropper_density must be non-negative and finite");
    if (!(max_secrecy_outage > 0.0 && max_secrecy_outage < 1.0))
      throw std::invalid_argument("max_secrecy_outage must lie in (0, 1)");
  }
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double v) { return 10.0 * std::log10(v); }

inline double hop_distance(const NetworkConfig& cfg, int n_hops) {
  if (n_hops < 1) throw std::invalid_argument("n_hops must be >= 1");
  return cfg.length_m / n_hops;
}

// Bounded path loss 1/(1 + r^alpha); finite at r = 0.
inline double path_gain(double distance_m, double path_loss_exp) {
  if (!(distance_m >= 0.0)) throw std::invalid_argument("distance must be non-negative");
  return 1.0 / (1.0 + std::pow(distance_m, path_loss_exp));
}

// Relay chain on the x axis: N+1 nodes, source at the origin, destination at
// (length, 0), equal spacing.
struct HopLayout {
  int n_hops = 0;
  std::vector<std::array<double, 2>> node_positions;
};

inline HopLayout hop_layout(const NetworkConfig& cfg, int n_hops) {
  const double d = hop_distance(cfg, n_hops);
  HopLayout layout;
  layout.n_hops = n_hops;
  layout.node_positions.reserve(static_cast<std::size_t>(n_hops) + 1);
  for (int k = 0; k <= n_hops; ++k) layout.node_positions.push_back({k * d, 0.0});
  return layout;
}

// Wiretap code rate pair plus the SNR thresholds they induce:
// decode_threshold = 2^codeword_rate - 1, eavesdrop_threshold = 2^redundancy - 1.
struct RateDesign {
  double codeword_rate = 0.0;
  double secrecy_rate = 0.0;
  double redundancy_rate = 0.0;
  double decode_threshold = 0.0;
  double eavesdrop_threshold = 0.0;
};

inline RateDesign rates_from(double codeword_rate, double secrecy_rate) {
  if (!(secrecy_rate > 0.0)) throw std::invalid_argument("secrecy_rate must be positive");
  if (!(codeword_rate >= secrecy_rate))
    throw std::invalid_argument("codeword_rate must be >= secrecy_rate");
  constexpr double ln2 = 0.69314718055994530942;
  RateDesign r;
  r.codeword_rate = codeword_rate;
  r.secrecy_rate = secrecy_rate;
  r.redundancy_rate = codeword_rate - secrecy_rate;
  r.decode_threshold = std::expm1(ln2 * codeword_rate);
  r.eavesdrop_threshold = std::expm1(ln2 * r.redundancy_rate);
  return r;
}

}  // namespace relaysec

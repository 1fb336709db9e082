// Designs the default scenario end to end: optimal hop count, wiretap code
// rates, and the resulting secrecy/throughput figures for both schemes.
#include <cstdio>

#include <relaysec/relaysec.hpp>

int main() {
  using namespace relaysec;

  NetworkConfig cfg;  // 50 m line, alpha 3, 100 dB, density 1e-5, cap 0.05
  std::printf("network: L=%.0f m, alpha=%.0f, snr=%.0f dB, lambda_e=%g, eps=%.2f\n\n",
              cfg.length_m, cfg.path_loss_exp, linear_to_db(cfg.snr), cfg.eavesdropper_density,
              cfg.max_secrecy_outage);

  for (SchemeKind scheme : {SchemeKind::Oft, SchemeKind::Noft}) {
    const HopSearchResult search = optimize_hops(cfg, scheme);
    const PerformanceReport rep = analyze(cfg, scheme, search.n_best);
    const HighSnrLimit lim = high_snr_limit(cfg, scheme, search.n_best);
    std::printf("%-5s n*=%d  Rt=%.4f  Rs=%.4f  Re=%.4f\n", to_string(scheme), search.n_best,
                rep.rates.codeword_rate, rep.rates.secrecy_rate, rep.rates.redundancy_rate);
    std::printf("      p_so=%.4f  success/hop=%.4f  U=%.6f  (U at infinite snr: %.6f)\n\n",
                rep.secrecy_outage_path,
                scheme == SchemeKind::Oft ? rep.transmit_prob_hop : rep.connect_prob_hop,
                rep.throughput, lim.throughput_limit);
  }
  return 0;
}

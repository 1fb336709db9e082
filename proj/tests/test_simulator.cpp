#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <relaysec/analytics.hpp>
#include <relaysec/simulator.hpp>

using namespace relaysec;

namespace {

bool same_estimate(const SimEstimate& a, const SimEstimate& b) {
  return a.trials == b.trials && a.mean == b.mean && a.std_error == b.std_error &&
         a.ci95_low == b.ci95_low && a.ci95_high == b.ci95_high && a.low_count == b.low_count;
}

bool same_report(const SimReport& a, const SimReport& b) {
  return a.scheme == b.scheme && a.n_hops == b.n_hops && a.master_seed == b.master_seed &&
         same_estimate(a.transmit_prob_hop, b.transmit_prob_hop) &&
         same_estimate(a.connect_prob_path, b.connect_prob_path) &&
         same_estimate(a.secrecy_outage_path, b.secrecy_outage_path) &&
         same_estimate(a.throughput, b.throughput) &&
         same_estimate(a.throughput_per_trial, b.throughput_per_trial) &&
         same_estimate(a.slots_per_hop, b.slots_per_hop);
}

}  // namespace

TEST_CASE("no eavesdroppers means no outage, exactly", "[simulator]") {
  NetworkConfig cfg;
  cfg.eavesdropper_density = 0.0;
  const RateDesign rates = rates_from(3.0, 1.0);
  for (SchemeKind scheme : {SchemeKind::Oft, SchemeKind::Noft}) {
    const SimReport rep = simulate(cfg, scheme, 3, rates, MobilityModel::IndependentPerHop,
                                   default_region(cfg), 500, 11);
    CHECK(rep.secrecy_outage_path.mean == 0.0);
    CHECK(rep.secrecy_outage_path.std_error == 0.0);
    CHECK(rep.secrecy_outage_path.low_count);
    CHECK(rep.master_seed == 11);
  }
}

TEST_CASE("scheme structure shows up in the report", "[simulator]") {
  const NetworkConfig cfg;
  const RateDesign oft_rates = optimal_rates(cfg, SchemeKind::Oft, 5);
  const SimReport oft = simulate(cfg, SchemeKind::Oft, 5, oft_rates,
                                 MobilityModel::IndependentPerHop, default_region(cfg), 2000, 3);
  // feedback retries until decoded: delivery certain by construction
  CHECK(oft.connect_prob_path.mean == 1.0);
  CHECK(oft.connect_prob_path.std_error == 0.0);
  CHECK_FALSE(oft.connect_prob_path.low_count);
  CHECK(oft.transmit_prob_hop.trials == 2000 * 5);
  CHECK(oft.transmit_prob_hop.mean < 1.0);
  CHECK(oft.slots_per_hop.mean >= 1.0);
  // mean of per-trial ratios dominates the ratio of means for certain delivery
  CHECK(oft.throughput_per_trial.mean >= oft.throughput.mean);

  const RateDesign noft_rates = optimal_rates(cfg, SchemeKind::Noft, 2);
  const SimReport noft = simulate(cfg, SchemeKind::Noft, 2, noft_rates,
                                  MobilityModel::IndependentPerHop, default_region(cfg), 2000, 3);
  CHECK(noft.transmit_prob_hop.mean == 1.0);
  CHECK(noft.transmit_prob_hop.std_error == 0.0);
  // exactly one slot per hop
  CHECK(noft.slots_per_hop.mean == 1.0);
  CHECK(noft.slots_per_hop.std_error == 0.0);
  CHECK(noft.connect_prob_path.mean < 1.0);
  CHECK(noft.throughput.mean ==
        Catch::Approx(noft_rates.secrecy_rate * noft.connect_prob_path.mean / 2).epsilon(1e-12));
}

TEST_CASE("identical calls are bit identical, whatever the worker count", "[simulator]") {
  const NetworkConfig cfg;
  const RateDesign rates = optimal_rates(cfg, SchemeKind::Oft, 5);
  const SimReport a = simulate(cfg, SchemeKind::Oft, 5, rates, MobilityModel::IndependentPerHop,
                               default_region(cfg), 4000, 42, 1);
  const SimReport b = simulate(cfg, SchemeKind::Oft, 5, rates, MobilityModel::IndependentPerHop,
                               default_region(cfg), 4000, 42, 1);
  const SimReport c = simulate(cfg, SchemeKind::Oft, 5, rates, MobilityModel::IndependentPerHop,
                               default_region(cfg), 4000, 42, 4);
  CHECK(same_report(a, b));
  CHECK(same_report(a, c));

  const RateDesign nr = optimal_rates(cfg, SchemeKind::Noft, 2);
  const SimReport d = simulate(cfg, SchemeKind::Noft, 2, nr, MobilityModel::FixedAcrossHops,
                               default_region(cfg), 4000, 42, 1);
  const SimReport e = simulate(cfg, SchemeKind::Noft, 2, nr, MobilityModel::FixedAcrossHops,
                               default_region(cfg), 4000, 42, 8);
  CHECK(same_report(d, e));
}

TEST_CASE("different seeds decorrelate the runs", "[simulator]") {
  const NetworkConfig cfg;
  const RateDesign rates = optimal_rates(cfg, SchemeKind::Oft, 5);
  const SimReport a = simulate(cfg, SchemeKind::Oft, 5, rates, MobilityModel::IndependentPerHop,
                               default_region(cfg), 4000, 1);
  const SimReport b = simulate(cfg, SchemeKind::Oft, 5, rates, MobilityModel::IndependentPerHop,
                               default_region(cfg), 4000, 2);
  CHECK(a.transmit_prob_hop.mean != b.transmit_prob_hop.mean);
}

TEST_CASE("retry counts follow the geometric law", "[simulator]") {
  const NetworkConfig cfg;
  const RateDesign rates = optimal_rates(cfg, SchemeKind::Oft, 5);
  const SimReport rep = simulate(cfg, SchemeKind::Oft, 5, rates, MobilityModel::IndependentPerHop,
                                 default_region(cfg), 20000, 5);
  const double p = transmission_prob_oft(cfg, 5, rates.decode_threshold);
  CHECK(std::fabs(rep.slots_per_hop.mean - 1.0 / p) <= 3.0 * rep.slots_per_hop.std_error);
  CHECK(std::fabs(rep.transmit_prob_hop.mean - p) <= 3.0 * rep.transmit_prob_hop.std_error);
}

TEST_CASE("frozen positions can only help the path secrecy", "[simulator]") {
  const NetworkConfig cfg;
  const RateDesign rates = optimal_rates(cfg, SchemeKind::Oft, 5);
  const SimReport indep = simulate(cfg, SchemeKind::Oft, 5, rates,
                                   MobilityModel::IndependentPerHop, default_region(cfg), 30000, 8);
  const SimReport fixed = simulate(cfg, SchemeKind::Oft, 5, rates, MobilityModel::FixedAcrossHops,
                                   default_region(cfg), 30000, 8);
  const double pooled = std::sqrt(indep.secrecy_outage_path.std_error * indep.secrecy_outage_path.std_error +
                                  fixed.secrecy_outage_path.std_error * fixed.secrecy_outage_path.std_error);
  CHECK(fixed.secrecy_outage_path.mean < indep.secrecy_outage_path.mean - 3.0 * pooled);
}

TEST_CASE("the default window is wide enough to be the whole plane", "[simulator]") {
  const NetworkConfig cfg;
  const RateDesign rates = optimal_rates(cfg, SchemeKind::Oft, 5);
  const SimReport narrow = simulate(cfg, SchemeKind::Oft, 5, rates,
                                    MobilityModel::IndependentPerHop, default_region(cfg), 20000, 13);
  const SimReport wide =
      simulate(cfg, SchemeKind::Oft, 5, rates, MobilityModel::IndependentPerHop,
               default_region(cfg, 4000.0, 4000.0), 20000, 13);
  const double pooled =
      std::sqrt(narrow.secrecy_outage_path.std_error * narrow.secrecy_outage_path.std_error +
                wide.secrecy_outage_path.std_error * wide.secrecy_outage_path.std_error);
  CHECK(std::fabs(narrow.secrecy_outage_path.mean - wide.secrecy_outage_path.mean) <= 2.0 * pooled);
}

TEST_CASE("an unreachable decode threshold trips the slot cap", "[simulator]") {
  NetworkConfig cfg;
  cfg.path_loss_exp = 6.0;
  cfg.snr = 1e4;
  cfg.eavesdropper_density = 0.0;
  const RateDesign rates = rates_from(60.0, 1.0);
  bool threw = false;
  try {
    simulate(cfg, SchemeKind::Oft, 1, rates, MobilityModel::IndependentPerHop, default_region(cfg),
             10, 0, 1, 1000);
  } catch (const SlotCapError& err) {
    threw = true;
    CHECK(err.trial() == 0);
    CHECK(err.hop() == 1);
    CHECK(err.cap() == 1000);
    CHECK(std::string(err.what()).find("slot cap") != std::string::npos);
  }
  CHECK(threw);

  // the surfaced trial is the earliest one whatever the worker split
  try {
    simulate(cfg, SchemeKind::Oft, 1, rates, MobilityModel::IndependentPerHop, default_region(cfg),
             10, 0, 4, 1000);
  } catch (const SlotCapError& err) {
    CHECK(err.trial() == 0);
  }

  // the single-slot scheme never retries, so it finishes under the same rates
  const SimReport rep = simulate(cfg, SchemeKind::Noft, 1, rates,
                                 MobilityModel::IndependentPerHop, default_region(cfg), 10, 0, 1, 1000);
  CHECK(rep.connect_prob_path.mean == 0.0);
}

TEST_CASE("simulation validates its inputs", "[simulator]") {
  const NetworkConfig cfg;
  const RateDesign rates = rates_from(3.0, 1.0);
  const SimRegion region = default_region(cfg);
  CHECK_THROWS_AS(simulate(cfg, SchemeKind::Oft, 0, rates, MobilityModel::IndependentPerHop,
                           region, 10, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate(cfg, SchemeKind::Oft, 1, rates, MobilityModel::IndependentPerHop,
                           region, 0, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate(cfg, SchemeKind::Oft, 1, rates, MobilityModel::IndependentPerHop,
                           region, 10, 0, 1, 0),
                  std::invalid_argument);
  SimRegion bad = region;
  bad.height_m = -1.0;
  CHECK_THROWS_AS(simulate(cfg, SchemeKind::Oft, 1, rates, MobilityModel::IndependentPerHop, bad,
                           10, 0),
                  std::invalid_argument);
  // a single trial still yields a report, with zero standard errors
  const SimReport rep = simulate(cfg, SchemeKind::Noft, 2, rates,
                                 MobilityModel::IndependentPerHop, region, 1, 0);
  CHECK(rep.throughput.std_error == 0.0);
}

TEST_CASE("small samples are flagged as such", "[simulator]") {
  const NetworkConfig cfg;
  const RateDesign rates = optimal_rates(cfg, SchemeKind::Noft, 2);
  const SimReport rep = simulate(cfg, SchemeKind::Noft, 2, rates,
                                 MobilityModel::IndependentPerHop, default_region(cfg), 50, 21);
  // connection succeeds at rate 0.145: a 50 trial run cannot reach 30 successes
  CHECK(rep.connect_prob_path.low_count);
}

TEST_CASE("validation scores every spec metric", "[simulator]") {
  const NetworkConfig cfg;
  const RateDesign rates = optimal_rates(cfg, SchemeKind::Oft, 5);
  const ValidationRecord rec = validate_against_analytics(cfg, SchemeKind::Oft, 5, rates, 20000, 7);
  REQUIRE(rec.metrics.size() == 4);
  CHECK(rec.metrics[0].metric == "transmit_prob_hop");
  CHECK(rec.metrics[1].metric == "connect_prob_path");
  CHECK(rec.metrics[2].metric == "secrecy_outage_path");
  CHECK(rec.metrics[3].metric == "throughput");
  for (const auto& m : rec.metrics) {
    CHECK(std::isfinite(m.z));
    CHECK_FALSE(m.flagged);
  }
  CHECK_FALSE(rec.any_flagged);
  CHECK(rec.report.master_seed == 7);

  const RateDesign nr = optimal_rates(cfg, SchemeKind::Noft, 2);
  const ValidationRecord nrec = validate_against_analytics(cfg, SchemeKind::Noft, 2, nr, 20000, 7);
  CHECK_FALSE(nrec.any_flagged);
}

TEST_CASE("simulation tracks the closed forms across the parameter grid", "[simagree]") {
  std::uint64_t seed = 9000;
  for (SchemeKind scheme : {SchemeKind::Oft, SchemeKind::Noft}) {
    for (double lam : {1e-6, 1e-5, 1e-4}) {
      for (int n : {1, 5, 10}) {
        ++seed;
        NetworkConfig cfg;
        cfg.eavesdropper_density = lam;
        const RateDesign rates = optimal_rates(cfg, scheme, n);
        INFO("scheme " << to_string(scheme) << " lambda " << lam << " n " << n);
        if (scheme == SchemeKind::Oft && n == 1 && lam == 1e-4) {
          // designed first-slot success is about exp(-52): the retry loop can
          // never finish, which is exactly what the slot cap is for
          CHECK_THROWS_AS(
              validate_against_analytics(cfg, scheme, n, rates, 100000, seed, 4),
              SlotCapError);
          continue;
        }
        const ValidationRecord rec =
            validate_against_analytics(cfg, scheme, n, rates, 100000, seed, 4);
        for (const auto& m : rec.metrics) {
          INFO(m.metric << ": analytic " << m.analytic << " empirical " << m.empirical << " z "
                        << m.z);
          CHECK_FALSE(m.flagged);
        }
      }
    }
  }
}

TEST_CASE("large runs stay within four standard errors at the defaults", "[simagree]") {
  const NetworkConfig cfg;
  std::uint64_t seed = 400;
  for (int n : {2, 5, 10}) {
    const RateDesign rates = optimal_rates(cfg, SchemeKind::Oft, n);
    const ValidationRecord rec =
        validate_against_analytics(cfg, SchemeKind::Oft, n, rates, 1000000, seed++, 4);
    for (const auto& m : rec.metrics) {
      INFO("oft n " << n << " " << m.metric << " z " << m.z);
      CHECK_FALSE(m.flagged);
    }
  }
  const RateDesign nr = optimal_rates(cfg, SchemeKind::Noft, 2);
  const ValidationRecord nrec =
      validate_against_analytics(cfg, SchemeKind::Noft, 2, nr, 1000000, seed, 4);
  for (const auto& m : nrec.metrics) {
    INFO("noft n 2 " << m.metric << " z " << m.z);
    CHECK_FALSE(m.flagged);
  }
}

TEST_CASE("the outage cap binds in a large default run", "[simagree]") {
  const NetworkConfig cfg;
  const RateDesign rates = optimal_rates(cfg, SchemeKind::Oft, 5);
  const SimReport rep = simulate(cfg, SchemeKind::Oft, 5, rates, MobilityModel::IndependentPerHop,
                                 default_region(cfg), 1000000, 404, 4);
  CHECK(std::fabs(rep.secrecy_outage_path.mean - cfg.max_secrecy_outage) <=
        3.0 * rep.secrecy_outage_path.std_error);
}

TEST_CASE("frozen positions respect the design cap in a large run", "[simagree]") {
  const NetworkConfig cfg;
  const RateDesign rates = optimal_rates(cfg, SchemeKind::Oft, 5);
  const SimReport rep = simulate(cfg, SchemeKind::Oft, 5, rates, MobilityModel::FixedAcrossHops,
                                 default_region(cfg), 100000, 505, 4);
  // one-sided: the frozen geometry is strictly safer than the per-hop redraw
  CHECK(rep.secrecy_outage_path.mean <=
        cfg.max_secrecy_outage + 3.0 * rep.secrecy_outage_path.std_error);
  // and it lands on the quadrature value for the same geometry
  const auto be = eavesdrop_threshold_for_outage(cfg, 5);
  REQUIRE(be.has_value());
  const double radius = fixed_sop_truncation_radius(cfg, *be, 1e-6);
  const double analytic = sop_fixed_eavesdroppers(cfg, 5, *be, radius, 1e-6);
  CHECK(std::fabs(rep.secrecy_outage_path.mean - analytic) <=
        4.0 * rep.secrecy_outage_path.std_error);
}

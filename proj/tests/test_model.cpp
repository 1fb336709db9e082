#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include <relaysec/model.hpp>

using namespace relaysec;

TEST_CASE("default config is the reference scenario and validates", "[model]") {
  NetworkConfig cfg;
  CHECK(cfg.length_m == 50.0);
  CHECK(cfg.path_loss_exp == 3.0);
  CHECK(cfg.snr == 1e10);
  CHECK(cfg.eavesdropper_density == 1e-5);
  CHECK(cfg.max_secrecy_outage == 0.05);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config validation names the violated field", "[model]") {
  auto message_of = [](NetworkConfig cfg) {
    try {
      cfg.validate();
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  NetworkConfig cfg;
  cfg.length_m = 0.0;
  CHECK(message_of(cfg).find("length_m") != std::string::npos);
  cfg = {};
  cfg.path_loss_exp = 1.9;
  CHECK(message_of(cfg).find("path_loss_exp") != std::string::npos);
  cfg = {};
  cfg.path_loss_exp = 6.5;
  CHECK(message_of(cfg).find("path_loss_exp") != std::string::npos);
  cfg = {};
  cfg.snr = -1.0;
  CHECK(message_of(cfg).find("snr") != std::string::npos);
  cfg = {};
  cfg.eavesdropper_density = -1e-9;
  CHECK(message_of(cfg).find("eavesdropper_density") != std::string::npos);
  cfg = {};
  cfg.max_secrecy_outage = 0.0;
  CHECK(message_of(cfg).find("max_secrecy_outage") != std::string::npos);
  cfg = {};
  cfg.max_secrecy_outage = 1.0;
  CHECK(message_of(cfg).find("max_secrecy_outage") != std::string::npos);
}

TEST_CASE("boundary path loss exponents are accepted", "[model]") {
  NetworkConfig cfg;
  cfg.path_loss_exp = 2.0;
  CHECK_NOTHROW(cfg.validate());
  cfg.path_loss_exp = 6.0;
  CHECK_NOTHROW(cfg.validate());
  cfg.eavesdropper_density = 0.0;
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("hop distance divides the span", "[model]") {
  NetworkConfig cfg;
  CHECK(hop_distance(cfg, 5) == 10.0);
  CHECK(hop_distance(cfg, 1) == 50.0);
  CHECK(hop_distance(cfg, 7) == Catch::Approx(50.0 / 7.0).epsilon(1e-15));
  CHECK_THROWS_AS(hop_distance(cfg, 0), std::invalid_argument);
  CHECK_THROWS_AS(hop_distance(cfg, -3), std::invalid_argument);
}

TEST_CASE("path gain is bounded and monotone", "[model]") {
  CHECK(path_gain(0.0, 3.0) == 1.0);
  CHECK(path_gain(1.0, 3.0) == 0.5);
  CHECK(path_gain(10.0, 3.0) == Catch::Approx(1.0 / 1001.0).epsilon(1e-15));
  double prev = path_gain(0.0, 2.5);
  for (double r = 0.5; r <= 100.0; r += 0.5) {
    const double g = path_gain(r, 2.5);
    REQUIRE(g < prev);
    REQUIRE(g > 0.0);
    prev = g;
  }
  CHECK_THROWS_AS(path_gain(-1.0, 3.0), std::invalid_argument);
}

TEST_CASE("hop layout places nodes uniformly on the line", "[model]") {
  NetworkConfig cfg;
  const HopLayout layout = hop_layout(cfg, 7);
  const double d = hop_distance(cfg, 7);
  REQUIRE(layout.node_positions.size() == 8);
  CHECK(layout.node_positions.front()[0] == 0.0);
  CHECK(layout.node_positions.back()[0] == Catch::Approx(50.0).epsilon(1e-14));
  for (const auto& pos : layout.node_positions) CHECK(pos[1] == 0.0);
  for (std::size_t k = 1; k < layout.node_positions.size(); ++k) {
    const double spacing = layout.node_positions[k][0] - layout.node_positions[k - 1][0];
    REQUIRE(spacing == Catch::Approx(d).epsilon(1e-12));
  }
}

TEST_CASE("rate design derives thresholds from the rate pair", "[model]") {
  const RateDesign r = rates_from(3.5, 1.25);
  CHECK(r.codeword_rate == 3.5);
  CHECK(r.secrecy_rate == 1.25);
  CHECK(r.redundancy_rate == Catch::Approx(2.25).epsilon(1e-15));
  CHECK(r.decode_threshold == Catch::Approx(10.31370849898476039).epsilon(1e-14));
  CHECK(r.eavesdrop_threshold == Catch::Approx(3.7568284600108842669).epsilon(1e-14));
}

TEST_CASE("rate design thresholds are consistent with the rates", "[model]") {
  constexpr double ln2 = 0.69314718055994530942;
  for (double rt : {0.3, 1.0, 4.0, 11.5, 25.0, 40.0}) {
    for (double rs : {0.01, 0.25, 0.29999}) {
      const RateDesign r = rates_from(rt, rs * rt);
      const double rt_back = std::log1p(r.decode_threshold) / ln2;
      const double re_back = std::log1p(r.eavesdrop_threshold) / ln2;
      REQUIRE(std::fabs(rt_back - r.codeword_rate) <= 1e-12 * r.codeword_rate);
      REQUIRE(std::fabs(re_back - r.redundancy_rate) <= 1e-12 * std::fmax(r.redundancy_rate, 1.0));
    }
  }
}

TEST_CASE("no redundancy means a zero eavesdropper threshold", "[model]") {
  const RateDesign r = rates_from(2.0, 2.0);
  CHECK(r.redundancy_rate == 0.0);
  CHECK(r.eavesdrop_threshold == 0.0);
}

TEST_CASE("rate design rejects bad rate pairs", "[model]") {
  CHECK_THROWS_AS(rates_from(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(rates_from(1.0, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(rates_from(1.0, 1.5), std::invalid_argument);
}

TEST_CASE("decibel conversions", "[model]") {
  CHECK(db_to_linear(100.0) == 1e10);
  CHECK(db_to_linear(0.0) == 1.0);
  CHECK(linear_to_db(1e10) == Catch::Approx(100.0).epsilon(1e-14));
  CHECK(db_to_linear(linear_to_db(123.456)) == Catch::Approx(123.456).epsilon(1e-13));
}

TEST_CASE("scheme names", "[model]") {
  CHECK(std::string(to_string(SchemeKind::Oft)) == "oft");
  CHECK(std::string(to_string(SchemeKind::Noft)) == "noft");
}

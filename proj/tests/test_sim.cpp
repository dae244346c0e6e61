#include <doctest.h>

#include <sstream>

#include "tlink/sim.hpp"

using namespace tlink;

namespace {

SimConfig tiny_config() {
  SimConfig cfg;
  cfg.n = 32;
  cfg.m_t = 2;
  cfg.m_r = 2;
  cfg.k = 4;
  cfg.q = 1;
  cfg.cp_len = 8;
  cfg.delta_f = 3;
  cfg.delta_k = 4;
  cfg.mode = TxMode::Uncoded;
  cfg.receivers = {ReceiverKind::Zf, ReceiverKind::Ilsp};
  cfg.ebn0_grid_db = {8, 20};
  cfg.trials = 6;
  cfg.seed = 77;
  return cfg;
}

std::string csv_of(const std::vector<SerCurve>& curves) {
  std::ostringstream os;
  write_csv(os, curves);
  return os.str();
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("full round trip") {
    const std::string text = R"(
# comment line
system.n = 64
system.m_t = 2
system.m_r = 3
system.k = 5
system.q = 2
system.cp_len = 16
pilots.delta_f = 8
pilots.delta_k = 5
constellation.kind = qam
constellation.order = 16
channel.delays_ns = 0, 110, 190, 410
channel.powers_db = 0, -9.7, -19.2, -22.8
channel.sample_rate_hz = 1e7
coding.per_subcarrier = false
mode = kr
receivers = kr, kr_ls
ebn0_grid_db = 4, 12, 20
trials = 25
seed = 123
)";
    const SimConfig cfg = parse_config_text(text);
    CHECK(cfg.n == 64);
    CHECK(cfg.m_r == 3);
    CHECK(cfg.q == 2);
    CHECK(cfg.const_order == 16);
    CHECK(cfg.mode == TxMode::Kr);
    CHECK(cfg.receivers ==
          std::vector<ReceiverKind>{ReceiverKind::Kr, ReceiverKind::KrLs});
    CHECK(cfg.ebn0_grid_db == std::vector<double>{4, 12, 20});
    CHECK(cfg.trials == 25);
    CHECK(cfg.seed == 123);
    CHECK_NOTHROW(cfg.validate());
    // canonical text re-parses to the same digest
    CHECK(parse_config_text(cfg.canonical_text()).digest() == cfg.digest());
  }
  SUBCASE("unknown keys rejected") {
    CHECK_THROWS_WITH_AS(parse_config_text("system.nn = 4\n"),
                         doctest::Contains("unknown config key"),
                         std::invalid_argument);
  }
  SUBCASE("taps override") {
    const SimConfig cfg =
        parse_config_text("channel.taps_override = 0:0.9, 2:0.1\n");
    REQUIRE(cfg.taps_override.has_value());
    CHECK(cfg.taps_override->delays == std::vector<Index>{0, 2});
    CHECK(cfg.profile().tap_span() == 3);
  }
  SUBCASE("bad values and structure") {
    CHECK_THROWS_AS(parse_config_text("system.n = abc\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("just some words\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("mode = xyz\n"), std::invalid_argument);
  }
}

TEST_CASE("config validation") {
  SimConfig cfg = tiny_config();
  SUBCASE("accepts the base") { CHECK_NOTHROW(cfg.validate()); }
  SUBCASE("mode and spreading consistency") {
    cfg.q = 2;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.mode = TxMode::Kr;
    cfg.receivers = {ReceiverKind::Kr};
    CHECK_NOTHROW(cfg.validate());
    cfg.q = 3;  // kr needs q == m_t
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SUBCASE("receiver/mode mismatch") {
    cfg.receivers = {ReceiverKind::Kr};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SUBCASE("antenna requirements") {
    cfg.m_r = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SUBCASE("pilot spacing") {
    cfg.delta_f = 1;  // below m_t
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.delta_f = 16;  // only two pilot subcarriers < five taps
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SUBCASE("prefix length") {
    cfg.cp_len = 2;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SUBCASE("per-subcarrier coding unsupported") {
    cfg.per_subcarrier_coding = true;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
}

TEST_CASE("trials are deterministic and shared across receivers") {
  const SimConfig cfg = tiny_config();
  const TrialResult a = run_trial(cfg, 3);
  const TrialResult b = run_trial(cfg, 3);
  REQUIRE(a.counts.size() == b.counts.size());
  for (size_t s = 0; s < a.counts.size(); ++s)
    for (size_t p = 0; p < a.counts[s].size(); ++p) {
      CHECK(a.counts[s][p].errors == b.counts[s][p].errors);
      CHECK(a.counts[s][p].symbols == b.counts[s][p].symbols);
    }
  const TrialResult c = run_trial(cfg, 4);
  bool any_diff = false;
  for (size_t s = 0; s < a.counts.size(); ++s)
    for (size_t p = 0; p < a.counts[s].size(); ++p)
      any_diff = any_diff || a.counts[s][p].errors != c.counts[s][p].errors;
  CHECK(any_diff);
}

TEST_CASE("a near-noiseless point makes no errors") {
  SimConfig cfg = tiny_config();
  cfg.ebn0_grid_db = {300.0};
  cfg.receivers = {ReceiverKind::Zf, ReceiverKind::Ilsp, ReceiverKind::Rlsp};
  const TrialResult tr = run_trial(cfg, 0);
  for (const auto& stream : tr.counts) CHECK(stream[0].errors == 0);
}

TEST_CASE("errors shrink from 0 dB to 30 dB") {
  SimConfig cfg = tiny_config();
  cfg.ebn0_grid_db = {0.0, 30.0};
  cfg.receivers = {ReceiverKind::Zf};
  cfg.trials = 200;
  const auto curves = run_sweep(cfg, 4);
  REQUIRE(curves.size() == 1);
  CHECK(curves[0].points[0].errors > curves[0].points[1].errors);
}

TEST_CASE("sweep output") {
  SimConfig cfg = tiny_config();
  SUBCASE("csv header is pinned") {
    const auto curves = run_sweep(cfg, 1);
    const std::string text = csv_of(curves);
    CHECK(text.rfind("receiver,ebn0_db,trials,symbols,errors,ser,stderr\n", 0) ==
          0);
  }
  SUBCASE("byte-identical across worker counts") {
    const std::string serial = csv_of(run_sweep(cfg, 1));
    const std::string parallel = csv_of(run_sweep(cfg, 8));
    CHECK(serial == parallel);
  }
  SUBCASE("empty receiver list gives an empty result") {
    cfg.receivers.clear();
    const auto curves = run_sweep(cfg, 2);
    CHECK(curves.empty());
    CHECK(csv_of(curves) == "receiver,ebn0_db,trials,symbols,errors,ser,stderr\n");
  }
  SUBCASE("random-coding receivers report three streams") {
    SimConfig rc = tiny_config();
    rc.mode = TxMode::Rc;
    rc.q = 2;
    rc.receivers = {ReceiverKind::RcKr};
    rc.trials = 2;
    CHECK(stream_names(rc) ==
          std::vector<std::string>{"rc_kr", "rc_kr_s", "rc_kr_c"});
    const auto curves = run_sweep(rc, 1);
    REQUIRE(curves.size() == 3);
    CHECK(curves[0].points[0].symbols ==
          curves[1].points[0].symbols + curves[2].points[0].symbols);
    CHECK(curves[0].points[0].errors ==
          curves[1].points[0].errors + curves[2].points[0].errors);
  }
  SUBCASE("early stop keeps partial aggregates consistent") {
    std::atomic<bool> stop{true};  // set before any trial runs
    const auto curves = run_sweep(cfg, 2, &stop);
    REQUIRE(!curves.empty());
    CHECK(curves[0].trials == 0);
    for (const auto& p : curves[0].points) CHECK(p.symbols == 0);
  }
}

TEST_CASE("selftest battery passes") {
  for (const auto& check : run_selftest()) {
    INFO(check.name, " ", check.detail);
    CHECK(check.pass);
  }
}

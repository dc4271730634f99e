#include <doctest.h>

#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "hcn/config.hpp"
#include "hcn/rng.hpp"
#include "hcn/scenario.hpp"

using namespace hcn;
using doctest::Approx;

TEST_SUITE("rng") {

TEST_CASE("keyed streams are reproducible and independent of call order") {
  KeyedRng a(7, DrawKind::shadow, {1, 2});
  KeyedRng b(7, DrawKind::shadow, {1, 2});
  for (int i = 0; i < 10; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  CHECK(derive_key(7, DrawKind::shadow, {1, 2}) != derive_key(7, DrawKind::shadow, {2, 1}));
  CHECK(derive_key(7, DrawKind::shadow, {1}) != derive_key(7, DrawKind::direct_fading, {1}));
  CHECK(derive_key(7, DrawKind::shadow, {1}) != derive_key(8, DrawKind::shadow, {1}));
}

TEST_CASE("distribution moments") {
  KeyedRng r(1, DrawKind::instance, {99});
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0, sc = 0, sg = 0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    su += u;
    const double z = r.normal();
    sn += z;
    sn2 += z * z;
    sc += std::norm(r.complex_normal());
    sg += r.gamma(3.0, 1.0 / 9.0);
  }
  CHECK(su / n == Approx(0.5).epsilon(0.01));
  CHECK(sn / n == Approx(0.0).scale(1.0).epsilon(0.01));
  CHECK(sn2 / n == Approx(1.0).epsilon(0.02));
  CHECK(sc / n == Approx(1.0).epsilon(0.02));
  CHECK(sg / n == Approx(1.0 / 3.0).epsilon(0.02));
}

TEST_CASE("below stays in range") {
  KeyedRng r(3, DrawKind::instance, {});
  std::set<std::size_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto v = r.below(5);
    REQUIRE(v < 5);
    seen.insert(v);
  }
  CHECK(seen.size() == 5);
}

}  // TEST_SUITE

TEST_SUITE("config") {

TEST_CASE("minimal document parses with defaults") {
  const auto cfg = parse_config(nlohmann::json::parse(R"({
    "base_stations": [{"band": "4G", "x": 0, "y": 0, "subchannels": 2, "users": 3}]})"));
  CHECK(cfg.base_stations.size() == 1);
  CHECK(cfg.ris.rows_cols == 4);
  CHECK(cfg.ris.quant_bits == 3);
  CHECK(cfg.outage_beta == 0.001);
  CHECK(cfg.half_power_beamwidth_deg == 30.0);
  CHECK(cfg.band("mmW28").is_mmwave);
  CHECK(!cfg.band("5G1").is_mmwave);
}

TEST_CASE("band overrides merge by id") {
  const auto cfg = parse_config(nlohmann::json::parse(R"({
    "bands": [{"band_id": "5G1", "tx_power_dbm": 20}],
    "base_stations": [{"band": "5G1", "x": 0, "y": 0, "subchannels": 1}]})"));
  CHECK(cfg.band("5G1").tx_power_dbm == 20.0);
  CHECK(cfg.band("5G1").frequency_hz == 2.5e9);
}

TEST_CASE("invalid documents raise ConfigError") {
  const char* bad[] = {
      R"({"base_stations": []})",
      R"({"base_stations": [{"band": "6G", "x": 0, "y": 0, "subchannels": 1}]})",
      R"({"base_stations": [{"band": "4G", "x": 0, "y": 0, "subchannels": 0}]})",
      R"({"base_stations": [{"band": "4G", "x": 0, "y": 0, "subchannels": 1, "colour": 1}]})",
      R"({"base_stations": [{"band": "4G", "x": 0, "y": 0, "subchannels": 1}], "typo": 1})",
      R"({"base_stations": [{"band": "4G", "x": 0, "y": 0, "subchannels": 1}], "ris": {"quant_bits": 0}})",
      R"({"base_stations": [{"band": "4G", "x": 0, "y": 0, "subchannels": 1}], "outage_beta": -1})",
      R"({"base_stations": [{"band": "mmW26", "x": 0, "y": 0, "subchannels": 1},
                            {"band": "mmW26", "x": 9, "y": 0, "subchannels": 1}]})",
      R"({"base_stations": [{"band": "4G", "x": "a", "y": 0, "subchannels": 1}]})",
      R"([1, 2])",
  };
  for (const char* text : bad) {
    CAPTURE(text);
    CHECK_THROWS_AS(parse_config(nlohmann::json::parse(text)), ConfigError);
  }
}

TEST_CASE("config round-trips through json") {
  const auto cfg = fixtures::overlap_config();
  const auto again = parse_config(config_to_json(cfg));
  CHECK(config_to_json(again) == config_to_json(cfg));
}

}  // TEST_SUITE

TEST_SUITE("scenario") {

TEST_CASE("same config and seed give identical scenarios") {
  const auto cfg = fixtures::overlap_config();
  CHECK(build_scenario(cfg, 5).to_json() == build_scenario(cfg, 5).to_json());
  CHECK(build_scenario(cfg, 5).to_json() != build_scenario(cfg, 6).to_json());
}

TEST_CASE("generated users lie in their home disk and list it as candidate") {
  const auto cfg = fixtures::random_config(11, 10, 60);
  const auto sc = build_scenario(cfg, 3);
  std::size_t u = 0;
  for (std::size_t b = 0; b < cfg.base_stations.size(); ++b) {
    const double radius = cfg.band(cfg.base_stations[b].band).coverage_radius_m;
    for (int i = 0; i < cfg.base_stations[b].users; ++i, ++u) {
      const User& user = sc.user(static_cast<UserId>(u));
      CHECK(distance(user.position, cfg.base_stations[b].position) <= radius);
      CHECK(sc.is_candidate(static_cast<UserId>(u), static_cast<BsId>(b)));
    }
  }
  CHECK(u == sc.num_users());
}

TEST_CASE("candidate sets are exactly the covering disks") {
  const auto sc = build_scenario(fixtures::random_config(4, 10, 60), 2);
  for (const auto& user : sc.users()) {
    for (std::size_t b = 0; b < sc.num_bs(); ++b) {
      const bool inside = distance(user.position, sc.bs(static_cast<BsId>(b)).position) <=
                          sc.band_of(static_cast<BsId>(b)).coverage_radius_m;
      CHECK(inside == sc.is_candidate(user.user_id, static_cast<BsId>(b)));
    }
  }
}

TEST_CASE("adding users to one cell leaves other users' draws alone") {
  auto cfg = fixtures::overlap_config(2);
  const auto a = build_scenario(cfg, 9);
  cfg.base_stations[1].users += 3;
  const auto b = build_scenario(cfg, 9);
  // Users of cell 0 keep ids 0..1 in both.
  for (UserId u = 0; u < 2; ++u) {
    CHECK(a.user(u).key == b.user(u).key);
    CHECK(a.user(u).position.x == b.user(u).position.x);
    for (BsId s = 0; s < 3; ++s) {
      CHECK(a.fading().shadow_db[s][u] == b.fading().shadow_db[s][u]);
      CHECK(a.fading().direct_power[s][u] == b.fading().direct_power[s][u]);
    }
  }
}

TEST_CASE("explicit users outside coverage are rejected unless allowed") {
  auto cfg = fixtures::base_config();
  fixtures::add_bs(cfg, "5G1", 0, 0, 1, 0);
  cfg.explicit_users = {{10.0, 0.0}, {5000.0, 0.0}};
  CHECK_THROWS_AS(build_scenario(cfg, 1), ConfigError);
  cfg.allow_uncovered = true;
  const auto sc = build_scenario(cfg, 1);
  CHECK(sc.user(1).candidate_bs.empty());
  CHECK(sc.user(0).candidate_bs.size() == 1);
}

TEST_CASE("clamped links are counted") {
  auto cfg = fixtures::base_config();
  fixtures::add_bs(cfg, "5G1", 0, 0, 1, 0);
  cfg.explicit_users = {{0.5, 0.0}, {20.0, 0.0}};
  const auto sc = build_scenario(cfg, 1);
  CHECK(sc.clamped_links() == 1);
  CHECK(sc.link(0, 0).path_loss_db == Approx(channel::path_loss_db(sc.band_of(0), 1.0, sc.fading().shadow_db[0][0])));
}

TEST_CASE("directional cells get panels and their own frequency group") {
  auto cfg = fixtures::base_config();
  fixtures::add_bs(cfg, "5G1", 0, 0, 1, 1);
  fixtures::add_bs(cfg, "5G1", 300, 0, 1, 1);
  fixtures::add_bs(cfg, "mmW26", 100, 0, 1, 1);
  fixtures::add_bs(cfg, "mmW27", 150, 0, 1, 1);
  const auto sc = build_scenario(cfg, 1);
  CHECK(!sc.bs(0).ris);
  CHECK(sc.bs(2).ris);
  CHECK(sc.has_active_ris(2));
  CHECK(sc.radio(0).frequency_group == sc.radio(1).frequency_group);
  CHECK(sc.radio(2).frequency_group != sc.radio(3).frequency_group);
  CHECK(sc.radio(2).frequency_group != sc.radio(0).frequency_group);
  CHECK(sc.reflect_channels(2, 0).size() == 16);
  CHECK(sc.reflect_channels(0, 0).empty());
}

TEST_CASE("pair gain is boresight times the off-axis gain") {
  const auto sc = build_scenario(fixtures::overlap_config(), 1);
  const double g0 = channel::db_to_linear(sc.beam().max_gain_db());
  for (UserId u = 0; u < static_cast<UserId>(sc.num_users()); ++u) {
    CHECK(sc.pair_gain(2, u, u) == Approx(g0 * g0));
  }
  const double theta = channel::angle_at_deg(sc.bs(2).position, sc.user(0).position, sc.user(1).position);
  CHECK(sc.pair_gain(2, 0, 1) == Approx(g0 * sc.beam().gain_linear(theta)));
}

TEST_CASE("derived worlds") {
  const auto sc = build_scenario(fixtures::overlap_config(), 1);
  const auto no_ris = sc.without_ris();
  CHECK(!no_ris.has_active_ris(2));
  CHECK(no_ris.reflect_channels(2, 0).empty());
  CHECK(no_ris.num_bs() == sc.num_bs());
  const auto no_mm = sc.without_mmwave_service();
  CHECK(no_mm.num_bs() == sc.num_bs());
  for (UserId u = 0; u < static_cast<UserId>(sc.num_users()); ++u) {
    CHECK(!no_mm.is_candidate(u, 2));
    CHECK(no_mm.is_candidate(u, 0) == sc.is_candidate(u, 0));
  }
}

}  // TEST_SUITE

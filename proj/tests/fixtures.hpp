#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hcn/config.hpp"
#include "hcn/rate.hpp"
#include "hcn/rng.hpp"
#include "hcn/scenario.hpp"

namespace fixtures {

inline hcn::ScenarioConfig base_config() {
  hcn::ScenarioConfig c;
  c.bands = hcn::default_bands();
  return c;
}

inline void add_bs(hcn::ScenarioConfig& c, const std::string& band, double x, double y, int subchannels,
                   int users) {
  hcn::BsSpec s;
  s.band = band;
  s.position = {x, y};
  s.num_subchannels = subchannels;
  s.users = users;
  c.base_stations.push_back(s);
}

// 4G macro with one 5G2 and one mmWave cell inside it, overlapping.
inline hcn::ScenarioConfig overlap_config(int users_per_bs = 3) {
  auto c = base_config();
  c.name = "overlap";
  add_bs(c, "4G", 0, 0, 2, users_per_bs);
  add_bs(c, "5G2", 250, 0, 2, users_per_bs);
  add_bs(c, "mmW26", 100, 60, 2, users_per_bs);
  c.ris.rows_cols = 2;
  return c;
}

// Random layout with up to `max_bs` cells and `max_users` users; every
// generated user is covered by its home cell.
inline hcn::ScenarioConfig random_config(std::uint64_t seed, int max_bs, int max_users) {
  hcn::KeyedRng rng(seed, hcn::DrawKind::instance, {1});
  auto c = base_config();
  c.name = "random" + std::to_string(seed);
  c.ris.rows_cols = 1 + static_cast<int>(rng.below(3));
  const int nb = 2 + static_cast<int>(rng.below(static_cast<std::size_t>(max_bs - 1)));
  add_bs(c, "4G", 0, 0, 1 + static_cast<int>(rng.below(4)), 0);
  const std::vector<std::string> cellular = {"5G1", "5G2"};
  const std::vector<std::string> directional = {"mmW26", "mmW27", "mmW28", "mmW29"};
  std::size_t next_dir = 0;
  for (int b = 1; b < nb; ++b) {
    const bool dir = next_dir < directional.size() && rng.uniform() < 0.4;
    const std::string band = dir ? directional[next_dir++] : cellular[rng.below(2)];
    const double r = 900.0 * std::sqrt(rng.uniform());
    const double phi = 2.0 * hcn::kPi * rng.uniform();
    add_bs(c, band, r * std::cos(phi), r * std::sin(phi), 1 + static_cast<int>(rng.below(4)), 0);
  }
  const int total = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(max_users)));
  for (int i = 0; i < total; ++i) {
    c.base_stations[rng.below(c.base_stations.size())].users += 1;
  }
  return c;
}

// Single directional cell, everyone on one sub-channel.
inline hcn::ScenarioConfig single_mmwave_config(std::uint64_t seed, int n, int users) {
  hcn::KeyedRng rng(seed, hcn::DrawKind::instance, {2});
  auto c = base_config();
  c.name = "mmwave" + std::to_string(seed);
  add_bs(c, "mmW28", 0, 0, 1 + static_cast<int>(rng.below(2)), users);
  c.ris.rows_cols = n;
  c.ris.quant_bits = 3;
  return c;
}

// Every covered user on a random candidate and a random sub-channel.
inline hcn::Assignment random_assignment(const hcn::Scenario& sc, std::uint64_t seed) {
  hcn::KeyedRng rng(seed, hcn::DrawKind::instance, {3});
  auto a = hcn::Assignment::unassigned(sc.num_users());
  for (const auto& u : sc.users()) {
    if (u.candidate_bs.empty()) continue;
    const hcn::BsId b = u.candidate_bs[rng.below(u.candidate_bs.size())];
    a.serving_bs[static_cast<std::size_t>(u.user_id)] = b;
    a.subchannel[static_cast<std::size_t>(u.user_id)] =
        static_cast<int>(rng.below(static_cast<std::size_t>(sc.bs(b).num_subchannels)));
  }
  return a;
}

inline double relative_error(double a, double b) {
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return scale == 0.0 ? 0.0 : std::fabs(a - b) / scale;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("hcn_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace fixtures

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "hcn/channel.hpp"
#include "hcn/config.hpp"
#include "hcn/types.hpp"
#include "hcn/world.hpp"

namespace hcn {

/// Random realisations, drawn once per scenario and frozen.
struct FadingTable {
  // [bs][user]
  std::vector<std::vector<double>> shadow_db;
  // |h0|^2 of the direct Rayleigh channel, [bs][user].
  std::vector<std::vector<double>> direct_power;
  // LoS phase per element path, [bs][user][flat element]; empty without a panel.
  std::vector<std::vector<std::vector<double>>> los_phase;
  // NLoS coefficient per element, [bs][user][flat element].
  std::vector<std::vector<std::vector<Complex>>> ris_nlos;
};

struct RadioParams {
  double outage_beta = 0.001;
  double mui_factor = 1.0;
  double half_power_beamwidth_deg = 30.0;
  bool ris_interference_k0 = false;
};

/// Linear-scale quantities of one (BS, user) pair.
struct LinkBudget {
  double distance_m = 0.0;
  double path_loss_db = 0.0;
  // 10^(-L/10), shadowing included.
  double path_gain = 0.0;
  // A_t |h0|^2.
  double direct_power = 0.0;
};

/// Per-BS constants in linear scale.
struct BsRadio {
  double tx_power_w = 0.0;
  double noise_w = 0.0;
  double bandwidth_hz = 0.0;
  // G_u G_b for cellular BSs.
  double fixed_gain = 1.0;
  double wavelength_factor = 0.0;
  // Cellular BSs sharing a carrier frequency share a group; every
  // directional BS is a group of its own.
  int frequency_group = 0;
  bool directional = false;
};

/// Immutable world: bands, base stations, users and frozen fading.
class Scenario {
 public:
  Scenario(std::vector<BandProfile> bands, std::vector<BaseStation> base_stations,
           std::vector<User> users, FadingTable fading, RadioParams params, std::uint64_t seed);

  const std::vector<BandProfile>& bands() const { return bands_; }
  const std::vector<BaseStation>& base_stations() const { return base_stations_; }
  const std::vector<User>& users() const { return users_; }
  const FadingTable& fading() const { return fading_; }
  const RadioParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }

  std::size_t num_bs() const { return base_stations_.size(); }
  std::size_t num_users() const { return users_.size(); }

  const BaseStation& bs(BsId b) const { return base_stations_.at(static_cast<std::size_t>(b)); }
  const User& user(UserId u) const { return users_.at(static_cast<std::size_t>(u)); }
  const BandProfile& band_of(BsId b) const { return bands_[static_cast<std::size_t>(bs(b).band)]; }
  const BsRadio& radio(BsId b) const { return radio_[static_cast<std::size_t>(b)]; }
  const LinkBudget& link(BsId b, UserId u) const {
    return links_[static_cast<std::size_t>(b)][static_cast<std::size_t>(u)];
  }
  bool is_candidate(UserId u, BsId b) const;

  /// True when BS b carries a panel and RIS is enabled in this scenario.
  bool has_active_ris(BsId b) const;
  /// Per-element reflected channel user -> RIS -> BS; empty without an
  /// active panel.
  std::span<const Complex> reflect_channels(BsId b, UserId u) const;

  const channel::BeamPattern& beam() const { return beam_; }
  /// Linear G_t * G_r of interferer j as seen by victim u at directional
  /// BS b: boresight on the transmit side, off-axis angle at the BS on the
  /// receive side.
  double pair_gain(BsId b, UserId u, UserId j) const {
    return pair_gain_[static_cast<std::size_t>(b)][static_cast<std::size_t>(u) * users_.size() +
                                                   static_cast<std::size_t>(j)];
  }

  /// Links whose distance fell below the reference distance and was clamped.
  std::size_t clamped_links() const { return clamped_links_; }

  /// Same world with every panel's reflected channel removed.
  Scenario without_ris() const;
  /// Same world where directional BSs accept no users.
  Scenario without_mmwave_service() const;

  /// Canonical serialisation (stable key order, full precision).
  nlohmann::json to_json() const;

 private:
  void precompute();

  std::vector<BandProfile> bands_;
  std::vector<BaseStation> base_stations_;
  std::vector<User> users_;
  FadingTable fading_;
  RadioParams params_;
  std::uint64_t seed_;
  bool ris_enabled_ = true;

  channel::BeamPattern beam_;
  std::vector<BsRadio> radio_;
  std::vector<std::vector<LinkBudget>> links_;
  std::vector<std::vector<std::vector<Complex>>> reflect_;
  std::vector<std::vector<char>> candidate_mask_;
  std::vector<std::vector<double>> pair_gain_;
  std::size_t clamped_links_ = 0;
};

/// Candidate set of a position: every BS whose closed coverage disk holds it.
std::vector<BsId> covering_stations(const std::vector<BaseStation>& stations,
                                    const std::vector<BandProfile>& bands, Vec2 position);

/// Deterministic scenario from a config and a master seed. Throws
/// ConfigError on invalid configs and on uncovered users unless allowed.
Scenario build_scenario(const ScenarioConfig& config, std::uint64_t seed);

}  // namespace hcn

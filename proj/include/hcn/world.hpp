#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hcn/types.hpp"

namespace hcn {

/// Radio constants of one network type (one row of the band table).
struct BandProfile {
  std::string band_id;
  double frequency_hz = 0.0;
  double subchannel_bandwidth_hz = 0.0;
  double tx_power_dbm = 0.0;
  double noise_density_dbm_per_hz = -174.0;
  double path_loss_exponent = 2.0;
  // Fixed antenna gains; only used by cellular bands; directional bands
  // derive their gains from the beam pattern.
  double ue_gain_dbi = 0.0;
  double bs_gain_dbi = 0.0;
  double coverage_radius_m = 0.0;
  double shadow_sigma_db = 0.0;
  // Directional antennas, RIS panel and blockage outage.
  bool is_mmwave = false;
  // Second-order channel statistic multiplying the direct-link power.
  double channel_constant = 1.0;

  // Throws std::invalid_argument on a violated invariant.
  void validate() const;
};

/// N x N reflecting surface mounted at the coverage boundary of its host BS.
struct RisPanel {
  int rows_cols = 4;
  int quant_bits = 3;
  double element_spacing_m = 0.005;
  Vec2 host_position;
  double host_radius_m = 0.0;
  double rician_factor = 4.0;
  double los_exponent = 2.0;
  double nlos_exponent = 2.2;

  int num_elements() const { return rows_cols * rows_cols; }
  // Number of selectable indices m (2^e); see phase_coefficient for the
  // resulting phase values.
  int num_phase_indices() const { return 1 << quant_bits; }
  // Row-major flat index of element (l_x, l_z), both 1-based.
  int flat_index(int l_x, int l_z) const { return (l_x - 1) * rows_cols + (l_z - 1); }

  /// Position of element (l_x, l_z), 1 <= l_x, l_z <= N. Throws
  /// std::out_of_range otherwise.
  Vec3 element_position(int l_x, int l_z) const;

  void validate() const;
};

struct BaseStation {
  BsId bs_id = 0;
  // Index into Scenario::bands().
  int band = 0;
  Vec2 position;
  int num_subchannels = 1;
  std::optional<RisPanel> ris;
};

struct User {
  UserId user_id = 0;
  // Stable identity used to key random draws; independent of user_id so
  // inserting users does not disturb other users' fading.
  std::uint64_t key = 0;
  Vec2 position;
  std::vector<BsId> candidate_bs;
};

}  // namespace hcn

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hcn/types.hpp"
#include "hcn/world.hpp"

namespace hcn {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BsSpec {
  std::string band;
  Vec2 position;
  int num_subchannels = 1;
  // Users dropped uniformly inside this BS's coverage disk.
  int users = 0;
};

struct RisSpec {
  int rows_cols = 4;
  int quant_bits = 3;
  double element_spacing_m = 0.005;
  double rician_factor = 4.0;
  double los_exponent = 2.0;
  double nlos_exponent = 2.2;
  // Draw NLoS magnitudes from Nakagami(m, omega) with uniform phase
  // instead of CN(0, 1).
  bool nakagami_nlos = false;
  double nakagami_m = 3.0;
  double nakagami_omega = 1.0 / 3.0;
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::vector<BandProfile> bands;
  std::vector<BsSpec> base_stations;
  std::vector<Vec2> explicit_users;
  RisSpec ris;
  double outage_beta = 0.001;
  double mui_factor = 1.0;
  double half_power_beamwidth_deg = 30.0;
  // Keep users outside every coverage disk (they stay unassigned).
  bool allow_uncovered = false;
  // Scale the RIS-reflected interference by the wavelength factor too.
  bool ris_interference_k0 = false;

  const BandProfile& band(const std::string& band_id) const;
  // Throws ConfigError.
  void validate() const;
};

/// Band catalogue: 4G, 5G1, 5G2, mmW26..mmW29 and THz340.
std::vector<BandProfile> default_bands();

ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ScenarioConfig& config);

}  // namespace hcn

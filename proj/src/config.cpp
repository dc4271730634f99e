#include "hcn/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace hcn {
namespace {

BandProfile make_band(std::string id, double freq, double bw, double power, double n, double ue_gain,
                      double bs_gain, double radius, double sigma, bool mmwave) {
  BandProfile b;
  b.band_id = std::move(id);
  b.frequency_hz = freq;
  b.subchannel_bandwidth_hz = bw;
  b.tx_power_dbm = power;
  b.noise_density_dbm_per_hz = -174.0;
  b.path_loss_exponent = n;
  b.ue_gain_dbi = ue_gain;
  b.bs_gain_dbi = bs_gain;
  b.coverage_radius_m = radius;
  b.shadow_sigma_db = sigma;
  b.is_mmwave = mmwave;
  b.channel_constant = 1.0;
  return b;
}

const std::set<std::string> kBandKeys = {
    "band_id",         "frequency_hz",  "subchannel_bandwidth_hz", "tx_power_dbm",
    "noise_density_dbm_per_hz", "path_loss_exponent", "ue_gain_dbi", "bs_gain_dbi",
    "coverage_radius_m", "shadow_sigma_db", "is_mmwave", "channel_constant"};

const std::set<std::string> kTopKeys = {
    "name",       "description", "bands",           "base_stations",
    "users",      "ris",         "outage_beta",     "mui_factor",
    "half_power_beamwidth_deg",  "allow_uncovered", "ris_interference_k0",
    "sweep"};

void reject_unknown(const nlohmann::json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
void read_opt(const nlohmann::json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end()) {
    out = it->template get<T>();
  }
}

void apply_band_fields(const nlohmann::json& obj, BandProfile& b) {
  read_opt(obj, "frequency_hz", b.frequency_hz);
  read_opt(obj, "subchannel_bandwidth_hz", b.subchannel_bandwidth_hz);
  read_opt(obj, "tx_power_dbm", b.tx_power_dbm);
  read_opt(obj, "noise_density_dbm_per_hz", b.noise_density_dbm_per_hz);
  read_opt(obj, "path_loss_exponent", b.path_loss_exponent);
  read_opt(obj, "ue_gain_dbi", b.ue_gain_dbi);
  read_opt(obj, "bs_gain_dbi", b.bs_gain_dbi);
  read_opt(obj, "coverage_radius_m", b.coverage_radius_m);
  read_opt(obj, "shadow_sigma_db", b.shadow_sigma_db);
  read_opt(obj, "is_mmwave", b.is_mmwave);
  read_opt(obj, "channel_constant", b.channel_constant);
}

nlohmann::json band_to_json(const BandProfile& b) {
  return {{"band_id", b.band_id},
          {"frequency_hz", b.frequency_hz},
          {"subchannel_bandwidth_hz", b.subchannel_bandwidth_hz},
          {"tx_power_dbm", b.tx_power_dbm},
          {"noise_density_dbm_per_hz", b.noise_density_dbm_per_hz},
          {"path_loss_exponent", b.path_loss_exponent},
          {"ue_gain_dbi", b.ue_gain_dbi},
          {"bs_gain_dbi", b.bs_gain_dbi},
          {"coverage_radius_m", b.coverage_radius_m},
          {"shadow_sigma_db", b.shadow_sigma_db},
          {"is_mmwave", b.is_mmwave},
          {"channel_constant", b.channel_constant}};
}

}  // namespace

std::vector<BandProfile> default_bands() {
  std::vector<BandProfile> bands;
  bands.push_back(make_band("4G", 1.9e9, 1.8e6, 23.0, 3.8, 0.5, 13.0, 1500.0, 8.0, false));
  bands.push_back(make_band("5G1", 2.5e9, 3.6e6, 26.0, 3.8, 3.0, 25.0, 350.0, 6.0, false));
  bands.push_back(make_band("5G2", 4.8e9, 7.2e6, 26.0, 3.0, 3.0, 25.0, 300.0, 5.0, false));
  for (int ghz : {26, 27, 28, 29}) {
    bands.push_back(make_band("mmW" + std::to_string(ghz), ghz * 1e9, 14.4e6, 21.0, 2.1, 0.0, 0.0,
                              150.0, 4.0, true));
  }
  // Terahertz cell: directional like mmWave, same coverage radius.
  bands.push_back(make_band("THz340", 340e9, 10e9, 26.0, 2.0, 0.0, 0.0, 150.0, 10.0, true));
  return bands;
}

const BandProfile& ScenarioConfig::band(const std::string& band_id) const {
  for (const auto& b : bands) {
    if (b.band_id == band_id) {
      return b;
    }
  }
  throw ConfigError("missing band profile '" + band_id + "'");
}

void ScenarioConfig::validate() const {
  if (base_stations.empty()) {
    throw ConfigError("config has no base stations");
  }
  try {
    for (const auto& b : bands) {
      b.validate();
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  std::set<double> mmwave_frequencies;
  for (std::size_t i = 0; i < base_stations.size(); ++i) {
    const BsSpec& s = base_stations[i];
    const BandProfile& b = band(s.band);
    if (s.num_subchannels < 1) {
      throw ConfigError("base station " + std::to_string(i) + ": subchannels must be >= 1");
    }
    if (s.users < 0) {
      throw ConfigError("base station " + std::to_string(i) + ": users must be >= 0");
    }
    if (b.is_mmwave && !mmwave_frequencies.insert(b.frequency_hz).second) {
      throw ConfigError("directional base stations must use pairwise distinct frequencies");
    }
  }
  if (ris.rows_cols < 1 || ris.quant_bits < 1 || ris.quant_bits > 16 || !(ris.element_spacing_m > 0.0)) {
    throw ConfigError("invalid RIS geometry");
  }
  if (ris.nakagami_nlos && (!(ris.nakagami_m > 0.0) || !(ris.nakagami_omega > 0.0))) {
    throw ConfigError("invalid Nakagami parameters");
  }
  if (!(outage_beta >= 0.0)) throw ConfigError("outage_beta must be >= 0");
  if (!(mui_factor >= 0.0)) throw ConfigError("mui_factor must be >= 0");
  if (!(half_power_beamwidth_deg > 0.0) || half_power_beamwidth_deg > 180.0) {
    throw ConfigError("half_power_beamwidth_deg must lie in (0, 180]");
  }
}

ScenarioConfig parse_config(const nlohmann::json& doc) {
  if (!doc.is_object()) {
    throw ConfigError("config root must be an object");
  }
  ScenarioConfig cfg;
  cfg.bands = default_bands();
  try {
    reject_unknown(doc, kTopKeys, "config");
    read_opt(doc, "name", cfg.name);

    if (auto it = doc.find("bands"); it != doc.end()) {
      for (const auto& entry : *it) {
        reject_unknown(entry, kBandKeys, "band");
        const auto id = entry.at("band_id").get<std::string>();
        auto existing = std::find_if(cfg.bands.begin(), cfg.bands.end(),
                                     [&](const BandProfile& b) { return b.band_id == id; });
        if (existing != cfg.bands.end()) {
          apply_band_fields(entry, *existing);
        } else {
          BandProfile b;
          b.band_id = id;
          apply_band_fields(entry, b);
          cfg.bands.push_back(b);
        }
      }
    }

    for (const auto& entry : doc.at("base_stations")) {
      reject_unknown(entry, {"id", "band", "x", "y", "subchannels", "users"}, "base station");
      BsSpec s;
      s.band = entry.at("band").get<std::string>();
      s.position = {entry.at("x").get<double>(), entry.at("y").get<double>()};
      s.num_subchannels = entry.at("subchannels").get<int>();
      read_opt(entry, "users", s.users);
      if (auto id = entry.find("id"); id != entry.end() &&
                                      id->get<std::size_t>() != cfg.base_stations.size()) {
        throw ConfigError("base station ids must equal their list position");
      }
      cfg.base_stations.push_back(s);
    }

    if (auto it = doc.find("users"); it != doc.end()) {
      for (const auto& entry : *it) {
        reject_unknown(entry, {"x", "y"}, "user");
        cfg.explicit_users.push_back({entry.at("x").get<double>(), entry.at("y").get<double>()});
      }
    }

    if (auto it = doc.find("ris"); it != doc.end()) {
      reject_unknown(*it,
                     {"rows_cols", "quant_bits", "element_spacing_m", "rician_factor", "los_exponent",
                      "nlos_exponent", "nakagami_nlos", "nakagami_m", "nakagami_omega"},
                     "ris");
      read_opt(*it, "rows_cols", cfg.ris.rows_cols);
      read_opt(*it, "quant_bits", cfg.ris.quant_bits);
      read_opt(*it, "element_spacing_m", cfg.ris.element_spacing_m);
      read_opt(*it, "rician_factor", cfg.ris.rician_factor);
      read_opt(*it, "los_exponent", cfg.ris.los_exponent);
      read_opt(*it, "nlos_exponent", cfg.ris.nlos_exponent);
      read_opt(*it, "nakagami_nlos", cfg.ris.nakagami_nlos);
      read_opt(*it, "nakagami_m", cfg.ris.nakagami_m);
      read_opt(*it, "nakagami_omega", cfg.ris.nakagami_omega);
    }

    read_opt(doc, "outage_beta", cfg.outage_beta);
    read_opt(doc, "mui_factor", cfg.mui_factor);
    read_opt(doc, "half_power_beamwidth_deg", cfg.half_power_beamwidth_deg);
    read_opt(doc, "allow_uncovered", cfg.allow_uncovered);
    read_opt(doc, "ris_interference_k0", cfg.ris_interference_k0);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file " + path.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

nlohmann::json config_to_json(const ScenarioConfig& cfg) {
  nlohmann::json doc;
  doc["name"] = cfg.name;
  doc["bands"] = nlohmann::json::array();
  for (const auto& b : cfg.bands) {
    doc["bands"].push_back(band_to_json(b));
  }
  doc["base_stations"] = nlohmann::json::array();
  for (std::size_t i = 0; i < cfg.base_stations.size(); ++i) {
    const auto& s = cfg.base_stations[i];
    doc["base_stations"].push_back({{"id", i},
                                    {"band", s.band},
                                    {"x", s.position.x},
                                    {"y", s.position.y},
                                    {"subchannels", s.num_subchannels},
                                    {"users", s.users}});
  }
  doc["users"] = nlohmann::json::array();
  for (const auto& p : cfg.explicit_users) {
    doc["users"].push_back({{"x", p.x}, {"y", p.y}});
  }
  doc["ris"] = {{"rows_cols", cfg.ris.rows_cols},
                {"quant_bits", cfg.ris.quant_bits},
                {"element_spacing_m", cfg.ris.element_spacing_m},
                {"rician_factor", cfg.ris.rician_factor},
                {"los_exponent", cfg.ris.los_exponent},
                {"nlos_exponent", cfg.ris.nlos_exponent},
                {"nakagami_nlos", cfg.ris.nakagami_nlos},
                {"nakagami_m", cfg.ris.nakagami_m},
                {"nakagami_omega", cfg.ris.nakagami_omega}};
  doc["outage_beta"] = cfg.outage_beta;
  doc["mui_factor"] = cfg.mui_factor;
  doc["half_power_beamwidth_deg"] = cfg.half_power_beamwidth_deg;
  doc["allow_uncovered"] = cfg.allow_uncovered;
  doc["ris_interference_k0"] = cfg.ris_interference_k0;
  return doc;
}

}  // namespace hcn

#include "hcn/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "hcn/rng.hpp"

namespace hcn {
namespace {

constexpr std::uint64_t kExplicitUserTag = 1ULL << 63;

std::uint64_t generated_user_key(std::size_t bs_index, std::size_t local_index) {
  return (static_cast<std::uint64_t>(bs_index + 1) << 32) | static_cast<std::uint64_t>(local_index);
}

nlohmann::json complex_json(Complex c) { return nlohmann::json::array({c.real(), c.imag()}); }

FadingTable draw_fading(const ScenarioConfig& cfg, const std::vector<BaseStation>& stations,
                        const std::vector<BandProfile>& bands, const std::vector<User>& users,
                        std::uint64_t seed) {
  FadingTable t;
  const std::size_t nb = stations.size();
  const std::size_t nu = users.size();
  t.shadow_db.assign(nb, std::vector<double>(nu, 0.0));
  t.direct_power.assign(nb, std::vector<double>(nu, 0.0));
  t.los_phase.assign(nb, {});
  t.ris_nlos.assign(nb, {});
  for (std::size_t b = 0; b < nb; ++b) {
    const BandProfile& band = bands[static_cast<std::size_t>(stations[b].band)];
    const auto bid = static_cast<std::uint64_t>(b);
    for (std::size_t u = 0; u < nu; ++u) {
      const std::uint64_t key = users[u].key;
      t.shadow_db[b][u] = band.shadow_sigma_db * KeyedRng(seed, DrawKind::shadow, {bid, key}).normal();
      t.direct_power[b][u] = std::norm(KeyedRng(seed, DrawKind::direct_fading, {bid, key}).complex_normal());
    }
    if (!stations[b].ris) {
      continue;
    }
    const RisPanel& panel = *stations[b].ris;
    t.los_phase[b].resize(nu);
    t.ris_nlos[b].assign(nu, std::vector<Complex>(static_cast<std::size_t>(panel.num_elements())));
    for (std::size_t u = 0; u < nu; ++u) {
      const std::uint64_t key = users[u].key;
      t.los_phase[b][u].resize(static_cast<std::size_t>(panel.num_elements()));
      for (int lx = 1; lx <= panel.rows_cols; ++lx) {
        for (int lz = 1; lz <= panel.rows_cols; ++lz) {
          const auto k = static_cast<std::size_t>(panel.flat_index(lx, lz));
          const std::initializer_list<std::uint64_t> ids = {bid, key, static_cast<std::uint64_t>(lx),
                                                            static_cast<std::uint64_t>(lz)};
          // LoS phase is frozen per element path.
          t.los_phase[b][u][k] = 2.0 * kPi * KeyedRng(seed, DrawKind::los_phase, ids).uniform();
          KeyedRng rng(seed, DrawKind::ris_nlos, ids);
          Complex h;
          if (cfg.ris.nakagami_nlos) {
            // Nakagami amplitude: sqrt of Gamma(m, omega/m); uniform phase.
            const double amp = std::sqrt(rng.gamma(cfg.ris.nakagami_m, cfg.ris.nakagami_omega / cfg.ris.nakagami_m));
            h = std::polar(amp, 2.0 * kPi * rng.uniform());
          } else {
            h = rng.complex_normal();
          }
          t.ris_nlos[b][u][k] = h;
        }
      }
    }
  }
  return t;
}

}  // namespace

Scenario::Scenario(std::vector<BandProfile> bands, std::vector<BaseStation> base_stations,
                   std::vector<User> users, FadingTable fading, RadioParams params, std::uint64_t seed)
    : bands_(std::move(bands)),
      base_stations_(std::move(base_stations)),
      users_(std::move(users)),
      fading_(std::move(fading)),
      params_(params),
      seed_(seed),
      beam_(params.half_power_beamwidth_deg) {
  precompute();
}

void Scenario::precompute() {
  const std::size_t nb = base_stations_.size();
  const std::size_t nu = users_.size();

  std::map<std::pair<double, int>, int> groups;
  radio_.assign(nb, {});
  for (std::size_t b = 0; b < nb; ++b) {
    const BandProfile& band = bands_.at(static_cast<std::size_t>(base_stations_[b].band));
    BsRadio& r = radio_[b];
    r.tx_power_w = channel::dbm_to_watts(band.tx_power_dbm);
    r.bandwidth_hz = band.subchannel_bandwidth_hz;
    r.noise_w = channel::dbm_to_watts(band.noise_density_dbm_per_hz) * band.subchannel_bandwidth_hz;
    r.directional = band.is_mmwave;
    r.fixed_gain = band.is_mmwave ? 1.0 : channel::db_to_linear(band.ue_gain_dbi + band.bs_gain_dbi);
    r.wavelength_factor = channel::wavelength_factor(band.frequency_hz);
    const std::pair<double, int> group_key{band.frequency_hz, band.is_mmwave ? static_cast<int>(b) : -1};
    r.frequency_group = groups.emplace(group_key, static_cast<int>(groups.size())).first->second;
  }

  clamped_links_ = 0;
  links_.assign(nb, std::vector<LinkBudget>(nu));
  for (std::size_t b = 0; b < nb; ++b) {
    const BandProfile& band = bands_[static_cast<std::size_t>(base_stations_[b].band)];
    for (std::size_t u = 0; u < nu; ++u) {
      LinkBudget& l = links_[b][u];
      l.distance_m = distance(base_stations_[b].position, users_[u].position);
      if (l.distance_m < channel::kReferenceDistanceM) {
        ++clamped_links_;
      }
      l.path_loss_db = channel::path_loss_db(band, l.distance_m, fading_.shadow_db[b][u]);
      l.path_gain = std::pow(10.0, -l.path_loss_db / 10.0);
      l.direct_power = band.channel_constant * fading_.direct_power[b][u];
    }
  }

  reflect_.assign(nb, {});
  for (std::size_t b = 0; b < nb; ++b) {
    if (!has_active_ris(static_cast<BsId>(b))) {
      continue;
    }
    const RisPanel& panel = *base_stations_[b].ris;
    const Vec3 receiver = on_ground(base_stations_[b].position);
    reflect_[b].assign(nu, std::vector<Complex>(static_cast<std::size_t>(panel.num_elements())));
    for (std::size_t u = 0; u < nu; ++u) {
      const Vec3 transmitter = on_ground(users_[u].position);
      for (int lx = 1; lx <= panel.rows_cols; ++lx) {
        for (int lz = 1; lz <= panel.rows_cols; ++lz) {
          const auto k = static_cast<std::size_t>(panel.flat_index(lx, lz));
          reflect_[b][u][k] = channel::ris_reflect_channel(panel, lx, lz, transmitter, receiver,
                                                           fading_.ris_nlos[b][u][k], fading_.los_phase[b][u][k]);
        }
      }
    }
  }

  pair_gain_.assign(nb, {});
  const double boresight = channel::db_to_linear(beam_.max_gain_db());
  for (std::size_t b = 0; b < nb; ++b) {
    if (!radio_[b].directional) {
      continue;
    }
    const Vec2 apex = base_stations_[b].position;
    auto& table = pair_gain_[b];
    table.assign(nu * nu, 0.0);
    for (std::size_t u = 0; u < nu; ++u) {
      for (std::size_t j = 0; j < nu; ++j) {
        const double theta = channel::angle_at_deg(apex, users_[u].position, users_[j].position);
        table[u * nu + j] = boresight * beam_.gain_linear(theta);
      }
    }
  }

  candidate_mask_.assign(nu, std::vector<char>(nb, 0));
  for (std::size_t u = 0; u < nu; ++u) {
    for (const BsId b : users_[u].candidate_bs) {
      candidate_mask_[u].at(static_cast<std::size_t>(b)) = 1;
    }
  }
}

bool Scenario::is_candidate(UserId u, BsId b) const {
  if (u < 0 || b < 0 || static_cast<std::size_t>(u) >= users_.size() ||
      static_cast<std::size_t>(b) >= base_stations_.size()) {
    return false;
  }
  return candidate_mask_[static_cast<std::size_t>(u)][static_cast<std::size_t>(b)] != 0;
}

bool Scenario::has_active_ris(BsId b) const {
  return ris_enabled_ && base_stations_[static_cast<std::size_t>(b)].ris.has_value();
}

std::span<const Complex> Scenario::reflect_channels(BsId b, UserId u) const {
  const auto& rows = reflect_[static_cast<std::size_t>(b)];
  if (rows.empty()) {
    return {};
  }
  return rows[static_cast<std::size_t>(u)];
}

Scenario Scenario::without_ris() const {
  Scenario copy = *this;
  copy.ris_enabled_ = false;
  copy.reflect_.assign(base_stations_.size(), {});
  return copy;
}

Scenario Scenario::without_mmwave_service() const {
  Scenario copy = without_ris();
  for (User& u : copy.users_) {
    std::erase_if(u.candidate_bs, [&](BsId b) { return radio(b).directional; });
  }
  copy.precompute();
  return copy;
}

nlohmann::json Scenario::to_json() const {
  nlohmann::json doc;
  doc["seed"] = seed_;
  doc["ris_enabled"] = ris_enabled_;
  doc["params"] = {{"outage_beta", params_.outage_beta},
                   {"mui_factor", params_.mui_factor},
                   {"half_power_beamwidth_deg", params_.half_power_beamwidth_deg},
                   {"ris_interference_k0", params_.ris_interference_k0}};
  doc["bands"] = nlohmann::json::array();
  for (const auto& b : bands_) {
    doc["bands"].push_back({{"band_id", b.band_id},
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
                            {"channel_constant", b.channel_constant}});
  }
  doc["base_stations"] = nlohmann::json::array();
  for (const auto& s : base_stations_) {
    nlohmann::json j = {{"bs_id", s.bs_id},
                        {"band", bands_[static_cast<std::size_t>(s.band)].band_id},
                        {"x", s.position.x},
                        {"y", s.position.y},
                        {"subchannels", s.num_subchannels}};
    if (s.ris) {
      j["ris"] = {{"rows_cols", s.ris->rows_cols},
                  {"quant_bits", s.ris->quant_bits},
                  {"element_spacing_m", s.ris->element_spacing_m},
                  {"rician_factor", s.ris->rician_factor},
                  {"los_exponent", s.ris->los_exponent},
                  {"nlos_exponent", s.ris->nlos_exponent}};
    }
    doc["base_stations"].push_back(j);
  }
  doc["users"] = nlohmann::json::array();
  for (const auto& u : users_) {
    doc["users"].push_back(
        {{"user_id", u.user_id}, {"key", u.key}, {"x", u.position.x}, {"y", u.position.y}, {"candidate_bs", u.candidate_bs}});
  }
  nlohmann::json fading;
  fading["shadow_db"] = fading_.shadow_db;
  fading["direct_power"] = fading_.direct_power;
  fading["los_phase"] = fading_.los_phase;
  nlohmann::json nlos = nlohmann::json::array();
  for (const auto& per_bs : fading_.ris_nlos) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& per_user : per_bs) {
      nlohmann::json row = nlohmann::json::array();
      for (const Complex c : per_user) {
        row.push_back(complex_json(c));
      }
      rows.push_back(std::move(row));
    }
    nlos.push_back(std::move(rows));
  }
  fading["ris_nlos"] = std::move(nlos);
  doc["fading"] = std::move(fading);
  doc["clamped_links"] = clamped_links_;
  return doc;
}

std::vector<BsId> covering_stations(const std::vector<BaseStation>& stations,
                                    const std::vector<BandProfile>& bands, Vec2 position) {
  std::vector<BsId> out;
  for (const auto& s : stations) {
    const double radius = bands.at(static_cast<std::size_t>(s.band)).coverage_radius_m;
    if (distance(s.position, position) <= radius) {
      out.push_back(s.bs_id);
    }
  }
  return out;
}

Scenario build_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  config.validate();

  std::vector<BandProfile> bands = config.bands;
  auto band_index = [&](const std::string& id) {
    for (std::size_t i = 0; i < bands.size(); ++i) {
      if (bands[i].band_id == id) {
        return static_cast<int>(i);
      }
    }
    throw ConfigError("missing band profile '" + id + "'");
  };

  std::vector<BaseStation> stations;
  for (std::size_t i = 0; i < config.base_stations.size(); ++i) {
    const BsSpec& spec = config.base_stations[i];
    BaseStation s;
    s.bs_id = static_cast<BsId>(i);
    s.band = band_index(spec.band);
    s.position = spec.position;
    s.num_subchannels = spec.num_subchannels;
    const BandProfile& band = bands[static_cast<std::size_t>(s.band)];
    if (band.is_mmwave) {
      RisPanel p;
      p.rows_cols = config.ris.rows_cols;
      p.quant_bits = config.ris.quant_bits;
      p.element_spacing_m = config.ris.element_spacing_m;
      p.host_position = spec.position;
      p.host_radius_m = band.coverage_radius_m;
      p.rician_factor = config.ris.rician_factor;
      p.los_exponent = config.ris.los_exponent;
      p.nlos_exponent = config.ris.nlos_exponent;
      try {
        p.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      s.ris = p;
    }
    stations.push_back(s);
  }

  std::vector<User> users;
  for (std::size_t b = 0; b < config.base_stations.size(); ++b) {
    const double radius = bands[static_cast<std::size_t>(stations[b].band)].coverage_radius_m;
    for (int i = 0; i < config.base_stations[b].users; ++i) {
      KeyedRng rng(seed, DrawKind::placement, {static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(i)});
      // Uniform in the disk; the tiny shrink keeps rounding from pushing a
      // user just past its home boundary.
      const double r = radius * (1.0 - 1e-12) * std::sqrt(rng.uniform());
      const double phi = 2.0 * kPi * rng.uniform();
      User u;
      u.user_id = static_cast<UserId>(users.size());
      u.key = generated_user_key(b, static_cast<std::size_t>(i));
      u.position = {stations[b].position.x + r * std::cos(phi), stations[b].position.y + r * std::sin(phi)};
      users.push_back(u);
    }
  }
  for (std::size_t i = 0; i < config.explicit_users.size(); ++i) {
    User u;
    u.user_id = static_cast<UserId>(users.size());
    u.key = kExplicitUserTag | static_cast<std::uint64_t>(i);
    u.position = config.explicit_users[i];
    users.push_back(u);
  }
  for (User& u : users) {
    u.candidate_bs = covering_stations(stations, bands, u.position);
    if (u.candidate_bs.empty() && !config.allow_uncovered) {
      throw ConfigError("user " + std::to_string(u.user_id) + " at (" + std::to_string(u.position.x) + ", " +
                        std::to_string(u.position.y) + ") is outside every coverage disk");
    }
  }

  FadingTable fading = draw_fading(config, stations, bands, users, seed);
  RadioParams params;
  params.outage_beta = config.outage_beta;
  params.mui_factor = config.mui_factor;
  params.half_power_beamwidth_deg = config.half_power_beamwidth_deg;
  params.ris_interference_k0 = config.ris_interference_k0;
  return Scenario(std::move(bands), std::move(stations), std::move(users), std::move(fading), params, seed);
}

}  // namespace hcn

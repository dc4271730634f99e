#include "hcn/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hcn {

void BandProfile::validate() const {
  auto fail = [this](const std::string& what) {
    throw std::invalid_argument("band '" + band_id + "': " + what);
  };
  if (!(frequency_hz > 0.0)) fail("frequency_hz must be > 0");
  if (!(subchannel_bandwidth_hz > 0.0)) fail("subchannel_bandwidth_hz must be > 0");
  if (!(coverage_radius_m > 0.0)) fail("coverage_radius_m must be > 0");
  if (!(path_loss_exponent >= 1.0)) fail("path_loss_exponent must be >= 1");
  if (!(shadow_sigma_db >= 0.0)) fail("shadow_sigma_db must be >= 0");
  if (!(channel_constant > 0.0)) fail("channel_constant must be > 0");
}

void RisPanel::validate() const {
  if (rows_cols < 1) throw std::invalid_argument("RIS rows_cols must be >= 1");
  if (quant_bits < 1 || quant_bits > 16) throw std::invalid_argument("RIS quant_bits must be in [1, 16]");
  if (!(element_spacing_m > 0.0)) throw std::invalid_argument("RIS element spacing must be > 0");
  if (!(rician_factor >= 0.0)) throw std::invalid_argument("RIS rician factor must be >= 0");
}

Vec3 RisPanel::element_position(int l_x, int l_z) const {
  if (l_x < 1 || l_x > rows_cols || l_z < 1 || l_z > rows_cols) {
    throw std::out_of_range("RIS element index out of range");
  }
  const double n = static_cast<double>(rows_cols);
  return {host_position.x - element_spacing_m * (n / 2.0 + 1.0) + element_spacing_m * l_x,
          host_position.y - host_radius_m, element_spacing_m * l_z};
}

namespace channel {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double free_space_loss_db(double frequency_hz, double d0_m) {
  if (!(frequency_hz > 0.0) || !(d0_m > 0.0)) {
    throw std::invalid_argument("free_space_loss_db: frequency and distance must be > 0");
  }
  return 32.45 + 20.0 * std::log10(frequency_hz / 1e6) + 20.0 * std::log10(d0_m / 1e3);
}

double path_loss_db(const BandProfile& band, double distance_m, double shadow_db) {
  const double d = std::max(distance_m, kReferenceDistanceM);
  return free_space_loss_db(band.frequency_hz, kReferenceDistanceM) +
         10.0 * band.path_loss_exponent * std::log10(d / kReferenceDistanceM) + shadow_db;
}

double wavelength_factor(double frequency_hz) {
  const double ratio = (kSpeedOfLight / frequency_hz) / (4.0 * kPi);
  return ratio * ratio;
}

BeamPattern::BeamPattern(double half_power_beamwidth_deg) : theta_3db_(half_power_beamwidth_deg) {
  if (!(theta_3db_ > 0.0)) {
    throw std::invalid_argument("half-power beamwidth must be > 0");
  }
  const double half_rad = theta_3db_ / 2.0 * kPi / 180.0;
  const double ratio = 1.6162 / std::sin(half_rad);
  max_gain_db_ = 10.0 * std::log10(ratio * ratio);
  side_lobe_db_ = -0.4111 * std::log(theta_3db_) - 10.579;
}

double BeamPattern::gain_db(double theta_deg) const {
  if (theta_deg < 0.0 || theta_deg > 180.0) {
    throw std::invalid_argument("beam angle must lie in [0, 180] degrees");
  }
  if (theta_deg <= main_lobe_width_deg() / 2.0) {
    const double x = 2.0 * theta_deg / theta_3db_;
    return max_gain_db_ - 3.01 * x * x;
  }
  return side_lobe_db_;
}

double BeamPattern::gain_linear(double theta_deg) const { return db_to_linear(gain_db(theta_deg)); }

double mmwave_antenna_gain_db(double theta_deg, double theta_3db_deg) {
  return BeamPattern(theta_3db_deg).gain_db(theta_deg);
}

double angle_at_deg(Vec2 apex, Vec2 a, Vec2 b) {
  const double ax = a.x - apex.x;
  const double ay = a.y - apex.y;
  const double bx = b.x - apex.x;
  const double by = b.y - apex.y;
  const double na = std::hypot(ax, ay);
  const double nb = std::hypot(bx, by);
  if (na == 0.0 || nb == 0.0) {
    return 0.0;
  }
  const double c = std::clamp((ax * bx + ay * by) / (na * nb), -1.0, 1.0);
  return std::acos(c) * 180.0 / kPi;
}

RicianWeights rician_weights(double rician_factor) {
  return {std::sqrt(rician_factor / (1.0 + rician_factor)), std::sqrt(1.0 / (1.0 + rician_factor))};
}

Complex ris_reflect_channel(const RisPanel& panel, int l_x, int l_z, Vec3 endpoint_t,
                            Vec3 endpoint_r, Complex nlos, double los_phase) {
  const Vec3 element = panel.element_position(l_x, l_z);
  const double d_t = distance(endpoint_t, element);
  const double d_r = distance(endpoint_r, element);
  if (d_t == 0.0 || d_r == 0.0) {
    throw std::invalid_argument("RIS endpoint coincides with an element");
  }
  const double product = d_t * d_r;
  const RicianWeights w = rician_weights(panel.rician_factor);
  const Complex los = std::sqrt(std::pow(product, -panel.los_exponent)) * std::polar(1.0, -los_phase);
  const Complex scattered = std::sqrt(std::pow(product, -panel.nlos_exponent)) * nlos;
  return w.los * los + w.nlos * scattered;
}

Complex phase_coefficient(int m, int quant_bits) {
  const int levels = 1 << quant_bits;
  if (m < 0 || m >= levels) {
    throw std::out_of_range("RIS phase index out of range");
  }
  const double theta = 2.0 * kPi * m / static_cast<double>(levels - 1);
  return std::polar(1.0, theta);
}

Complex ris_effective_sum(const RisPanel& panel, std::span<const int> phase_indices,
                          std::span<const Complex> reflect) {
  const auto count = static_cast<std::size_t>(panel.num_elements());
  if (phase_indices.size() != count || reflect.size() != count) {
    throw std::invalid_argument("ris_effective_sum: element count mismatch");
  }
  Complex total{0.0, 0.0};
  for (std::size_t k = 0; k < count; ++k) {
    total += reflect[k] * phase_coefficient(phase_indices[k], panel.quant_bits);
  }
  return total;
}

double outage_probability(double distance_m, double beta_per_m) {
  if (distance_m < 0.0 || beta_per_m < 0.0) {
    throw std::invalid_argument("outage_probability: negative argument");
  }
  return -std::expm1(-beta_per_m * distance_m);
}

}  // namespace channel
}  // namespace hcn

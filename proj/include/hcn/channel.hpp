#pragma once

#include <span>

#include "hcn/types.hpp"
#include "hcn/world.hpp"

namespace hcn::channel {

// Reference distance of the log-distance model.
inline constexpr double kReferenceDistanceM = 1.0;
inline constexpr double kSpeedOfLight = 299792458.0;

double db_to_linear(double db);
double dbm_to_watts(double dbm);

/// 32.45 + 20 lg(f[MHz]) + 20 lg(d0[km]).
double free_space_loss_db(double frequency_hz, double d0_m);

/// Log-distance path loss with a frozen shadowing draw. Distances below
/// the reference distance are clamped to it.
double path_loss_db(const BandProfile& band, double distance_m, double shadow_db);

/// (lambda / 4 pi)^2.
double wavelength_factor(double frequency_hz);

/// Gaussian-main-lobe / flat-side-lobe beam pattern.
class BeamPattern {
 public:
  explicit BeamPattern(double half_power_beamwidth_deg);

  double half_power_beamwidth_deg() const { return theta_3db_; }
  double main_lobe_width_deg() const { return 2.6 * theta_3db_; }
  double max_gain_db() const { return max_gain_db_; }
  double side_lobe_db() const { return side_lobe_db_; }

  // theta in [0, 180] degrees off boresight.
  double gain_db(double theta_deg) const;
  double gain_linear(double theta_deg) const;

 private:
  double theta_3db_;
  double max_gain_db_;
  double side_lobe_db_;
};

double mmwave_antenna_gain_db(double theta_deg, double theta_3db_deg);

/// Angle in degrees at `apex` between the rays towards `a` and `b`;
/// 0 when either ray is degenerate.
double angle_at_deg(Vec2 apex, Vec2 a, Vec2 b);

/// Weights (LoS, NLoS) of the Rician mixture for factor beta.
struct RicianWeights {
  double los;
  double nlos;
};
RicianWeights rician_weights(double rician_factor);

/// Reflected channel through one RIS element between two ground points.
/// `nlos` is the frozen small-scale draw, `los_phase` the frozen LoS phase.
Complex ris_reflect_channel(const RisPanel& panel, int l_x, int l_z, Vec3 endpoint_t,
                            Vec3 endpoint_r, Complex nlos, double los_phase);

/// q = exp(j 2 pi m / (2^e - 1)). Note m = 0 and m = 2^e - 1 coincide.
Complex phase_coefficient(int m, int quant_bits);

/// Sum over elements of h * q(m). `reflect` and `phase_indices` are both
/// row-major over the panel. Throws std::out_of_range on a bad index.
Complex ris_effective_sum(const RisPanel& panel, std::span<const int> phase_indices,
                          std::span<const Complex> reflect);

/// Blockage probability 1 - exp(-beta l).
double outage_probability(double distance_m, double beta_per_m);

}  // namespace hcn::channel

#include "hcn/rng.hpp"

#include <cmath>

namespace hcn {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_key(std::uint64_t seed, DrawKind kind,
                         std::initializer_list<std::uint64_t> ids) {
  std::uint64_t h = mix(seed + kGolden);
  h = mix(h ^ (static_cast<std::uint64_t>(kind) * kGolden));
  std::uint64_t salt = 1;
  for (const std::uint64_t id : ids) {
    h = mix(h ^ (id + salt * kGolden));
    ++salt;
  }
  return h;
}

std::uint64_t KeyedRng::next_u64() {
  ++counter_;
  return mix(key_ + counter_ * kGolden);
}

double KeyedRng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double KeyedRng::uniform_open() {
  return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double KeyedRng::normal() {
  // Box-Muller; one variate per pair keeps the counter layout simple.
  const double u1 = uniform_open();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

Complex KeyedRng::complex_normal() {
  const double u1 = uniform_open();
  const double u2 = uniform();
  const double radius = std::sqrt(-std::log(u1));  // |h|^2 ~ Exp(1)
  const double phase = 2.0 * kPi * u2;
  return {radius * std::cos(phase), radius * std::sin(phase)};
}

double KeyedRng::gamma(double shape, double scale) {
  // Marsaglia-Tsang; shape < 1 is boosted via the u^(1/shape) identity.
  if (shape < 1.0) {
    const double u = uniform_open();
    return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
      return d * v * scale;
    }
  }
}

std::size_t KeyedRng::below(std::size_t n) {
  if (n <= 1) {
    return 0;
  }
  const unsigned __int128 wide = static_cast<unsigned __int128>(next_u64()) * n;
  return static_cast<std::size_t>(wide >> 64);
}

}  // namespace hcn

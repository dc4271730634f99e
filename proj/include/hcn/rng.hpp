#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>

#include "hcn/types.hpp"

namespace hcn {

// Every random quantity in the simulator belongs to one of these streams.
// Keys combine (master seed, kind, stable ids), so a draw never depends on
// how many other draws were made before it.
enum class DrawKind : std::uint64_t {
  placement = 1,
  shadow = 2,
  direct_fading = 3,
  ris_nlos = 4,
  los_phase = 5,
  init_association = 6,
  init_phases = 7,
  random_baseline = 8,
  instance = 9,
};

std::uint64_t derive_key(std::uint64_t seed, DrawKind kind,
                         std::initializer_list<std::uint64_t> ids = {});

/// Counter-based generator: output i is a SplitMix64 finalizer applied to
/// (key, i). Copyable, cheap, and reproducible across platforms because all
/// distribution transforms are implemented here rather than taken from
/// <random>.
class KeyedRng {
 public:
  explicit KeyedRng(std::uint64_t key) : key_(key) {}
  KeyedRng(std::uint64_t seed, DrawKind kind, std::initializer_list<std::uint64_t> ids = {})
      : key_(derive_key(seed, kind, ids)) {}

  std::uint64_t next_u64();
  // Uniform on [0, 1).
  double uniform();
  // Uniform on (0, 1].
  double uniform_open();
  double normal();
  // Circularly-symmetric complex Gaussian with unit variance.
  Complex complex_normal();
  double gamma(double shape, double scale);
  // Uniform integer in [0, n).
  std::size_t below(std::size_t n);

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace hcn

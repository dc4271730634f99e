#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace hcn {

// Base stations and users are identified by their index in the scenario.
using BsId = int;
using UserId = int;

using Complex = std::complex<double>;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline double distance(Vec3 a, Vec3 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Ground-plane point (BSs and users live at z = 0).
inline Vec3 on_ground(Vec2 p) { return {p.x, p.y, 0.0}; }

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace hcn

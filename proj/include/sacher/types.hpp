#pragma once

#include <array>
#include <cmath>

namespace sacher {

inline constexpr int kStateDim = 5;
inline constexpr int kGoalDim = 2;
inline constexpr int kActionDim = 1;
// Network input widths: [state; goal] and [state; goal; action].
inline constexpr int kPolicyInputDim = kStateDim + kGoalDim;
inline constexpr int kCriticInputDim = kStateDim + kGoalDim + kActionDim;

// UAV kinematic state. Lengths in meters, yaw in radians (not wrapped).
struct UavState {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double psi = 0.0;
  double psi_dot = 0.0;

  std::array<double, kStateDim> to_array() const { return {x, y, z, psi, psi_dot}; }
  bool is_finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z) && std::isfinite(psi) &&
           std::isfinite(psi_dot);
  }
  friend bool operator==(const UavState&, const UavState&) = default;
};

// Center of the landing square on the xy-plane.
struct Goal {
  double x = 0.0;
  double y = 0.0;

  bool is_finite() const { return std::isfinite(x) && std::isfinite(y); }
  friend bool operator==(const Goal&, const Goal&) = default;
};

inline Goal planar_projection(const UavState& s) { return {s.x, s.y}; }

}  // namespace sacher

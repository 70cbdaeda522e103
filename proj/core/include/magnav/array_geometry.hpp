// Magnetometer array layout: rigid planar grid of lever arms in the body
// x-y plane, expressed in the body frame.
#pragma once

#include <vector>

#include <Eigen/Dense>

namespace magnav {

struct ArrayGeometry {
  std::vector<Eigen::Vector3d> lever_arms;  ///< m, body frame
  int n_y() const { return static_cast<int>(lever_arms.size()); }
};

/// 30-sensor 6x5 grid: 6 columns along body x spanning 0.32 m (pitch
/// 0.064 m), 5 rows along body y spanning 0.22 m (pitch 0.055 m), centered
/// on the body origin. Sensor index = column * 5 + row.
inline ArrayGeometry default_array() {
  ArrayGeometry g;
  g.lever_arms.reserve(30);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 5; ++j)
      g.lever_arms.emplace_back(-0.16 + 0.064 * i, -0.11 + 0.055 * j, 0.0);
  return g;
}

/// Single sensor at the body origin.
inline ArrayGeometry single_sensor() {
  ArrayGeometry g;
  g.lever_arms.emplace_back(0.0, 0.0, 0.0);
  return g;
}

}  // namespace magnav

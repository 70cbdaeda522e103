#pragma once

#include <Eigen/Core>

namespace magnav {

/// Axis-aligned box, meters.
struct Box {
  Eigen::Vector3d lo{Eigen::Vector3d::Zero()};
  Eigen::Vector3d hi{Eigen::Vector3d::Zero()};

  Eigen::Vector3d extent() const { return hi - lo; }
  Eigen::Vector3d center() const { return 0.5 * (lo + hi); }
  double volume() const { return extent().prod(); }
  /// Horizontal (x-y) footprint area, m^2.
  double footprint_area() const { return extent().x() * extent().y(); }

  bool contains(const Eigen::Vector3d& p, double tol = 0.0) const {
    return (p.array() >= lo.array() - tol).all() &&
           (p.array() <= hi.array() + tol).all();
  }
  bool degenerate() const { return (extent().array() <= 0.0).any(); }

  Box padded(const Eigen::Vector3d& pad) const { return Box{lo - pad, hi + pad}; }
};

}  // namespace magnav

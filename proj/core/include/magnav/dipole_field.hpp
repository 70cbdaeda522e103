// Ground-truth ambient magnetic field: homogeneous background plus a sum of
// point magnetic dipoles. Everything downstream works in microtesla; the
// dipole formula is evaluated in SI and converted.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "magnav/box.hpp"

namespace magnav {

/// One synthetic field source.
struct DipoleSource {
  Eigen::Vector3d position;  ///< m, navigation frame
  Eigen::Vector3d moment;    ///< A m^2
};

/// Homogeneous background plus dipole sum. Queries closer than
/// exclusion_radius to any source are rejected as ill-posed.
struct GroundTruthField {
  Eigen::Vector3d background{20.0, 0.0, 44.0};  ///< uT
  std::vector<DipoleSource> sources;
  double exclusion_radius = 0.3;  ///< m
};

/// Field at r, uT. Throws std::domain_error if r violates the exclusion
/// radius of any source, or std::invalid_argument if r is not finite.
Eigen::Vector3d evaluate_field(const GroundTruthField& field,
                               const Eigen::Vector3d& r);

/// Analytic spatial derivative dB/dr at r, uT/m. Symmetric and trace-free
/// away from sources. Same domain checks as evaluate_field.
Eigen::Matrix3d field_jacobian(const GroundTruthField& field,
                               const Eigen::Vector3d& r);

/// Draws `count` dipole sources inside `volume` but outside `keep_out`
/// (the trajectory region inflated by the exclusion margin), with moment
/// magnitudes in [0.5, 1.5] * moment_scale and uniformly random directions.
/// Deterministic for a fixed seed.
std::vector<DipoleSource> sample_sources(int count, const Box& volume,
                                         const Box& keep_out,
                                         double moment_scale,
                                         std::uint64_t seed);

// Plain-text (de)serialization so experiments are exactly replayable.
// Format: one key per line — "background bx by bz", "exclusion r",
// "source px py pz mx my mz" (repeated).
void write_field(std::ostream& os, const GroundTruthField& field);
GroundTruthField read_field(std::istream& is);

}  // namespace magnav

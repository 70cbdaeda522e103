#include "magnav/dipole_field.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "magnav/rng.hpp"

namespace magnav {

namespace {

// mu0 / (4 pi) in T m / A, times 1e6 to express fields in uT.
constexpr double kDipoleCoeffUT = 1e-7 * 1e6;

void check_query(const GroundTruthField& field, const Eigen::Vector3d& r) {
  if (!r.allFinite()) {
    throw std::invalid_argument("field query point is not finite");
  }
  for (const auto& s : field.sources) {
    if ((r - s.position).norm() < field.exclusion_radius) {
      throw std::domain_error(
          "field query inside the exclusion radius of a dipole source");
    }
  }
}

}  // namespace

Eigen::Vector3d evaluate_field(const GroundTruthField& field,
                               const Eigen::Vector3d& r) {
  check_query(field, r);
  Eigen::Vector3d b = field.background;
  for (const auto& s : field.sources) {
    const Eigen::Vector3d d = r - s.position;
    const double dist = d.norm();
    const Eigen::Vector3d n = d / dist;
    b += kDipoleCoeffUT *
         (3.0 * n * n.dot(s.moment) - s.moment) / (dist * dist * dist);
  }
  return b;
}

Eigen::Matrix3d field_jacobian(const GroundTruthField& field,
                               const Eigen::Vector3d& r) {
  check_query(field, r);
  Eigen::Matrix3d jac = Eigen::Matrix3d::Zero();
  for (const auto& s : field.sources) {
    const Eigen::Vector3d d = r - s.position;
    const double dist = d.norm();
    const Eigen::Vector3d n = d / dist;
    const double mn = n.dot(s.moment);
    // Gradient of the dipole term; symmetric with zero trace.
    jac += (3.0 * kDipoleCoeffUT / (dist * dist * dist * dist)) *
           (s.moment * n.transpose() + n * s.moment.transpose() +
            mn * (Eigen::Matrix3d::Identity() - 5.0 * n * n.transpose()));
  }
  return jac;
}

std::vector<DipoleSource> sample_sources(int count, const Box& volume,
                                         const Box& keep_out,
                                         double moment_scale,
                                         std::uint64_t seed) {
  if (count < 1) {
    throw std::invalid_argument("sample_sources: count must be >= 1");
  }
  if (volume.degenerate()) {
    throw std::invalid_argument("sample_sources: zero-volume box");
  }
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<DipoleSource> sources;
  sources.reserve(static_cast<std::size_t>(count));
  int attempts = 0;
  while (static_cast<int>(sources.size()) < count) {
    if (++attempts > 10000 * count) {
      throw std::runtime_error(
          "sample_sources: keep-out region leaves too little volume");
    }
    Eigen::Vector3d p;
    for (int a = 0; a < 3; ++a) {
      p[a] = volume.lo[a] + unit(rng) * (volume.hi[a] - volume.lo[a]);
    }
    if (keep_out.contains(p)) continue;

    Eigen::Vector3d dir(gauss(rng), gauss(rng), gauss(rng));
    while (dir.norm() < 1e-12) dir = {gauss(rng), gauss(rng), gauss(rng)};
    const double magnitude = moment_scale * (0.5 + unit(rng));
    sources.push_back({p, magnitude * dir.normalized()});
  }
  return sources;
}

void write_field(std::ostream& os, const GroundTruthField& field) {
  char line[256];
  std::snprintf(line, sizeof(line), "background %.17g %.17g %.17g\n",
                field.background.x(), field.background.y(),
                field.background.z());
  os << line;
  std::snprintf(line, sizeof(line), "exclusion %.17g\n",
                field.exclusion_radius);
  os << line;
  for (const auto& s : field.sources) {
    std::snprintf(line, sizeof(line),
                  "source %.17g %.17g %.17g %.17g %.17g %.17g\n",
                  s.position.x(), s.position.y(), s.position.z(),
                  s.moment.x(), s.moment.y(), s.moment.z());
    os << line;
  }
}

GroundTruthField read_field(std::istream& is) {
  GroundTruthField field;
  field.sources.clear();
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "background") {
      ls >> field.background.x() >> field.background.y() >>
          field.background.z();
    } else if (key == "exclusion") {
      ls >> field.exclusion_radius;
    } else if (key == "source") {
      DipoleSource s;
      ls >> s.position.x() >> s.position.y() >> s.position.z() >>
          s.moment.x() >> s.moment.y() >> s.moment.z();
      field.sources.push_back(s);
    } else {
      throw std::runtime_error("read_field: unknown key '" + key + "'");
    }
    if (ls.fail()) {
      throw std::runtime_error("read_field: malformed line '" + line + "'");
    }
  }
  return field;
}

}  // namespace magnav

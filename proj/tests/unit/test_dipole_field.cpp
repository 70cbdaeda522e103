// Ground-truth dipole field: independent-evaluator oracle, Maxwell
// constraints by finite differences, sampling determinism/containment.
#include "magnav/dipole_field.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <gtest/gtest.h>

#include "magnav/box.hpp"

using namespace magnav;
using Eigen::Matrix3d;
using Eigen::Vector3d;

namespace {

// Second straight-line implementation of the dipole sum, written directly
// from B = (mu0/4pi) (3 rhat (m.rhat) - m)/|r-p|^3, in SI then to uT.
Vector3d oracle_eval(const GroundTruthField& f, const Vector3d& r) {
  Vector3d b_tesla = Vector3d::Zero();
  const double mu0_over_4pi = 1e-7;  // T m / A
  for (const auto& s : f.sources) {
    Vector3d d = r - s.position;
    double dist = d.norm();
    Vector3d rhat = d / dist;
    b_tesla += mu0_over_4pi *
               (3.0 * rhat * (s.moment.dot(rhat)) - s.moment) /
               (dist * dist * dist);
  }
  return f.background + 1e6 * b_tesla;
}

GroundTruthField random_field(uint64_t seed, int count) {
  GroundTruthField f;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < count; ++i) {
    DipoleSource s;
    // Sources on a shell well away from the unit-box query region.
    Vector3d dir{u(rng), u(rng), u(rng)};
    s.position = 2.5 * dir.normalized();
    s.moment = 30.0 * Vector3d{u(rng), u(rng), u(rng)};
    f.sources.push_back(s);
  }
  return f;
}

Vector3d random_query(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  return {u(rng), u(rng), u(rng)};
}

constexpr double kH = 3e-5;  // FD step balancing truncation and rounding

}  // namespace

TEST(DipoleField, HomogeneousOnly) {
  GroundTruthField f;
  f.background = Vector3d(20.0, 0.0, 44.0);
  EXPECT_EQ(evaluate_field(f, Vector3d(0.3, -4.0, 2.0)), f.background);
  EXPECT_LT(field_jacobian(f, Vector3d(1.0, 2.0, 3.0)).norm(), 1e-15);
}

TEST(DipoleField, OnAxisDipoleMagnitude) {
  GroundTruthField f;
  f.background.setZero();
  double m = 12.0, d = 1.7;
  f.sources.push_back({Vector3d::Zero(), Vector3d(0.0, 0.0, m)});
  f.exclusion_radius = 0.3;
  Vector3d b = evaluate_field(f, Vector3d(0.0, 0.0, d));
  // (mu0/2pi) m / d^3 in uT; parallel to +z.
  double expect = 1e6 * 2e-7 * m / (d * d * d);
  EXPECT_NEAR(b.z(), expect, 1e-12 * expect);
  EXPECT_LT(b.head<2>().norm(), 1e-15);
}

TEST(DipoleField, MatchesIndependentOracle) {
  GroundTruthField f = random_field(99, 12);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    Vector3d r = random_query(rng);
    Vector3d a = evaluate_field(f, r);
    Vector3d b = oracle_eval(f, r);
    EXPECT_LT((a - b).norm(), 1e-12 * b.norm());
  }
}

TEST(DipoleField, Superposition) {
  GroundTruthField fa = random_field(1, 5);
  GroundTruthField fb = random_field(2, 7);
  GroundTruthField fab = fa;
  fab.sources.insert(fab.sources.end(), fb.sources.begin(), fb.sources.end());
  Vector3d r(0.2, -0.5, 0.4);
  Vector3d sum = evaluate_field(fa, r) + evaluate_field(fb, r) - fa.background;
  EXPECT_LT((evaluate_field(fab, r) - sum).norm(), 1e-9);
}

TEST(DipoleField, InverseCubeDecay) {
  GroundTruthField f;
  f.background.setZero();
  f.sources.push_back({Vector3d::Zero(), Vector3d(3.0, -2.0, 5.0)});
  Vector3d axis = Vector3d(1.0, 1.0, 0.5).normalized();
  Vector3d near = evaluate_field(f, 1.0 * axis);
  Vector3d far = evaluate_field(f, 2.0 * axis);
  EXPECT_NEAR(near.norm() / far.norm(), 8.0, 8.0 * 1e-9);
}

TEST(DipoleField, ExclusionZoneIsDomainError) {
  GroundTruthField f;
  f.exclusion_radius = 0.3;
  f.sources.push_back({Vector3d(1.0, 0.0, 0.0), Vector3d(0.0, 0.0, 10.0)});
  EXPECT_THROW(evaluate_field(f, Vector3d(1.1, 0.0, 0.0)), std::domain_error);
  EXPECT_THROW(field_jacobian(f, Vector3d(1.2, 0.1, -0.1)), std::domain_error);
  EXPECT_NO_THROW(evaluate_field(f, Vector3d(1.35, 0.0, 0.0)));
}

TEST(DipoleField, JacobianMatchesFiniteDifferences) {
  GroundTruthField f = random_field(7, 10);
  std::mt19937_64 rng(11);
  for (int t = 0; t < 25; ++t) {
    Vector3d r = random_query(rng);
    Matrix3d J = field_jacobian(f, r);
    Matrix3d J_fd;
    for (int i = 0; i < 3; ++i) {
      Vector3d dp = Vector3d::Zero();
      dp(i) = kH;
      J_fd.col(i) =
          (evaluate_field(f, r + dp) - evaluate_field(f, r - dp)) / (2.0 * kH);
    }
    EXPECT_LT((J - J_fd).norm() / std::max(1.0, J.norm()), 1e-5);
  }
}

TEST(DipoleField, JacobianSymmetricTraceFree) {
  GroundTruthField f = random_field(13, 10);
  std::mt19937_64 rng(17);
  for (int t = 0; t < 25; ++t) {
    Matrix3d J = field_jacobian(f, random_query(rng));
    EXPECT_LE(std::abs(J.trace()), 1e-9 * J.norm());
    EXPECT_LE((J - J.transpose()).norm(), 1e-9 * J.norm());
  }
}

TEST(DipoleField, FiniteDifferenceCurlAndDivergenceVanish) {
  GroundTruthField f = random_field(23, 15);
  std::mt19937_64 rng(29);
  for (int t = 0; t < 100; ++t) {
    Vector3d r = random_query(rng);
    Matrix3d G;
    for (int i = 0; i < 3; ++i) {
      Vector3d dp = Vector3d::Zero();
      dp(i) = kH;
      G.col(i) =
          (evaluate_field(f, r + dp) - evaluate_field(f, r - dp)) / (2.0 * kH);
    }
    double scale = std::max(G.norm(), 1e-12);
    double div = G.trace();
    Vector3d curl(G(2, 1) - G(1, 2), G(0, 2) - G(2, 0), G(1, 0) - G(0, 1));
    EXPECT_LE(std::abs(div), 1e-6 * scale);
    EXPECT_LE(curl.norm(), 1e-6 * scale);
  }
}

TEST(DipoleField, SampleSourcesDeterministic) {
  Box volume{Vector3d(-2.5, -2.5, -1.0), Vector3d(2.5, 2.5, 2.0)};
  Box keep_out{Vector3d(-1.0, -1.0, 0.5), Vector3d(1.0, 1.0, 1.5)};
  auto a = sample_sources(1, volume, keep_out, 25.0, 42);
  auto b = sample_sources(1, volume, keep_out, 25.0, 42);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].position, b[0].position);
  EXPECT_EQ(a[0].moment, b[0].moment);
  auto c = sample_sources(1, volume, keep_out, 25.0, 43);
  EXPECT_NE(a[0].position, c[0].position);
}

TEST(DipoleField, SampleSourcesContainment) {
  Box volume{Vector3d(-2.5, -2.5, -1.0), Vector3d(2.5, 2.5, 2.0)};
  Box keep_out{Vector3d(-1.0, -1.0, 0.5), Vector3d(1.0, 1.0, 1.5)};
  auto sources = sample_sources(40, volume, keep_out, 25.0, 7);
  ASSERT_EQ(sources.size(), 40u);
  for (const auto& s : sources) {
    EXPECT_TRUE(volume.contains(s.position));
    EXPECT_FALSE(keep_out.contains(s.position));
    EXPECT_GT(s.moment.norm(), 0.0);
    // Moment magnitudes ~ moment_scale.
    EXPECT_GE(s.moment.norm(), 0.5 * 25.0 - 1e-12);
    EXPECT_LE(s.moment.norm(), 1.5 * 25.0 + 1e-12);
  }
}

TEST(DipoleField, SampleSourcesRejectsBadInput) {
  Box volume{Vector3d(-1.0, -1.0, -1.0), Vector3d(1.0, 1.0, 1.0)};
  Box keep_out{Vector3d(-0.2, -0.2, -0.2), Vector3d(0.2, 0.2, 0.2)};
  EXPECT_THROW(sample_sources(0, volume, keep_out, 10.0, 1),
               std::invalid_argument);
  Box degenerate{Vector3d::Zero(), Vector3d::Zero()};
  EXPECT_THROW(sample_sources(3, degenerate, keep_out, 10.0, 1),
               std::invalid_argument);
}

TEST(DipoleField, SerializationRoundTrip) {
  GroundTruthField f = random_field(31, 6);
  f.background = Vector3d(18.0, -3.0, 46.0);
  f.exclusion_radius = 0.25;
  std::stringstream ss;
  write_field(ss, f);
  GroundTruthField g = read_field(ss);
  ASSERT_EQ(g.sources.size(), f.sources.size());
  EXPECT_EQ(g.background, f.background);
  EXPECT_EQ(g.exclusion_radius, f.exclusion_radius);
  for (size_t i = 0; i < f.sources.size(); ++i) {
    EXPECT_EQ(g.sources[i].position, f.sources[i].position);
    EXPECT_EQ(g.sources[i].moment, f.sources[i].moment);
  }
}

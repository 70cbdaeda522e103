// Config-driven experiment runner: generates the simulated field and sensor
// logs, runs the selected estimators, and writes error CSVs, a summary
// table, and a comparison plot. Fully deterministic per config.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "magnav/basis_field.hpp"
#include "magnav/config_file.hpp"
#include "magnav/sensor_sim.hpp"
#include "magnav/slam.hpp"

namespace magnav {

struct ExperimentConfig {
  // [field] — ground-truth dipole scene. Its seed is independent of the
  // master seed so noise realizations can vary over a fixed field.
  uint64_t field_seed = 7;
  int source_count = 40;
  double moment_scale = 30.0;  ///< A m^2
  Eigen::Vector3d background{20.0, 0.0, 44.0};  ///< uT
  Eigen::Vector3d volume_min{-2.5, -2.5, -1.0};  ///< source placement box, m
  Eigen::Vector3d volume_max{2.5, 2.5, 2.0};
  double exclusion_radius = 0.3;  ///< m

  // [trajectory]
  double radius = 0.6;      ///< m
  double rate_deg_s = 30.0; ///< yaw rate, deg/s
  double laps = 3.0;
  double height = 1.0;      ///< circle-center z, m
  double rate_hz = 100.0;   ///< sample rate, Hz

  // [sensor]
  ImuParams imu;
  double mag_noise_density = 0.02;  ///< uT/sqrt(Hz)
  bool array = true;                ///< false = one full-noise magnetometer
  double single_mag_divisor = 30.0; ///< 0 disables the single-mag data set

  // [model]
  int n_b = 250;
  double lengthscale = 0.3;  ///< m
  double signal_std = 5.0;   ///< uT
  Eigen::Vector3d domain_pad{0.6, 0.6, 0.6};  ///< m per face, >= 2*lengthscale
  int window = 300;          ///< incremental-solve window, epochs
  int max_iterations = 100;

  // [odometry]
  double transport_noise_mc = 0.5;  ///< uT per meter traveled
  double transport_noise_j = 1.0;   ///< uT/m per meter traveled

  // [resolution]
  std::vector<int> resolution_counts{10, 100, 1000};
  double resolution_grid_step = 0.1;    ///< m
  double resolution_fit_noise = 0.01;   ///< uT

  // [run]
  std::vector<std::string> estimators{"slam", "odometry", "ins"};
  std::string out_dir = "out";
  uint64_t master_seed = 1;
};

/// Fills a config from a parsed file, rejecting unknown sections/keys with a
/// line diagnostic. Defaults above apply to absent keys.
ExperimentConfig config_from(const ConfigFile& file);
ExperimentConfig load_config(const std::string& path);

/// Semantic checks; one human-readable diagnostic per violated constraint,
/// each naming the offending key. Empty = valid.
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

/// One estimator x data-set error curve plus its per-lap summary.
struct CurveResult {
  std::string estimator;  ///< "slam" | "odometry" | "ins"
  std::string dataset;    ///< "array" | "single"
  std::vector<double> t;
  std::vector<Eigen::Vector3d> error;
  std::vector<double> error_norm;
  ExplorationMetrics metrics;
  SolverReport report;  ///< meaningful for slam curves only
  std::string csv_path;
};

struct ExperimentResult {
  std::vector<CurveResult> curves;
  std::vector<std::string> failures;  ///< estimator failures (partial artifacts kept)
  double lap_period_s = 0.0;
  double field_variation_uT = 0.0;  ///< max-min field magnitude along the sweep
};

/// Runs the configured scenario: simulates both data sets, runs the selected
/// estimators, writes errors_<estimator>_<dataset>.csv, summary.txt,
/// comparison.svg, and the data-set files into cfg.out_dir. Per-estimator
/// failures are recorded in `failures` instead of thrown. Progress notes go
/// to `log` when non-null.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                std::ostream* log = nullptr);

/// Fits basis models of the configured sizes to the ground-truth field over
/// the trajectory footprint and writes resolution.csv. Throws
/// std::runtime_error when the error fails to decrease between consecutive
/// increasing counts.
std::vector<ResolutionRow> run_resolution(const ExperimentConfig& cfg,
                                          std::ostream* log = nullptr);

const CurveResult* find_curve(const ExperimentResult& result,
                              const std::string& estimator,
                              const std::string& dataset);

}  // namespace magnav

#include "magnav/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <numbers>
#include <ostream>
#include <set>
#include <stdexcept>
#include <utility>

#include "magnav/array_geometry.hpp"
#include "magnav/dipole_field.hpp"
#include "magnav/odometry_filter.hpp"
#include "magnav/rng.hpp"
#include "magnav/svg_plot.hpp"
#include "magnav/trajectory.hpp"

namespace magnav {

namespace fs = std::filesystem;

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::vector<std::string> split_tokens(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// "all" expands to every estimator; order is kept, duplicates dropped.
std::vector<std::string> expand_estimators(const std::vector<std::string>& in) {
  std::vector<std::string> out;
  auto push = [&](const std::string& e) {
    if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
  };
  for (const auto& tok : in) {
    if (tok == "all") {
      push("slam");
      push("odometry");
      push("ins");
    } else {
      push(tok);
    }
  }
  return out;
}

bool wants(const ExperimentConfig& cfg, const std::string& estimator) {
  return std::find(cfg.estimators.begin(), cfg.estimators.end(), estimator) !=
         cfg.estimators.end();
}

void write_error_csv(const std::string& path, std::span<const double> t,
                     std::span<const Eigen::Vector3d> error,
                     std::span<const double> error_norm) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "t_s,err_x_m,err_y_m,err_z_m,err_norm_m\n";
  const size_t n = std::min({t.size(), error.size(), error_norm.size()});
  for (size_t i = 0; i < n; ++i) {
    os << g17(t[i]) << ',' << g17(error[i].x()) << ',' << g17(error[i].y())
       << ',' << g17(error[i].z()) << ',' << g17(error_norm[i]) << '\n';
  }
  if (!os) throw std::runtime_error("write failed for " + path);
}

void append_lap_table(std::ostream& os, const ExplorationMetrics& m) {
  for (size_t i = 0; i < m.laps.size(); ++i) {
    os << "  lap " << (i + 1) << ": max " << g6(m.laps[i].max_error)
       << " m, end " << g6(m.laps[i].final_error) << " m\n";
  }
  os << "  end-of-lap-1 error: " << g6(m.end_of_lap1_error) << " m\n";
  if (!m.laps.empty()) {
    os << "  end-of-run error: " << g6(m.laps.back().final_error) << " m\n";
  }
}

}  // namespace

ExperimentConfig config_from(const ConfigFile& file) {
  static const std::set<std::pair<std::string, std::string>> known = {
      {"field", "seed"},
      {"field", "source_count"},
      {"field", "moment_scale"},
      {"field", "background"},
      {"field", "volume_min"},
      {"field", "volume_max"},
      {"field", "exclusion_radius"},
      {"trajectory", "radius"},
      {"trajectory", "rate_deg_s"},
      {"trajectory", "laps"},
      {"trajectory", "height"},
      {"trajectory", "rate_hz"},
      {"sensor", "accel_noise_density"},
      {"sensor", "accel_bias"},
      {"sensor", "accel_random_walk"},
      {"sensor", "gyro_noise_density"},
      {"sensor", "gyro_bias"},
      {"sensor", "gyro_random_walk"},
      {"sensor", "mag_noise_density"},
      {"sensor", "array"},
      {"sensor", "single_mag_divisor"},
      {"model", "n_b"},
      {"model", "lengthscale"},
      {"model", "signal_std"},
      {"model", "domain_pad"},
      {"model", "window"},
      {"model", "max_iterations"},
      {"odometry", "transport_noise_mc"},
      {"odometry", "transport_noise_j"},
      {"resolution", "counts"},
      {"resolution", "grid_step"},
      {"resolution", "fit_noise_std"},
      {"run", "estimators"},
      {"run", "out_dir"},
      {"run", "master_seed"},
  };
  for (const auto& [sec, key] : file.keys()) {
    if (!known.count({sec, key})) {
      throw ConfigError(file.origin() + ":" +
                        std::to_string(file.line_of(sec, key)) +
                        ": unknown key '" + sec + "." + key + "'");
    }
  }

  ExperimentConfig c;
  c.field_seed = static_cast<uint64_t>(
      file.get_int("field", "seed", static_cast<long long>(c.field_seed)));
  c.source_count =
      static_cast<int>(file.get_int("field", "source_count", c.source_count));
  c.moment_scale = file.get_double("field", "moment_scale", c.moment_scale);
  c.background = file.get_vec3("field", "background", c.background);
  c.volume_min = file.get_vec3("field", "volume_min", c.volume_min);
  c.volume_max = file.get_vec3("field", "volume_max", c.volume_max);
  c.exclusion_radius =
      file.get_double("field", "exclusion_radius", c.exclusion_radius);

  c.radius = file.get_double("trajectory", "radius", c.radius);
  c.rate_deg_s = file.get_double("trajectory", "rate_deg_s", c.rate_deg_s);
  c.laps = file.get_double("trajectory", "laps", c.laps);
  c.height = file.get_double("trajectory", "height", c.height);
  c.rate_hz = file.get_double("trajectory", "rate_hz", c.rate_hz);

  ImuParams& imu = c.imu;
  imu.rate_hz = c.rate_hz;
  imu.accel_noise_density = file.get_double("sensor", "accel_noise_density",
                                            imu.accel_noise_density);
  imu.accel_bias_init =
      file.get_vec3("sensor", "accel_bias", imu.accel_bias_init);
  imu.accel_random_walk =
      file.get_double("sensor", "accel_random_walk", imu.accel_random_walk);
  // Gyro keys use the natural deg/s units; internal storage is rad/s.
  imu.gyro_noise_density =
      kDegToRad * file.get_double("sensor", "gyro_noise_density",
                                  imu.gyro_noise_density / kDegToRad);
  imu.gyro_bias_init =
      kDegToRad *
      file.get_vec3("sensor", "gyro_bias", imu.gyro_bias_init / kDegToRad);
  imu.gyro_random_walk =
      kDegToRad * file.get_double("sensor", "gyro_random_walk",
                                  imu.gyro_random_walk / kDegToRad);
  c.mag_noise_density =
      file.get_double("sensor", "mag_noise_density", c.mag_noise_density);
  c.array = file.get_bool("sensor", "array", c.array);
  c.single_mag_divisor =
      file.get_double("sensor", "single_mag_divisor", c.single_mag_divisor);

  c.n_b = static_cast<int>(file.get_int("model", "n_b", c.n_b));
  c.lengthscale = file.get_double("model", "lengthscale", c.lengthscale);
  c.signal_std = file.get_double("model", "signal_std", c.signal_std);
  c.domain_pad = file.get_vec3("model", "domain_pad", c.domain_pad);
  c.window = static_cast<int>(file.get_int("model", "window", c.window));
  c.max_iterations = static_cast<int>(
      file.get_int("model", "max_iterations", c.max_iterations));

  c.transport_noise_mc =
      file.get_double("odometry", "transport_noise_mc", c.transport_noise_mc);
  c.transport_noise_j =
      file.get_double("odometry", "transport_noise_j", c.transport_noise_j);

  c.resolution_counts =
      file.get_int_list("resolution", "counts", c.resolution_counts);
  c.resolution_grid_step =
      file.get_double("resolution", "grid_step", c.resolution_grid_step);
  c.resolution_fit_noise =
      file.get_double("resolution", "fit_noise_std", c.resolution_fit_noise);

  c.estimators = expand_estimators(
      split_tokens(file.get_string("run", "estimators", "all")));
  c.out_dir = file.get_string("run", "out_dir", c.out_dir);
  c.master_seed = static_cast<uint64_t>(
      file.get_int("run", "master_seed", static_cast<long long>(c.master_seed)));
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  return config_from(ConfigFile::parse_file(path));
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
  std::vector<std::string> d;
  auto bad = [&](const std::string& msg) { d.push_back(msg); };

  if (!(cfg.radius > 0.0)) {
    bad("trajectory.radius must be > 0 m (got " + g6(cfg.radius) + ")");
  }
  if (cfg.rate_deg_s == 0.0 || !std::isfinite(cfg.rate_deg_s)) {
    bad("trajectory.rate_deg_s must be a nonzero finite rate");
  }
  if (!(cfg.laps >= 1.0)) {
    bad("trajectory.laps must be >= 1 (got " + g6(cfg.laps) + ")");
  }
  if (!(cfg.rate_hz > 0.0)) {
    bad("trajectory.rate_hz must be > 0 Hz (got " + g6(cfg.rate_hz) + ")");
  }

  if (cfg.source_count < 1) {
    bad("field.source_count must be >= 1 (got " +
        std::to_string(cfg.source_count) + ")");
  }
  if (!(cfg.moment_scale > 0.0)) {
    bad("field.moment_scale must be > 0 A m^2");
  }
  double bg = cfg.background.norm();
  if (!(bg >= 10.0 && bg <= 100.0)) {
    bad("field.background magnitude must lie in [10, 100] uT (got " + g6(bg) +
        ")");
  }
  if (((cfg.volume_max - cfg.volume_min).array() <= 0.0).any()) {
    bad("field.volume_min/volume_max must describe a nondegenerate box");
  }
  if (!(cfg.exclusion_radius > 0.0)) {
    bad("field.exclusion_radius must be > 0 m");
  }

  if (!(cfg.imu.accel_noise_density >= 0.0) ||
      !(cfg.imu.gyro_noise_density >= 0.0)) {
    bad("sensor.accel_noise_density and sensor.gyro_noise_density must be >= 0");
  }
  if (!(cfg.imu.accel_random_walk >= 0.0) ||
      !(cfg.imu.gyro_random_walk >= 0.0)) {
    bad("sensor.accel_random_walk and sensor.gyro_random_walk must be >= 0");
  }
  if (!(cfg.mag_noise_density >= 0.0)) {
    bad("sensor.mag_noise_density must be >= 0 uT/sqrt(Hz)");
  }
  if (!(cfg.single_mag_divisor >= 0.0)) {
    bad("sensor.single_mag_divisor must be >= 0 (0 disables the data set)");
  }
  if (!cfg.array && !(cfg.single_mag_divisor > 0.0)) {
    bad("sensor.array is off and sensor.single_mag_divisor is 0: no data set"
        " remains");
  }

  if (cfg.n_b < 3) {
    bad("model.n_b must be at least 3, the homogeneous-field weight count"
        " (got " +
        std::to_string(cfg.n_b) + ")");
  }
  if (!(cfg.lengthscale > 0.0)) bad("model.lengthscale must be > 0 m");
  if (!(cfg.signal_std > 0.0)) bad("model.signal_std must be > 0 uT");
  if ((cfg.domain_pad.array() < 2.0 * cfg.lengthscale - 1e-12).any()) {
    bad("model.domain_pad entries must be >= 2*model.lengthscale (= " +
        g6(2.0 * cfg.lengthscale) +
        " m) so the Dirichlet boundary stays clear of the data");
  }
  if (cfg.window < 2) {
    bad("model.window must be >= 2 epochs (got " + std::to_string(cfg.window) +
        ")");
  }
  if (cfg.max_iterations < 1) bad("model.max_iterations must be >= 1");

  if (!(cfg.transport_noise_mc >= 0.0) || !(cfg.transport_noise_j >= 0.0)) {
    bad("odometry.transport_noise_mc and odometry.transport_noise_j must be"
        " >= 0");
  }

  if (cfg.resolution_counts.empty()) {
    bad("resolution.counts must list at least one basis size");
  }
  for (int n : cfg.resolution_counts) {
    if (n < 3) {
      bad("resolution.counts entries must be >= 3 (got " + std::to_string(n) +
          ")");
      break;
    }
  }
  if (!(cfg.resolution_grid_step > 0.0)) {
    bad("resolution.grid_step must be > 0 m");
  }
  if (!(cfg.resolution_fit_noise > 0.0)) {
    bad("resolution.fit_noise_std must be > 0 uT");
  }

  for (const auto& e : cfg.estimators) {
    if (e != "slam" && e != "odometry" && e != "ins") {
      bad("run.estimators: unknown estimator '" + e +
          "' (expected slam, odometry, ins, or all)");
    }
  }
  if (cfg.estimators.empty()) bad("run.estimators must select at least one");
  if (cfg.out_dir.empty()) bad("run.out_dir must be nonempty");
  return d;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                std::ostream* log) {
  if (auto diags = validate_config(cfg); !diags.empty()) {
    throw ConfigError("invalid config: " + diags.front());
  }
  fs::create_directories(cfg.out_dir);
  auto out = [&](const std::string& name) {
    return (fs::path(cfg.out_dir) / name).string();
  };
  auto note = [&](const std::string& msg) {
    if (log) *log << msg << "\n";
  };

  ExperimentResult result;
  result.lap_period_s = 360.0 / std::abs(cfg.rate_deg_s);

  const double omega = cfg.rate_deg_s * std::numbers::pi / 180.0;
  Trajectory traj =
      generate_circle(cfg.radius, omega, cfg.laps, cfg.rate_hz,
                      Eigen::Vector3d{0.0, 0.0, cfg.height});
  ArrayGeometry geometry = cfg.array ? default_array() : single_sensor();
  Box sweep = sweep_box(traj, geometry.lever_arms);

  // Sources stay clear of everywhere a sensor goes, with margin beyond the
  // near-singular exclusion zone.
  Box keep_out =
      sweep.padded(Eigen::Vector3d::Constant(cfg.exclusion_radius + 0.1));
  GroundTruthField field;
  field.background = cfg.background;
  field.exclusion_radius = cfg.exclusion_radius;
  field.sources = sample_sources(cfg.source_count,
                                 Box{cfg.volume_min, cfg.volume_max}, keep_out,
                                 cfg.moment_scale, cfg.field_seed);

  {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const NavState& s : traj.states) {
      double m = evaluate_field(field, s.r).norm();
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
    result.field_variation_uT = hi - lo;
    note("field magnitude variation along trajectory: " + g6(hi - lo) + " uT");
  }

  ImuParams imu = cfg.imu;
  imu.rate_hz = cfg.rate_hz;
  const uint64_t log_seed = derive_seed(cfg.master_seed, 2);
  SensorLog log_array =
      simulate_log(field, traj, geometry, imu, cfg.mag_noise_density, log_seed);
  std::optional<SensorLog> log_single;
  if (cfg.single_mag_divisor > 0.0) {
    log_single = single_mag_variant(log_array, cfg.single_mag_divisor);
  }

  {
    std::ofstream os(out("field.txt"));
    write_field(os, field);
    std::ofstream truth(out("truth.csv"));
    write_truth_csv(truth, log_array);
    std::ofstream imu_os(out("imu.csv"));
    write_imu_csv(imu_os, log_array);
    std::ofstream mag_os(out("mag_array.csv"));
    write_mag_csv(mag_os, log_array);
    if (log_single) {
      std::ofstream single_os(out("mag_single.csv"));
      write_mag_csv(single_os, *log_single);
    }
  }

  const Box domain = sweep.padded(cfg.domain_pad);
  SolveOptions sopts;
  sopts.max_iterations = cfg.max_iterations;

  auto add_curve = [&](const std::string& estimator, const std::string& dataset,
                       std::span<const double> t,
                       std::vector<Eigen::Vector3d> error,
                       std::vector<double> error_norm,
                       const SolverReport& report) {
    CurveResult c;
    c.estimator = estimator;
    c.dataset = dataset;
    c.t.assign(t.begin(), t.end());
    c.error = std::move(error);
    c.error_norm = std::move(error_norm);
    c.metrics = exploration_error_metrics(c.error, result.lap_period_s,
                                          cfg.rate_hz);
    c.report = report;
    c.csv_path = out("errors_" + estimator + "_" + dataset + ".csv");
    write_error_csv(c.csv_path, c.t, c.error, c.error_norm);
    note(estimator + "/" + dataset + ": end error " +
         g6(c.error_norm.empty() ? 0.0 : c.error_norm.back()) + " m");
    result.curves.push_back(std::move(c));
  };
  auto record_failure = [&](const std::string& which, const std::string& what) {
    result.failures.push_back(which + ": " + what);
    note("FAILED " + which + ": " + what);
  };

  if (wants(cfg, "slam")) {
    BasisFieldModel model =
        build_basis(domain, cfg.n_b, cfg.lengthscale, cfg.signal_std);
    try {
      note("slam/array: window " + std::to_string(cfg.window) + " over " +
           std::to_string(log_array.size()) + " epochs");
      SlamProblem problem = build_problem(log_array, model, geometry, imu);
      SlamSolution sol = incremental_solve(problem, cfg.window, sopts);
      note("slam/array: " + std::to_string(sol.report.iterations) +
           " accepted steps, " + g6(sol.report.seconds) + " s");
      add_curve("slam", "array", log_array.t, std::move(sol.error),
                std::move(sol.error_norm), sol.report);
    } catch (const std::exception& e) {
      record_failure("slam/array", e.what());
    }
    if (log_single) {
      try {
        SlamProblem problem =
            build_problem(*log_single, model, single_sensor(), imu);
        SlamSolution sol = incremental_solve(problem, cfg.window, sopts);
        note("slam/single: " + std::to_string(sol.report.iterations) +
             " accepted steps, " + g6(sol.report.seconds) + " s");
        add_curve("slam", "single", log_single->t, std::move(sol.error),
                  std::move(sol.error_norm), sol.report);
      } catch (const std::exception& e) {
        record_failure("slam/single", e.what());
      }
    }
  }

  if (wants(cfg, "odometry")) {
    try {
      OdoConfig ocfg;
      ocfg.imu = imu;
      ocfg.mag_sigma = std::max(log_array.mag_noise_std, 1e-6);
      ocfg.transport_noise_mc = cfg.transport_noise_mc;
      ocfg.transport_noise_j = cfg.transport_noise_j;
      OdoRun run = run_filter(log_array, geometry, ocfg);
      add_curve("odometry", "array", log_array.t, std::move(run.error),
                std::move(run.error_norm), SolverReport{});
    } catch (const std::exception& e) {
      record_failure("odometry/array", e.what());
    }
  }

  if (wants(cfg, "ins")) {
    try {
      OdoRun run = run_ins(log_array);
      add_curve("ins", "array", log_array.t, std::move(run.error),
                std::move(run.error_norm), SolverReport{});
    } catch (const std::exception& e) {
      record_failure("ins/array", e.what());
    }
  }

  // Summary and comparison figure cover whatever succeeded.
  {
    std::ofstream os(out("summary.txt"));
    os << "scenario: radius " << g6(cfg.radius) << " m, rate "
       << g6(cfg.rate_deg_s) << " deg/s, laps " << g6(cfg.laps) << ", "
       << g6(cfg.rate_hz) << " Hz, lap period " << g6(result.lap_period_s)
       << " s\n";
    os << "field: " << field.sources.size()
       << " dipole sources, magnitude variation "
       << g6(result.field_variation_uT) << " uT along the trajectory\n";
    os << "data sets: array (" << log_array.n_y() << " sensors, mag std "
       << g6(log_array.mag_noise_std) << " uT)";
    if (log_single) {
      os << ", single (1 sensor, mag std " << g6(log_single->mag_noise_std)
         << " uT)";
    }
    os << "\nmodel: n_b " << cfg.n_b << ", lengthscale " << g6(cfg.lengthscale)
       << " m, signal std " << g6(cfg.signal_std) << " uT\n";

    for (const CurveResult& c : result.curves) {
      os << "\n[" << c.estimator << "/" << c.dataset << "]\n";
      append_lap_table(os, c.metrics);
      if (c.estimator == "slam") {
        os << "  solver: " << c.report.iterations << " accepted steps, cost "
           << g6(c.report.initial_cost) << " -> " << g6(c.report.final_cost)
           << (c.report.converged ? ", converged" : ", max iterations")
           << "\n";
      }
    }

    const CurveResult* sa = find_curve(result, "slam", "array");
    const CurveResult* ss = find_curve(result, "slam", "single");
    if (sa && ss && sa->metrics.end_of_lap1_error > 0.0) {
      os << "\nexploration gain (single / array end-of-lap-1 error): "
         << g6(ss->metrics.end_of_lap1_error / sa->metrics.end_of_lap1_error)
         << "\n";
    }
    for (const auto& f : result.failures) os << "\nFAILED " << f << "\n";
  }

  if (!result.curves.empty()) {
    std::vector<PlotSeries> series;
    auto style = [](const std::string& est, const std::string& ds)
        -> std::pair<std::string, std::string> {
      if (est == "slam" && ds == "array") return {"SLAM, sensor array", "#d62728"};
      if (est == "slam" && ds == "single")
        return {"SLAM, single magnetometer", "#000000"};
      if (est == "odometry") return {"magnetic odometry INS", "#1f77b4"};
      return {"pure INS", "#2ca02c"};
    };
    bool any_positive = false;
    for (const CurveResult& c : result.curves) {
      auto [label, color] = style(c.estimator, c.dataset);
      PlotSeries s;
      s.label = label;
      s.color = color;
      s.x = c.t;
      s.y = c.error_norm;
      for (double v : s.y) any_positive |= v > 0.0;
      series.push_back(std::move(s));
    }
    PlotOptions popts;
    popts.title = "Position error comparison";
    popts.x_label = "time [s]";
    popts.y_label = "position error [m]";
    popts.log_y = any_positive;
    try {
      write_svg_plot(out("comparison.svg"), series, popts);
    } catch (const std::exception& e) {
      record_failure("comparison.svg", e.what());
    }
  }

  return result;
}

std::vector<ResolutionRow> run_resolution(const ExperimentConfig& cfg,
                                          std::ostream* log) {
  if (auto diags = validate_config(cfg); !diags.empty()) {
    throw ConfigError("invalid config: " + diags.front());
  }
  const double omega = cfg.rate_deg_s * std::numbers::pi / 180.0;
  Trajectory traj =
      generate_circle(cfg.radius, omega, cfg.laps, cfg.rate_hz,
                      Eigen::Vector3d{0.0, 0.0, cfg.height});
  ArrayGeometry geometry = cfg.array ? default_array() : single_sensor();
  Box footprint = sweep_box(traj, geometry.lever_arms);
  Box keep_out =
      footprint.padded(Eigen::Vector3d::Constant(cfg.exclusion_radius + 0.1));

  GroundTruthField field;
  field.background = cfg.background;
  field.exclusion_radius = cfg.exclusion_radius;
  field.sources = sample_sources(cfg.source_count,
                                 Box{cfg.volume_min, cfg.volume_max}, keep_out,
                                 cfg.moment_scale, cfg.field_seed);

  ResolutionOptions opts;
  opts.lengthscale = cfg.lengthscale;
  opts.signal_std = cfg.signal_std;
  opts.fit_noise_std = cfg.resolution_fit_noise;
  opts.domain_pad = cfg.domain_pad;
  std::vector<ResolutionRow> rows = resolution_study(
      field, footprint, cfg.resolution_counts, cfg.resolution_grid_step, opts);

  fs::create_directories(cfg.out_dir);
  std::string path = (fs::path(cfg.out_dir) / "resolution.csv").string();
  {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << "n_b,density_per_m2,rmse_uT\n";
    for (const auto& r : rows) {
      os << r.n_b << ',' << g17(r.density_per_m2) << ',' << g17(r.rmse_uT)
         << '\n';
    }
  }
  if (log) {
    for (const auto& r : rows) {
      *log << "n_b " << r.n_b << ": " << g6(r.density_per_m2)
           << " per m^2, rmse " << g6(r.rmse_uT) << " uT\n";
    }
  }

  for (size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].n_b > rows[i - 1].n_b && !(rows[i].rmse_uT < rows[i - 1].rmse_uT)) {
      throw std::runtime_error(
          "resolution: rmse did not decrease from n_b=" +
          std::to_string(rows[i - 1].n_b) + " (" + g6(rows[i - 1].rmse_uT) +
          " uT) to n_b=" + std::to_string(rows[i].n_b) + " (" +
          g6(rows[i].rmse_uT) + " uT)");
    }
  }
  return rows;
}

const CurveResult* find_curve(const ExperimentResult& result,
                              const std::string& estimator,
                              const std::string& dataset) {
  for (const auto& c : result.curves) {
    if (c.estimator == estimator && c.dataset == dataset) return &c;
  }
  return nullptr;
}

}  // namespace magnav

#include "magnav/basis_field.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace magnav {
namespace {

constexpr double kLinearPriorStd = 100.0;  // uT; effectively flat
constexpr double kDomainTol = 1e-9;        // m; accept the closed boundary

double mode_eigenvalue(const Eigen::Vector3i& n, const Eigen::Vector3d& L) {
  const double pi = std::numbers::pi;
  Eigen::Vector3d a(pi * n.x() / L.x(), pi * n.y() / L.y(), pi * n.z() / L.z());
  return a.squaredNorm();
}

/// Prior std for a sinusoid weight: sqrt of the squared-exponential potential
/// spectral density at the mode's angular frequency.
double mode_prior_std(double eigenvalue, double lengthscale, double signal_std) {
  const double pi = std::numbers::pi;
  const double sigma_pot = signal_std * lengthscale;  // potential scale, uT*m
  const double s = sigma_pot * sigma_pot *
                   std::pow(2.0 * pi * lengthscale * lengthscale, 1.5) *
                   std::exp(-0.5 * lengthscale * lengthscale * eigenvalue);
  return std::sqrt(s);
}

}  // namespace

BasisFieldModel build_basis(const Box& domain, int n_b, double lengthscale,
                            double signal_std) {
  if (domain.degenerate())
    throw std::invalid_argument("build_basis: domain box is degenerate");
  if (n_b < 3)
    throw std::invalid_argument("build_basis: n_b must be at least 3");
  if (!(lengthscale > 0.0))
    throw std::invalid_argument("build_basis: lengthscale must be positive");
  if (!(signal_std > 0.0))
    throw std::invalid_argument("build_basis: signal_std must be positive");

  BasisFieldModel m;
  m.domain = domain;
  m.n_b = n_b;
  m.lengthscale = lengthscale;
  m.signal_std = signal_std;

  const Eigen::Vector3d L = domain.extent();
  m.norm_const = std::sqrt(8.0 / domain.volume());

  const int n_modes = n_b - m.linear_count;
  if (n_modes > 0) {
    const double pi = std::numbers::pi;
    const double L_max = L.maxCoeff();
    // Enumerate a cubic index lattice large enough that no omitted index
    // triple could have a smaller eigenvalue than the ones we keep: any
    // triple outside [1,M]^3 has eigenvalue >= (pi*(M+1)/L_max)^2.
    int M = 8;
    std::vector<std::pair<double, Eigen::Vector3i>> lattice;
    for (;; M *= 2) {
      if (M > 512)
        throw std::invalid_argument("build_basis: n_b too large for domain");
      if (M * M * M < n_modes) continue;
      lattice.clear();
      lattice.reserve(static_cast<size_t>(M) * M * M);
      for (int nx = 1; nx <= M; ++nx)
        for (int ny = 1; ny <= M; ++ny)
          for (int nz = 1; nz <= M; ++nz) {
            Eigen::Vector3i n(nx, ny, nz);
            lattice.emplace_back(mode_eigenvalue(n, L), n);
          }
      std::sort(lattice.begin(), lattice.end(),
                [](const auto& a, const auto& b) {
                  return std::tie(a.first, a.second.x(), a.second.y(),
                                  a.second.z()) <
                         std::tie(b.first, b.second.x(), b.second.y(),
                                  b.second.z());
                });
      const double omitted_min = std::pow(pi * (M + 1) / L_max, 2);
      if (lattice[n_modes - 1].first < omitted_min) break;
    }
    m.modes.reserve(n_modes);
    for (int i = 0; i < n_modes; ++i) m.modes.push_back(lattice[i].second);
  }

  m.prior_std.resize(n_b);
  m.prior_std.head(m.linear_count).setConstant(kLinearPriorStd);
  m.max_mode.setZero();
  for (int i = 0; i < n_modes; ++i) {
    const Eigen::Vector3i& n = m.modes[i];
    m.prior_std(m.linear_count + i) =
        mode_prior_std(mode_eigenvalue(n, L), lengthscale, signal_std);
    m.max_mode = m.max_mode.cwiseMax(n);
  }
  m.theta = Eigen::VectorXd::Zero(n_b);
  return m;
}

void prepare_point(const BasisFieldModel& model, const Eigen::Vector3d& r,
                   BasisWorkspace& ws) {
  if (!r.allFinite())
    throw std::domain_error("basis evaluation: non-finite query point");
  if (!model.domain.contains(r, kDomainTol)) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "basis evaluation: point (%.6g, %.6g, %.6g) outside model "
                  "domain",
                  r.x(), r.y(), r.z());
    throw std::domain_error(buf);
  }
  prepare_point_unchecked(model, r, ws);
}

void prepare_point_unchecked(const BasisFieldModel& model,
                             const Eigen::Vector3d& r, BasisWorkspace& ws) {
  const Eigen::Vector3d L = model.domain.extent();
  for (int d = 0; d < 3; ++d) {
    const double x = r(d) - model.domain.lo(d);
    const int n_max = model.max_mode(d);
    ws.sin_t[d].resize(n_max);
    ws.cos_t[d].resize(n_max);
    if (n_max == 0) continue;
    // sin/cos of k*a*x via the angle-addition recurrence; drift is O(k*eps).
    const double a = std::numbers::pi * x / L(d);
    const double s1 = std::sin(a), c1 = std::cos(a);
    double s = s1, c = c1;
    ws.sin_t[d](0) = s;
    ws.cos_t[d](0) = c;
    for (int k = 1; k < n_max; ++k) {
      const double s_next = s * c1 + c * s1;
      c = c * c1 - s * s1;
      s = s_next;
      ws.sin_t[d](k) = s;
      ws.cos_t[d](k) = c;
    }
  }
}

void basis_matrix_into(const BasisFieldModel& model, const BasisWorkspace& ws,
                       Eigen::Ref<Eigen::Matrix<double, 3, Eigen::Dynamic>> out) {
  if (out.cols() != model.n_b)
    throw std::invalid_argument("basis_matrix_into: output has wrong column count");
  out.leftCols<3>() = Eigen::Matrix3d::Identity();
  const Eigen::Vector3d L = model.domain.extent();
  const double pi = std::numbers::pi;
  const Eigen::Vector3d a0(pi / L.x(), pi / L.y(), pi / L.z());
  const double C = model.norm_const;
  for (size_t i = 0; i < model.modes.size(); ++i) {
    const Eigen::Vector3i& n = model.modes[i];
    const double sx = ws.sin_t[0](n.x() - 1), cx = ws.cos_t[0](n.x() - 1);
    const double sy = ws.sin_t[1](n.y() - 1), cy = ws.cos_t[1](n.y() - 1);
    const double sz = ws.sin_t[2](n.z() - 1), cz = ws.cos_t[2](n.z() - 1);
    const Eigen::Vector3d a = a0.cwiseProduct(n.cast<double>());
    out.col(model.linear_count + static_cast<int>(i)) =
        C * Eigen::Vector3d(a.x() * cx * sy * sz, a.y() * sx * cy * sz,
                            a.z() * sx * sy * cz);
  }
}

Eigen::Vector3d model_field(const BasisFieldModel& model,
                            const BasisWorkspace& ws) {
  return model_field(model, ws, model.theta);
}

Eigen::Vector3d model_field(const BasisFieldModel& model,
                            const BasisWorkspace& ws,
                            const Eigen::Ref<const Eigen::VectorXd>& theta) {
  if (theta.size() != model.n_b)
    throw std::invalid_argument("model_field: weight vector has wrong size");
  Eigen::Vector3d out = theta.head<3>();
  const Eigen::Vector3d L = model.domain.extent();
  const double pi = std::numbers::pi;
  const Eigen::Vector3d a0(pi / L.x(), pi / L.y(), pi / L.z());
  const double C = model.norm_const;
  for (size_t i = 0; i < model.modes.size(); ++i) {
    const Eigen::Vector3i& n = model.modes[i];
    const double w = C * theta(model.linear_count + static_cast<int>(i));
    const double sx = ws.sin_t[0](n.x() - 1), cx = ws.cos_t[0](n.x() - 1);
    const double sy = ws.sin_t[1](n.y() - 1), cy = ws.cos_t[1](n.y() - 1);
    const double sz = ws.sin_t[2](n.z() - 1), cz = ws.cos_t[2](n.z() - 1);
    const Eigen::Vector3d a = a0.cwiseProduct(n.cast<double>());
    out.x() += w * a.x() * cx * sy * sz;
    out.y() += w * a.y() * sx * cy * sz;
    out.z() += w * a.z() * sx * sy * cz;
  }
  return out;
}

Eigen::Matrix3d model_field_jacobian(const BasisFieldModel& model,
                                     const BasisWorkspace& ws) {
  return model_field_jacobian(model, ws, model.theta);
}

Eigen::Matrix3d model_field_jacobian(
    const BasisFieldModel& model, const BasisWorkspace& ws,
    const Eigen::Ref<const Eigen::VectorXd>& theta) {
  if (theta.size() != model.n_b)
    throw std::invalid_argument(
        "model_field_jacobian: weight vector has wrong size");
  Eigen::Matrix3d J = Eigen::Matrix3d::Zero();
  const Eigen::Vector3d L = model.domain.extent();
  const double pi = std::numbers::pi;
  const Eigen::Vector3d a0(pi / L.x(), pi / L.y(), pi / L.z());
  const double C = model.norm_const;
  for (size_t i = 0; i < model.modes.size(); ++i) {
    const Eigen::Vector3i& n = model.modes[i];
    const double w = C * theta(model.linear_count + static_cast<int>(i));
    const double sx = ws.sin_t[0](n.x() - 1), cx = ws.cos_t[0](n.x() - 1);
    const double sy = ws.sin_t[1](n.y() - 1), cy = ws.cos_t[1](n.y() - 1);
    const double sz = ws.sin_t[2](n.z() - 1), cz = ws.cos_t[2](n.z() - 1);
    const Eigen::Vector3d a = a0.cwiseProduct(n.cast<double>());
    // Hessian of the potential term, times its weight.
    J(0, 0) += -w * a.x() * a.x() * sx * sy * sz;
    J(1, 1) += -w * a.y() * a.y() * sx * sy * sz;
    J(2, 2) += -w * a.z() * a.z() * sx * sy * sz;
    const double hxy = w * a.x() * a.y() * cx * cy * sz;
    const double hxz = w * a.x() * a.z() * cx * sy * cz;
    const double hyz = w * a.y() * a.z() * sx * cy * cz;
    J(0, 1) += hxy;
    J(1, 0) += hxy;
    J(0, 2) += hxz;
    J(2, 0) += hxz;
    J(1, 2) += hyz;
    J(2, 1) += hyz;
  }
  return J;
}

Eigen::Matrix<double, 3, Eigen::Dynamic> evaluate_basis(
    const BasisFieldModel& model, const Eigen::Vector3d& r) {
  BasisWorkspace ws;
  prepare_point(model, r, ws);
  Eigen::Matrix<double, 3, Eigen::Dynamic> out(3, model.n_b);
  basis_matrix_into(model, ws, out);
  return out;
}

Eigen::Vector3d evaluate_model(const BasisFieldModel& model,
                               const Eigen::Vector3d& r) {
  BasisWorkspace ws;
  prepare_point(model, r, ws);
  return model_field(model, ws);
}

FitResult fit_weights(const BasisFieldModel& model,
                      std::span<const FieldSample> samples, double noise_std) {
  if (samples.empty())
    throw std::invalid_argument("fit_weights: no samples");
  if (!(noise_std > 0.0))
    throw std::invalid_argument("fit_weights: noise_std must be positive");

  const int n_b = model.n_b;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n_b, n_b);
  H.diagonal() = model.prior_std.array().square().inverse();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_b);

  const double inv_sigma = 1.0 / noise_std;
  constexpr int kChunk = 256;  // points per rank update
  Eigen::MatrixXd At(n_b, 3 * kChunk);  // whitened basis rows, transposed
  Eigen::VectorXd yw(3 * kChunk);
  Eigen::Matrix<double, 3, Eigen::Dynamic> Phi(3, n_b);
  BasisWorkspace ws;
  size_t idx = 0;
  while (idx < samples.size()) {
    const int np = static_cast<int>(
        std::min<size_t>(kChunk, samples.size() - idx));
    for (int p = 0; p < np; ++p) {
      const FieldSample& s = samples[idx + p];
      if (!model.domain.contains(s.position, kDomainTol)) {
        char buf[96];
        std::snprintf(buf, sizeof(buf),
                      "fit_weights: sample %zu lies outside the model domain",
                      idx + p);
        throw std::invalid_argument(buf);
      }
      prepare_point(model, s.position, ws);
      basis_matrix_into(model, ws, Phi);
      At.middleCols(3 * p, 3) = inv_sigma * Phi.transpose();
      yw.segment<3>(3 * p) = inv_sigma * s.value;
    }
    auto Ablk = At.leftCols(3 * np);
    H.selfadjointView<Eigen::Lower>().rankUpdate(Ablk, 1.0);
    rhs.noalias() += Ablk * yw.head(3 * np);
    idx += np;
  }

  Eigen::MatrixXd Hfull = H.selfadjointView<Eigen::Lower>();
  Eigen::LLT<Eigen::MatrixXd> llt(Hfull);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("fit_weights: information matrix not positive definite");
  FitResult out;
  out.theta = llt.solve(rhs);
  out.info_chol = llt.matrixL();
  return out;
}

std::vector<ResolutionRow> resolution_study(const GroundTruthField& reference,
                                            const Box& footprint,
                                            const std::vector<int>& counts,
                                            double grid_step,
                                            const ResolutionOptions& opts) {
  if (counts.empty())
    throw std::invalid_argument("resolution_study: empty count list");
  for (int c : counts)
    if (c < 3)
      throw std::invalid_argument("resolution_study: counts must be >= 3");
  if (!(grid_step > 0.0))
    throw std::invalid_argument("resolution_study: grid_step must be positive");
  if ((footprint.extent().array() < 0.0).any())
    throw std::invalid_argument("resolution_study: inverted footprint box");

  // Regular grid, centered per axis; an axis shorter than the step (e.g. the
  // z extent of a planar sweep) collapses to its midpoint.
  const Eigen::Vector3d L = footprint.extent();
  std::array<std::vector<double>, 3> axes;
  for (int d = 0; d < 3; ++d) {
    int n = std::max(1, static_cast<int>(std::floor(L(d) / grid_step)));
    double start = footprint.lo(d) + 0.5 * (L(d) - (n - 1) * grid_step);
    for (int i = 0; i < n; ++i) axes[d].push_back(start + i * grid_step);
  }
  std::vector<FieldSample> samples;
  for (double x : axes[0])
    for (double y : axes[1])
      for (double z : axes[2])
        samples.push_back(
            {Eigen::Vector3d{x, y, z},
             evaluate_field(reference, Eigen::Vector3d{x, y, z})});

  Box domain{footprint.lo - opts.domain_pad, footprint.hi + opts.domain_pad};
  const double area = footprint.footprint_area();

  std::vector<ResolutionRow> rows;
  rows.reserve(counts.size());
  for (int n_b : counts) {
    BasisFieldModel model =
        build_basis(domain, n_b, opts.lengthscale, opts.signal_std);
    model.theta = fit_weights(model, samples, opts.fit_noise_std).theta;
    double sq_sum = 0.0;
    BasisWorkspace ws;
    for (const FieldSample& s : samples) {
      prepare_point(model, s.position, ws);
      sq_sum += (model_field(model, ws) - s.value).squaredNorm();
    }
    const double rmse =
        std::sqrt(sq_sum / (3.0 * static_cast<double>(samples.size())));
    rows.push_back({n_b, static_cast<double>(n_b) / area, rmse});
  }
  return rows;
}

void write_model(std::ostream& os, const BasisFieldModel& model) {
  char buf[256];
  os << "magnav-basis v1\n";
  std::snprintf(buf, sizeof(buf),
                "domain %.17g %.17g %.17g %.17g %.17g %.17g\n",
                model.domain.lo.x(), model.domain.lo.y(), model.domain.lo.z(),
                model.domain.hi.x(), model.domain.hi.y(), model.domain.hi.z());
  os << buf;
  os << "n_b " << model.n_b << "\n";
  std::snprintf(buf, sizeof(buf), "lengthscale %.17g\n", model.lengthscale);
  os << buf;
  std::snprintf(buf, sizeof(buf), "signal_std %.17g\n", model.signal_std);
  os << buf;
  for (int i = 0; i < model.theta.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "w %.17g\n", model.theta(i));
    os << buf;
  }
}

BasisFieldModel read_model(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "magnav-basis v1")
    throw std::runtime_error("read_model: bad or missing header line");

  Box domain;
  int n_b = -1;
  double lengthscale = 0.0, signal_std = 0.0;
  auto expect = [&](const std::string& key) {
    if (!std::getline(is, line))
      throw std::runtime_error("read_model: truncated file at '" + key + "'");
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag != key)
      throw std::runtime_error("read_model: expected '" + key + "', got '" +
                               tag + "'");
    return ss;
  };
  {
    auto ss = expect("domain");
    ss >> domain.lo.x() >> domain.lo.y() >> domain.lo.z() >> domain.hi.x() >>
        domain.hi.y() >> domain.hi.z();
    if (ss.fail()) throw std::runtime_error("read_model: malformed domain line");
  }
  {
    auto ss = expect("n_b");
    ss >> n_b;
    if (ss.fail()) throw std::runtime_error("read_model: malformed n_b line");
  }
  {
    auto ss = expect("lengthscale");
    ss >> lengthscale;
    if (ss.fail())
      throw std::runtime_error("read_model: malformed lengthscale line");
  }
  {
    auto ss = expect("signal_std");
    ss >> signal_std;
    if (ss.fail())
      throw std::runtime_error("read_model: malformed signal_std line");
  }
  BasisFieldModel model = build_basis(domain, n_b, lengthscale, signal_std);
  for (int i = 0; i < n_b; ++i) {
    auto ss = expect("w");
    ss >> model.theta(i);
    if (ss.fail())
      throw std::runtime_error("read_model: malformed weight line");
  }
  return model;
}

}  // namespace magnav

// Reduced-rank curl-free magnetic field model on an axis-aligned box.
//
// The field is the gradient of a scalar potential expanded in
//   - 3 linear potential terms (x, y, z), i.e. constant vector fields, and
//   - products of sinusoids vanishing on the box boundary (Dirichlet
//     Laplacian eigenfunctions), ordered by increasing eigenvalue.
// Every basis column is a gradient, so any weight vector yields a curl-free
// field. Weight priors for the sinusoid terms follow the squared-exponential
// kernel spectral density evaluated at the mode frequency; the linear terms
// get a wide prior so the homogeneous Earth-field component is unconstrained
// in practice.
#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "magnav/box.hpp"
#include "magnav/dipole_field.hpp"

namespace magnav {

struct BasisFieldModel {
  Box domain;
  int n_b = 0;
  int linear_count = 3;
  double lengthscale = 0.3;  ///< m
  double signal_std = 5.0;   ///< uT (marginal field std per axis)

  std::vector<Eigen::Vector3i> modes;  ///< sinusoid index triples, n_b - 3
  Eigen::VectorXd prior_std;           ///< per-weight prior std, n_b
  Eigen::VectorXd theta;               ///< weights, n_b

  /// sqrt(8 / volume): L2 normalization of the sinusoid potentials.
  double norm_const = 0.0;
  Eigen::Vector3i max_mode{0, 0, 0};
};

/// Reusable per-point sin/cos tables; lets hot loops evaluate the basis
/// without allocation. One workspace per thread.
struct BasisWorkspace {
  Eigen::VectorXd sin_t[3], cos_t[3];
};

BasisFieldModel build_basis(const Box& domain, int n_b, double lengthscale,
                            double signal_std);

/// Fills the workspace tables for query point r (must lie in the closed
/// domain; throws std::domain_error otherwise).
void prepare_point(const BasisFieldModel& model, const Eigen::Vector3d& r,
                   BasisWorkspace& ws);

/// Same, but without the domain check: the sinusoid basis continues
/// analytically outside the box. Used by iterative solvers whose
/// intermediate iterates may briefly leave the mapped region.
void prepare_point_unchecked(const BasisFieldModel& model,
                             const Eigen::Vector3d& r, BasisWorkspace& ws);

/// Writes the 3 x n_b basis matrix for the prepared point into `out`.
void basis_matrix_into(const BasisFieldModel& model, const BasisWorkspace& ws,
                       Eigen::Ref<Eigen::Matrix<double, 3, Eigen::Dynamic>> out);

/// Field of the prepared point: Phi(r) * theta, uT. The two-argument forms
/// use the model's stored weights; the three-argument forms take an external
/// weight vector (solver iterates).
Eigen::Vector3d model_field(const BasisFieldModel& model,
                            const BasisWorkspace& ws);
Eigen::Vector3d model_field(const BasisFieldModel& model,
                            const BasisWorkspace& ws,
                            const Eigen::Ref<const Eigen::VectorXd>& theta);

/// Spatial derivative of the model field at the prepared point, uT/m.
Eigen::Matrix3d model_field_jacobian(const BasisFieldModel& model,
                                     const BasisWorkspace& ws);
Eigen::Matrix3d model_field_jacobian(
    const BasisFieldModel& model, const BasisWorkspace& ws,
    const Eigen::Ref<const Eigen::VectorXd>& theta);

/// Allocating conveniences.
Eigen::Matrix<double, 3, Eigen::Dynamic> evaluate_basis(
    const BasisFieldModel& model, const Eigen::Vector3d& r);
Eigen::Vector3d evaluate_model(const BasisFieldModel& model,
                               const Eigen::Vector3d& r);

struct FieldSample {
  Eigen::Vector3d position;  ///< m
  Eigen::Vector3d value;     ///< uT
};

struct FitResult {
  Eigen::VectorXd theta;
  /// Lower Cholesky factor L of the posterior information matrix
  /// (Phi' Phi / noise^2 + prior^-1); posterior covariance is (L L')^-1.
  Eigen::MatrixXd info_chol;
};

/// Gaussian linear regression of the weights: prior N(0, diag(prior_std^2)),
/// i.i.d. isotropic measurement noise. O(samples * n_b^2).
FitResult fit_weights(const BasisFieldModel& model,
                      std::span<const FieldSample> samples, double noise_std);

struct ResolutionRow {
  int n_b;
  double density_per_m2;
  double rmse_uT;
};

struct ResolutionOptions {
  double lengthscale = 0.3;
  double signal_std = 5.0;
  double fit_noise_std = 0.01;  ///< near-noiseless fit regularizer, uT
  /// Basis domain = footprint padded by this much per axis (>= 2x the
  /// lengthscale) so the Dirichlet boundary, where tangential model
  /// components vanish, stays clear of the sampled region.
  Eigen::Vector3d domain_pad{0.6, 0.6, 0.6};
};

/// Samples `reference` on a regular grid over `footprint`, fits a model per
/// entry of `counts`, and reports the per-component RMSE on the same grid.
std::vector<ResolutionRow> resolution_study(const GroundTruthField& reference,
                                            const Box& footprint,
                                            const std::vector<int>& counts,
                                            double grid_step,
                                            const ResolutionOptions& opts = {});

// Serialization: plain-text header plus CSV weight vector. Numeric fields
// use round-trip formatting, so read(write(m)) reproduces the model bit for
// bit.
void write_model(std::ostream& os, const BasisFieldModel& model);
BasisFieldModel read_model(std::istream& is);

}  // namespace magnav

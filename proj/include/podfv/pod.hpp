#pragma once

#include "podfv/fields.hpp"
#include "podfv/hfsolver.hpp"
#include "podfv/mesh.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace podfv {

/// Snapshots from one or more runs, concatenated column-wise. Every column
/// keeps the inlet value of the run it came from.
struct PooledSnapshots {
  Eigen::MatrixXd U;
  Eigen::MatrixXd P;
  Eigen::MatrixXd F;
  std::vector<double> times;
  std::vector<double> u_D;  // per column
  std::vector<int> run;     // per column, index into run_u_in
  std::vector<double> run_u_in;
  std::uint64_t mesh_hash = 0;

  Index count() const { return static_cast<Index>(u_D.size()); }
  static PooledSnapshots pool(std::span<const SnapshotSet> sets);
};

/// Divergence-free lifting field carrying the inhomogeneous inlet condition.
struct Lifting {
  VectorField phi_c;
  FaceField F_c;
  Index reference_face = -1;
  double reference_value = 0.0;  // u_{m,r}
};

struct SpectralDecomposition {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // matching columns
};

struct PodOptions {
  int n_u = 7;
  int n_p = 7;
  std::optional<Index> reference_face;  // default: inlet face nearest the inlet centreline
  bool lifting_flux_from_snapshots = true;
};

/// Velocity, flux and pressure modes with the lifting pair and mean pressure.
struct PodBasis {
  Eigen::MatrixXd phi;  // 2 N_h x N_u, flattened velocity modes
  Eigen::MatrixXd psi;  // n_faces x N_u
  Eigen::MatrixXd chi;  // N_h x N_p
  Eigen::VectorXd lambda_u;
  Eigen::VectorXd lambda_p;
  Eigen::MatrixXd Q_u;
  Eigen::MatrixXd Q_p;
  Eigen::VectorXd p_mean;
  Lifting lifting;
  BoundarySpec velocity_mode_bc;
  BoundarySpec pressure_mode_bc;
  BoundarySpec p_mean_bc;
  Index n_snapshots = 0;
  std::uint64_t mesh_hash = 0;

  int n_u() const { return static_cast<int>(phi.cols()); }
  int n_p() const { return static_cast<int>(chi.cols()); }
  VectorField velocity_mode(int i) const;
  ScalarField pressure_mode(int i) const;
  ScalarField mean_pressure() const { return {p_mean, p_mean_bc}; }
  std::uint64_t hash() const;
  /// Same basis restricted to the leading modes.
  PodBasis truncated(int n_u, int n_p) const;
};

/// Volume weights for flattened velocity columns and for scalar columns.
Eigen::VectorXd velocity_weights(const Mesh& mesh);
Eigen::VectorXd scalar_weights(const Mesh& mesh);

/// Inlet face nearest the centre of the inlet patch.
Index default_reference_face(const Mesh& mesh);

/// Field value at a face for a velocity column whose boundary values follow `bc`.
Vec2 face_value(const Mesh& mesh, const Eigen::Ref<const Eigen::VectorXd>& u_column, const BoundarySpec& bc, Index face);

/// phi_c = mean(U) / u_{m,r}. `reference_values` holds each column's velocity
/// at the reference face. With flux snapshots F the lifting flux is their mean
/// scaled the same way, otherwise face_flux(phi_c).
Lifting lifting_function(const Mesh& mesh, const Eigen::MatrixXd& U, std::span<const Vec2> reference_values,
                         Index reference_face, const Eigen::MatrixXd* F = nullptr);

/// U' = U - phi_c u_D^T (also used for flux columns with F_c).
Eigen::MatrixXd homogenize(const Eigen::MatrixXd& U, std::span<const double> u_D, const Eigen::VectorXd& lift);

/// C_ij = (s_i, s_j) with the given quadrature weights.
Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& S, const Eigen::VectorXd& weights);

/// Sorted eigen-decomposition of a symmetric matrix: descending eigenvalues,
/// ties kept in solver order, each eigenvector's largest-magnitude entry
/// positive, tiny negative eigenvalues clamped to zero.
SpectralDecomposition eig_spectrum(const Eigen::MatrixXd& C);

/// Number of eigenvalues above the relative cut 1e-12 * lambda_1.
int usable_mode_count(const Eigen::VectorXd& lambda);

/// phi_i = S Q_i / sqrt(lambda_i) for the first n modes.
Eigen::MatrixXd velocity_modes(const Eigen::MatrixXd& S, const Eigen::VectorXd& lambda, const Eigen::MatrixXd& Q, int n);
/// Same formula applied to flux snapshots with the velocity eigenpairs.
Eigen::MatrixXd flux_modes(const Eigen::MatrixXd& F, const Eigen::VectorXd& lambda, const Eigen::MatrixXd& Q, int n);

struct PressureModes {
  Eigen::VectorXd mean;
  Eigen::MatrixXd chi;
  Eigen::VectorXd lambda;
  Eigen::MatrixXd Q;
};
PressureModes pressure_modes(const Mesh& mesh, const Eigen::MatrixXd& P, int n_p);

/// sum_{i<n} lambda_i / sum lambda_i.
double cumulative_energy(const Eigen::VectorXd& lambda, int n);

/// Lifting, homogenisation and POD of velocity, flux and pressure snapshots.
PodBasis build_basis(const Mesh& mesh, const PooledSnapshots& snapshots, const PodOptions& options);

}  // namespace podfv

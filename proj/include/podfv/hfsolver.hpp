#pragma once

#include "podfv/fields.hpp"
#include "podfv/fvops.hpp"
#include "podfv/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace podfv {

enum class PressurePreconditioner { Jacobi, ReferenceCholesky };

struct CaseConfig {
  double nu = 0.01;               // kinematic viscosity
  double rho = 1.0;               // only used to report dimensional forces
  double u_in = 1.0;              // inlet velocity magnitude (the parameter)
  double dt = 0.02;
  double t_end = 10.0;
  int piso_correctors = 2;
  int outer_correctors = 1;
  int snapshot_stride = 0;        // 0 = derive from the online shedding-period estimate
  int n_snapshots = 120;
  double window_periods = 1.5;
  double body_diameter = 1.0;
  double linear_fraction = 0.8;   // convection: linear/upwind blend factor
  double pressure_tol = 1e-8;
  double momentum_tol = 1e-7;
  int max_linear_iterations = 2000;
  PressurePreconditioner preconditioner = PressurePreconditioner::ReferenceCholesky;
  std::optional<double> inlet_pressure;  // fixed-pressure inlet with zero-gradient velocity
  std::string body_patch = "cylinder";

  void validate() const;
  double reynolds() const { return u_in * body_diameter / nu; }
};

struct FlowState {
  VectorField u;
  ScalarField p;
  FaceField F;
  double t = 0.0;
};

/// Column-wise snapshot matrices; velocity columns are [u_x..., u_y...].
struct SnapshotSet {
  Eigen::MatrixXd U;
  Eigen::MatrixXd P;
  Eigen::MatrixXd F;
  std::vector<double> times;
  double u_in = 0.0;
  double nu = 0.0;
  std::uint64_t mesh_hash = 0;

  Index count() const { return static_cast<Index>(times.size()); }
  void validate() const;
};

struct ForceHistory {
  std::vector<double> t;
  std::vector<double> drag;
  std::vector<double> lift;
};

struct ForceCoefficients {
  double drag = 0.0;
  double lift = 0.0;
};

/// Lower-diagonal-upper storage of a momentum matrix, shared by both velocity
/// components. `upper[f]` is the owner row coefficient on the neighbour,
/// `lower[f]` the neighbour row coefficient on the owner.
struct MomentumSystem {
  Eigen::VectorXd diag;
  Eigen::VectorXd upper;
  Eigen::VectorXd lower;
  CellVectors source;  // without the pressure gradient
};

struct Prediction {
  MomentumSystem system;
  VectorField u;
};

struct StepStats {
  int momentum_iterations = 0;
  int pressure_iterations = 0;
  double pressure_residual = 0.0;
  double max_divergence = 0.0;  // max |div F| per cell after the last corrector
};

class FlowSolver {
public:
  FlowSolver(const Mesh& mesh, CaseConfig config);

  const Mesh& mesh() const { return mesh_; }
  const CaseConfig& config() const { return config_; }
  const BoundarySpec& velocity_bc() const { return u_bc_; }
  const BoundarySpec& pressure_bc() const { return p_bc_; }

  /// Fluid at rest with the inlet condition switched on.
  FlowState initial_state() const;

  /// Implicit backward-Euler momentum solve with the current pressure
  /// gradient as a source and convection linearised about iterate.F.
  Prediction momentum_predict(const FlowState& old, const FlowState& iterate);

  /// One pressure correction: Poisson solve, conservative face fluxes and
  /// corrected cell velocities. Returns the corrected state at old.t + dt.
  FlowState pressure_correct(const FlowState& old, const MomentumSystem& system, const VectorField& u,
                             const ScalarField& p_guess);

  FlowState step(const FlowState& state);

  const StepStats& last_stats() const { return stats_; }
  /// Scale used for the per-cell divergence tolerance.
  double divergence_scale() const;

private:
  MomentumSystem assemble_momentum(const FlowState& old, const FlowState& iterate) const;
  CellVectors apply_offdiag(const MomentumSystem& m, const CellVectors& u) const;
  void solve_pressure(const Eigen::VectorXd& coeff_internal, const Eigen::VectorXd& coeff_boundary,
                      const Eigen::VectorXd& rhs, Eigen::VectorXd& p);

  const Mesh& mesh_;
  CaseConfig config_;
  BoundarySpec u_bc_;
  BoundarySpec p_bc_;
  std::unique_ptr<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>> reference_factor_;
  StepStats stats_;
};

ForceCoefficients force_coefficients(const Mesh& mesh, const VectorField& u, const ScalarField& p,
                                     const CaseConfig& config, Index patch);
inline ForceCoefficients force_coefficients(const Mesh& mesh, const FlowState& s, const CaseConfig& config,
                                            Index patch) {
  return force_coefficients(mesh, s.u, s.p, config, patch);
}

struct RunResult {
  SnapshotSet snapshots;
  ForceHistory forces;
  FlowState final_state;
  int snapshot_stride = 0;
  double period_estimate = 0.0;  // 0 when no shedding period was detected
  double wall_seconds = 0.0;
};

/// Integrates to t_end from rest (or from `initial`, whose boundary conditions
/// are replaced by the case ones), records force coefficients every step and
/// the last n_snapshots snapshots at the snapshot stride.
RunResult run_case(const Mesh& mesh, const CaseConfig& config, const FlowState* initial = nullptr);

}  // namespace podfv

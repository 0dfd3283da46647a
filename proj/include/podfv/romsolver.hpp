#pragma once

#include "podfv/error.hpp"
#include "podfv/fields.hpp"
#include "podfv/pod.hpp"
#include "podfv/romassembly.hpp"

#include <Eigen/Core>

#include <cmath>
#include <string>
#include <vector>

namespace podfv {

struct NewtonOptions {
  double tol_abs = 1e-10;
  double tol_rel = 1e-8;
  int max_iter = 25;
};

struct RomRunConfig {
  double dt = 0.02;
  double t_end = 1.0;
  NewtonOptions newton;
  double u_D = 1.0;
  double nu = 0.01;

  void validate() const;
};

struct ReducedState {
  Eigen::VectorXd a;
  Eigen::VectorXd b;
  double t = 0.0;
};

struct Residual {
  Eigen::VectorXd r_a;
  Eigen::VectorXd r_b;

  double norm() const { return std::sqrt(r_a.squaredNorm() + r_b.squaredNorm()); }
};

/// Backward-Euler residual of the coupled system at the candidate next state.
Residual residual(const ReducedState& next, const ReducedState& now, const ReducedSystem& system, double dt);

/// d(r_a, r_b)/d(a+, b+), block layout [[aa, ab], [ba, bb]].
Eigen::MatrixXd jacobian(const ReducedState& next, const ReducedSystem& system, double dt);

/// Right-hand side of the algebraic pressure equation, D b = pressure_rhs(a).
Eigen::VectorXd pressure_rhs(const Eigen::VectorXd& a, const ReducedSystem& system);

struct NewtonTrace {
  std::vector<double> residual_norms;  // entry 0 is the initial guess
  int iterations = 0;
};

/// One time step, Newton on the monolithic (a, b) system starting from `state`.
ReducedState newton_step_solve(const ReducedState& state, const ReducedSystem& system, const RomRunConfig& config,
                               NewtonTrace* trace = nullptr);

struct RomTrajectory {
  std::vector<ReducedState> states;  // includes the initial state
  double wall_seconds = 0.0;
  long newton_iterations = 0;
};

/// Raised when a step fails; carries the states accepted so far.
class IntegrationFailure : public SolverFailure {
public:
  IntegrationFailure(const std::string& what, RomTrajectory partial)
      : SolverFailure(what), partial_(std::move(partial)) {}
  const RomTrajectory& partial() const { return partial_; }

private:
  RomTrajectory partial_;
};

RomTrajectory integrate(const ReducedState& initial, const ReducedSystem& system, const RomRunConfig& config);

/// a_i = (phi_i, u0 - u_D phi_c), b from the pressure equation. The state time is t0.
ReducedState initialize(const Mesh& mesh, const PodBasis& basis, const ReducedSystem& system,
                        const Eigen::VectorXd& u0_flat, double t0 = 0.0);

struct ReconstructedFields {
  VectorField u;
  ScalarField p;
  FaceField F;
};

/// u = u_D phi_c + Phi a, p = p_mean + Chi b, F = u_D F_c + Psi a.
ReconstructedFields reconstruct(const ReducedState& state, const PodBasis& basis, double u_D);
std::vector<ReconstructedFields> reconstruct(const std::vector<ReducedState>& states, const PodBasis& basis,
                                             double u_D);

}  // namespace podfv

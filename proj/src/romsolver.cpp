#include "podfv/romsolver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <chrono>
#include <cmath>
#include <sstream>

namespace podfv {

namespace {

void check_state(const ReducedState& s, const ReducedSystem& system) {
  if (s.a.size() != system.n_u() || s.b.size() != system.n_p())
    throw DimensionMismatch("reduced state (" + std::to_string(s.a.size()) + "," + std::to_string(s.b.size()) +
                            ") does not match system (" + std::to_string(system.n_u()) + "," +
                            std::to_string(system.n_p()) + ")");
}

std::string trace_text(const std::vector<double>& norms) {
  std::ostringstream os;
  os.precision(3);
  for (std::size_t i = 0; i < norms.size(); ++i) os << (i ? " " : "") << norms[i];
  return os.str();
}

}  // namespace

void RomRunConfig::validate() const {
  if (!(dt > 0)) throw InvalidArgument("ROM dt must be positive");
  if (!(newton.tol_abs > 0) || !(newton.tol_rel > 0)) throw InvalidArgument("Newton tolerances must be positive");
  if (newton.max_iter < 1) throw InvalidArgument("Newton needs at least one iteration");
  if (!(nu >= 0)) throw InvalidArgument("viscosity must be non-negative");
}

Eigen::VectorXd pressure_rhs(const Eigen::VectorXd& a, const ReducedSystem& s) {
  return -s.blocks.E + s.E_BC + s.F_BC * a + contract(s.blocks.G, a);
}

Residual residual(const ReducedState& next, const ReducedState& now, const ReducedSystem& s, double dt) {
  check_state(next, s);
  check_state(now, s);
  const auto& k = s.blocks;
  Residual r;
  const Eigen::VectorXd rhs =
      s.A_BC - k.K0 + (s.nu * k.B + s.B_BC) * next.a - contract(k.C, next.a) - k.K * next.b;
  r.r_a = next.a - now.a - dt * rhs;
  r.r_b = k.D * next.b - pressure_rhs(next.a, s);
  return r;
}

Eigen::MatrixXd jacobian(const ReducedState& next, const ReducedSystem& s, double dt) {
  check_state(next, s);
  const auto& k = s.blocks;
  const int nu = s.n_u(), np = s.n_p();
  Eigen::MatrixXd J(nu + np, nu + np);
  J.topLeftCorner(nu, nu) = Eigen::MatrixXd::Identity(nu, nu) - dt * (s.nu * k.B + s.B_BC - contract_jacobian(k.C, next.a));
  J.topRightCorner(nu, np) = dt * k.K;
  J.bottomLeftCorner(np, nu) = -(s.F_BC + contract_jacobian(k.G, next.a));
  J.bottomRightCorner(np, np) = k.D;
  return J;
}

ReducedState newton_step_solve(const ReducedState& state, const ReducedSystem& s, const RomRunConfig& config,
                               NewtonTrace* trace) {
  const int nu = s.n_u(), np = s.n_p();
  ReducedState next = state;
  next.t = state.t + config.dt;
  std::vector<double> norms;
  Residual r = residual(next, state, s, config.dt);
  const double r0 = r.norm();
  norms.push_back(r0);
  const double target = config.newton.tol_abs + config.newton.tol_rel * r0;
  int it = 0;
  while (norms.back() > target) {
    if (it == config.newton.max_iter)
      throw SolverFailure("Newton did not converge at t=" + std::to_string(next.t) + " after " + std::to_string(it) +
                          " iterations; residual trace: " + trace_text(norms));
    Eigen::VectorXd rv(nu + np);
    rv << r.r_a, r.r_b;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(jacobian(next, s, config.dt));
    if (!(lu.rcond() > 1e-15))
      throw SolverFailure("singular Newton Jacobian at t=" + std::to_string(next.t) +
                          " (rcond " + std::to_string(lu.rcond()) + ")");
    const Eigen::VectorXd dx = lu.solve(rv);
    next.a -= dx.head(nu);
    next.b -= dx.tail(np);
    ++it;
    r = residual(next, state, s, config.dt);
    const double n = r.norm();
    if (!std::isfinite(n))
      throw SolverFailure("Newton produced a non-finite residual at t=" + std::to_string(next.t) +
                          "; residual trace: " + trace_text(norms));
    norms.push_back(n);
  }
  if (trace) {
    trace->residual_norms = std::move(norms);
    trace->iterations = it;
  }
  return next;
}

RomTrajectory integrate(const ReducedState& initial, const ReducedSystem& s, const RomRunConfig& config) {
  config.validate();
  check_state(initial, s);
  if (config.u_D != s.u_D || config.nu != s.nu)
    throw InvalidArgument("run configuration (nu, u_D) differs from the composed system");
  const auto steps = static_cast<long>(std::llround((config.t_end - initial.t) / config.dt));
  RomTrajectory out;
  out.states.reserve(static_cast<std::size_t>(std::max(0L, steps)) + 1);
  out.states.push_back(initial);
  const auto start = std::chrono::steady_clock::now();
  NewtonTrace trace;
  for (long n = 0; n < steps; ++n) {
    try {
      out.states.push_back(newton_step_solve(out.states.back(), s, config, &trace));
    } catch (const SolverFailure& e) {
      out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      throw IntegrationFailure(e.what(), std::move(out));
    }
    out.states.back().t = initial.t + static_cast<double>(n + 1) * config.dt;
    out.newton_iterations += trace.iterations;
  }
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

ReducedState initialize(const Mesh& mesh, const PodBasis& basis, const ReducedSystem& s,
                        const Eigen::VectorXd& u0_flat, double t0) {
  if (u0_flat.size() != basis.phi.rows()) throw DimensionMismatch("initial field does not match the basis");
  if (basis.n_u() != s.n_u() || basis.n_p() != s.n_p()) throw DimensionMismatch("basis and system sizes differ");
  const Eigen::VectorXd w = velocity_weights(mesh);
  ReducedState st;
  st.t = t0;
  st.a = basis.phi.transpose() * w.cwiseProduct(u0_flat - s.u_D * flatten(basis.lifting.phi_c.values));
  st.b = s.n_p() > 0 ? Eigen::VectorXd(s.blocks.D.ldlt().solve(pressure_rhs(st.a, s))) : Eigen::VectorXd();
  return st;
}

ReconstructedFields reconstruct(const ReducedState& state, const PodBasis& basis, double u_D) {
  if (state.a.size() != basis.n_u() || state.b.size() != basis.n_p())
    throw DimensionMismatch("reduced state does not match the basis");
  ReconstructedFields f;
  const Eigen::VectorXd u = u_D * flatten(basis.lifting.phi_c.values) + basis.phi * state.a;
  f.u.values = unflatten(u);
  f.u.bc = basis.lifting.phi_c.bc;
  for (auto& pbc : f.u.bc) pbc.value *= u_D;
  f.p.values = basis.p_mean + basis.chi * state.b;
  f.p.bc = basis.p_mean_bc;
  f.F = u_D * basis.lifting.F_c + basis.psi * state.a;
  return f;
}

std::vector<ReconstructedFields> reconstruct(const std::vector<ReducedState>& states, const PodBasis& basis,
                                             double u_D) {
  std::vector<ReconstructedFields> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(reconstruct(s, basis, u_D));
  return out;
}

}  // namespace podfv

#include "podfv/hfsolver.hpp"

#include "podfv/error.hpp"
#include "podfv/signal.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <sstream>

namespace podfv {

void CaseConfig::validate() const {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (!(t_end > 0.0)) throw InvalidArgument("t_end must be positive");
  if (piso_correctors < 1 || outer_correctors < 1) throw InvalidArgument("corrector counts must be >= 1");
  if (!(body_diameter > 0.0)) throw InvalidArgument("body diameter must be positive");
  if (!(nu >= 0.0)) throw InvalidArgument("viscosity must be non-negative");
  if (linear_fraction < 0.0 || linear_fraction > 1.0) throw InvalidArgument("linear_fraction must lie in [0,1]");
  if (snapshot_stride < 0 || n_snapshots < 1) throw InvalidArgument("invalid snapshot settings");
}

void SnapshotSet::validate() const {
  const Index n = count();
  if (U.cols() != n || P.cols() != n || F.cols() != n)
    throw DimensionMismatch("snapshot matrices disagree on the number of snapshots");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw InvalidArgument("snapshot times must be strictly increasing");
}

FlowSolver::FlowSolver(const Mesh& mesh, CaseConfig config) : mesh_(mesh), config_(std::move(config)) {
  config_.validate();
  u_bc_ = podfv::velocity_bc(mesh_, Vec2(config_.u_in, 0.0));
  p_bc_ = podfv::pressure_bc(mesh_, 0.0);
  if (config_.inlet_pressure) {
    for (Index p : mesh_.patches_of_kind(PatchKind::Inlet)) {
      u_bc_[static_cast<std::size_t>(p)] = PatchBc::zero_gradient();
      p_bc_[static_cast<std::size_t>(p)] = PatchBc::fixed(*config_.inlet_pressure);
    }
  }
  bool has_fixed_pressure = false;
  for (const PatchBc& bc : p_bc_) has_fixed_pressure |= bc.kind == BcKind::FixedValue;
  if (!has_fixed_pressure) throw InvalidArgument("pressure system is singular: no fixed-value pressure patch");

  if (config_.preconditioner == PressurePreconditioner::ReferenceCholesky) {
    // Pressure operator with the time-term-only coefficient rAU = dt.
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(mesh_.n_cells());
    for (Index fi = 0; fi < mesh_.n_faces(); ++fi) {
      const Face& f = mesh_.face(fi);
      const double c = config_.dt * f.delta.norm() / f.d.norm();
      if (f.internal()) {
        diag[f.owner] += c;
        diag[f.neighbour] += c;
        trip.emplace_back(f.owner, f.neighbour, -c);
        trip.emplace_back(f.neighbour, f.owner, -c);
      } else if (p_bc_[static_cast<std::size_t>(f.patch)].kind == BcKind::FixedValue) {
        diag[f.owner] += c;
      }
    }
    for (Index c = 0; c < mesh_.n_cells(); ++c) trip.emplace_back(c, c, diag[c]);
    Eigen::SparseMatrix<double> L(mesh_.n_cells(), mesh_.n_cells());
    L.setFromTriplets(trip.begin(), trip.end());
    reference_factor_ = std::make_unique<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>(L);
    if (reference_factor_->info() != Eigen::Success) throw SolverFailure("pressure preconditioner factorisation failed");
  }
}

FlowState FlowSolver::initial_state() const {
  FlowState s;
  s.u = {CellVectors::Zero(mesh_.n_cells(), 2), u_bc_};
  s.p = {Eigen::VectorXd::Zero(mesh_.n_cells()), p_bc_};
  s.F = face_flux(mesh_, s.u);
  s.t = 0.0;
  return s;
}

double FlowSolver::divergence_scale() const {
  return std::max(std::abs(config_.u_in), 1e-12) * config_.body_diameter / mesh_.min_volume();
}

MomentumSystem FlowSolver::assemble_momentum(const FlowState& old, const FlowState& iterate) const {
  const Index ni = mesh_.n_internal_faces();
  const Eigen::VectorXd& vol = mesh_.cell_volumes();
  const double nu = config_.nu;
  const double beta = config_.linear_fraction;
  MomentumSystem m;
  m.diag = vol / config_.dt;
  m.upper = Eigen::VectorXd::Zero(ni);
  m.lower = Eigen::VectorXd::Zero(ni);
  m.source = old.u.values.array().colwise() * (vol.array() / config_.dt);

  const bool non_orthogonal =
      std::any_of(mesh_.faces().begin(), mesh_.faces().end(), [](const Face& f) { return f.k.squaredNorm() > 0.0; });
  CellVectors gx, gy;
  if (non_orthogonal) {
    gx = gauss_gradient(mesh_, ScalarField{iterate.u.values.col(0), p_bc_});
    gy = gauss_gradient(mesh_, ScalarField{iterate.u.values.col(1), p_bc_});
  }

  for (Index fi = 0; fi < ni; ++fi) {
    const Face& f = mesh_.face(fi);
    const double flux = iterate.F[fi];
    const double up = flux >= 0.0 ? 1.0 : 0.0;
    const double wo = beta * f.weight + (1.0 - beta) * up;
    const double wn = 1.0 - wo;
    const double g = nu * f.delta.norm() / f.d.norm();
    m.diag[f.owner] += flux * wo + g;
    m.upper[fi] += flux * wn - g;
    m.diag[f.neighbour] += -flux * wn + g;
    m.lower[fi] += -flux * wo - g;
    if (non_orthogonal) {
      const Vec2 kx = f.k;
      const Vec2 c(kx.dot((f.weight * gx.row(f.owner) + (1.0 - f.weight) * gx.row(f.neighbour)).transpose()),
                   kx.dot((f.weight * gy.row(f.owner) + (1.0 - f.weight) * gy.row(f.neighbour)).transpose()));
      m.source.row(f.owner) += nu * c.transpose();
      m.source.row(f.neighbour) -= nu * c.transpose();
    }
  }
  for (Index fi = ni; fi < mesh_.n_faces(); ++fi) {
    const Face& f = mesh_.face(fi);
    const PatchBc& bc = u_bc_[static_cast<std::size_t>(f.patch)];
    const double flux = iterate.F[fi];
    const double g = nu * f.delta.norm() / f.d.norm();
    switch (bc.kind) {
      case BcKind::FixedValue:
        m.source.row(f.owner) += ((g - flux) * bc.value).transpose();
        m.diag[f.owner] += g;
        break;
      case BcKind::ZeroGradient:
        m.diag[f.owner] += flux;
        break;
      case BcKind::Slip: {
        // Normal component held at zero through an explicit diffusive flux.
        const Vec2 nrm = f.area / f.area.norm();
        const Vec2 uo = iterate.u.values.row(f.owner).transpose();
        m.source.row(f.owner) -= (g * uo.dot(nrm) * nrm).transpose();
        break;
      }
    }
  }
  return m;
}

CellVectors FlowSolver::apply_offdiag(const MomentumSystem& m, const CellVectors& u) const {
  CellVectors out = CellVectors::Zero(mesh_.n_cells(), 2);
  for (Index fi = 0; fi < mesh_.n_internal_faces(); ++fi) {
    const Face& f = mesh_.face(fi);
    out.row(f.owner) += m.upper[fi] * u.row(f.neighbour);
    out.row(f.neighbour) += m.lower[fi] * u.row(f.owner);
  }
  return out;
}

Prediction FlowSolver::momentum_predict(const FlowState& old, const FlowState& iterate) {
  Prediction pred;
  pred.system = assemble_momentum(old, iterate);
  const MomentumSystem& m = pred.system;
  const CellVectors gradp = gauss_gradient(mesh_, interpolate_limited(mesh_, iterate.p));
  const CellVectors b = m.source - (gradp.array().colwise() * mesh_.cell_volumes().array()).matrix();

  CellVectors u = iterate.u.values;
  const double bnorm = std::max(b.norm(), 1e-300);
  std::vector<double> history;
  int it = 0;
  for (; it < config_.max_linear_iterations; ++it) {
    const CellVectors r = b - (u.array().colwise() * m.diag.array()).matrix() - apply_offdiag(m, u);
    const double rel = r.norm() / bnorm;
    history.push_back(rel);
    if (rel <= config_.momentum_tol || b.norm() == 0.0) break;
    // Gauss-Seidel sweep, both components at once.
    for (Index c = 0; c < mesh_.n_cells(); ++c) {
      Eigen::RowVector2d acc = b.row(c);
      for (const CellFace& cf : mesh_.cell_faces(c)) {
        if (cf.other < 0) continue;
        const double a = cf.sign > 0 ? m.upper[cf.face] : m.lower[cf.face];
        acc -= a * u.row(cf.other);
      }
      u.row(c) = acc / m.diag[c];
    }
  }
  if (it == config_.max_linear_iterations) {
    std::ostringstream msg;
    msg << "momentum solve did not reach tolerance " << config_.momentum_tol << "; residual history:";
    for (std::size_t i = history.size() > 8 ? history.size() - 8 : 0; i < history.size(); ++i) msg << ' ' << history[i];
    throw SolverFailure(msg.str());
  }
  stats_.momentum_iterations = it;
  pred.u = {std::move(u), u_bc_};
  return pred;
}

void FlowSolver::solve_pressure(const Eigen::VectorXd& coeff_internal, const Eigen::VectorXd& coeff_boundary,
                                const Eigen::VectorXd& rhs, Eigen::VectorXd& p) {
  const Index n = mesh_.n_cells();
  const Index ni = mesh_.n_internal_faces();
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  for (Index fi = 0; fi < ni; ++fi) {
    const Face& f = mesh_.face(fi);
    diag[f.owner] += coeff_internal[fi];
    diag[f.neighbour] += coeff_internal[fi];
  }
  for (Index fi = ni; fi < mesh_.n_faces(); ++fi) diag[mesh_.face(fi).owner] += coeff_boundary[fi - ni];

  auto apply = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd y = diag.cwiseProduct(x);
    for (Index fi = 0; fi < ni; ++fi) {
      const Face& f = mesh_.face(fi);
      y[f.owner] -= coeff_internal[fi] * x[f.neighbour];
      y[f.neighbour] -= coeff_internal[fi] * x[f.owner];
    }
    return y;
  };
  auto precondition = [&](const Eigen::VectorXd& r) -> Eigen::VectorXd {
    if (reference_factor_) return reference_factor_->solve(r);
    return r.cwiseQuotient(diag);
  };

  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    p.setZero();
    stats_.pressure_iterations = 0;
    stats_.pressure_residual = 0.0;
    return;
  }
  Eigen::VectorXd r = rhs - apply(p);
  Eigen::VectorXd z = precondition(r);
  Eigen::VectorXd d = z;
  double rz = r.dot(z);
  std::vector<double> history;
  int it = 0;
  double rel = r.norm() / bnorm;
  while (rel > config_.pressure_tol) {
    if (it == config_.max_linear_iterations) {
      std::ostringstream msg;
      msg << "pressure solve did not reach tolerance " << config_.pressure_tol << "; residual history:";
      for (std::size_t i = history.size() > 8 ? history.size() - 8 : 0; i < history.size(); ++i)
        msg << ' ' << history[i];
      throw SolverFailure(msg.str());
    }
    const Eigen::VectorXd Ld = apply(d);
    const double alpha = rz / d.dot(Ld);
    p += alpha * d;
    r -= alpha * Ld;
    rel = r.norm() / bnorm;
    history.push_back(rel);
    ++it;
    z = precondition(r);
    const double rz_new = r.dot(z);
    d = z + (rz_new / rz) * d;
    rz = rz_new;
  }
  stats_.pressure_iterations = it;
  stats_.pressure_residual = rel;
}

FlowState FlowSolver::pressure_correct(const FlowState& old, const MomentumSystem& m, const VectorField& u,
                                       const ScalarField& p_guess) {
  const Index n = mesh_.n_cells();
  const Index ni = mesh_.n_internal_faces();
  const Eigen::VectorXd& vol = mesh_.cell_volumes();

  const CellVectors H = m.source - apply_offdiag(m, u.values);
  const CellVectors HbyA = H.array().colwise() / m.diag.array();
  const Eigen::VectorXd rAU = vol.cwiseQuotient(m.diag);

  FaceField phi(mesh_.n_faces());
  Eigen::VectorXd coeff(ni);
  Eigen::VectorXd coeff_b = Eigen::VectorXd::Zero(mesh_.n_faces() - ni);
  for (Index fi = 0; fi < ni; ++fi) {
    const Face& f = mesh_.face(fi);
    const double rAUf = f.weight * rAU[f.owner] + (1.0 - f.weight) * rAU[f.neighbour];
    const Vec2 hf = (f.weight * HbyA.row(f.owner) + (1.0 - f.weight) * HbyA.row(f.neighbour)).transpose();
    const Vec2 uo = (f.weight * old.u.values.row(f.owner) + (1.0 - f.weight) * old.u.values.row(f.neighbour)).transpose();
    // Transient momentum-interpolation correction against the old conservative flux.
    const double ddt_corr = rAUf / config_.dt * (old.F[fi] - f.area.dot(uo));
    phi[fi] = f.area.dot(hf) + ddt_corr;
    coeff[fi] = rAUf * f.delta.norm() / f.d.norm();
  }
  for (Index fi = ni; fi < mesh_.n_faces(); ++fi) {
    const Face& f = mesh_.face(fi);
    const PatchBc& ub = u_bc_[static_cast<std::size_t>(f.patch)];
    switch (ub.kind) {
      case BcKind::FixedValue: phi[fi] = f.area.dot(ub.value); break;
      case BcKind::ZeroGradient: phi[fi] = f.area.dot(HbyA.row(f.owner).transpose()); break;
      case BcKind::Slip: phi[fi] = 0.0; break;
    }
    if (p_bc_[static_cast<std::size_t>(f.patch)].kind == BcKind::FixedValue)
      coeff_b[fi - ni] = rAU[f.owner] * f.delta.norm() / f.d.norm();
  }

  Eigen::VectorXd rhs = -divergence_of_flux(mesh_, phi).cwiseProduct(vol);
  for (Index fi = ni; fi < mesh_.n_faces(); ++fi) {
    const Face& f = mesh_.face(fi);
    rhs[f.owner] += coeff_b[fi - ni] * p_bc_[static_cast<std::size_t>(f.patch)].value.x();
  }

  FlowState out;
  out.t = old.t + config_.dt;
  Eigen::VectorXd p = p_guess.values;
  solve_pressure(coeff, coeff_b, rhs, p);
  out.p = {std::move(p), p_bc_};

  out.F = phi;
  for (Index fi = 0; fi < ni; ++fi) {
    const Face& f = mesh_.face(fi);
    out.F[fi] -= coeff[fi] * (out.p.values[f.neighbour] - out.p.values[f.owner]);
  }
  for (Index fi = ni; fi < mesh_.n_faces(); ++fi) {
    const Face& f = mesh_.face(fi);
    if (coeff_b[fi - ni] != 0.0)
      out.F[fi] -= coeff_b[fi - ni] * (p_bc_[static_cast<std::size_t>(f.patch)].value.x() - out.p.values[f.owner]);
  }
  const CellVectors gradp = gauss_gradient(mesh_, interpolate_limited(mesh_, out.p));
  out.u = {HbyA - (gradp.array().colwise() * rAU.array()).matrix(), u_bc_};
  stats_.max_divergence = divergence_of_flux(mesh_, out.F).cwiseAbs().maxCoeff();
  (void)n;
  return out;
}

FlowState FlowSolver::step(const FlowState& state) {
  FlowState iterate = state;
  for (int outer = 0; outer < config_.outer_correctors; ++outer) {
    Prediction pred = momentum_predict(state, iterate);
    VectorField u = std::move(pred.u);
    ScalarField p = iterate.p;
    FlowState corrected;
    for (int k = 0; k < config_.piso_correctors; ++k) {
      corrected = pressure_correct(state, pred.system, u, p);
      u = corrected.u;
      p = corrected.p;
    }
    iterate = std::move(corrected);
  }
  const double umax = iterate.u.values.cwiseAbs().maxCoeff();
  if (!std::isfinite(umax) || umax > 1e6 * std::max(std::abs(config_.u_in), 1e-12)) {
    std::ostringstream msg;
    msg << "solution diverged at t=" << iterate.t << " (max |u| = " << umax << ")";
    throw SolverFailure(msg.str());
  }
  return iterate;
}

ForceCoefficients force_coefficients(const Mesh& mesh, const VectorField& u, const ScalarField& p,
                                     const CaseConfig& config, Index patch) {
  const BoundaryPatch& bp = mesh.patch(patch);
  if (bp.faces.empty()) throw InvalidArgument("force patch '" + bp.name + "' has no faces");
  if (config.u_in == 0.0) throw InvalidArgument("force coefficients need a non-zero inlet velocity");
  Vec2 force = Vec2::Zero();
  for (Index fi : bp.faces) {
    const Face& f = mesh.face(fi);
    const Vec2 n = f.area / f.area.norm();
    const Vec2 up = u.values.row(f.owner).transpose();
    const Vec2 ut = up - up.dot(n) * n;
    force += boundary_value(mesh, p, fi) * f.area + config.nu * f.area.norm() * ut / f.d.norm();
  }
  const double scale = 2.0 / (config.u_in * config.u_in * config.body_diameter);
  return {scale * force.x(), scale * force.y()};
}

RunResult run_case(const Mesh& mesh, const CaseConfig& config, const FlowState* initial) {
  const auto start = std::chrono::steady_clock::now();
  FlowSolver solver(mesh, config);
  const Index body = mesh.find_patch(config.body_patch).value_or(-1);
  RunResult result;
  FlowState state = solver.initial_state();
  if (initial) {
    if (initial->u.values.rows() != mesh.n_cells() || initial->p.values.size() != mesh.n_cells() ||
        initial->F.size() != mesh.n_faces())
      throw DimensionMismatch("initial state does not match the mesh");
    state.u.values = initial->u.values;
    state.p.values = initial->p.values;
    state.F = initial->F;
    state.t = initial->t;
  }
  const auto n_steps = static_cast<long>(std::llround((config.t_end - state.t) / config.dt));

  struct Column {
    Eigen::VectorXd u, p, F;
    double t;
  };
  std::deque<Column> ring;
  int stride = config.snapshot_stride;
  long lock_step = 0;
  double period = 0.0;
  const long tail = std::max<long>(50, std::lround(200.0 * config.body_diameter / std::max(config.u_in, 1e-12) / config.dt));

  for (long s = 1; s <= n_steps; ++s) {
    state = solver.step(state);
    const double scale = solver.divergence_scale();
    if (solver.last_stats().max_divergence > 1e-8 * scale) {
      std::ostringstream msg;
      msg << "mass conservation violated at t=" << state.t << ": max |div F| = " << solver.last_stats().max_divergence;
      throw SolverFailure(msg.str());
    }
    result.forces.t.push_back(state.t);
    if (body >= 0) {
      const ForceCoefficients c = force_coefficients(mesh, state, config, body);
      result.forces.drag.push_back(c.drag);
      result.forces.lift.push_back(c.lift);
    } else {
      result.forces.drag.push_back(0.0);
      result.forces.lift.push_back(0.0);
    }

    if (stride == 0 && body >= 0 && s % 25 == 0) {
      const auto& lift = result.forces.lift;
      const long m = std::min<long>(static_cast<long>(lift.size()), tail);
      std::span<const double> recent(lift.data() + lift.size() - static_cast<std::size_t>(m), static_cast<std::size_t>(m));
      const auto [lo, hi] = std::minmax_element(recent.begin(), recent.end());
      if (*hi - *lo > 0.02) {
        if (auto T = zero_crossing_period(recent, config.dt, 4)) {
          period = *T;
          const double remaining = config.t_end - state.t;
          if (remaining <= (config.window_periods + 1.0) * period) {
            stride = std::max(1, static_cast<int>(std::lround(config.window_periods * period /
                                                              (config.n_snapshots * config.dt))));
            lock_step = s;
          }
        }
      }
    }
    if (stride > 0 && (s - lock_step) % stride == 0) {
      ring.push_back({flatten(state.u.values), state.p.values, state.F, state.t});
      if (static_cast<int>(ring.size()) > config.n_snapshots) ring.pop_front();
    }
  }
  if (stride == 0)
    throw SolverFailure("no shedding period detected; cannot choose the snapshot stride automatically");

  SnapshotSet& snaps = result.snapshots;
  const auto ns = static_cast<Index>(ring.size());
  snaps.U.resize(2 * mesh.n_cells(), ns);
  snaps.P.resize(mesh.n_cells(), ns);
  snaps.F.resize(mesh.n_faces(), ns);
  for (Index j = 0; j < ns; ++j) {
    const Column& c = ring[static_cast<std::size_t>(j)];
    snaps.U.col(j) = c.u;
    snaps.P.col(j) = c.p;
    snaps.F.col(j) = c.F;
    snaps.times.push_back(c.t);
  }
  snaps.u_in = config.u_in;
  snaps.nu = config.nu;
  snaps.mesh_hash = mesh.hash();
  result.snapshot_stride = stride;
  if (period == 0.0 && body >= 0 && result.forces.lift.size() > 4) {
    if (auto T = zero_crossing_period(result.forces.lift, config.dt, 4)) period = *T;
  }
  result.period_estimate = period;
  result.final_state = std::move(state);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace podfv

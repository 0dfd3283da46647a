#include "podfv/eval.hpp"

#include "podfv/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace podfv {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << std::setprecision(12);
  return out;
}

const SweepEntry* find_size(const EvalReport& r, int n) {
  for (const auto& e : r.sweep)
    if (e.n == n && !e.failed) return &e;
  return nullptr;
}

}  // namespace

ForceHistory rom_forces(const Mesh& mesh, const PodBasis& basis, std::span<const ReducedState> states,
                        const CaseConfig& config, Index body_patch) {
  ForceHistory h;
  h.t.reserve(states.size());
  h.drag.reserve(states.size());
  h.lift.reserve(states.size());
  for (const ReducedState& s : states) {
    const ReconstructedFields f = reconstruct(s, basis, config.u_in);
    const ForceCoefficients c = force_coefficients(mesh, f.u, f.p, config, body_patch);
    h.t.push_back(s.t);
    h.drag.push_back(c.drag);
    h.lift.push_back(c.lift);
  }
  return h;
}

ForceHistory time_window(const ForceHistory& h, double t0, double t1) {
  const double eps = 1e-9 * std::max({1.0, std::abs(t0), std::abs(t1)});
  ForceHistory w;
  for (std::size_t i = 0; i < h.t.size(); ++i) {
    if (h.t[i] < t0 - eps || h.t[i] > t1 + eps) continue;
    w.t.push_back(h.t[i]);
    w.drag.push_back(h.drag[i]);
    w.lift.push_back(h.lift[i]);
  }
  return w;
}

SignalPair pair_signals(const ForceHistory& hf, const ForceHistory& rom, bool lift) {
  SignalPair p;
  p.times = hf.t;
  p.hf = lift ? hf.lift : hf.drag;
  p.rom = resample_linear(rom.t, lift ? rom.lift : rom.drag, hf.t);
  p.validate();
  return p;
}

double training_coefficient_bound(const Mesh& mesh, const PodBasis& basis, const SnapshotSet& snapshots,
                                  double u_D) {
  const Eigen::VectorXd w = velocity_weights(mesh);
  const Eigen::MatrixXd U0 = snapshots.U.colwise() - u_D * flatten(basis.lifting.phi_c.values);
  const Eigen::MatrixXd A = basis.phi.transpose() * (w.asDiagonal() * U0);
  return A.size() ? A.cwiseAbs().maxCoeff() : 0.0;
}

RomTrajectory run_rom(const Mesh& mesh, const PodBasis& basis, const ReducedSystem& system, const RomRunConfig& rom,
                      const Eigen::VectorXd& u0, double t0, double t_end) {
  RomRunConfig rc = rom;
  rc.t_end = t_end;
  rc.u_D = system.u_D;
  rc.nu = system.nu;
  return integrate(initialize(mesh, basis, system, u0, t0), system, rc);
}

EvalReport mode_sweep_report(const SweepCase& c, std::span<const int> sizes) {
  if (!c.mesh || !c.basis || !c.blocks || !c.snapshots || !c.hf_forces)
    throw InvalidArgument("sweep case is incomplete");
  const Mesh& mesh = *c.mesh;
  const SnapshotSet& snaps = *c.snapshots;
  if (snaps.count() < 2) throw InvalidArgument("sweep needs a training window of at least two snapshots");
  const Index body = mesh.patch_id(c.config.body_patch);
  const double t0 = snaps.times.front(), t1 = snaps.times.back();
  const ForceHistory hf = time_window(*c.hf_forces, t0, t1);
  if (hf.t.size() < 2) throw InvalidArgument("HF force history does not cover the training window");

  EvalReport report;
  for (int n : sizes) {
    SweepEntry e;
    e.n = n;
    const PodBasis b = c.basis->truncated(n, n);
    e.energy_u = cumulative_energy(c.basis->lambda_u, n);
    e.energy_p = cumulative_energy(c.basis->lambda_p, n);
    const ReducedSystem sys = compose_system(c.blocks->truncated(n, n), c.config.nu, c.config.u_in);
    try {
      const RomTrajectory tr = run_rom(mesh, b, sys, c.rom, snaps.U.col(0), t0, t1);
      e.rom_seconds = tr.wall_seconds;
      e.forces = rom_forces(mesh, b, tr.states, c.config, body);
      e.eps_lift = wape(pair_signals(hf, e.forces, true));
      e.eps_drag = wape_shifted_drag(pair_signals(hf, e.forces, false));
    } catch (const SolverFailure& err) {
      e.failed = true;
      e.failure = err.what();
    }
    report.sweep.push_back(std::move(e));
  }

  const SweepEntry* lo = find_size(report, 3);
  const SweepEntry* hi = find_size(report, 7);
  if ((!lo || !hi) && !report.sweep.empty()) {
    lo = &report.sweep.front();
    hi = &report.sweep.back();
  }
  if (lo && hi) {
    report.trend_low = lo->n;
    report.trend_high = hi->n;
  }
  report.improves_with_modes = lo && hi && !lo->failed && !hi->failed && hi->eps_lift < lo->eps_lift &&
                               hi->eps_drag < lo->eps_drag;
  return report;
}

FrequencyEntry compare_frequencies(std::span<const double> hf_lift, std::span<const double> rom_lift, double dt,
                                   double u_in, double nu, double diameter, bool trained) {
  FrequencyEntry e;
  e.u_in = u_in;
  e.reynolds = u_in * diameter / nu;
  e.trained = trained;
  e.f_hf = psd_peak_frequency(hf_lift, dt);
  e.f_rom = psd_peak_frequency(rom_lift, dt);
  e.st_hf = strouhal(e.f_hf, u_in, diameter);
  e.st_rom = strouhal(e.f_rom, u_in, diameter);
  e.resolution = 1.0 / (static_cast<double>(std::min(hf_lift.size(), rom_lift.size())) * dt);
  return e;
}

void write_sweep_csv(const fs::path& path, const EvalReport& r) {
  auto out = open_out(path);
  out << "N,energy_u,energy_p,eps_Lc,eps_Dc,status\n";
  for (const auto& e : r.sweep)
    out << e.n << ',' << e.energy_u << ',' << e.energy_p << ',' << e.eps_lift << ',' << e.eps_drag << ','
        << (e.failed ? "failed" : "ok") << '\n';
}

void write_frequency_csv(const fs::path& path, const EvalReport& r) {
  auto out = open_out(path);
  out << "u_in,Re,trained,f_hf,f_rom,St_hf,St_rom,bin,rel_error\n";
  for (const auto& e : r.frequencies)
    out << e.u_in << ',' << e.reynolds << ',' << (e.trained ? 1 : 0) << ',' << e.f_hf << ',' << e.f_rom << ','
        << e.st_hf << ',' << e.st_rom << ',' << e.resolution << ',' << e.relative_error() << '\n';
}

void write_plot_data(const fs::path& dir, const EvalReport& r, const ForceHistory* hf_window) {
  fs::create_directories(dir);
  {
    auto lift = open_out(dir / "eps_lift_vs_N.dat");
    auto drag = open_out(dir / "eps_drag_vs_N.dat");
    for (const auto& e : r.sweep) {
      if (e.failed) continue;
      lift << e.n << ' ' << e.eps_lift << '\n';
      drag << e.n << ' ' << e.eps_drag << '\n';
    }
  }
  for (const auto& e : r.sweep) {
    if (e.failed) continue;
    auto lift = open_out(dir / ("lift_rom_N" + std::to_string(e.n) + ".dat"));
    auto drag = open_out(dir / ("drag_rom_N" + std::to_string(e.n) + ".dat"));
    for (std::size_t i = 0; i < e.forces.t.size(); ++i) {
      lift << e.forces.t[i] << ' ' << e.forces.lift[i] << '\n';
      drag << e.forces.t[i] << ' ' << e.forces.drag[i] << '\n';
    }
  }
  if (hf_window) {
    auto lift = open_out(dir / "lift_hf.dat");
    auto drag = open_out(dir / "drag_hf.dat");
    for (std::size_t i = 0; i < hf_window->t.size(); ++i) {
      lift << hf_window->t[i] << ' ' << hf_window->lift[i] << '\n';
      drag << hf_window->t[i] << ' ' << hf_window->drag[i] << '\n';
    }
  }
  if (!r.frequencies.empty()) {
    auto hf = open_out(dir / "frequency_hf_vs_Re.dat");
    auto rom = open_out(dir / "frequency_rom_vs_Re.dat");
    for (const auto& e : r.frequencies) {
      hf << e.reynolds << ' ' << e.f_hf << '\n';
      rom << e.reynolds << ' ' << e.f_rom << '\n';
    }
  }
}

std::string summary_table(const EvalReport& r, const Eigen::VectorXd* lambda_u, const Eigen::VectorXd* lambda_p) {
  std::ostringstream os;
  os << std::fixed;
  if (!r.sweep.empty()) {
    os << "Errors over the training window (WAPE, %; lift denominator mean |Lc|)\n";
    os << std::setw(6) << "N" << std::setw(12) << "eps_Lc" << std::setw(12) << "eps_Dc'" << '\n';
    for (const auto& e : r.sweep) {
      os << std::setw(6) << e.n;
      if (e.failed)
        os << std::setw(24) << "diverged";
      else
        os << std::setw(12) << std::setprecision(2) << e.eps_lift << std::setw(12) << e.eps_drag;
      os << '\n';
    }
    os << "error decreases from N=" << r.trend_low << " to N=" << r.trend_high << ": "
       << (r.improves_with_modes ? "yes" : "no") << "\n\n";
  }
  if (lambda_u && lambda_p && !r.sweep.empty()) {
    os << "Cumulative eigenvalues\n";
    os << std::setw(6) << "N" << std::setw(12) << "u" << std::setw(12) << "p" << '\n';
    for (const auto& e : r.sweep)
      os << std::setw(6) << e.n << std::setw(12) << std::setprecision(6) << cumulative_energy(*lambda_u, e.n)
         << std::setw(12) << cumulative_energy(*lambda_p, e.n) << '\n';
    os << '\n';
  }
  if (!r.frequencies.empty()) {
    os << "Shedding frequency (PSD peak of the lift)\n";
    os << std::setw(8) << "Re" << std::setw(9) << "trained" << std::setw(11) << "f_HF" << std::setw(11) << "f_ROM"
       << std::setw(9) << "St_HF" << std::setw(9) << "St_ROM" << std::setw(10) << "err %" << '\n';
    for (const auto& e : r.frequencies)
      os << std::setw(8) << std::setprecision(1) << e.reynolds << std::setw(9) << (e.trained ? "yes" : "no")
         << std::setw(11) << std::setprecision(5) << e.f_hf << std::setw(11) << e.f_rom << std::setw(9)
         << std::setprecision(4) << e.st_hf << std::setw(9) << e.st_rom << std::setw(10) << std::setprecision(2)
         << 100.0 * e.relative_error() << '\n';
    os << '\n';
  }
  if (r.speedup > 0) {
    os << std::setprecision(3) << "HF wall time per unit time:  " << r.hf_seconds_per_time << " s\n"
       << "ROM wall time per unit time: " << std::scientific << r.rom_seconds_per_time << " s\n"
       << std::fixed << std::setprecision(1) << "speedup: " << r.speedup << "\n";
  }
  return os.str();
}

}  // namespace podfv

#pragma once

#include "podfv/hfsolver.hpp"
#include "podfv/pod.hpp"
#include "podfv/romassembly.hpp"
#include "podfv/romsolver.hpp"
#include "podfv/signal.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace podfv {

/// Force coefficients of reconstructed ROM fields, one entry per state.
ForceHistory rom_forces(const Mesh& mesh, const PodBasis& basis, std::span<const ReducedState> states,
                        const CaseConfig& config, Index body_patch);

/// Samples of h with t0 <= t <= t1 (with a small tolerance on both ends).
ForceHistory time_window(const ForceHistory& h, double t0, double t1);

/// HF samples paired with the ROM series linearly resampled onto the HF stamps.
SignalPair pair_signals(const ForceHistory& hf, const ForceHistory& rom, bool lift);

/// Largest |a_i| over the projections of the training snapshots.
double training_coefficient_bound(const Mesh& mesh, const PodBasis& basis, const SnapshotSet& snapshots,
                                  double u_D);

struct SweepEntry {
  int n = 0;
  double energy_u = 0.0;
  double energy_p = 0.0;
  double eps_lift = 0.0;   // percent
  double eps_drag = 0.0;   // shifted-drag WAPE, percent
  double rom_seconds = 0.0;
  bool failed = false;
  std::string failure;
  ForceHistory forces;     // ROM coefficients over the training window
};

struct FrequencyEntry {
  double u_in = 0.0;
  double reynolds = 0.0;
  bool trained = false;
  double f_hf = 0.0;
  double f_rom = 0.0;
  double st_hf = 0.0;
  double st_rom = 0.0;
  double resolution = 0.0;  // frequency bin of the shorter record
  double relative_error() const { return std::abs(f_rom - f_hf) / f_hf; }
};

struct EvalReport {
  std::vector<SweepEntry> sweep;
  std::vector<FrequencyEntry> frequencies;
  double hf_seconds_per_time = 0.0;
  double rom_seconds_per_time = 0.0;
  double speedup = 0.0;
  /// Both errors at N=7 below those at N=3 (largest vs smallest size when
  /// the sweep lacks either).
  bool improves_with_modes = false;
  int trend_low = 0;   // sizes compared for improves_with_modes
  int trend_high = 0;
};

/// Everything needed to evaluate one trained case.
struct SweepCase {
  const Mesh* mesh = nullptr;
  const PodBasis* basis = nullptr;      // at least max(N) modes
  const ReducedBlocks* blocks = nullptr;
  const SnapshotSet* snapshots = nullptr;  // training window of the evaluated run
  const ForceHistory* hf_forces = nullptr;
  CaseConfig config;                     // HF case (u_in, nu, D, body patch)
  RomRunConfig rom;                      // dt and Newton options; t_end ignored
};

/// Runs the ROM with N_u = N_p = N for every N over the training window,
/// starting from the first training snapshot, and computes both WAPEs.
EvalReport mode_sweep_report(const SweepCase& c, std::span<const int> sizes);

/// ROM run for a composed system over [t0, t_end] started from a projected field.
RomTrajectory run_rom(const Mesh& mesh, const PodBasis& basis, const ReducedSystem& system, const RomRunConfig& rom,
                      const Eigen::VectorXd& u0, double t0, double t_end);

/// Peak frequencies of two lift records with matching sample spacing.
FrequencyEntry compare_frequencies(std::span<const double> hf_lift, std::span<const double> rom_lift, double dt,
                                   double u_in, double nu, double diameter, bool trained);

void write_sweep_csv(const std::filesystem::path& path, const EvalReport& report);
void write_frequency_csv(const std::filesystem::path& path, const EvalReport& report);
/// Two-column plot data files (one per series) in `dir`.
void write_plot_data(const std::filesystem::path& dir, const EvalReport& report, const ForceHistory* hf_window);
/// Fixed-width tables of errors per mode count and frequencies per Re.
std::string summary_table(const EvalReport& report, const Eigen::VectorXd* lambda_u = nullptr,
                          const Eigen::VectorXd* lambda_p = nullptr);

}  // namespace podfv

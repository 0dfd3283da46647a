#pragma once

#include "podfv/eval.hpp"
#include "podfv/hfsolver.hpp"
#include "podfv/mesh.hpp"
#include "podfv/romsolver.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace podfv {

/// Parsed `[section]` / `key = value` configuration of a full study.
struct PipelineConfig {
  ChannelSpec geometry;
  CaseConfig hf;
  double record_time = 0.0;   // extra HF time after the window, kept for spectra
  double transient = 60.0;    // spin-up for runs started from the primary state

  int n_u = 7;
  int n_p = 7;
  std::optional<Index> reference_face;
  std::vector<double> training_u_in;  // pooled runs; default {hf.u_in}

  RomRunConfig rom;
  std::optional<double> rom_t_end;    // default: end of the primary HF record
  bool write_fields = false;

  std::vector<int> sweep{3, 5, 7, 10};
  std::vector<double> held_out_u_in;
  bool mean_pressure_gradient = true;

  std::filesystem::path root = "podfv-out";

  static PipelineConfig load(const std::filesystem::path& path);
  void validate() const;

  /// Every u_in that needs an HF run, primary first, without duplicates.
  std::vector<double> all_runs() const;
};

/// Artifact locations below the root directory.
struct ArtifactPaths {
  std::filesystem::path root;

  std::filesystem::path mesh() const { return root / "mesh.txt"; }
  std::filesystem::path run_dir(double u_in) const;
  std::filesystem::path snapshots(double u_in) const { return run_dir(u_in) / "snapshots.bin"; }
  std::filesystem::path forces(double u_in) const { return run_dir(u_in) / "forces.csv"; }
  std::filesystem::path final_state(double u_in) const { return run_dir(u_in) / "final_state.bin"; }
  std::filesystem::path hf_timing(double u_in) const { return run_dir(u_in) / "timing.json"; }
  std::filesystem::path basis() const { return root / "pod" / "basis.bin"; }
  std::filesystem::path spectrum() const { return root / "pod" / "spectrum.csv"; }
  std::filesystem::path rom() const { return root / "rom" / "rom.bin"; }
  std::filesystem::path rom_run_dir(double u_D) const;
  std::filesystem::path eval_dir() const { return root / "eval"; }
};

struct HfRunSummary {
  double u_in = 0.0;
  double wall_seconds = 0.0;
  double simulated_time = 0.0;
  double period = 0.0;
  int stride = 0;
};

void cmd_mesh_gen(const PipelineConfig& cfg);
/// Primary run, plus all training and held-out runs when `multi` is set.
/// Secondary runs start from the primary final state and use up to `jobs` threads.
std::vector<HfRunSummary> cmd_hf_run(const PipelineConfig& cfg, bool multi, int jobs);
void cmd_pod(const PipelineConfig& cfg);
void cmd_assemble(const PipelineConfig& cfg);
/// Integrates the ROM at `u_D` (default: the configured one) without re-projection.
void cmd_rom_run(const PipelineConfig& cfg, std::optional<double> u_D = {});
EvalReport cmd_eval(const PipelineConfig& cfg, int jobs);
EvalReport cmd_pipeline(const PipelineConfig& cfg, int jobs);

/// Loads the mesh artifact, reporting a missing file as MissingInput.
Mesh load_mesh(const std::filesystem::path& path);

}  // namespace podfv

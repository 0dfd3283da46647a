// Command line driver for the POD-Galerkin pipeline.
#include "podfv/error.hpp"
#include "podfv/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

int exit_code(const podfv::Error& e) {
  using C = podfv::Error::Category;
  switch (e.category()) {
    case C::MissingInput: return 2;
    case C::StaleArtifact: return 3;
    case C::Dimension: return 4;
    case C::SolverFailure: return 5;
    case C::InvalidArgument: return 1;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-volume POD-Galerkin reduced-order modelling of vortex shedding"};
  app.require_subcommand(1);
  std::string config_path;
  int jobs = 1;
  app.add_option("--config", config_path, "Study configuration (INI)")->required();
  app.add_option("--jobs", jobs, "Worker threads for independent runs")->check(CLI::PositiveNumber);

  auto* mesh_gen = app.add_subcommand("mesh-gen", "Generate the channel mesh");
  auto* hf_run = app.add_subcommand("hf-run", "Run the high-fidelity solver");
  bool multi = false;
  hf_run->add_flag("--multi", multi, "Also run every training and held-out inlet velocity");
  auto* pod = app.add_subcommand("pod", "Build the POD basis from snapshots");
  auto* assemble = app.add_subcommand("assemble", "Project the equations onto the basis");
  auto* rom_run = app.add_subcommand("rom-run", "Integrate the reduced system");
  std::optional<double> u_D;
  rom_run->add_option("--u-D", u_D, "Inlet velocity scaling (default from the configuration)");
  auto* eval = app.add_subcommand("eval", "Compare reduced and high-fidelity results");
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage in order");
  for (auto* sub : {mesh_gen, hf_run, pod, assemble, rom_run, eval, pipeline}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    const podfv::PipelineConfig cfg = podfv::PipelineConfig::load(config_path);
    if (*mesh_gen) podfv::cmd_mesh_gen(cfg);
    if (*hf_run) {
      for (const auto& r : podfv::cmd_hf_run(cfg, multi, jobs))
        std::cout << "hf-run u_in=" << r.u_in << " wall=" << r.wall_seconds << "s stride=" << r.stride
                  << " period=" << r.period << '\n';
    }
    if (*pod) podfv::cmd_pod(cfg);
    if (*assemble) podfv::cmd_assemble(cfg);
    if (*rom_run) podfv::cmd_rom_run(cfg, u_D);
    if (*eval || *pipeline) {
      const auto report = *eval ? podfv::cmd_eval(cfg, jobs) : podfv::cmd_pipeline(cfg, jobs);
      std::cout << podfv::summary_table(report);
    }
  } catch (const podfv::Error& e) {
    std::cerr << "podfv: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "podfv: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

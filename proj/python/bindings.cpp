// Python bindings: meshes, the study pipeline, POD helpers, reduced systems
// and signal metrics.
#include "podfv/error.hpp"
#include "podfv/eval.hpp"
#include "podfv/fvops.hpp"
#include "podfv/io.hpp"
#include "podfv/pipeline.hpp"
#include "podfv/pod.hpp"
#include "podfv/romassembly.hpp"
#include "podfv/romsolver.hpp"
#include "podfv/signal.hpp"

#include <Eigen/Cholesky>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <fstream>
#include <numeric>

namespace py = pybind11;
using namespace podfv;

namespace {

py::dict sweep_dict(const SweepEntry& e) {
  py::dict d;
  d["n"] = e.n;
  d["energy_u"] = e.energy_u;
  d["energy_p"] = e.energy_p;
  d["eps_lift"] = e.eps_lift;
  d["eps_drag"] = e.eps_drag;
  d["rom_seconds"] = e.rom_seconds;
  d["failed"] = e.failed;
  d["failure"] = e.failure;
  return d;
}

py::dict frequency_dict(const FrequencyEntry& e) {
  py::dict d;
  d["u_in"] = e.u_in;
  d["reynolds"] = e.reynolds;
  d["trained"] = e.trained;
  d["f_hf"] = e.f_hf;
  d["f_rom"] = e.f_rom;
  d["st_hf"] = e.st_hf;
  d["st_rom"] = e.st_rom;
  d["resolution"] = e.resolution;
  d["relative_error"] = e.relative_error();
  return d;
}

py::dict report_dict(const EvalReport& r) {
  py::list sweep, freqs;
  for (const auto& e : r.sweep) sweep.append(sweep_dict(e));
  for (const auto& e : r.frequencies) freqs.append(frequency_dict(e));
  py::dict d;
  d["sweep"] = sweep;
  d["frequencies"] = freqs;
  d["hf_seconds_per_time"] = r.hf_seconds_per_time;
  d["rom_seconds_per_time"] = r.rom_seconds_per_time;
  d["speedup"] = r.speedup;
  d["improves_with_modes"] = r.improves_with_modes;
  d["summary"] = summary_table(r);
  return d;
}

Eigen::MatrixXd centers_matrix(const Mesh& m) {
  Eigen::MatrixXd out(m.n_cells(), 2);
  for (Index c = 0; c < m.n_cells(); ++c) out.row(c) = m.cell_centers()[static_cast<std::size_t>(c)].transpose();
  return out;
}

std::vector<double> sample_times(std::size_t n) {
  std::vector<double> t(n);
  std::iota(t.begin(), t.end(), 0.0);
  return t;
}

ScalarField scalar_field(const Mesh& m, const Eigen::VectorXd& values) {
  return {values, BoundarySpec(m.patches().size(), PatchBc::zero_gradient())};
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Finite-volume POD-Galerkin reduced-order modelling";

  auto error = py::register_exception<Error>(mod, "PodfvError", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(mod, "InvalidArgument", error.ptr());
  py::register_exception<MissingInput>(mod, "MissingInput", error.ptr());
  py::register_exception<StaleArtifact>(mod, "StaleArtifact", error.ptr());
  py::register_exception<DimensionMismatch>(mod, "DimensionMismatch", error.ptr());
  py::register_exception<SolverFailure>(mod, "SolverFailure", error.ptr());

  // mesh
  py::class_<Mesh>(mod, "Mesh")
      .def_property_readonly("n_cells", &Mesh::n_cells)
      .def_property_readonly("n_faces", &Mesh::n_faces)
      .def_property_readonly("n_internal_faces", &Mesh::n_internal_faces)
      .def_property_readonly("cell_centers", &centers_matrix)
      .def_property_readonly("cell_volumes", [](const Mesh& m) { return Eigen::VectorXd(m.cell_volumes()); })
      .def_property_readonly("patch_names",
                             [](const Mesh& m) {
                               std::vector<std::string> names;
                               for (const auto& p : m.patches()) names.push_back(p.name);
                               return names;
                             })
      .def("hash", &Mesh::hash)
      .def("total_volume", &Mesh::total_volume);

  mod.def(
      "channel_mesh",
      [](int nx, int ny, double lx, double ly, std::optional<std::array<double, 4>> body, const std::string& sides) {
        ChannelSpec s;
        s.nx = nx;
        s.ny = ny;
        s.lx = lx;
        s.ly = ly;
        if (body) s.obstacle = Rect{(*body)[0], (*body)[1], (*body)[2], (*body)[3]};
        s.side_kind = patch_kind_from_string(sides);
        return generate_channel_mesh(s);
      },
      py::arg("nx"), py::arg("ny"), py::arg("lx") = 1.0, py::arg("ly") = 1.0, py::arg("body") = py::none(),
      py::arg("sides") = "slip", "Cartesian channel; body is (x0, y0, x1, y1).");
  mod.def("load_mesh", &load_mesh, py::arg("path"));
  mod.def(
      "save_mesh",
      [](const Mesh& m, const std::filesystem::path& p) {
        std::ofstream os(p);
        if (!os) throw MissingInput("cannot write " + p.string());
        write_mesh(os, m);
      },
      py::arg("mesh"), py::arg("path"));

  // finite-volume operators on scalar fields with zero-gradient boundaries
  mod.def(
      "gauss_gradient",
      [](const Mesh& m, const Eigen::VectorXd& v) { return Eigen::MatrixXd(gauss_gradient(m, scalar_field(m, v))); },
      py::arg("mesh"), py::arg("values"));
  mod.def(
      "laplacian", [](const Mesh& m, const Eigen::VectorXd& v, double nu) { return laplacian(m, nu, scalar_field(m, v)); },
      py::arg("mesh"), py::arg("values"), py::arg("nu") = 1.0);
  mod.def("divergence_of_flux", &divergence_of_flux, py::arg("mesh"), py::arg("flux"));

  // study pipeline
  py::class_<PipelineConfig>(mod, "PipelineConfig")
      .def_static("load", &PipelineConfig::load, py::arg("path"))
      .def_property(
          "root", [](const PipelineConfig& c) { return c.root; },
          [](PipelineConfig& c, const std::filesystem::path& p) { c.root = p; })
      .def_readwrite("n_u", &PipelineConfig::n_u)
      .def_readwrite("n_p", &PipelineConfig::n_p)
      .def_readwrite("sweep", &PipelineConfig::sweep)
      .def_readwrite("training_u_in", &PipelineConfig::training_u_in)
      .def_readwrite("held_out_u_in", &PipelineConfig::held_out_u_in)
      .def_property_readonly("u_in", [](const PipelineConfig& c) { return c.hf.u_in; })
      .def_property_readonly("nu", [](const PipelineConfig& c) { return c.hf.nu; })
      .def_property_readonly("reynolds", [](const PipelineConfig& c) { return c.hf.reynolds(); })
      .def("validate", &PipelineConfig::validate)
      .def("all_runs", &PipelineConfig::all_runs);

  py::call_guard<py::gil_scoped_release> nogil;
  mod.def("mesh_gen", &cmd_mesh_gen, py::arg("config"), nogil);
  mod.def(
      "hf_run",
      [](const PipelineConfig& c, bool multi, int jobs) {
        std::vector<HfRunSummary> runs;
        {
          py::gil_scoped_release release;
          runs = cmd_hf_run(c, multi, jobs);
        }
        py::list out;
        for (const auto& r : runs) {
          py::dict d;
          d["u_in"] = r.u_in;
          d["wall_seconds"] = r.wall_seconds;
          d["simulated_time"] = r.simulated_time;
          d["period"] = r.period;
          d["stride"] = r.stride;
          out.append(d);
        }
        return out;
      },
      py::arg("config"), py::arg("multi") = false, py::arg("jobs") = 1);
  mod.def("pod", &cmd_pod, py::arg("config"), nogil);
  mod.def("assemble", &cmd_assemble, py::arg("config"), nogil);
  mod.def("rom_run", &cmd_rom_run, py::arg("config"), py::arg("u_D") = py::none(), nogil);
  mod.def(
      "evaluate",
      [](const PipelineConfig& c, int jobs) {
        EvalReport r;
        {
          py::gil_scoped_release release;
          r = cmd_eval(c, jobs);
        }
        return report_dict(r);
      },
      py::arg("config"), py::arg("jobs") = 1);
  mod.def(
      "pipeline",
      [](const PipelineConfig& c, int jobs) {
        EvalReport r;
        {
          py::gil_scoped_release release;
          r = cmd_pipeline(c, jobs);
        }
        return report_dict(r);
      },
      py::arg("config"), py::arg("jobs") = 1);

  // artifacts
  mod.def(
      "read_basis",
      [](const std::filesystem::path& p, const Mesh& m) {
        const PodBasis b = read_basis(p, m);
        py::dict d;
        d["phi"] = b.phi;
        d["psi"] = b.psi;
        d["chi"] = b.chi;
        d["lambda_u"] = b.lambda_u;
        d["lambda_p"] = b.lambda_p;
        d["p_mean"] = b.p_mean;
        d["phi_c"] = Eigen::VectorXd(flatten(b.lifting.phi_c.values));
        d["F_c"] = b.lifting.F_c;
        d["reference_face"] = b.lifting.reference_face;
        d["hash"] = b.hash();
        return d;
      },
      py::arg("path"), py::arg("mesh"));
  mod.def(
      "read_forces",
      [](const std::filesystem::path& p) {
        const ForceHistory h = read_forces_csv(p);
        py::dict d;
        d["t"] = h.t;
        d["drag"] = h.drag;
        d["lift"] = h.lift;
        return d;
      },
      py::arg("path"));

  // POD helpers
  mod.def("correlation_matrix", &correlation_matrix, py::arg("snapshots"), py::arg("weights"));
  mod.def(
      "eig_spectrum",
      [](const Eigen::MatrixXd& C) {
        const SpectralDecomposition s = eig_spectrum(C);
        return py::make_tuple(s.values, s.vectors);
      },
      py::arg("C"));
  mod.def("usable_mode_count", &usable_mode_count, py::arg("eigenvalues"));
  mod.def("cumulative_energy", &cumulative_energy, py::arg("eigenvalues"), py::arg("n"));
  mod.def("velocity_modes", &velocity_modes, py::arg("snapshots"), py::arg("eigenvalues"), py::arg("eigenvectors"),
          py::arg("n"));

  // reduced systems
  py::class_<ReducedSystem>(mod, "ReducedSystem")
      .def_static(
          "load", [](const std::filesystem::path& p) { return read_rom(p); }, py::arg("path"))
      .def(
          "recompose", [](const ReducedSystem& s, double nu, double u_D) { return compose_system(s.blocks, nu, u_D); },
          py::arg("nu"), py::arg("u_D"))
      .def(
          "truncated",
          [](const ReducedSystem& s, int n_u, int n_p) {
            return compose_system(s.blocks.truncated(n_u, n_p), s.nu, s.u_D);
          },
          py::arg("n_u"), py::arg("n_p"))
      .def_readonly("nu", &ReducedSystem::nu)
      .def_readonly("u_D", &ReducedSystem::u_D)
      .def_property_readonly("n_u", &ReducedSystem::n_u)
      .def_property_readonly("n_p", &ReducedSystem::n_p)
      .def_property_readonly("B", [](const ReducedSystem& s) { return s.blocks.B; })
      .def_property_readonly("C", [](const ReducedSystem& s) { return s.blocks.C; })
      .def_property_readonly("K", [](const ReducedSystem& s) { return s.blocks.K; })
      .def_property_readonly("D", [](const ReducedSystem& s) { return s.blocks.D; })
      .def_property_readonly("G", [](const ReducedSystem& s) { return s.blocks.G; })
      .def_readonly("A_BC", &ReducedSystem::A_BC)
      .def_readonly("B_BC", &ReducedSystem::B_BC)
      .def_readonly("E_BC", &ReducedSystem::E_BC)
      .def_readonly("F_BC", &ReducedSystem::F_BC)
      .def("pressure_rhs", [](const ReducedSystem& s, const Eigen::VectorXd& a) { return pressure_rhs(a, s); });

  mod.def(
      "integrate",
      [](const ReducedSystem& s, const Eigen::VectorXd& a0, double dt, double t_end, double t0) {
        ReducedState init{a0, s.blocks.D.ldlt().solve(pressure_rhs(a0, s)), t0};
        RomRunConfig cfg;
        cfg.dt = dt;
        cfg.t_end = t_end;
        cfg.nu = s.nu;
        cfg.u_D = s.u_D;
        RomTrajectory tr;
        {
          py::gil_scoped_release release;
          tr = integrate(init, s, cfg);
        }
        const Index n = static_cast<Index>(tr.states.size());
        Eigen::VectorXd t(n);
        Eigen::MatrixXd a(n, s.n_u()), b(n, s.n_p());
        for (Index k = 0; k < n; ++k) {
          const auto& st = tr.states[static_cast<std::size_t>(k)];
          t(k) = st.t;
          a.row(k) = st.a.transpose();
          b.row(k) = st.b.transpose();
        }
        return py::make_tuple(t, a, b);
      },
      py::arg("system"), py::arg("a0"), py::arg("dt"), py::arg("t_end"), py::arg("t0") = 0.0,
      "Backward-Euler trajectory; returns (t, a, b) with one row per step.");

  // signals
  mod.def(
      "wape",
      [](const std::vector<double>& ref, const std::vector<double>& rom) {
        SignalPair p{sample_times(ref.size()), ref, rom};
        return wape(p);
      },
      py::arg("reference"), py::arg("reduced"));
  mod.def(
      "wape_shifted_drag",
      [](const std::vector<double>& ref, const std::vector<double>& rom) {
        SignalPair p{sample_times(ref.size()), ref, rom};
        return wape_shifted_drag(p);
      },
      py::arg("reference"), py::arg("reduced"));
  mod.def(
      "psd_peak_frequency", [](const std::vector<double>& x, double dt) { return psd_peak_frequency(x, dt); },
      py::arg("signal"), py::arg("dt"));
  mod.def(
      "zero_crossing_period",
      [](const std::vector<double>& x, double dt) { return zero_crossing_period(x, dt); }, py::arg("signal"),
      py::arg("dt"));
  mod.def("strouhal", &strouhal, py::arg("frequency"), py::arg("velocity"), py::arg("diameter"));
}

#include "podfv/pipeline.hpp"

#include "podfv/error.hpp"
#include "podfv/io.hpp"
#include "podfv/pod.hpp"
#include "podfv/romassembly.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <climits>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace podfv {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"case", {"nx", "ny", "length", "height", "body", "sides"}},
      {"hf",
       {"nu", "u_in", "dt", "t_end", "piso_correctors", "outer_correctors", "snapshot_stride", "n_snapshots",
        "window_periods", "body_diameter", "linear_fraction", "pressure_tol", "momentum_tol", "max_linear_iterations",
        "preconditioner", "record_time", "transient"}},
      {"pod", {"n_u", "n_p", "reference_face", "training_u_in"}},
      {"rom", {"dt", "t_end", "tol_abs", "tol_rel", "max_iter", "u_D", "nu", "write_fields"}},
      {"eval", {"sweep", "held_out_u_in", "mean_pressure_gradient"}},
      {"paths", {"root"}},
  };
  return keys;
}

template <class T>
std::vector<T> parse_list(const std::string& text, const std::string& key) {
  std::vector<T> out;
  std::string s = text;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream is(s);
  T v;
  while (is >> v) out.push_back(v);
  if (!is.eof()) throw InvalidArgument("cannot parse list for '" + key + "': " + text);
  return out;
}

bool same_value(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

std::string number_tag(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInput("missing input file: " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("malformed " + path.string() + ": " + e.what());
  }
}

// Runs fn(0..n-1) on up to `jobs` threads; rethrows the first failure.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const auto workers = static_cast<std::size_t>(std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(n, 1))));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  pool.clear();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

SnapshotSet state_as_snapshot(const Mesh& mesh, const FlowState& s, const CaseConfig& c) {
  SnapshotSet out;
  out.U = flatten(s.u.values);
  out.P = s.p.values;
  out.F = s.F;
  out.times = {s.t};
  out.u_in = c.u_in;
  out.nu = c.nu;
  out.mesh_hash = mesh.hash();
  return out;
}

FlowState snapshot_as_state(const Mesh& mesh, const SnapshotSet& s, Index j, const CaseConfig& c) {
  FlowState st = FlowSolver(mesh, c).initial_state();
  st.u.values = unflatten(s.U.col(j));
  st.p.values = s.P.col(j);
  st.F = s.F.col(j);
  st.t = s.times[static_cast<std::size_t>(j)];
  return st;
}

SnapshotSet load_snapshots(const fs::path& path, const Mesh& mesh) {
  SnapshotSet s = read_snapshots(path);
  if (s.mesh_hash != mesh.hash()) throw StaleArtifact(path.string() + " was produced on a different mesh");
  return s;
}

HfRunSummary run_and_store(const Mesh& mesh, const PipelineConfig& cfg, const ArtifactPaths& paths, double u_in,
                           const FlowState* initial) {
  CaseConfig c = cfg.hf;
  c.u_in = u_in;
  if (initial) c.t_end = initial->t + cfg.transient;
  RunResult window = run_case(mesh, c, initial);
  ForceHistory forces = window.forces;
  double wall = window.wall_seconds;
  long steps = static_cast<long>(forces.t.size());
  if (cfg.record_time > 0) {
    CaseConfig rc = c;
    rc.t_end = window.final_state.t + cfg.record_time;
    rc.snapshot_stride = INT_MAX / 2;
    rc.n_snapshots = 1;
    RunResult rec = run_case(mesh, rc, &window.final_state);
    forces.t.insert(forces.t.end(), rec.forces.t.begin(), rec.forces.t.end());
    forces.drag.insert(forces.drag.end(), rec.forces.drag.begin(), rec.forces.drag.end());
    forces.lift.insert(forces.lift.end(), rec.forces.lift.begin(), rec.forces.lift.end());
    wall += rec.wall_seconds;
    steps += static_cast<long>(rec.forces.t.size());
  }
  write_snapshots(paths.snapshots(u_in), window.snapshots);
  write_forces_csv(paths.forces(u_in), forces);
  write_snapshots(paths.final_state(u_in), state_as_snapshot(mesh, window.final_state, c));

  HfRunSummary sum;
  sum.u_in = u_in;
  sum.wall_seconds = wall;
  sum.simulated_time = static_cast<double>(steps) * c.dt;
  sum.period = window.period_estimate;
  sum.stride = window.snapshot_stride;
  write_json(paths.hf_timing(u_in), {{"u_in", u_in},
                                     {"reynolds", c.reynolds()},
                                     {"wall_seconds", wall},
                                     {"steps", steps},
                                     {"simulated_time", sum.simulated_time},
                                     {"seconds_per_time_unit", wall / sum.simulated_time},
                                     {"snapshot_stride", sum.stride},
                                     {"period_estimate", sum.period}});
  return sum;
}

ReducedSystem load_system(const PipelineConfig& cfg, const PodBasis& basis, const ArtifactPaths& paths,
                          double u_D) {
  const ReducedSystem stored = read_rom(paths.rom(), basis.hash());
  const int nu = std::min(cfg.n_u, stored.n_u()), np = std::min(cfg.n_p, stored.n_p());
  if (nu != cfg.n_u || np != cfg.n_p)
    throw DimensionMismatch("reduced operators hold (" + std::to_string(stored.n_u()) + "," +
                            std::to_string(stored.n_p()) + ") modes, configuration asks for (" +
                            std::to_string(cfg.n_u) + "," + std::to_string(cfg.n_p) + ")");
  return compose_system(stored.blocks.truncated(nu, np), cfg.rom.nu, u_D);
}

}  // namespace

PipelineConfig PipelineConfig::load(const fs::path& path) {
  if (!fs::exists(path)) throw MissingInput("missing configuration file: " + path.string());
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw InvalidArgument(std::string("malformed configuration: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) throw InvalidArgument("unknown configuration section [" + section + "]");
    for (const auto& [key, _] : body)
      if (!it->second.count(key)) throw InvalidArgument("unknown key '" + key + "' in [" + section + "]");
  }

  PipelineConfig c;
  auto get = [&](const std::string& key, auto fallback) {
    try {
      return tree.get<decltype(fallback)>(key, fallback);
    } catch (const pt::ptree_bad_data&) {
      throw InvalidArgument("bad value for " + key + ": '" + tree.get<std::string>(key) + "'");
    }
  };

  c.geometry.nx = get("case.nx", 128);
  c.geometry.ny = get("case.ny", 64);
  c.geometry.lx = get("case.length", 16.0);
  c.geometry.ly = get("case.height", 8.0);
  const std::string body = get("case.body", std::string("4 3.625 5 4.625"));
  if (body != "none") {
    const auto v = parse_list<double>(body, "case.body");
    if (v.size() != 4) throw InvalidArgument("case.body needs 'x0 y0 x1 y1' or 'none'");
    c.geometry.obstacle = Rect{v[0], v[1], v[2], v[3]};
  }
  c.geometry.side_kind = patch_kind_from_string(get("case.sides", std::string("slip")));

  CaseConfig& h = c.hf;
  h.nu = get("hf.nu", h.nu);
  h.u_in = get("hf.u_in", h.u_in);
  h.dt = get("hf.dt", h.dt);
  h.t_end = get("hf.t_end", h.t_end);
  h.piso_correctors = get("hf.piso_correctors", h.piso_correctors);
  h.outer_correctors = get("hf.outer_correctors", h.outer_correctors);
  h.snapshot_stride = get("hf.snapshot_stride", h.snapshot_stride);
  h.n_snapshots = get("hf.n_snapshots", h.n_snapshots);
  h.window_periods = get("hf.window_periods", h.window_periods);
  h.body_diameter = get("hf.body_diameter", h.body_diameter);
  h.linear_fraction = get("hf.linear_fraction", h.linear_fraction);
  h.pressure_tol = get("hf.pressure_tol", h.pressure_tol);
  h.momentum_tol = get("hf.momentum_tol", h.momentum_tol);
  h.max_linear_iterations = get("hf.max_linear_iterations", h.max_linear_iterations);
  const std::string pc = get("hf.preconditioner", std::string("cholesky"));
  if (pc == "cholesky") h.preconditioner = PressurePreconditioner::ReferenceCholesky;
  else if (pc == "jacobi") h.preconditioner = PressurePreconditioner::Jacobi;
  else throw InvalidArgument("hf.preconditioner must be 'cholesky' or 'jacobi'");
  c.record_time = get("hf.record_time", c.record_time);
  c.transient = get("hf.transient", c.transient);

  c.n_u = get("pod.n_u", c.n_u);
  c.n_p = get("pod.n_p", c.n_p);
  if (const auto rf = tree.get_optional<std::string>("pod.reference_face"); rf && *rf != "auto")
    c.reference_face = get("pod.reference_face", Index{0});
  c.training_u_in = parse_list<double>(get("pod.training_u_in", number_tag(h.u_in)), "pod.training_u_in");

  c.rom.dt = get("rom.dt", h.dt);
  if (tree.get_optional<std::string>("rom.t_end")) c.rom_t_end = get("rom.t_end", 0.0);
  c.rom.newton.tol_abs = get("rom.tol_abs", c.rom.newton.tol_abs);
  c.rom.newton.tol_rel = get("rom.tol_rel", c.rom.newton.tol_rel);
  c.rom.newton.max_iter = get("rom.max_iter", c.rom.newton.max_iter);
  c.rom.u_D = get("rom.u_D", h.u_in);
  c.rom.nu = get("rom.nu", h.nu);
  c.write_fields = get("rom.write_fields", c.write_fields);

  c.sweep = parse_list<int>(get("eval.sweep", std::string("3,5,7,10")), "eval.sweep");
  c.held_out_u_in = parse_list<double>(get("eval.held_out_u_in", std::string()), "eval.held_out_u_in");
  c.mean_pressure_gradient = get("eval.mean_pressure_gradient", c.mean_pressure_gradient);

  c.root = get("paths.root", std::string("podfv-out"));
  if (const char* env = std::getenv("PODFV_ARTIFACT_ROOT"); env && *env) c.root = env;
  c.validate();
  return c;
}

void PipelineConfig::validate() const {
  hf.validate();
  rom.validate();
  if (n_u < 1 || n_p < 1) throw InvalidArgument("pod.n_u and pod.n_p must be at least 1");
  if (training_u_in.empty()) throw InvalidArgument("pod.training_u_in is empty");
  if (record_time < 0 || transient <= 0) throw InvalidArgument("hf.record_time must be >= 0 and hf.transient > 0");
  for (int n : sweep)
    if (n < 1) throw InvalidArgument("eval.sweep entries must be positive");
}

std::vector<double> PipelineConfig::all_runs() const {
  std::vector<double> out{hf.u_in};
  auto add = [&](double v) {
    if (std::none_of(out.begin(), out.end(), [&](double w) { return same_value(v, w); })) out.push_back(v);
  };
  for (double v : training_u_in) add(v);
  for (double v : held_out_u_in) add(v);
  return out;
}

fs::path ArtifactPaths::run_dir(double u_in) const { return root / "hf" / ("u" + number_tag(u_in)); }
fs::path ArtifactPaths::rom_run_dir(double u_D) const { return root / "rom" / ("run_u" + number_tag(u_D)); }

Mesh load_mesh(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInput("missing mesh file: " + path.string());
  return read_mesh(in);
}

void cmd_mesh_gen(const PipelineConfig& cfg) {
  const ArtifactPaths paths{cfg.root};
  const Mesh mesh = generate_channel_mesh(cfg.geometry);
  fs::create_directories(paths.root);
  std::ofstream out(paths.mesh());
  if (!out) throw InvalidArgument("cannot write " + paths.mesh().string());
  write_mesh(out, mesh);
}

std::vector<HfRunSummary> cmd_hf_run(const PipelineConfig& cfg, bool multi, int jobs) {
  const ArtifactPaths paths{cfg.root};
  const Mesh mesh = load_mesh(paths.mesh());
  std::vector<HfRunSummary> out{run_and_store(mesh, cfg, paths, cfg.hf.u_in, nullptr)};
  if (!multi) return out;
  const auto runs = cfg.all_runs();
  const std::vector<double> rest(runs.begin() + 1, runs.end());
  const SnapshotSet fs0 = load_snapshots(paths.final_state(cfg.hf.u_in), mesh);
  const FlowState start = snapshot_as_state(mesh, fs0, 0, cfg.hf);
  std::vector<HfRunSummary> more(rest.size());
  parallel_for(rest.size(), jobs, [&](std::size_t i) { more[i] = run_and_store(mesh, cfg, paths, rest[i], &start); });
  out.insert(out.end(), more.begin(), more.end());
  return out;
}

void cmd_pod(const PipelineConfig& cfg) {
  const ArtifactPaths paths{cfg.root};
  const Mesh mesh = load_mesh(paths.mesh());
  std::vector<SnapshotSet> sets;
  for (double u : cfg.training_u_in) sets.push_back(load_snapshots(paths.snapshots(u), mesh));
  const PooledSnapshots pooled = PooledSnapshots::pool(sets);
  PodOptions opt;
  const int widest = cfg.sweep.empty() ? 0 : *std::max_element(cfg.sweep.begin(), cfg.sweep.end());
  opt.n_u = std::max(cfg.n_u, widest);
  opt.n_p = std::max(cfg.n_p, widest);
  opt.reference_face = cfg.reference_face;
  const PodBasis basis = build_basis(mesh, pooled, opt);
  write_basis(paths.basis(), basis);

  std::ofstream out(paths.spectrum());
  out << "i,lambda_u,cumulative_u,lambda_p,cumulative_p\n" << std::setprecision(12);
  const Index n = std::max(basis.lambda_u.size(), basis.lambda_p.size());
  for (Index i = 0; i < n; ++i) {
    out << i + 1;
    for (const Eigen::VectorXd* l : {&basis.lambda_u, &basis.lambda_p}) {
      if (i < l->size()) out << ',' << (*l)(i) << ',' << cumulative_energy(*l, static_cast<int>(i + 1));
      else out << ",,";
    }
    out << '\n';
  }
}

void cmd_assemble(const PipelineConfig& cfg) {
  const ArtifactPaths paths{cfg.root};
  const Mesh mesh = load_mesh(paths.mesh());
  const PodBasis basis = read_basis(paths.basis(), mesh);
  AssemblyOptions opt;
  opt.mean_pressure_gradient = cfg.mean_pressure_gradient;
  write_rom(paths.rom(), compose_system(assemble(mesh, basis, opt), cfg.rom.nu, cfg.rom.u_D));
}

void cmd_rom_run(const PipelineConfig& cfg, std::optional<double> u_D_override) {
  const ArtifactPaths paths{cfg.root};
  const Mesh mesh = load_mesh(paths.mesh());
  const PodBasis full = read_basis(paths.basis(), mesh);
  const double u_D = u_D_override.value_or(cfg.rom.u_D);
  const ReducedSystem sys = load_system(cfg, full, paths, u_D);
  const PodBasis basis = full.truncated(cfg.n_u, cfg.n_p);
  const SnapshotSet snaps = load_snapshots(paths.snapshots(cfg.hf.u_in), mesh);
  const double t0 = snaps.times.front();
  double t_end = snaps.times.back();
  if (cfg.rom_t_end) t_end = *cfg.rom_t_end;
  else if (fs::exists(paths.forces(cfg.hf.u_in))) t_end = read_forces_csv(paths.forces(cfg.hf.u_in)).t.back();

  const RomTrajectory tr = run_rom(mesh, basis, sys, cfg.rom, snaps.U.col(0), t0, t_end);
  const fs::path dir = paths.rom_run_dir(u_D);
  write_coefficients_csv(dir / "coefficients.csv", tr.states);
  CaseConfig c = cfg.hf;
  c.u_in = u_D;
  write_forces_csv(dir / "forces.csv", rom_forces(mesh, basis, tr.states, c, mesh.patch_id(c.body_patch)));
  const double span = t_end - t0;
  write_json(dir / "timing.json", {{"u_D", u_D},
                                   {"n_u", basis.n_u()},
                                   {"n_p", basis.n_p()},
                                   {"steps", tr.states.size() - 1},
                                   {"wall_seconds", tr.wall_seconds},
                                   {"simulated_time", span},
                                   {"seconds_per_time_unit", span > 0 ? tr.wall_seconds / span : 0.0},
                                   {"newton_iterations", tr.newton_iterations}});
  if (cfg.write_fields) {
    SnapshotSet out;
    out.u_in = u_D;
    out.nu = cfg.rom.nu;
    out.mesh_hash = mesh.hash();
    std::vector<const ReducedState*> picked;
    for (double t : snaps.times) {
      const auto it = std::min_element(tr.states.begin(), tr.states.end(), [&](const auto& a, const auto& b) {
        return std::abs(a.t - t) < std::abs(b.t - t);
      });
      if (picked.empty() || picked.back() != &*it) picked.push_back(&*it);
    }
    out.U.resize(basis.phi.rows(), static_cast<Index>(picked.size()));
    out.P.resize(basis.chi.rows(), out.U.cols());
    out.F.resize(basis.psi.rows(), out.U.cols());
    for (std::size_t j = 0; j < picked.size(); ++j) {
      const ReconstructedFields f = reconstruct(*picked[j], basis, u_D);
      out.U.col(static_cast<Index>(j)) = flatten(f.u.values);
      out.P.col(static_cast<Index>(j)) = f.p.values;
      out.F.col(static_cast<Index>(j)) = f.F;
      out.times.push_back(picked[j]->t);
    }
    write_snapshots(dir / "fields.bin", out);
  }
}

EvalReport cmd_eval(const PipelineConfig& cfg, int jobs) {
  const ArtifactPaths paths{cfg.root};
  const Mesh mesh = load_mesh(paths.mesh());
  const PodBasis basis = read_basis(paths.basis(), mesh);
  const ReducedSystem stored = read_rom(paths.rom(), basis.hash());
  const SnapshotSet snaps = load_snapshots(paths.snapshots(cfg.hf.u_in), mesh);
  const ForceHistory hf = read_forces_csv(paths.forces(cfg.hf.u_in));

  std::vector<int> sizes;
  for (int n : cfg.sweep)
    if (n <= stored.n_u() && n <= stored.n_p()) sizes.push_back(n);
  SweepCase sc;
  sc.mesh = &mesh;
  sc.basis = &basis;
  sc.blocks = &stored.blocks;
  sc.snapshots = &snaps;
  sc.hf_forces = &hf;
  sc.config = cfg.hf;
  sc.rom = cfg.rom;
  EvalReport report = mode_sweep_report(sc, sizes);

  // Shedding frequency per available run, ROM started from the primary window.
  const Index body = mesh.patch_id(cfg.hf.body_patch);
  const PodBasis b = basis.truncated(cfg.n_u, cfg.n_p);
  std::vector<double> runs;
  for (double u : cfg.all_runs())
    if (fs::exists(paths.forces(u)) && fs::exists(paths.snapshots(u))) runs.push_back(u);
  std::vector<FrequencyEntry> freq(runs.size());
  std::vector<double> rom_cost(runs.size(), 0.0);
  parallel_for(runs.size(), jobs, [&](std::size_t i) {
    const double u = runs[i];
    const bool primary = same_value(u, cfg.hf.u_in);
    const SnapshotSet own = primary ? snaps : load_snapshots(paths.snapshots(u), mesh);
    const ForceHistory rec = read_forces_csv(paths.forces(u));
    const ForceHistory hf_rec = time_window(rec, own.times.front(), rec.t.back());
    const double span = hf_rec.t.back() - hf_rec.t.front();
    const double spin = primary ? 0.0 : cfg.transient;
    const ReducedSystem sys = compose_system(stored.blocks.truncated(cfg.n_u, cfg.n_p), cfg.rom.nu, u);
    const double t0 = snaps.times.front();
    const RomTrajectory tr = run_rom(mesh, b, sys, cfg.rom, snaps.U.col(0), t0, t0 + spin + span);
    CaseConfig c = cfg.hf;
    c.u_in = u;
    const ForceHistory rf = time_window(rom_forces(mesh, b, tr.states, c, body), t0 + spin, t0 + spin + span);
    std::vector<double> grid(hf_rec.t.size());
    for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = t0 + spin + (hf_rec.t[k] - hf_rec.t.front());
    const auto rom_lift = resample_linear(rf.t, rf.lift, grid);
    const bool trained = std::any_of(cfg.training_u_in.begin(), cfg.training_u_in.end(),
                                     [&](double v) { return same_value(v, u); });
    freq[i] = compare_frequencies(hf_rec.lift, rom_lift, cfg.hf.dt, u, cfg.hf.nu, cfg.hf.body_diameter, trained);
    rom_cost[i] = tr.wall_seconds / (spin + span);
  });
  report.frequencies = freq;
  std::sort(report.frequencies.begin(), report.frequencies.end(),
            [](const auto& x, const auto& y) { return x.u_in < y.u_in; });

  if (fs::exists(paths.hf_timing(cfg.hf.u_in)) && !runs.empty() && same_value(runs.front(), cfg.hf.u_in)) {
    report.hf_seconds_per_time = read_json(paths.hf_timing(cfg.hf.u_in)).at("seconds_per_time_unit").get<double>();
    report.rom_seconds_per_time = rom_cost.front();
    if (report.rom_seconds_per_time > 0) report.speedup = report.hf_seconds_per_time / report.rom_seconds_per_time;
  }

  const fs::path dir = paths.eval_dir();
  write_sweep_csv(dir / "sweep.csv", report);
  write_frequency_csv(dir / "frequencies.csv", report);
  const ForceHistory hf_window = time_window(hf, snaps.times.front(), snaps.times.back());
  write_plot_data(dir / "plot", report, &hf_window);
  {
    std::ofstream out(dir / "summary.txt");
    out << summary_table(report, &basis.lambda_u, &basis.lambda_p);
  }
  nlohmann::json j;
  for (const auto& e : report.sweep)
    j["sweep"].push_back({{"N", e.n}, {"eps_Lc", e.eps_lift}, {"eps_Dc", e.eps_drag}, {"failed", e.failed}});
  for (const auto& e : report.frequencies)
    j["frequencies"].push_back({{"u_in", e.u_in}, {"Re", e.reynolds}, {"trained", e.trained},
                                {"f_hf", e.f_hf}, {"f_rom", e.f_rom}, {"St_hf", e.st_hf}, {"St_rom", e.st_rom}});
  j["speedup"] = report.speedup;
  j["improves_with_modes"] = report.improves_with_modes;
  write_json(dir / "report.json", j);
  return report;
}

EvalReport cmd_pipeline(const PipelineConfig& cfg, int jobs) {
  cmd_mesh_gen(cfg);
  const auto runs = cfg.all_runs();
  cmd_hf_run(cfg, runs.size() > 1, jobs);
  cmd_pod(cfg);
  cmd_assemble(cfg);
  cmd_rom_run(cfg);
  return cmd_eval(cfg, jobs);
}

}  // namespace podfv

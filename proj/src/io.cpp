#include "podfv/io.hpp"

#include "podfv/error.hpp"
#include "podfv/hash.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <utility>

namespace podfv {

namespace {

namespace fs = std::filesystem;

constexpr const char* kSnapMagic = "podfv-snap v1";
constexpr const char* kBasisMagic = "podfv-basis v1";
constexpr const char* kRomMagic = "podfv-rom v1";

enum class FieldKind : std::int64_t { Velocity = 1, Pressure = 2, Flux = 3 };

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

class Writer {
public:
  void u64(std::uint64_t v) { put(to_little(v)); }
  void i64(std::int64_t v) { put(to_little(v)); }
  void f64(double v) { put(to_little(v)); }
  void vec(const Eigen::VectorXd& v) {
    i64(v.size());
    for (Index i = 0; i < v.size(); ++i) f64(v(i));
  }
  void mat(const Eigen::MatrixXd& m) {
    i64(m.rows());
    i64(m.cols());
    for (Index i = 0; i < m.size(); ++i) f64(m.data()[i]);
  }
  void tensor(const Tensor3& t) {
    i64(static_cast<std::int64_t>(t.size()));
    for (const auto& s : t) mat(s);
  }
  const std::string& bytes() const { return buf_; }

private:
  template <class T>
  void put(T v) {
    char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    buf_.append(b, sizeof(T));
  }
  std::string buf_;
};

class Reader {
public:
  Reader(std::string buf, fs::path path) : buf_(std::move(buf)), path_(std::move(path)) {}
  std::uint64_t u64() { return to_little(get<std::uint64_t>()); }
  std::int64_t i64() { return to_little(get<std::int64_t>()); }
  double f64() { return to_little(get<double>()); }
  Index count() {
    const std::int64_t n = i64();
    if (n < 0 || static_cast<std::uint64_t>(n) > buf_.size()) corrupt("bad array length");
    return n;
  }
  Eigen::VectorXd vec() {
    Eigen::VectorXd v(count());
    for (Index i = 0; i < v.size(); ++i) v(i) = f64();
    return v;
  }
  Eigen::MatrixXd mat() {
    const Index r = count(), c = count();
    if (c > 0 && r > static_cast<Index>(buf_.size()) / c) corrupt("bad matrix shape");
    Eigen::MatrixXd m(r, c);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = f64();
    return m;
  }
  Tensor3 tensor() {
    Tensor3 t(static_cast<std::size_t>(count()));
    for (auto& s : t) s = mat();
    return t;
  }
  void finish() const {
    if (pos_ != buf_.size()) corrupt("trailing bytes");
  }
  [[noreturn]] void corrupt(const std::string& why) const {
    throw InvalidArgument("corrupt archive " + path_.string() + ": " + why);
  }

private:
  template <class T>
  T get() {
    if (pos_ + sizeof(T) > buf_.size()) corrupt("truncated");
    T v;
    std::memcpy(&v, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string buf_;
  fs::path path_;
  std::size_t pos_ = 0;
};

std::uint64_t payload_hash(const std::string& payload) {
  Hasher h;
  h.bytes(payload.data(), payload.size());
  return h.digest();
}

void write_archive(const fs::path& path, const char* magic, const Writer& w) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << magic << '\n';
  const std::uint64_t h = to_little(payload_hash(w.bytes()));
  out.write(reinterpret_cast<const char*>(&h), sizeof h);
  out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw InvalidArgument("failed writing " + path.string());
}

struct RawArchive {
  std::uint64_t hash = 0;
  std::string payload;
};

RawArchive load_archive(const fs::path& path, const char* magic) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInput("missing input file: " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != magic) throw InvalidArgument(path.string() + " is not a '" + magic + "' archive");
  RawArchive a;
  in.read(reinterpret_cast<char*>(&a.hash), sizeof a.hash);
  if (!in) throw InvalidArgument("corrupt archive " + path.string() + ": missing hash");
  a.hash = to_little(a.hash);
  std::ostringstream rest;
  rest << in.rdbuf();
  a.payload = rest.str();
  if (payload_hash(a.payload) != a.hash)
    throw InvalidArgument("corrupt archive " + path.string() + ": payload hash mismatch");
  return a;
}

std::ifstream open_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInput("missing input file: " + path.string());
  return in;
}

std::vector<double> parse_csv_row(const std::string& line, const fs::path& path) {
  std::vector<double> row;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      row.push_back(std::stod(cell, &used));
    } catch (const std::exception&) {
      throw InvalidArgument("malformed number '" + cell + "' in " + path.string());
    }
  }
  return row;
}

}  // namespace

void write_snapshots(const fs::path& path, const SnapshotSet& s) {
  s.validate();
  Writer w;
  w.u64(s.mesh_hash);
  w.f64(s.u_in);
  w.f64(s.nu);
  w.i64(3);
  for (auto [kind, m] : {std::pair{FieldKind::Velocity, &s.U}, {FieldKind::Pressure, &s.P}, {FieldKind::Flux, &s.F}}) {
    w.i64(static_cast<std::int64_t>(kind));
    w.mat(*m);
  }
  w.vec(Eigen::Map<const Eigen::VectorXd>(s.times.data(), static_cast<Index>(s.times.size())));
  write_archive(path, kSnapMagic, w);
}

SnapshotSet read_snapshots(const fs::path& path) {
  RawArchive a = load_archive(path, kSnapMagic);
  Reader r(std::move(a.payload), path);
  SnapshotSet s;
  s.mesh_hash = r.u64();
  s.u_in = r.f64();
  s.nu = r.f64();
  const Index blocks = r.count();
  for (Index i = 0; i < blocks; ++i) {
    const auto kind = r.i64();
    Eigen::MatrixXd m = r.mat();
    switch (kind) {
      case static_cast<std::int64_t>(FieldKind::Velocity): s.U = std::move(m); break;
      case static_cast<std::int64_t>(FieldKind::Pressure): s.P = std::move(m); break;
      case static_cast<std::int64_t>(FieldKind::Flux): s.F = std::move(m); break;
      default: r.corrupt("unknown field kind " + std::to_string(kind));
    }
  }
  const Eigen::VectorXd t = r.vec();
  s.times.assign(t.data(), t.data() + t.size());
  r.finish();
  s.validate();
  return s;
}

void write_basis(const fs::path& path, const PodBasis& b) {
  Writer w;
  w.u64(b.mesh_hash);
  w.i64(b.n_snapshots);
  w.i64(b.n_u());
  w.i64(b.n_p());
  w.mat(b.phi);
  w.mat(b.psi);
  w.mat(b.chi);
  w.vec(b.lambda_u);
  w.vec(b.lambda_p);
  w.mat(b.Q_u);
  w.mat(b.Q_p);
  w.vec(b.p_mean);
  w.i64(b.lifting.reference_face);
  w.f64(b.lifting.reference_value);
  w.vec(flatten(b.lifting.phi_c.values));
  w.vec(b.lifting.F_c);
  Vec2 inlet = Vec2::Zero();
  for (std::size_t p = 0; p < b.lifting.phi_c.bc.size(); ++p)
    if (b.lifting.phi_c.bc[p].kind == BcKind::FixedValue && b.lifting.phi_c.bc[p].value.norm() > 0)
      inlet = b.lifting.phi_c.bc[p].value;
  w.f64(inlet.x());
  w.f64(inlet.y());
  write_archive(path, kBasisMagic, w);
}

PodBasis read_basis(const fs::path& path, const Mesh& mesh) {
  RawArchive a = load_archive(path, kBasisMagic);
  Reader r(std::move(a.payload), path);
  PodBasis b;
  b.mesh_hash = r.u64();
  if (b.mesh_hash != mesh.hash())
    throw StaleArtifact("basis " + path.string() + " was built on a different mesh");
  b.n_snapshots = r.i64();
  const Index nu = r.i64(), np = r.i64();
  b.phi = r.mat();
  b.psi = r.mat();
  b.chi = r.mat();
  b.lambda_u = r.vec();
  b.lambda_p = r.vec();
  b.Q_u = r.mat();
  b.Q_p = r.mat();
  b.p_mean = r.vec();
  b.lifting.reference_face = r.i64();
  b.lifting.reference_value = r.f64();
  const Eigen::VectorXd phic = r.vec();
  b.lifting.F_c = r.vec();
  const double ix = r.f64(), iy = r.f64();
  r.finish();
  if (b.phi.cols() != nu || b.chi.cols() != np || b.psi.cols() != nu || b.phi.rows() != 2 * mesh.n_cells() ||
      b.chi.rows() != mesh.n_cells() || b.psi.rows() != mesh.n_faces() || phic.size() != 2 * mesh.n_cells() ||
      b.lifting.F_c.size() != mesh.n_faces() || b.p_mean.size() != mesh.n_cells())
    throw DimensionMismatch("basis " + path.string() + " has inconsistent dimensions");
  b.lifting.phi_c.values = unflatten(phic);
  b.lifting.phi_c.bc = velocity_bc(mesh, Vec2(ix, iy));
  b.velocity_mode_bc = homogeneous_velocity_bc(mesh);
  b.pressure_mode_bc = pressure_bc(mesh, 0.0);
  b.p_mean_bc = pressure_bc(mesh, 0.0);
  return b;
}

void write_rom(const fs::path& path, const ReducedSystem& s) {
  const ReducedBlocks& k = s.blocks;
  k.validate();
  Writer w;
  w.u64(k.basis_hash);
  w.i64(k.n_u());
  w.i64(k.n_p());
  w.f64(s.nu);
  w.f64(s.u_D);
  w.f64(k.cond_D);
  w.f64(k.tikhonov_shift);
  w.mat(k.B);
  w.tensor(k.C);
  w.mat(k.K);
  w.vec(k.K0);
  w.mat(k.D);
  w.vec(k.E);
  w.tensor(k.G);
  w.vec(k.A1);
  w.vec(k.A2);
  w.mat(k.B1);
  w.mat(k.B2);
  w.vec(k.E1);
  w.mat(k.F1);
  w.mat(k.F2);
  w.vec(s.A_BC);
  w.mat(s.B_BC);
  w.vec(s.E_BC);
  w.mat(s.F_BC);
  write_archive(path, kRomMagic, w);
}

ReducedSystem read_rom(const fs::path& path, std::optional<std::uint64_t> expected_basis_hash) {
  RawArchive a = load_archive(path, kRomMagic);
  Reader r(std::move(a.payload), path);
  ReducedBlocks k;
  k.basis_hash = r.u64();
  if (expected_basis_hash && *expected_basis_hash != k.basis_hash)
    throw StaleArtifact("reduced operators " + path.string() + " were assembled from a different basis");
  const Index nu = r.i64(), np = r.i64();
  const double nu_visc = r.f64(), u_D = r.f64();
  k.cond_D = r.f64();
  k.tikhonov_shift = r.f64();
  k.B = r.mat();
  k.C = r.tensor();
  k.K = r.mat();
  k.K0 = r.vec();
  k.D = r.mat();
  k.E = r.vec();
  k.G = r.tensor();
  k.A1 = r.vec();
  k.A2 = r.vec();
  k.B1 = r.mat();
  k.B2 = r.mat();
  k.E1 = r.vec();
  k.F1 = r.mat();
  k.F2 = r.mat();
  // Composed terms are stored for inspection; they are recomputed from the raw blocks.
  r.vec();
  r.mat();
  r.vec();
  r.mat();
  r.finish();
  if (k.B.rows() != nu || k.D.rows() != np)
    throw DimensionMismatch("reduced operators " + path.string() + " have inconsistent dimensions");
  return compose_system(std::move(k), nu_visc, u_D);
}

std::uint64_t archive_hash(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInput("missing input file: " + path.string());
  std::string line;
  std::getline(in, line);
  std::uint64_t h = 0;
  in.read(reinterpret_cast<char*>(&h), sizeof h);
  if (!in) throw InvalidArgument("corrupt archive " + path.string());
  return to_little(h);
}

void write_forces_csv(const fs::path& path, const ForceHistory& h) {
  if (h.t.size() != h.drag.size() || h.t.size() != h.lift.size())
    throw DimensionMismatch("force history columns differ in length");
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << "t,Dc,Lc\n" << std::setprecision(17);
  for (std::size_t i = 0; i < h.t.size(); ++i) out << h.t[i] << ',' << h.drag[i] << ',' << h.lift[i] << '\n';
}

ForceHistory read_forces_csv(const fs::path& path) {
  std::ifstream in = open_text(path);
  std::string line;
  std::getline(in, line);
  if (line.rfind("t,Dc,Lc", 0) != 0) throw InvalidArgument(path.string() + ": expected header t,Dc,Lc");
  ForceHistory h;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto row = parse_csv_row(line, path);
    if (row.size() != 3) throw InvalidArgument(path.string() + ": expected 3 columns");
    h.t.push_back(row[0]);
    h.drag.push_back(row[1]);
    h.lift.push_back(row[2]);
  }
  return h;
}

void write_coefficients_csv(const fs::path& path, const std::vector<ReducedState>& states) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  const Index nu = states.empty() ? 0 : states.front().a.size();
  const Index np = states.empty() ? 0 : states.front().b.size();
  out << 't';
  for (Index i = 1; i <= nu; ++i) out << ",a_" << i;
  for (Index i = 1; i <= np; ++i) out << ",b_" << i;
  out << '\n' << std::setprecision(17);
  for (const auto& s : states) {
    if (s.a.size() != nu || s.b.size() != np) throw DimensionMismatch("coefficient rows differ in size");
    out << s.t;
    for (Index i = 0; i < nu; ++i) out << ',' << s.a(i);
    for (Index i = 0; i < np; ++i) out << ',' << s.b(i);
    out << '\n';
  }
}

std::vector<ReducedState> read_coefficients_csv(const fs::path& path) {
  std::ifstream in = open_text(path);
  std::string header;
  std::getline(in, header);
  Index nu = 0, np = 0;
  {
    std::stringstream ss(header);
    std::string cell;
    std::getline(ss, cell, ',');
    if (cell != "t") throw InvalidArgument(path.string() + ": expected a t column first");
    while (std::getline(ss, cell, ',')) {
      if (cell.rfind("a_", 0) == 0) ++nu;
      else if (cell.rfind("b_", 0) == 0) ++np;
      else throw InvalidArgument(path.string() + ": unexpected column " + cell);
    }
  }
  std::vector<ReducedState> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto row = parse_csv_row(line, path);
    if (static_cast<Index>(row.size()) != 1 + nu + np) throw InvalidArgument(path.string() + ": ragged row");
    ReducedState s;
    s.t = row[0];
    s.a = Eigen::Map<const Eigen::VectorXd>(row.data() + 1, nu);
    s.b = Eigen::Map<const Eigen::VectorXd>(row.data() + 1 + nu, np);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace podfv

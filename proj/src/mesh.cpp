#include "podfv/mesh.hpp"

#include "podfv/error.hpp"
#include "podfv/hash.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace podfv {

std::pair<Vec2, Vec2> orthogonality_decomposition(const Vec2& area, const Vec2& d,
                                                  NonOrthogonalVariant variant) {
  const double s = area.norm();
  if (s == 0.0) throw InvalidArgument("degenerate face: zero area vector");
  const double dn = d.norm();
  if (dn == 0.0) throw InvalidArgument("degenerate face: coincident cell centres");
  const Vec2 e = d / dn;
  Vec2 delta;
  switch (variant) {
    case NonOrthogonalVariant::MinimumCorrection:
      delta = e.dot(area) * e;
      break;
    case NonOrthogonalVariant::OrthogonalCorrection:
      delta = s * e;
      break;
    case NonOrthogonalVariant::OverRelaxed: {
      const double c = e.dot(area);
      if (c <= 0.0) throw InvalidArgument("over-relaxed decomposition needs e.S > 0");
      delta = (s * s / c) * e;
      break;
    }
  }
  return {delta, area - delta};
}

Mesh::Mesh(std::vector<Vec2> cell_centers, std::vector<double> cell_volumes, std::vector<Face> faces,
           std::vector<BoundaryPatch> patches, NonOrthogonalVariant variant)
    : centers_(std::move(cell_centers)),
      volumes_(Eigen::Map<const Eigen::VectorXd>(cell_volumes.data(),
                                                 static_cast<Index>(cell_volumes.size()))),
      faces_(std::move(faces)),
      patches_(std::move(patches)),
      variant_(variant) {
  const auto nc = static_cast<Index>(centers_.size());
  if (volumes_.size() != nc) throw DimensionMismatch("cell centre/volume count mismatch");
  for (Index i = 0; i < nc; ++i)
    if (!(volumes_[i] > 0.0)) throw InvalidArgument("non-positive cell volume at cell " + std::to_string(i));

  // Boundary faces must belong to exactly one patch.
  std::vector<int> owner_count(faces_.size(), 0);
  for (std::size_t p = 0; p < patches_.size(); ++p)
    for (Index f : patches_[p].faces) {
      if (f < 0 || f >= static_cast<Index>(faces_.size())) throw InvalidArgument("patch face out of range");
      faces_[static_cast<std::size_t>(f)].patch = static_cast<Index>(p);
      ++owner_count[static_cast<std::size_t>(f)];
    }

  n_internal_ = 0;
  bool boundary_seen = false;
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    Face& face = faces_[f];
    if (face.owner < 0 || face.owner >= nc) throw InvalidArgument("face owner out of range");
    if (face.internal()) {
      if (boundary_seen) throw InvalidArgument("internal faces must precede boundary faces");
      if (face.neighbour >= nc) throw InvalidArgument("face neighbour out of range");
      if (owner_count[f] != 0) throw InvalidArgument("internal face listed in a patch");
      ++n_internal_;
      const Vec2& xp = centers_[static_cast<std::size_t>(face.owner)];
      const Vec2& xn = centers_[static_cast<std::size_t>(face.neighbour)];
      face.d = xn - xp;
      const double dp = (face.center - xp).norm();
      const double dn = (xn - face.center).norm();
      face.weight = dn / (dp + dn);
    } else {
      boundary_seen = true;
      if (owner_count[f] != 1)
        throw InvalidArgument("boundary face " + std::to_string(f) + " must belong to exactly one patch");
      face.d = face.center - centers_[static_cast<std::size_t>(face.owner)];
      face.weight = 1.0;
    }
    std::tie(face.delta, face.k) = orthogonality_decomposition(face.area, face.d, variant_);
  }

  // Cell-to-face adjacency in CSR layout.
  std::vector<std::size_t> counts(static_cast<std::size_t>(nc) + 1, 0);
  for (const Face& face : faces_) {
    ++counts[static_cast<std::size_t>(face.owner) + 1];
    if (face.internal()) ++counts[static_cast<std::size_t>(face.neighbour) + 1];
  }
  for (std::size_t i = 1; i < counts.size(); ++i) counts[i] += counts[i - 1];
  cell_face_offsets_ = counts;
  cell_face_list_.resize(counts.back());
  std::vector<std::size_t> fill(counts.begin(), counts.end() - 1);
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const Face& face = faces_[f];
    cell_face_list_[fill[static_cast<std::size_t>(face.owner)]++] = {static_cast<Index>(f), face.neighbour, 1.0};
    if (face.internal())
      cell_face_list_[fill[static_cast<std::size_t>(face.neighbour)]++] = {static_cast<Index>(f), face.owner, -1.0};
  }

  // Closed cells: the outward area vectors of each cell sum to zero.
  for (Index c = 0; c < nc; ++c) {
    Vec2 sum = Vec2::Zero();
    double perimeter = 0.0;
    for (const CellFace& cf : cell_faces(c)) {
      sum += cf.sign * face(cf.face).area;
      perimeter += face(cf.face).area.norm();
    }
    if (sum.norm() > 1e-12 * std::max(perimeter, 1.0))
      throw InvalidArgument("cell " + std::to_string(c) + " is not closed");
  }
}

std::span<const CellFace> Mesh::cell_faces(Index cell) const {
  const auto c = static_cast<std::size_t>(cell);
  return {cell_face_list_.data() + cell_face_offsets_[c], cell_face_offsets_[c + 1] - cell_face_offsets_[c]};
}

std::optional<Index> Mesh::find_patch(const std::string& name) const {
  for (std::size_t p = 0; p < patches_.size(); ++p)
    if (patches_[p].name == name) return static_cast<Index>(p);
  return std::nullopt;
}

Index Mesh::patch_id(const std::string& name) const {
  if (auto p = find_patch(name)) return *p;
  throw InvalidArgument("mesh has no patch named '" + name + "'");
}

std::vector<Index> Mesh::patches_of_kind(PatchKind kind) const {
  std::vector<Index> out;
  for (std::size_t p = 0; p < patches_.size(); ++p)
    if (patches_[p].kind == kind) out.push_back(static_cast<Index>(p));
  return out;
}

std::uint64_t Mesh::hash() const {
  Hasher h;
  h.value(n_cells());
  h.value(n_faces());
  for (const Vec2& c : centers_) h.values({c.data(), 2});
  h.values({volumes_.data(), static_cast<std::size_t>(volumes_.size())});
  for (const Face& f : faces_) {
    h.values({f.area.data(), 2});
    h.values({f.center.data(), 2});
    h.value(f.owner);
    h.value(f.neighbour);
    h.value(f.patch);
  }
  for (const BoundaryPatch& p : patches_) {
    h.text(p.name);
    h.value(static_cast<std::int64_t>(p.kind));
  }
  return h.digest();
}

namespace {

bool is_integer_multiple(double x, double h, long& n) {
  const double r = x / h;
  n = std::lround(r);
  return std::abs(r - static_cast<double>(n)) < 1e-9;
}

}  // namespace

Mesh generate_channel_mesh(const ChannelSpec& spec) {
  if (spec.nx < 2 || spec.ny < 2) throw InvalidArgument("channel mesh needs nx, ny >= 2");
  if (!(spec.lx > 0.0 && spec.ly > 0.0)) throw InvalidArgument("channel lengths must be positive");
  if (spec.side_kind != PatchKind::Slip && spec.side_kind != PatchKind::Wall)
    throw InvalidArgument("side patches must be slip or wall");
  const double hx = spec.lx / spec.nx;
  const double hy = spec.ly / spec.ny;

  long i0 = 0, i1 = 0, j0 = 0, j1 = 0;
  if (spec.obstacle) {
    const Rect& r = *spec.obstacle;
    if (!(r.x1 > r.x0 && r.y1 > r.y0)) throw InvalidArgument("obstacle rectangle is empty");
    if (!is_integer_multiple(r.x0, hx, i0) || !is_integer_multiple(r.x1, hx, i1) ||
        !is_integer_multiple(r.y0, hy, j0) || !is_integer_multiple(r.y1, hy, j1)) {
      std::ostringstream msg;
      msg << "obstacle [" << r.x0 << "," << r.x1 << "]x[" << r.y0 << "," << r.y1
          << "] is not aligned to cell boundaries (hx=" << hx << ", hy=" << hy << ")";
      throw InvalidArgument(msg.str());
    }
    if (i0 <= 0 || j0 <= 0 || i1 >= spec.nx || j1 >= spec.ny)
      throw InvalidArgument("obstacle touches or crosses the outer boundary");
  }
  auto solid = [&](long i, long j) {
    return spec.obstacle && i >= i0 && i < i1 && j >= j0 && j < j1;
  };

  std::vector<Index> id(static_cast<std::size_t>(spec.nx * spec.ny), -1);
  std::vector<Vec2> centers;
  std::vector<double> volumes;
  for (long j = 0; j < spec.ny; ++j)
    for (long i = 0; i < spec.nx; ++i) {
      if (solid(i, j)) continue;
      id[static_cast<std::size_t>(j * spec.nx + i)] = static_cast<Index>(centers.size());
      centers.emplace_back((static_cast<double>(i) + 0.5) * hx, (static_cast<double>(j) + 0.5) * hy);
      volumes.push_back(hx * hy);
    }
  auto cell = [&](long i, long j) { return id[static_cast<std::size_t>(j * spec.nx + i)]; };

  std::vector<Face> faces;
  // Internal faces, row by row: east face then north face of each cell.
  for (long j = 0; j < spec.ny; ++j)
    for (long i = 0; i < spec.nx; ++i) {
      const Index c = cell(i, j);
      if (c < 0) continue;
      if (i + 1 < spec.nx && cell(i + 1, j) >= 0) {
        Face f;
        f.area = {hy, 0.0};
        f.center = {(static_cast<double>(i) + 1.0) * hx, (static_cast<double>(j) + 0.5) * hy};
        f.owner = c;
        f.neighbour = cell(i + 1, j);
        faces.push_back(f);
      }
      if (j + 1 < spec.ny && cell(i, j + 1) >= 0) {
        Face f;
        f.area = {0.0, hx};
        f.center = {(static_cast<double>(i) + 0.5) * hx, (static_cast<double>(j) + 1.0) * hy};
        f.owner = c;
        f.neighbour = cell(i, j + 1);
        faces.push_back(f);
      }
    }

  std::vector<BoundaryPatch> patches;
  auto add_face = [&](BoundaryPatch& p, Index owner, Vec2 area, Vec2 center) {
    Face f;
    f.area = area;
    f.center = center;
    f.owner = owner;
    p.faces.push_back(static_cast<Index>(faces.size()));
    faces.push_back(f);
  };
  {
    BoundaryPatch p{"inlet", PatchKind::Inlet, {}};
    for (long j = 0; j < spec.ny; ++j)
      add_face(p, cell(0, j), {-hy, 0.0}, {0.0, (static_cast<double>(j) + 0.5) * hy});
    patches.push_back(std::move(p));
  }
  {
    BoundaryPatch p{"outlet", PatchKind::Outlet, {}};
    for (long j = 0; j < spec.ny; ++j)
      add_face(p, cell(spec.nx - 1, j), {hy, 0.0}, {spec.lx, (static_cast<double>(j) + 0.5) * hy});
    patches.push_back(std::move(p));
  }
  {
    BoundaryPatch p{"bottom", spec.side_kind, {}};
    for (long i = 0; i < spec.nx; ++i)
      add_face(p, cell(i, 0), {0.0, -hx}, {(static_cast<double>(i) + 0.5) * hx, 0.0});
    patches.push_back(std::move(p));
  }
  {
    BoundaryPatch p{"top", spec.side_kind, {}};
    for (long i = 0; i < spec.nx; ++i)
      add_face(p, cell(i, spec.ny - 1), {0.0, hx}, {(static_cast<double>(i) + 0.5) * hx, spec.ly});
    patches.push_back(std::move(p));
  }
  if (spec.obstacle) {
    BoundaryPatch p{"cylinder", PatchKind::Wall, {}};
    // Walk the body outline: front, back, bottom, top.
    for (long j = j0; j < j1; ++j) {
      const double yc = (static_cast<double>(j) + 0.5) * hy;
      add_face(p, cell(i0 - 1, j), {hy, 0.0}, {static_cast<double>(i0) * hx, yc});
    }
    for (long j = j0; j < j1; ++j) {
      const double yc = (static_cast<double>(j) + 0.5) * hy;
      add_face(p, cell(i1, j), {-hy, 0.0}, {static_cast<double>(i1) * hx, yc});
    }
    for (long i = i0; i < i1; ++i) {
      const double xc = (static_cast<double>(i) + 0.5) * hx;
      add_face(p, cell(i, j0 - 1), {0.0, hx}, {xc, static_cast<double>(j0) * hy});
    }
    for (long i = i0; i < i1; ++i) {
      const double xc = (static_cast<double>(i) + 0.5) * hx;
      add_face(p, cell(i, j1), {0.0, -hx}, {xc, static_cast<double>(j1) * hy});
    }
    patches.push_back(std::move(p));
  }
  return Mesh(std::move(centers), std::move(volumes), std::move(faces), std::move(patches));
}

const char* to_string(PatchKind kind) {
  switch (kind) {
    case PatchKind::Inlet: return "inlet";
    case PatchKind::Outlet: return "outlet";
    case PatchKind::Wall: return "wall";
    case PatchKind::Slip: return "slip";
  }
  return "?";
}

PatchKind patch_kind_from_string(const std::string& name) {
  static const std::map<std::string, PatchKind> kinds{
      {"inlet", PatchKind::Inlet}, {"outlet", PatchKind::Outlet}, {"wall", PatchKind::Wall}, {"slip", PatchKind::Slip}};
  auto it = kinds.find(name);
  if (it == kinds.end()) throw InvalidArgument("unknown patch kind '" + name + "'");
  return it->second;
}

// Text layout:
//   podfv-mesh v1
//   <n_cells>
//   <x> <y> <volume>                                  (one line per cell)
//   <n_faces>
//   <Sx> <Sy> <owner> <neighbour|-1> <cx> <cy>          (one line per face)
//   <n_patches>
//   <name> <kind> <n_faces> <face ids...>             (one line per patch)
void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << "podfv-mesh v1\n" << std::setprecision(17);
  os << mesh.n_cells() << '\n';
  for (Index c = 0; c < mesh.n_cells(); ++c) {
    const Vec2& x = mesh.cell_centers()[static_cast<std::size_t>(c)];
    os << x.x() << ' ' << x.y() << ' ' << mesh.cell_volumes()[c] << '\n';
  }
  os << mesh.n_faces() << '\n';
  for (const Face& f : mesh.faces())
    os << f.area.x() << ' ' << f.area.y() << ' ' << f.owner << ' ' << f.neighbour << ' ' << f.center.x() << ' '
       << f.center.y() << '\n';
  os << mesh.patches().size() << '\n';
  for (const BoundaryPatch& p : mesh.patches()) {
    os << p.name << ' ' << to_string(p.kind) << ' ' << p.faces.size();
    for (Index f : p.faces) os << ' ' << f;
    os << '\n';
  }
}

Mesh read_mesh(std::istream& is) {
  std::string header;
  std::getline(is, header);
  if (header != "podfv-mesh v1") throw InvalidArgument("not a podfv-mesh v1 file");
  auto fail = [] { throw InvalidArgument("truncated or malformed mesh file"); };
  Index nc = 0;
  if (!(is >> nc) || nc <= 0) fail();
  std::vector<Vec2> centers(static_cast<std::size_t>(nc));
  std::vector<double> volumes(static_cast<std::size_t>(nc));
  for (Index c = 0; c < nc; ++c) {
    auto& x = centers[static_cast<std::size_t>(c)];
    if (!(is >> x.x() >> x.y() >> volumes[static_cast<std::size_t>(c)])) fail();
  }
  Index nf = 0;
  if (!(is >> nf) || nf <= 0) fail();
  std::vector<Face> faces(static_cast<std::size_t>(nf));
  for (Face& f : faces)
    if (!(is >> f.area.x() >> f.area.y() >> f.owner >> f.neighbour >> f.center.x() >> f.center.y())) fail();
  std::size_t np = 0;
  if (!(is >> np)) fail();
  std::vector<BoundaryPatch> patches(np);
  for (BoundaryPatch& p : patches) {
    std::string kind;
    std::size_t n = 0;
    if (!(is >> p.name >> kind >> n)) fail();
    p.kind = patch_kind_from_string(kind);
    p.faces.resize(n);
    for (Index& f : p.faces)
      if (!(is >> f)) fail();
  }
  return Mesh(std::move(centers), std::move(volumes), std::move(faces), std::move(patches));
}

}  // namespace podfv

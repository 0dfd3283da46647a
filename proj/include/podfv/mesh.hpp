#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace podfv {

using Vec2 = Eigen::Vector2d;
using Index = std::int64_t;

enum class PatchKind { Inlet, Outlet, Wall, Slip };

/// Split of the face area vector into a part along the centre-to-centre
/// direction and a remainder handled as an explicit correction.
enum class NonOrthogonalVariant { MinimumCorrection, OrthogonalCorrection, OverRelaxed };

struct Face {
  Vec2 area = Vec2::Zero();    // S_f, points out of the owner
  Vec2 center = Vec2::Zero();
  Index owner = -1;
  Index neighbour = -1;        // -1 on boundary faces
  Index patch = -1;            // -1 on internal faces
  Vec2 d = Vec2::Zero();       // owner centre to neighbour centre (or to face centre on boundary)
  Vec2 delta = Vec2::Zero();   // orthogonal part, parallel to d
  Vec2 k = Vec2::Zero();       // non-orthogonal remainder, delta + k == area
  double weight = 1.0;         // owner interpolation weight

  bool internal() const { return neighbour >= 0; }
};

struct BoundaryPatch {
  std::string name;
  PatchKind kind = PatchKind::Wall;
  std::vector<Index> faces;
};

/// One entry of a cell's face list. `sign` is +1 when the cell owns the face.
struct CellFace {
  Index face;
  Index other;  // neighbouring cell, -1 on boundary
  double sign;
};

/// Returns (delta, k) for a face with area vector `area` and centre vector `d`.
std::pair<Vec2, Vec2> orthogonality_decomposition(const Vec2& area, const Vec2& d,
                                                  NonOrthogonalVariant variant);

/// Immutable finite-volume tessellation. Internal faces come first, followed by
/// boundary faces grouped by patch.
class Mesh {
public:
  Mesh(std::vector<Vec2> cell_centers, std::vector<double> cell_volumes, std::vector<Face> faces,
       std::vector<BoundaryPatch> patches,
       NonOrthogonalVariant variant = NonOrthogonalVariant::OrthogonalCorrection);

  Index n_cells() const { return static_cast<Index>(centers_.size()); }
  Index n_faces() const { return static_cast<Index>(faces_.size()); }
  Index n_internal_faces() const { return n_internal_; }

  const std::vector<Vec2>& cell_centers() const { return centers_; }
  const Eigen::VectorXd& cell_volumes() const { return volumes_; }
  const std::vector<Face>& faces() const { return faces_; }
  const Face& face(Index f) const { return faces_[static_cast<std::size_t>(f)]; }
  const std::vector<BoundaryPatch>& patches() const { return patches_; }
  const BoundaryPatch& patch(Index p) const { return patches_[static_cast<std::size_t>(p)]; }
  std::span<const CellFace> cell_faces(Index cell) const;
  NonOrthogonalVariant variant() const { return variant_; }

  std::optional<Index> find_patch(const std::string& name) const;
  Index patch_id(const std::string& name) const;  // throws if absent
  std::vector<Index> patches_of_kind(PatchKind kind) const;
  double total_volume() const { return volumes_.sum(); }
  double min_volume() const { return volumes_.minCoeff(); }

  /// 64-bit content hash over geometry and topology.
  std::uint64_t hash() const;

private:
  std::vector<Vec2> centers_;
  Eigen::VectorXd volumes_;
  std::vector<Face> faces_;
  std::vector<BoundaryPatch> patches_;
  std::vector<std::size_t> cell_face_offsets_;
  std::vector<CellFace> cell_face_list_;
  Index n_internal_ = 0;
  NonOrthogonalVariant variant_;
};

/// Axis-aligned rectangle in physical coordinates.
struct Rect {
  double x0, y0, x1, y1;
};

struct ChannelSpec {
  int nx = 2;
  int ny = 2;
  double lx = 1.0;
  double ly = 1.0;
  std::optional<Rect> obstacle;
  PatchKind side_kind = PatchKind::Slip;  // kind for the bottom/top patches
};

/// Cartesian channel with an optional blanked rectangular body. Patches are
/// inlet (x=0), outlet (x=lx), bottom, top and, with an obstacle, cylinder.
Mesh generate_channel_mesh(const ChannelSpec& spec);

void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);

const char* to_string(PatchKind kind);
PatchKind patch_kind_from_string(const std::string& name);

}  // namespace podfv

#pragma once

#include "podfv/mesh.hpp"

#include <Eigen/Core>

#include <vector>

namespace podfv {

enum class BcKind { FixedValue, ZeroGradient, Slip };

/// Per-patch boundary condition. Scalars read the fixed value from value.x().
struct PatchBc {
  BcKind kind = BcKind::ZeroGradient;
  Vec2 value = Vec2::Zero();

  static PatchBc fixed(double v) { return {BcKind::FixedValue, Vec2(v, 0.0)}; }
  static PatchBc fixed(const Vec2& v) { return {BcKind::FixedValue, v}; }
  static PatchBc zero_gradient() { return {BcKind::ZeroGradient, Vec2::Zero()}; }
  static PatchBc slip() { return {BcKind::Slip, Vec2::Zero()}; }
};

/// Indexed by patch id; must cover every patch of the mesh.
using BoundarySpec = std::vector<PatchBc>;

using CellVectors = Eigen::Matrix<double, Eigen::Dynamic, 2>;  // n_cells x 2
using FaceField = Eigen::VectorXd;                               // one flux per face

struct ScalarField {
  Eigen::VectorXd values;
  BoundarySpec bc;
};

struct VectorField {
  CellVectors values;
  BoundarySpec bc;
};

/// Bluff-body channel conditions: fixed inlet, zero-gradient outlet, no-slip body.
BoundarySpec velocity_bc(const Mesh& mesh, const Vec2& inlet_value);
BoundarySpec pressure_bc(const Mesh& mesh, double outlet_value = 0.0);
/// Velocity conditions with homogeneous Dirichlet values (modes after lifting).
inline BoundarySpec homogeneous_velocity_bc(const Mesh& mesh) { return velocity_bc(mesh, Vec2::Zero()); }
/// Conditions used for derived vector fields such as the convective
/// acceleration: zero on no-slip walls, mirrored on slip sides, zero-gradient
/// elsewhere.
BoundarySpec derived_vector_bc(const Mesh& mesh);

void check_bc(const Mesh& mesh, const BoundarySpec& bc);

/// Flattened views used for snapshot columns: [x components..., y components...].
inline Eigen::Map<const Eigen::VectorXd> flatten(const CellVectors& v) {
  return {v.data(), v.size()};
}
inline Eigen::Map<const CellVectors> unflatten(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return {v.data(), v.size() / 2, 2};
}

}  // namespace podfv

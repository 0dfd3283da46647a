#include "podfv/fields.hpp"

#include "podfv/error.hpp"

namespace podfv {

BoundarySpec velocity_bc(const Mesh& mesh, const Vec2& inlet_value) {
  BoundarySpec bc;
  for (const BoundaryPatch& p : mesh.patches()) {
    switch (p.kind) {
      case PatchKind::Inlet: bc.push_back(PatchBc::fixed(inlet_value)); break;
      case PatchKind::Outlet: bc.push_back(PatchBc::zero_gradient()); break;
      case PatchKind::Wall: bc.push_back(PatchBc::fixed(Vec2::Zero().eval())); break;
      case PatchKind::Slip: bc.push_back(PatchBc::slip()); break;
    }
  }
  return bc;
}

BoundarySpec pressure_bc(const Mesh& mesh, double outlet_value) {
  BoundarySpec bc;
  for (const BoundaryPatch& p : mesh.patches())
    bc.push_back(p.kind == PatchKind::Outlet ? PatchBc::fixed(outlet_value) : PatchBc::zero_gradient());
  return bc;
}

BoundarySpec derived_vector_bc(const Mesh& mesh) {
  BoundarySpec bc;
  for (const BoundaryPatch& p : mesh.patches()) {
    switch (p.kind) {
      case PatchKind::Wall: bc.push_back(PatchBc::fixed(Vec2::Zero().eval())); break;
      case PatchKind::Slip: bc.push_back(PatchBc::slip()); break;
      default: bc.push_back(PatchBc::zero_gradient()); break;
    }
  }
  return bc;
}

void check_bc(const Mesh& mesh, const BoundarySpec& bc) {
  if (bc.size() != mesh.patches().size())
    throw DimensionMismatch("boundary conditions cover " + std::to_string(bc.size()) + " patches, mesh has " +
                            std::to_string(mesh.patches().size()));
}

}  // namespace podfv

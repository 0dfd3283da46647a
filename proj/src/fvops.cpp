#include "podfv/fvops.hpp"

#include "podfv/error.hpp"

#include <algorithm>
#include <cmath>

namespace podfv {

namespace {

Vec2 unit_normal(const Face& f) { return f.area / f.area.norm(); }

const PatchBc& bc_of(const BoundarySpec& bc, const Face& f) { return bc[static_cast<std::size_t>(f.patch)]; }

void check_length(const Mesh& mesh, Index n) {
  if (n != mesh.n_cells()) throw DimensionMismatch("field length does not match the mesh cell count");
}

void check_flux(const Mesh& mesh, const FaceField* flux, Scheme scheme) {
  if (scheme.needs_flux() && flux == nullptr) throw InvalidArgument("upwind-type schemes need a face flux");
  if (flux && flux->size() != mesh.n_faces()) throw DimensionMismatch("flux length does not match the face count");
}

double owner_weight(const Face& f, Index fi, Scheme scheme, const FaceField* flux) {
  switch (scheme.kind) {
    case InterpKind::Linear: return f.weight;
    case InterpKind::Upwind: return (*flux)[fi] >= 0.0 ? 1.0 : 0.0;
    case InterpKind::Blended: {
      const double up = (*flux)[fi] >= 0.0 ? 1.0 : 0.0;
      return scheme.linear_fraction * f.weight + (1.0 - scheme.linear_fraction) * up;
    }
  }
  return f.weight;
}

// Component-wise face values of a vector field; used for gradients of the
// individual components.
Eigen::VectorXd component_face_values(const Mesh& mesh, const VectorField& field, int comp) {
  Eigen::VectorXd out(mesh.n_faces());
  for (Index fi = 0; fi < mesh.n_faces(); ++fi) {
    const Face& f = mesh.face(fi);
    if (f.internal())
      out[fi] = f.weight * field.values(f.owner, comp) + (1.0 - f.weight) * field.values(f.neighbour, comp);
    else
      out[fi] = boundary_value(mesh, field, fi)[comp];
  }
  return out;
}

bool has_non_orthogonality(const Mesh& mesh) {
  return std::any_of(mesh.faces().begin(), mesh.faces().end(), [](const Face& f) { return f.k.squaredNorm() > 0.0; });
}

}  // namespace

double boundary_value(const Mesh& mesh, const ScalarField& field, Index face) {
  const Face& f = mesh.face(face);
  const PatchBc& bc = bc_of(field.bc, f);
  if (bc.kind == BcKind::FixedValue) return bc.value.x();
  return field.values[f.owner];
}

Vec2 boundary_value(const Mesh& mesh, const VectorField& field, Index face) {
  const Face& f = mesh.face(face);
  const PatchBc& bc = bc_of(field.bc, f);
  const Vec2 up = field.values.row(f.owner).transpose();
  switch (bc.kind) {
    case BcKind::FixedValue: return bc.value;
    case BcKind::ZeroGradient: return up;
    case BcKind::Slip: {
      const Vec2 n = unit_normal(f);
      return up - up.dot(n) * n;
    }
  }
  return up;
}

Eigen::VectorXd interpolate_to_faces(const Mesh& mesh, const ScalarField& field, Scheme scheme,
                                     const FaceField* flux) {
  check_length(mesh, field.values.size());
  check_bc(mesh, field.bc);
  check_flux(mesh, flux, scheme);
  Eigen::VectorXd out(mesh.n_faces());
  for (Index fi = 0; fi < mesh.n_faces(); ++fi) {
    const Face& f = mesh.face(fi);
    if (f.internal()) {
      const double w = owner_weight(f, fi, scheme, flux);
      out[fi] = w * field.values[f.owner] + (1.0 - w) * field.values[f.neighbour];
    } else {
      out[fi] = boundary_value(mesh, field, fi);
    }
  }
  return out;
}

CellVectors interpolate_to_faces(const Mesh& mesh, const VectorField& field, Scheme scheme, const FaceField* flux) {
  check_length(mesh, field.values.rows());
  check_bc(mesh, field.bc);
  check_flux(mesh, flux, scheme);
  CellVectors out(mesh.n_faces(), 2);
  for (Index fi = 0; fi < mesh.n_faces(); ++fi) {
    const Face& f = mesh.face(fi);
    if (f.internal()) {
      const double w = owner_weight(f, fi, scheme, flux);
      out.row(fi) = w * field.values.row(f.owner) + (1.0 - w) * field.values.row(f.neighbour);
    } else {
      out.row(fi) = boundary_value(mesh, field, fi).transpose();
    }
  }
  return out;
}

Eigen::VectorXd interpolate_limited(const Mesh& mesh, const ScalarField& field) {
  Eigen::VectorXd out = interpolate_to_faces(mesh, field, Scheme::linear());
  for (Index fi = 0; fi < mesh.n_internal_faces(); ++fi) {
    const Face& f = mesh.face(fi);
    const double a = field.values[f.owner];
    const double b = field.values[f.neighbour];
    out[fi] = std::clamp(out[fi], std::min(a, b), std::max(a, b));
  }
  return out;
}

CellVectors gauss_gradient(const Mesh& mesh, const Eigen::VectorXd& face_values) {
  if (face_values.size() != mesh.n_faces()) throw DimensionMismatch("face value count does not match the mesh");
  CellVectors grad = CellVectors::Zero(mesh.n_cells(), 2);
  for (Index fi = 0; fi < mesh.n_faces(); ++fi) {
    const Face& f = mesh.face(fi);
    const Vec2 s = f.area * face_values[fi];
    grad.row(f.owner) += s.transpose();
    if (f.internal()) grad.row(f.neighbour) -= s.transpose();
  }
  grad.array().colwise() /= mesh.cell_volumes().array();
  return grad;
}

CellVectors gauss_gradient(const Mesh& mesh, const ScalarField& field) {
  return gauss_gradient(mesh, interpolate_to_faces(mesh, field, Scheme::linear()));
}

FaceField face_flux(const Mesh& mesh, const VectorField& u) {
  const CellVectors uf = interpolate_to_faces(mesh, u, Scheme::linear());
  FaceField flux(mesh.n_faces());
  for (Index fi = 0; fi < mesh.n_faces(); ++fi) flux[fi] = mesh.face(fi).area.dot(uf.row(fi).transpose());
  return flux;
}

CellVectors convection(const Mesh& mesh, const FaceField& flux, const VectorField& u, Scheme scheme) {
  if (flux.size() != mesh.n_faces()) throw DimensionMismatch("flux length does not match the face count");
  const CellVectors uf = interpolate_to_faces(mesh, u, scheme, &flux);
  CellVectors out = CellVectors::Zero(mesh.n_cells(), 2);
  for (Index fi = 0; fi < mesh.n_faces(); ++fi) {
    const Face& f = mesh.face(fi);
    const auto c = flux[fi] * uf.row(fi);
    out.row(f.owner) += c;
    if (f.internal()) out.row(f.neighbour) -= c;
  }
  out.array().colwise() /= mesh.cell_volumes().array();
  return out;
}

Eigen::VectorXd laplacian(const Mesh& mesh, double nu, const ScalarField& field) {
  check_length(mesh, field.values.size());
  check_bc(mesh, field.bc);
  const bool correct = has_non_orthogonality(mesh);
  CellVectors grad;
  if (correct) grad = gauss_gradient(mesh, field);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.n_cells());
  for (Index fi = 0; fi < mesh.n_faces(); ++fi) {
    const Face& f = mesh.face(fi);
    const double up = field.values[f.owner];
    double snflux;
    if (f.internal()) {
      snflux = f.delta.norm() * (field.values[f.neighbour] - up) / f.d.norm();
      if (correct) {
        const Vec2 gf = (f.weight * grad.row(f.owner) + (1.0 - f.weight) * grad.row(f.neighbour)).transpose();
        snflux += f.k.dot(gf);
      }
      out[f.owner] += nu * snflux;
      out[f.neighbour] -= nu * snflux;
    } else {
      if (bc_of(field.bc, f).kind != BcKind::FixedValue) continue;
      snflux = f.delta.norm() * (boundary_value(mesh, field, fi) - up) / f.d.norm();
      if (correct) snflux += f.k.dot(grad.row(f.owner).transpose());
      out[f.owner] += nu * snflux;
    }
  }
  return out.cwiseQuotient(mesh.cell_volumes());
}

CellVectors laplacian(const Mesh& mesh, double nu, const VectorField& field) {
  check_length(mesh, field.values.rows());
  check_bc(mesh, field.bc);
  const bool correct = has_non_orthogonality(mesh);
  CellVectors gx, gy;
  if (correct) {
    gx = gauss_gradient(mesh, component_face_values(mesh, field, 0));
    gy = gauss_gradient(mesh, component_face_values(mesh, field, 1));
  }
  auto face_gradient_dot = [&](const Face& f, const Vec2& k) {
    Vec2 r;
    if (f.internal()) {
      r.x() = k.dot((f.weight * gx.row(f.owner) + (1.0 - f.weight) * gx.row(f.neighbour)).transpose());
      r.y() = k.dot((f.weight * gy.row(f.owner) + (1.0 - f.weight) * gy.row(f.neighbour)).transpose());
    } else {
      r.x() = k.dot(gx.row(f.owner).transpose());
      r.y() = k.dot(gy.row(f.owner).transpose());
    }
    return r;
  };
  CellVectors out = CellVectors::Zero(mesh.n_cells(), 2);
  for (Index fi = 0; fi < mesh.n_faces(); ++fi) {
    const Face& f = mesh.face(fi);
    const Vec2 up = field.values.row(f.owner).transpose();
    Vec2 snflux;
    if (f.internal()) {
      snflux = f.delta.norm() * (field.values.row(f.neighbour).transpose() - up) / f.d.norm();
      if (correct) snflux += face_gradient_dot(f, f.k);
      out.row(f.owner) += nu * snflux.transpose();
      out.row(f.neighbour) -= nu * snflux.transpose();
    } else {
      const BcKind kind = bc_of(field.bc, f).kind;
      if (kind == BcKind::ZeroGradient) continue;
      snflux = f.delta.norm() * (boundary_value(mesh, field, fi) - up) / f.d.norm();
      if (correct && kind == BcKind::FixedValue) snflux += face_gradient_dot(f, f.k);
      out.row(f.owner) += nu * snflux.transpose();
    }
  }
  out.array().colwise() /= mesh.cell_volumes().array();
  return out;
}

Eigen::VectorXd divergence_of_flux(const Mesh& mesh, const FaceField& flux) {
  if (flux.size() != mesh.n_faces()) throw DimensionMismatch("flux length does not match the face count");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.n_cells());
  for (Index fi = 0; fi < mesh.n_faces(); ++fi) {
    const Face& f = mesh.face(fi);
    out[f.owner] += flux[fi];
    if (f.internal()) out[f.neighbour] -= flux[fi];
  }
  return out.cwiseQuotient(mesh.cell_volumes());
}

double inner_product(const Mesh& mesh, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  check_length(mesh, a.size());
  check_length(mesh, b.size());
  return (a.array() * b.array() * mesh.cell_volumes().array()).sum();
}

double inner_product(const Mesh& mesh, const CellVectors& a, const CellVectors& b) {
  check_length(mesh, a.rows());
  check_length(mesh, b.rows());
  return ((a.array() * b.array()).rowwise().sum() * mesh.cell_volumes().array()).sum();
}

double grad_inner_product(const Mesh& mesh, const ScalarField& p, const ScalarField& q) {
  return inner_product(mesh, gauss_gradient(mesh, p), gauss_gradient(mesh, q));
}

Eigen::VectorXd convection_divergence(const Mesh& mesh, const FaceField& flux, const VectorField& u) {
  VectorField n{convection(mesh, flux, u, Scheme::linear()), derived_vector_bc(mesh)};
  return divergence_of_flux(mesh, face_flux(mesh, n));
}

}  // namespace podfv

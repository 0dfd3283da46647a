#pragma once

#include "podfv/fields.hpp"
#include "podfv/mesh.hpp"

#include <Eigen/Core>

namespace podfv {

enum class InterpKind { Linear, Upwind, Blended };

/// Face interpolation scheme. For the blended scheme `linear_fraction` is the
/// weight of the linear part (1 = pure linear, 0 = pure upwind).
struct Scheme {
  InterpKind kind = InterpKind::Linear;
  double linear_fraction = 0.8;

  static Scheme linear() { return {InterpKind::Linear, 1.0}; }
  static Scheme upwind() { return {InterpKind::Upwind, 0.0}; }
  static Scheme blended(double beta = 0.8) { return {InterpKind::Blended, beta}; }
  bool needs_flux() const { return kind != InterpKind::Linear; }
};

/// Boundary face value of a field according to its patch condition.
double boundary_value(const Mesh& mesh, const ScalarField& field, Index face);
Vec2 boundary_value(const Mesh& mesh, const VectorField& field, Index face);

Eigen::VectorXd interpolate_to_faces(const Mesh& mesh, const ScalarField& field, Scheme scheme,
                                     const FaceField* flux = nullptr);
CellVectors interpolate_to_faces(const Mesh& mesh, const VectorField& field, Scheme scheme,
                                 const FaceField* flux = nullptr);

/// Linear interpolation with the face value clamped to the range of the two
/// adjacent cell values.
Eigen::VectorXd interpolate_limited(const Mesh& mesh, const ScalarField& field);

/// Cell gradient from the divergence theorem, sum_f S_f p_f / V.
CellVectors gauss_gradient(const Mesh& mesh, const ScalarField& field);
/// Same, from precomputed face values.
CellVectors gauss_gradient(const Mesh& mesh, const Eigen::VectorXd& face_values);

/// F_f = S_f . u_f with linear interpolation.
FaceField face_flux(const Mesh& mesh, const VectorField& u);

/// Per cell, sum_f F_f u_f / V (outward flux sign).
CellVectors convection(const Mesh& mesh, const FaceField& flux, const VectorField& u, Scheme scheme);

/// Per cell, sum_f nu S_f.(grad u)_f / V with the orthogonal part implicit in
/// form and the k-part as an explicit correction from interpolated gradients.
Eigen::VectorXd laplacian(const Mesh& mesh, double nu, const ScalarField& field);
CellVectors laplacian(const Mesh& mesh, double nu, const VectorField& field);

/// Per cell, sum_f (+/-) F_f / V.
Eigen::VectorXd divergence_of_flux(const Mesh& mesh, const FaceField& flux);

/// Volume-weighted L2 inner products.
double inner_product(const Mesh& mesh, const Eigen::VectorXd& a, const Eigen::VectorXd& b);
double inner_product(const Mesh& mesh, const CellVectors& a, const CellVectors& b);

/// (grad p, grad q) with Gauss gradients.
double grad_inner_product(const Mesh& mesh, const ScalarField& p, const ScalarField& q);

/// div(face_flux(convection(flux, u))) with the convective field closed by
/// derived_vector_bc. The inner convection uses linear interpolation.
Eigen::VectorXd convection_divergence(const Mesh& mesh, const FaceField& flux, const VectorField& u);

}  // namespace podfv

#include "podfv/romassembly.hpp"

#include "podfv/error.hpp"
#include "podfv/fvops.hpp"

#include <Eigen/Eigenvalues>

#include <limits>
#include <string>

namespace podfv {

namespace {

// Volume-weighted projection of a vector cell field onto every velocity mode.
Eigen::VectorXd project_velocity(const Mesh& mesh, const PodBasis& basis, const CellVectors& v) {
  const Eigen::VectorXd w = velocity_weights(mesh);
  return basis.phi.transpose() * w.cwiseProduct(flatten(v));
}

Eigen::VectorXd project_pressure(const Mesh& mesh, const PodBasis& basis, const Eigen::VectorXd& s) {
  return basis.chi.transpose() * mesh.cell_volumes().cwiseProduct(s);
}

void check_basis(const Mesh& mesh, const PodBasis& basis) {
  if (basis.mesh_hash != mesh.hash()) throw StaleArtifact("basis was built on a different mesh");
  if (basis.phi.rows() != 2 * mesh.n_cells() || basis.chi.rows() != mesh.n_cells() ||
      basis.psi.rows() != mesh.n_faces() || basis.psi.cols() != basis.phi.cols())
    throw DimensionMismatch("basis arrays do not match the mesh");
}

void expect(bool ok, const std::string& what) {
  if (!ok) throw DimensionMismatch("reduced blocks: " + what + " has inconsistent dimensions");
}

}  // namespace

Eigen::VectorXd contract(const Tensor3& T, const Eigen::VectorXd& a) {
  Eigen::VectorXd out(static_cast<Index>(T.size()));
  for (std::size_t i = 0; i < T.size(); ++i) out(static_cast<Index>(i)) = a.dot(T[i] * a);
  return out;
}

Eigen::MatrixXd contract_jacobian(const Tensor3& T, const Eigen::VectorXd& a) {
  Eigen::MatrixXd J(static_cast<Index>(T.size()), a.size());
  for (std::size_t i = 0; i < T.size(); ++i)
    J.row(static_cast<Index>(i)) = (T[i] * a + T[i].transpose() * a).transpose();
  return J;
}

void ReducedBlocks::validate() const {
  const Index nu = B.rows(), np = D.rows();
  expect(B.cols() == nu, "B");
  expect(static_cast<Index>(C.size()) == nu, "C");
  for (const auto& s : C) expect(s.rows() == nu && s.cols() == nu, "C");
  expect(K.rows() == nu && K.cols() == np, "K");
  expect(K0.size() == nu, "K0");
  expect(D.cols() == np, "D");
  expect(E.size() == np, "E");
  expect(static_cast<Index>(G.size()) == np, "G");
  for (const auto& s : G) expect(s.rows() == nu && s.cols() == nu, "G");
  expect(A1.size() == nu && A2.size() == nu, "A1/A2");
  expect(B1.rows() == nu && B1.cols() == nu && B2.rows() == nu && B2.cols() == nu, "B1/B2");
  expect(E1.size() == np, "E1");
  expect(F1.rows() == np && F1.cols() == nu && F2.rows() == np && F2.cols() == nu, "F1/F2");
}

ReducedBlocks ReducedBlocks::truncated(int nu, int np) const {
  if (nu < 0 || np < 0 || nu > n_u() || np > n_p())
    throw DimensionMismatch("cannot truncate reduced blocks (" + std::to_string(n_u()) + "," +
                            std::to_string(n_p()) + ") to (" + std::to_string(nu) + "," + std::to_string(np) + ")");
  ReducedBlocks r;
  r.B = B.topLeftCorner(nu, nu);
  for (int i = 0; i < nu; ++i) r.C.push_back(C[static_cast<std::size_t>(i)].topLeftCorner(nu, nu));
  r.K = K.topLeftCorner(nu, np);
  r.K0 = K0.head(nu);
  r.D = D.topLeftCorner(np, np);
  r.E = E.head(np);
  for (int i = 0; i < np; ++i) r.G.push_back(G[static_cast<std::size_t>(i)].topLeftCorner(nu, nu));
  r.A1 = A1.head(nu);
  r.A2 = A2.head(nu);
  r.B1 = B1.topLeftCorner(nu, nu);
  r.B2 = B2.topLeftCorner(nu, nu);
  r.E1 = E1.head(np);
  r.F1 = F1.topLeftCorner(np, nu);
  r.F2 = F2.topLeftCorner(np, nu);
  r.tikhonov_shift = tikhonov_shift;
  r.basis_hash = basis_hash;
  if (np > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.D, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0);
    r.cond_D = lo > 0 ? es.eigenvalues()(np - 1) / lo : std::numeric_limits<double>::infinity();
  }
  return r;
}

Eigen::MatrixXd assemble_B(const Mesh& mesh, const PodBasis& basis) {
  check_basis(mesh, basis);
  const int n = basis.n_u();
  Eigen::MatrixXd B(n, n);
  for (int j = 0; j < n; ++j) B.col(j) = project_velocity(mesh, basis, laplacian(mesh, 1.0, basis.velocity_mode(j)));
  return B;
}

Tensor3 assemble_C(const Mesh& mesh, const PodBasis& basis) {
  check_basis(mesh, basis);
  const int n = basis.n_u();
  Tensor3 C(static_cast<std::size_t>(n), Eigen::MatrixXd::Zero(n, n));
  for (int k = 0; k < n; ++k) {
    const VectorField phik = basis.velocity_mode(k);
    for (int j = 0; j < n; ++j) {
      const FaceField psij = basis.psi.col(j);
      const Eigen::VectorXd proj = project_velocity(mesh, basis, convection(mesh, psij, phik, Scheme::linear()));
      for (int i = 0; i < n; ++i) C[static_cast<std::size_t>(i)](j, k) = proj(i);
    }
  }
  return C;
}

Eigen::MatrixXd assemble_K(const Mesh& mesh, const PodBasis& basis) {
  check_basis(mesh, basis);
  Eigen::MatrixXd K(basis.n_u(), basis.n_p());
  for (int j = 0; j < basis.n_p(); ++j)
    K.col(j) = project_velocity(mesh, basis, gauss_gradient(mesh, basis.pressure_mode(j)));
  return K;
}

Eigen::VectorXd assemble_K0(const Mesh& mesh, const PodBasis& basis) {
  check_basis(mesh, basis);
  return project_velocity(mesh, basis, gauss_gradient(mesh, basis.mean_pressure()));
}

PressureBlock assemble_pressure_block(const Mesh& mesh, const PodBasis& basis) {
  check_basis(mesh, basis);
  const int nu = basis.n_u(), np = basis.n_p();
  const Eigen::VectorXd w = velocity_weights(mesh);
  Eigen::MatrixXd grads(2 * mesh.n_cells(), np);
  for (int i = 0; i < np; ++i) grads.col(i) = flatten(gauss_gradient(mesh, basis.pressure_mode(i)));
  const CellVectors gmean = gauss_gradient(mesh, basis.mean_pressure());

  PressureBlock out;
  out.D = grads.transpose() * w.asDiagonal() * grads;
  out.D = 0.5 * (out.D + out.D.transpose()).eval();
  out.E = grads.transpose() * w.cwiseProduct(flatten(gmean));
  out.G.assign(static_cast<std::size_t>(np), Eigen::MatrixXd::Zero(nu, nu));
  for (int k = 0; k < nu; ++k) {
    const VectorField phik = basis.velocity_mode(k);
    for (int j = 0; j < nu; ++j) {
      const FaceField psij = basis.psi.col(j);
      const Eigen::VectorXd proj = project_pressure(mesh, basis, convection_divergence(mesh, psij, phik));
      for (int i = 0; i < np; ++i) out.G[static_cast<std::size_t>(i)](j, k) = proj(i);
    }
  }
  return out;
}

BcTerms assemble_bc_terms(const Mesh& mesh, const PodBasis& basis) {
  check_basis(mesh, basis);
  const int nu = basis.n_u(), np = basis.n_p();
  const VectorField& phic = basis.lifting.phi_c;
  const FaceField& Fc = basis.lifting.F_c;
  const Scheme lin = Scheme::linear();

  BcTerms t;
  t.A1 = project_velocity(mesh, basis, laplacian(mesh, 1.0, phic));
  t.A2 = project_velocity(mesh, basis, convection(mesh, Fc, phic, lin));
  t.E1 = project_pressure(mesh, basis, convection_divergence(mesh, Fc, phic));
  t.B1.resize(nu, nu);
  t.B2.resize(nu, nu);
  t.F1.resize(np, nu);
  t.F2.resize(np, nu);
  for (int j = 0; j < nu; ++j) {
    const FaceField psij = basis.psi.col(j);
    const VectorField phij = basis.velocity_mode(j);
    t.B1.col(j) = project_velocity(mesh, basis, convection(mesh, psij, phic, lin));
    t.B2.col(j) = project_velocity(mesh, basis, convection(mesh, Fc, phij, lin));
    t.F1.col(j) = project_pressure(mesh, basis, convection_divergence(mesh, psij, phic));
    t.F2.col(j) = project_pressure(mesh, basis, convection_divergence(mesh, Fc, phij));
  }
  return t;
}

ReducedBlocks assemble(const Mesh& mesh, const PodBasis& basis, const AssemblyOptions& options) {
  check_basis(mesh, basis);
  if (basis.n_u() > options.max_modes || basis.n_p() > options.max_modes)
    throw DimensionMismatch("tensor storage guard: at most " + std::to_string(options.max_modes) +
                            " modes per field, got (" + std::to_string(basis.n_u()) + "," +
                            std::to_string(basis.n_p()) + ")");
  ReducedBlocks r;
  r.basis_hash = basis.hash();
  r.B = assemble_B(mesh, basis);
  r.C = assemble_C(mesh, basis);
  r.K = assemble_K(mesh, basis);
  r.K0 = options.mean_pressure_gradient ? assemble_K0(mesh, basis) : Eigen::VectorXd::Zero(basis.n_u());
  auto pb = assemble_pressure_block(mesh, basis);
  r.D = std::move(pb.D);
  r.E = std::move(pb.E);
  r.G = std::move(pb.G);
  auto bc = assemble_bc_terms(mesh, basis);
  r.A1 = std::move(bc.A1);
  r.A2 = std::move(bc.A2);
  r.B1 = std::move(bc.B1);
  r.B2 = std::move(bc.B2);
  r.E1 = std::move(bc.E1);
  r.F1 = std::move(bc.F1);
  r.F2 = std::move(bc.F2);

  const int np = basis.n_p();
  if (np > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.D, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0), hi = es.eigenvalues()(np - 1);
    r.cond_D = lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (r.cond_D > 1e12) {
      r.tikhonov_shift = 1e-12 * r.D.trace() / np;
      r.D.diagonal().array() += r.tikhonov_shift;
    }
  }
  r.validate();
  return r;
}

ReducedSystem compose_system(ReducedBlocks blocks, double nu, double u_D) {
  blocks.validate();
  ReducedSystem s;
  s.nu = nu;
  s.u_D = u_D;
  s.A_BC = nu * u_D * blocks.A1 - u_D * u_D * blocks.A2;
  s.B_BC = -u_D * blocks.B1 - u_D * blocks.B2;
  s.E_BC = u_D * u_D * blocks.E1;
  s.F_BC = u_D * (blocks.F1 + blocks.F2);
  s.blocks = std::move(blocks);
  return s;
}

}  // namespace podfv

#pragma once

#include "podfv/pod.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace podfv {

/// Third-order tensor stored as one N x N slice per leading index:
/// T[i](j, k) = T_ijk.
using Tensor3 = std::vector<Eigen::MatrixXd>;

/// a^T T_i a for every slice.
Eigen::VectorXd contract(const Tensor3& T, const Eigen::VectorXd& a);
/// Row i is a^T (T_i + T_i^T), the derivative of contract(T, a) with respect to a.
Eigen::MatrixXd contract_jacobian(const Tensor3& T, const Eigen::VectorXd& a);

/// Raw projections, independent of nu and u_D.
struct ReducedBlocks {
  Eigen::MatrixXd B;   // (phi_i, lap phi_j)
  Tensor3 C;           // (phi_i, conv(psi_j, phi_k))
  Eigen::MatrixXd K;   // (phi_i, grad chi_j)
  Eigen::VectorXd K0;  // (phi_i, grad p_mean)
  Eigen::MatrixXd D;   // (grad chi_i, grad chi_j)
  Eigen::VectorXd E;   // (grad chi_i, grad p_mean)
  Tensor3 G;           // (chi_i, div conv(psi_j, phi_k))
  Eigen::VectorXd A1, A2;
  Eigen::MatrixXd B1, B2;
  Eigen::VectorXd E1;
  Eigen::MatrixXd F1, F2;
  double cond_D = 0.0;
  double tikhonov_shift = 0.0;  // added to diag(D) when cond(D) > 1e12
  std::uint64_t basis_hash = 0;

  int n_u() const { return static_cast<int>(B.rows()); }
  int n_p() const { return static_cast<int>(D.rows()); }
  /// Throws DimensionMismatch when any block disagrees with (n_u, n_p).
  void validate() const;
  /// Blocks of the leading n_u velocity and n_p pressure modes.
  ReducedBlocks truncated(int n_u, int n_p) const;
};

struct AssemblyOptions {
  /// Project the mean pressure gradient onto the velocity modes.
  bool mean_pressure_gradient = true;
  int max_modes = 64;
};

Eigen::MatrixXd assemble_B(const Mesh& mesh, const PodBasis& basis);
Tensor3 assemble_C(const Mesh& mesh, const PodBasis& basis);
Eigen::MatrixXd assemble_K(const Mesh& mesh, const PodBasis& basis);
Eigen::VectorXd assemble_K0(const Mesh& mesh, const PodBasis& basis);

struct PressureBlock {
  Eigen::MatrixXd D;
  Eigen::VectorXd E;
  Tensor3 G;
};
PressureBlock assemble_pressure_block(const Mesh& mesh, const PodBasis& basis);

struct BcTerms {
  Eigen::VectorXd A1, A2;
  Eigen::MatrixXd B1, B2;
  Eigen::VectorXd E1;
  Eigen::MatrixXd F1, F2;
};
BcTerms assemble_bc_terms(const Mesh& mesh, const PodBasis& basis);

/// All projections for one basis, with the D conditioning check applied.
ReducedBlocks assemble(const Mesh& mesh, const PodBasis& basis, const AssemblyOptions& options = {});

/// Online system for a given viscosity and boundary scaling:
///   da/dt = A_BC - K0 + (nu B + B_BC) a - a^T C a - K b
///   D b   = -E + E_BC + F_BC a + a^T G a
struct ReducedSystem {
  ReducedBlocks blocks;
  double nu = 0.0;
  double u_D = 0.0;
  Eigen::VectorXd A_BC;
  Eigen::MatrixXd B_BC;
  Eigen::VectorXd E_BC;
  Eigen::MatrixXd F_BC;

  int n_u() const { return blocks.n_u(); }
  int n_p() const { return blocks.n_p(); }
};

ReducedSystem compose_system(ReducedBlocks blocks, double nu, double u_D);

}  // namespace podfv

#include "support.hpp"

#include "podfv/error.hpp"
#include "podfv/fvops.hpp"
#include "podfv/romassembly.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include <cmath>

using namespace podfv;
using podfv::test::rel_diff;
using podfv::test::Rng;

namespace {

struct Fixture {
  const Mesh& mesh;
  PodBasis basis;
  ReducedBlocks blocks;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    const Mesh& mesh = test::small_case().mesh;
    PodBasis b = test::small_basis(5, 4);
    ReducedBlocks r = assemble(mesh, b);
    return Fixture{mesh, std::move(b), std::move(r)};
  }();
  return f;
}

Eigen::VectorXd project(const Mesh& m, const PodBasis& b, const CellVectors& v) {
  return b.phi.transpose() * velocity_weights(m).cwiseProduct(flatten(v));
}
Eigen::VectorXd project(const Mesh& m, const PodBasis& b, const Eigen::VectorXd& s) {
  return b.chi.transpose() * m.cell_volumes().cwiseProduct(s);
}

// u_D phi_c + sum a_i phi_i with the matching inlet condition.
VectorField lifted_velocity(const Mesh& m, const PodBasis& b, const Eigen::VectorXd& a, double u_D) {
  const Eigen::VectorXd v = u_D * flatten(b.lifting.phi_c.values) + b.phi * a;
  return {unflatten(v), velocity_bc(m, Vec2(u_D, 0.0))};
}
FaceField lifted_flux(const PodBasis& b, const Eigen::VectorXd& a, double u_D) {
  return u_D * b.lifting.F_c + b.psi * a;
}
VectorField modal_velocity(const PodBasis& b, const Eigen::VectorXd& a) {
  return {unflatten(b.phi * a), b.velocity_mode_bc};
}
ScalarField modal_pressure(const PodBasis& b, const Eigen::VectorXd& c) { return {b.chi * c, b.pressure_mode_bc}; }

}  // namespace

TEST_SUITE("romassembly") {

TEST_CASE("tensor contraction helpers") {
  Tensor3 T{Eigen::Matrix2d{{1, 2}, {3, 4}}, Eigen::Matrix2d{{0, 1}, {0, 0}}};
  const Eigen::Vector2d a(1.0, 2.0);
  const Eigen::VectorXd c = contract(T, a);
  CHECK(c(0) == 1 + 2 * 2 + 3 * 2 + 4 * 4);
  CHECK(c(1) == 2);
  // finite-difference check of the Jacobian
  const Eigen::MatrixXd J = contract_jacobian(T, a);
  const double h = 1e-6;
  for (int k = 0; k < 2; ++k) {
    Eigen::Vector2d e = Eigen::Vector2d::Zero();
    e(k) = h;
    const Eigen::VectorXd fd = (contract(T, a + e) - contract(T, a - e)) / (2 * h);
    CHECK((fd - J.col(k)).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("diffusion block matches the full-order projection") {
  const auto& f = fixture();
  Rng rng(21);
  for (int trial = 0; trial < 4; ++trial) {
    const Eigen::VectorXd a = rng.vector(f.basis.n_u());
    const Eigen::VectorXd direct = project(f.mesh, f.basis, laplacian(f.mesh, 1.0, modal_velocity(f.basis, a)));
    CHECK(rel_diff(f.blocks.B * a, direct) <= 1e-10);
  }
  // homogeneous Dirichlet-type closure: the projected Laplacian is dissipative
  CHECK(f.blocks.B.diagonal().maxCoeff() <= 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (f.blocks.B + f.blocks.B.transpose()));
  CHECK(es.eigenvalues().maxCoeff() <= 1e-10 * f.blocks.B.norm());
}

TEST_CASE("convection tensor matches the full-order projection") {
  const auto& f = fixture();
  Rng rng(22);
  for (int trial = 0; trial < 4; ++trial) {
    const Eigen::VectorXd a = rng.vector(f.basis.n_u());
    const CellVectors conv = convection(f.mesh, f.basis.psi * a, modal_velocity(f.basis, a), Scheme::linear());
    CHECK(rel_diff(contract(f.blocks.C, a), project(f.mesh, f.basis, conv)) <= 1e-10);
  }
}

TEST_CASE("pressure gradient blocks") {
  const auto& f = fixture();
  Rng rng(23);
  for (int trial = 0; trial < 4; ++trial) {
    const Eigen::VectorXd b = rng.vector(f.basis.n_p());
    const CellVectors g = gauss_gradient(f.mesh, modal_pressure(f.basis, b));
    CHECK(rel_diff(f.blocks.K * b, project(f.mesh, f.basis, g)) <= 1e-10);
  }
  const Eigen::VectorXd k0 = project(f.mesh, f.basis, gauss_gradient(f.mesh, f.basis.mean_pressure()));
  CHECK(rel_diff(f.blocks.K0, k0) <= 1e-12);

  PodBasis doubled = f.basis;
  doubled.chi *= 2.0;
  CHECK(rel_diff(assemble_K(f.mesh, doubled), 2.0 * f.blocks.K) <= 1e-14);

  AssemblyOptions no_mean;
  no_mean.mean_pressure_gradient = false;
  CHECK(assemble(f.mesh, f.basis, no_mean).K0.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pressure block") {
  const auto& f = fixture();
  const Eigen::MatrixXd& D = f.blocks.D;
  CHECK((D - D.transpose()).cwiseAbs().maxCoeff() <= 1e-13 * D.cwiseAbs().maxCoeff());
  Rng rng(24);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd x = rng.vector(f.basis.n_p());
    CHECK(x.dot(D * x) >= 0.0);
  }
  CHECK(std::isfinite(f.blocks.cond_D));
  CHECK(f.blocks.cond_D >= 1.0);
  CHECK(f.blocks.tikhonov_shift == 0.0);

  for (int trial = 0; trial < 4; ++trial) {
    const Eigen::VectorXd b = rng.vector(f.basis.n_p());
    Eigen::VectorXd direct(f.basis.n_p());
    for (int i = 0; i < f.basis.n_p(); ++i)
      direct(i) = grad_inner_product(f.mesh, f.basis.pressure_mode(i), modal_pressure(f.basis, b));
    CHECK(rel_diff(D * b, direct) <= 1e-10);

    const Eigen::VectorXd a = rng.vector(f.basis.n_u());
    const Eigen::VectorXd dc = convection_divergence(f.mesh, f.basis.psi * a, modal_velocity(f.basis, a));
    CHECK(rel_diff(contract(f.blocks.G, a), project(f.mesh, f.basis, dc)) <= 1e-10);
  }
  Eigen::VectorXd e(f.basis.n_p());
  for (int i = 0; i < f.basis.n_p(); ++i)
    e(i) = grad_inner_product(f.mesh, f.basis.pressure_mode(i), f.basis.mean_pressure());
  CHECK(rel_diff(f.blocks.E, e) <= 1e-12);

  // constant mean pressure with no fixed level carries no gradient
  PodBasis flat = f.basis;
  flat.p_mean.setConstant(3.0);
  flat.p_mean_bc = test::all_zero_gradient(f.mesh);
  const PressureBlock pb = assemble_pressure_block(f.mesh, flat);
  CHECK(pb.E.cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(assemble_K0(f.mesh, flat).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("boundary terms match the full-order projection") {
  const auto& f = fixture();
  const auto& b = f.basis;
  const auto& r = f.blocks;
  const Scheme lin = Scheme::linear();
  const VectorField& phic = b.lifting.phi_c;
  const FaceField& Fc = b.lifting.F_c;
  CHECK(rel_diff(r.A1, project(f.mesh, b, laplacian(f.mesh, 1.0, phic))) <= 1e-12);
  CHECK(rel_diff(r.A2, project(f.mesh, b, convection(f.mesh, Fc, phic, lin))) <= 1e-12);
  CHECK(rel_diff(r.E1, project(f.mesh, b, convection_divergence(f.mesh, Fc, phic))) <= 1e-12);

  Rng rng(25);
  for (int trial = 0; trial < 4; ++trial) {
    const Eigen::VectorXd a = rng.vector(b.n_u());
    const VectorField ua = modal_velocity(b, a);
    const FaceField fa = b.psi * a;
    CHECK(rel_diff(r.B1 * a, project(f.mesh, b, convection(f.mesh, fa, phic, lin))) <= 1e-10);
    CHECK(rel_diff(r.B2 * a, project(f.mesh, b, convection(f.mesh, Fc, ua, lin))) <= 1e-10);
    CHECK(rel_diff(r.F1 * a, project(f.mesh, b, convection_divergence(f.mesh, fa, phic))) <= 1e-10);
    CHECK(rel_diff(r.F2 * a, project(f.mesh, b, convection_divergence(f.mesh, Fc, ua))) <= 1e-10);
  }

  PodBasis unlifted = b;
  unlifted.lifting.phi_c.values.setZero();
  unlifted.lifting.phi_c.bc = homogeneous_velocity_bc(f.mesh);
  unlifted.lifting.F_c.setZero();
  const BcTerms z = assemble_bc_terms(f.mesh, unlifted);
  CHECK(z.A1.cwiseAbs().maxCoeff() == 0.0);
  CHECK(z.A2.cwiseAbs().maxCoeff() == 0.0);
  CHECK(z.B1.cwiseAbs().maxCoeff() == 0.0);
  CHECK(z.B2.cwiseAbs().maxCoeff() == 0.0);
  CHECK(z.E1.cwiseAbs().maxCoeff() == 0.0);
  CHECK(z.F1.cwiseAbs().maxCoeff() == 0.0);
  CHECK(z.F2.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("composed momentum and pressure equations reproduce the full-order residuals") {
  const auto& f = fixture();
  const auto& b = f.basis;
  Rng rng(26);
  const double nu = 0.013;
  for (double u_D : {0.0, 1.0, 2.0}) {
    const ReducedSystem s = compose_system(f.blocks, nu, u_D);
    CHECK(rel_diff(s.A_BC, nu * u_D * f.blocks.A1 - u_D * u_D * f.blocks.A2) <= 1e-15);
    for (int trial = 0; trial < 3; ++trial) {
      const Eigen::VectorXd a = rng.vector(b.n_u());
      const Eigen::VectorXd c = rng.vector(b.n_p());
      const VectorField u = lifted_velocity(f.mesh, b, a, u_D);
      const FaceField F = lifted_flux(b, a, u_D);
      const ScalarField p{b.p_mean + b.chi * c, b.pressure_mode_bc};

      // momentum right-hand side projected onto the velocity modes
      const CellVectors rhs = laplacian(f.mesh, nu, u) - convection(f.mesh, F, u, Scheme::linear()) -
                              gauss_gradient(f.mesh, p);
      const Eigen::VectorXd reduced = s.A_BC - s.blocks.K0 + (nu * s.blocks.B + s.B_BC) * a -
                                      contract(s.blocks.C, a) - s.blocks.K * c;
      CHECK(rel_diff(reduced, project(f.mesh, b, rhs)) <= 1e-9);

      // pressure Poisson residual projected onto the pressure modes
      Eigen::VectorXd lhs(b.n_p());
      for (int i = 0; i < b.n_p(); ++i) lhs(i) = grad_inner_product(f.mesh, b.pressure_mode(i), p);
      CHECK(rel_diff(s.blocks.D * c + s.blocks.E, lhs) <= 1e-9);
      const Eigen::VectorXd source = project(f.mesh, b, convection_divergence(f.mesh, F, u));
      CHECK(rel_diff(s.E_BC + s.F_BC * a + contract(s.blocks.G, a), source) <= 1e-9);
    }
  }
}

TEST_CASE("compose_system scaling") {
  const auto& f = fixture();
  const ReducedSystem zero = compose_system(f.blocks, 0.01, 0.0);
  CHECK(zero.A_BC.cwiseAbs().maxCoeff() == 0.0);
  CHECK(zero.B_BC.cwiseAbs().maxCoeff() == 0.0);
  CHECK(zero.E_BC.cwiseAbs().maxCoeff() == 0.0);
  CHECK(zero.F_BC.cwiseAbs().maxCoeff() == 0.0);

  const ReducedSystem one = compose_system(f.blocks, 0.01, 1.0), two = compose_system(f.blocks, 0.01, 2.0);
  CHECK(rel_diff(two.B_BC, 2.0 * one.B_BC) <= 1e-15);
  CHECK(rel_diff(two.F_BC, 2.0 * one.F_BC) <= 1e-15);
  CHECK(rel_diff(two.E_BC, 4.0 * one.E_BC) <= 1e-15);
  CHECK(two.blocks.B == f.blocks.B);

  ReducedBlocks broken = f.blocks;
  broken.K0.resize(1);
  CHECK_THROWS_AS(compose_system(broken, 0.01, 1.0), DimensionMismatch);
}

TEST_CASE("zero modes give zero rows") {
  const auto& f = fixture();
  PodBasis b = f.basis;
  b.phi.col(1).setZero();
  b.psi.col(1).setZero();
  const ReducedBlocks r = assemble(f.mesh, b);
  CHECK(r.B.row(1).cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.B.col(1).cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < b.n_u(); ++i) {
    CHECK(r.C[static_cast<std::size_t>(i)].row(1).cwiseAbs().maxCoeff() == 0.0);
    CHECK(r.C[static_cast<std::size_t>(i)].col(1).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(r.C[1].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("truncation matches assembly of the truncated basis") {
  const auto& f = fixture();
  const ReducedBlocks t = f.blocks.truncated(3, 2);
  const ReducedBlocks direct = assemble(f.mesh, f.basis.truncated(3, 2));
  CHECK(rel_diff(t.B, direct.B) <= 1e-14);
  CHECK(rel_diff(t.K, direct.K) <= 1e-14);
  CHECK(rel_diff(t.D, direct.D) <= 1e-14);
  CHECK(rel_diff(t.F1, direct.F1) <= 1e-14);
  for (int i = 0; i < 3; ++i) CHECK(rel_diff(t.C[static_cast<std::size_t>(i)], direct.C[static_cast<std::size_t>(i)]) <= 1e-14);
  for (int i = 0; i < 2; ++i) CHECK(rel_diff(t.G[static_cast<std::size_t>(i)], direct.G[static_cast<std::size_t>(i)]) <= 1e-14);
  CHECK(t.cond_D == doctest::Approx(direct.cond_D).epsilon(1e-10));
  CHECK_THROWS_AS(f.blocks.truncated(6, 1), DimensionMismatch);
}

TEST_CASE("guards") {
  const auto& f = fixture();
  AssemblyOptions small;
  small.max_modes = 4;
  CHECK_THROWS_AS(assemble(f.mesh, f.basis, small), DimensionMismatch);

  const Mesh other = test::unit_channel(4, 4);
  CHECK_THROWS_AS(assemble_B(other, f.basis), StaleArtifact);

  // duplicated pressure mode: D singular, shifted and reported
  PodBasis dup = f.basis;
  dup.chi.col(1) = dup.chi.col(0);
  const ReducedBlocks r = assemble(f.mesh, dup);
  CHECK(r.cond_D > 1e12);
  CHECK(r.tikhonov_shift == doctest::Approx(1e-12 * (r.D.trace() - 4 * r.tikhonov_shift) / 4));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.D);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("assembly is deterministic") {
  const auto& f = fixture();
  const ReducedBlocks again = assemble(f.mesh, f.basis);
  CHECK(again.B == f.blocks.B);
  CHECK(again.D == f.blocks.D);
  CHECK(again.G[0] == f.blocks.G[0]);
  CHECK(again.basis_hash == f.basis.hash());
}

}

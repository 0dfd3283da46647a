#include "support.hpp"

#include "podfv/error.hpp"
#include "podfv/fvops.hpp"
#include "podfv/pod.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <doctest.h>

#include <cmath>

using namespace podfv;
using podfv::test::jacobi_eigen;
using podfv::test::Rng;
using podfv::test::sign_free_distance;
using podfv::test::unit_channel;

namespace {

Eigen::VectorXd constant_velocity(const Mesh& m, const Vec2& v) {
  CellVectors c(m.n_cells(), 2);
  c.col(0).setConstant(v.x());
  c.col(1).setConstant(v.y());
  return flatten(c);
}

double orthonormality_error(const Eigen::MatrixXd& modes, const Eigen::VectorXd& w) {
  const Eigen::MatrixXd G = modes.transpose() * w.asDiagonal() * modes;
  return (G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff();
}

struct SvdOracle {
  Eigen::VectorXd lambda;
  Eigen::MatrixXd modes;
};

// Left singular vectors of W^{1/2} S mapped back by W^{-1/2}.
SvdOracle svd_oracle(const Eigen::MatrixXd& S, const Eigen::VectorXd& w) {
  const Eigen::VectorXd sw = w.cwiseSqrt();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sw.asDiagonal() * S, Eigen::ComputeThinU);
  SvdOracle o;
  o.lambda = svd.singularValues().cwiseAbs2();
  o.modes = sw.cwiseInverse().asDiagonal() * svd.matrixU();
  return o;
}

}  // namespace

TEST_SUITE("pod") {

TEST_CASE("correlation matrix examples") {
  const Mesh m = unit_channel(2, 2, 2.0, 1.0);
  Eigen::MatrixXd S(2 * m.n_cells(), 2);
  S.col(0) = constant_velocity(m, Vec2(1.0, 0.0));
  S.col(1) = constant_velocity(m, Vec2(0.0, 1.0));
  const Eigen::MatrixXd C = correlation_matrix(S, velocity_weights(m));
  CHECK((C - 2.0 * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-15);

  Rng rng(11);
  const Mesh big = unit_channel(9, 5, 2.0, 1.0);
  const Eigen::MatrixXd R = rng.matrix(2 * big.n_cells(), 9);
  const Eigen::MatrixXd CR = correlation_matrix(R, velocity_weights(big));
  CHECK((CR - CR.transpose()).cwiseAbs().maxCoeff() <= 1e-13);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(CR);
  CHECK(es.eigenvalues().minCoeff() >= -1e-12 * CR.norm());
  CHECK_THROWS_AS(correlation_matrix(R, Eigen::VectorXd::Ones(3)), DimensionMismatch);
}

TEST_CASE("eigen-decomposition examples") {
  const SpectralDecomposition a = eig_spectrum(Eigen::Matrix2d{{2, 0}, {0, 2}});
  CHECK(a.values(0) == doctest::Approx(2.0));
  CHECK(a.values(1) == doctest::Approx(2.0));
  CHECK((a.vectors - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-15);

  const SpectralDecomposition b = eig_spectrum(Eigen::Matrix2d{{2, 1}, {1, 2}});
  CHECK(b.values(0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(b.values(1) == doctest::Approx(1.0).epsilon(1e-15));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK((b.vectors.col(0) - Eigen::Vector2d(r, r)).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((b.vectors.col(1) - Eigen::Vector2d(r, -r)).cwiseAbs().maxCoeff() <= 1e-15);

  CHECK_THROWS_AS(eig_spectrum(Eigen::Matrix2d{{2, 1}, {0.5, 2}}), InvalidArgument);
  CHECK_THROWS_AS(eig_spectrum(Eigen::MatrixXd::Ones(2, 3)), DimensionMismatch);

  // tiny negative eigenvalues are clamped
  const SpectralDecomposition z = eig_spectrum(Eigen::Matrix2d{{1, 1}, {1, 1}});
  CHECK(z.values(1) == 0.0);
}

TEST_CASE("eigen-decomposition matches an independent Jacobi solver") {
  Rng rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXd X = rng.matrix(8, 8);
    const Eigen::MatrixXd C = X + X.transpose();
    const SpectralDecomposition s = eig_spectrum(C);
    const auto ref = jacobi_eigen(C);
    CHECK((s.values - ref.values).cwiseAbs().maxCoeff() <= 1e-9 * C.norm());
    CHECK(sign_free_distance(s.vectors, ref.vectors) <= 1e-9);
    CHECK((C * s.vectors - s.vectors * s.values.asDiagonal()).norm() <= 1e-10 * C.norm());
    for (Index i = 1; i < 8; ++i) CHECK(s.values(i) <= s.values(i - 1));
    for (Index j = 0; j < 8; ++j) {
      Index arg;
      s.vectors.col(j).cwiseAbs().maxCoeff(&arg);
      CHECK(s.vectors(arg, j) > 0.0);
    }
  }
}

TEST_CASE("method of snapshots matches a volume-weighted SVD") {
  Rng rng(13);
  const Mesh m = test::body_channel(12, 8, 3.0, 2.0, Rect{1.0, 0.75, 1.5, 1.25});
  const Eigen::VectorXd w = velocity_weights(m);
  for (int ns : {3, 7, 12}) {
    const Eigen::MatrixXd S = rng.matrix(2 * m.n_cells(), ns);
    const SpectralDecomposition sp = eig_spectrum(correlation_matrix(S, w));
    const Eigen::MatrixXd phi = velocity_modes(S, sp.values, sp.vectors, ns);
    const SvdOracle o = svd_oracle(S, w);
    CHECK(((sp.values - o.lambda).array() / o.lambda(0)).abs().maxCoeff() <= 1e-9);
    CHECK(sign_free_distance(phi, o.modes) <= 1e-9 * o.modes.cwiseAbs().maxCoeff());
    CHECK(orthonormality_error(phi, w) <= 1e-8);
  }
  // same check on flow data
  const auto& c = test::small_case();
  const Eigen::MatrixXd& U = c.run.snapshots.U;
  const Eigen::VectorXd ws = velocity_weights(c.mesh);
  const Eigen::MatrixXd U0 = U.colwise() - U.rowwise().mean();
  const SpectralDecomposition sp = eig_spectrum(correlation_matrix(U0, ws));
  const int n = usable_mode_count(sp.values);
  CHECK(n >= 4);
  const Eigen::MatrixXd phi = velocity_modes(U0, sp.values, sp.vectors, n);
  const SvdOracle o = svd_oracle(U0, ws);
  CHECK(((sp.values.head(n) - o.lambda.head(n)).array() / o.lambda(0)).abs().maxCoeff() <= 1e-9);
  // mode directions are conditioned by lambda_1 / lambda_i, so compare the well-resolved ones
  int resolved = 0;
  while (resolved < n && sp.values(resolved) >= 1e-6 * sp.values(0)) ++resolved;
  CHECK(resolved >= 3);
  CHECK(sign_free_distance(phi.leftCols(resolved), o.modes.leftCols(resolved)) <=
        1e-9 * o.modes.leftCols(resolved).cwiseAbs().maxCoeff());
}

TEST_CASE("single constant snapshot on volume 4") {
  const Mesh m = unit_channel(2, 2, 2.0, 2.0);
  const Eigen::MatrixXd S = constant_velocity(m, Vec2(1.0, 0.0));
  const Eigen::VectorXd w = velocity_weights(m);
  const SpectralDecomposition sp = eig_spectrum(correlation_matrix(S, w));
  CHECK(sp.values(0) == doctest::Approx(4.0).epsilon(1e-15));
  const Eigen::MatrixXd phi = velocity_modes(S, sp.values, sp.vectors, 1);
  const CellVectors v = unflatten(phi.col(0));
  CHECK((v.col(0).array() - 0.5).abs().maxCoeff() <= 1e-15);
  CHECK(v.col(1).cwiseAbs().maxCoeff() == 0.0);
  CHECK(orthonormality_error(phi, w) <= 1e-15);
}

TEST_CASE("completeness and mode-count guard") {
  Rng rng(14);
  const Mesh m = unit_channel(6, 4);
  const Eigen::VectorXd w = velocity_weights(m);
  const Eigen::MatrixXd S = rng.matrix(2 * m.n_cells(), 6);
  const SpectralDecomposition sp = eig_spectrum(correlation_matrix(S, w));
  const Eigen::MatrixXd phi = velocity_modes(S, sp.values, sp.vectors, 6);
  const Eigen::MatrixXd rec = phi * (phi.transpose() * w.asDiagonal() * S);
  CHECK((rec - S).norm() <= 1e-8 * S.norm());

  // reconstruction error never grows with more modes
  for (Index j = 0; j < S.cols(); ++j) {
    double prev = std::numeric_limits<double>::infinity();
    for (int n = 0; n <= 6; ++n) {
      const Eigen::MatrixXd P = phi.leftCols(n);
      const Eigen::VectorXd r = S.col(j) - P * (P.transpose() * w.asDiagonal() * S.col(j));
      const double e = r.dot(w.asDiagonal() * r);
      CHECK(e <= prev * (1 + 1e-12) + 1e-24);
      prev = e;
    }
  }

  // rank-deficient set: two copies of the same column
  Eigen::MatrixXd D(2 * m.n_cells(), 2);
  D.col(0) = S.col(0);
  D.col(1) = S.col(0);
  const SpectralDecomposition sd = eig_spectrum(correlation_matrix(D, w));
  CHECK(usable_mode_count(sd.values) == 1);
  try {
    velocity_modes(D, sd.values, sd.vectors, 2);
    FAIL("expected a dimension error");
  } catch (const DimensionMismatch& e) {
    CHECK(std::string(e.what()).find("only 1") != std::string::npos);
  }
}

TEST_CASE("pressure modes") {
  const Mesh m = unit_channel(6, 4);
  Rng rng(15);
  const Eigen::VectorXd p = rng.vector(m.n_cells());
  const Eigen::MatrixXd same = p.replicate(1, 4);
  const PressureModes pm = pressure_modes(m, same, 0);
  CHECK((pm.mean - p).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(usable_mode_count(pm.lambda) == 0);
  CHECK_THROWS_AS(pressure_modes(m, same, 1), DimensionMismatch);

  const Eigen::MatrixXd P = rng.matrix(m.n_cells(), 5);
  const PressureModes pr = pressure_modes(m, P, 4);
  const Eigen::MatrixXd fluct = P.colwise() - pr.mean;
  CHECK(fluct.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(orthonormality_error(pr.chi, scalar_weights(m)) <= 1e-8);
  CHECK(usable_mode_count(pr.lambda) == 4);
}

TEST_CASE("flux modes follow the velocity eigenpairs") {
  Rng rng(16);
  const Mesh m = test::body_channel(12, 8, 3.0, 2.0, Rect{1.0, 0.75, 1.5, 1.25});
  const BoundarySpec hb = homogeneous_velocity_bc(m);
  const Eigen::MatrixXd S = rng.matrix(2 * m.n_cells(), 5);
  Eigen::MatrixXd F(m.n_faces(), 5);
  for (Index j = 0; j < 5; ++j) F.col(j) = face_flux(m, VectorField{unflatten(S.col(j)), hb});
  const SpectralDecomposition sp = eig_spectrum(correlation_matrix(S, velocity_weights(m)));
  const Eigen::MatrixXd phi = velocity_modes(S, sp.values, sp.vectors, 5);
  const Eigen::MatrixXd psi = flux_modes(F, sp.values, sp.vectors, 5);
  for (int i = 0; i < 5; ++i) {
    const FaceField direct = face_flux(m, VectorField{unflatten(phi.col(i)), hb});
    CHECK((psi.col(i) - direct).cwiseAbs().maxCoeff() <= 1e-10);
  }
  CHECK(flux_modes(Eigen::MatrixXd::Zero(m.n_faces(), 5), sp.values, sp.vectors, 5).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("cumulative energy") {
  CHECK(cumulative_energy(Eigen::Vector2d(3, 1), 1) == doctest::Approx(0.75).epsilon(1e-15));
  const Eigen::VectorXd l = (Eigen::VectorXd(5) << 5, 2, 1, 0.5, 0.1).finished();
  double prev = 0.0;
  for (int n = 0; n <= 5; ++n) {
    const double e = cumulative_energy(l, n);
    CHECK(e >= prev);
    prev = e;
  }
  CHECK(std::abs(cumulative_energy(l, 5) - 1.0) <= 1e-12);
  CHECK(cumulative_energy(l, 99) == cumulative_energy(l, 5));
  CHECK_THROWS_AS(cumulative_energy(Eigen::VectorXd::Zero(3), 1), InvalidArgument);
}

TEST_CASE("lifting function examples") {
  const Mesh m = unit_channel(6, 4, 3.0, 2.0);
  const Index ref = default_reference_face(m);
  const Face& rf = m.face(ref);
  CHECK(m.patch(rf.patch).kind == PatchKind::Inlet);
  CHECK(std::abs(rf.center.y() - 1.0) <= 0.25 + 1e-12);

  Rng rng(17);
  const Eigen::VectorXd u = rng.vector(2 * m.n_cells());
  // identical snapshots, reference value 2
  Eigen::MatrixXd U = u.replicate(1, 3);
  std::vector<Vec2> two(3, Vec2(2.0, 0.0));
  const Lifting a = lifting_function(m, U, two, ref);
  CHECK((flatten(a.phi_c.values) - u / 2.0).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(a.reference_value == doctest::Approx(2.0));
  CHECK(face_value(m, flatten(a.phi_c.values), a.phi_c.bc, ref).x() == doctest::Approx(1.0).epsilon(1e-15));

  // u and 3u with reference values 1 and 3
  Eigen::MatrixXd U2(u.size(), 2);
  U2.col(0) = u;
  U2.col(1) = 3.0 * u;
  const std::vector<Vec2> refs{Vec2(1.0, 0.0), Vec2(3.0, 0.0)};
  const Lifting b = lifting_function(m, U2, refs, ref);
  CHECK((flatten(b.phi_c.values) - u).cwiseAbs().maxCoeff() <= 1e-14);

  const std::vector<Vec2> zero(3, Vec2::Zero());
  CHECK_THROWS_AS(lifting_function(m, U, zero, ref), InvalidArgument);
  CHECK_THROWS_AS(lifting_function(m, U, two, 0), InvalidArgument);  // internal face
  CHECK_THROWS_AS(lifting_function(m, U, refs, ref), DimensionMismatch);
}

TEST_CASE("lifting flux divergence is bounded by the snapshots") {
  const auto& c = test::small_case();
  const SnapshotSet& s = c.run.snapshots;
  std::vector<Vec2> refs(static_cast<std::size_t>(s.count()), Vec2(1.0, 0.0));
  const Lifting l = lifting_function(c.mesh, s.U, refs, default_reference_face(c.mesh), &s.F);
  double worst = 0.0;
  for (Index j = 0; j < s.count(); ++j)
    worst = std::max(worst, divergence_of_flux(c.mesh, s.F.col(j)).cwiseAbs().maxCoeff());
  CHECK(divergence_of_flux(c.mesh, l.F_c).cwiseAbs().maxCoeff() <= worst + 1e-14);
}

TEST_CASE("homogenize") {
  Rng rng(18);
  const Eigen::VectorXd phi = rng.vector(10);
  Eigen::MatrixXd U(10, 3);
  const std::vector<double> uD{0.8, 1.0, 1.2};
  for (int j = 0; j < 3; ++j) U.col(j) = uD[static_cast<std::size_t>(j)] * phi;
  CHECK(homogenize(U, uD, phi).cwiseAbs().maxCoeff() <= 1e-15);
  const std::vector<double> none{0.0, 0.0, 0.0};
  CHECK(homogenize(U, none, phi) == U);
  CHECK_THROWS_AS(homogenize(U, std::vector<double>{1.0}, phi), DimensionMismatch);
}

TEST_CASE("pooled snapshots") {
  const auto& c = test::small_case();
  SnapshotSet a = c.run.snapshots, b = c.run.snapshots;
  b.u_in = 1.5;
  const std::vector<SnapshotSet> sets{a, b};
  const PooledSnapshots p = PooledSnapshots::pool(sets);
  CHECK(p.count() == 2 * a.count());
  CHECK(p.u_D.front() == 1.0);
  CHECK(p.u_D.back() == 1.5);
  CHECK(p.run.back() == 1);
  CHECK(p.run_u_in == std::vector<double>{1.0, 1.5});

  SnapshotSet other = a;
  other.mesh_hash ^= 1;
  const std::vector<SnapshotSet> mixed{a, other};
  CHECK_THROWS_AS(PooledSnapshots::pool(mixed), StaleArtifact);
  CHECK_THROWS_AS(PooledSnapshots::pool(std::span<const SnapshotSet>{}), InvalidArgument);
}

TEST_CASE("basis from flow snapshots") {
  const auto& c = test::small_case();
  const PodBasis b = test::small_basis(5, 4);
  const Eigen::VectorXd w = velocity_weights(c.mesh);
  CHECK(orthonormality_error(b.phi, w) <= 1e-8);
  CHECK(orthonormality_error(b.chi, scalar_weights(c.mesh)) <= 1e-8);
  for (Index i = 1; i < b.lambda_u.size(); ++i) CHECK(b.lambda_u(i) <= b.lambda_u(i - 1));
  CHECK(b.lambda_u.minCoeff() >= 0.0);
  CHECK(b.lambda_p.minCoeff() >= 0.0);
  CHECK(b.n_snapshots == c.run.snapshots.count());

  // lifting: unit value at the reference face, modes homogeneous there
  const Index ref = b.lifting.reference_face;
  CHECK(face_value(c.mesh, flatten(b.lifting.phi_c.values), b.lifting.phi_c.bc, ref).x() == 1.0);
  for (int i = 0; i < b.n_u(); ++i) CHECK(face_value(c.mesh, b.phi.col(i), b.velocity_mode_bc, ref).norm() == 0.0);

  // homogenized snapshots lie in the span of all usable modes
  const PodBasis full = test::small_basis(usable_mode_count(b.lambda_u), 1);
  const Eigen::MatrixXd U0 = c.run.snapshots.U.colwise() - flatten(full.lifting.phi_c.values);
  const Eigen::MatrixXd R = U0 - full.phi * (full.phi.transpose() * w.asDiagonal() * U0);
  const double residual = (R.transpose() * w.asDiagonal() * R).trace();
  const double tail = full.lambda_u.tail(full.lambda_u.size() - full.n_u()).sum();
  CHECK(std::abs(residual - tail) <= 1e-10 * full.lambda_u.sum());
  CHECK(std::sqrt(residual / full.lambda_u.sum()) <= 1e-5);

  // flux modes share the velocity coefficients
  CHECK(b.psi.cols() == b.phi.cols());
  const PodBasis t = b.truncated(2, 1);
  CHECK(t.n_u() == 2);
  CHECK(t.n_p() == 1);
  CHECK(t.hash() != b.hash());
  CHECK(test::small_basis(5, 4).hash() == b.hash());
  CHECK_THROWS_AS(b.truncated(6, 1), DimensionMismatch);

  // wrong mesh
  const Mesh other = unit_channel(4, 4);
  const std::vector<SnapshotSet> sets{c.run.snapshots};
  CHECK_THROWS_AS(build_basis(other, PooledSnapshots::pool(sets), PodOptions{}), StaleArtifact);
}

TEST_CASE("velocity weights repeat the cell volumes per component") {
  const Mesh m = test::body_channel(8, 4, 2.0, 1.0, Rect{0.5, 0.25, 0.75, 0.5});
  const Eigen::VectorXd w = velocity_weights(m);
  CHECK(w.size() == 2 * m.n_cells());
  CHECK(w.head(m.n_cells()) == m.cell_volumes());
  CHECK(w.tail(m.n_cells()) == m.cell_volumes());
}

}

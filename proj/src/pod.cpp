#include "podfv/pod.hpp"

#include "podfv/error.hpp"
#include "podfv/fvops.hpp"
#include "podfv/hash.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace podfv {

namespace {

constexpr double kModeCut = 1e-12;

void hash_matrix(Hasher& h, const Eigen::MatrixXd& m) {
  h.value(static_cast<std::int64_t>(m.rows()));
  h.value(static_cast<std::int64_t>(m.cols()));
  h.values({m.data(), static_cast<std::size_t>(m.size())});
}

Eigen::MatrixXd scaled_columns(const Eigen::MatrixXd& S, const Eigen::VectorXd& lambda, const Eigen::MatrixXd& Q,
                               int n, const char* what) {
  if (n < 0) throw InvalidArgument(std::string(what) + ": negative mode count");
  const int usable = usable_mode_count(lambda);
  if (n > usable)
    throw DimensionMismatch(std::string(what) + ": requested " + std::to_string(n) + " modes but only " +
                            std::to_string(usable) + " are numerically usable");
  if (Q.rows() != S.cols())
    throw DimensionMismatch(std::string(what) + ": eigenvector length does not match snapshot count");
  Eigen::MatrixXd out = S * Q.leftCols(n);
  for (int i = 0; i < n; ++i) out.col(i) /= std::sqrt(lambda(i));
  return out;
}

}  // namespace

PooledSnapshots PooledSnapshots::pool(std::span<const SnapshotSet> sets) {
  if (sets.empty()) throw InvalidArgument("no snapshot sets to pool");
  PooledSnapshots out;
  out.mesh_hash = sets.front().mesh_hash;
  Index total = 0;
  for (const SnapshotSet& s : sets) {
    s.validate();
    if (s.mesh_hash != out.mesh_hash) throw StaleArtifact("snapshot sets were produced on different meshes");
    if (s.U.rows() != sets.front().U.rows() || s.F.rows() != sets.front().F.rows())
      throw DimensionMismatch("snapshot sets have different field sizes");
    total += s.count();
  }
  const auto& first = sets.front();
  out.U.resize(first.U.rows(), total);
  out.P.resize(first.P.rows(), total);
  out.F.resize(first.F.rows(), total);
  Index col = 0;
  for (std::size_t r = 0; r < sets.size(); ++r) {
    const SnapshotSet& s = sets[r];
    out.U.middleCols(col, s.count()) = s.U;
    out.P.middleCols(col, s.count()) = s.P;
    out.F.middleCols(col, s.count()) = s.F;
    col += s.count();
    out.times.insert(out.times.end(), s.times.begin(), s.times.end());
    out.u_D.insert(out.u_D.end(), static_cast<std::size_t>(s.count()), s.u_in);
    out.run.insert(out.run.end(), static_cast<std::size_t>(s.count()), static_cast<int>(r));
    out.run_u_in.push_back(s.u_in);
  }
  return out;
}

VectorField PodBasis::velocity_mode(int i) const {
  return {unflatten(phi.col(i)), velocity_mode_bc};
}

ScalarField PodBasis::pressure_mode(int i) const { return {chi.col(i), pressure_mode_bc}; }

std::uint64_t PodBasis::hash() const {
  Hasher h;
  h.text("podfv-basis");
  h.value(mesh_hash);
  h.value(static_cast<std::int64_t>(n_snapshots));
  hash_matrix(h, phi);
  hash_matrix(h, psi);
  hash_matrix(h, chi);
  hash_matrix(h, lambda_u);
  hash_matrix(h, lambda_p);
  hash_matrix(h, p_mean);
  hash_matrix(h, lifting.phi_c.values);
  hash_matrix(h, lifting.F_c);
  h.value(static_cast<std::int64_t>(lifting.reference_face));
  h.value(lifting.reference_value);
  return h.digest();
}

PodBasis PodBasis::truncated(int nu, int np) const {
  if (nu < 0 || np < 0 || nu > n_u() || np > n_p())
    throw DimensionMismatch("cannot truncate basis (" + std::to_string(n_u()) + "," + std::to_string(n_p()) +
                            ") to (" + std::to_string(nu) + "," + std::to_string(np) + ")");
  PodBasis out = *this;
  out.phi = phi.leftCols(nu);
  out.psi = psi.leftCols(nu);
  out.chi = chi.leftCols(np);
  return out;
}

Eigen::VectorXd velocity_weights(const Mesh& mesh) {
  Eigen::VectorXd w(2 * mesh.n_cells());
  w << mesh.cell_volumes(), mesh.cell_volumes();
  return w;
}

Eigen::VectorXd scalar_weights(const Mesh& mesh) { return mesh.cell_volumes(); }

Index default_reference_face(const Mesh& mesh) {
  const auto inlets = mesh.patches_of_kind(PatchKind::Inlet);
  if (inlets.empty()) throw InvalidArgument("mesh has no inlet patch for the lifting reference point");
  const BoundaryPatch& inlet = mesh.patch(inlets.front());
  if (inlet.faces.empty()) throw InvalidArgument("inlet patch has no faces");
  double lo = inlet.faces.empty() ? 0.0 : mesh.face(inlet.faces.front()).center.y();
  double hi = lo;
  for (Index f : inlet.faces) {
    lo = std::min(lo, mesh.face(f).center.y());
    hi = std::max(hi, mesh.face(f).center.y());
  }
  const double mid = 0.5 * (lo + hi);
  Index best = inlet.faces.front();
  for (Index f : inlet.faces)
    if (std::abs(mesh.face(f).center.y() - mid) < std::abs(mesh.face(best).center.y() - mid)) best = f;
  return best;
}

Vec2 face_value(const Mesh& mesh, const Eigen::Ref<const Eigen::VectorXd>& u_column, const BoundarySpec& bc,
                Index face) {
  const VectorField field{unflatten(u_column), bc};
  if (mesh.face(face).internal()) {
    const Face& f = mesh.face(face);
    return f.weight * field.values.row(f.owner).transpose() +
           (1.0 - f.weight) * field.values.row(f.neighbour).transpose();
  }
  return boundary_value(mesh, field, face);
}

Lifting lifting_function(const Mesh& mesh, const Eigen::MatrixXd& U, std::span<const Vec2> reference_values,
                         Index reference_face, const Eigen::MatrixXd* F) {
  if (U.cols() == 0) throw InvalidArgument("lifting needs at least one snapshot");
  if (U.rows() != 2 * mesh.n_cells()) throw DimensionMismatch("velocity snapshots do not match the mesh");
  if (static_cast<Index>(reference_values.size()) != U.cols())
    throw DimensionMismatch("one reference value per snapshot is required");
  if (reference_face < 0 || reference_face >= mesh.n_faces()) throw InvalidArgument("reference face out of range");
  const Face& rf = mesh.face(reference_face);
  if (rf.internal() || mesh.patch(rf.patch).kind != PatchKind::Inlet)
    throw InvalidArgument("lifting reference face " + std::to_string(reference_face) + " is not on the inlet");

  Vec2 mean_ref = Vec2::Zero();
  for (const Vec2& v : reference_values) mean_ref += v;
  mean_ref /= static_cast<double>(reference_values.size());
  const Vec2 inward = -rf.area.normalized();
  const double u_mr = mean_ref.dot(inward);
  if (std::abs(u_mr) < 1e-300) throw InvalidArgument("lifting reference value is zero");

  Lifting out;
  out.reference_face = reference_face;
  out.reference_value = u_mr;
  const Eigen::VectorXd mean = U.rowwise().mean();
  out.phi_c.values = unflatten(mean / u_mr);
  out.phi_c.bc = velocity_bc(mesh, mean_ref / u_mr);
  if (F) {
    if (F->rows() != mesh.n_faces() || F->cols() != U.cols())
      throw DimensionMismatch("flux snapshots do not match velocity snapshots");
    out.F_c = F->rowwise().mean() / u_mr;
  } else {
    out.F_c = face_flux(mesh, out.phi_c);
  }
  return out;
}

Eigen::MatrixXd homogenize(const Eigen::MatrixXd& U, std::span<const double> u_D, const Eigen::VectorXd& lift) {
  if (static_cast<Index>(u_D.size()) != U.cols()) throw DimensionMismatch("one u_D value per column is required");
  if (lift.size() != U.rows()) throw DimensionMismatch("lifting field size does not match snapshots");
  const Eigen::Map<const Eigen::RowVectorXd> scale(u_D.data(), static_cast<Index>(u_D.size()));
  return U - lift * scale;
}

Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& S, const Eigen::VectorXd& weights) {
  if (weights.size() != S.rows()) throw DimensionMismatch("weights do not match snapshot length");
  const Eigen::MatrixXd WS = weights.asDiagonal() * S;
  Eigen::MatrixXd C(S.cols(), S.cols());
  for (Index j = 0; j < S.cols(); ++j)
    for (Index i = j; i < S.cols(); ++i) C(i, j) = C(j, i) = S.col(i).dot(WS.col(j));
  return C;
}

SpectralDecomposition eig_spectrum(const Eigen::MatrixXd& C) {
  if (C.rows() != C.cols()) throw DimensionMismatch("correlation matrix must be square");
  const Index n = C.rows();
  SpectralDecomposition out;
  if (n == 0) return out;
  const double scale = C.cwiseAbs().maxCoeff();
  if ((C - C.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1e-300))
    throw InvalidArgument("eigen-decomposition requires a symmetric matrix");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  if (es.info() != Eigen::Success) throw SolverFailure("symmetric eigen-decomposition failed");
  const Eigen::VectorXd& vals = es.eigenvalues();
  Eigen::MatrixXd vecs = es.eigenvectors();

  std::vector<Index> lead(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    Index r = 0;
    vecs.col(j).cwiseAbs().maxCoeff(&r);
    if (vecs(r, j) < 0) vecs.col(j) = -vecs.col(j);
    lead[static_cast<std::size_t>(j)] = r;
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return vals(a) > vals(b); });
  // Degenerate eigenvalues above the mode cut are ordered by leading index.
  // Values keep their sorted order; only the vectors of a tie group move.
  const double tie = 1e-12 * std::max(scale, 1e-300);
  const double cut = kModeCut * std::max(vals(order.front()), 0.0);
  std::vector<Index> vec_order = order;
  for (std::size_t g = 0; g < order.size();) {
    std::size_t e = g + 1;
    if (vals(order[g]) > cut)
      while (e < order.size() && vals(order[g]) - vals(order[e]) <= tie) ++e;
    std::stable_sort(vec_order.begin() + static_cast<std::ptrdiff_t>(g),
                     vec_order.begin() + static_cast<std::ptrdiff_t>(e),
                     [&](Index a, Index b) { return lead[static_cast<std::size_t>(a)] < lead[static_cast<std::size_t>(b)]; });
    g = e;
  }

  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    double v = vals(order[static_cast<std::size_t>(j)]);
    if (v < 0 && v >= -tie) v = 0.0;
    out.values(j) = v;
    out.vectors.col(j) = vecs.col(vec_order[static_cast<std::size_t>(j)]);
  }
  return out;
}

int usable_mode_count(const Eigen::VectorXd& lambda) {
  if (lambda.size() == 0 || !(lambda(0) > 0)) return 0;
  int n = 0;
  while (n < lambda.size() && lambda(n) > kModeCut * lambda(0)) ++n;
  return n;
}

Eigen::MatrixXd velocity_modes(const Eigen::MatrixXd& S, const Eigen::VectorXd& lambda, const Eigen::MatrixXd& Q,
                               int n) {
  return scaled_columns(S, lambda, Q, n, "velocity modes");
}

Eigen::MatrixXd flux_modes(const Eigen::MatrixXd& F, const Eigen::VectorXd& lambda, const Eigen::MatrixXd& Q, int n) {
  return scaled_columns(F, lambda, Q, n, "flux modes");
}

PressureModes pressure_modes(const Mesh& mesh, const Eigen::MatrixXd& P, int n_p) {
  if (P.rows() != mesh.n_cells()) throw DimensionMismatch("pressure snapshots do not match the mesh");
  if (P.cols() == 0) throw InvalidArgument("no pressure snapshots");
  PressureModes out;
  out.mean = P.rowwise().mean();
  const Eigen::MatrixXd fluct = P.colwise() - out.mean;
  auto spec = eig_spectrum(correlation_matrix(fluct, scalar_weights(mesh)));
  out.chi = scaled_columns(fluct, spec.values, spec.vectors, n_p, "pressure modes");
  out.lambda = std::move(spec.values);
  out.Q = std::move(spec.vectors);
  return out;
}

double cumulative_energy(const Eigen::VectorXd& lambda, int n) {
  const double total = lambda.sum();
  if (!(total > 0)) throw InvalidArgument("cumulative energy of an all-zero spectrum");
  n = std::clamp(n, 0, static_cast<int>(lambda.size()));
  return lambda.head(n).sum() / total;
}

PodBasis build_basis(const Mesh& mesh, const PooledSnapshots& s, const PodOptions& options) {
  if (s.mesh_hash != mesh.hash()) throw StaleArtifact("snapshots were produced on a different mesh");
  if (s.U.rows() != 2 * mesh.n_cells() || s.F.rows() != mesh.n_faces() || s.P.rows() != mesh.n_cells())
    throw DimensionMismatch("snapshot matrices do not match the mesh");

  PodBasis b;
  b.mesh_hash = s.mesh_hash;
  b.n_snapshots = s.count();
  const Index ref = options.reference_face.value_or(default_reference_face(mesh));

  std::vector<Vec2> ref_values;
  ref_values.reserve(s.u_D.size());
  for (Index j = 0; j < s.count(); ++j)
    ref_values.push_back(face_value(mesh, s.U.col(j), velocity_bc(mesh, Vec2(s.u_D[static_cast<std::size_t>(j)], 0.0)), ref));
  b.lifting = lifting_function(mesh, s.U, ref_values, ref, options.lifting_flux_from_snapshots ? &s.F : nullptr);

  const Eigen::MatrixXd U0 = homogenize(s.U, s.u_D, flatten(b.lifting.phi_c.values));
  const Eigen::MatrixXd F0 = homogenize(s.F, s.u_D, b.lifting.F_c);
  auto spec = eig_spectrum(correlation_matrix(U0, velocity_weights(mesh)));
  b.phi = velocity_modes(U0, spec.values, spec.vectors, options.n_u);
  b.psi = flux_modes(F0, spec.values, spec.vectors, options.n_u);
  b.lambda_u = std::move(spec.values);
  b.Q_u = std::move(spec.vectors);

  auto pm = pressure_modes(mesh, s.P, options.n_p);
  b.p_mean = std::move(pm.mean);
  b.chi = std::move(pm.chi);
  b.lambda_p = std::move(pm.lambda);
  b.Q_p = std::move(pm.Q);

  b.velocity_mode_bc = homogeneous_velocity_bc(mesh);
  b.pressure_mode_bc = pressure_bc(mesh, 0.0);
  b.p_mean_bc = pressure_bc(mesh, 0.0);
  return b;
}

}  // namespace podfv

#pragma once

#include "podfv/hfsolver.hpp"
#include "podfv/mesh.hpp"
#include "podfv/pod.hpp"
#include "podfv/romassembly.hpp"

#include <Eigen/Core>

#include <random>
#include <vector>

namespace podfv::test {

inline Mesh unit_channel(int nx, int ny, double lx = 1.0, double ly = 1.0) {
  ChannelSpec s;
  s.nx = nx;
  s.ny = ny;
  s.lx = lx;
  s.ly = ly;
  return generate_channel_mesh(s);
}

inline Mesh body_channel(int nx, int ny, double lx, double ly, Rect body) {
  ChannelSpec s;
  s.nx = nx;
  s.ny = ny;
  s.lx = lx;
  s.ly = ly;
  s.obstacle = body;
  return generate_channel_mesh(s);
}

/// Parallelogram cells: x' = x + shear * y. Vertical faces are tilted, so d
/// and S_f are not parallel there.
inline Mesh sheared_channel(int nx, int ny, double shear,
                            NonOrthogonalVariant variant = NonOrthogonalVariant::OrthogonalCorrection) {
  const double hx = 1.0 / nx, hy = 1.0 / ny;
  auto id = [&](int i, int j) { return static_cast<Index>(j * nx + i); };
  auto vertex = [&](double x, double y) { return Vec2(x + shear * y, y); };
  std::vector<Vec2> centers;
  std::vector<double> volumes;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      centers.push_back(vertex((i + 0.5) * hx, (j + 0.5) * hy));
      volumes.push_back(hx * hy);
    }
  std::vector<Face> faces;
  auto vface = [&](int i, int j, Index owner, Index neighbour) {
    Face f;
    const Vec2 a = vertex(i * hx, j * hy), b = vertex(i * hx, (j + 1) * hy);
    f.area = Vec2(b.y() - a.y(), -(b.x() - a.x()));
    f.center = 0.5 * (a + b);
    f.owner = owner;
    f.neighbour = neighbour;
    return f;
  };
  auto hface = [&](int i, int j, Index owner, Index neighbour, double sign) {
    Face f;
    const Vec2 a = vertex(i * hx, j * hy), b = vertex((i + 1) * hx, j * hy);
    f.area = sign * Vec2(0.0, b.x() - a.x());
    f.center = 0.5 * (a + b);
    f.owner = owner;
    f.neighbour = neighbour;
    return f;
  };
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i) faces.push_back(vface(i, j, id(i - 1, j), id(i, j)));
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) faces.push_back(hface(i, j, id(i, j - 1), id(i, j), 1.0));
  std::vector<BoundaryPatch> patches{{"inlet", PatchKind::Inlet, {}},
                                     {"outlet", PatchKind::Outlet, {}},
                                     {"bottom", PatchKind::Slip, {}},
                                     {"top", PatchKind::Slip, {}}};
  for (int j = 0; j < ny; ++j) {
    patches[0].faces.push_back(static_cast<Index>(faces.size()));
    Face f = vface(0, j, id(0, j), -1);
    f.area = -f.area;
    faces.push_back(f);
  }
  for (int j = 0; j < ny; ++j) {
    patches[1].faces.push_back(static_cast<Index>(faces.size()));
    faces.push_back(vface(nx, j, id(nx - 1, j), -1));
  }
  for (int i = 0; i < nx; ++i) {
    patches[2].faces.push_back(static_cast<Index>(faces.size()));
    faces.push_back(hface(i, 0, id(i, 0), -1, -1.0));
  }
  for (int i = 0; i < nx; ++i) {
    patches[3].faces.push_back(static_cast<Index>(faces.size()));
    faces.push_back(hface(i, ny, id(i, ny - 1), -1, 1.0));
  }
  return Mesh(std::move(centers), std::move(volumes), std::move(faces), std::move(patches), variant);
}

class Rng {
public:
  explicit Rng(unsigned seed) : gen_(seed) {}
  double uniform(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  Eigen::VectorXd vector(Index n) {
    Eigen::VectorXd v(n);
    for (Index i = 0; i < n; ++i) v(i) = uniform();
    return v;
  }
  Eigen::MatrixXd matrix(Index r, Index c) {
    Eigen::MatrixXd m(r, c);
    for (Index j = 0; j < c; ++j) m.col(j) = vector(r);
    return m;
  }
  CellVectors cells(Index n) {
    CellVectors v(n, 2);
    v.col(0) = vector(n);
    v.col(1) = vector(n);
    return v;
  }

private:
  std::mt19937_64 gen_;
};

/// BCs with every patch fixed (scalars) so boundary faces carry known values.
inline BoundarySpec all_fixed(const Mesh& mesh, const Vec2& v) {
  return BoundarySpec(mesh.patches().size(), PatchBc::fixed(v));
}
inline BoundarySpec all_zero_gradient(const Mesh& mesh) {
  return BoundarySpec(mesh.patches().size(), PatchBc::zero_gradient());
}

/// Cyclic Jacobi rotations; eigenvalues descending, columns normalised with
/// the largest-magnitude entry positive.
struct JacobiResult {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

inline JacobiResult jacobi_eigen(Eigen::MatrixXd A) {
  const Index n = A.rows();
  Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
    if (off <= 1e-30 * std::max(1.0, A.squaredNorm())) break;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) {
        if (A(p, q) == 0.0) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (Index k = 0; k < n; ++k) {
          const double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        for (Index k = 0; k < n; ++k) {
          const double vkp = V(k, p), vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return A(a, a) > A(b, b); });
  JacobiResult r{Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
  for (Index i = 0; i < n; ++i) {
    const Index k = order[static_cast<std::size_t>(i)];
    r.values(i) = A(k, k);
    Eigen::VectorXd v = V.col(k);
    Index arg;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    r.vectors.col(i) = v;
  }
  return r;
}

/// max over columns of min(|a - b|, |a + b|).
inline double sign_free_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double worst = 0.0;
  for (Index j = 0; j < a.cols(); ++j)
    worst = std::max(worst, std::min((a.col(j) - b.col(j)).cwiseAbs().maxCoeff(),
                                     (a.col(j) + b.col(j)).cwiseAbs().maxCoeff()));
  return worst;
}

inline double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = std::max({a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(), 1e-300});
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

/// A short impulsive start past a small body; enough unsteadiness for a
/// well-posed basis of a few modes.
struct SmallCase {
  Mesh mesh;
  CaseConfig config;
  RunResult run;
};

inline const SmallCase& small_case() {
  static const SmallCase c = [] {
    Mesh mesh = body_channel(24, 12, 6.0, 3.0, Rect{1.5, 1.25, 2.0, 1.75});
    CaseConfig cfg;
    cfg.nu = 0.02;
    cfg.dt = 0.05;
    cfg.t_end = 1.0;
    cfg.snapshot_stride = 1;
    cfg.n_snapshots = 10;
    cfg.body_diameter = 0.5;
    cfg.linear_fraction = 1.0;
    RunResult r = run_case(mesh, cfg);
    return SmallCase{std::move(mesh), cfg, std::move(r)};
  }();
  return c;
}

inline PodBasis small_basis(int n_u, int n_p) {
  const SmallCase& c = small_case();
  std::vector<SnapshotSet> sets{c.run.snapshots};
  PodOptions opt;
  opt.n_u = n_u;
  opt.n_p = n_p;
  return build_basis(c.mesh, PooledSnapshots::pool(sets), opt);
}

/// Reduced blocks of the given size, all zero except D = I.
inline ReducedBlocks zero_blocks(int nu, int np) {
  ReducedBlocks r;
  r.B = Eigen::MatrixXd::Zero(nu, nu);
  r.C.assign(static_cast<std::size_t>(nu), Eigen::MatrixXd::Zero(nu, nu));
  r.K = Eigen::MatrixXd::Zero(nu, np);
  r.K0 = Eigen::VectorXd::Zero(nu);
  r.D = Eigen::MatrixXd::Identity(np, np);
  r.E = Eigen::VectorXd::Zero(np);
  r.G.assign(static_cast<std::size_t>(np), Eigen::MatrixXd::Zero(nu, nu));
  r.A1 = r.A2 = Eigen::VectorXd::Zero(nu);
  r.B1 = r.B2 = Eigen::MatrixXd::Zero(nu, nu);
  r.E1 = Eigen::VectorXd::Zero(np);
  r.F1 = r.F2 = Eigen::MatrixXd::Zero(np, nu);
  return r;
}

}  // namespace podfv::test

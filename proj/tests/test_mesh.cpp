#include "support.hpp"

#include "podfv/error.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace podfv;
using podfv::test::body_channel;
using podfv::test::sheared_channel;
using podfv::test::unit_channel;

TEST_SUITE("mesh") {

TEST_CASE("2x2 channel counts") {
  const Mesh m = unit_channel(2, 2);
  CHECK(m.n_cells() == 4);
  CHECK(m.n_internal_faces() == 4);
  CHECK(m.n_faces() - m.n_internal_faces() == 8);
  CHECK(m.total_volume() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m.patches().size() == 4);
  CHECK(m.patch(m.patch_id("inlet")).kind == PatchKind::Inlet);
  CHECK(m.patch(m.patch_id("outlet")).kind == PatchKind::Outlet);
  CHECK_FALSE(m.find_patch("cylinder").has_value());
}

TEST_CASE("4x4 with a centred 2x2 body") {
  const Mesh m = body_channel(4, 4, 1.0, 1.0, Rect{0.25, 0.25, 0.75, 0.75});
  CHECK(m.n_cells() == 12);
  const auto& body = m.patch(m.patch_id("cylinder"));
  CHECK(body.kind == PatchKind::Wall);
  CHECK(body.faces.size() == 8);
  // body faces point into the body, out of the fluid cells
  Vec2 sum = Vec2::Zero();
  for (Index f : body.faces) {
    const Face& face = m.face(f);
    CHECK((face.center - Vec2(0.5, 0.5)).dot(face.area) < 0.0);
    sum += face.area;
  }
  CHECK(sum.norm() < 1e-15);
  CHECK(m.total_volume() == doctest::Approx(0.75));
}

TEST_CASE("obstacle validation") {
  CHECK_THROWS_AS(body_channel(4, 4, 1.0, 1.0, Rect{0.3, 0.25, 0.75, 0.75}), InvalidArgument);
  CHECK_THROWS_AS(body_channel(4, 4, 1.0, 1.0, Rect{0.0, 0.25, 0.5, 0.75}), InvalidArgument);
  CHECK_THROWS_AS(body_channel(4, 4, 1.0, 1.0, Rect{0.25, 0.25, 0.75, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(unit_channel(1, 4), InvalidArgument);
  try {
    body_channel(4, 4, 1.0, 1.0, Rect{0.3, 0.25, 0.75, 0.75});
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("aligned") != std::string::npos);
  }
}

TEST_CASE("orthogonality decomposition examples") {
  const auto variants = {NonOrthogonalVariant::MinimumCorrection, NonOrthogonalVariant::OrthogonalCorrection,
                         NonOrthogonalVariant::OverRelaxed};
  for (auto v : variants) {
    const auto [delta, k] = orthogonality_decomposition(Vec2(0.0, 2.0), Vec2(0.0, 0.5), v);
    CHECK((delta - Vec2(0.0, 2.0)).norm() == 0.0);
    CHECK(k.norm() == 0.0);
  }
  const Vec2 S(1.0, 0.0), d = Vec2(1.0, 1.0) / std::sqrt(2.0);
  const auto [delta, k] = orthogonality_decomposition(S, d, NonOrthogonalVariant::OrthogonalCorrection);
  CHECK(delta.x() == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));
  CHECK(delta.y() == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));
  CHECK((delta + k - S).norm() == 0.0);
  CHECK(delta.norm() == doctest::Approx(S.norm()).epsilon(1e-15));

  const auto [dm, km] = orthogonality_decomposition(S, d, NonOrthogonalVariant::MinimumCorrection);
  CHECK(dm.x() == doctest::Approx(0.5));
  CHECK(km.dot(dm) == doctest::Approx(0.0).scale(1.0));
  const auto [dr, kr] = orthogonality_decomposition(S, d, NonOrthogonalVariant::OverRelaxed);
  CHECK(dr.norm() == doctest::Approx(std::sqrt(2.0)));
  CHECK(kr.dot(S) == doctest::Approx(0.0).scale(1.0));

  CHECK_THROWS_AS(orthogonality_decomposition(Vec2::Zero(), d, NonOrthogonalVariant::OrthogonalCorrection),
                  InvalidArgument);
}

TEST_CASE("face geometry invariants") {
  for (const Mesh& m : {body_channel(12, 8, 3.0, 2.0, Rect{1.0, 0.75, 1.5, 1.25}), sheared_channel(6, 5, 0.4)}) {
    for (const Face& f : m.faces()) {
      CHECK((f.delta + f.k - f.area).cwiseAbs().maxCoeff() == 0.0);
      CHECK(std::abs(f.delta.x() * f.d.y() - f.delta.y() * f.d.x()) <= 1e-15 * f.delta.norm() * f.d.norm() + 1e-300);
      if (f.internal()) {
        CHECK(f.area.dot(m.cell_centers()[f.neighbour] - m.cell_centers()[f.owner]) > 0.0);
        CHECK(f.weight > 0.0);
        CHECK(f.weight < 1.0);
      }
    }
  }
  const Mesh uniform = unit_channel(5, 3, 2.0, 1.0);
  for (Index f = 0; f < uniform.n_internal_faces(); ++f) CHECK(uniform.face(f).weight == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("cells are closed and internal faces cancel") {
  const Mesh m = body_channel(16, 8, 4.0, 2.0, Rect{1.0, 0.75, 1.5, 1.25});
  Vec2 all = Vec2::Zero(), boundary = Vec2::Zero();
  for (Index c = 0; c < m.n_cells(); ++c) {
    Vec2 s = Vec2::Zero();
    for (const CellFace& cf : m.cell_faces(c)) s += cf.sign * m.face(cf.face).area;
    CHECK(s.norm() <= 1e-12);
    all += s;
  }
  for (Index f = m.n_internal_faces(); f < m.n_faces(); ++f) boundary += m.face(f).area;
  CHECK((all - boundary).norm() <= 1e-12);
  CHECK(boundary.norm() <= 1e-12);
}

TEST_CASE("generation is deterministic and the text format round-trips") {
  ChannelSpec spec{16, 8, 4.0, 2.0, Rect{1.0, 0.75, 1.5, 1.25}, PatchKind::Slip};
  const Mesh a = generate_channel_mesh(spec), b = generate_channel_mesh(spec);
  CHECK(a.hash() == b.hash());
  std::ostringstream out;
  write_mesh(out, a);
  std::ostringstream again;
  write_mesh(again, b);
  CHECK(out.str() == again.str());
  CHECK(out.str().rfind("podfv-mesh v1\n", 0) == 0);

  std::istringstream in(out.str());
  const Mesh c = read_mesh(in);
  CHECK(c.hash() == a.hash());
  CHECK(c.n_cells() == a.n_cells());
  CHECK(c.patches().size() == a.patches().size());

  spec.side_kind = PatchKind::Wall;
  CHECK(generate_channel_mesh(spec).hash() != a.hash());

  std::istringstream bad("podfv-mesh v2\n");
  CHECK_THROWS_AS(read_mesh(bad), InvalidArgument);
  std::istringstream cut(out.str().substr(0, out.str().size() / 2));
  CHECK_THROWS_AS(read_mesh(cut), InvalidArgument);
}

TEST_CASE("sheared mesh carries a non-orthogonal remainder") {
  const Mesh m = sheared_channel(4, 4, 0.5);
  double kmax = 0.0;
  for (const Face& f : m.faces()) kmax = std::max(kmax, f.k.norm());
  CHECK(kmax > 0.01);
  const Mesh o = unit_channel(4, 4);
  for (const Face& f : o.faces()) CHECK(f.k.norm() == 0.0);
}

}

#include <doctest.h>

#include <set>

#include "fixtures.hpp"
#include "slvd/tessellation.hpp"

using namespace slvd;

TEST_CASE("validation of closed fixtures") {
  const Tessellation tet = fixtures::tetra();
  CHECK(tet.face_count() == 4);
  CHECK(tet.vertex_count() == 4);
  CHECK(tet.edge_count() == 6);
  CHECK(validate(tet).ok());

  const Tessellation cube = fixtures::cube();
  CHECK(cube.face_count() == 6);
  CHECK(cube.vertex_count() == 8);
  CHECK(cube.edge_count() == 12);
  CHECK(validate(cube).ok());
  const double s = 1 / std::sqrt(3.0);
  for (const auto& v : cube.vertices()) {
    CHECK(std::abs(std::abs(v.x()) - s) < 1e-12);
    CHECK(std::abs(std::abs(v.z()) - s) < 1e-12);
  }
}

TEST_CASE("degree-4 vertex is reported at the apex") {
  const ValidationReport r = validate(fixtures::square_pyramid());
  CHECK_FALSE(r.ok());
  const auto& deg = r.check(Invariant::Degree3);
  CHECK_FALSE(deg.passed);
  CHECK(deg.element == 0);
  CHECK(r.check(Invariant::Euler).passed);
  CHECK(r.check(Invariant::Convexity).passed);
  CHECK(r.check(Invariant::Orientation).passed);
}

TEST_CASE("individual invariant failures") {
  const Tessellation cube = fixtures::cube();

  SUBCASE("too few faces") {
    const Tessellation t({UnitVector(1, 0, 0), UnitVector(0, 1, 0), UnitVector(0, 0, 1)}, {{0, 1, 2}, {2, 1, 0}});
    CHECK_FALSE(validate(t).check(Invariant::FaceCount).passed);
  }
  SUBCASE("open surface") {
    auto faces = cube.faces();
    faces.pop_back();
    const ValidationReport r = validate(Tessellation(cube.vertices(), faces));
    CHECK_FALSE(r.check(Invariant::EdgeManifold).passed);
  }
  SUBCASE("one reversed face") {
    auto faces = cube.faces();
    std::reverse(faces[0].begin(), faces[0].end());
    const ValidationReport r = validate(Tessellation(cube.vertices(), faces));
    CHECK_FALSE(r.check(Invariant::Orientation).passed);
  }
  SUBCASE("repeated vertex in a face") {
    auto faces = cube.faces();
    faces[0].push_back(faces[0][0]);
    CHECK_FALSE(validate(Tessellation(cube.vertices(), faces)).check(Invariant::FaceShape).passed);
  }
  SUBCASE("nonconvex face") {
    auto verts = cube.vertices();
    const int v = cube.face(0)[0];
    // Pull the vertex toward the face's center far enough to fold its corner.
    const UnitVector c = polygon_centroid(cube.face_polygon(0));
    verts[static_cast<std::size_t>(v)] = UnitVector::normalize(c.vec() * 1.5 - 0.5 * cube.vertex(v).vec());
    CHECK_FALSE(validate(Tessellation(verts, cube.faces())).check(Invariant::Convexity).passed);
  }
}

TEST_CASE("out-of-range face index") {
  CHECK_THROWS_AS(Tessellation({UnitVector(1, 0, 0)}, {{0, 1, 2}}), Error);
}

TEST_CASE("edges and stars") {
  const Tessellation cube = fixtures::cube();
  for (const auto& [key, sides] : cube.edges()) {
    CHECK(key.first < key.second);
    CHECK(sides.left >= 0);
    CHECK(sides.right >= 0);
    CHECK(sides.left != sides.right);
  }
  const auto stars = vertex_stars(cube);
  CHECK(stars.size() == 8);
  for (const auto& s : stars) {
    CHECK(std::set<int>(s.faces.begin(), s.faces.end()).size() == 3);
    for (const auto& e : s.edges) CHECK((e.first == s.vertex || e.second == s.vertex));
  }
  CHECK(vertex_stars(fixtures::tetra()).size() == 4);
  CHECK(cube.neighbors(0).size() == 3);

  const Tessellation t50 = fixtures::full_slvd(50, 3);
  REQUIRE(t50.face_count() == 50);
  CHECK(vertex_stars(t50).size() == 96);
  CHECK(t50.vertex_count() == 96);
}

TEST_CASE("TES round trip") {
  const Tessellation tet = fixtures::tetra();
  const Tessellation back = parse_tes(serialize_tes(tet, "tetra\nsecond line"));
  CHECK(back.faces() == tet.faces());

  const Tessellation t50 = fixtures::full_slvd(50, 4);
  const Tessellation b50 = parse_tes(serialize_tes(t50));
  REQUIRE(b50.vertex_count() == t50.vertex_count());
  CHECK(b50.faces() == t50.faces());
  double worst = 0;
  for (std::size_t v = 0; v < t50.vertex_count(); ++v) {
    worst = std::max(worst, (b50.vertices()[v].vec() - t50.vertices()[v].vec()).cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-15);
}

TEST_CASE("TES errors carry line numbers") {
  const std::string good_head = "V 4\nv 1 0 0\nv 0 1 0\nv 0 0 1\nv -1 0 0\nF 4\n";
  try {
    parse_tes(good_head + "f 0 1 2\nf 0 99 2\nf 0 1 3\nf 1 2 3\n");
    FAIL("expected IndexError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::IndexError);
    CHECK(e.where() == 8);
  }
  try {
    parse_tes("V 1\nv 1 zero 0\n");
    FAIL("expected SyntaxError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SyntaxError);
    CHECK(e.where() == 2);
  }
  CHECK_THROWS_AS(parse_tes("V 2\nv 1 0 0\n"), Error);
  CHECK_THROWS_AS(parse_tes("q 1\n"), Error);
  CHECK_NOTHROW(parse_tes("# comment\n\n" + good_head + "f 0 1 2\nf 2 1 3\nf 0 2 3\nf 1 0 3\n"));
}

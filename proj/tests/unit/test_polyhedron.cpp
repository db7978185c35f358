#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "slvd/forward.hpp"
#include "slvd/polyhedron.hpp"

using namespace slvd;

namespace {

Plane axis_plane(int axis, double sign, double d) {
  Vec3 n = Vec3::Zero();
  n[axis] = sign;
  return Plane(UnitVector(n), d);
}

std::vector<Plane> cube_planes(double d = 0.5) {
  std::vector<Plane> out;
  for (int axis = 0; axis < 3; ++axis) {
    out.push_back(axis_plane(axis, 1, d));
    out.push_back(axis_plane(axis, -1, d));
  }
  return out;
}

// Exhaustive vertex oracle: every feasible intersection of three planes.
std::vector<Vec3> brute_force_vertices(const std::vector<Plane>& planes) {
  std::vector<Vec3> out;
  const auto n = planes.size();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      for (std::size_t c = b + 1; c < n; ++c) {
        const Vec3& na = planes[a].normal().vec();
        const Vec3& nb = planes[b].normal().vec();
        const Vec3& nc = planes[c].normal().vec();
        Eigen::Matrix3d m;
        m.row(0) = na;
        m.row(1) = nb;
        m.row(2) = nc;
        if (std::abs(m.determinant()) < 1e-9) continue;
        const Vec3 x = m.fullPivLu().solve(Vec3(planes[a].offset(), planes[b].offset(), planes[c].offset()));
        bool feasible = true;
        for (const auto& p : planes) feasible = feasible && p.evaluate(x) <= 1e-10;
        if (!feasible) continue;
        bool known = false;
        for (const auto& y : out) known = known || (x - y).norm() < 1e-9;
        if (!known) out.push_back(x);
      }
    }
  }
  return out;
}

std::vector<Plane> random_planes(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> offset(0.5, 1.5);
  std::vector<Plane> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(random_unit_vector(rng), offset(rng));
  return out;
}

}  // namespace

TEST_CASE("plane construction") {
  CHECK_THROWS_AS(Plane(UnitVector(0, 0, 1), 0.0), Error);
  CHECK_THROWS_AS(Plane(UnitVector(0, 0, 1), -1.0), Error);
  const Plane p = Plane::through(Vec3(0, 0, -2), Vec3(0, 0, 0.5));
  CHECK(p.normal().z() == doctest::Approx(1.0));
  CHECK(p.offset() == doctest::Approx(0.5));
  CHECK(p.dual_point().z() == doctest::Approx(2.0));
  CHECK_THROWS_AS(Plane::through(Vec3(1, 0, 0), Vec3(0, 3, 0)), Error);
}

TEST_CASE("projective maps") {
  const ProjectiveMap id = ProjectiveMap::identity();
  const HomPoint p{1.0, 0.3, -0.2, 0.7};
  const HomPoint q = apply_map(id, p);
  CHECK(q.t == p.t);
  CHECK(q.x == p.x);
  CHECK(q.z == p.z);

  const ProjectiveMap m(2.0, 0.3, -0.4, 0.1, 0.7);
  const HomPoint o = apply_map(m, {1, 0, 0, 0});
  CHECK(o.t == 2.0);
  CHECK(o.x == 0.0);
  CHECK(o.y == 0.0);
  CHECK(o.z == 0.0);

  const HomPoint r = apply_map(ProjectiveMap(1, 0.1, 0, 0, 1), {1, 1, 0, 0});
  CHECK(r.t == doctest::Approx(1.1));
  CHECK(r.euclidean().x() == doctest::Approx(1 / 1.1));

  CHECK_THROWS_AS(ProjectiveMap(0, 0, 0, 0, 1), Error);
  CHECK_THROWS_AS(ProjectiveMap(1, 0, 0, 0, 0), Error);

  // Composition and inverse agree with matrix products.
  const ProjectiveMap n(0.5, -0.2, 0.0, 0.9, 1.3);
  CHECK((n.after(m).matrix() - n.matrix() * m.matrix()).norm() < 1e-14);
  const Eigen::Matrix4d round = m.inverse().matrix() * m.matrix();
  CHECK((round / round(0, 0) - Eigen::Matrix4d::Identity()).norm() < 1e-14);
}

TEST_CASE("projection preservation") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<HomPoint> samples;
  for (int s = 0; s < 100; ++s) samples.push_back(HomPoint::affine(Vec3(u(rng), u(rng), u(rng))));
  CHECK(is_projection_preserving_witness(ProjectiveMap::identity(), samples));
  CHECK(is_projection_preserving_witness(ProjectiveMap(3.0, 0.1, 0.2, -0.3, 0.5), samples));

  Eigen::Matrix4d skew = ProjectiveMap::identity().matrix();
  skew(1, 2) = 0.1;
  CHECK_FALSE(is_projection_preserving_witness(skew, samples));

  const std::vector<HomPoint> at_infinity{HomPoint::affine(Vec3(-1, 0, 0))};
  CHECK_THROWS_AS(is_projection_preserving_witness(ProjectiveMap(1, 1, 0, 0, 1), at_infinity), Error);
}

TEST_CASE("mapped planes carry mapped points") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int trial = 0; trial < 50; ++trial) {
    const ProjectiveMap m(1.0 + u(rng), u(rng), u(rng), u(rng), 1.0 + u(rng));
    const Plane p(random_unit_vector(rng), 1.0 + u(rng));
    const Plane img = map_plane(m, p);
    const Vec3 e1 = p.normal().vec().unitOrthogonal();
    for (double s : {-0.5, 0.0, 0.4}) {
      const Vec3 x = p.offset() * p.normal().vec() + s * e1;
      const HomPoint y = apply_map(m, HomPoint::affine(x));
      if (std::abs(y.t) < 1e-3) continue;
      CHECK(std::abs(img.evaluate(y.euclidean())) < 1e-12);
    }
  }
}

TEST_CASE("plane intersections") {
  const Line3 l = plane_intersection_line(axis_plane(2, 1, 0.5), axis_plane(0, 1, 0.5));
  CHECK(l.point.isApprox(Vec3(0.5, 0, 0.5)));
  CHECK(std::abs(std::abs(l.direction.y()) - 1) < 1e-15);
  CHECK_THROWS_AS(plane_intersection_line(axis_plane(2, 1, 0.5), axis_plane(2, 1, 0.5)), Error);

  CHECK(three_planes_point(axis_plane(0, 1, .5), axis_plane(1, 1, .5), axis_plane(2, 1, .5)).isApprox(Vec3(.5, .5, .5)));
  const Plane a(UnitVector::normalize(Vec3(1, 1, 0)), 1.0);
  const Plane b(UnitVector::normalize(Vec3(1, -1, 0)), 1.0);
  const Plane c(UnitVector(1, 0, 0), std::sqrt(2.0));  // contains the line a ∩ b
  CHECK_THROWS_AS(three_planes_point(a, b, c), Error);

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto ps = random_planes(3, rng);
    const Line3 line = plane_intersection_line(ps[0], ps[1]);
    for (double s : {-3.0, 0.0, 2.5}) {
      CHECK(std::abs(ps[0].evaluate(line.at(s))) < 1e-12);
      CHECK(std::abs(ps[1].evaluate(line.at(s))) < 1e-12);
    }
    const Vec3 x = three_planes_point(ps[0], ps[1], ps[2]);
    const double scale = std::max(1.0, x.norm());
    for (const auto& p : ps) CHECK(std::abs(p.evaluate(x)) < 1e-12 * scale);
  }
}

TEST_CASE("halfspace intersection") {
  SUBCASE("cube") {
    const ConvexPolyhedron poly = halfspace_intersection(cube_planes());
    CHECK(poly.vertices.size() == 8);
    for (const auto& v : poly.vertices) CHECK((v.cwiseAbs() - Vec3::Constant(0.5)).norm() < 1e-12);
    CHECK(poly.dropped.empty());
    for (const auto& f : poly.faces) CHECK(f.size() == 4);
  }
  SUBCASE("redundant plane is dropped") {
    auto planes = cube_planes();
    planes.push_back(axis_plane(2, 1, 10.0));
    const ConvexPolyhedron poly = halfspace_intersection(planes);
    CHECK(poly.vertices.size() == 8);
    CHECK(poly.dropped == std::vector<int>{6});
  }
  SUBCASE("unbounded") {
    const std::vector<Plane> planes{axis_plane(0, 1, 1), axis_plane(1, 1, 1), axis_plane(2, 1, 1),
                                    Plane(UnitVector::normalize(Vec3(1, 1, 1)), 1)};
    CHECK_THROWS_AS(halfspace_intersection(planes), Error);
    CHECK_THROWS_AS(halfspace_intersection(std::span(planes).first(3)), Error);
  }
  SUBCASE("matches the exhaustive vertex oracle") {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 10; ++trial) {
      const auto planes = random_planes(20, rng);
      const ConvexPolyhedron poly = halfspace_intersection(planes);
      const auto oracle = brute_force_vertices(planes);
      CHECK(poly.vertices.size() == oracle.size());
      for (const auto& v : poly.vertices) {
        for (const auto& p : planes) CHECK(p.evaluate(v) <= 1e-10);
        bool found = false;
        for (const auto& w : oracle) found = found || (v - w).norm() < 1e-9;
        CHECK(found);
      }
      for (std::size_t v = 0; v < poly.vertices.size(); ++v) {
        for (int i : poly.vertex_planes[v]) CHECK(std::abs(poly.planes[static_cast<std::size_t>(i)].evaluate(poly.vertices[v])) < 1e-10);
      }
      const auto nv = static_cast<long>(poly.vertices.size());
      long edges = 0;
      for (const auto& f : poly.faces) edges += static_cast<long>(f.size());
      CHECK(nv - edges / 2 + static_cast<long>(poly.active_planes().size()) == 2);
    }
  }
}

TEST_CASE("central projection") {
  const Tessellation cube = central_projection(halfspace_intersection(cube_planes()));
  CHECK(cube.vertex_count() == 8);
  CHECK(validate(cube).ok());
  for (const auto& v : cube.vertices()) CHECK(std::abs(std::abs(v.x()) - 1 / std::sqrt(3.0)) < 1e-12);

  std::vector<Plane> tet;
  for (const auto& d : fixtures::tetra_directions()) tet.emplace_back(d, 0.4);
  CHECK(central_projection(halfspace_intersection(tet)).face_count() == 4);

  // Four planes meeting at one apex.
  std::vector<Plane> pyramid{axis_plane(2, -1, 0.5)};
  for (int k = 0; k < 4; ++k) {
    const double a = kPi / 2 * k;
    pyramid.emplace_back(UnitVector::normalize(Vec3(std::cos(a), std::sin(a), 1)), 0.5);
  }
  CHECK_THROWS_AS(central_projection(halfspace_intersection(pyramid)), Error);
}

TEST_CASE("OFF output") {
  const std::string off = to_off(halfspace_intersection(cube_planes()));
  CHECK(off.rfind("OFF\n8 6 12\n", 0) == 0);
}

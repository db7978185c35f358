#include <doctest.h>

#include <cmath>
#include <random>

#include "slvd/forward.hpp"
#include "slvd/spherical.hpp"

using namespace slvd;

namespace {

// Independent membership oracle: total azimuth swept around the axis through
// p by the boundary. Edges are subdivided so no step sweeps more than pi. A
// nonzero winding means the polygon holds p or -p; the polygons here are
// smaller than a hemisphere, so the vertex sum picks which.
bool winding_inside(const UnitVector& p, const std::vector<UnitVector>& poly) {
  auto tangent = [&](const Vec3& v) { return Vec3(v - v.dot(p.vec()) * p.vec()); };
  double total = 0.0;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const GeodesicArc edge(poly[k], poly[(k + 1) % poly.size()]);
    for (int s = 0; s < 256; ++s) {
      const Vec3 a = tangent(edge.point_at(s / 256.0).vec());
      const Vec3 b = tangent(edge.point_at((s + 1) / 256.0).vec());
      total += std::atan2(a.cross(b).dot(p.vec()), a.dot(b));
    }
  }
  Vec3 sum = Vec3::Zero();
  for (const auto& v : poly) sum += v.vec();
  return std::abs(total) > kPi && sum.dot(p.vec()) > 0;
}

// Vertices on a small circle around c at increasing angles: convex, CCW.
std::vector<UnitVector> circle_polygon(const UnitVector& c, double rho, std::vector<double> angles) {
  const Vec3 e1 = c.vec().unitOrthogonal();
  const Vec3 e2 = c.vec().cross(e1);
  std::vector<UnitVector> out;
  for (double a : angles) {
    out.push_back(UnitVector::normalize(std::cos(rho) * c.vec() +
                                        std::sin(rho) * (std::cos(a) * e1 + std::sin(a) * e2)));
  }
  return out;
}

const std::vector<UnitVector> kOctant{UnitVector(1, 0, 0), UnitVector(0, 1, 0), UnitVector(0, 0, 1)};

}  // namespace

TEST_CASE("unit vectors") {
  CHECK_THROWS_AS(UnitVector(0, 0, 0), Error);
  CHECK_THROWS_AS(UnitVector(2, 0, 0), Error);
  CHECK(UnitVector(1 + 1e-9, 0, 0).vec().norm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(UnitVector::normalize(Vec3(3, 4, 0)).x() == doctest::Approx(0.6));
}

TEST_CASE("circle radius range") {
  CHECK_NOTHROW(SphericalCircle(UnitVector(0, 0, 1), 0.0));
  CHECK_THROWS_AS(SphericalCircle(UnitVector(0, 0, 1), kPi / 2), Error);
  CHECK_THROWS_AS(SphericalCircle(UnitVector(0, 0, 1), -0.1), Error);
}

TEST_CASE("geodesic distance") {
  CHECK(geodesic_distance(UnitVector(1, 0, 0), UnitVector(0, 1, 0)) == doctest::Approx(kPi / 2));
  CHECK(geodesic_distance(UnitVector(1, 0, 0), UnitVector(1, 0, 0)) == 0.0);
  CHECK(geodesic_distance(UnitVector(1, 0, 0), UnitVector(-1, 0, 0)) == doctest::Approx(kPi));
  // Stable for tiny angles where acos of the dot product is not.
  const UnitVector a(1, 0, 0);
  const UnitVector b = UnitVector::normalize(Vec3(1, 1e-10, 0));
  CHECK(geodesic_distance(a, b) == doctest::Approx(1e-10).epsilon(1e-6));
}

TEST_CASE("geodesic arcs") {
  CHECK_THROWS_AS(GeodesicArc(UnitVector(1, 0, 0), UnitVector(-1, 0, 0)), Error);
  CHECK_THROWS_AS(GeodesicArc(UnitVector(1, 0, 0), UnitVector(1, 0, 0)), Error);
  const GeodesicArc arc(UnitVector(1, 0, 0), UnitVector(0, 1, 0));
  CHECK(arc.length() == doctest::Approx(kPi / 2));
  const UnitVector mid = arc.point_at(0.5);
  CHECK(mid.x() == doctest::Approx(std::sqrt(0.5)));
  CHECK(mid.y() == doctest::Approx(std::sqrt(0.5)));
  CHECK(arc.pole().z() == doctest::Approx(1.0));
  // Short edges of fine diagrams are legitimate arcs.
  const GeodesicArc short_arc(UnitVector(1, 0, 0), UnitVector(std::cos(1e-7), std::sin(1e-7), 0));
  CHECK(short_arc.length() == doctest::Approx(1e-7).epsilon(1e-6));
}

TEST_CASE("laguerre proximity") {
  const UnitVector c(0, 0, 1);
  CHECK(laguerre_proximity(c, SphericalCircle(c, 0.0)) == doctest::Approx(1.0));
  CHECK(laguerre_proximity(c, SphericalCircle(c, kPi / 3)) == doctest::Approx(2.0));
  CHECK(std::abs(laguerre_proximity(UnitVector(1, 0, 0), SphericalCircle(c, 0.7))) < 1e-15);
}

TEST_CASE("laguerre bisector") {
  SUBCASE("equal radii on two axes") {
    const GreatCircle g = laguerre_bisector(SphericalCircle(UnitVector(1, 0, 0), 0.2),
                                            SphericalCircle(UnitVector(0, 1, 0), 0.2));
    CHECK(g.normal.x() == doctest::Approx(std::sqrt(0.5)));
    CHECK(g.normal.y() == doctest::Approx(-std::sqrt(0.5)));
    CHECK(g.side(UnitVector(1, 0, 0)) > 0);
  }
  SUBCASE("identical sites") {
    const SphericalCircle c(UnitVector(0, 0, 1), 0.3);
    CHECK_THROWS_AS(laguerre_bisector(c, c), Error);
  }
  SUBCASE("random pairs: equal proximity and a right angle with the center arc") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> radius(0.0, 1.4);
    for (int trial = 0; trial < 200; ++trial) {
      const SphericalCircle ci(random_unit_vector(rng), radius(rng));
      const SphericalCircle cj(random_unit_vector(rng), radius(rng));
      const GreatCircle g = laguerre_bisector(ci, cj);
      const Vec3 arc_normal = ci.center.vec().cross(cj.center.vec()).normalized();
      CHECK(std::abs(g.normal.vec().dot(arc_normal)) < 1e-9);
      const Vec3 e1 = g.normal.vec().unitOrthogonal();
      const Vec3 e2 = g.normal.vec().cross(e1);
      for (int s = 0; s < 10; ++s) {
        const double a = 2 * kPi * s / 10;
        const UnitVector q = UnitVector::normalize(std::cos(a) * e1 + std::sin(a) * e2);
        CHECK(std::abs(laguerre_proximity(q, ci) - laguerre_proximity(q, cj)) < 1e-9);
      }
      // Nearer side is positive.
      const UnitVector mid = UnitVector::normalize(ci.center.vec() + 1e-3 * g.normal.vec());
      if (std::abs(g.side(mid)) > 1e-6) {
        CHECK((g.side(mid) > 0) == (laguerre_proximity(mid, ci) > laguerre_proximity(mid, cj)));
      }
    }
  }
}

TEST_CASE("point in spherical polygon") {
  CHECK(point_in_spherical_polygon(UnitVector::normalize(Vec3(1, 1, 1)), kOctant));
  CHECK_FALSE(point_in_spherical_polygon(UnitVector(-1, 0, 0), kOctant));
  CHECK(point_in_spherical_polygon(UnitVector(1, 0, 0), kOctant));  // boundary counts
  CHECK_THROWS_AS(point_in_spherical_polygon(UnitVector(1, 0, 0), std::vector<UnitVector>(kOctant.begin(), kOctant.begin() + 2)),
                  Error);
  CHECK_THROWS_AS(point_in_spherical_polygon(UnitVector(1, 0, 0),
                                             std::vector<UnitVector>{UnitVector(1, 0, 0), UnitVector(1, 0, 0),
                                                                     UnitVector(0, 1, 0)}),
                  Error);

  SUBCASE("agrees with the winding-number oracle") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int poly_trial = 0; poly_trial < 10; ++poly_trial) {
      const UnitVector c = random_unit_vector(rng);
      std::vector<double> angles;
      const int k = 3 + poly_trial % 5;
      for (int i = 0; i < k; ++i) angles.push_back((i + 0.8 * unit(rng)) * 2 * kPi / k);
      const auto poly = circle_polygon(c, 0.3 + unit(rng), angles);
      REQUIRE(is_convex_spherical_polygon(poly));
      int disagreements = 0;
      for (int s = 0; s < 1000; ++s) {
        const UnitVector p = poly_trial % 2 ? random_unit_vector(rng)
                                            : UnitVector::normalize(c.vec() + 1.2 * random_unit_vector(rng).vec());
        if (distance_to_polygon_boundary(p, poly) < 1e-9) continue;
        disagreements += point_in_spherical_polygon(p, poly) != winding_inside(p, poly);
      }
      CHECK(disagreements == 0);
    }
  }
}

TEST_CASE("convexity") {
  CHECK(is_convex_spherical_polygon(kOctant));
  CHECK_FALSE(is_convex_spherical_polygon(std::vector<UnitVector>(kOctant.rbegin(), kOctant.rend())));
  const UnitVector c(0, 0, 1);
  auto quad = circle_polygon(c, 0.5, {0.0, kPi / 2, kPi, 3 * kPi / 2});
  CHECK(is_convex_spherical_polygon(quad));
  // Reflect vertex 1 across the great circle through vertices 0 and 2.
  const Vec3 n = quad[0].vec().cross(quad[2].vec()).normalized();
  const Vec3 reflected = quad[1].vec() - 2 * quad[1].vec().dot(n) * n;
  quad[1] = UnitVector::normalize(0.5 * (reflected + quad[1].vec()) + 0.3 * (reflected - quad[1].vec()));
  CHECK_FALSE(is_convex_spherical_polygon(quad));
}

TEST_CASE("boundary distance and centroid") {
  const UnitVector p = UnitVector::normalize(Vec3(1, 1, 1));
  CHECK(distance_to_polygon_boundary(p, kOctant) == doctest::Approx(std::asin(1 / std::sqrt(3.0))));
  const UnitVector c = polygon_centroid(kOctant);
  CHECK(c.x() == doctest::Approx(p.x()));
  CHECK(c.z() == doctest::Approx(p.z()));
}

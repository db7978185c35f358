#pragma once

#include <span>
#include <vector>

#include <Eigen/Geometry>

#include "slvd/error.hpp"

namespace slvd {

using Vec3 = Eigen::Vector3d;

/// Numerical tolerances threaded through every geometric operation.
struct Tolerances {
  double norm = 1e-12;       // unit-vector normalization, degenerate directions
  double offset = 1e-9;      // minimum plane distance from the origin
  double parallel = 1e-12;   // |n1 x n2| below this means parallel planes
  double det = 1e-12;        // |det| below this means a degenerate plane triple
  double incidence = 1e-10;  // point-on-plane tolerance for polyhedron vertices
};

inline constexpr double kPi = 3.14159265358979323846;

/// A direction on the unit sphere centered at the origin.
class UnitVector {
public:
  /// Accepts vectors within 1e-6 of unit length and renormalizes them.
  UnitVector(double x, double y, double z);
  explicit UnitVector(const Vec3& v);

  /// Normalizes any vector whose length exceeds `eps`.
  static UnitVector normalize(const Vec3& v, double eps = 1e-12);

  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double z() const { return v_.z(); }
  const Vec3& vec() const { return v_; }
  double dot(const UnitVector& o) const { return v_.dot(o.v_); }
  UnitVector operator-() const { return UnitVector(Vec3(-v_)); }

private:
  struct Trusted {};
  UnitVector(const Vec3& v, Trusted) : v_(v) {}
  Vec3 v_;
};

/// Generator site: a circle on the sphere with angular radius in [0, pi/2).
struct SphericalCircle {
  SphericalCircle(const UnitVector& c, double r);

  UnitVector center;
  double radius;
};

/// Oriented great circle; the positive side is { p : normal . p > 0 }.
struct GreatCircle {
  UnitVector normal;

  double side(const UnitVector& p) const { return normal.dot(p); }
};

/// Minor arc between two non-equal, non-antipodal points.
class GeodesicArc {
public:
  GeodesicArc(const UnitVector& a, const UnitVector& b, double eps = 1e-12);

  const UnitVector& a() const { return a_; }
  const UnitVector& b() const { return b_; }
  double length() const;
  /// Point at fraction s in [0,1] of the arc length from a.
  UnitVector point_at(double s) const;
  /// Normal of the supporting great circle, oriented by a x b.
  UnitVector pole() const;

private:
  UnitVector a_;
  UnitVector b_;
};

/// Angle between two nonzero vectors, stable near 0 and pi.
double angle_between(const Vec3& a, const Vec3& b);

double geodesic_distance(const UnitVector& p, const UnitVector& q);

/// cos(d(center, p)) / cos(radius). Larger means nearer.
double laguerre_proximity(const UnitVector& p, const SphericalCircle& c);

/// Great circle of equal proximity; the positive side is nearer to `ci`.
GreatCircle laguerre_bisector(const SphericalCircle& ci, const SphericalCircle& cj,
                              const Tolerances& tol = {});

/// Convex polygon, vertices counter-clockwise seen from outside the sphere.
/// Boundary points count as inside.
bool point_in_spherical_polygon(const UnitVector& p, std::span<const UnitVector> polygon,
                                const Tolerances& tol = {});

bool is_convex_spherical_polygon(std::span<const UnitVector> polygon,
                                 const Tolerances& tol = {});

/// Smallest angular distance from p to the great circles carrying the
/// polygon's edges. For p inside a convex polygon this is its distance to the
/// boundary.
double distance_to_polygon_boundary(const UnitVector& p, std::span<const UnitVector> polygon);

/// Vertex-mean direction of a polygon.
UnitVector polygon_centroid(std::span<const UnitVector> polygon);

}  // namespace slvd

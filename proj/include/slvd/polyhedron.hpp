#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "slvd/spherical.hpp"
#include "slvd/tessellation.hpp"

namespace slvd {

/// Affine plane { x : normal . x = offset } with offset > 0, so the origin lies
/// strictly inside the halfspace normal . x <= offset.
class Plane {
public:
  Plane(const UnitVector& normal, double offset, const Tolerances& tol = {});

  /// Plane with the given (unnormalized) normal through `point`, re-oriented
  /// so that the origin is on the inner side.
  static Plane through(const Vec3& normal, const Vec3& point, const Tolerances& tol = {});

  const UnitVector& normal() const { return normal_; }
  double offset() const { return offset_; }
  double evaluate(const Vec3& x) const { return normal_.vec().dot(x) - offset_; }
  /// normal / offset; the plane is { x : dual . x = 1 }.
  Vec3 dual_point() const { return normal_.vec() / offset_; }
  Plane scaled(double s, const Tolerances& tol = {}) const { return Plane(normal_, offset_ * s, tol); }

private:
  UnitVector normal_;
  double offset_;
};

struct Line3 {
  Vec3 point;
  UnitVector direction;

  Vec3 at(double s) const { return point + s * direction.vec(); }
  /// Orthogonal projection of x onto the line.
  Vec3 foot(const Vec3& x) const { return at(direction.vec().dot(x - point)); }
};

/// Homogeneous point (t, x, y, z); t comes first.
struct HomPoint {
  double t, x, y, z;

  static HomPoint affine(const Vec3& p) { return {1.0, p.x(), p.y(), p.z()}; }
  Vec3 spatial() const { return {x, y, z}; }
  /// Euclidean point; requires t != 0.
  Vec3 euclidean() const { return spatial() / t; }
  Eigen::Vector4d vec() const { return {t, x, y, z}; }
};

/// The five-parameter family of projective maps that fix the origin and every
/// line through it:
///   [ alpha beta gamma delta ]
///   [   0    eta    0     0  ]
///   [   0     0    eta    0  ]
///   [   0     0     0    eta ]
struct ProjectiveMap {
  ProjectiveMap(double alpha, double beta, double gamma, double delta, double eta);

  static ProjectiveMap identity() { return {1.0, 0.0, 0.0, 0.0, 1.0}; }

  Eigen::Matrix4d matrix() const;
  /// this ∘ first
  ProjectiveMap after(const ProjectiveMap& first) const;
  ProjectiveMap inverse() const { return {eta, -beta, -gamma, -delta, alpha}; }

  double alpha, beta, gamma, delta, eta;
};

HomPoint apply_map(const ProjectiveMap& m, const HomPoint& p);

/// Image of a plane: its dual point w goes to (alpha w + (beta,gamma,delta)) / eta.
/// Throws InvalidPlane when the image passes through the origin.
Plane map_plane(const ProjectiveMap& m, const Plane& p, const Tolerances& tol = {});

/// Checks that every affine sample and its image lie on one line through the
/// origin (angular tolerance `angle_tol`). Throws DegenerateSample when an
/// image lands at infinity.
bool is_projection_preserving_witness(const Eigen::Matrix4d& m, std::span<const HomPoint> samples,
                                      double angle_tol = 1e-12);
bool is_projection_preserving_witness(const ProjectiveMap& m, std::span<const HomPoint> samples,
                                      double angle_tol = 1e-12);

/// Intersection line; direction n1 x n2, point of minimum norm.
Line3 plane_intersection_line(const Plane& p1, const Plane& p2, const Tolerances& tol = {});

Vec3 three_planes_point(const Plane& p1, const Plane& p2, const Plane& p3,
                        const Tolerances& tol = {});

/// Bounded intersection of halfspaces normal . x <= offset.
struct ConvexPolyhedron {
  std::vector<Plane> planes;
  /// Per plane, cyclic list of polyhedron vertex indices, counter-clockwise
  /// seen from outside. Empty for redundant planes.
  std::vector<std::vector<int>> faces;
  std::vector<Vec3> vertices;
  /// Incident plane indices of each vertex.
  std::vector<std::vector<int>> vertex_planes;
  /// Redundant planes, ascending.
  std::vector<int> dropped;

  /// Planes that contribute a face, ascending.
  std::vector<int> active_planes() const;
  ConvexPolyhedron scaled(double s) const;
};

/// Halfspace intersection through the convex hull of the dual points
/// normal / offset. Throws UnboundedIntersection when the origin is not
/// interior to that hull.
ConvexPolyhedron halfspace_intersection(std::span<const Plane> planes, const Tolerances& tol = {});

/// Radial projection onto the unit sphere. Face f of the result is the f-th
/// active plane. Throws NonSimpleVertex for vertices on more than 3 faces.
Tessellation central_projection(const ConvexPolyhedron& poly);

/// OFF text: header, counts, vertices, faces (active planes only).
std::string to_off(const ConvexPolyhedron& poly);

}  // namespace slvd

#include "slvd/spherical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Geometry>
#include <fmt/core.h>

namespace slvd {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidUnitVector: return "InvalidUnitVector";
    case Errc::InvalidCircle: return "InvalidCircle";
    case Errc::DegenerateSites: return "DegenerateSites";
    case Errc::InvalidPolygon: return "InvalidPolygon";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::IndexError: return "IndexError";
    case Errc::MixedOrientation: return "MixedOrientation";
    case Errc::InvalidPlane: return "InvalidPlane";
    case Errc::InvalidMap: return "InvalidMap";
    case Errc::ParallelPlanes: return "ParallelPlanes";
    case Errc::DegenerateTriple: return "DegenerateTriple";
    case Errc::DegenerateSample: return "DegenerateSample";
    case Errc::UnboundedIntersection: return "UnboundedIntersection";
    case Errc::NonSimpleVertex: return "NonSimpleVertex";
    case Errc::InvalidGeneratorSet: return "InvalidGeneratorSet";
    case Errc::TooFewActive: return "TooFewActive";
    case Errc::SeedOutOfFace: return "SeedOutOfFace";
    case Errc::ArcMissesPolygon: return "ArcMissesPolygon";
    case Errc::DegenerateSeed: return "DegenerateSeed";
    case Errc::DisconnectedPropagation: return "DisconnectedPropagation";
    case Errc::DegeneratePropagation: return "DegeneratePropagation";
    case Errc::NonPositiveOffset: return "NonPositiveOffset";
    case Errc::InvalidTessellation: return "InvalidTessellation";
    case Errc::Usage: return "Usage";
  }
  return "Unknown";
}

UnitVector::UnitVector(double x, double y, double z) : UnitVector(Vec3(x, y, z)) {}

UnitVector::UnitVector(const Vec3& v) {
  const double n = v.norm();
  if (!std::isfinite(n) || std::abs(n - 1.0) > 1e-6) {
    throw Error(Errc::InvalidUnitVector,
                fmt::format("vector ({}, {}, {}) has length {}", v.x(), v.y(), v.z(), n));
  }
  v_ = v / n;
}

UnitVector UnitVector::normalize(const Vec3& v, double eps) {
  const double n = v.norm();
  if (!std::isfinite(n) || n <= eps) {
    throw Error(Errc::InvalidUnitVector, fmt::format("cannot normalize vector of length {}", n));
  }
  return UnitVector(Vec3(v / n), Trusted{});
}

SphericalCircle::SphericalCircle(const UnitVector& c, double r) : center(c), radius(r) {
  if (!(r >= 0.0 && r < kPi / 2)) {
    throw Error(Errc::InvalidCircle, fmt::format("circle radius {} outside [0, pi/2)", r));
  }
}

GeodesicArc::GeodesicArc(const UnitVector& a, const UnitVector& b, double eps) : a_(a), b_(b) {
  // The sine keeps full relative precision for short arcs; 1 - |cos| does not.
  if (a.vec().cross(b.vec()).norm() <= eps) {
    throw Error(Errc::InvalidPolygon, "arc endpoints are equal or antipodal");
  }
}

double GeodesicArc::length() const { return geodesic_distance(a_, b_); }

UnitVector GeodesicArc::point_at(double s) const {
  const double theta = length();
  const double wa = std::sin((1.0 - s) * theta) / std::sin(theta);
  const double wb = std::sin(s * theta) / std::sin(theta);
  return UnitVector::normalize(wa * a_.vec() + wb * b_.vec());
}

UnitVector GeodesicArc::pole() const { return UnitVector::normalize(a_.vec().cross(b_.vec())); }

double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

double geodesic_distance(const UnitVector& p, const UnitVector& q) {
  return std::acos(std::clamp(p.dot(q), -1.0, 1.0));
}

double laguerre_proximity(const UnitVector& p, const SphericalCircle& c) {
  return std::cos(geodesic_distance(c.center, p)) / std::cos(c.radius);
}

GreatCircle laguerre_bisector(const SphericalCircle& ci, const SphericalCircle& cj,
                              const Tolerances& tol) {
  const Vec3 diff = ci.center.vec() / std::cos(ci.radius) - cj.center.vec() / std::cos(cj.radius);
  if (diff.norm() < tol.norm) {
    throw Error(Errc::DegenerateSites, "identical weighted sites have no bisector");
  }
  return GreatCircle{UnitVector::normalize(diff, 0.0)};
}

namespace {

void check_polygon(std::span<const UnitVector> polygon, const Tolerances& tol) {
  if (polygon.size() < 3) {
    throw Error(Errc::InvalidPolygon, fmt::format("polygon has {} vertices", polygon.size()));
  }
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const auto& a = polygon[i];
    const auto& b = polygon[(i + 1) % polygon.size()];
    if (a.vec().cross(b.vec()).norm() <= tol.norm) {
      throw Error(Errc::InvalidPolygon,
                  fmt::format("polygon edge {} has equal or antipodal endpoints", i),
                  static_cast<long>(i));
    }
  }
}

Vec3 edge_pole(const UnitVector& a, const UnitVector& b) {
  return a.vec().cross(b.vec()).normalized();
}

}  // namespace

bool point_in_spherical_polygon(const UnitVector& p, std::span<const UnitVector> polygon,
                                const Tolerances& tol) {
  check_polygon(polygon, tol);
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    if (edge_pole(polygon[i], polygon[(i + 1) % polygon.size()]).dot(p.vec()) < -tol.norm) {
      return false;
    }
  }
  return true;
}

bool is_convex_spherical_polygon(std::span<const UnitVector> polygon, const Tolerances& tol) {
  check_polygon(polygon, tol);
  const std::size_t m = polygon.size();
  for (std::size_t i = 0; i < m; ++i) {
    // Unnormalized: a normalized pole of a very short edge carries rounding
    // error far above tol.norm.
    const Vec3 pole = polygon[i].vec().cross(polygon[(i + 1) % m].vec());
    for (std::size_t k = 0; k < m; ++k) {
      if (k == i || k == (i + 1) % m) continue;
      if (pole.dot(polygon[k].vec()) < -tol.norm) return false;
    }
  }
  return true;
}

double distance_to_polygon_boundary(const UnitVector& p, std::span<const UnitVector> polygon) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const double s = edge_pole(polygon[i], polygon[(i + 1) % polygon.size()]).dot(p.vec());
    best = std::min(best, std::abs(std::asin(std::clamp(s, -1.0, 1.0))));
  }
  return best;
}

UnitVector polygon_centroid(std::span<const UnitVector> polygon) {
  Vec3 sum = Vec3::Zero();
  for (const auto& v : polygon) sum += v.vec();
  return UnitVector::normalize(sum);
}

}  // namespace slvd

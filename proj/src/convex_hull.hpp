#pragma once

#include <array>
#include <span>
#include <vector>

#include "slvd/spherical.hpp"

namespace slvd::detail {

/// Triangle of a 3D convex hull, counter-clockwise seen from outside.
/// nbr[k] is the facet across edge (v[k], v[k+1]).
struct HullFacet {
  std::array<int, 3> v;
  std::array<int, 3> nbr;
  Vec3 normal;  // unit, outward
  double offset;
};

struct Hull {
  std::vector<HullFacet> facets;
  double scale = 1.0;  // largest coordinate magnitude of the input
};

/// Quickhull. Throws UnboundedIntersection when the points are (nearly)
/// coplanar.
Hull convex_hull(std::span<const Vec3> points, double rel_eps = 1e-12);

}  // namespace slvd::detail

#include "slvd/polyhedron.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <fmt/core.h>

#include "convex_hull.hpp"

namespace slvd {

Plane::Plane(const UnitVector& normal, double offset, const Tolerances& tol)
    : normal_(normal), offset_(offset) {
  if (!(offset > tol.offset) || !std::isfinite(offset)) {
    throw Error(Errc::InvalidPlane, fmt::format("plane offset {} does not keep the origin strictly inside", offset));
  }
}

Plane Plane::through(const Vec3& normal, const Vec3& point, const Tolerances& tol) {
  const double len = normal.norm();
  if (!(len > tol.norm)) throw Error(Errc::InvalidPlane, "plane normal is degenerate");
  Vec3 n = normal / len;
  double d = n.dot(point);
  if (d < 0) {
    n = -n;
    d = -d;
  }
  return Plane(UnitVector::normalize(n, 0.0), d, tol);
}

ProjectiveMap::ProjectiveMap(double a, double b, double g, double d, double e)
    : alpha(a), beta(b), gamma(g), delta(d), eta(e) {
  if (alpha == 0.0 || eta == 0.0) {
    throw Error(Errc::InvalidMap, "projective map requires alpha != 0 and eta != 0");
  }
}

Eigen::Matrix4d ProjectiveMap::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m.row(0) << alpha, beta, gamma, delta;
  m(1, 1) = m(2, 2) = m(3, 3) = eta;
  return m;
}

ProjectiveMap ProjectiveMap::after(const ProjectiveMap& first) const {
  return {alpha * first.alpha, alpha * first.beta + first.eta * beta,
          alpha * first.gamma + first.eta * gamma, alpha * first.delta + first.eta * delta,
          eta * first.eta};
}

HomPoint apply_map(const ProjectiveMap& m, const HomPoint& p) {
  const double lambda = m.alpha * p.t + m.beta * p.x + m.gamma * p.y + m.delta * p.z;
  return {lambda, m.eta * p.x, m.eta * p.y, m.eta * p.z};
}

Plane map_plane(const ProjectiveMap& m, const Plane& p, const Tolerances& tol) {
  const Vec3 w = (m.alpha * p.dual_point() + Vec3(m.beta, m.gamma, m.delta)) / m.eta;
  const double len = w.norm();
  if (!(len > 0) || !std::isfinite(len)) throw Error(Errc::InvalidPlane, "mapped plane passes through the origin");
  return Plane(UnitVector::normalize(w, 0.0), 1.0 / len, tol);
}

bool is_projection_preserving_witness(const Eigen::Matrix4d& m, std::span<const HomPoint> samples,
                                      double angle_tol) {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Eigen::Vector4d img = m * samples[i].vec();
    if (std::abs(img[0]) <= 1e-300) {
      throw Error(Errc::DegenerateSample, fmt::format("sample {} maps to a point at infinity", i),
                  static_cast<long>(i));
    }
    const Vec3 a = samples[i].euclidean();
    const Vec3 b = img.tail<3>() / img[0];
    // Collinear with the origin: the directions agree up to sign.
    const double sine = a.cross(b).norm() / (a.norm() * b.norm());
    if (!(sine <= angle_tol)) return false;
  }
  return true;
}

bool is_projection_preserving_witness(const ProjectiveMap& m, std::span<const HomPoint> samples,
                                      double angle_tol) {
  return is_projection_preserving_witness(m.matrix(), samples, angle_tol);
}

Line3 plane_intersection_line(const Plane& p1, const Plane& p2, const Tolerances& tol) {
  const Vec3& n1 = p1.normal().vec();
  const Vec3& n2 = p2.normal().vec();
  const Vec3 dir = n1.cross(n2);
  const double s2 = dir.squaredNorm();
  if (std::sqrt(s2) <= tol.parallel) {
    throw Error(Errc::ParallelPlanes, "planes are parallel");
  }
  // Minimum-norm point: a combination of n1 and n2 satisfying both equations.
  const Vec3 point = (p1.offset() * n2.cross(dir) + p2.offset() * dir.cross(n1)) / s2;
  return {point, UnitVector::normalize(dir, 0.0)};
}

Vec3 three_planes_point(const Plane& p1, const Plane& p2, const Plane& p3, const Tolerances& tol) {
  const Vec3& n1 = p1.normal().vec();
  const Vec3& n2 = p2.normal().vec();
  const Vec3& n3 = p3.normal().vec();
  const Vec3 c23 = n2.cross(n3);
  const double det = n1.dot(c23);
  if (std::abs(det) <= tol.det) {
    throw Error(Errc::DegenerateTriple, fmt::format("plane triple is degenerate (det {})", det));
  }
  return (p1.offset() * c23 + p2.offset() * n3.cross(n1) + p3.offset() * n1.cross(n2)) / det;
}

std::vector<int> ConvexPolyhedron::active_planes() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < faces.size(); ++i) {
    if (!faces[i].empty()) out.push_back(static_cast<int>(i));
  }
  return out;
}

ConvexPolyhedron ConvexPolyhedron::scaled(double s) const {
  ConvexPolyhedron out = *this;
  for (auto& p : out.planes) p = p.scaled(s);
  for (auto& v : out.vertices) v *= s;
  return out;
}

namespace {

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
  std::vector<int> parent;
};

// Three-plane point solved in extended precision. Neighboring planes of a
// fine diagram are nearly parallel, and the double solve loses enough digits
// to disturb the projected tessellation beyond its own rounding.
Vec3 precise_three_planes_point(const Plane& p1, const Plane& p2, const Plane& p3) {
  using L = Eigen::Matrix<long double, 3, 1>;
  const L n1 = p1.normal().vec().cast<long double>();
  const L n2 = p2.normal().vec().cast<long double>();
  const L n3 = p3.normal().vec().cast<long double>();
  const L c23 = n2.cross(n3);
  const long double det = n1.dot(c23);
  const L x = (static_cast<long double>(p1.offset()) * c23 + static_cast<long double>(p2.offset()) * n3.cross(n1) +
               static_cast<long double>(p3.offset()) * n1.cross(n2)) /
              det;
  return x.cast<double>();
}

}  // namespace

ConvexPolyhedron halfspace_intersection(std::span<const Plane> planes, const Tolerances& tol) {
  if (planes.size() < 4) {
    throw Error(Errc::UnboundedIntersection, "fewer than 4 halfspaces cannot bound a polyhedron");
  }
  std::vector<Vec3> dual;
  dual.reserve(planes.size());
  for (const auto& p : planes) dual.push_back(p.dual_point());

  const detail::Hull hull = detail::convex_hull(dual);
  const double coplanar_eps = tol.incidence * std::max(hull.scale, 1.0);

  for (const auto& f : hull.facets) {
    if (!(f.offset > coplanar_eps)) {
      throw Error(Errc::UnboundedIntersection,
                  "the origin is not interior to the hull of the dual points");
    }
  }

  // Adjacent coplanar hull triangles describe one polyhedron vertex.
  const auto nf = hull.facets.size();
  DisjointSets groups(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    const auto& hf = hull.facets[f];
    for (int k = 0; k < 3; ++k) {
      const auto& g = hull.facets[static_cast<std::size_t>(hf.nbr[static_cast<std::size_t>(k)])];
      for (int w : g.v) {
        if (std::find(hf.v.begin(), hf.v.end(), w) != hf.v.end()) continue;
        if (std::abs(hf.normal.dot(dual[static_cast<std::size_t>(w)]) - hf.offset) <= coplanar_eps) {
          groups.unite(static_cast<int>(f), hf.nbr[static_cast<std::size_t>(k)]);
        }
      }
    }
  }

  ConvexPolyhedron poly;
  poly.planes.assign(planes.begin(), planes.end());
  poly.faces.assign(planes.size(), {});

  std::vector<int> vertex_of_group(nf, -1);
  std::vector<int> vertex_of_facet(nf, -1);
  for (std::size_t f = 0; f < nf; ++f) {
    const int root = groups.find(static_cast<int>(f));
    int& vid = vertex_of_group[static_cast<std::size_t>(root)];
    if (vid < 0) {
      vid = static_cast<int>(poly.vertex_planes.size());
      poly.vertex_planes.emplace_back();
    }
    vertex_of_facet[f] = vid;
    auto& incident = poly.vertex_planes[static_cast<std::size_t>(vid)];
    for (int w : hull.facets[f].v) {
      if (std::find(incident.begin(), incident.end(), w) == incident.end()) incident.push_back(w);
    }
  }

  poly.vertices.resize(poly.vertex_planes.size());
  for (std::size_t f = 0; f < nf; ++f) {
    const int vid = vertex_of_facet[f];
    auto& incident = poly.vertex_planes[static_cast<std::size_t>(vid)];
    std::sort(incident.begin(), incident.end());
    if (incident.size() == 3) {
      poly.vertices[static_cast<std::size_t>(vid)] =
          precise_three_planes_point(planes[static_cast<std::size_t>(incident[0])],
                                     planes[static_cast<std::size_t>(incident[1])],
                                     planes[static_cast<std::size_t>(incident[2])]);
    } else {
      poly.vertices[static_cast<std::size_t>(vid)] = hull.facets[f].normal / hull.facets[f].offset;
    }
  }

  // Face cycles: walk the hull triangles counter-clockwise around each dual
  // point and collapse runs of the same polyhedron vertex.
  std::vector<int> some_facet(planes.size(), -1);
  for (std::size_t f = 0; f < nf; ++f) {
    for (int w : hull.facets[f].v) some_facet[static_cast<std::size_t>(w)] = static_cast<int>(f);
  }
  for (std::size_t i = 0; i < planes.size(); ++i) {
    const int start = some_facet[i];
    if (start < 0) {
      poly.dropped.push_back(static_cast<int>(i));
      continue;
    }
    std::vector<int> cycle;
    int f = start;
    do {
      const auto& hf = hull.facets[static_cast<std::size_t>(f)];
      const int vid = vertex_of_facet[static_cast<std::size_t>(f)];
      if (cycle.empty() || cycle.back() != vid) cycle.push_back(vid);
      const auto k = static_cast<std::size_t>(std::find(hf.v.begin(), hf.v.end(), static_cast<int>(i)) - hf.v.begin());
      f = hf.nbr[(k + 2) % 3];
    } while (f != start);
    while (cycle.size() > 1 && cycle.front() == cycle.back()) cycle.pop_back();
    poly.faces[i] = std::move(cycle);
  }
  return poly;
}

Tessellation central_projection(const ConvexPolyhedron& poly) {
  for (std::size_t v = 0; v < poly.vertex_planes.size(); ++v) {
    if (poly.vertex_planes[v].size() > 3) {
      throw Error(Errc::NonSimpleVertex,
                  fmt::format("polyhedron vertex {} lies on {} faces", v, poly.vertex_planes[v].size()),
                  static_cast<long>(v));
    }
  }
  std::vector<UnitVector> verts;
  verts.reserve(poly.vertices.size());
  for (const auto& v : poly.vertices) verts.push_back(UnitVector::normalize(v));
  std::vector<std::vector<int>> faces;
  for (int i : poly.active_planes()) faces.push_back(poly.faces[static_cast<std::size_t>(i)]);
  return Tessellation(std::move(verts), std::move(faces));
}

std::string to_off(const ConvexPolyhedron& poly) {
  const auto active = poly.active_planes();
  std::size_t edges = 0;
  for (int i : active) edges += poly.faces[static_cast<std::size_t>(i)].size();
  std::string out = "OFF\n";
  out += fmt::format("{} {} {}\n", poly.vertices.size(), active.size(), edges / 2);
  for (const auto& v : poly.vertices) out += fmt::format("{:.17g} {:.17g} {:.17g}\n", v.x(), v.y(), v.z());
  for (int i : active) {
    const auto& cycle = poly.faces[static_cast<std::size_t>(i)];
    out += fmt::format("{}", cycle.size());
    for (int v : cycle) out += fmt::format(" {}", v);
    out += '\n';
  }
  return out;
}

}  // namespace slvd

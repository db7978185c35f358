#include "slvd/recognition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <fmt/core.h>

namespace slvd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Endpoint w of the edge (v, w) separating faces f and g, both incident to v.
int edge_partner(const Tessellation& t, int v, int f, int g) {
  const auto& cycle = t.face(f);
  const auto n = cycle.size();
  const auto pos = static_cast<std::size_t>(std::find(cycle.begin(), cycle.end(), v) - cycle.begin());
  for (int w : {cycle[(pos + n - 1) % n], cycle[(pos + 1) % n]}) {
    const auto& sides = t.edges().at(EdgeKey::of(v, w));
    if ((sides.left == f && sides.right == g) || (sides.left == g && sides.right == f)) return w;
  }
  throw Error(Errc::InvalidTessellation, fmt::format("faces {} and {} do not meet at vertex {}", f, g, v),
              v);
}

// Normal of the plane through the origin carrying the edge between f and g at v.
Vec3 edge_plane_normal(const Tessellation& t, int v, int f, int g) {
  const int w = edge_partner(t, v, f, g);
  // v x (w - v): the difference is exact for nearby vertices, so short edges
  // keep full relative precision.
  const Vec3& a = t.vertex(v).vec();
  return a.cross(t.vertex(w).vec() - a).normalized();
}

// Line where `p` meets the plane through the origin with normal m.
Line3 line_with_edge_plane(const Plane& p, const Vec3& m, const Tolerances& tol) {
  const Vec3& n = p.normal().vec();
  const Vec3 dir = n.cross(m);
  const double s2 = dir.squaredNorm();
  if (std::sqrt(s2) <= tol.parallel) throw Error(Errc::ParallelPlanes, "plane contains the edge plane normal");
  return {p.offset() * m.cross(dir) / s2, UnitVector::normalize(dir, 0.0)};
}

// Point where the line through O and v meets the plane. It may lie on the
// far side of O; only the line matters during construction.
Vec3 ray_point(const Plane& p, const UnitVector& v, const Tolerances& tol) {
  const double c = p.normal().dot(v);
  if (!(std::abs(c) > tol.norm)) throw Error(Errc::DegenerateTriple, "line through v is parallel to the plane");
  return (p.offset() / c) * v.vec();
}

bool strictly_inside(const UnitVector& p, std::span<const UnitVector> poly, double eps) {
  for (std::size_t a = 0; a < poly.size(); ++a) {
    const Vec3 pole = poly[a].vec().cross(poly[(a + 1) % poly.size()].vec()).normalized();
    if (!(pole.dot(p.vec()) > eps)) return false;
  }
  return true;
}

Plane build_propagated_plane(const Tessellation& t, const Plane& pp, const Plane& pq, int v, int p, int q,
                             int l, double v_param, const Tolerances& tol) {
  try {
    const Vec3 m_pl = edge_plane_normal(t, v, p, l);
    const Vec3 m_ql = edge_plane_normal(t, v, q, l);
    const Line3 l_pl = line_with_edge_plane(pp, m_pl, tol);
    const Line3 l_ql = line_with_edge_plane(pq, m_ql, tol);
    // The edge planes (p,l) and (q,l) meet in the ray through v.
    const Vec3 corner = ray_point(pp, t.vertex(v), tol);
    const Vec3 aux = l_ql.foot(corner) + v_param * l_ql.direction.vec();
    return Plane::through(l_pl.direction.vec().cross(aux - corner), corner, tol);
  } catch (const Error& e) {
    throw Error(Errc::DegeneratePropagation,
                fmt::format("plane of face {} at vertex {}: {}", l, v, e.what()), v);
  }
}


// Plane of the triangle l = (x, w1, w2) when x's own condition is left out:
// it contains the line where the plane of the face o across (w1, w2) meets
// that edge's plane, and the point of the line P_a ∩ P_b (a, b the other
// faces at x) closest to the line through x.
std::optional<Plane> excluded_triangle_plane(const Tessellation& t, const PlaneAssignment& pa, int x, int l,
                                             const Tolerances& tol) {
  const auto& tri = t.face(l);
  std::array<int, 2> w{};
  std::size_t n = 0;
  for (int v : tri) {
    if (v != x) w[n++] = v;
  }
  const auto& sides = t.edges().at(EdgeKey::of(w[0], w[1]));
  const int o = sides.left == l ? sides.right : sides.left;
  std::array<int, 2> ab{};
  n = 0;
  for (int f : t.vertex_faces()[static_cast<std::size_t>(x)]) {
    if (f != l) ab[n++] = f;
  }
  for (int f : {o, ab[0], ab[1]}) {
    if (f < 0 || !pa.planes[static_cast<std::size_t>(f)]) return std::nullopt;
  }
  try {
    const Line3 l_ol = line_with_edge_plane(pa.plane(o), edge_plane_normal(t, w[0], o, l), tol);
    const Line3 l_ab = plane_intersection_line(pa.plane(ab[0]), pa.plane(ab[1]), tol);
    // Closest point of l_ab to the line {s x}.
    const Vec3& d = l_ab.direction.vec();
    const Vec3& u = t.vertex(x).vec();
    const double c = d.dot(u);
    const double denom = 1.0 - c * c;
    if (!(denom > tol.parallel)) return std::nullopt;
    const double s = (c * u.dot(l_ab.point) - d.dot(l_ab.point)) / denom;
    const Vec3 z = l_ab.at(s);
    return Plane::through(l_ol.direction.vec().cross(z - l_ol.point), z, tol);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

std::array<int, 3> seed_faces(const Tessellation& t, int vertex, int face_order) {
  if (vertex < 0 || vertex >= static_cast<int>(t.vertex_count())) {
    throw Error(Errc::SeedOutOfFace, fmt::format("seed vertex {} out of range", vertex), vertex);
  }
  const auto& vf = t.vertex_faces()[static_cast<std::size_t>(vertex)];
  if (vf.size() != 3) {
    throw Error(Errc::InvalidTessellation, fmt::format("seed vertex {} is not of degree 3", vertex), vertex);
  }
  const int a = vf[0], b = vf[1], c = vf[2];
  switch (face_order) {
    case 0: return {a, b, c};
    case 1: return {b, c, a};
    case 2: return {c, a, b};
    case 3: return {a, c, b};
    case 4: return {c, b, a};
    case 5: return {b, a, c};
    default: throw Error(Errc::Usage, fmt::format("face order {} outside [0, 6)", face_order));
  }
}

SeedChoice default_seed(const Tessellation& t, int seed_vertex, int face_order) {
  const auto faces = seed_faces(t, seed_vertex, face_order);
  const auto poly = t.face_polygon(faces[0]);
  UnitVector p = polygon_centroid(poly);
  for (int it = 0; it < 64 && !strictly_inside(p, poly, 0.0); ++it) {
    p = UnitVector::normalize(p.vec() + poly.front().vec());
  }
  SeedChoice c;
  c.seed_vertex = seed_vertex;
  c.face_order = face_order;
  c.p_i = p;
  c.r_i = 0.5 * distance_to_polygon_boundary(p, poly);
  c.q_j_param = 0.5;
  return c;
}

namespace {

SeedChoice random_seed_candidate(const Tessellation& t, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> vertex(0, static_cast<int>(t.vertex_count()) - 1);
  std::uniform_int_distribution<int> order(0, 5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SeedChoice c;
  c.seed_vertex = vertex(rng);
  c.face_order = order(rng);
  const auto faces = seed_faces(t, c.seed_vertex, c.face_order);
  const auto poly = t.face_polygon(faces[0]);
  Vec3 sum = Vec3::Zero();
  for (const auto& v : poly) sum += (0.1 + unit(rng)) * v.vec();
  c.p_i = UnitVector::normalize(sum);
  c.r_i = (0.1 + 0.8 * unit(rng)) * distance_to_polygon_boundary(c.p_i, poly);
  c.q_j_param = 0.1 + 0.8 * unit(rng);
  return c;
}

}  // namespace

SeedChoice random_seed(const Tessellation& t, std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    SeedChoice c = random_seed_candidate(t, rng);
    try {
      algorithm1_seed(t, c);
      return c;
    } catch (const Error& e) {
      if (e.code() != Errc::ArcMissesPolygon && e.code() != Errc::DegenerateSeed) throw;
    }
  }
  throw Error(Errc::DegenerateSeed, "no random seed choice admits the seed construction");
}

SeedPlanes algorithm1_seed(const Tessellation& t, const SeedChoice& choice, const Tolerances& tol) {
  const auto faces = seed_faces(t, choice.seed_vertex, choice.face_order);
  const int fi = faces[0], fj = faces[1], fk = faces[2];
  const int v = choice.seed_vertex;
  const UnitVector& vdir = t.vertex(v);

  const auto poly_i = t.face_polygon(fi);
  if (!strictly_inside(choice.p_i, poly_i, tol.norm)) {
    throw Error(Errc::SeedOutOfFace, fmt::format("p_i is not interior to polygon {}", fi), fi);
  }
  if (!(choice.q_j_param > 0.0 && choice.q_j_param < 1.0)) {
    throw Error(Errc::Usage, fmt::format("q_j_param {} outside (0, 1)", choice.q_j_param));
  }

  try {
    const Plane plane_i = circle_plane(SphericalCircle(choice.p_i, choice.r_i), tol);

    // Planes through the origin carrying the three edges at v.
    Vec3 m_ij = edge_plane_normal(t, v, fi, fj);
    const Vec3 m_ik = edge_plane_normal(t, v, fi, fk);
    const Vec3 m_jk = edge_plane_normal(t, v, fj, fk);

    const Line3 l_ij = line_with_edge_plane(plane_i, m_ij, tol);
    const Line3 l_ik = line_with_edge_plane(plane_i, m_ik, tol);

    // Great circle through p_i perpendicular to the edge (i,j),
    //   x(theta) = cos(theta) p_i + sin(theta) w,
    // with w pointing from p_i toward polygon j.
    if (m_ij.dot(choice.p_i.vec()) > 0) m_ij = -m_ij;
    const Vec3& pi = choice.p_i.vec();
    const Vec3 w = (m_ij - m_ij.dot(pi) * pi).normalized();

    // With u = cot(theta), each edge constraint of polygon j is
    // linear in u on theta in (0, pi); so is leaving the cap of circle i.
    double u_lo = -kInf, u_hi = kInf;
    const auto poly_j = t.face_polygon(fj);
    for (std::size_t a = 0; a < poly_j.size(); ++a) {
      const Vec3 g = poly_j[a].vec().cross(poly_j[(a + 1) % poly_j.size()].vec()).normalized();
      const double A = g.dot(pi), B = g.dot(w);
      if (A > 0) {
        u_lo = std::max(u_lo, -B / A);
      } else if (A < 0) {
        u_hi = std::min(u_hi, -B / A);
      } else if (B <= 0) {
        u_hi = -kInf;
      }
    }
    if (choice.r_i > 0) u_hi = std::min(u_hi, 1.0 / std::tan(choice.r_i));
    if (!(u_lo < u_hi)) {
      throw Error(Errc::ArcMissesPolygon,
                  fmt::format("perpendicular arc from p_i misses polygon {}", fj), fj);
    }
    const double theta_near = std::atan2(1.0, u_hi);
    const double theta_far = std::atan2(1.0, u_lo);
    const double theta = theta_near + choice.q_j_param * (theta_far - theta_near);
    const UnitVector q_j = UnitVector::normalize(std::cos(theta) * pi + std::sin(theta) * w.normalized());

    const Plane plane_j =
        Plane::through(l_ij.direction.vec().cross(q_j.vec() - l_ij.point), l_ij.point, tol);

    const Line3 l_jk = line_with_edge_plane(plane_j, m_jk, tol);

    // Both lines pass through the polyhedron vertex on the seed ray.
    const Vec3 corner = ray_point(plane_i, vdir, tol);
    const Plane plane_k =
        Plane::through(l_ik.direction.vec().cross(l_jk.direction.vec()), corner, tol);

    const Vec3 gap = l_ik.point - l_jk.point;
    const double gap_norm = gap.norm();
    const double coplanarity =
        gap_norm > 0 ? std::abs(l_ik.direction.vec().cross(l_jk.direction.vec()).dot(gap)) / gap_norm
                     : 0.0;
    if (coplanarity > std::max(tol.det, 1e-9)) {
      throw Error(Errc::DegenerateSeed,
                  fmt::format("lines l_ik and l_jk are not coplanar (residual {})", coplanarity));
    }
    return {{fi, fj, fk}, {plane_i, plane_j, plane_k}, q_j, coplanarity};
  } catch (const Error& e) {
    switch (e.code()) {
      case Errc::ArcMissesPolygon:
      case Errc::DegenerateSeed:
      case Errc::InvalidCircle:
        throw;
      default:
        throw Error(Errc::DegenerateSeed, fmt::format("seed at vertex {}: {}", v, e.what()), v);
    }
  }
}

bool PlaneAssignment::complete() const {
  return std::all_of(planes.begin(), planes.end(), [](const auto& p) { return p.has_value(); });
}

std::size_t PlaneAssignment::marked_count() const {
  return static_cast<std::size_t>(std::count(marks.begin(), marks.end(), std::uint8_t{1}));
}

PlaneAssignment algorithm2_propagate(const Tessellation& t, const SeedPlanes& seed,
                                     const PropagationOptions& opts, const Tolerances& tol) {
  const auto nv = t.vertex_count();
  const auto nf = t.face_count();
  PlaneAssignment pa;
  pa.planes.assign(nf, std::nullopt);
  pa.marks.assign(nv, 0);

  const int seed_vertex = [&] {
    for (std::size_t v = 0; v < nv; ++v) {
      const auto& vf = t.vertex_faces()[v];
      if (std::is_permutation(vf.begin(), vf.end(), seed.faces.begin())) return static_cast<int>(v);
    }
    throw Error(Errc::DegenerateSeed, "seed faces do not share a vertex");
  }();
  pa.seed_vertex = seed_vertex;

  // Max-heap on (key, -vertex): largest key first, then lowest index.
  using Entry = std::pair<int, int>;
  std::priority_queue<Entry> heap;
  std::vector<int> key(nv, 0);
  std::size_t assigned = 0;

  auto assign = [&](int f, const Plane& plane) {
    pa.planes[static_cast<std::size_t>(f)] = plane;
    ++assigned;
    for (int u : t.face(f)) {
      const int k = ++key[static_cast<std::size_t>(u)];
      if (k <= 2) {
        heap.emplace(k, -u);
      } else if (!pa.marks[static_cast<std::size_t>(u)] && u != seed_vertex) {
        pa.closure_order.push_back(u);
      }
    }
  };

  pa.marks[static_cast<std::size_t>(seed_vertex)] = 1;
  for (int s = 0; s < 3; ++s) {
    const Plane& p = seed.planes[static_cast<std::size_t>(s)];
    assign(seed.faces[static_cast<std::size_t>(s)], opts.frame ? map_plane(*opts.frame, p, tol) : p);
  }

  // Pop vertices with exactly two assigned faces.
  auto drain = [&] {
    while (!heap.empty()) {
      const auto [k, neg_v] = heap.top();
      heap.pop();
      const int v = -neg_v;
      if (pa.marks[static_cast<std::size_t>(v)] || k != key[static_cast<std::size_t>(v)]) continue;
      if (k < 2) break;
      if (v == opts.excluded_vertex) continue;

      const auto& vf = t.vertex_faces()[static_cast<std::size_t>(v)];
      int missing = 0;
      while (pa.planes[static_cast<std::size_t>(vf[static_cast<std::size_t>(missing)])]) ++missing;
      const int l = vf[static_cast<std::size_t>(missing)];
      const int p = vf[static_cast<std::size_t>((missing + 1) % 3)];
      const int q = vf[static_cast<std::size_t>((missing + 2) % 3)];
      if (opts.excluded_vertex >= 0) {
        const auto& cycle = t.face(l);
        const auto m = cycle.size();
        const auto pos = static_cast<std::size_t>(std::find(cycle.begin(), cycle.end(), v) - cycle.begin());
        if (cycle[(pos + 1) % m] == opts.excluded_vertex || cycle[(pos + m - 1) % m] == opts.excluded_vertex) {
          continue;
        }
      }
      pa.max_pop_key = std::max(pa.max_pop_key, k);
      pa.min_pop_key = std::min(pa.min_pop_key, k);
      const Plane plane_l = build_propagated_plane(t, pa.plane(p), pa.plane(q), v, p, q, l, opts.v_param, tol);
      pa.marks[static_cast<std::size_t>(v)] = 1;
      pa.steps.push_back({v, p, q, l});
      assign(l, plane_l);
    }
  };
  drain();

  // With a vertex excluded, a triangle at it cannot be reached through its
  // other two corners; fill it from the face across its far edge instead.
  const int x = opts.excluded_vertex;
  for (bool progress = x >= 0; progress && assigned != nf;) {
    progress = false;
    for (int l : t.vertex_faces()[static_cast<std::size_t>(x)]) {
      if (pa.planes[static_cast<std::size_t>(l)] || t.face(l).size() != 3) continue;
      const auto plane = excluded_triangle_plane(t, pa, x, l, tol);
      if (!plane) continue;
      assign(l, *plane);
      progress = true;
      drain();
    }
  }

  if (assigned != nf) {
    throw Error(Errc::DisconnectedPropagation,
                fmt::format("propagation stopped with {} of {} faces assigned", assigned, nf));
  }
  if (opts.frame) {
    try {
      pa = map_assignment(opts.frame->inverse(), std::move(pa), tol);
    } catch (const Error& e) {
      throw Error(Errc::DegeneratePropagation, fmt::format("mapping planes back: {}", e.what()), seed_vertex);
    }
  }
  return pa;
}

Plane rebuild_plane(const Tessellation& t, const PlaneAssignment& pa, const PropagationStep& step,
                    double v_param, const Tolerances& tol) {
  return build_propagated_plane(t, pa.plane(step.p), pa.plane(step.q), step.vertex, step.p, step.q, step.l,
                                v_param, tol);
}

double radial_residual(const Tessellation& t, const PlaneAssignment& pa, int v, const Tolerances& tol) {
  const auto& vf = t.vertex_faces()[static_cast<std::size_t>(v)];
  try {
    const Vec3 corner = three_planes_point(pa.plane(vf[0]), pa.plane(vf[1]), pa.plane(vf[2]), tol);
    return angle_between(corner, t.vertex(v).vec());
  } catch (const Error&) {
    return kInf;
  }
}

double consistency_residual(const Tessellation& t, const PlaneAssignment& pa, const Tolerances& tol) {
  double worst = 0.0;
  for (int v = 0; v < static_cast<int>(t.vertex_count()); ++v) {
    worst = std::max(worst, radial_residual(t, pa, v, tol));
  }
  return worst;
}

std::optional<ProjectiveMap> centering_map(const Tessellation& t, const PlaneAssignment& pa,
                                           const Tolerances& tol) {
  if (!pa.complete()) return std::nullopt;
  double near = kInf, far = 0.0;
  for (int v = 0; v < static_cast<int>(t.vertex_count()) && near > 0; ++v) {
    const auto& vf = t.vertex_faces()[static_cast<std::size_t>(v)];
    try {
      const Vec3 p = three_planes_point(pa.plane(vf[0]), pa.plane(vf[1]), pa.plane(vf[2]), tol);
      const double d = p.dot(t.vertex(v).vec());
      near = std::min(near, d);
      far = std::max(far, d);
    } catch (const Error&) {
      near = 0.0;
    }
  }
  if (near > 0 && far <= 2.0 * near) return std::nullopt;

  Vec3 centroid = Vec3::Zero();
  for (const auto& p : pa.planes) centroid += p->dual_point();
  centroid /= static_cast<double>(pa.planes.size());
  double spread = 0.0;
  for (const auto& p : pa.planes) spread += (p->dual_point() - centroid).norm();
  spread /= static_cast<double>(pa.planes.size());
  if (!(spread > tol.norm)) return std::nullopt;

  const Vec3 b = -centroid / spread;
  ProjectiveMap m(1.0 / spread, b.x(), b.y(), b.z(), 1.0);
  const auto& sf = t.vertex_faces()[static_cast<std::size_t>(pa.seed_vertex)];
  try {
    const Vec3 p = three_planes_point(map_plane(m, pa.plane(sf[0]), tol), map_plane(m, pa.plane(sf[1]), tol),
                                      map_plane(m, pa.plane(sf[2]), tol), tol);
    if (p.dot(t.vertex(pa.seed_vertex).vec()) < 0) m = ProjectiveMap(-m.alpha, -m.beta, -m.gamma, -m.delta, 1.0);
  } catch (const Error&) {
  }
  return m;
}

PlaneAssignment map_assignment(const ProjectiveMap& m, PlaneAssignment pa, const Tolerances& tol) {
  for (auto& p : pa.planes) {
    if (p) p = map_plane(m, *p, tol);
  }
  return pa;
}

RecognitionResult algorithm3_verify(const Tessellation& t, PlaneAssignment pa, double eps_rec,
                                    const Tolerances& tol) {
  RecognitionResult result;
  std::vector<int> order = pa.closure_order;
  std::vector<std::uint8_t> queued(t.vertex_count(), 0);
  for (int v : order) queued[static_cast<std::size_t>(v)] = 1;
  for (int v = 0; v < static_cast<int>(t.vertex_count()); ++v) {
    if (!pa.marks[static_cast<std::size_t>(v)] && !queued[static_cast<std::size_t>(v)]) order.push_back(v);
  }
  for (int v : order) {
    if (pa.marks[static_cast<std::size_t>(v)]) continue;
    const double r = radial_residual(t, pa, v, tol);
    ++result.examined;
    result.max_residual = std::max(result.max_residual, r);
    if (!(r <= eps_rec)) {
      result.witness = Witness{v, r};
      break;
    }
    pa.marks[static_cast<std::size_t>(v)] = 1;
  }
  result.verdict = !result.witness.has_value();
  result.planes = std::move(pa);
  return result;
}

PlaneAssignment refine_planes(const Tessellation& t, PlaneAssignment pa, const Tolerances& tol) {
  if (!pa.complete()) return pa;
  const int nf = static_cast<int>(t.face_count());
  const int nv = static_cast<int>(t.vertex_count());
  const auto& vfaces = t.vertex_faces();

  // Unknowns: dual points of faces other than f0, then mu of vertices other
  // than v0, with v0 off face f0 so the pair fixes the map family.
  const int f0 = 0;
  int v0 = -1;
  for (int v = 0; v < nv && v0 < 0; ++v) {
    const auto& vf = vfaces[static_cast<std::size_t>(v)];
    if (std::find(vf.begin(), vf.end(), f0) == vf.end()) v0 = v;
  }
  if (v0 < 0) return pa;
  auto w_col = [&](int f) { return 3 * (f - (f > f0 ? 1 : 0)); };
  const int mu_base = 3 * (nf - 1);
  auto mu_col = [&](int v) { return mu_base + v - (v > v0 ? 1 : 0); };
  const int cols = mu_base + nv - 1;

  std::vector<Vec3> w(static_cast<std::size_t>(nf));
  for (int f = 0; f < nf; ++f) w[static_cast<std::size_t>(f)] = pa.plane(f).dual_point();
  std::vector<double> mu(static_cast<std::size_t>(nv));
  for (int v = 0; v < nv; ++v) {
    double sum = 0;
    for (int f : vfaces[static_cast<std::size_t>(v)]) sum += w[static_cast<std::size_t>(f)].dot(t.vertex(v).vec());
    mu[static_cast<std::size_t>(v)] = sum / static_cast<double>(vfaces[static_cast<std::size_t>(v)].size());
  }

  std::vector<Eigen::Triplet<double>> entries;
  int rows = 0;
  for (int v = 0; v < nv; ++v) {
    for (int f : vfaces[static_cast<std::size_t>(v)]) {
      if (f != f0) {
        for (int k = 0; k < 3; ++k) entries.emplace_back(rows, w_col(f) + k, t.vertex(v).vec()[k]);
      }
      if (v != v0) entries.emplace_back(rows, mu_col(v), -1.0);
      ++rows;
    }
  }
  Eigen::SparseMatrix<double> a(rows, cols);
  a.setFromTriplets(entries.begin(), entries.end());
  const Eigen::SparseMatrix<double> normal = a.transpose() * a;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(normal);
  if (solver.info() != Eigen::Success) return pa;

  const double before = consistency_residual(t, pa, tol);
  for (int iteration = 0; iteration < 3; ++iteration) {
    Eigen::VectorXd r(rows);
    int row = 0;
    for (int v = 0; v < nv; ++v) {
      for (int f : vfaces[static_cast<std::size_t>(v)]) {
        r[row++] = mu[static_cast<std::size_t>(v)] - w[static_cast<std::size_t>(f)].dot(t.vertex(v).vec());
      }
    }
    const Eigen::VectorXd delta = solver.solve(a.transpose() * r);
    if (solver.info() != Eigen::Success || !delta.allFinite()) return pa;
    for (int f = 0; f < nf; ++f) {
      if (f != f0) w[static_cast<std::size_t>(f)] += delta.segment<3>(w_col(f));
    }
    for (int v = 0; v < nv; ++v) {
      if (v != v0) mu[static_cast<std::size_t>(v)] += delta[mu_col(v)];
    }
  }

  PlaneAssignment out = pa;
  try {
    for (int f = 0; f < nf; ++f) {
      const Vec3& d = w[static_cast<std::size_t>(f)];
      out.planes[static_cast<std::size_t>(f)] = Plane(UnitVector::normalize(d, 0.0), 1.0 / d.norm(), tol);
    }
  } catch (const Error&) {
    return pa;
  }
  return consistency_residual(t, out, tol) < before ? out : pa;
}

std::vector<Vec3> polyhedron_vertices(const Tessellation& t, const PlaneAssignment& pa, const Tolerances& tol) {
  std::vector<Vec3> out;
  out.reserve(t.vertex_count());
  for (const auto& vf : t.vertex_faces()) {
    out.push_back(three_planes_point(pa.plane(vf[0]), pa.plane(vf[1]), pa.plane(vf[2]), tol));
  }
  return out;
}

GeneratorSet recover_generators(const PlaneAssignment& pa, const Tolerances& tol) {
  double d_max = 0.0;
  for (std::size_t f = 0; f < pa.planes.size(); ++f) {
    if (!pa.planes[f] || !(pa.planes[f]->offset() > 0)) {
      throw Error(Errc::NonPositiveOffset, fmt::format("face {} has no plane with positive offset", f),
                  static_cast<long>(f));
    }
    d_max = std::max(d_max, pa.planes[f]->offset());
  }
  const double s = d_max >= 1.0 ? 0.9 / d_max : 1.0;
  std::vector<SphericalCircle> circles;
  circles.reserve(pa.planes.size());
  for (const auto& p : pa.planes) circles.emplace_back(p->normal(), std::acos(p->offset() * s));
  return GeneratorSet(std::move(circles), tol);
}

Witness reprojection_gap(const Tessellation& t, const GeneratorSet& g, const Tolerances& tol) {
  SlvdDiagram d = [&] {
    try {
      return construct_slvd(g, tol);
    } catch (const Error&) {
      return SlvdDiagram{Tessellation({}, {}), {}, {}, {}};
    }
  }();
  if (d.tessellation.face_count() != t.face_count() || d.tessellation.vertex_count() != t.vertex_count()) {
    return {0, kInf};
  }
  auto sorted_triple = [](std::array<int, 3> a) {
    std::sort(a.begin(), a.end());
    return a;
  };
  std::map<std::array<int, 3>, int> lookup;
  for (int v = 0; v < static_cast<int>(d.tessellation.vertex_count()); ++v) {
    const auto& vf = d.tessellation.vertex_faces()[static_cast<std::size_t>(v)];
    if (vf.size() != 3) return {0, kInf};
    lookup[sorted_triple({d.active[static_cast<std::size_t>(vf[0])], d.active[static_cast<std::size_t>(vf[1])],
                          d.active[static_cast<std::size_t>(vf[2])]})] = v;
  }
  Witness worst{-1, 0.0};
  for (int v = 0; v < static_cast<int>(t.vertex_count()); ++v) {
    const auto& vf = t.vertex_faces()[static_cast<std::size_t>(v)];
    const auto it = lookup.find(sorted_triple({vf[0], vf[1], vf[2]}));
    if (it == lookup.end()) return {v, kInf};
    const double gap = angle_between(t.vertex(v).vec(), d.tessellation.vertex(it->second).vec());
    if (gap > worst.residual || worst.vertex < 0) worst = {v, gap};
  }
  return worst;
}

ConditionedPropagation propagate_conditioned(const Tessellation& t, const SeedPlanes& seed, PropagationOptions opts,
                                  const Tolerances& tol) {
  PlaneAssignment pa = algorithm2_propagate(t, seed, opts, tol);
  const std::optional<ProjectiveMap> frame = centering_map(t, pa, tol);
  if (!frame) return {std::move(pa), std::nullopt};
  opts.frame = frame;
  try {
    return {map_assignment(*frame, algorithm2_propagate(t, seed, opts, tol), tol), frame};
  } catch (const Error& e) {
    if (e.code() != Errc::InvalidPlane) throw;
    throw Error(Errc::DegeneratePropagation, e.what(), pa.seed_vertex);
  }
}

namespace {

std::optional<SeedPlanes> seed_avoiding(const Tessellation& t, int x, const Tolerances& tol) {
  const auto near = t.neighbors(x);
  for (int v = 0; v < static_cast<int>(t.vertex_count()); ++v) {
    if (v == x || std::find(near.begin(), near.end(), v) != near.end()) continue;
    for (int order = 0; order < 6; ++order) {
      try {
        return algorithm1_seed(t, default_seed(t, v, order), tol);
      } catch (const Error&) {
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<Witness> isolate_witness(const Tessellation& t, int start, double eps_rec, std::size_t budget,
                                       const Tolerances& tol) {
  const auto nv = t.vertex_count();
  if (start < 0 || start >= static_cast<int>(nv)) start = 0;
  std::vector<std::uint8_t> seen(nv, 0);
  std::queue<int> frontier;
  frontier.push(start);
  seen[static_cast<std::size_t>(start)] = 1;
  for (std::size_t visited = 0; !frontier.empty() && visited < budget; ++visited) {
    const int x = frontier.front();
    frontier.pop();
    for (int w : t.neighbors(x)) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        frontier.push(w);
      }
    }

    const auto seed = seed_avoiding(t, x, tol);
    if (!seed) continue;
    PropagationOptions opts;
    opts.excluded_vertex = x;
    ConditionedPropagation c;
    try {
      c = propagate_conditioned(t, *seed, opts, tol);
    } catch (const Error&) {
      continue;
    }
    bool rest_consistent = true;
    for (int u = 0; u < static_cast<int>(nv) && rest_consistent; ++u) {
      if (u != x && !c.pa.marks[static_cast<std::size_t>(u)]) {
        rest_consistent = radial_residual(t, c.pa, u, tol) <= eps_rec;
      }
    }
    if (!rest_consistent) continue;
    const double r = radial_residual(t, c.pa, x, tol);
    if (!(r <= eps_rec)) return Witness{x, r};
  }
  return std::nullopt;
}

RecognitionResult recognize(const Tessellation& t, const std::optional<SeedChoice>& choice, double eps_rec,
                            const Tolerances& tol) {
  const ValidationReport report = validate(t, tol);
  if (!report.ok()) {
    const auto* bad = report.first_failure();
    throw Error(Errc::InvalidTessellation,
                fmt::format("{}: {}", to_string(bad->invariant), bad->detail), bad->element.value_or(-1));
  }

  std::optional<SeedPlanes> seed;
  SeedChoice used;
  if (choice) {
    used = *choice;
    seed = algorithm1_seed(t, used, tol);
  } else {
    for (int v = 0; v < static_cast<int>(t.vertex_count()) && !seed; ++v) {
      for (int order = 0; order < 6 && !seed; ++order) {
        used = default_seed(t, v, order);
        try {
          seed = algorithm1_seed(t, used, tol);
        } catch (const Error&) {
        }
      }
    }
    if (!seed) throw Error(Errc::DegenerateSeed, "no vertex admits a seed construction");
  }

  auto rejected = [&](RecognitionResult r) {
    if (auto w = isolate_witness(t, r.witness->vertex, eps_rec, 256, tol)) {
      r.witness = w;
      r.isolated = true;
    }
    return r;
  };

  ConditionedPropagation c;
  try {
    c = propagate_conditioned(t, *seed, {}, tol);
  } catch (const Error& e) {
    if (e.code() != Errc::DegeneratePropagation) throw;
    RecognitionResult r;
    r.witness = Witness{static_cast<int>(e.where()), kInf};
    r.max_residual = kInf;
    r.seed = used;
    return rejected(std::move(r));
  }

  RecognitionResult result = algorithm3_verify(t, std::move(c.pa), eps_rec, tol);
  result.seed = used;
  result.frame = c.frame;
  if (!result.verdict) return rejected(std::move(result));

  result.planes = refine_planes(t, std::move(result.planes), tol);
  GeneratorSet gens = recover_generators(result.planes, tol);
  const Witness gap = reprojection_gap(t, gens, tol);
  if (!(gap.residual <= eps_rec)) {
    result.verdict = false;
    result.witness = gap;
    return rejected(std::move(result));
  }
  result.generators = std::move(gens);
  return result;
}

ProjectiveMap fit_projective_map(std::span<const Vec3> from, std::span<const Vec3> to, double* residual) {
  const auto n = static_cast<Eigen::Index>(from.size());
  Eigen::MatrixXd a(n, 4);
  Eigen::VectorXd b(n);
  // The image of V is (eta / Lambda) V with Lambda = alpha + (beta,gamma,delta).V;
  // with eta = 1 the ratio |V| / |V'| is linear in the remaining parameters.
  for (Eigen::Index r = 0; r < n; ++r) {
    const Vec3& v = from[static_cast<std::size_t>(r)];
    const Vec3& w = to[static_cast<std::size_t>(r)];
    a.row(r) << 1.0, v.x(), v.y(), v.z();
    b[r] = v.squaredNorm() / v.dot(w);
  }
  const Eigen::Vector4d x = a.colPivHouseholderQr().solve(b);
  ProjectiveMap m(x[0], x[1], x[2], x[3], 1.0);
  if (residual) {
    double worst = 0.0;
    for (std::size_t r = 0; r < from.size(); ++r) {
      const Vec3 img = apply_map(m, HomPoint::affine(from[r])).euclidean();
      worst = std::max(worst, (img - to[r]).norm() / to[r].norm());
    }
    *residual = worst;
  }
  return m;
}

DofReport dof_probe(const Tessellation& t, std::span<const SeedChoice> choices, double eps_rec,
                    const Tolerances& tol) {
  DofReport report;
  report.all_true = !choices.empty();
  std::optional<std::vector<Vec3>> reference;
  for (std::size_t c = 0; c < choices.size(); ++c) {
    DofEntry entry;
    entry.choice = choices[c];
    const RecognitionResult r = recognize(t, choices[c], eps_rec, tol);
    entry.verdict = r.verdict;
    report.all_true = report.all_true && r.verdict;
    if (r.verdict) {
      auto verts = polyhedron_vertices(t, r.planes, tol);
      if (c == 0) reference = verts;
      if (reference) {
        double res = 0.0;
        entry.map = fit_projective_map(*reference, verts, &res);
        entry.map_residual = res;
        report.worst_residual = std::max(report.worst_residual, res);
      }
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace slvd

#include "convex_hull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include <Eigen/Geometry>

#include "slvd/error.hpp"

namespace slvd::detail {

namespace {

struct WorkFacet {
  std::array<int, 3> v;
  std::array<int, 3> nbr{-1, -1, -1};
  Vec3 normal;
  double offset = 0.0;
  std::vector<int> outside;
  bool alive = true;
  int visit = -1;
};

class Quickhull {
public:
  Quickhull(std::span<const Vec3> pts, double rel_eps) : pts_(pts) {
    for (const auto& p : pts_) scale_ = std::max(scale_, p.cwiseAbs().maxCoeff());
    eps_ = rel_eps * std::max(scale_, 1e-300) * 8.0;
  }

  Hull run() {
    build_simplex();
    std::vector<int> stack;
    for (int f = 0; f < static_cast<int>(facets_.size()); ++f) {
      if (!facets_[static_cast<std::size_t>(f)].outside.empty()) stack.push_back(f);
    }
    while (!stack.empty()) {
      const int f = stack.back();
      stack.pop_back();
      auto& fac = facets_[static_cast<std::size_t>(f)];
      if (!fac.alive || fac.outside.empty()) continue;
      int apex = fac.outside.front();
      double best = -1.0;
      for (int p : fac.outside) {
        const double d = distance(fac, p);
        if (d > best) {
          best = d;
          apex = p;
        }
      }
      add_point(f, apex, stack);
    }

    Hull hull;
    hull.scale = scale_;
    std::vector<int> remap(facets_.size(), -1);
    for (std::size_t f = 0; f < facets_.size(); ++f) {
      if (facets_[f].alive) {
        remap[f] = static_cast<int>(hull.facets.size());
        hull.facets.push_back({facets_[f].v, facets_[f].nbr, facets_[f].normal, facets_[f].offset});
      }
    }
    for (auto& f : hull.facets) {
      for (int& n : f.nbr) n = remap[static_cast<std::size_t>(n)];
    }
    return hull;
  }

private:
  double distance(const WorkFacet& f, int p) const {
    return f.normal.dot(pts_[static_cast<std::size_t>(p)]) - f.offset;
  }

  int make_facet(int a, int b, int c) {
    WorkFacet f;
    f.v = {a, b, c};
    const Vec3& pa = pts_[static_cast<std::size_t>(a)];
    const Vec3 n = (pts_[static_cast<std::size_t>(b)] - pa).cross(pts_[static_cast<std::size_t>(c)] - pa);
    f.normal = n.normalized();
    f.offset = f.normal.dot(pa);
    facets_.push_back(std::move(f));
    return static_cast<int>(facets_.size()) - 1;
  }

  void build_simplex() {
    const auto n = static_cast<int>(pts_.size());
    if (n < 4) throw Error(Errc::UnboundedIntersection, "fewer than 4 halfspaces");

    std::array<int, 6> ext{};
    for (int axis = 0; axis < 3; ++axis) {
      int lo = 0, hi = 0;
      for (int i = 1; i < n; ++i) {
        if (pts_[static_cast<std::size_t>(i)][axis] < pts_[static_cast<std::size_t>(lo)][axis]) lo = i;
        if (pts_[static_cast<std::size_t>(i)][axis] > pts_[static_cast<std::size_t>(hi)][axis]) hi = i;
      }
      ext[static_cast<std::size_t>(2 * axis)] = lo;
      ext[static_cast<std::size_t>(2 * axis + 1)] = hi;
    }
    int i0 = ext[0], i1 = ext[1];
    double best = -1.0;
    for (int a : ext) {
      for (int b : ext) {
        const double d = (pts_[static_cast<std::size_t>(a)] - pts_[static_cast<std::size_t>(b)]).squaredNorm();
        if (d > best) {
          best = d;
          i0 = a;
          i1 = b;
        }
      }
    }
    const Vec3 p0 = pts_[static_cast<std::size_t>(i0)];
    const Vec3 dir = (pts_[static_cast<std::size_t>(i1)] - p0).normalized();
    int i2 = -1;
    best = -1.0;
    for (int i = 0; i < n; ++i) {
      const Vec3 r = pts_[static_cast<std::size_t>(i)] - p0;
      const double d = (r - r.dot(dir) * dir).norm();
      if (d > best) {
        best = d;
        i2 = i;
      }
    }
    if (best <= eps_) throw Error(Errc::UnboundedIntersection, "dual points are collinear");
    const Vec3 nrm = (pts_[static_cast<std::size_t>(i1)] - p0).cross(pts_[static_cast<std::size_t>(i2)] - p0).normalized();
    int i3 = -1;
    best = -1.0;
    for (int i = 0; i < n; ++i) {
      const double d = std::abs(nrm.dot(pts_[static_cast<std::size_t>(i)] - p0));
      if (d > best) {
        best = d;
        i3 = i;
      }
    }
    if (best <= eps_) throw Error(Errc::UnboundedIntersection, "dual points are coplanar");
    if (nrm.dot(pts_[static_cast<std::size_t>(i3)] - p0) > 0) std::swap(i1, i2);

    // Base (i0, i1, i2) now has i3 behind it.
    const int f0 = make_facet(i0, i1, i2);
    const int f1 = make_facet(i0, i3, i1);
    const int f2 = make_facet(i1, i3, i2);
    const int f3 = make_facet(i2, i3, i0);
    link_all({f0, f1, f2, f3});

    const std::array<int, 4> simplex{i0, i1, i2, i3};
    for (int i = 0; i < n; ++i) {
      if (std::find(simplex.begin(), simplex.end(), i) != simplex.end()) continue;
      assign(i, std::array<int, 4>{f0, f1, f2, f3});
    }
  }

  // Links neighbors among a small set of facets by matching reversed edges.
  void link_all(std::initializer_list<int> ids) {
    for (int a : ids) {
      for (int ea = 0; ea < 3; ++ea) {
        auto& fa = facets_[static_cast<std::size_t>(a)];
        const int u = fa.v[static_cast<std::size_t>(ea)], w = fa.v[static_cast<std::size_t>((ea + 1) % 3)];
        for (int b : ids) {
          if (b == a) continue;
          const auto& fb = facets_[static_cast<std::size_t>(b)];
          for (int eb = 0; eb < 3; ++eb) {
            if (fb.v[static_cast<std::size_t>(eb)] == w && fb.v[static_cast<std::size_t>((eb + 1) % 3)] == u) {
              fa.nbr[static_cast<std::size_t>(ea)] = b;
            }
          }
        }
      }
    }
  }

  template <typename Range>
  void assign(int p, const Range& candidates) {
    int target = -1;
    double best = eps_;
    for (int f : candidates) {
      const double d = distance(facets_[static_cast<std::size_t>(f)], p);
      if (d > best) {
        best = d;
        target = f;
      }
    }
    if (target >= 0) facets_[static_cast<std::size_t>(target)].outside.push_back(p);
  }

  void add_point(int start, int apex, std::vector<int>& stack) {
    ++visit_;
    std::vector<int> visible{start};
    facets_[static_cast<std::size_t>(start)].visit = visit_;
    struct HorizonEdge {
      int a, b, outer, outer_slot;
    };
    std::vector<HorizonEdge> horizon;
    for (std::size_t q = 0; q < visible.size(); ++q) {
      const int f = visible[q];
      for (int k = 0; k < 3; ++k) {
        const int g = facets_[static_cast<std::size_t>(f)].nbr[static_cast<std::size_t>(k)];
        auto& fg = facets_[static_cast<std::size_t>(g)];
        if (fg.visit == visit_) continue;
        if (distance(fg, apex) > eps_) {
          fg.visit = visit_;
          visible.push_back(g);
        }
      }
    }
    for (int f : visible) {
      const auto& ff = facets_[static_cast<std::size_t>(f)];
      for (int k = 0; k < 3; ++k) {
        const int g = ff.nbr[static_cast<std::size_t>(k)];
        if (facets_[static_cast<std::size_t>(g)].visit == visit_) continue;
        const int a = ff.v[static_cast<std::size_t>(k)], b = ff.v[static_cast<std::size_t>((k + 1) % 3)];
        const auto& fg = facets_[static_cast<std::size_t>(g)];
        int slot = 0;
        for (int s = 0; s < 3; ++s) {
          if (fg.v[static_cast<std::size_t>(s)] == b && fg.v[static_cast<std::size_t>((s + 1) % 3)] == a) slot = s;
        }
        horizon.push_back({a, b, g, slot});
      }
    }

    std::vector<int> orphans;
    for (int f : visible) {
      auto& ff = facets_[static_cast<std::size_t>(f)];
      ff.alive = false;
      for (int p : ff.outside) {
        if (p != apex) orphans.push_back(p);
      }
      ff.outside.clear();
      ff.outside.shrink_to_fit();
    }

    std::unordered_map<int, int> by_start;
    std::unordered_map<int, int> by_end;
    std::vector<int> created;
    created.reserve(horizon.size());
    for (const auto& e : horizon) {
      const int nf = make_facet(e.a, e.b, apex);
      auto& fn = facets_[static_cast<std::size_t>(nf)];
      fn.nbr[0] = e.outer;
      facets_[static_cast<std::size_t>(e.outer)].nbr[static_cast<std::size_t>(e.outer_slot)] = nf;
      by_start[e.a] = nf;
      by_end[e.b] = nf;
      created.push_back(nf);
    }
    for (int nf : created) {
      auto& fn = facets_[static_cast<std::size_t>(nf)];
      fn.nbr[1] = by_start.at(fn.v[1]);  // edge (b, apex) is shared with the facet starting at b
      fn.nbr[2] = by_end.at(fn.v[0]);    // edge (apex, a) with the facet ending at a
    }
    for (int p : orphans) assign(p, created);
    for (int nf : created) {
      if (!facets_[static_cast<std::size_t>(nf)].outside.empty()) stack.push_back(nf);
    }
  }

  std::span<const Vec3> pts_;
  std::vector<WorkFacet> facets_;
  double scale_ = 0.0;
  double eps_ = 0.0;
  int visit_ = 0;
};

}  // namespace

Hull convex_hull(std::span<const Vec3> points, double rel_eps) {
  return Quickhull(points, rel_eps).run();
}

}  // namespace slvd::detail

#include "slvd/tessellation.hpp"

#include <algorithm>
#include <unordered_set>

#include <fmt/core.h>

namespace slvd {

namespace {

int position_in(const std::vector<int>& cycle, int v) {
  const auto it = std::find(cycle.begin(), cycle.end(), v);
  return it == cycle.end() ? -1 : static_cast<int>(it - cycle.begin());
}

int prev_in(const std::vector<int>& cycle, int pos) {
  return cycle[(static_cast<std::size_t>(pos) + cycle.size() - 1) % cycle.size()];
}

}  // namespace

Tessellation::Tessellation(std::vector<UnitVector> vertices, std::vector<std::vector<int>> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  const auto nv = static_cast<int>(vertices_.size());
  vertex_faces_.assign(vertices_.size(), {});
  edges_.reserve(faces_.size() * 3);

  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const auto& cycle = faces_[f];
    for (std::size_t k = 0; k < cycle.size(); ++k) {
      const int a = cycle[k];
      if (a < 0 || a >= nv) {
        throw Error(Errc::IndexError,
                    fmt::format("face {} references vertex {} of {}", f, a, nv),
                    static_cast<long>(f));
      }
    }
    for (std::size_t k = 0; k < cycle.size(); ++k) {
      const int a = cycle[k];
      const int b = cycle[(k + 1) % cycle.size()];
      if (a == b) continue;
      auto& slot = edges_[EdgeKey::of(a, b)];
      int& side = a < b ? slot.left : slot.right;
      if (side != -1) ++duplicate_directed_;
      side = static_cast<int>(f);
      auto& vf = vertex_faces_[static_cast<std::size_t>(a)];
      if (std::find(vf.begin(), vf.end(), static_cast<int>(f)) == vf.end()) {
        vf.push_back(static_cast<int>(f));
      }
    }
  }

  // Reorder each vertex's faces counter-clockwise by walking across edges.
  for (int v = 0; v < nv; ++v) {
    auto& vf = vertex_faces_[static_cast<std::size_t>(v)];
    if (vf.size() < 2) continue;
    std::vector<int> ring{vf.front()};
    bool closed = false;
    while (ring.size() <= vf.size()) {
      const auto& cycle = faces_[static_cast<std::size_t>(ring.back())];
      const int pos = position_in(cycle, v);
      const int u = prev_in(cycle, pos);
      const auto it = edges_.find(EdgeKey::of(v, u));
      if (it == edges_.end()) break;
      const int next = v < u ? it->second.left : it->second.right;
      if (next < 0) break;
      if (next == ring.front()) {
        closed = true;
        break;
      }
      ring.push_back(next);
    }
    if (closed && ring.size() == vf.size()) vf = std::move(ring);
  }
}

std::vector<UnitVector> Tessellation::face_polygon(int f) const {
  std::vector<UnitVector> poly;
  poly.reserve(face(f).size());
  for (int v : face(f)) poly.push_back(vertex(v));
  return poly;
}

std::vector<int> Tessellation::neighbors(int v) const {
  std::vector<int> out;
  for (int f : vertex_faces_[static_cast<std::size_t>(v)]) {
    const auto& cycle = face(f);
    const int pos = position_in(cycle, v);
    for (int w : {prev_in(cycle, pos), cycle[(static_cast<std::size_t>(pos) + 1) % cycle.size()]}) {
      if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
    }
  }
  return out;
}

std::string_view to_string(Invariant inv) {
  switch (inv) {
    case Invariant::FaceCount: return "FaceCount";
    case Invariant::FaceShape: return "FaceShape";
    case Invariant::EdgeManifold: return "EdgeManifold";
    case Invariant::Orientation: return "Orientation";
    case Invariant::Degree3: return "Degree3Violation";
    case Invariant::Euler: return "Euler";
    case Invariant::Convexity: return "Convexity";
  }
  return "Unknown";
}

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const ValidationReport::Check* ValidationReport::first_failure() const {
  for (const auto& c : checks) {
    if (!c.passed) return &c;
  }
  return nullptr;
}

const ValidationReport::Check& ValidationReport::check(Invariant inv) const {
  for (const auto& c : checks) {
    if (c.invariant == inv) return c;
  }
  throw std::out_of_range("invariant not checked");
}

std::string ValidationReport::summary() const {
  std::string out;
  for (const auto& c : checks) {
    out += fmt::format("{:<16} {}", to_string(c.invariant), c.passed ? "pass" : "FAIL");
    if (!c.passed) {
      if (c.element) out += fmt::format(" at {}", *c.element);
      out += ": " + c.detail;
    }
    out += '\n';
  }
  return out;
}

ValidationReport validate(const Tessellation& t, const Tolerances& tol) {
  ValidationReport report;
  auto add = [&](Invariant inv, std::optional<long> where, std::string detail) {
    report.checks.push_back({inv, !where.has_value(), where, std::move(detail)});
  };

  const auto nf = static_cast<long>(t.face_count());
  add(Invariant::FaceCount, nf >= 4 ? std::nullopt : std::optional<long>(nf),
      nf >= 4 ? "" : fmt::format("{} faces, at least 4 required", nf));

  {
    std::optional<long> bad;
    std::string detail;
    for (long f = 0; f < nf && !bad; ++f) {
      const auto& cycle = t.face(static_cast<int>(f));
      std::unordered_set<int> seen(cycle.begin(), cycle.end());
      if (cycle.size() < 3 || seen.size() != cycle.size()) {
        bad = f;
        detail = fmt::format("face {} has {} vertices ({} distinct)", f, cycle.size(), seen.size());
      }
    }
    add(Invariant::FaceShape, bad, detail);
  }

  {
    std::optional<long> bad;
    std::string detail;
    for (const auto& [key, sides] : t.edges()) {
      if (sides.left < 0 || sides.right < 0) {
        const long v = std::min(key.first, key.second);
        if (!bad || v < *bad) {
          bad = v;
          detail = fmt::format("edge ({}, {}) is bordered by one face", key.first, key.second);
        }
      }
    }
    add(Invariant::EdgeManifold, bad, detail);
  }

  add(Invariant::Orientation,
      t.duplicate_directed_edges() == 0 ? std::nullopt : std::optional<long>(-1),
      t.duplicate_directed_edges() == 0
          ? ""
          : fmt::format("{} directed edges repeat; face cycles are not consistently oriented",
                        t.duplicate_directed_edges()));

  {
    std::optional<long> bad;
    std::string detail;
    for (long v = 0; v < static_cast<long>(t.vertex_count()) && !bad; ++v) {
      const auto deg = t.vertex_faces()[static_cast<std::size_t>(v)].size();
      if (deg != 3) {
        bad = v;
        detail = fmt::format("vertex {} has {} incident faces", v, deg);
      }
    }
    add(Invariant::Degree3, bad, detail);
  }

  {
    const long euler = static_cast<long>(t.vertex_count()) - static_cast<long>(t.edge_count()) + nf;
    add(Invariant::Euler, euler == 2 ? std::nullopt : std::optional<long>(euler),
        fmt::format("V - E + F = {} - {} + {} = {}", t.vertex_count(), t.edge_count(), nf, euler));
  }

  {
    std::optional<long> bad;
    std::string detail;
    for (long f = 0; f < nf && !bad; ++f) {
      const auto poly = t.face_polygon(static_cast<int>(f));
      bool convex = false;
      try {
        convex = is_convex_spherical_polygon(poly, tol);
      } catch (const Error& e) {
        detail = e.what();
      }
      if (!convex) {
        bad = f;
        if (detail.empty()) {
          detail = fmt::format("face {} is not convex counter-clockwise from outside", f);
        }
      }
    }
    add(Invariant::Convexity, bad, detail);
  }

  return report;
}

std::vector<VertexStar> vertex_stars(const Tessellation& t) {
  std::vector<VertexStar> stars;
  stars.reserve(t.vertex_count());
  for (int v = 0; v < static_cast<int>(t.vertex_count()); ++v) {
    const auto& vf = t.vertex_faces()[static_cast<std::size_t>(v)];
    VertexStar s{v, {vf.at(0), vf.at(1), vf.at(2)}, {}};
    // The edge shared by consecutive faces f -> g runs from v to the vertex
    // preceding v in f.
    auto edge_after = [&](int f) {
      const auto& cycle = t.face(f);
      return EdgeKey::of(v, prev_in(cycle, position_in(cycle, v)));
    };
    s.edges = {edge_after(s.faces[0]), edge_after(s.faces[1]), edge_after(s.faces[2])};
    stars.push_back(s);
  }
  return stars;
}

}  // namespace slvd

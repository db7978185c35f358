#include "slvd/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/core.h>

namespace slvd {

namespace {

using Run = std::vector<Vec3>;

// Splits a sampled curve into per-hemisphere polylines. A segment crossing
// z = 0 is cut where its chord meets the equator, projected back to the sphere.
class HemisphereSplitter {
public:
  void add(const Vec3& a, const Vec3& b) {
    const int sa = a.z() >= 0 ? 0 : 1;
    const int sb = b.z() >= 0 ? 0 : 1;
    if (sa == sb) {
      extend(sa, a, b);
      close(1 - sa);
      return;
    }
    const double s = a.z() / (a.z() - b.z());
    Vec3 m = a + s * (b - a);
    m.z() = 0.0;
    m.normalize();
    extend(sa, a, m);
    close(sa);
    extend(sb, m, b);
  }

  void close_all() {
    close(0);
    close(1);
  }

  std::array<std::vector<Run>, 2> runs;

private:
  void extend(int side, const Vec3& a, const Vec3& b) {
    Run& run = open_[static_cast<std::size_t>(side)];
    if (run.empty()) run.push_back(a);
    run.push_back(b);
  }
  void close(int side) {
    Run& run = open_[static_cast<std::size_t>(side)];
    if (run.size() >= 2) runs[static_cast<std::size_t>(side)].push_back(std::move(run));
    run.clear();
  }

  std::array<Run, 2> open_;
};

struct Panel {
  double cx, cy, radius;
  bool rear;  // seen from -z: x is mirrored

  std::pair<double, double> place(const Vec3& p) const {
    return {cx + radius * (rear ? -p.x() : p.x()), cy - radius * p.y()};
  }
};

void emit_runs(std::string& out, const Panel& panel, const std::vector<Run>& runs, const char* cls) {
  for (const Run& run : runs) {
    out += fmt::format("<polyline class=\"{}\" points=\"", cls);
    for (std::size_t i = 0; i < run.size(); ++i) {
      const auto [x, y] = panel.place(run[i]);
      out += fmt::format("{}{:.3f},{:.3f}", i ? " " : "", x, y);
    }
    out += "\"/>\n";
  }
}

}  // namespace

std::string render_svg(const Tessellation& t, const GeneratorSet* generators, const RenderOptions& opts) {
  const int arc_segments = std::max(opts.arc_segments, 32);
  const double margin = 20.0, label = 24.0;
  const double r = opts.panel / 2;
  const double width = 2 * opts.panel + 3 * margin;
  const double height = opts.panel + 2 * margin + label;
  const std::array<Panel, 2> panels{Panel{margin + r, margin + label + r, r, false},
                                    Panel{2 * margin + opts.panel + r, margin + label + r, r, true}};

  std::vector<EdgeKey> keys;
  keys.reserve(t.edge_count());
  for (const auto& entry : t.edges()) keys.push_back(entry.first);
  std::sort(keys.begin(), keys.end(), [](const EdgeKey& a, const EdgeKey& b) {
    return std::pair(a.first, a.second) < std::pair(b.first, b.second);
  });

  HemisphereSplitter edges;
  for (const EdgeKey& key : keys) {
    const GeodesicArc arc(t.vertex(key.first), t.vertex(key.second));
    Vec3 prev = arc.a().vec();
    for (int s = 1; s <= arc_segments; ++s) {
      const Vec3 next = arc.point_at(static_cast<double>(s) / arc_segments).vec();
      edges.add(prev, next);
      prev = next;
    }
    edges.close_all();
  }

  HemisphereSplitter circles;
  if (generators) {
    const int segments = std::max(opts.circle_segments, 32);
    for (const auto& c : generators->circles()) {
      const Vec3& n = c.center.vec();
      const Vec3 seed = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
      const Vec3 e1 = n.cross(seed).normalized();
      const Vec3 e2 = n.cross(e1);
      const auto at = [&](int s) {
        const double phi = 2 * kPi * s / segments;
        return Vec3(std::cos(c.radius) * n + std::sin(c.radius) * (std::cos(phi) * e1 + std::sin(phi) * e2));
      };
      Vec3 prev = at(0);
      for (int s = 1; s <= segments; ++s) {
        const Vec3 next = at(s);
        circles.add(prev, next);
        prev = next;
      }
      circles.close_all();
    }
  }

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" viewBox=\"0 0 {0:.0f} {1:.0f}\">\n",
      width, height);
  out += "<style>.edge{fill:none;stroke:#222;stroke-width:1}"
         ".generator{fill:none;stroke:#c33;stroke-width:0.8}"
         ".rim{fill:#f7f7f2;stroke:#888;stroke-width:1}"
         "text{font-family:sans-serif;font-size:14px}</style>\n";
  const std::array<const char*, 2> names{"front", "rear"};
  const std::array<const char*, 2> captions{"front (z &gt;= 0)", "rear (z &lt;= 0)"};
  for (std::size_t side = 0; side < 2; ++side) {
    const Panel& p = panels[side];
    out += fmt::format("<g id=\"{}\">\n", names[side]);
    out += fmt::format("<text x=\"{:.3f}\" y=\"{:.3f}\" text-anchor=\"middle\">{}</text>\n", p.cx, margin + 14.0,
                       captions[side]);
    out += fmt::format("<circle class=\"rim\" cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"{:.3f}\"/>\n", p.cx, p.cy, p.radius);
    emit_runs(out, p, edges.runs[side], "edge");
    emit_runs(out, p, circles.runs[side], "generator");
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace slvd

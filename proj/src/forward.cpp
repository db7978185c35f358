#include "slvd/forward.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <sstream>

#include <fmt/core.h>

namespace slvd {

GeneratorSet::GeneratorSet(std::vector<SphericalCircle> circles, const Tolerances& tol)
    : circles_(std::move(circles)) {
  if (circles_.size() < 4) {
    throw Error(Errc::InvalidGeneratorSet,
                fmt::format("{} generators given, at least 4 required", circles_.size()));
  }
  for (std::size_t i = 0; i < circles_.size(); ++i) {
    for (std::size_t j = i + 1; j < circles_.size(); ++j) {
      const bool same_center = (circles_[i].center.vec() - circles_[j].center.vec()).norm() < tol.norm;
      if (same_center && std::abs(circles_[i].radius - circles_[j].radius) < tol.norm) {
        throw Error(Errc::InvalidGeneratorSet, fmt::format("generators {} and {} coincide", i, j),
                    static_cast<long>(j));
      }
    }
  }
}

Plane circle_plane(const SphericalCircle& c, const Tolerances& tol) {
  return Plane(c.center, std::cos(c.radius), tol);
}

SlvdDiagram construct_slvd(const GeneratorSet& g, const Tolerances& tol) {
  std::vector<Plane> planes;
  planes.reserve(g.size());
  for (const auto& c : g.circles()) planes.push_back(circle_plane(c, tol));

  ConvexPolyhedron poly = halfspace_intersection(planes, tol);
  std::vector<int> active = poly.active_planes();
  if (active.size() < 4) {
    throw Error(Errc::TooFewActive, fmt::format("only {} generators have nonempty regions", active.size()));
  }
  Tessellation t = central_projection(poly);
  std::vector<int> dropped = poly.dropped;
  return {std::move(t), std::move(active), std::move(dropped), std::move(poly)};
}

std::vector<Assignment> brute_force_assign(const GeneratorSet& g, std::span<const UnitVector> samples,
                                           double tie_tol) {
  std::vector<Assignment> out;
  out.reserve(samples.size());
  for (const auto& p : samples) {
    int best = -1;
    double best_val = -std::numeric_limits<double>::infinity();
    double runner_up = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double val = laguerre_proximity(p, g[i]);
      if (val > best_val) {
        runner_up = best_val;
        best_val = val;
        best = static_cast<int>(i);
      } else if (val > runner_up) {
        runner_up = val;
      }
    }
    out.push_back({best, best_val - runner_up <= tie_tol});
  }
  return out;
}

UnitVector random_unit_vector(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    const Vec3 v(gauss(rng), gauss(rng), gauss(rng));
    if (v.norm() > 1e-6) return UnitVector::normalize(v);
  }
}

GeneratorSet random_generators(std::size_t n, std::mt19937_64& rng, double rmin, double rmax) {
  std::uniform_real_distribution<double> radius(rmin, rmax);
  std::vector<SphericalCircle> circles;
  circles.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const UnitVector c = random_unit_vector(rng);
    circles.emplace_back(c, radius(rng));
  }
  return GeneratorSet(std::move(circles));
}

namespace {

double parse_double(std::string_view tok, long line) {
  double value = 0.0;
  const auto* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(Errc::SyntaxError, fmt::format("line {}: bad number '{}'", line, tok), line);
  }
  return value;
}

}  // namespace

GeneratorSet parse_gen(std::istream& in) {
  std::vector<SphericalCircle> circles;
  std::string raw;
  long line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::istringstream ls(raw);
    std::vector<std::string> toks;
    for (std::string tok; ls >> tok;) toks.push_back(tok);
    if (toks.empty() || toks[0].front() == '#') continue;
    if (toks[0] != "c" || toks.size() != 5) {
      throw Error(Errc::SyntaxError, fmt::format("line {}: expected 'c <x> <y> <z> <r>'", line), line);
    }
    try {
      const UnitVector center(Vec3(parse_double(toks[1], line), parse_double(toks[2], line),
                                   parse_double(toks[3], line)));
      circles.emplace_back(center, parse_double(toks[4], line));
    } catch (const Error& e) {
      if (e.code() == Errc::SyntaxError) throw;
      throw Error(Errc::SyntaxError, fmt::format("line {}: {}", line, e.what()), line);
    }
  }
  return GeneratorSet(std::move(circles));
}

GeneratorSet parse_gen(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_gen(in);
}

std::string serialize_gen(const GeneratorSet& g, std::string_view header_comment) {
  std::string out;
  if (!header_comment.empty()) {
    std::istringstream lines{std::string(header_comment)};
    for (std::string l; std::getline(lines, l);) out += "# " + l + '\n';
  }
  for (const auto& c : g.circles()) {
    out += fmt::format("c {:.17g} {:.17g} {:.17g} {:.17g}\n", c.center.x(), c.center.y(),
                       c.center.z(), c.radius);
  }
  return out;
}

}  // namespace slvd

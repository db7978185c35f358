#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "slvd/spherical.hpp"

namespace slvd {

/// Unordered vertex pair, stored with first < second.
struct EdgeKey {
  int first;
  int second;

  static EdgeKey of(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }
  bool operator==(const EdgeKey&) const = default;
};

struct EdgeKeyHash {
  std::size_t operator()(const EdgeKey& e) const noexcept {
    return std::hash<long long>{}((static_cast<long long>(e.first) << 32) ^
                                  static_cast<long long>(static_cast<unsigned>(e.second)));
  }
};

/// The two faces incident to an edge. `left` traverses the edge from
/// EdgeKey::first to EdgeKey::second, `right` the opposite way. A value of -1
/// marks a missing side (only possible in invalid input).
struct EdgeFaces {
  int left = -1;
  int right = -1;
};

/// Faces around a degree-3 vertex in counter-clockwise order seen from
/// outside, with the edges separating (i,j), (j,k) and (i,k).
struct VertexStar {
  int vertex;
  std::array<int, 3> faces;
  std::array<EdgeKey, 3> edges;
};

/// Convex spherical tessellation: unit-vector vertices plus face cycles
/// (counter-clockwise seen from outside). Immutable after construction;
/// adjacency is derived on construction and never trusted from input.
class Tessellation {
public:
  Tessellation(std::vector<UnitVector> vertices, std::vector<std::vector<int>> faces);

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t face_count() const { return faces_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const std::vector<UnitVector>& vertices() const { return vertices_; }
  const UnitVector& vertex(int v) const { return vertices_[static_cast<std::size_t>(v)]; }
  const std::vector<std::vector<int>>& faces() const { return faces_; }
  const std::vector<int>& face(int f) const { return faces_[static_cast<std::size_t>(f)]; }
  std::vector<UnitVector> face_polygon(int f) const;

  const std::unordered_map<EdgeKey, EdgeFaces, EdgeKeyHash>& edges() const { return edges_; }
  /// Incident faces of every vertex, counter-clockwise when the vertex is
  /// manifold, otherwise in discovery order.
  const std::vector<std::vector<int>>& vertex_faces() const { return vertex_faces_; }
  /// Vertices adjacent to v along edges.
  std::vector<int> neighbors(int v) const;

  /// Number of directed edges appearing in more than one face cycle.
  std::size_t duplicate_directed_edges() const { return duplicate_directed_; }

private:
  std::vector<UnitVector> vertices_;
  std::vector<std::vector<int>> faces_;
  std::unordered_map<EdgeKey, EdgeFaces, EdgeKeyHash> edges_;
  std::vector<std::vector<int>> vertex_faces_;
  std::size_t duplicate_directed_ = 0;
};

enum class Invariant {
  FaceCount,
  FaceShape,
  EdgeManifold,
  Orientation,
  Degree3,
  Euler,
  Convexity,
};

std::string_view to_string(Invariant inv);

struct ValidationReport {
  struct Check {
    Invariant invariant;
    bool passed;
    std::optional<long> element;  // first offending vertex, face or edge
    std::string detail;
  };

  std::vector<Check> checks;

  bool ok() const;
  const Check* first_failure() const;
  const Check& check(Invariant inv) const;
  std::string summary() const;
};

ValidationReport validate(const Tessellation& t, const Tolerances& tol = {});

/// One star per vertex; requires a tessellation that passed validate().
std::vector<VertexStar> vertex_stars(const Tessellation& t);

/// TES text format.
Tessellation parse_tes(std::istream& in);
Tessellation parse_tes(std::string_view text);
std::string serialize_tes(const Tessellation& t, std::string_view header_comment = {});

}  // namespace slvd

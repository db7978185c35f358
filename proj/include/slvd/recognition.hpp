#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "slvd/forward.hpp"
#include "slvd/polyhedron.hpp"
#include "slvd/tessellation.hpp"

namespace slvd {

/// The four free parameters of the seed construction, plus which incident
/// face of the seed vertex plays the role of i, j and k.
struct SeedChoice {
  int seed_vertex = 0;
  /// Index into the six orderings of the seed vertex's faces; 0..2 are the
  /// counter-clockwise rotations, 3..5 the reversed ones.
  int face_order = 0;
  UnitVector p_i{0.0, 0.0, 1.0};
  double r_i = 0.0;
  /// Position of q_j on the admissible part of the perpendicular arc, in (0,1).
  double q_j_param = 0.5;
};

/// Faces (i, j, k) of `vertex` in the order selected by `face_order`.
std::array<int, 3> seed_faces(const Tessellation& t, int vertex, int face_order);

/// Centroid of polygon i, half its distance to the nearest edge, q_j_param 0.5.
SeedChoice default_seed(const Tessellation& t, int seed_vertex = 0, int face_order = 0);

/// Random choice accepted by algorithm1_seed: interior p_i, circle inside
/// polygon i, q_j_param in [0.1, 0.9]. Redraws when the perpendicular arc
/// misses polygon j.
SeedChoice random_seed(const Tessellation& t, std::mt19937_64& rng);

struct SeedPlanes {
  std::array<int, 3> faces;  // i, j, k
  std::array<Plane, 3> planes;
  UnitVector q_j;
  /// Normalized coplanarity determinant of the two lines spanning P_k.
  double coplanarity;
};

SeedPlanes algorithm1_seed(const Tessellation& t, const SeedChoice& choice, const Tolerances& tol = {});

struct PropagationStep {
  int vertex;
  int p, q, l;  // P_l was built from P_p and P_q
};

struct PlaneAssignment {
  std::vector<std::optional<Plane>> planes;  // per face
  std::vector<std::uint8_t> marks;           // per vertex
  int seed_vertex = -1;
  std::vector<PropagationStep> steps;
  /// Unmarked vertices in the order their third plane was assigned.
  std::vector<int> closure_order;
  /// Largest key seen at pop time; the queue only processes keys of 2.
  int max_pop_key = 0;
  int min_pop_key = 3;

  bool complete() const;
  std::size_t marked_count() const;
  const Plane& plane(int face) const { return *planes.at(static_cast<std::size_t>(face)); }
};

struct PropagationOptions {
  /// Distance along l_{q,l} of the auxiliary point v'_{q,l}.
  double v_param = 1.0;
  /// Run the construction on the images of the planes under this map and
  /// map the results back. Only the choice of v'_{q,l} depends on it, so on
  /// Laguerre inputs it changes nothing but the rounding.
  std::optional<ProjectiveMap> frame;
  /// Never mark this vertex and never build a plane from an edge incident to
  /// it, which leaves its radial condition out of the construction.
  int excluded_vertex = -1;
};

PlaneAssignment algorithm2_propagate(const Tessellation& t, const SeedPlanes& seed,
                                     const PropagationOptions& opts = {}, const Tolerances& tol = {});

/// Rebuilds the plane of one propagation step with a different v'_{q,l}.
Plane rebuild_plane(const Tessellation& t, const PlaneAssignment& pa, const PropagationStep& step,
                    double v_param, const Tolerances& tol = {});

struct Witness {
  int vertex;
  double residual;  // radians; infinity for a degenerate plane triple
};

struct RecognitionResult {
  bool verdict = false;
  PlaneAssignment planes;
  /// The first failing vertex, or the isolated one when localization found it.
  std::optional<Witness> witness;
  /// Whether `witness` passed the isolation test of isolate_witness.
  bool isolated = false;
  std::optional<GeneratorSet> generators;
  std::optional<SeedChoice> seed;
  /// Largest radial residual among the vertices examined.
  double max_residual = 0.0;
  std::size_t examined = 0;
  /// Set when the propagated planes were badly conditioned: propagation was
  /// redone in this frame and `planes` holds the images under it.
  std::optional<ProjectiveMap> frame;
};

/// Member of the map family that moves the centroid of the dual points n/d
/// to O, scaled to unit mean spread and oriented so the seed vertex lies on
/// its own ray. Empty when every vertex's planes already meet on the vertex's
/// ray and the vertex distances stay within a factor of 2.
std::optional<ProjectiveMap> centering_map(const Tessellation& t, const PlaneAssignment& pa,
                                           const Tolerances& tol = {});

/// Planes of `pa` replaced by their images under m.
PlaneAssignment map_assignment(const ProjectiveMap& m, PlaneAssignment pa, const Tolerances& tol = {});

struct ConditionedPropagation {
  PlaneAssignment pa;
  std::optional<ProjectiveMap> frame;  // set when the second pass ran
};

/// Propagation, repeated in the centering_map frame when the first pass is
/// badly conditioned. The planes come back as images in that frame.
ConditionedPropagation propagate_conditioned(const Tessellation& t, const SeedPlanes& seed,
                                             PropagationOptions opts = {}, const Tolerances& tol = {});

/// Radial test at every unmarked vertex; marks the vertices that pass.
RecognitionResult algorithm3_verify(const Tessellation& t, PlaneAssignment pa, double eps_rec,
                                    const Tolerances& tol = {});

/// Angle between the three-plane point of vertex v and the ray through v;
/// infinity when the three planes do not meet in a point.
double radial_residual(const Tessellation& t, const PlaneAssignment& pa, int v,
                       const Tolerances& tol = {});

/// Maximum radial residual over all vertices.
double consistency_residual(const Tessellation& t, const PlaneAssignment& pa,
                            const Tolerances& tol = {});

/// Least-squares polish of a complete assignment: the conditions "the three
/// planes at v meet on v's ray" are linear in the dual points n/d and in the
/// inverse vertex distances, so a few refinement steps on that system remove
/// rounding picked up along the propagation. One dual point and one distance
/// are held fixed to pin the map family. Returns `pa` unchanged when the
/// polish does not lower consistency_residual.
PlaneAssignment refine_planes(const Tessellation& t, PlaneAssignment pa, const Tolerances& tol = {});

/// Polyhedron vertex on each tessellation vertex's ray.
std::vector<Vec3> polyhedron_vertices(const Tessellation& t, const PlaneAssignment& pa,
                                      const Tolerances& tol = {});

/// Circles cut by the planes, after shrinking so that every plane meets the
/// sphere (offsets scaled by 0.9 / max offset when that exceeds 1).
GeneratorSet recover_generators(const PlaneAssignment& pa, const Tolerances& tol = {});

/// Largest angle between each vertex of t and the vertex with the same three
/// faces in the diagram of g; infinity when the combinatorics differ.
Witness reprojection_gap(const Tessellation& t, const GeneratorSet& g, const Tolerances& tol = {});

/// Vertex x such that propagating with x excluded leaves every other vertex
/// consistent within eps_rec while x itself fails: the rest of the
/// tessellation is Laguerre up to x. Candidates are visited breadth-first from
/// `start`, at most `budget` of them.
std::optional<Witness> isolate_witness(const Tessellation& t, int start, double eps_rec,
                                       std::size_t budget = 256, const Tolerances& tol = {});

/// Full pipeline: validate, seed, propagate, verify, recover and re-project.
/// A false verdict's witness is replaced by an isolated one when that exists.
/// Throws InvalidTessellation when validation fails.
RecognitionResult recognize(const Tessellation& t, const std::optional<SeedChoice>& choice = {},
                            double eps_rec = 1e-6, const Tolerances& tol = {});

/// Least-squares member of the projective family mapping `from` onto `to`
/// (matched vertices on common rays). `residual` receives the largest
/// relative vertex error.
ProjectiveMap fit_projective_map(std::span<const Vec3> from, std::span<const Vec3> to,
                                 double* residual = nullptr);

struct DofEntry {
  SeedChoice choice;
  bool verdict = false;
  std::optional<ProjectiveMap> map;  // reference polyhedron -> this one
  double map_residual = 0.0;
};

struct DofReport {
  std::vector<DofEntry> entries;
  bool all_true = false;
  double worst_residual = 0.0;
};

/// Recognizes under every choice and fits the map from the first choice's
/// polyhedron to each other one.
DofReport dof_probe(const Tessellation& t, std::span<const SeedChoice> choices, double eps_rec = 1e-6,
                    const Tolerances& tol = {});

}  // namespace slvd

#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slvd/polyhedron.hpp"
#include "slvd/spherical.hpp"
#include "slvd/tessellation.hpp"

namespace slvd {

/// At least four pairwise distinct generator circles.
class GeneratorSet {
public:
  explicit GeneratorSet(std::vector<SphericalCircle> circles, const Tolerances& tol = {});

  std::size_t size() const { return circles_.size(); }
  const SphericalCircle& operator[](std::size_t i) const { return circles_[i]; }
  const std::vector<SphericalCircle>& circles() const { return circles_; }

private:
  std::vector<SphericalCircle> circles_;
};

/// Plane through the circle: normal = center, offset = cos(radius).
Plane circle_plane(const SphericalCircle& c, const Tolerances& tol = {});

struct SlvdDiagram {
  Tessellation tessellation;
  /// Generator index of each tessellation face.
  std::vector<int> active;
  /// Generators whose Laguerre region is empty.
  std::vector<int> dropped;
  ConvexPolyhedron polyhedron;
};

SlvdDiagram construct_slvd(const GeneratorSet& g, const Tolerances& tol = {});

struct Assignment {
  int generator;
  /// Another generator's proximity is within the tie tolerance of the best.
  bool boundary;
};

/// Region membership by maximum Laguerre proximity.
std::vector<Assignment> brute_force_assign(const GeneratorSet& g, std::span<const UnitVector> samples,
                                           double tie_tol = 1e-12);

/// Uniform point on the sphere (normalized Gaussian triple).
UnitVector random_unit_vector(std::mt19937_64& rng);

/// Centers uniform on the sphere, radii uniform in [rmin, rmax].
GeneratorSet random_generators(std::size_t n, std::mt19937_64& rng, double rmin = 0.05,
                               double rmax = 0.45);

/// GEN text format: one `c <x> <y> <z> <r>` line per circle, `#` comments.
GeneratorSet parse_gen(std::istream& in);
GeneratorSet parse_gen(std::string_view text);
std::string serialize_gen(const GeneratorSet& g, std::string_view header_comment = {});

}  // namespace slvd

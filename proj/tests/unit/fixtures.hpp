#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "slvd/cli.hpp"
#include "slvd/forward.hpp"
#include "slvd/tessellation.hpp"

namespace fixtures {

inline std::vector<slvd::UnitVector> tetra_directions() {
  const double s = 1.0 / std::sqrt(3.0);
  return {slvd::UnitVector(s, s, s), slvd::UnitVector(s, -s, -s), slvd::UnitVector(-s, s, -s),
          slvd::UnitVector(-s, -s, s)};
}

inline slvd::GeneratorSet tetra_generators(double r = 0.3) {
  std::vector<slvd::SphericalCircle> c;
  for (const auto& d : tetra_directions()) c.emplace_back(d, r);
  return slvd::GeneratorSet(c);
}

inline slvd::GeneratorSet cube_generators(double r = std::acos(-1.0) / 4) {
  std::vector<slvd::SphericalCircle> c;
  for (int axis = 0; axis < 3; ++axis) {
    for (double sign : {1.0, -1.0}) {
      slvd::Vec3 v = slvd::Vec3::Zero();
      v[axis] = sign;
      c.emplace_back(slvd::UnitVector(v), r);
    }
  }
  return slvd::GeneratorSet(c);
}

inline slvd::Tessellation tetra() { return slvd::construct_slvd(tetra_generators()).tessellation; }
inline slvd::Tessellation cube() { return slvd::construct_slvd(cube_generators()).tessellation; }

// Apex (vertex 0) shared by four triangles over a square base: degree 4.
inline slvd::Tessellation square_pyramid() {
  std::vector<slvd::UnitVector> v{slvd::UnitVector(0, 0, 1)};
  for (int k = 0; k < 4; ++k) {
    const double a = std::acos(-1.0) / 2 * k + std::acos(-1.0) / 4;
    v.push_back(slvd::UnitVector::normalize(slvd::Vec3(std::cos(a), std::sin(a), -0.3)));
  }
  return slvd::Tessellation(v, {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 1}, {4, 3, 2, 1}});
}

// Random generators whose diagram keeps all n regions.
inline slvd::GeneratorSet full_generators(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return slvd::cli::generate_instance(n, rng, true);
}

inline slvd::Tessellation full_slvd(std::size_t n, std::uint64_t seed) {
  return slvd::construct_slvd(full_generators(n, seed)).tessellation;
}

}  // namespace fixtures

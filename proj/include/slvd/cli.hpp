#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "slvd/forward.hpp"
#include "slvd/tessellation.hpp"

namespace slvd::cli {

/// Runs one command line. Always returns 0, 1 or 2.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Random generators accepted by construct_slvd. With `all_active` the
/// diagram must also have exactly n faces. `attempts` receives the number of
/// draws used.
GeneratorSet generate_instance(std::size_t n, std::mt19937_64& rng, bool all_active = false,
                               std::size_t* attempts = nullptr);

/// Benchmark instance: uniform centers, radii in [0.2, 0.2 + 0.2/n]. The
/// spread stays far below the cell spacing, so every generator keeps its
/// region and the diagram has n faces (barring coincident draws).
GeneratorSet bench_instance(std::size_t n, std::mt19937_64& rng);

struct Perturbation {
  Tessellation tessellation;
  int vertex;
};

/// One uniformly chosen vertex moved `magnitude` radians along a uniformly
/// random tangent direction. Redraws (at most 1000 times) when the result
/// fails validation, so the output is always a valid tessellation.
Perturbation perturb_vertex(const Tessellation& t, double magnitude, std::mt19937_64& rng);

struct OracleReport {
  std::size_t samples = 0;
  std::size_t excluded = 0;  // within the boundary band or tied
  std::size_t mismatches = 0;
};

/// Compares brute-force region membership of random points with the face
/// of the constructed diagram that contains them.
OracleReport oracle_check(const GeneratorSet& g, std::size_t samples, std::uint64_t rng_seed,
                          double band = 1e-6);

struct BenchRow {
  std::size_t n = 0;
  double construct_ms = 0, propagate_ms = 0, verify_ms = 0;  // medians
  double propagate_verify_ms = 0;                              // median of per-trial sums
  std::vector<std::size_t> vertex_counts;                      // per trial
  int verified = 0;                                            // instances with verdict true
};

BenchRow bench_size(std::size_t n, int trials, std::uint64_t rng_seed);

}  // namespace slvd::cli

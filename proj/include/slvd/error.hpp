#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace slvd {

enum class Errc {
  InvalidUnitVector,
  InvalidCircle,
  DegenerateSites,
  InvalidPolygon,
  SyntaxError,
  IndexError,
  MixedOrientation,
  InvalidPlane,
  InvalidMap,
  ParallelPlanes,
  DegenerateTriple,
  DegenerateSample,
  UnboundedIntersection,
  NonSimpleVertex,
  InvalidGeneratorSet,
  TooFewActive,
  SeedOutOfFace,
  ArcMissesPolygon,
  DegenerateSeed,
  DisconnectedPropagation,
  DegeneratePropagation,
  NonPositiveOffset,
  InvalidTessellation,
  Usage,
};

std::string_view to_string(Errc code);

// Single exception type for the library; `where` is a line number for parse
// errors and a vertex/face index for geometric ones (-1 when not applicable).
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what, long where = -1)
      : std::runtime_error(what), code_(code), where_(where) {}

  Errc code() const noexcept { return code_; }
  long where() const noexcept { return where_; }

private:
  Errc code_;
  long where_;
};

}  // namespace slvd

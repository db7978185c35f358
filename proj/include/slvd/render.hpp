#pragma once

#include <string>

#include "slvd/forward.hpp"
#include "slvd/tessellation.hpp"

namespace slvd {

struct RenderOptions {
  double panel = 400.0;  // side of one hemisphere panel, in SVG units
  int arc_segments = 48;  // per edge; at least 32
  int circle_segments = 96;
};

/// Two orthographic hemisphere views side by side: the front (z >= 0) seen
/// from +z, the rear (z <= 0) seen from -z. Edges are sampled great-circle
/// arcs split at z = 0; generator circles are overlaid when given. Output
/// depends only on the inputs.
std::string render_svg(const Tessellation& t, const GeneratorSet* generators = nullptr,
                       const RenderOptions& opts = {});

}  // namespace slvd

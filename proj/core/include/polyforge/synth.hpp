#pragma once

#include <cstdint>

#include "polyforge/geometry.hpp"
#include "polyforge/raster.hpp"
#include "polyforge/vertex.hpp"

namespace polyforge {

struct Degradation {
  double boundary_noise_px = 0.0;    ///< random boundary jitter amplitude
  double vertex_dropout_prob = 0.0;  ///< per-vertex heatmap dropout
  double vertex_jitter_px = 0.0;     ///< per-vertex peak displacement radius
};

/// Synthetic road-scene recipe. Scenes are rectilinear road networks:
/// full-span strips that cross into junctions and enclose blocks (which
/// become holes of the road polygon), plus optional rectangular islands
/// carved out of wide strips and optional 45-degree corner chamfers.
/// Generation is deterministic for a fixed spec.
struct SceneSpec {
  std::uint64_t seed = 0;
  int width = 512;
  int height = 512;
  int road_width_min = 13;  ///< strip width in pixels
  int road_width_max = 24;
  int branch_count = 6;     ///< total number of strips (split between axes)
  double curvature = 0.0;   ///< probability of chamfering an eligible corner
  int hole_count = 0;       ///< carved-island target (needs strips >= 28 px wide)
  Degradation degradation;
};

struct Scene {
  PolygonSet truth;
  VertexSet truth_vertices;  ///< every ring vertex, score 1
  BinaryMask mask;           ///< rasterize(truth)
  Heatmap heatmap;           ///< render_heatmap(truth_vertices)
  BinaryMask degraded_mask;
  Heatmap degraded_heatmap;
};

/// Throws std::invalid_argument on a malformed spec and std::runtime_error
/// when no valid (simple-ring) scene emerges within the retry bound.
Scene synth_scene(const SceneSpec& spec);

}  // namespace polyforge

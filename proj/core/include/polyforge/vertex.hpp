#pragma once

#include <vector>

#include "polyforge/geometry.hpp"
#include "polyforge/raster.hpp"

namespace polyforge {

struct ScoredVertex {
  Point position;
  double score = 1.0;
};

/// Sparse keypoints with detection scores in [0, 1].
struct VertexSet {
  std::vector<ScoredVertex> vertices;

  std::vector<Point> locations() const;
  std::size_t size() const { return vertices.size(); }
};

/// Non-maximum suppression over a heatmap: returns every pixel that is
/// at or above `threshold` and the strict maximum of its window x window
/// neighbourhood; ties within a window are broken in row-major order
/// (the earlier pixel wins). `window` must be odd and >= 3.
VertexSet nms_peaks(const Heatmap& heatmap, double threshold = 0.3, int window = 5);

struct PrResult {
  double precision = 0.0;
  double recall = 0.0;
  int matched = 0;
};

/// Greedy one-to-one matching in ascending distance order; a pair may
/// match when the distance is at most `radius`. precision and recall are
/// 1 when both sides are empty, and 0 for the side that predicted into
/// (or out of) an empty counterpart.
PrResult vertex_pr(const VertexSet& pred, const VertexSet& truth, double radius = 10.0);

}  // namespace polyforge

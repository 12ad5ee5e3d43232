#pragma once

#include <optional>
#include <vector>

#include "polyforge/geometry.hpp"
#include "polyforge/raster.hpp"

namespace polyforge {

struct GraphEdge {
  int a = 0;
  int b = 0;
  double length = 0.0;  ///< pixels along the skeleton path
};

/// Undirected weighted graph derived from a skeleton. Control nodes are
/// endpoints (degree 1), junctions (degree >= 3), isolated pixels, and
/// one anchor per pure cycle.
struct RoadGraph {
  std::vector<Point> nodes;
  std::vector<GraphEdge> edges;
  std::vector<int> control;  ///< node indices, ascending

  bool empty() const { return nodes.empty(); }
};

/// Collapses the skeleton's pixel graph: every pixel of degree != 2
/// becomes a node, chains of degree-2 pixels become edges whose length
/// accumulates 1 per axial and sqrt(2) per diagonal step. Pixel
/// adjacency is 8-connected minus diagonals bridged by an axial pixel
/// (junctions stay single nodes). Pure cycles get their smallest pixel
/// (row-major) promoted to an anchor node with a self-loop edge.
RoadGraph skeleton_to_graph(const BinaryMask& skeleton);

/// For each truth control node: index of the Euclidean-nearest pred node
/// within snap_radius, or empty.
std::vector<std::optional<int>> match_nodes(const RoadGraph& truth, const RoadGraph& pred,
                                            double snap_radius = 25.0);

/// 1 - mean over truth control-node pairs of min(|dG - dP| / dG, 1).
/// Pairs with no finite truth path are skipped; pairs whose endpoints
/// are unmatched or disconnected in pred contribute the full penalty.
/// Throws when the truth graph has fewer than two control nodes or no
/// connected control pair.
double apls_score(const RoadGraph& truth, const RoadGraph& pred, double snap_radius = 25.0);

/// Mean of apls_score in both directions.
double apls_symmetric(const RoadGraph& truth, const RoadGraph& pred, double snap_radius = 25.0);

}  // namespace polyforge

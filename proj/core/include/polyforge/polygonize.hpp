#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "polyforge/geometry.hpp"
#include "polyforge/raster.hpp"
#include "polyforge/vertex.hpp"

namespace polyforge {

struct PolygonizeConfig {
  double d_th = 5.0;         ///< keypoint capture distance in pixels
  double epsilon = 1.0;      ///< DP tolerance for inflection recovery
  double tau = 30.0;         ///< inflection band half-width in degrees
  double nms_threshold = 0.3;
  int nms_window = 5;

  void validate() const;
};

/// A contour point together with its index on the dense contour.
struct IndexedVertex {
  std::size_t contour_index = 0;
  Point position;
};

/// Stage 3a (distance filter): indices of contour points whose nearest
/// keypoint lies strictly closer than d_th. Order follows the contour.
std::vector<std::size_t> points_within_keypoint_distance(const Ring& contour,
                                                         std::span<const Point> keypoints,
                                                         double d_th);

/// Stage 3 (keypoint-guided selection): applies the distance filter and
/// collapses every maximal run of consecutive survivors (runs wrap around
/// the contour) to the single point closest to its nearest keypoint.
/// When one keypoint captures runs on two contour branches (roads
/// thinner than d_th), only the nearest run survives.
std::vector<IndexedVertex> filter_by_keypoints(const Ring& contour,
                                               std::span<const Point> keypoints, double d_th);

/// Stage 4 (inflection recovery): Douglas-Peucker with tolerance epsilon
/// over the closed contour, then keeps simplified vertices whose angle
/// lies in [90 - tau, 90 + tau] degrees.
std::vector<IndexedVertex> recover_inflections(const Ring& contour, double epsilon, double tau);

/// Merges both selections, sorts by contour index, deduplicates points
/// within 1.5 px (a diagonal boundary step can split one geometric
/// corner across two pixels; keypoint-backed vertices win collisions),
/// and builds the final ring. Returns nullopt when fewer than three
/// vertices survive (the region is dropped).
std::optional<Ring> merge_and_order(std::vector<IndexedVertex> selected,
                                    std::vector<IndexedVertex> inflections);

struct PolygonizeStats {
  int dropped_regions = 0;  ///< regions whose exterior collapsed below 3 vertices
  int dropped_holes = 0;    ///< hole rings that collapsed below 3 vertices
  /// Per output polygon: number of its hole rings that were dropped.
  std::vector<int> dropped_rings_per_polygon;
};

struct PolygonizeResult {
  PolygonSet polygons;
  PolygonizeStats stats;
};

/// Full pipeline: dense contour tracing, NMS keypoint extraction,
/// distance filtering and inflection recovery, per ring. Hole rings are
/// processed with the same configuration as exteriors and keep their
/// nesting. Mask and heatmap dimensions must match.
PolygonizeResult polygonize(const BinaryMask& mask, const Heatmap& heatmap,
                            const PolygonizeConfig& config = {});

/// Same pipeline with an externally supplied vertex set (NMS already
/// applied, e.g. per patch).
PolygonizeResult polygonize_with_vertices(const BinaryMask& mask, const VertexSet& vertices,
                                          const PolygonizeConfig& config = {});

/// Stitched processing: assembles the patch masks, shifts every patch's
/// vertices by its patch offset, and polygonizes the assembled grid.
/// Patches are row-major in the layout.
PolygonizeResult polygonize_stitched(const std::vector<BinaryMask>& patch_masks,
                                     const std::vector<VertexSet>& patch_vertices,
                                     GridLayout layout, const PolygonizeConfig& config = {});

}  // namespace polyforge

#include "polyforge/polygonize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace polyforge {

namespace {

constexpr double kAngleSlack = 1e-9;  // numeric slack on the tau band

// Uniform bucket grid over keypoints, cell size d_th. Any keypoint
// closer than d_th to a query lies in the 3x3 cell neighbourhood.
class KeypointGrid {
 public:
  KeypointGrid(std::span<const Point> keypoints, double cell)
      : keypoints_(keypoints), cell_(cell) {
    buckets_.reserve(keypoints.size());
    for (std::size_t i = 0; i < keypoints.size(); ++i) {
      buckets_[key(keypoints[i])].push_back(i);
    }
  }

  struct Nearest {
    double dist_sq = std::numeric_limits<double>::infinity();
    std::size_t index = 0;
  };

  /// Nearest keypoint among candidates within one cell ring; exact
  /// whenever the resulting distance is < cell.
  Nearest nearest(Point p) const {
    const long cx = static_cast<long>(std::floor(p.x / cell_));
    const long cy = static_cast<long>(std::floor(p.y / cell_));
    Nearest best;
    for (long gy = cy - 1; gy <= cy + 1; ++gy) {
      for (long gx = cx - 1; gx <= cx + 1; ++gx) {
        const auto it = buckets_.find((gx << 32) ^ (gy & 0xffffffffL));
        if (it == buckets_.end()) continue;
        for (std::size_t i : it->second) {
          const double d = distance_sq(p, keypoints_[i]);
          if (d < best.dist_sq) best = {d, i};
        }
      }
    }
    return best;
  }

 private:
  long key(Point p) const {
    const long cx = static_cast<long>(std::floor(p.x / cell_));
    const long cy = static_cast<long>(std::floor(p.y / cell_));
    return (cx << 32) ^ (cy & 0xffffffffL);
  }

  std::span<const Point> keypoints_;
  double cell_;
  std::unordered_map<long, std::vector<std::size_t>> buckets_;
};

std::optional<double> angle_at(const Point& prev, const Point& cur, const Point& next) {
  const double ax = prev.x - cur.x, ay = prev.y - cur.y;
  const double bx = next.x - cur.x, by = next.y - cur.y;
  const double la = std::sqrt(ax * ax + ay * ay);
  const double lb = std::sqrt(bx * bx + by * by);
  if (la <= Ring::kDuplicateTol || lb <= Ring::kDuplicateTol) return std::nullopt;
  double c = (ax * bx + ay * by) / (la * lb);
  c = std::clamp(c, -1.0, 1.0);
  return std::acos(c) * 180.0 / 3.14159265358979323846;
}

}  // namespace

void PolygonizeConfig::validate() const {
  if (!(d_th > 0.0)) throw std::invalid_argument("polygonize: d_th must be > 0");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("polygonize: epsilon must be >= 0");
  if (!(tau >= 0.0 && tau < 90.0)) throw std::invalid_argument("polygonize: tau must be in [0, 90)");
  if (!(nms_threshold > 0.0 && nms_threshold < 1.0)) {
    throw std::invalid_argument("polygonize: nms_threshold must be in (0, 1)");
  }
  if (nms_window < 3 || nms_window % 2 == 0) {
    throw std::invalid_argument("polygonize: nms_window must be odd and >= 3");
  }
}

std::vector<std::size_t> points_within_keypoint_distance(const Ring& contour,
                                                         std::span<const Point> keypoints,
                                                         double d_th) {
  if (!(d_th > 0.0)) throw std::invalid_argument("points_within_keypoint_distance: d_th must be > 0");
  std::vector<std::size_t> out;
  if (keypoints.empty()) return out;
  const double d2 = d_th * d_th;
  const bool finite_th = std::isfinite(d_th);
  const KeypointGrid grid(keypoints, finite_th ? d_th : 1.0);
  const auto& pts = contour.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!finite_th) {
      out.push_back(i);
      continue;
    }
    if (grid.nearest(pts[i]).dist_sq < d2) out.push_back(i);
  }
  return out;
}

std::vector<IndexedVertex> filter_by_keypoints(const Ring& contour,
                                               std::span<const Point> keypoints, double d_th) {
  if (!(d_th > 0.0)) throw std::invalid_argument("filter_by_keypoints: d_th must be > 0");
  std::vector<IndexedVertex> out;
  if (keypoints.empty()) return out;
  const auto& pts = contour.points();
  const std::size_t n = pts.size();
  const double d2 = d_th * d_th;
  const bool finite_th = std::isfinite(d_th);
  const KeypointGrid grid(keypoints, finite_th ? d_th : 1.0);

  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> guide(n, 0);
  std::vector<char> selected(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (finite_th) {
      const auto hit = grid.nearest(pts[i]);
      nearest[i] = hit.dist_sq;
      guide[i] = hit.index;
      selected[i] = nearest[i] < d2 ? 1 : 0;
    } else {
      for (std::size_t k = 0; k < keypoints.size(); ++k) {
        const double d = distance_sq(pts[i], keypoints[k]);
        if (d < nearest[i]) {
          nearest[i] = d;
          guide[i] = k;
        }
      }
      selected[i] = 1;
    }
  }

  // Collapse maximal runs of consecutive survivors (runs wrap around) to
  // the run point closest to its guiding keypoint.
  struct Run {
    std::size_t best;
    double dist_sq;
    std::size_t keypoint;
  };
  std::vector<Run> runs;
  std::size_t first_gap = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (!selected[i]) {
      first_gap = i;
      break;
    }
  }
  if (first_gap == n) {
    // Everything survived: a single run covering the whole contour.
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (nearest[i] < nearest[best]) best = i;
    }
    runs.push_back({best, nearest[best], guide[best]});
  } else {
    for (std::size_t step = 0; step < n;) {
      const std::size_t idx = (first_gap + step) % n;
      if (!selected[idx]) {
        ++step;
        continue;
      }
      std::size_t best = idx;
      std::size_t len = 0;
      while (len < n) {
        const std::size_t cur = (idx + len) % n;
        if (!selected[cur]) break;
        if (nearest[cur] < nearest[best]) best = cur;
        ++len;
      }
      runs.push_back({best, nearest[best], guide[best]});
      step += len;
    }
  }

  // A keypoint near two contour branches (thin roads) captures a run on
  // each side; keep only the run nearest to that keypoint.
  std::vector<char> keep(runs.size(), 1);
  for (std::size_t a = 0; a < runs.size(); ++a) {
    for (std::size_t b = 0; b < runs.size(); ++b) {
      if (a == b || runs[a].keypoint != runs[b].keypoint) continue;
      if (runs[b].dist_sq < runs[a].dist_sq ||
          (runs[b].dist_sq == runs[a].dist_sq && b < a)) {
        keep[a] = 0;
        break;
      }
    }
  }
  for (std::size_t r = 0; r < runs.size(); ++r) {
    if (keep[r]) out.push_back({runs[r].best, pts[runs[r].best]});
  }
  std::sort(out.begin(), out.end(),
            [](const IndexedVertex& a, const IndexedVertex& b) {
              return a.contour_index < b.contour_index;
            });
  return out;
}

std::vector<IndexedVertex> recover_inflections(const Ring& contour, double epsilon, double tau) {
  if (!(tau >= 0.0 && tau < 90.0)) {
    throw std::invalid_argument("recover_inflections: tau must be in [0, 90)");
  }
  const auto kept = simplify_ring_dp_indices(contour, epsilon);
  std::vector<IndexedVertex> out;
  if (kept.size() < 3) return out;
  const auto& pts = contour.points();
  const std::size_t m = kept.size();
  for (std::size_t j = 0; j < m; ++j) {
    const Point& prev = pts[kept[(j + m - 1) % m]];
    const Point& cur = pts[kept[j]];
    const Point& next = pts[kept[(j + 1) % m]];
    const auto theta = angle_at(prev, cur, next);
    if (!theta) continue;
    if (*theta >= 90.0 - tau - kAngleSlack && *theta <= 90.0 + tau + kAngleSlack) {
      out.push_back({kept[j], cur});
    }
  }
  return out;
}

std::optional<Ring> merge_and_order(std::vector<IndexedVertex> selected,
                                    std::vector<IndexedVertex> inflections) {
  // Diagonal boundary steps can represent one geometric corner by two
  // pixels sqrt(2) apart, so dedup must reach past 1 px. Keypoint-backed
  // vertices win collisions: inflection recovery only fills gaps.
  constexpr double kDedupeRadius = 1.5;
  struct Tagged {
    IndexedVertex v;
    bool from_keypoints;
  };
  std::vector<Tagged> all;
  all.reserve(selected.size() + inflections.size());
  for (IndexedVertex& v : selected) all.push_back({v, true});
  for (IndexedVertex& v : inflections) all.push_back({v, false});
  std::sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) {
    if (a.v.contour_index != b.v.contour_index) return a.v.contour_index < b.v.contour_index;
    return a.from_keypoints && !b.from_keypoints;
  });
  all.erase(std::unique(all.begin(), all.end(),
                        [](const Tagged& a, const Tagged& b) {
                          return a.v.contour_index == b.v.contour_index;
                        }),
            all.end());

  std::vector<Tagged> kept;
  kept.reserve(all.size());
  for (const Tagged& t : all) {
    if (!kept.empty() && distance(kept.back().v.position, t.v.position) <= kDedupeRadius) {
      if (t.from_keypoints && !kept.back().from_keypoints) kept.back() = t;
      continue;
    }
    kept.push_back(t);
  }
  while (kept.size() > 1 &&
         distance(kept.front().v.position, kept.back().v.position) <= kDedupeRadius) {
    if (kept.back().from_keypoints && !kept.front().from_keypoints) {
      kept.front() = kept.back();
    }
    kept.pop_back();
  }
  if (kept.size() < 3) return std::nullopt;
  std::vector<Point> pts;
  pts.reserve(kept.size());
  for (const Tagged& t : kept) pts.push_back(t.v.position);
  try {
    return Ring(std::move(pts));
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

namespace {

std::optional<Ring> polygonize_ring(const Ring& contour, std::span<const Point> keypoints,
                                    const PolygonizeConfig& cfg) {
  auto selected = filter_by_keypoints(contour, keypoints, cfg.d_th);
  auto inflections = recover_inflections(contour, cfg.epsilon, cfg.tau);
  return merge_and_order(std::move(selected), std::move(inflections));
}

}  // namespace

PolygonizeResult polygonize_with_vertices(const BinaryMask& mask, const VertexSet& vertices,
                                          const PolygonizeConfig& config) {
  config.validate();
  const PolygonSet dense = trace_contours(mask);
  const std::vector<Point> keypoints = vertices.locations();

  PolygonizeResult result;
  result.polygons.width = mask.width;
  result.polygons.height = mask.height;
  for (const PolygonWithHoles& region : dense.polygons) {
    auto exterior = polygonize_ring(region.exterior, keypoints, config);
    if (!exterior) {
      ++result.stats.dropped_regions;
      result.stats.dropped_holes += static_cast<int>(region.holes.size());
      continue;
    }
    if (signed_area(*exterior) < 0.0) exterior->reverse();
    PolygonWithHoles poly(std::move(*exterior));
    int dropped = 0;
    for (const Ring& hole : region.holes) {
      auto out = polygonize_ring(hole, keypoints, config);
      if (!out) {
        ++dropped;
        continue;
      }
      if (signed_area(*out) > 0.0) out->reverse();
      poly.holes.push_back(std::move(*out));
    }
    result.stats.dropped_holes += dropped;
    result.stats.dropped_rings_per_polygon.push_back(dropped);
    result.polygons.polygons.push_back(std::move(poly));
  }
  return result;
}

PolygonizeResult polygonize(const BinaryMask& mask, const Heatmap& heatmap,
                            const PolygonizeConfig& config) {
  if (mask.width != heatmap.width || mask.height != heatmap.height) {
    throw std::invalid_argument("polygonize: mask and heatmap dimensions differ");
  }
  config.validate();
  const VertexSet vertices = nms_peaks(heatmap, config.nms_threshold, config.nms_window);
  return polygonize_with_vertices(mask, vertices, config);
}

PolygonizeResult polygonize_stitched(const std::vector<BinaryMask>& patch_masks,
                                     const std::vector<VertexSet>& patch_vertices,
                                     GridLayout layout, const PolygonizeConfig& config) {
  if (patch_masks.size() != patch_vertices.size()) {
    throw std::invalid_argument("polygonize_stitched: mask/vertex patch counts differ");
  }
  const BinaryMask mask = stitch_masks(patch_masks, layout);
  const int pw = patch_masks.front().width;
  const int ph = patch_masks.front().height;
  VertexSet all;
  for (int r = 0; r < layout.rows; ++r) {
    for (int c = 0; c < layout.cols; ++c) {
      const VertexSet& patch = patch_vertices[static_cast<std::size_t>(r) * layout.cols + c];
      const double ox = static_cast<double>(c) * pw;
      const double oy = static_cast<double>(r) * ph;
      for (const ScoredVertex& v : patch.vertices) {
        all.vertices.push_back({Point{v.position.x + ox, v.position.y + oy}, v.score});
      }
    }
  }
  return polygonize_with_vertices(mask, all, config);
}

}  // namespace polyforge

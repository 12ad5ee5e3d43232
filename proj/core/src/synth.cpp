#include "polyforge/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace polyforge {

namespace {

constexpr int kEdgeMargin = 2;     // strip distance to the top/bottom grid edge
constexpr int kMinGap = 14;        // gap between parallel strips
constexpr int kIslandMargin = 8;   // island distance to its strip's edges
constexpr int kIslandMin = 12;     // minimum island side
constexpr int kIslandClearance = 12;  // island distance to junctions and other islands
constexpr int kChamfer = 10;       // corner cut length along each edge
constexpr double kHeatmapSigma = 5.0;

struct Interval {
  int lo = 0;
  int hi = 0;  // inclusive
};

struct IslandRect {
  int x0, x1, y0, y1;  // inclusive background rectangle
};

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double uniform_real(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Places `count` disjoint intervals of the given widths inside
// [margin, limit - margin], pairwise gaps >= kMinGap. Drops trailing
// strips when they do not fit.
std::vector<Interval> place_strips(std::mt19937_64& rng, int limit, std::vector<int> widths) {
  const int usable = limit - 2 * kEdgeMargin;
  while (!widths.empty()) {
    int need = 0;
    for (int w : widths) need += w;
    need += (static_cast<int>(widths.size()) - 1) * kMinGap;
    if (need <= usable) break;
    widths.pop_back();
  }
  std::vector<Interval> strips;
  if (widths.empty()) return strips;
  int need = 0;
  for (int w : widths) need += w;
  need += (static_cast<int>(widths.size()) - 1) * kMinGap;
  const int slack = usable - need;
  std::vector<int> offsets(widths.size());
  for (int& o : offsets) o = uniform_int(rng, 0, slack);
  std::sort(offsets.begin(), offsets.end());
  int cursor = kEdgeMargin;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    const int lo = cursor + offsets[i] - (i > 0 ? offsets[i - 1] : 0);
    strips.push_back({lo, lo + widths[i] - 1});
    cursor = lo + widths[i] + kMinGap;
  }
  return strips;
}

bool interval_clear(const std::vector<Interval>& intervals, int lo, int hi, int clearance) {
  for (const Interval& iv : intervals) {
    if (lo - clearance <= iv.hi && iv.lo <= hi + clearance) return false;
  }
  return true;
}

// Border following crosses reflex junction corners with a single
// diagonal step, leaving two vertices sqrt(2) apart. Replace each such
// pair between axis-aligned edges with the corner point itself; the
// corner pixel belongs to the road region, so the raster is unchanged.
Ring collapse_diagonal_steps(const Ring& ring) {
  const auto& pts = ring.points();
  const std::size_t n = pts.size();
  // Start the walk at a vertex that is not the second half of a pair.
  std::size_t start = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& prev = pts[(i + n - 1) % n];
    const Point& cur = pts[i];
    if (std::abs(cur.x - prev.x) == 1.0 && std::abs(cur.y - prev.y) == 1.0) continue;
    start = i;
    break;
  }
  std::vector<Point> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n;) {
    const Point& a = pts[(start + k) % n];
    const Point& b = pts[(start + k + 1) % n];
    const Point& prev = pts[(start + k + n - 1) % n];
    const Point& next = pts[(start + k + 2) % n];
    const bool diagonal_step = std::abs(b.x - a.x) == 1.0 && std::abs(b.y - a.y) == 1.0;
    const bool prev_vertical = prev.x == a.x && prev.y != a.y;
    const bool prev_horizontal = prev.y == a.y && prev.x != a.x;
    const bool next_vertical = next.x == b.x && next.y != b.y;
    const bool next_horizontal = next.y == b.y && next.x != b.x;
    if (diagonal_step && ((prev_vertical && next_horizontal) || (prev_horizontal && next_vertical))) {
      out.push_back(prev_vertical ? Point{a.x, b.y} : Point{b.x, a.y});
      k += 2;
    } else {
      out.push_back(a);
      k += 1;
    }
  }
  return Ring(std::move(out));
}

// Chamfers eligible 90-degree corners of a rectilinear ring in place.
Ring chamfer_ring(const Ring& ring, double probability, std::mt19937_64& rng) {
  const auto& pts = ring.points();
  const std::size_t n = pts.size();
  std::vector<char> chamfered(n, 0);
  std::vector<Point> out;
  out.reserve(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    const Point& prev = pts[(i + n - 1) % n];
    const Point& cur = pts[i];
    const Point& next = pts[(i + 1) % n];
    const double lp = distance(cur, prev);
    const double ln = distance(cur, next);
    const bool eligible = lp >= 2 * kChamfer + 12 && ln >= 2 * kChamfer + 12 &&
                          !chamfered[(i + n - 1) % n];
    if (eligible && uniform_real(rng, 0.0, 1.0) < probability) {
      chamfered[i] = 1;
      const Point a{cur.x + kChamfer * (prev.x - cur.x) / lp,
                    cur.y + kChamfer * (prev.y - cur.y) / lp};
      const Point b{cur.x + kChamfer * (next.x - cur.x) / ln,
                    cur.y + kChamfer * (next.y - cur.y) / ln};
      out.push_back(a);
      out.push_back(b);
    } else {
      out.push_back(cur);
    }
  }
  return Ring(std::move(out));
}

void stamp_gaussian(Heatmap& map, Point center, double sigma, double amplitude) {
  const double radius = 4.0 * sigma;
  const double radius_sq = radius * radius;
  const double inv = 1.0 / (2.0 * sigma * sigma);
  const int x0 = std::max(0, static_cast<int>(std::ceil(center.x - radius)));
  const int x1 = std::min(map.width - 1, static_cast<int>(std::floor(center.x + radius)));
  const int y0 = std::max(0, static_cast<int>(std::ceil(center.y - radius)));
  const int y1 = std::min(map.height - 1, static_cast<int>(std::floor(center.y + radius)));
  for (int y = y0; y <= y1; ++y) {
    const double dy = y - center.y;
    for (int x = x0; x <= x1; ++x) {
      const double dx = x - center.x;
      const double d2 = dx * dx + dy * dy;
      if (d2 > radius_sq) continue;
      const float g = static_cast<float>(std::min(1.0, amplitude * std::exp(-d2 * inv)));
      float& cell = map(x, y);
      if (g > cell) cell = g;
    }
  }
}

}  // namespace

Scene synth_scene(const SceneSpec& spec) {
  if (spec.width < 64 || spec.height < 64) {
    throw std::invalid_argument("synth_scene: grid must be at least 64x64");
  }
  if (spec.road_width_min < 4 || spec.road_width_max < spec.road_width_min) {
    throw std::invalid_argument("synth_scene: invalid road width range");
  }
  if (spec.branch_count < 1) throw std::invalid_argument("synth_scene: branch_count must be >= 1");
  if (spec.hole_count < 0) throw std::invalid_argument("synth_scene: hole_count must be >= 0");
  const Degradation& deg = spec.degradation;
  if (deg.boundary_noise_px < 0 || deg.vertex_jitter_px < 0 ||
      deg.vertex_dropout_prob < 0 || deg.vertex_dropout_prob > 1) {
    throw std::invalid_argument("synth_scene: invalid degradation parameters");
  }
  if (!(spec.curvature >= 0.0 && spec.curvature <= 1.0)) {
    throw std::invalid_argument("synth_scene: curvature must be in [0, 1]");
  }

  std::mt19937_64 rng(spec.seed * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull);

  for (int attempt = 0; attempt < 8; ++attempt) {
    // Split strips between axes.
    int nv = spec.branch_count / 2;
    int nh = spec.branch_count - nv;
    if (spec.branch_count >= 2 && uniform_int(rng, 0, 1) == 1) std::swap(nh, nv);

    auto draw_widths = [&](int count) {
      std::vector<int> widths(count);
      for (int& w : widths) w = uniform_int(rng, spec.road_width_min, spec.road_width_max);
      return widths;
    };
    const std::vector<Interval> hstrips = place_strips(rng, spec.height, draw_widths(nh));
    const std::vector<Interval> vstrips = place_strips(rng, spec.width, draw_widths(nv));
    if (hstrips.empty() && vstrips.empty()) {
      throw std::invalid_argument("synth_scene: grid too small for any strip");
    }

    // Carve islands out of wide strips, clear of junctions and of each
    // other.
    std::vector<IslandRect> islands;
    for (int k = 0; k < spec.hole_count; ++k) {
      bool placed = false;
      for (int tries = 0; tries < 40 && !placed; ++tries) {
        const bool horizontal = !hstrips.empty() && (vstrips.empty() || uniform_int(rng, 0, 1) == 0);
        const auto& strips = horizontal ? hstrips : vstrips;
        const auto& cross = horizontal ? vstrips : hstrips;
        const int along_limit = horizontal ? spec.width : spec.height;
        if (strips.empty()) continue;
        const Interval strip = strips[static_cast<std::size_t>(
            uniform_int(rng, 0, static_cast<int>(strips.size()) - 1))];
        const int breadth = strip.hi - strip.lo + 1;
        if (breadth < 2 * kIslandMargin + kIslandMin) continue;
        const int max_side = breadth - 2 * kIslandMargin;
        const int side_b = uniform_int(rng, kIslandMin, max_side);
        const int side_a = uniform_int(rng, kIslandMin, std::min(40, along_limit / 4));
        const int b0 = uniform_int(rng, strip.lo + kIslandMargin, strip.hi - kIslandMargin - side_b + 1);
        const int a0 = uniform_int(rng, kIslandClearance, along_limit - kIslandClearance - side_a);
        if (!interval_clear(cross, a0, a0 + side_a - 1, kIslandClearance)) continue;
        IslandRect rect = horizontal ? IslandRect{a0, a0 + side_a - 1, b0, b0 + side_b - 1}
                                     : IslandRect{b0, b0 + side_b - 1, a0, a0 + side_a - 1};
        bool clear = true;
        for (const IslandRect& other : islands) {
          if (rect.x0 - kIslandClearance <= other.x1 && other.x0 <= rect.x1 + kIslandClearance &&
              rect.y0 - kIslandClearance <= other.y1 && other.y0 <= rect.y1 + kIslandClearance) {
            clear = false;
            break;
          }
        }
        if (!clear) continue;
        islands.push_back(rect);
        placed = true;
      }
    }

    // Raster union of the strips, islands carved out.
    BinaryMask raw(spec.width, spec.height, 0);
    for (const Interval& s : hstrips) {
      for (int y = s.lo; y <= s.hi; ++y) {
        for (int x = 0; x < spec.width; ++x) raw(x, y) = 1;
      }
    }
    for (const Interval& s : vstrips) {
      for (int x = s.lo; x <= s.hi; ++x) {
        for (int y = 0; y < spec.height; ++y) raw(x, y) = 1;
      }
    }
    for (const IslandRect& r : islands) {
      for (int y = r.y0; y <= r.y1; ++y) {
        for (int x = r.x0; x <= r.x1; ++x) raw(x, y) = 0;
      }
    }

    // Corner polygons from the traced union.
    const PolygonSet dense = trace_contours(raw);
    PolygonSet truth;
    truth.width = spec.width;
    truth.height = spec.height;
    for (const PolygonWithHoles& region : dense.polygons) {
      Ring exterior = collapse_diagonal_steps(remove_collinear(region.exterior));
      if (spec.curvature > 0.0) exterior = chamfer_ring(exterior, spec.curvature, rng);
      PolygonWithHoles poly(std::move(exterior));
      for (const Ring& hole : region.holes) {
        Ring slim = collapse_diagonal_steps(remove_collinear(hole));
        if (spec.curvature > 0.0) slim = chamfer_ring(slim, spec.curvature, rng);
        poly.holes.push_back(std::move(slim));
      }
      truth.polygons.push_back(std::move(poly));
    }

    bool simple = true;
    for (const PolygonWithHoles& poly : truth.polygons) {
      if (!is_simple(poly.exterior)) simple = false;
      for (const Ring& hole : poly.holes) {
        if (!is_simple(hole)) simple = false;
      }
    }
    if (!simple) continue;

    Scene scene;
    scene.truth = truth;
    for (const PolygonWithHoles& poly : truth.polygons) {
      for (const Point& p : poly.exterior.points()) scene.truth_vertices.vertices.push_back({p, 1.0});
      for (const Ring& hole : poly.holes) {
        for (const Point& p : hole.points()) scene.truth_vertices.vertices.push_back({p, 1.0});
      }
    }
    scene.mask = rasterize(truth, spec.width, spec.height);
    scene.heatmap =
        render_heatmap(scene.truth_vertices.locations(), spec.width, spec.height, kHeatmapSigma);

    if (deg.boundary_noise_px > 0.0) {
      BinaryMask inverse(spec.width, spec.height, 0);
      for (std::size_t i = 0; i < scene.mask.data.size(); ++i) {
        inverse.data[i] = scene.mask.data[i] ? 0 : 1;
      }
      const auto dist_to_bg = squared_distance_transform(inverse);
      const auto dist_to_fg = squared_distance_transform(scene.mask);
      scene.degraded_mask = BinaryMask(spec.width, spec.height, 0);
      for (std::size_t i = 0; i < scene.mask.data.size(); ++i) {
        const double sd = scene.mask.data[i] ? std::sqrt(dist_to_bg[i]) : -std::sqrt(dist_to_fg[i]);
        const double noise = uniform_real(rng, -deg.boundary_noise_px, deg.boundary_noise_px);
        scene.degraded_mask.data[i] = (sd + noise) > 0.0 ? 1 : 0;
      }
    } else {
      scene.degraded_mask = scene.mask;
    }

    if (deg.vertex_dropout_prob > 0.0 || deg.vertex_jitter_px > 0.0) {
      scene.degraded_heatmap = Heatmap(spec.width, spec.height, 0.0f);
      for (const ScoredVertex& v : scene.truth_vertices.vertices) {
        // Blur and attenuate peaks before dropout, mimicking washed-out
        // heatmap predictions.
        Point pos = v.position;
        double sigma = kHeatmapSigma;
        double amplitude = 1.0;
        if (deg.vertex_jitter_px > 0.0) {
          const double angle = uniform_real(rng, 0.0, 2.0 * 3.14159265358979323846);
          const double r = uniform_real(rng, 0.0, deg.vertex_jitter_px);
          pos.x = std::clamp(pos.x + r * std::cos(angle), 0.0, spec.width - 1.0);
          pos.y = std::clamp(pos.y + r * std::sin(angle), 0.0, spec.height - 1.0);
          sigma *= 1.0 + 0.1 * uniform_real(rng, 0.0, deg.vertex_jitter_px);
          amplitude = std::max(0.3, 1.0 - 0.05 * deg.vertex_jitter_px * uniform_real(rng, 0.0, 1.0));
        }
        const bool dropped = uniform_real(rng, 0.0, 1.0) < deg.vertex_dropout_prob;
        if (!dropped) stamp_gaussian(scene.degraded_heatmap, pos, sigma, amplitude);
      }
    } else {
      scene.degraded_heatmap = scene.heatmap;
    }
    return scene;
  }
  throw std::runtime_error("synth_scene: failed to generate simple rings within retry bound");
}

}  // namespace polyforge

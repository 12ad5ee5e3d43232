#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "polyforge/metrics.hpp"
#include "polyforge/raster.hpp"
#include "test_util.hpp"

using namespace polyforge;

namespace {

PolygonSet single(const PolygonWithHoles& poly, int w, int h) {
  PolygonSet set;
  set.polygons.push_back(poly);
  set.width = w;
  set.height = h;
  return set;
}

int component_count(const BinaryMask& mask) {
  // 8-connected flood fill.
  std::vector<char> seen(mask.data.size(), 0);
  int components = 0;
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * mask.width + x;
      if (!mask.data[idx] || seen[idx]) continue;
      ++components;
      stack.push_back({x, y});
      seen[idx] = 1;
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx, ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= mask.width || ny >= mask.height) continue;
            const std::size_t nidx = static_cast<std::size_t>(ny) * mask.width + nx;
            if (mask.data[nidx] && !seen[nidx]) {
              seen[nidx] = 1;
              stack.push_back({nx, ny});
            }
          }
        }
      }
    }
  }
  return components;
}

}  // namespace

TEST_CASE("rasterize full-grid square and empty set") {
  const auto full = rasterize(single(PolygonWithHoles(testutil::rect(0, 0, 9, 9)), 10, 10), 10, 10);
  CHECK(full.count() == 100);
  PolygonSet empty;
  empty.width = empty.height = 8;
  CHECK(rasterize(empty, 8, 8).count() == 0);
}

TEST_CASE("rasterize annulus matches analytic area") {
  // 60x60 square with a 20x20 centered hole on pixel-edge boundaries:
  // exactly 3600 - 400 foreground pixels.
  const PolygonWithHoles annulus(testutil::rect(19.5, 19.5, 79.5, 79.5),
                                 {testutil::rect(39.5, 39.5, 59.5, 59.5)});
  const auto mask = rasterize(single(annulus, 100, 100), 100, 100);
  const double expected = 3200.0;
  CHECK(std::abs(static_cast<double>(mask.count()) - expected) / expected < 0.01);
}

TEST_CASE("rasterize reports out-of-bounds polygon index") {
  PolygonSet set;
  set.polygons.emplace_back(testutil::rect(1, 1, 5, 5));
  set.polygons.emplace_back(testutil::rect(-2, 1, 5, 5));
  try {
    rasterize(set, 10, 10);
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("polygon 1") != std::string::npos);
  }
}

TEST_CASE("render_heatmap peak values") {
  const std::vector<Point> vertices{{50, 50}};
  const auto map = render_heatmap(vertices, 100, 100, 5.0);
  CHECK(map(50, 50) == doctest::Approx(1.0));
  CHECK(map(55, 50) == doctest::Approx(std::exp(-0.5)).epsilon(1e-6));
  CHECK(map(50, 45) == doctest::Approx(std::exp(-0.5)).epsilon(1e-6));
}

TEST_CASE("render_heatmap distant peaks stay separated") {
  const std::vector<Point> vertices{{20, 60}, {120, 60}};
  const auto map = render_heatmap(vertices, 140, 120, 5.0);
  CHECK(map(20, 60) == doctest::Approx(1.0));
  CHECK(map(120, 60) == doctest::Approx(1.0));
  CHECK(map(70, 60) < 1e-8);
}

TEST_CASE("render_heatmap is permutation invariant and monotone") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(5.0, 90.0);
  std::vector<Point> pts;
  for (int i = 0; i < 8; ++i) pts.push_back({u(rng), u(rng)});
  const auto base = render_heatmap(pts, 96, 96, 5.0);
  std::vector<Point> shuffled = pts;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  CHECK(render_heatmap(shuffled, 96, 96, 5.0) == base);
  pts.push_back({u(rng), u(rng)});
  const auto more = render_heatmap(pts, 96, 96, 5.0);
  for (std::size_t i = 0; i < base.data.size(); ++i) {
    CHECK(more.data[i] >= base.data[i]);
  }
}

TEST_CASE("trace_contours on a filled square") {
  BinaryMask mask(32, 32, 0);
  for (int y = 5; y < 15; ++y) {
    for (int x = 7; x < 17; ++x) mask(x, y) = 1;
  }
  const auto set = trace_contours(mask);
  REQUIRE(set.polygons.size() == 1);
  CHECK(set.polygons[0].holes.empty());
  double minx = 1e9, maxx = -1e9, miny = 1e9, maxy = -1e9;
  for (const Point& p : set.polygons[0].exterior.points()) {
    minx = std::min(minx, p.x);
    maxx = std::max(maxx, p.x);
    miny = std::min(miny, p.y);
    maxy = std::max(maxy, p.y);
  }
  CHECK(minx == 7);
  CHECK(maxx == 16);
  CHECK(miny == 5);
  CHECK(maxy == 14);
}

TEST_CASE("trace_contours recovers annulus topology with opposite orientations") {
  BinaryMask mask(40, 40, 0);
  for (int y = 5; y < 35; ++y) {
    for (int x = 5; x < 35; ++x) mask(x, y) = 1;
  }
  for (int y = 15; y < 25; ++y) {
    for (int x = 15; x < 25; ++x) mask(x, y) = 0;
  }
  const auto set = trace_contours(mask);
  REQUIRE(set.polygons.size() == 1);
  REQUIRE(set.polygons[0].holes.size() == 1);
  CHECK(signed_area(set.polygons[0].exterior) > 0.0);
  CHECK(signed_area(set.polygons[0].holes[0]) < 0.0);
}

TEST_CASE("trace_contours separates islands inside holes") {
  BinaryMask mask(48, 48, 0);
  for (int y = 2; y < 46; ++y)
    for (int x = 2; x < 46; ++x) mask(x, y) = 1;
  for (int y = 10; y < 38; ++y)
    for (int x = 10; x < 38; ++x) mask(x, y) = 0;
  for (int y = 18; y < 30; ++y)
    for (int x = 18; x < 30; ++x) mask(x, y) = 1;
  const auto set = trace_contours(mask);
  REQUIRE(set.polygons.size() == 2);
  int with_hole = 0, without = 0;
  for (const auto& poly : set.polygons) {
    if (poly.holes.size() == 1) ++with_hole;
    if (poly.holes.empty()) ++without;
  }
  CHECK(with_hole == 1);
  CHECK(without == 1);
}

TEST_CASE("trace_contours survives every 4x4 mask") {
  // Exhaustive sweep over all 65536 configurations: checkerboards,
  // spurs, dominoes, diagonal chains. Every emitted ring must consist of
  // boundary pixels of the mask, exteriors and holes must carry opposite
  // orientation flags, and exterior count never exceeds the component
  // count.
  for (unsigned bits = 0; bits < 65536; ++bits) {
    BinaryMask mask(4, 4, 0);
    for (int i = 0; i < 16; ++i) mask.data[i] = (bits >> i) & 1;
    const auto set = trace_contours(mask);
    int exteriors = 0;
    for (const auto& poly : set.polygons) {
      ++exteriors;
      // 1-px-wide regions trace to out-and-back rings with zero area;
      // nonzero areas must carry the normalized signs.
      CHECK(signed_area(poly.exterior) >= 0.0);
      for (const Ring& hole : poly.holes) CHECK(signed_area(hole) <= 0.0);
      auto on_boundary = [&](const Point& p) {
        const int x = static_cast<int>(p.x), y = static_cast<int>(p.y);
        if (!mask(x, y)) return false;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (!mask.at_or_zero(x + dx, y + dy)) return true;
          }
        }
        return false;
      };
      for (const Point& p : poly.exterior.points()) CHECK(on_boundary(p));
      for (const Ring& hole : poly.holes) {
        for (const Point& p : hole.points()) CHECK(on_boundary(p));
      }
    }
    CHECK(exteriors <= component_count(mask));
  }
}

TEST_CASE("skeletonize contract holds on every 4x4 mask") {
  for (unsigned bits = 0; bits < 65536; ++bits) {
    BinaryMask mask(4, 4, 0);
    for (int i = 0; i < 16; ++i) mask.data[i] = (bits >> i) & 1;
    const auto skel = skeletonize(mask);
    for (std::size_t i = 0; i < mask.data.size(); ++i) {
      if (skel.data[i]) CHECK(mask.data[i] == 1);
    }
    CHECK(component_count(skel) == component_count(mask));
    CHECK(skeletonize(skel) == skel);
  }
}

TEST_CASE("trace-rasterize round trip keeps IoU high on random blobs") {
  std::mt19937_64 rng(2024);
  for (int iter = 0; iter < 12; ++iter) {
    const BinaryMask mask = testutil::random_blob_mask(rng);
    const auto traced = trace_contours(mask);
    if (traced.polygons.empty()) continue;
    const auto back = rasterize(traced, mask.width, mask.height);
    CHECK(iou(back, mask) >= 0.99);
  }
}

TEST_CASE("boundary_band basics") {
  BinaryMask empty(16, 16, 0);
  CHECK(boundary_band(empty, 3.0).count() == 0);

  BinaryMask half(40, 30, 0);
  for (int y = 0; y < 30; ++y)
    for (int x = 0; x < 20; ++x) half(x, y) = 1;
  const auto band = boundary_band(half, 3.0);
  // Boundary pixels are column 19; the band spans columns 16..22.
  for (int y = 0; y < 30; ++y) {
    for (int x = 0; x < 40; ++x) {
      const bool expected = x >= 16 && x <= 22;
      CHECK(static_cast<bool>(band(x, y)) == expected);
    }
  }

  BinaryMask dot(12, 12, 0);
  dot(6, 6) = 1;
  const auto saturated = boundary_band(dot, 20.0);
  CHECK(saturated.count() == 144);
}

TEST_CASE("distance transform is exact against brute force") {
  std::mt19937_64 rng(23);
  for (int iter = 0; iter < 5; ++iter) {
    BinaryMask seeds(24, 18, 0);
    for (int k = 0; k < 10; ++k) {
      seeds(static_cast<int>(rng() % 24), static_cast<int>(rng() % 18)) = 1;
    }
    const auto dist = squared_distance_transform(seeds);
    for (int y = 0; y < 18; ++y) {
      for (int x = 0; x < 24; ++x) {
        double best = 1e18;
        for (int sy = 0; sy < 18; ++sy) {
          for (int sx = 0; sx < 24; ++sx) {
            if (!seeds(sx, sy)) continue;
            const double dx = x - sx, dy = y - sy;
            best = std::min(best, dx * dx + dy * dy);
          }
        }
        CHECK(dist[static_cast<std::size_t>(y) * 24 + x] == doctest::Approx(best));
      }
    }
  }
}

TEST_CASE("boundary_band is monotone in distance") {
  std::mt19937_64 rng(8);
  const BinaryMask mask = testutil::random_blob_mask(rng, 64, 3);
  const auto narrow = boundary_band(mask, 2.0);
  const auto wide = boundary_band(mask, 5.0);
  for (std::size_t i = 0; i < narrow.data.size(); ++i) {
    if (narrow.data[i]) CHECK(wide.data[i] == 1);
  }
}

TEST_CASE("skeletonize thins a wide bar to its midline") {
  // A 5 x 100 bar thins to a single-pixel midline. Simultaneous
  // Zhang-Suen erodes the open ends while the width collapses: the line
  // spans columns 2 .. L-4, i.e. 95 pixels for L = 100 (derived by hand,
  // matches the implementation on all bar lengths).
  BinaryMask bar(110, 20, 0);
  for (int y = 7; y < 12; ++y)
    for (int x = 5; x < 105; ++x) bar(x, y) = 1;
  const auto skel = skeletonize(bar);
  int count = 0;
  int row = -1;
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 110; ++x) {
      if (skel(x, y)) {
        ++count;
        if (row < 0) row = y;
        CHECK(y == row);  // single-pixel horizontal line
      }
    }
  }
  CHECK(row == 9);
  CHECK(count == 95);
}

TEST_CASE("skeletonize keeps a plus-shaped junction") {
  BinaryMask plus(60, 60, 0);
  for (int y = 27; y < 33; ++y)
    for (int x = 5; x < 55; ++x) plus(x, y) = 1;
  for (int x = 27; x < 33; ++x)
    for (int y = 5; y < 55; ++y) plus(x, y) = 1;
  const auto skel = skeletonize(plus);
  // Exactly one junction neighbourhood: the degree>=3 pixels form a
  // single 8-connected cluster.
  BinaryMask junction_pixels(60, 60, 0);
  for (int y = 1; y < 59; ++y) {
    for (int x = 1; x < 59; ++x) {
      if (!skel(x, y)) continue;
      int neighbours = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          neighbours += skel(x + dx, y + dy);
        }
      if (neighbours >= 3) junction_pixels(x, y) = 1;
    }
  }
  CHECK(junction_pixels.count() >= 1);
  CHECK(component_count(junction_pixels) == 1);
  CHECK(component_count(skel) == 1);
}

TEST_CASE("skeletonize preserves component count, subset and idempotence") {
  std::mt19937_64 rng(17);
  for (int iter = 0; iter < 8; ++iter) {
    const BinaryMask mask = testutil::random_blob_mask(rng, 96, 4);
    const auto skel = skeletonize(mask);
    for (std::size_t i = 0; i < mask.data.size(); ++i) {
      if (skel.data[i]) CHECK(mask.data[i] == 1);
    }
    CHECK(component_count(skel) == component_count(mask));
    CHECK(skeletonize(skel) == skel);
  }
}

TEST_CASE("tile and stitch round trip") {
  std::mt19937_64 rng(5);
  BinaryMask grid(1024, 1024, 0);
  for (auto& v : grid.data) v = rng() & 1;
  const auto patches = tile(grid, 256);
  CHECK(patches.size() == 16);
  CHECK(patches[0].width == 256);
  CHECK(stitch_masks(patches, {4, 4}) == grid);

  const auto one = tile(grid, 1024);
  CHECK(one.size() == 1);
  CHECK(stitch_masks(one, {1, 1}) == grid);
}

TEST_CASE("tile reports a padding hint") {
  BinaryMask grid(1000, 1000, 0);
  try {
    tile(grid, 256);
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("1024x1024") != std::string::npos);
  }
}

TEST_CASE("heatmap tile/stitch round trip") {
  Heatmap map(64, 32, 0.0f);
  std::mt19937_64 rng(9);
  for (auto& v : map.data) v = static_cast<float>((rng() % 1000) / 1000.0);
  const auto patches = tile(map, 16);
  CHECK(stitch_heatmaps(patches, {2, 4}) == map);
}

TEST_CASE("downsample_mask averages coverage") {
  BinaryMask mask(8, 8, 0);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 4; ++x) mask(x, y) = 1;
  const auto down = downsample_mask(mask, 4, 4);
  for (int y = 0; y < 4; ++y) {
    CHECK(down(0, y) == 1);
    CHECK(down(1, y) == 1);
    CHECK(down(2, y) == 0);
    CHECK(down(3, y) == 0);
  }
}

TEST_CASE("downsample handles fractional ratios with area weights") {
  // 10 -> 4 (ratio 2.5): output pixel 1 covers source [2.5, 5), pixel 2
  // covers [5, 7.5); a half-filled mask splits exactly between them.
  BinaryMask mask(10, 10, 0);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 5; ++x) mask(x, y) = 1;
  const auto down = downsample_mask(mask, 4, 4);
  for (int y = 0; y < 4; ++y) {
    CHECK(down(0, y) == 1);
    CHECK(down(1, y) == 1);
    CHECK(down(2, y) == 0);
    CHECK(down(3, y) == 0);
  }
  // Mean value is conserved by the box filter.
  Heatmap map(10, 10, 0.0f);
  std::mt19937_64 rng(3);
  for (auto& v : map.data) v = static_cast<float>((rng() % 1000) / 1000.0);
  double src_mean = 0.0;
  for (float v : map.data) src_mean += v;
  src_mean /= static_cast<double>(map.data.size());
  const auto dmap = downsample_heatmap(map, 4, 4);
  double dst_mean = 0.0;
  for (float v : dmap.data) dst_mean += v;
  dst_mean /= static_cast<double>(dmap.data.size());
  CHECK(dst_mean == doctest::Approx(src_mean).epsilon(1e-6));
}

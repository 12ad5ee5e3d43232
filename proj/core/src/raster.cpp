#include "polyforge/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace polyforge {

namespace {

constexpr double kOnOutlineTol = 1e-9;

bool near_integer(double v, long& out) {
  const double r = std::round(v);
  if (std::abs(v - r) <= kOnOutlineTol) {
    out = static_cast<long>(r);
    return true;
  }
  return false;
}

// Marks every pixel center that lies exactly on the segment a-b.
void mark_outline(const Point& a, const Point& b, BinaryMask& grid) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  if (std::abs(dx) >= std::abs(dy)) {
    if (std::abs(dx) <= kOnOutlineTol) {  // a == b (should not happen)
      long x, y;
      if (near_integer(a.x, x) && near_integer(a.y, y) && x >= 0 && y >= 0 &&
          x < grid.width && y < grid.height) {
        grid(static_cast<int>(x), static_cast<int>(y)) = 1;
      }
      return;
    }
    const int x0 = static_cast<int>(std::ceil(std::min(a.x, b.x) - kOnOutlineTol));
    const int x1 = static_cast<int>(std::floor(std::max(a.x, b.x) + kOnOutlineTol));
    for (int x = std::max(x0, 0); x <= std::min(x1, grid.width - 1); ++x) {
      const double t = (x - a.x) / dx;
      const double y = a.y + t * dy;
      long yi;
      if (near_integer(y, yi) && yi >= 0 && yi < grid.height) {
        grid(x, static_cast<int>(yi)) = 1;
      }
    }
  } else {
    const int y0 = static_cast<int>(std::ceil(std::min(a.y, b.y) - kOnOutlineTol));
    const int y1 = static_cast<int>(std::floor(std::max(a.y, b.y) + kOnOutlineTol));
    for (int y = std::max(y0, 0); y <= std::min(y1, grid.height - 1); ++y) {
      const double t = (y - a.y) / dy;
      const double x = a.x + t * dx;
      long xi;
      if (near_integer(x, xi) && xi >= 0 && xi < grid.width) {
        grid(static_cast<int>(xi), y) = 1;
      }
    }
  }
}

void fill_polygon(const PolygonWithHoles& poly, BinaryMask& grid) {
  std::vector<const Ring*> rings;
  rings.push_back(&poly.exterior);
  for (const Ring& h : poly.holes) rings.push_back(&h);

  double miny = std::numeric_limits<double>::max();
  double maxy = std::numeric_limits<double>::lowest();
  for (const Point& p : poly.exterior.points()) {
    miny = std::min(miny, p.y);
    maxy = std::max(maxy, p.y);
  }
  const int row0 = std::max(0, static_cast<int>(std::floor(miny)));
  const int row1 = std::min(grid.height - 1, static_cast<int>(std::ceil(maxy)));

  std::vector<double> crossings;
  for (int row = row0; row <= row1; ++row) {
    crossings.clear();
    const double ry = static_cast<double>(row);
    for (const Ring* ring : rings) {
      const auto& pts = ring->points();
      const std::size_t n = pts.size();
      for (std::size_t i = 0; i < n; ++i) {
        const Point& a = pts[i];
        const Point& b = pts[(i + 1) % n];
        // Half-open rule: count the edge when ry is in [min, max).
        if ((a.y <= ry && ry < b.y) || (b.y <= ry && ry < a.y)) {
          crossings.push_back(a.x + (ry - a.y) * (b.x - a.x) / (b.y - a.y));
        }
      }
    }
    std::sort(crossings.begin(), crossings.end());
    for (std::size_t k = 0; k + 1 < crossings.size(); k += 2) {
      const int x0 = std::max(0, static_cast<int>(std::ceil(crossings[k])));
      const int x1 = std::min(grid.width - 1, static_cast<int>(std::floor(crossings[k + 1])));
      for (int x = x0; x <= x1; ++x) grid(x, row) = 1;
    }
  }
  for (const Ring* ring : rings) {
    const auto& pts = ring->points();
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
      mark_outline(pts[i], pts[(i + 1) % n], grid);
    }
  }
}

}  // namespace

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(
      std::accumulate(data.begin(), data.end(), static_cast<long long>(0)));
}

BinaryMask rasterize(const PolygonSet& polygons, int width, int height) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("rasterize: grid must be positive");
  BinaryMask grid(width, height, 0);
  for (std::size_t idx = 0; idx < polygons.polygons.size(); ++idx) {
    const PolygonWithHoles& poly = polygons.polygons[idx];
    auto check = [&](const Ring& ring) {
      for (const Point& p : ring.points()) {
        if (p.x < 0.0 || p.y < 0.0 || p.x > width || p.y > height) {
          throw std::invalid_argument("rasterize: polygon " + std::to_string(idx) +
                                      " has coordinates outside the grid");
        }
      }
    };
    check(poly.exterior);
    for (const Ring& h : poly.holes) check(h);

    BinaryMask local(width, height, 0);
    fill_polygon(poly, local);
    for (std::size_t i = 0; i < grid.data.size(); ++i) {
      grid.data[i] |= local.data[i];
    }
  }
  return grid;
}

Heatmap render_heatmap(std::span<const Point> vertices, int width, int height, double sigma) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("render_heatmap: grid must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("render_heatmap: sigma must be > 0");
  Heatmap map(width, height, 0.0f);
  const double radius = 4.0 * sigma;
  const double radius_sq = radius * radius;
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (const Point& v : vertices) {
    const int x0 = std::max(0, static_cast<int>(std::ceil(v.x - radius)));
    const int x1 = std::min(width - 1, static_cast<int>(std::floor(v.x + radius)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(v.y - radius)));
    const int y1 = std::min(height - 1, static_cast<int>(std::floor(v.y + radius)));
    for (int y = y0; y <= y1; ++y) {
      const double dy = y - v.y;
      for (int x = x0; x <= x1; ++x) {
        const double dx = x - v.x;
        const double d2 = dx * dx + dy * dy;
        if (d2 > radius_sq) continue;
        const float g = static_cast<float>(std::min(1.0, std::exp(-d2 * inv)));
        float& cell = map(x, y);
        if (g > cell) cell = g;
      }
    }
  }
  return map;
}

BinaryMask boundary_pixels(const BinaryMask& mask) {
  BinaryMask out(mask.width, mask.height, 0);
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask(x, y)) continue;
      const bool edge = (x > 0 && !mask(x - 1, y)) || (x + 1 < mask.width && !mask(x + 1, y)) ||
                        (y > 0 && !mask(x, y - 1)) || (y + 1 < mask.height && !mask(x, y + 1));
      if (edge) out(x, y) = 1;
    }
  }
  return out;
}

namespace {

constexpr double kEdtInf = 1e18;

// 1-D squared distance transform (lower envelope of parabolas).
void edt_1d(const double* f, double* d, int n, int* v, double* z) {
  int k = 0;
  v[0] = 0;
  z[0] = -kEdtInf;
  z[1] = kEdtInf;
  for (int q = 1; q < n; ++q) {
    double s;
    while (true) {
      const int p = v[k];
      s = ((f[q] + q * static_cast<double>(q)) - (f[p] + p * static_cast<double>(p))) /
          (2.0 * (q - p));
      if (s <= z[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kEdtInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const int p = v[k];
    const double diff = q - p;
    d[q] = diff * diff + f[p];
  }
}

}  // namespace

std::vector<double> squared_distance_transform(const BinaryMask& seeds) {
  const int w = seeds.width;
  const int h = seeds.height;
  std::vector<double> dist(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < dist.size(); ++i) {
    dist[i] = seeds.data[i] ? 0.0 : kEdtInf;
  }
  const int n = std::max(w, h);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);
  // Columns, then rows.
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) f[y] = dist[static_cast<std::size_t>(y) * w + x];
    edt_1d(f.data(), d.data(), h, v.data(), z.data());
    for (int y = 0; y < h; ++y) dist[static_cast<std::size_t>(y) * w + x] = d[y];
  }
  for (int y = 0; y < h; ++y) {
    double* row = dist.data() + static_cast<std::size_t>(y) * w;
    std::copy(row, row + w, f.data());
    edt_1d(f.data(), d.data(), w, v.data(), z.data());
    std::copy(d.data(), d.data() + w, row);
  }
  return dist;
}

BinaryMask boundary_band(const BinaryMask& mask, double d) {
  if (!(d > 0.0)) throw std::invalid_argument("boundary_band: d must be > 0");
  const BinaryMask boundary = boundary_pixels(mask);
  BinaryMask band(mask.width, mask.height, 0);
  if (boundary.count() == 0) return band;
  const std::vector<double> dist = squared_distance_transform(boundary);
  const double d2 = d * d;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    band.data[i] = dist[i] <= d2 ? 1 : 0;
  }
  return band;
}

BinaryMask skeletonize(const BinaryMask& mask) {
  const int w = mask.width;
  const int h = mask.height;
  // Work on a 1-px zero-padded copy so neighbour reads are unchecked.
  const int pw = w + 2;
  const int ph = h + 2;
  std::vector<std::uint8_t> grid(static_cast<std::size_t>(pw) * ph, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      grid[static_cast<std::size_t>(y + 1) * pw + (x + 1)] = mask(x, y);
    }
  }
  std::vector<std::size_t> deletions;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int phase = 0; phase < 2; ++phase) {
      deletions.clear();
      for (int y = 1; y <= h; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * pw;
        for (int x = 1; x <= w; ++x) {
          const std::size_t idx = row + x;
          if (!grid[idx]) continue;
          const int p2 = grid[idx - pw];
          const int p3 = grid[idx - pw + 1];
          const int p4 = grid[idx + 1];
          const int p5 = grid[idx + pw + 1];
          const int p6 = grid[idx + pw];
          const int p7 = grid[idx + pw - 1];
          const int p8 = grid[idx - 1];
          const int p9 = grid[idx - pw - 1];
          const int b = p2 + p3 + p4 + p5 + p6 + p7 + p8 + p9;
          if (b < 2 || b > 6) continue;
          const int a = (p2 == 0 && p3 == 1) + (p3 == 0 && p4 == 1) + (p4 == 0 && p5 == 1) +
                        (p5 == 0 && p6 == 1) + (p6 == 0 && p7 == 1) + (p7 == 0 && p8 == 1) +
                        (p8 == 0 && p9 == 1) + (p9 == 0 && p2 == 1);
          if (a != 1) continue;
          const bool ok = phase == 0 ? (p2 * p4 * p6 == 0 && p4 * p6 * p8 == 0)
                                     : (p2 * p4 * p8 == 0 && p2 * p6 * p8 == 0);
          if (ok) deletions.push_back(idx);
        }
      }
      if (!deletions.empty()) {
        changed = true;
        for (std::size_t idx : deletions) grid[idx] = 0;
      }
    }
  }
  BinaryMask out(w, h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      out(x, y) = grid[static_cast<std::size_t>(y + 1) * pw + (x + 1)];
    }
  }

  // Zhang-Suen can annihilate tiny remnants (a 2x2 block satisfies both
  // sub-iteration conditions at once), which would lose a component.
  // Restore one innermost pixel for every input component that lost all
  // of its skeleton pixels.
  std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
  int components = 0;
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      if (!mask.data[idx] || label[idx] >= 0) continue;
      const int id = components++;
      label[idx] = id;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx, ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
            if (mask.data[nidx] && label[nidx] < 0) {
              label[nidx] = id;
              stack.push_back({nx, ny});
            }
          }
        }
      }
    }
  }
  std::vector<char> alive(components, 0);
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    if (out.data[i]) alive[label[i]] = 1;
  }
  bool all_alive = true;
  for (char a : alive) all_alive &= a != 0;
  if (!all_alive) {
    BinaryMask background(w, h, 0);
    for (std::size_t i = 0; i < background.data.size(); ++i) {
      background.data[i] = mask.data[i] ? 0 : 1;
    }
    const std::vector<double> depth = squared_distance_transform(background);
    std::vector<std::size_t> best(components, 0);
    std::vector<double> best_depth(components, -1.0);
    for (std::size_t i = 0; i < mask.data.size(); ++i) {
      if (!mask.data[i]) continue;
      const int id = label[i];
      if (!alive[id] && depth[i] > best_depth[id]) {
        best_depth[id] = depth[i];
        best[id] = i;
      }
    }
    for (int id = 0; id < components; ++id) {
      if (!alive[id]) out.data[best[id]] = 1;
    }
  }
  return out;
}

namespace {

template <typename Grid>
std::vector<Grid> tile_impl(const Grid& grid, int patch_size) {
  if (patch_size <= 0) throw std::invalid_argument("tile: patch_size must be > 0");
  if (grid.width % patch_size != 0 || grid.height % patch_size != 0) {
    const int padw = (grid.width + patch_size - 1) / patch_size * patch_size;
    const int padh = (grid.height + patch_size - 1) / patch_size * patch_size;
    throw std::invalid_argument(
        "tile: grid " + std::to_string(grid.width) + "x" + std::to_string(grid.height) +
        " is not divisible by " + std::to_string(patch_size) + "; pad to " +
        std::to_string(padw) + "x" + std::to_string(padh));
  }
  const int cols = grid.width / patch_size;
  const int rows = grid.height / patch_size;
  std::vector<Grid> patches;
  patches.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      Grid patch(patch_size, patch_size);
      for (int y = 0; y < patch_size; ++y) {
        for (int x = 0; x < patch_size; ++x) {
          patch(x, y) = grid(c * patch_size + x, r * patch_size + y);
        }
      }
      patches.push_back(std::move(patch));
    }
  }
  return patches;
}

template <typename Grid>
Grid stitch_impl(const std::vector<Grid>& patches, GridLayout layout) {
  if (layout.rows <= 0 || layout.cols <= 0) {
    throw std::invalid_argument("stitch: layout must be positive");
  }
  if (patches.size() != static_cast<std::size_t>(layout.rows) * layout.cols) {
    throw std::invalid_argument("stitch: expected " +
                                std::to_string(layout.rows * layout.cols) + " patches, got " +
                                std::to_string(patches.size()));
  }
  const int pw = patches.front().width;
  const int ph = patches.front().height;
  for (const Grid& p : patches) {
    if (p.width != pw || p.height != ph) {
      throw std::invalid_argument("stitch: patches must have uniform dimensions");
    }
  }
  Grid out(pw * layout.cols, ph * layout.rows);
  for (int r = 0; r < layout.rows; ++r) {
    for (int c = 0; c < layout.cols; ++c) {
      const Grid& patch = patches[static_cast<std::size_t>(r) * layout.cols + c];
      for (int y = 0; y < ph; ++y) {
        for (int x = 0; x < pw; ++x) {
          out(c * pw + x, r * ph + y) = patch(x, y);
        }
      }
    }
  }
  return out;
}

// Mean source value over the box covered by each output pixel, with
// fractional edge weights.
std::vector<double> box_average(const std::vector<double>& src, int in_w, int in_h,
                                int out_w, int out_h) {
  std::vector<double> out(static_cast<std::size_t>(out_w) * out_h, 0.0);
  const double sx = static_cast<double>(in_w) / out_w;
  const double sy = static_cast<double>(in_h) / out_h;
  for (int oy = 0; oy < out_h; ++oy) {
    const double y0 = oy * sy;
    const double y1 = (oy + 1) * sy;
    for (int ox = 0; ox < out_w; ++ox) {
      const double x0 = ox * sx;
      const double x1 = (ox + 1) * sx;
      double acc = 0.0;
      for (int y = static_cast<int>(std::floor(y0)); y < static_cast<int>(std::ceil(y1)); ++y) {
        const double wy = std::min<double>(y + 1, y1) - std::max<double>(y, y0);
        if (wy <= 0.0) continue;
        for (int x = static_cast<int>(std::floor(x0)); x < static_cast<int>(std::ceil(x1)); ++x) {
          const double wx = std::min<double>(x + 1, x1) - std::max<double>(x, x0);
          if (wx <= 0.0) continue;
          acc += wx * wy * src[static_cast<std::size_t>(y) * in_w + x];
        }
      }
      out[static_cast<std::size_t>(oy) * out_w + ox] = acc / (sx * sy);
    }
  }
  return out;
}

}  // namespace

std::vector<BinaryMask> tile(const BinaryMask& grid, int patch_size) {
  return tile_impl(grid, patch_size);
}
std::vector<Heatmap> tile(const Heatmap& grid, int patch_size) {
  return tile_impl(grid, patch_size);
}
BinaryMask stitch_masks(const std::vector<BinaryMask>& patches, GridLayout layout) {
  return stitch_impl(patches, layout);
}
Heatmap stitch_heatmaps(const std::vector<Heatmap>& patches, GridLayout layout) {
  return stitch_impl(patches, layout);
}

BinaryMask downsample_mask(const BinaryMask& mask, int out_width, int out_height) {
  if (out_width <= 0 || out_height <= 0 || out_width > mask.width || out_height > mask.height) {
    throw std::invalid_argument("downsample_mask: invalid output size");
  }
  std::vector<double> src(mask.data.begin(), mask.data.end());
  const auto avg = box_average(src, mask.width, mask.height, out_width, out_height);
  BinaryMask out(out_width, out_height, 0);
  for (std::size_t i = 0; i < avg.size(); ++i) out.data[i] = avg[i] >= 0.5 ? 1 : 0;
  return out;
}

Heatmap downsample_heatmap(const Heatmap& heatmap, int out_width, int out_height) {
  if (out_width <= 0 || out_height <= 0 || out_width > heatmap.width ||
      out_height > heatmap.height) {
    throw std::invalid_argument("downsample_heatmap: invalid output size");
  }
  std::vector<double> src(heatmap.data.begin(), heatmap.data.end());
  const auto avg = box_average(src, heatmap.width, heatmap.height, out_width, out_height);
  Heatmap out(out_width, out_height, 0.0f);
  for (std::size_t i = 0; i < avg.size(); ++i) out.data[i] = static_cast<float>(avg[i]);
  return out;
}

}  // namespace polyforge

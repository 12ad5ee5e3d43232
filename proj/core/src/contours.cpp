#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <vector>

#include "polyforge/raster.hpp"

namespace polyforge {

namespace {

// Clockwise 8-neighbourhood on screen (y grows downward), starting east.
constexpr int kDx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kDy[8] = {0, 1, 1, 1, 0, -1, -1, -1};

int direction_of(int from_x, int from_y, int to_x, int to_y) {
  const int dx = to_x - from_x;
  const int dy = to_y - from_y;
  for (int d = 0; d < 8; ++d) {
    if (kDx[d] == dx && kDy[d] == dy) return d;
  }
  return -1;
}

struct Border {
  bool hole = false;
  int parent = 0;
  std::vector<Point> pts;
};

}  // namespace

// Border following after Suzuki & Abe: one raster scan starts a trace at
// every untraced outer/hole border, marks traced pixels with +/-id so a
// border is never started twice, and derives the nesting tree from the
// id of the border last crossed on the current row (LNBD).
PolygonSet trace_contours(const BinaryMask& mask) {
  const int w = mask.width;
  const int h = mask.height;
  PolygonSet result;
  result.width = w;
  result.height = h;
  if (w == 0 || h == 0) return result;

  const int pw = w + 2;
  const int ph = h + 2;
  std::vector<int> f(static_cast<std::size_t>(pw) * ph, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      f[static_cast<std::size_t>(y + 1) * pw + (x + 1)] = mask(x, y);
    }
  }
  auto cell = [&](int x, int y) -> int& { return f[static_cast<std::size_t>(y) * pw + x]; };

  std::vector<Border> borders(2);
  borders[1].hole = true;  // the frame

  for (int y = 1; y <= h; ++y) {
    int lnbd = 1;
    for (int x = 1; x <= w; ++x) {
      const int fij = cell(x, y);
      if (fij == 0) continue;

      bool start_outer = false;
      bool start_hole = false;
      int from_x = 0, from_y = 0;
      if (fij == 1 && cell(x - 1, y) == 0) {
        start_outer = true;
        from_x = x - 1;
        from_y = y;
      } else if (fij >= 1 && cell(x + 1, y) == 0) {
        start_hole = true;
        from_x = x + 1;
        from_y = y;
        if (fij > 1) lnbd = fij;
      }

      if (start_outer || start_hole) {
        const int id = static_cast<int>(borders.size());
        Border border;
        border.hole = start_hole;
        const Border& last = borders[lnbd];
        border.parent = (border.hole == last.hole) ? last.parent : lnbd;

        // 3.1: clockwise search around the start pixel.
        int dir0 = direction_of(x, y, from_x, from_y);
        int found = -1;
        for (int k = 0; k < 8; ++k) {
          const int d = (dir0 + k) & 7;
          if (cell(x + kDx[d], y + kDy[d]) != 0) {
            found = d;
            break;
          }
        }
        if (found < 0) {
          cell(x, y) = -id;
          border.pts.push_back(Point{static_cast<double>(x - 1), static_cast<double>(y - 1)});
          borders.push_back(std::move(border));
        } else {
          int i1x = x + kDx[found], i1y = y + kDy[found];
          int i2x = i1x, i2y = i1y;
          int i3x = x, i3y = y;
          while (true) {
            // 3.3: counter-clockwise search around (i3), skipping (i2).
            const int back = direction_of(i3x, i3y, i2x, i2y);
            bool east_zero = false;
            int next = -1;
            for (int k = 1; k <= 8; ++k) {
              const int d = (back - k) & 7;
              if (cell(i3x + kDx[d], i3y + kDy[d]) != 0) {
                next = d;
                break;
              }
              if (d == 0) east_zero = true;
            }
            // 3.4: mark and emit the current border pixel.
            if (east_zero) {
              cell(i3x, i3y) = -id;
            } else if (cell(i3x, i3y) == 1) {
              cell(i3x, i3y) = id;
            }
            border.pts.push_back(
                Point{static_cast<double>(i3x - 1), static_cast<double>(i3y - 1)});
            const int i4x = i3x + kDx[next], i4y = i3y + kDy[next];
            if (i4x == x && i4y == y && i3x == i1x && i3y == i1y) break;
            i2x = i3x;
            i2y = i3y;
            i3x = i4x;
            i3y = i4y;
          }
          borders.push_back(std::move(border));
        }
      }

      if (cell(x, y) != 1) lnbd = std::abs(cell(x, y));
    }
  }

  // Assemble polygons: outer borders become exteriors, hole borders
  // attach to their parent outer border. Degenerate borders (fewer than
  // three distinct pixels) are skipped.
  auto make_ring = [](std::vector<Point> pts, bool want_positive) -> std::optional<Ring> {
    if (pts.size() < 3) return std::nullopt;
    try {
      Ring ring(std::move(pts));
      if (want_positive ? signed_area(ring) < 0.0 : signed_area(ring) > 0.0) ring.reverse();
      return ring;
    } catch (const std::invalid_argument&) {
      return std::nullopt;
    }
  };
  std::vector<int> poly_of_border(borders.size(), -1);
  for (std::size_t id = 2; id < borders.size(); ++id) {
    Border& b = borders[id];
    if (b.hole) continue;
    auto ring = make_ring(std::move(b.pts), true);
    if (!ring) continue;
    poly_of_border[id] = static_cast<int>(result.polygons.size());
    result.polygons.emplace_back(std::move(*ring));
  }
  for (std::size_t id = 2; id < borders.size(); ++id) {
    Border& b = borders[id];
    if (!b.hole) continue;
    const int parent = b.parent;
    if (parent < 2 || poly_of_border[parent] < 0) continue;
    auto ring = make_ring(std::move(b.pts), false);
    if (!ring) continue;
    result.polygons[poly_of_border[parent]].holes.push_back(std::move(*ring));
  }
  return result;
}

}  // namespace polyforge

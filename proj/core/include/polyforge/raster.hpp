#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "polyforge/geometry.hpp"

namespace polyforge {

/// Row-major binary grid. Values are 0 or 1.
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  BinaryMask() = default;
  BinaryMask(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t operator()(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t& operator()(int x, int y) {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  /// Bounds-checked read; out-of-grid pixels are background.
  std::uint8_t at_or_zero(int x, int y) const {
    if (x < 0 || y < 0 || x >= width || y >= height) return 0;
    return (*this)(x, y);
  }
  std::size_t count() const;

  bool operator==(const BinaryMask&) const = default;
};

/// Row-major real-valued grid with values in [0, 1].
struct Heatmap {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  Heatmap() = default;
  Heatmap(int w, int h, float fill = 0.0f)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  float operator()(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  float& operator()(int x, int y) {
    return data[static_cast<std::size_t>(y) * width + x];
  }

  bool operator==(const Heatmap&) const = default;
};

/// Rasterizes polygons onto a w x h grid. A pixel is foreground iff its
/// center lies inside an exterior and not strictly inside a hole
/// (even-odd rule); centers exactly on a ring outline count as inside,
/// so traced contours re-rasterize onto their source pixels.
/// Throws std::invalid_argument naming the offending polygon index when
/// coordinates fall outside [0, w] x [0, h].
BinaryMask rasterize(const PolygonSet& polygons, int width, int height);

/// Renders a vertex likelihood map: each vertex contributes a Gaussian
/// peak exp(-d^2 / (2 sigma^2)) with amplitude 1 at the vertex.
/// Overlapping contributions combine by per-pixel maximum. Gaussians are
/// truncated at 4 sigma (tail error < 3.4e-4).
Heatmap render_heatmap(std::span<const Point> vertices, int width, int height,
                       double sigma = 5.0);

/// Traces every connected foreground region (8-connected foreground over
/// 4-connected background) into a dense polygon: one point per boundary
/// pixel, ordered along the border, exterior ring plus hole rings with
/// correct nesting. Regions whose border degenerates to fewer than three
/// distinct pixels are skipped. Exterior rings come out with positive
/// signed area, holes negative.
PolygonSet trace_contours(const BinaryMask& mask);

/// Foreground pixels with at least one 4-connected background neighbour
/// inside the grid (the image border does not count as background).
BinaryMask boundary_pixels(const BinaryMask& mask);

/// Exact squared Euclidean distance to the nearest seed pixel (value 1)
/// for every pixel, computed with the two-pass separable lower-envelope
/// transform. Pixels with no seed anywhere get a huge finite value.
std::vector<double> squared_distance_transform(const BinaryMask& seeds);

/// Pixels within Euclidean distance d of any boundary pixel of the mask.
BinaryMask boundary_band(const BinaryMask& mask, double d);

/// Zhang-Suen morphological thinning to a 1-px-wide skeleton. The output
/// is a subset of the input and preserves per-component connectivity;
/// the result is a fixpoint, so the operation is idempotent.
BinaryMask skeletonize(const BinaryMask& mask);

/// Patch grid layout, row-major patch order.
struct GridLayout {
  int rows = 0;
  int cols = 0;
};

/// Splits a grid into patch_size x patch_size tiles, row-major. Throws
/// std::invalid_argument with a padding hint when the dimensions are not
/// divisible by patch_size.
std::vector<BinaryMask> tile(const BinaryMask& grid, int patch_size);
std::vector<Heatmap> tile(const Heatmap& grid, int patch_size);

/// Reassembles row-major uniform patches; inverse of tile.
BinaryMask stitch_masks(const std::vector<BinaryMask>& patches, GridLayout layout);
Heatmap stitch_heatmaps(const std::vector<Heatmap>& patches, GridLayout layout);

/// Area-averaging downsample. Masks are re-thresholded at 0.5 coverage.
BinaryMask downsample_mask(const BinaryMask& mask, int out_width, int out_height);
Heatmap downsample_heatmap(const Heatmap& heatmap, int out_width, int out_height);

}  // namespace polyforge

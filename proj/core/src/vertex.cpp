#include "polyforge/vertex.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace polyforge {

std::vector<Point> VertexSet::locations() const {
  std::vector<Point> pts;
  pts.reserve(vertices.size());
  for (const ScoredVertex& v : vertices) pts.push_back(v.position);
  return pts;
}

VertexSet nms_peaks(const Heatmap& heatmap, double threshold, int window) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("nms_peaks: threshold must be in (0, 1)");
  }
  if (window < 3 || window % 2 == 0) {
    throw std::invalid_argument("nms_peaks: window must be odd and >= 3");
  }
  const int half = window / 2;
  const int w = heatmap.width;
  const int h = heatmap.height;
  VertexSet out;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float v = heatmap(x, y);
      if (v < threshold) continue;
      const std::size_t self = static_cast<std::size_t>(y) * w + x;
      bool is_peak = true;
      const int y0 = std::max(0, y - half), y1 = std::min(h - 1, y + half);
      const int x0 = std::max(0, x - half), x1 = std::min(w - 1, x + half);
      for (int ny = y0; ny <= y1 && is_peak; ++ny) {
        for (int nx = x0; nx <= x1; ++nx) {
          const float q = heatmap(nx, ny);
          if (q > v) {
            is_peak = false;
            break;
          }
          if (q == v) {
            const std::size_t other = static_cast<std::size_t>(ny) * w + nx;
            if (other < self) {
              is_peak = false;
              break;
            }
          }
        }
      }
      if (is_peak) {
        out.vertices.push_back(
            {Point{static_cast<double>(x), static_cast<double>(y)}, static_cast<double>(v)});
      }
    }
  }
  return out;
}

PrResult vertex_pr(const VertexSet& pred, const VertexSet& truth, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("vertex_pr: radius must be > 0");
  const std::size_t np = pred.size();
  const std::size_t nt = truth.size();
  struct Pair {
    double dist;
    std::size_t p, t;
  };
  std::vector<Pair> pairs;
  const double r2 = radius * radius;
  for (std::size_t p = 0; p < np; ++p) {
    for (std::size_t t = 0; t < nt; ++t) {
      const double d2 = distance_sq(pred.vertices[p].position, truth.vertices[t].position);
      if (d2 <= r2) pairs.push_back({std::sqrt(d2), p, t});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return std::tie(a.dist, a.p, a.t) < std::tie(b.dist, b.p, b.t);
  });
  std::vector<char> used_p(np, 0), used_t(nt, 0);
  int matched = 0;
  for (const Pair& pr : pairs) {
    if (used_p[pr.p] || used_t[pr.t]) continue;
    used_p[pr.p] = used_t[pr.t] = 1;
    ++matched;
  }
  PrResult res;
  res.matched = matched;
  res.precision = np == 0 ? (nt == 0 ? 1.0 : 0.0) : static_cast<double>(matched) / np;
  res.recall = nt == 0 ? (np == 0 ? 1.0 : 0.0) : static_cast<double>(matched) / nt;
  return res;
}

}  // namespace polyforge

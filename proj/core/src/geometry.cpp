#include "polyforge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace polyforge {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool finite_point(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

// Squared perpendicular distance from p to the chord a-b. Falls back to
// the distance to a when the chord is degenerate (closed-chain cuts).
double chord_dist_sq(Point p, Point a, Point b) {
  const double ux = b.x - a.x;
  const double uy = b.y - a.y;
  const double len2 = ux * ux + uy * uy;
  if (len2 <= 0.0) {
    return distance_sq(p, a);
  }
  const double cross = (p.x - a.x) * uy - (p.y - a.y) * ux;
  return cross * cross / len2;
}

int orientation_sign(Point a, Point b, Point c) {
  const double cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  if (cross > 0.0) return 1;
  if (cross < 0.0) return -1;
  return 0;
}

bool on_segment(Point a, Point b, Point p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

// Inclusive segment intersection: touching endpoints count.
bool segments_intersect(Point p1, Point p2, Point q1, Point q2) {
  const int o1 = orientation_sign(p1, p2, q1);
  const int o2 = orientation_sign(p1, p2, q2);
  const int o3 = orientation_sign(q1, q2, p1);
  const int o4 = orientation_sign(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

}  // namespace

Ring::Ring(std::vector<Point> points) : points_(std::move(points)) {
  for (const Point& p : points_) {
    if (!finite_point(p)) throw std::invalid_argument("ring point is not finite");
  }
  // Drop consecutive duplicates, then the wrap-around duplicate.
  std::vector<Point> clean;
  clean.reserve(points_.size());
  for (const Point& p : points_) {
    if (clean.empty() || distance(clean.back(), p) > kDuplicateTol) {
      clean.push_back(p);
    }
  }
  while (clean.size() > 1 && distance(clean.front(), clean.back()) <= kDuplicateTol) {
    clean.pop_back();
  }
  if (clean.size() < 3) throw std::invalid_argument("ring needs at least 3 distinct points");
  points_ = std::move(clean);
}

void Ring::reverse() { std::reverse(points_.begin(), points_.end()); }

double turn_angle(const Ring& ring, std::size_t index) {
  const auto& pts = ring.points();
  const std::size_t n = pts.size();
  if (index >= n) throw std::out_of_range("turn_angle: index out of range");
  const Point& prev = pts[(index + n - 1) % n];
  const Point& cur = pts[index];
  const Point& next = pts[(index + 1) % n];
  const double ax = prev.x - cur.x;
  const double ay = prev.y - cur.y;
  const double bx = next.x - cur.x;
  const double by = next.y - cur.y;
  const double la = std::sqrt(ax * ax + ay * ay);
  const double lb = std::sqrt(bx * bx + by * by);
  if (la <= Ring::kDuplicateTol || lb <= Ring::kDuplicateTol) {
    throw std::invalid_argument("degenerate edge");
  }
  double c = (ax * bx + ay * by) / (la * lb);
  c = std::clamp(c, -1.0, 1.0);
  return std::acos(c) * 180.0 / kPi;
}

double turn_deviation(const Ring& ring, std::size_t index) {
  return std::abs(180.0 - turn_angle(ring, index));
}

namespace {

std::vector<std::size_t> dp_kept_indices(const std::vector<Point>& points, double epsilon) {
  const std::size_t n = points.size();
  if (n < 2) return {};
  std::vector<char> keep(n, 0);
  keep.front() = 1;
  keep.back() = 1;
  const double eps2 = epsilon * epsilon;
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  stack.emplace_back(0, n - 1);
  while (!stack.empty()) {
    const auto [a, b] = stack.back();
    stack.pop_back();
    if (b - a < 2) continue;
    std::size_t split = a;
    double best = -1.0;
    for (std::size_t i = a + 1; i < b; ++i) {
      const double d = chord_dist_sq(points[i], points[a], points[b]);
      if (d > best) {
        best = d;
        split = i;
      }
    }
    if (best > eps2) {
      keep[split] = 1;
      stack.emplace_back(a, split);
      stack.emplace_back(split, b);
    }
  }
  std::vector<std::size_t> indices;
  indices.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) indices.push_back(i);
  }
  return indices;
}

}  // namespace

std::vector<Point> simplify_dp(const std::vector<Point>& points, double epsilon) {
  if (points.size() < 2) throw std::invalid_argument("simplify_dp: need at least 2 points");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("simplify_dp: epsilon must be >= 0");
  const auto indices = dp_kept_indices(points, epsilon);
  std::vector<Point> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(points[i]);
  return out;
}

std::vector<std::size_t> simplify_ring_dp_indices(const Ring& ring, double epsilon) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("simplify_ring_dp_indices: epsilon must be >= 0");
  const auto& pts = ring.points();
  std::vector<Point> chain(pts);
  chain.push_back(pts.front());
  auto indices = dp_kept_indices(chain, epsilon);
  if (!indices.empty() && indices.back() == chain.size() - 1) indices.pop_back();
  return indices;
}

Ring remove_collinear(const Ring& ring) {
  const auto& pts = ring.points();
  const std::size_t n = pts.size();
  std::vector<Point> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point& prev = pts[(i + n - 1) % n];
    const Point& cur = pts[i];
    const Point& next = pts[(i + 1) % n];
    const double cross =
        (cur.x - prev.x) * (next.y - cur.y) - (cur.y - prev.y) * (next.x - cur.x);
    const double dot =
        (prev.x - cur.x) * (next.x - cur.x) + (prev.y - cur.y) * (next.y - cur.y);
    // Keep the vertex unless the edges continue straight through it.
    if (std::abs(cross) > 1e-9 || dot > 0.0) out.push_back(cur);
  }
  return Ring(std::move(out));
}

bool is_simple(const Ring& ring) {
  const auto& pts = ring.points();
  const std::size_t n = pts.size();

  // Adjacent edges: reject collinear backtracking past the shared vertex.
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = pts[i];
    const Point& b = pts[(i + 1) % n];
    const Point& c = pts[(i + 2) % n];
    if (orientation_sign(a, b, c) == 0) {
      const double dot = (a.x - b.x) * (c.x - b.x) + (a.y - b.y) * (c.y - b.y);
      if (dot > 0.0) return false;
    }
  }

  // Non-adjacent edges, pruned by x-interval overlap.
  struct EdgeBox {
    double minx, maxx, miny, maxy;
    std::size_t i;
  };
  std::vector<EdgeBox> boxes(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = pts[i];
    const Point& b = pts[(i + 1) % n];
    boxes[i] = {std::min(a.x, b.x), std::max(a.x, b.x),
                std::min(a.y, b.y), std::max(a.y, b.y), i};
  }
  std::sort(boxes.begin(), boxes.end(),
            [](const EdgeBox& l, const EdgeBox& r) { return l.minx < r.minx; });
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      if (boxes[k].minx > boxes[j].maxx) break;
      if (boxes[k].miny > boxes[j].maxy || boxes[j].miny > boxes[k].maxy) continue;
      const std::size_t ei = boxes[j].i;
      const std::size_t ej = boxes[k].i;
      const std::size_t lo = std::min(ei, ej);
      const std::size_t hi = std::max(ei, ej);
      const bool adjacent = (hi - lo == 1) || (lo == 0 && hi == n - 1);
      if (adjacent) continue;
      if (segments_intersect(pts[ei], pts[(ei + 1) % n], pts[ej], pts[(ej + 1) % n])) {
        return false;
      }
    }
  }
  return true;
}

double signed_area(const Ring& ring) {
  const auto& pts = ring.points();
  const std::size_t n = pts.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = pts[i];
    const Point& b = pts[(i + 1) % n];
    sum += a.x * b.y - b.x * a.y;
  }
  return 0.5 * sum;
}

PolygonWithHoles::PolygonWithHoles(Ring exterior_ring, std::vector<Ring> hole_rings)
    : exterior(std::move(exterior_ring)), holes(std::move(hole_rings)) {
  if (signed_area(exterior) < 0.0) exterior.reverse();
  for (Ring& hole : holes) {
    if (signed_area(hole) > 0.0) hole.reverse();
  }
}

bool point_in_ring(const Ring& ring, Point p) {
  const auto& pts = ring.points();
  const std::size_t n = pts.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = pts[i];
    const Point& b = pts[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

void validate_polygon(const PolygonWithHoles& polygon) {
  if (!is_simple(polygon.exterior)) {
    throw std::invalid_argument("polygon exterior ring is not simple");
  }
  for (const Ring& hole : polygon.holes) {
    if (!is_simple(hole)) throw std::invalid_argument("polygon hole ring is not simple");
    for (const Point& p : hole.points()) {
      if (!point_in_ring(polygon.exterior, p)) {
        throw std::invalid_argument("polygon hole extends outside the exterior");
      }
    }
  }
}

long PolygonSet::total_vertices() const {
  long total = 0;
  for (const PolygonWithHoles& poly : polygons) {
    total += static_cast<long>(poly.exterior.size());
    for (const Ring& hole : poly.holes) total += static_cast<long>(hole.size());
  }
  return total;
}

}  // namespace polyforge

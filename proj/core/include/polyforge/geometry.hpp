#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace polyforge {

/// Planar point in pixel coordinates. The frame follows the image
/// convention: origin at the top-left pixel center, x grows right,
/// y grows downward. Integer coordinates are pixel centers.
struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance_sq(Point a, Point b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline double distance(Point a, Point b) { return std::sqrt(distance_sq(a, b)); }

/// Closed polygonal ring. The edge from the last point back to the first
/// is implicit. Construction removes consecutive duplicates (closer than
/// kDuplicateTol, including the wrap-around pair) and requires at least
/// three surviving points; coordinates must be finite.
class Ring {
 public:
  static constexpr double kDuplicateTol = 1e-9;

  explicit Ring(std::vector<Point> points);

  const std::vector<Point>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  const Point& operator[](std::size_t i) const { return points_[i]; }

  /// Reverses the point order in place (flips orientation).
  void reverse();

 private:
  std::vector<Point> points_;
};

/// Interior angle at ring vertex `index` in degrees, in [0, 180].
/// This is the undirected angle between the rays from the vertex to its
/// two neighbours; 180 means the edges continue straight through.
/// Throws std::invalid_argument("degenerate edge") if either adjacent
/// edge has (near-)zero length.
double turn_angle(const Ring& ring, std::size_t index);

/// |180 - turn_angle|: deviation from a straight-through vertex.
double turn_deviation(const Ring& ring, std::size_t index);

/// Douglas-Peucker simplification of an open polyline using perpendicular
/// distance to the chord through the segment endpoints. The result is a
/// subsequence of the input that always contains both endpoints; every
/// dropped point lies within `epsilon` of the simplified chain.
/// epsilon == 0 removes exactly collinear interior points.
std::vector<Point> simplify_dp(const std::vector<Point>& points, double epsilon);

/// Douglas-Peucker over a closed ring. The ring is cut open at index 0,
/// which therefore always survives. Returns the kept indices in
/// increasing order (never empty; index 0 is always first).
std::vector<std::size_t> simplify_ring_dp_indices(const Ring& ring, double epsilon);

/// Drops ring vertices whose adjacent edges are collinear (turn of 180
/// degrees within a small tolerance). Used to reduce traced rectilinear
/// contours to their corner set.
Ring remove_collinear(const Ring& ring);

/// True iff no two non-adjacent edges intersect and adjacent edges meet
/// only at their shared vertex (no collinear backtracking).
bool is_simple(const Ring& ring);

/// Shoelace area of the ring in square pixels. Positive when the ring
/// winds counter-clockwise in standard axes (x right, y up); in the
/// y-down image frame a positive ring appears clockwise on screen.
double signed_area(const Ring& ring);

/// A polygon with optional interior holes. Construction normalizes
/// orientations: the exterior gets positive signed area, holes negative,
/// so exterior and hole flags are always mutually opposite. Rings are
/// expected to be simple and holes contained in the exterior; deep
/// validation is left to validate_polygon().
struct PolygonWithHoles {
  Ring exterior;
  std::vector<Ring> holes;

  explicit PolygonWithHoles(Ring exterior_ring, std::vector<Ring> hole_rings = {});
};

/// Checks ring simplicity and hole containment. Throws
/// std::invalid_argument describing the first violation.
void validate_polygon(const PolygonWithHoles& polygon);

/// Even-odd point-in-ring test (points exactly on the outline are not
/// guaranteed a stable answer).
bool point_in_ring(const Ring& ring, Point p);

/// A set of polygons sharing one pixel grid.
struct PolygonSet {
  std::vector<PolygonWithHoles> polygons;
  int width = 0;   ///< grid width in pixels (0 when unknown)
  int height = 0;  ///< grid height in pixels (0 when unknown)

  /// Total vertex count over all rings of all polygons.
  long total_vertices() const;
};

}  // namespace polyforge

#pragma once
// Convex-set primitives on the plane: polygon domains, node masks on a
// uniform lattice, and the measurements taken on both (inradius, diameter,
// minimal width, inscribed ellipse).

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace gstate {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point a, Point b) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }

// Counterclockwise rotation of p about c.
Point rotate_about(Point p, Point c, double angle);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

// Graph representation over [a,b]: lower boundary g1 (convex) and upper
// boundary g2 (concave), both piecewise linear through the listed breakpoints.
struct GraphForm {
  double a = 0.0;
  double b = 0.0;
  std::vector<Point> g1;
  std::vector<Point> g2;
};

class ConvexDomain {
 public:
  // Accepts either orientation; stored counterclockwise with collinear and
  // duplicate vertices removed. Throws InvalidDomain for non-convex or
  // degenerate input.
  static ConvexDomain from_polygon(std::vector<Point> vertices);
  static ConvexDomain from_graph(const GraphForm& graph);

  std::span<const Point> vertices() const { return vertices_; }
  GraphForm to_graph() const;

  double area() const;
  Point centroid() const;
  Interval x_range() const;
  Interval y_range() const;

  // Minimum over edges of the inward distance from p to the edge line;
  // positive strictly inside, zero on the boundary.
  double inward_distance(Point p) const;
  bool contains(Point p, double margin = 0.0) const { return inward_distance(p) >= margin; }

 private:
  std::vector<Point> vertices_;
};

// y-interval of the domain at abscissa x, or nothing outside [a,b].
std::optional<Interval> cross_section(const ConvexDomain& domain, double x);

// Rigid rotation about the centroid.
ConvexDomain rotate_domain(const ConvexDomain& domain, double angle);

// Uniform lattice: node (i,j) sits at origin + (i*spacing, j*spacing).
struct GridSpec {
  Point origin;
  double spacing = 1.0;
  int nx = 0;
  int ny = 0;

  Point node(int i, int j) const { return {origin.x + i * spacing, origin.y + j * spacing}; }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
  }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }

  // Smallest lattice with the given spacing whose nodes cover the domain's
  // bounding box; the first node sits on the lower-left corner.
  static GridSpec covering(const ConvexDomain& domain, double spacing);
};

struct RegionMask {
  GridSpec grid;
  std::vector<std::uint8_t> inside;

  explicit RegionMask(GridSpec g) : grid(g), inside(g.size(), 0) {}
  bool at(int i, int j) const { return inside[grid.index(i, j)] != 0; }
  // Membership of the lattice cell nearest to p; false outside the lattice.
  bool contains(Point p) const;
  std::size_t count() const;
  std::vector<Point> points() const;
};

struct ChebyshevBall {
  Point center;
  double radius = 0.0;
};

// Largest inscribed disc via the linear program over edge halfplanes. When
// the optimal centre is not unique the midpoint of the optimal segment is
// returned.
ChebyshevBall chebyshev_ball(const ConvexDomain& domain);

double inradius(const ConvexDomain& domain);
// Euclidean distance transform to the complement, less half a cell.
double inradius(const RegionMask& mask);
// Node with the largest distance to the complement (first in lattice order on ties).
ChebyshevBall chebyshev_ball(const RegionMask& mask);

double diameter(const ConvexDomain& domain);
double diameter(const RegionMask& mask);

struct WidthOptions {
  double resolution = std::numbers::pi / 720.0;
  // Widths within this of the minimum count as ties (smallest angle wins).
  // Negative selects the default: 1e-9*(1+width) for polygons, spacing/2 for masks.
  double tie_tolerance = -1.0;
};

// Direction angle phi in [0, pi) minimising the support width measured
// along the normal n(phi) = (-sin phi, cos phi). phi = 0 means "thin along y".
struct WidthResult {
  double angle = 0.0;
  double width = 0.0;
};

double width_along(std::span<const Point> points, double angle);
WidthResult min_width_direction(const ConvexDomain& domain, const WidthOptions& opts = {});
WidthResult min_width_direction(const RegionMask& mask, const WidthOptions& opts = {});

struct Ellipse {
  Point center;
  double major = 0.0;  // semi-axis along `angle`
  double minor = 0.0;  // semi-axis perpendicular to `angle`
  double angle = 0.0;

  Point boundary_point(double t) const;
  // Gauge of p relative to the ellipse: 1 on the boundary.
  double gauge(Point p) const;
};

struct JohnEllipse {
  Ellipse ellipse;
  // Smallest factor k with region inside center + k*(E - center).
  double dilation = 1.0;
};

JohnEllipse john_ellipse(const ConvexDomain& domain);
JohnEllipse john_ellipse(const RegionMask& mask);

// Andrew's monotone chain; counterclockwise, no collinear points.
std::vector<Point> convex_hull(std::vector<Point> points);
double polygon_area(std::span<const Point> ccw);
double polygon_perimeter(std::span<const Point> ccw);

// Convexity measure of a mask: (cell area) / (area of the hull of its cells).
// Equal to 1 for a lattice-convex set up to boundary staircase.
struct HullRatio {
  double ratio = 1.0;
  double area = 0.0;
  double perimeter = 0.0;
  // 1 - 5*spacing*perimeter/area
  double threshold = 0.0;
  bool pass() const { return ratio >= threshold; }
};
HullRatio hull_area_ratio(const RegionMask& mask);

// Inradius and diameter of the convex hull of an arbitrary point list (used
// for clipped polygons that may be degenerate); 0 when the hull has no area.
double hull_inradius(std::span<const Point> points);
double hull_diameter(std::span<const Point> points);
WidthResult hull_min_width(std::span<const Point> points, const WidthOptions& opts = {});

// Convex polygon intersected with the halfplane {p : n.p <= b}; empty when
// nothing survives.
std::vector<Point> clip_halfplane(std::span<const Point> ccw, Point n, double b);

}  // namespace gstate

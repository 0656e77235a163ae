#pragma once
// Concave height functions h = clamp(min_i l_i, 0, 1) on a convex domain and
// the potential V = h^-2 built from them.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gstate/geometry.hpp"

namespace gstate {

// l(x,y) = a*x + b*y + c
struct AffinePiece {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double operator()(Point p) const { return a * p.x + b * p.y + c; }
};

class HeightFunction {
 public:
  HeightFunction(std::vector<AffinePiece> pieces, ConvexDomain domain);

  // min_i l_i(p), unclipped
  double raw(Point p) const;
  double operator()(Point p) const;

  const std::vector<AffinePiece>& pieces() const { return pieces_; }
  const ConvexDomain& domain() const { return domain_; }
  // Point of the domain where the raw minimum is largest (from the LP).
  Point argmax() const { return argmax_; }

 private:
  std::vector<AffinePiece> pieces_;
  ConvexDomain domain_;
  Point argmax_;
};

// Shifts every piece by the same constant when needed so that the maximum of
// h over the domain is exactly 1. Throws DegenerateHeight when no piece is
// given or the maximum cannot be located.
HeightFunction make_min_affine(std::vector<AffinePiece> pieces, const ConvexDomain& domain);

HeightFunction constant_height(const ConvexDomain& domain);
// Pyramid with `facets` faces approximating h = 1 - slope*|p - peak|.
HeightFunction cone_height(const ConvexDomain& domain, Point peak, double slope, int facets = 256);
// Right triangle with legs N1 (along y) and N2 (along x); h = 1 at the
// acute vertex (N2, 0) and h = 0 along the whole N1 side.
ConvexDomain triangle_example_domain(double n1, double n2);
HeightFunction triangle_example_height(double n1, double n2);

// Same function expressed in coordinates rotated by `angle` about the
// domain centroid (matches rotate_domain).
HeightFunction rotate_height(const HeightFunction& h, double angle);

inline constexpr double kDefaultVmax = 1e8;
inline constexpr double kExteriorHeight = 1e-4;

struct Potential {
  HeightFunction height;
  double vmax = kDefaultVmax;
  // Nodes with h below this count as exterior (Dirichlet).
  double h_floor = kExteriorHeight;

  const ConvexDomain& domain() const { return height.domain(); }
  // min(h^-2, vmax), no domain check
  double value(Point p) const;
};

// Throws OutsideDomain when (x,y) is not in the closed domain.
double eval_potential(const Potential& v, double x, double y);

// Lattice node counted as part of the computational region: strictly inside
// the domain with h >= h_floor.
bool interior_node(const Potential& v, Point p);

struct HeightReport {
  double max_h = 0.0;
  double min_h = 0.0;
  bool max_ok = false;
  bool range_ok = false;
  int concavity_pairs = 0;
  int concavity_violations = 0;
  double worst_concavity_gap = 0.0;
  std::size_t exterior_nodes = 0;
  bool pass() const { return max_ok && range_ok && concavity_violations == 0; }
};

HeightReport validate_height(const HeightFunction& h, const ConvexDomain& domain, const GridSpec& grid,
                             std::uint64_t seed = 1);
// Generic form for sampled functions (used for negative checks).
HeightReport validate_samples(const std::function<double(Point)>& f, const ConvexDomain& domain,
                              const GridSpec& grid, std::uint64_t seed = 1, double known_max = -1.0);

// Nodes of the computational region with V <= 1 + c. GridMismatch when the
// lattice does not cover the domain.
RegionMask sublevel_region(const Potential& v, double c, const GridSpec& grid);

// Exact sublevel set {V <= 1 + c} as a counterclockwise polygon (possibly
// empty or degenerate).
std::vector<Point> sublevel_polygon(const Potential& v, double c);

}  // namespace gstate

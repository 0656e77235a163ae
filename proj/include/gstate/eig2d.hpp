#pragma once
// Ground state of -Laplace + V on the lattice nodes of the computational
// region (5-point stencil, Dirichlet outside), plus the diagnostics read off
// the resulting field.

#include <cstddef>
#include <optional>
#include <vector>

#include "gstate/geometry.hpp"
#include "gstate/potential.hpp"

namespace gstate {

// The operator lives on a zero-padded copy of the lattice: padded node
// (i+1, j+1) holds lattice node (i, j), and the one-node frame is always 0.
class Operator2D {
 public:
  Operator2D(const Potential& v, const GridSpec& grid);
  // Direct construction from a node mask and potential samples (tests).
  Operator2D(const GridSpec& grid, std::vector<std::uint8_t> mask, std::vector<double> potential);

  const GridSpec& grid() const { return grid_; }
  std::size_t unknowns() const { return nodes_.size(); }
  std::size_t padded_size() const { return diag_.size(); }
  std::size_t stride() const { return static_cast<std::size_t>(grid_.nx) + 2; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }
  const std::vector<double>& potential() const { return pot_; }  // lattice-indexed
  const std::vector<double>& diag() const { return diag_; }      // padded
  std::size_t padded_index(int i, int j) const {
    return static_cast<std::size_t>(j + 1) * stride() + static_cast<std::size_t>(i + 1);
  }

  // out = A in, both padded; in must vanish off the mask.
  void apply(const std::vector<double>& in, std::vector<double>& out) const;

  std::vector<double> to_padded(const std::vector<double>& lattice) const;
  std::vector<double> to_lattice(const std::vector<double>& padded) const;
  // Row-major unknowns x unknowns, unknowns ordered by lattice index.
  std::vector<double> to_dense() const;
  // lattice index of each unknown
  const std::vector<std::size_t>& nodes() const { return nodes_; }

 private:
  void build();

  GridSpec grid_;
  std::vector<std::uint8_t> mask_;
  std::vector<double> pot_;
  std::vector<double> diag_, off_;
  std::vector<std::size_t> nodes_;
};

struct EigenPair2D {
  double lambda = 0.0;
  std::vector<double> u;  // lattice-indexed, 0 off the mask, max 1
  double residual = 0.0;  // ||A u - lambda u|| / ||u||
  int outer_iterations = 0;
  long long cg_iterations = 0;
};

struct Eig2DOptions {
  double cg_tol = 1e-10;
  int max_outer = 500;
  double rq_tol = 1e-12;
  double residual_tol = 1e-8;
};

// Zero-shift inverse iteration with Rayleigh-Ritz over {previous, current,
// A^-1 current}; inner solves by Jacobi-preconditioned CG.
// LinearSolveFailed when CG exceeds 10n iterations, EigSolveFailed after
// max_outer steps, EmptyDomain for an empty mask.
EigenPair2D first_eig_2d(const Operator2D& op, const std::vector<double>& initial = {},
                         const Eig2DOptions& opts = {});

struct CgResult {
  int iterations = 0;
  double relative_residual = 0.0;
};
// Solves A x = b in padded storage; x holds the starting guess.
CgResult conjugate_gradient(const Operator2D& op, const std::vector<double>& b, std::vector<double>& x,
                            double tol);

// Full symmetric eigendecomposition; OracleTooLarge above 4000 unknowns.
EigenPair2D dense_oracle_2d(const Operator2D& op);

double rayleigh_quotient(const Operator2D& op, const std::vector<double>& lattice_u);

struct HProfile {
  std::vector<double> x;
  std::vector<double> H;  // per lattice column
  double A_max = 0.0;
  std::size_t argmax = 0;
};
HProfile h_profile(const EigenPair2D& pair, const GridSpec& grid);

struct Segment {
  Point a, b;
};

struct LevelSetReport {
  double c = 0.0;
  std::vector<Segment> contour;
  RegionMask mask;
  double y_extent = 0.0;
  double x_extent = 0.0;
  double inradius = 0.0;
  double diameter = 0.0;
  JohnEllipse john;
  double eccentricity = 0.0;
  HullRatio hull;
  explicit LevelSetReport(GridSpec g) : mask(g) {}
};

// Superlevel set {u >= c}: the node mask, the marching-squares contour of
// u = c (u taken as 0 off the lattice), and measurements of the contour hull.
// LevelEmpty when no node reaches c.
LevelSetReport level_set(const EigenPair2D& pair, const GridSpec& grid, double c);

struct LogConcavityReport {
  double floor = 1e-8;
  double max_grad_log = 0.0;
  double tolerance = 0.0;
  double worst = -1e300;       // largest second difference seen
  Point worst_at;              // where it was seen
  double worst_u = 0.0;        // u there
  std::size_t tested = 0;
  std::size_t violations = 0;
  // Triples touching the boundary layer, tested but not judged.
  std::size_t layer_tested = 0;
  std::size_t layer_violations = 0;
  double layer_worst = -1e300;
  bool divided = true;
  std::vector<HullRatio> hull_ratios;  // superlevel masks
  std::vector<double> hull_levels;
  bool pass() const;
};

struct LogConcavityOptions {
  double floor = 1e-8;
  // Second differences divided by the squared step (true) or raw.
  bool divided = true;
  // Triples with a node whose 4-neighbour distance to the exterior is at
  // most this are reported separately: next to a staircase boundary the
  // lattice region is not convex.
  int boundary_layer = 1;
  std::vector<double> levels{0.1, 0.25, 0.5, 0.75, 0.9};
};

// `mask` marks the lattice region (u is 0 elsewhere).
LogConcavityReport log_concavity_check(const std::vector<double>& u, const std::vector<std::uint8_t>& mask,
                                       const GridSpec& grid, const LogConcavityOptions& opts = {});
// 4-neighbour distance to the nearest node outside the mask (or outside the
// lattice), capped at `cap`; 0 off the mask.
std::vector<int> boundary_depth(const std::vector<std::uint8_t>& mask, const GridSpec& grid, int cap);

}  // namespace gstate

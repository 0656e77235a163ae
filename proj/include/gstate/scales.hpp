#pragma once
// The transverse scale L1, the orientation that puts the thin direction of
// the sublevel set along y, and the longitudinal scale L2 with its window I.

#include <string>
#include <vector>

#include "gstate/geometry.hpp"
#include "gstate/potential.hpp"
#include "gstate/sturm1d.hpp"

namespace gstate {

enum class L1Method { Polygon, Mask };

struct L1Options {
  L1Method method = L1Method::Polygon;
  double rel_tol = 1e-3;
};

struct PredicateSample {
  double L = 0.0;
  bool holds = false;
};

struct L1Result {
  double L1 = 0.0;
  double L1_tilde = 0.0;  // diameter of the sublevel set at L1
  L1Method method = L1Method::Polygon;
  std::vector<PredicateSample> samples;
  bool monotone = true;  // no sample with P true lies above one with P false
};

// Largest L with inradius({V <= 1 + L^-2}) >= L, by bisection over
// [spacing, diameter]. ResolutionTooCoarse when the predicate fails at the
// grid spacing.
L1Result compute_L1(const Potential& v, const GridSpec& grid, const L1Options& opts = {});

// inradius of {V <= 1 + L^-2} by the selected route
double sublevel_inradius(const Potential& v, const GridSpec& grid, double L, L1Method method);

struct Oriented {
  Potential potential;
  double theta = 0.0;        // rotation applied, in (-pi/2, pi/2]
  double width_y = 0.0;      // width of the sublevel set along y after rotation
  double width_x = 0.0;      // and along x
};

// Rotates so that the sublevel set at L1 has its minimal width along y.
Oriented orient_domain(const Potential& v, double L1, const WidthOptions& opts = {});

struct L2Result {
  double L2 = 0.0;
  Interval window;            // I
  bool comparable = false;    // L1_tilde <= C_tilde * L1
  double sup_mu_in_window = 0.0;
  std::vector<PredicateSample> samples;
  bool monotone = true;
};

// Windows are runs of consecutive profile nodes; a run of m nodes covers a
// length of m*dx (each node owns one cell).
L2Result compute_L2(const MuProfile& profile, double L1, double L1_tilde, double C_tilde = 8.0,
                    double rel_tol = 1e-3);
// Longest run of nodes with mu <= level, leftmost on ties; length in nodes.
struct Run {
  std::size_t begin = 0;
  std::size_t count = 0;
};
Run longest_run(const std::vector<double>& mu, double level);

struct BoundCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = true;
  bool upper = true;  // value <= threshold when true, >= otherwise
};

struct ScaleBoundOptions {
  double K = 4.0;
  double floor = 0.05;
  double tol = 1e-3;
};

struct ScaleReport {
  double L1 = 0.0;
  double L1_tilde = 0.0;
  double theta = 0.0;
  double L2 = 0.0;
  Interval I;
  bool comparable = false;
  double C_tilde = 8.0;
  double mu_star = 0.0;
  double x_star = 0.0;
  double N1 = 0.0;
  double N2 = 0.0;
  std::vector<BoundCheck> bound_checks;
};

std::vector<BoundCheck> check_scale_bounds(const ScaleReport& r, double N1, const ScaleBoundOptions& opts = {});

}  // namespace gstate

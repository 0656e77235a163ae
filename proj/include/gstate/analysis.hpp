#pragma once
// Checks of the eigenvalue, decay and shape inequalities on a solved
// instance. Every check reports dimensionless measured constants next to the
// thresholds it was judged against.

#include <optional>
#include <string>
#include <vector>

#include "gstate/eig2d.hpp"
#include "gstate/potential.hpp"
#include "gstate/scales.hpp"
#include "gstate/sturm1d.hpp"

namespace gstate {

enum class CheckStatus { Pass, Fail, Skip, Info };
std::string_view to_string(CheckStatus s);

struct Measure {
  std::string name;
  double value = 0.0;
};

struct CheckResult {
  std::string name;
  std::string statement;  // the inequality being tested, in words
  std::vector<Measure> measured;
  std::vector<Measure> thresholds;
  CheckStatus status = CheckStatus::Info;
  std::string notes;
};

struct Tolerances {
  double C_tilde = 8.0;          // comparability of L1_tilde and L1
  double C_max = 50.0;           // (lambda - mu) L2^2
  double K_shape = 6.0;          // level-set shape ratios in [1/K, K]
  double c_star_floor = 0.01;    // -(V(max) - lambda) L1^2
  double mass_floor = 0.05;
  double mass_ceiling = 20.0;
  double gradient_ceiling = 20.0;
  double C_agmon = 100.0;
  double C_psi = 50.0;
  double agmon_C = 16.0;         // region {V >= 1 + C L1^-2}
  double window_C = 1.0;         // decay fit beyond C L2, windows of 3 C L2
  double scale_K = 4.0;
  double scale_floor = 0.05;
  double bisection_rel_tol = 1e-3;
  double logc_floor = 1e-8;
  double width_resolution = 0.004363323129985824;  // pi/720
  double carleman_fraction = 0.99;
  double level_margin = 0.1;     // levels must lie in (m, 1 - m)
};

// Grid derivative of a lattice field: central where both neighbours are in
// the mask, one-sided where only one is, zero extension otherwise.
struct Gradient {
  double dx = 0.0;
  double dy = 0.0;
};
Gradient grid_gradient(const std::vector<double>& u, const std::vector<std::uint8_t>& mask, const GridSpec& grid,
                       int i, int j);

CheckResult verify_scales(const ScaleReport& s, const L1Result& l1, const L2Result& l2, const Oriented& o,
                          double spacing, const Tolerances& tol);
std::vector<CheckResult> verify_scale_bounds(const ScaleReport& s, const Tolerances& tol);

CheckResult verify_height(const HeightReport& h);

CheckResult verify_eigensolution(const EigenPair2D& pair, const Operator2D& op);

std::vector<CheckResult> verify_eigenvalue_bounds(double lambda, double mu, double L1, double L2, double spacing,
                                                  const Tolerances& tol);

// Convexity of the exact-section profile and the range of mu against L1.
std::vector<CheckResult> verify_mu_profile(const MuProfile& section, const Potential& v, double L1);

// 2 dy sum_j |u r| per lattice column, r = A u - lambda u.
std::vector<double> carleman_allowance(const EigenPair2D& pair, const Operator2D& op);

// x, H, mu share the lattice columns; mu is NaN where no uncapped value exists.
std::vector<CheckResult> verify_carleman_decay(const std::vector<double>& x, const std::vector<double>& H,
                                               const std::vector<double>& mu, double lambda, double L2,
                                               double x_star, double spacing,
                                               const std::vector<double>& allowance, bool elongated,
                                               const Tolerances& tol);
// mu on lattice columns from a profile (NaN for empty or capped columns)
std::vector<double> column_mu(const MuProfile& lattice);

std::vector<CheckResult> verify_mass_bounds(const EigenPair2D& pair, const Operator2D& op, const HProfile& H,
                                            const ScaleReport& s, double x_star, const Tolerances& tol);

std::vector<CheckResult> verify_level_shape(const EigenPair2D& pair, const Potential& v, const GridSpec& grid,
                                            const ScaleReport& s, const std::vector<double>& levels,
                                            const Tolerances& tol);

std::vector<CheckResult> verify_max_and_gradients(const EigenPair2D& pair, const Operator2D& op,
                                                  const ScaleReport& s, const Tolerances& tol);

struct AgmonField {
  GridSpec grid;
  std::vector<std::uint8_t> region;   // Omega_1
  std::vector<std::uint8_t> sources;  // inner boundary, h* = 0
  std::vector<double> nu;             // V - lambda (lattice, 0 off the mask)
  std::vector<double> hstar;          // +inf outside region and sources
  bool empty() const;
};

// Neighbour offsets of the distance graph: primitive lattice vectors with
// max(|a|,|b|) <= radius.
std::vector<std::pair<int, int>> agmon_stencil(int radius = 6);

// Dijkstra over `allowed` nodes from zero-cost `sources`; the cost of an edge
// is the trapezoid integral of `speed` over the straight segment, which must
// stay on allowed or source nodes.
std::vector<double> weighted_distance(const GridSpec& grid, const std::vector<std::uint8_t>& allowed,
                                      const std::vector<std::uint8_t>& sources,
                                      const std::vector<double>& speed, int radius = 6);
double segment_cost(const GridSpec& grid, const std::vector<double>& speed, int i0, int j0, int di, int dj);

AgmonField agmon_distance(const Operator2D& op, double lambda, double L1, double C = 16.0);
CheckResult verify_agmon(const EigenPair2D& pair, const AgmonField& field, double L1, double L2,
                         const Tolerances& tol);

CheckResult verify_dpsi(const Potential& v, const GridSpec& grid, const ScaleReport& s, int samples,
                        const Tolerances& tol);

std::vector<CheckResult> verify_log_concavity(const EigenPair2D& pair, const Operator2D& op, const Tolerances& tol);

}  // namespace gstate

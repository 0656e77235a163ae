#pragma once
// Cross-sectional eigenproblems: mu(x) for -d^2/dy^2 + V(x, .) on each
// lattice column, the profile over x, and the operator -d^2/dx^2 + mu(x).

#include <cstddef>
#include <optional>
#include <vector>

#include "gstate/geometry.hpp"
#include "gstate/potential.hpp"

namespace gstate {

// Symmetric tridiagonal matrix with constant off-diagonal `off` and zero
// Dirichlet values just beyond both ends.
struct Tridiagonal1D {
  std::vector<double> diag;
  double off = 0.0;
  double spacing = 1.0;

  std::size_t size() const { return diag.size(); }
  // diag_i = 2/h^2 + w_i, off = -1/h^2
  static Tridiagonal1D from_weights(const std::vector<double>& w, double spacing);
  void apply(const std::vector<double>& x, std::vector<double>& y) const;
};

// Number of eigenvalues strictly below lambda.
std::size_t sturm_count(const Tridiagonal1D& t, double lambda);

// Smallest eigenvalue by bisection on the Sturm count, run until the bracket
// is two adjacent doubles; the returned value has count zero.
// CrossSectionTooThin when fewer than 3 nodes.
double first_eig_1d(const Tridiagonal1D& t);

struct EigenPair1D {
  double mu = 0.0;  // Rayleigh quotient of psi
  std::vector<double> psi;
  double residual = 0.0;  // ||(T - mu) psi|| / ||psi||
  int iterations = 0;
};

// Inverse iteration shifted to mu - 1e-8; psi > 0 and spacing * sum(psi^2) = 1.
EigenPair1D first_eigfun_1d(const Tridiagonal1D& t, double mu);

struct MuColumn {
  int i = 0;       // lattice column
  double x = 0.0;
  int j0 = 0;      // first lattice row of the cross-section
  int n = 0;       // number of nodes
  double mu = 0.0;
  bool capped = false;  // fewer than 3 nodes: mu = vmax
};

struct MuProfile {
  GridSpec grid;
  std::vector<MuColumn> columns;  // nonempty cross-sections, increasing x
  double mu_star = 0.0;
  double x_star = 0.0;
  std::size_t star = 0;  // index into columns, leftmost minimiser

  std::vector<double> values() const;
};

// Lattice nodes of column i that belong to the computational region.
struct ColumnRange {
  int j0 = 0;
  int n = 0;
};
ColumnRange column_nodes(const Potential& v, const GridSpec& grid, int i);
Tridiagonal1D column_operator(const Potential& v, const GridSpec& grid, int i, ColumnRange r);

// One cross-section per lattice column, evaluated on `threads` workers with
// results identical to a sequential run. EmptyDomain if no column has nodes.
MuProfile mu_profile(const Potential& v, const GridSpec& grid, int threads = 1);

// Same x nodes, but each cross-section is the exact interval {y : (x,y) in
// the domain, h >= h_floor} carrying its own uniform grid with spacing as
// close to dy as fits. Smooth in x, unlike the lattice columns.
MuProfile section_profile(const Potential& v, const GridSpec& grid, int threads = 1);

// Exact region interval at abscissa x (empty when the section misses the region).
std::optional<Interval> region_section(const Potential& v, double x);

// -d^2/dx^2 + mu(x) on the profile nodes, Dirichlet beyond both ends.
Tridiagonal1D operator_A(const std::vector<double>& mu, double dx);
double operator_A_first_eig(const MuProfile& profile);
EigenPair1D operator_A_first_pair(const MuProfile& profile);

struct DpsiResult {
  double value = 0.0;           // sum over rows of (d_x psi)^2 dy
  double orthogonality = 0.0;   // sum of (d_x psi) psi dy
};

// Central difference of the normalized cross-section eigenfunction between
// columns i - offset and i + offset. Each is extended by zero outside its own
// cross-section; both live on the same lattice rows. AtDomainEdge when a
// neighbour column is empty or too thin.
DpsiResult dpsi_dx_l2(const Potential& v, const GridSpec& grid, int i, int offset = 1);

}  // namespace gstate

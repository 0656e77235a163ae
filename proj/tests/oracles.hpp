#pragma once
// Independent reference computations used only by the tests: dense
// eigensolvers, brute-force scans and closed forms.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gstate/eig2d.hpp"
#include "gstate/geometry.hpp"
#include "gstate/sturm1d.hpp"

namespace oracle {

inline constexpr double pi = std::numbers::pi;

// Smallest eigenvalue of a symmetric tridiagonal matrix, dense.
inline double tridiag_min_eig(const gstate::Tridiagonal1D& t) {
  const int n = static_cast<int>(t.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = t.diag[i];
    if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = t.off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Smallest eigenvalue of a dense row-major symmetric matrix.
inline double dense_min_eig(const std::vector<double>& m, std::size_t n) {
  Eigen::MatrixXd a(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) a(r, c) = m[r * n + c];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Discrete Dirichlet eigenvalue of -d^2/dy^2 on an interval with n interior
// nodes at spacing h: (4/h^2) sin^2(pi/(2(n+1))).
inline double discrete_dirichlet_1d(int n, double h) {
  const double s = std::sin(pi / (2.0 * (n + 1)));
  return 4.0 / (h * h) * s * s;
}

// Longest run of consecutive entries <= level, leftmost on ties, by trying
// every window.
inline std::pair<std::size_t, std::size_t> brute_window(const std::vector<double>& mu, double level) {
  std::size_t best_b = 0, best_n = 0;
  for (std::size_t b = 0; b < mu.size(); ++b)
    for (std::size_t e = b; e < mu.size(); ++e) {
      bool ok = true;
      for (std::size_t k = b; k <= e && ok; ++k) ok = mu[k] <= level;
      if (!ok) break;
      if (e - b + 1 > best_n) best_b = b, best_n = e - b + 1;
    }
  return {best_b, best_n};
}

// Largest L (within rel) such that some window of >= L/dx nodes has
// mu <= mu_star + L^-2, by scanning L over a fine geometric ladder.
inline double brute_L2(const std::vector<double>& mu, double dx, double rel = 1e-4) {
  double mn = mu[0];
  for (double v : mu) mn = std::min(mn, v);
  double best = 0.0;
  for (double L = dx; L <= dx * static_cast<double>(mu.size()) * (1.0 + rel); L *= 1.0 + rel) {
    const double level = mn + 1.0 / (L * L);
    std::size_t run = 0, longest = 0;
    for (double v : mu) {
      run = v <= level ? run + 1 : 0;
      longest = std::max(longest, run);
    }
    if (static_cast<double>(longest) * dx >= L) best = L;
  }
  return best;
}

// 5-point stencil assembled directly from the mask, unknowns in lattice order.
inline std::vector<double> stencil_matrix(const gstate::GridSpec& g, const std::vector<std::uint8_t>& mask, const std::vector<double>& pot,
                                          std::vector<std::size_t>& ids) {
  ids.clear();
  std::vector<long> id(g.size(), -1);
  for (std::size_t k = 0; k < g.size(); ++k)
    if (mask[k]) id[k] = static_cast<long>(ids.size()), ids.push_back(k);
  const std::size_t n = ids.size();
  const double h2 = g.spacing * g.spacing;
  std::vector<double> m(n * n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const int i = static_cast<int>(ids[r] % g.nx), j = static_cast<int>(ids[r] / g.nx);
    m[r * n + r] = 4.0 / h2 + pot[ids[r]];
    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    for (int d = 0; d < 4; ++d) {
      const int a = i + di[d], b = j + dj[d];
      if (a < 0 || b < 0 || a >= g.nx || b >= g.ny) continue;
      const long c = id[g.index(a, b)];
      if (c >= 0) m[r * n + static_cast<std::size_t>(c)] = -1.0 / h2;
    }
  }
  return m;
}

// Brute-force minimal width over directions at the given resolution.
inline double brute_min_width(const std::vector<gstate::Point>& pts, int steps) {
  double best = 1e300;
  for (int k = 0; k < steps; ++k) {
    const double t = pi * k / steps;
    const gstate::Point n{-std::sin(t), std::cos(t)};
    double lo = 1e300, hi = -1e300;
    for (auto p : pts) {
      lo = std::min(lo, gstate::dot(n, p));
      hi = std::max(hi, gstate::dot(n, p));
    }
    best = std::min(best, hi - lo);
  }
  return best;
}

}  // namespace oracle

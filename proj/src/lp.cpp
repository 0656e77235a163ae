#include "gstate/lp.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace gstate {
namespace {

constexpr int kRows = 3;

struct Tableau {
  int cols = 0;  // structural + artificial columns
  std::vector<double> t;  // kRows x (cols + 1), last column is rhs
  std::array<int, kRows> basis{};

  double& at(int r, int c) { return t[static_cast<std::size_t>(r) * (cols + 1) + c]; }
  double at(int r, int c) const { return t[static_cast<std::size_t>(r) * (cols + 1) + c]; }

  void pivot(int r, int c) {
    const double p = at(r, c);
    for (int j = 0; j <= cols; ++j) at(r, j) /= p;
    for (int i = 0; i < kRows; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (int j = 0; j <= cols; ++j) at(i, j) -= f * at(r, j);
    }
    basis[r] = c;
  }
};

// Minimise cost over the columns flagged in `allowed`. Returns false when unbounded.
bool run_simplex(Tableau& tab, const std::vector<double>& cost, const std::vector<char>& allowed,
                 double eps) {
  for (int iter = 0; iter < 10000; ++iter) {
    int enter = -1;
    for (int j = 0; j < tab.cols && enter < 0; ++j) {
      if (!allowed[j]) continue;
      double rc = cost[j];
      for (int i = 0; i < kRows; ++i) rc -= cost[tab.basis[i]] * tab.at(i, j);
      if (rc < -eps) enter = j;
    }
    if (enter < 0) return true;
    int leave = -1;
    double best = 0.0;
    for (int i = 0; i < kRows; ++i) {
      const double a = tab.at(i, enter);
      if (a <= eps) continue;
      const double ratio = tab.at(i, tab.cols) / a;
      if (leave < 0 || ratio < best - eps ||
          (std::abs(ratio - best) <= eps && tab.basis[i] < tab.basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave < 0) return false;
    tab.pivot(leave, enter);
  }
  return true;
}

bool solve3(std::array<std::array<double, 3>, 3> m, std::array<double, 3> rhs,
            std::array<double, 3>& out) {
  for (int c = 0; c < 3; ++c) {
    int p = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(m[r][c]) > std::abs(m[p][c])) p = r;
    if (std::abs(m[p][c]) < 1e-300) return false;
    std::swap(m[p], m[c]);
    std::swap(rhs[p], rhs[c]);
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      const double f = m[r][c] / m[c][c];
      for (int k = c; k < 3; ++k) m[r][k] -= f * m[c][k];
      rhs[r] -= f * rhs[c];
    }
  }
  for (int c = 0; c < 3; ++c) out[c] = rhs[c] / m[c][c];
  return true;
}

}  // namespace

Lp3Result maximize3(const std::array<double, 3>& c, std::span<const Halfspace3> constraints) {
  const int m = static_cast<int>(constraints.size());
  Tableau tab;
  tab.cols = m + kRows;
  tab.t.assign(static_cast<std::size_t>(kRows) * (tab.cols + 1), 0.0);

  double scale = 1.0;
  for (const auto& h : constraints)
    for (double v : h.a) scale = std::max(scale, std::abs(v));
  const double eps = 1e-12 * scale;

  for (int i = 0; i < kRows; ++i) {
    const double sign = c[i] < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < m; ++j) tab.at(i, j) = sign * constraints[j].a[i];
    tab.at(i, m + i) = 1.0;
    tab.at(i, tab.cols) = sign * c[i];
    tab.basis[i] = m + i;
  }

  std::vector<char> allowed(tab.cols, 1);
  std::vector<double> cost(tab.cols, 0.0);
  for (int i = 0; i < kRows; ++i) cost[m + i] = 1.0;
  run_simplex(tab, cost, allowed, eps);

  double infeasibility = 0.0;
  for (int i = 0; i < kRows; ++i)
    if (tab.basis[i] >= m) infeasibility += tab.at(i, tab.cols);
  Lp3Result result;
  if (infeasibility > 1e-9 * (1.0 + std::abs(c[0]) + std::abs(c[1]) + std::abs(c[2]))) {
    // Dual infeasible: the primal is unbounded (or infeasible).
    result.status = Lp3Result::Status::Unbounded;
    return result;
  }
  for (int i = 0; i < kRows; ++i) {
    if (tab.basis[i] < m) continue;
    int col = -1;
    for (int j = 0; j < m && col < 0; ++j)
      if (std::abs(tab.at(i, j)) > eps) col = j;
    if (col < 0) {
      result.status = Lp3Result::Status::Unbounded;
      return result;
    }
    tab.pivot(i, col);
  }

  for (int i = 0; i < kRows; ++i) allowed[m + i] = 0;
  for (int j = 0; j < m; ++j) cost[j] = constraints[j].b;
  for (int i = 0; i < kRows; ++i) cost[m + i] = 0.0;
  if (!run_simplex(tab, cost, allowed, eps)) {
    result.status = Lp3Result::Status::Infeasible;
    return result;
  }

  std::array<std::array<double, 3>, 3> mat{};
  std::array<double, 3> rhs{};
  for (int i = 0; i < kRows; ++i) {
    mat[i] = constraints[tab.basis[i]].a;
    rhs[i] = constraints[tab.basis[i]].b;
  }
  if (!solve3(mat, rhs, result.z)) {
    result.status = Lp3Result::Status::Unbounded;
    return result;
  }
  result.status = Lp3Result::Status::Optimal;
  result.value = c[0] * result.z[0] + c[1] * result.z[1] + c[2] * result.z[2];
  return result;
}

}  // namespace gstate

#include "gstate/sturm1d.hpp"

#include <algorithm>
#include <limits>
#include <thread>

#include "gstate/error.hpp"

namespace gstate {

Tridiagonal1D Tridiagonal1D::from_weights(const std::vector<double>& w, double spacing) {
  Tridiagonal1D t;
  t.spacing = spacing;
  const double inv = 1.0 / (spacing * spacing);
  t.off = -inv;
  t.diag.resize(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) t.diag[k] = 2.0 * inv + w[k];
  return t;
}

void Tridiagonal1D::apply(const std::vector<double>& x, std::vector<double>& y) const {
  const std::size_t n = diag.size();
  y.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double s = diag[k] * x[k];
    if (k > 0) s += off * x[k - 1];
    if (k + 1 < n) s += off * x[k + 1];
    y[k] = s;
  }
}

std::size_t sturm_count(const Tridiagonal1D& t, double lambda) {
  const double off2 = t.off * t.off;
  const double tiny = std::numeric_limits<double>::min() * 1e10;
  std::size_t neg = 0;
  double q = 1.0;
  for (std::size_t k = 0; k < t.diag.size(); ++k) {
    q = t.diag[k] - lambda - (k == 0 ? 0.0 : off2 / q);
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++neg;
  }
  return neg;
}

double first_eig_1d(const Tridiagonal1D& t) {
  if (t.size() < 3) throw Error(ErrorCode::CrossSectionTooThin, "cross-section has fewer than 3 nodes");
  // Gershgorin bracket
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double r = (k > 0 ? std::abs(t.off) : 0.0) + (k + 1 < t.size() ? std::abs(t.off) : 0.0);
    lo = std::min(lo, t.diag[k] - r);
    hi = std::max(hi, t.diag[k] + r);
  }
  lo -= 1e-12 * (1.0 + std::abs(lo));
  // down to adjacent doubles
  for (;;) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (sturm_count(t, mid) == 0 ? lo : hi) = mid;
  }
  return lo;
}

namespace {

// Solve (T - s I) x = b by the Thomas algorithm.
void thomas(const Tridiagonal1D& t, double s, const std::vector<double>& b, std::vector<double>& x,
            std::vector<double>& cp) {
  const std::size_t n = t.size();
  x.resize(n);
  cp.resize(n);
  double denom = t.diag[0] - s;
  cp[0] = t.off / denom;
  x[0] = b[0] / denom;
  for (std::size_t k = 1; k < n; ++k) {
    denom = t.diag[k] - s - t.off * cp[k - 1];
    cp[k] = t.off / denom;
    x[k] = (b[k] - t.off * x[k - 1]) / denom;
  }
  for (std::size_t k = n - 1; k-- > 0;) x[k] -= cp[k] * x[k + 1];
}

double l2(const std::vector<double>& v) {
  double s = 0.0;
  for (double a : v) s += a * a;
  return std::sqrt(s);
}

}  // namespace

EigenPair1D first_eigfun_1d(const Tridiagonal1D& t, double mu) {
  const std::size_t n = t.size();
  if (n < 3) throw Error(ErrorCode::CrossSectionTooThin, "cross-section has fewer than 3 nodes");
  const double shift = mu - 1e-8;
  std::vector<double> x(n), y, cp, tx;
  // Positive start: the ground state has no sign change.
  for (std::size_t k = 0; k < n; ++k) x[k] = std::sin(std::numbers::pi * (k + 1.0) / (n + 1.0));
  EigenPair1D out;
  for (int it = 1; it <= 200; ++it) {
    thomas(t, shift, x, y, cp);
    const double ny = l2(y);
    for (std::size_t k = 0; k < n; ++k) x[k] = y[k] / ny;
    t.apply(x, tx);
    double rq = 0.0;
    for (std::size_t k = 0; k < n; ++k) rq += x[k] * tx[k];
    double res = 0.0;
    for (std::size_t k = 0; k < n; ++k) res += (tx[k] - rq * x[k]) * (tx[k] - rq * x[k]);
    res = std::sqrt(res);
    if (res <= 1e-8) {
      double sum = 0.0;
      for (double a : x) sum += a;
      const double sign = sum < 0.0 ? -1.0 : 1.0;
      const double scale = sign / std::sqrt(t.spacing);  // ||x|| = 1 -> spacing*sum psi^2 = 1
      out.psi.resize(n);
      for (std::size_t k = 0; k < n; ++k) out.psi[k] = x[k] * scale;
      out.mu = rq;
      out.residual = res;
      out.iterations = it;
      return out;
    }
  }
  throw Error(ErrorCode::EigSolveFailed, "inverse iteration did not converge in 200 steps");
}

std::vector<double> MuProfile::values() const {
  std::vector<double> v;
  v.reserve(columns.size());
  for (const auto& c : columns) v.push_back(c.mu);
  return v;
}

ColumnRange column_nodes(const Potential& v, const GridSpec& grid, int i) {
  ColumnRange r{0, 0};
  for (int j = 0; j < grid.ny; ++j) {
    if (!interior_node(v, grid.node(i, j))) {
      if (r.n > 0) break;
      continue;
    }
    if (r.n == 0) r.j0 = j;
    ++r.n;
  }
  return r;
}

Tridiagonal1D column_operator(const Potential& v, const GridSpec& grid, int i, ColumnRange r) {
  std::vector<double> w(static_cast<std::size_t>(r.n));
  for (int k = 0; k < r.n; ++k) w[k] = v.value(grid.node(i, r.j0 + k));
  return Tridiagonal1D::from_weights(w, grid.spacing);
}

std::optional<Interval> region_section(const Potential& v, double x) {
  auto cs = cross_section(v.domain(), x);
  if (!cs) return std::nullopt;
  Interval r = *cs;
  // a x + b y + c >= floor is a halfline in y
  for (const auto& l : v.height.pieces()) {
    const double rhs = v.h_floor - l.a * x - l.c;
    if (l.b > 0.0) r.lo = std::max(r.lo, rhs / l.b);
    else if (l.b < 0.0) r.hi = std::min(r.hi, rhs / l.b);
    else if (rhs > 0.0) return std::nullopt;
  }
  if (!(r.hi > r.lo)) return std::nullopt;
  return r;
}

namespace {

template <class Fill>
MuProfile build_profile(const GridSpec& grid, int threads, Fill fill) {
  std::vector<MuColumn> all(static_cast<std::size_t>(grid.nx));
  auto work = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) fill(i, all[i]);
  };
  threads = std::max(1, std::min(threads, grid.nx));
  if (threads == 1) {
    work(0, grid.nx);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (grid.nx + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const int b = t * chunk, e = std::min(grid.nx, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }
  MuProfile p;
  p.grid = grid;
  for (const auto& c : all)
    if (c.n > 0) p.columns.push_back(c);
  if (p.columns.empty()) throw Error(ErrorCode::EmptyDomain, "no lattice column meets the domain");
  for (std::size_t k = 0; k < p.columns.size(); ++k)
    if (p.columns[k].mu < p.columns[p.star].mu) p.star = k;
  p.mu_star = p.columns[p.star].mu;
  p.x_star = p.columns[p.star].x;
  return p;
}

}  // namespace

MuProfile section_profile(const Potential& v, const GridSpec& grid, int threads) {
  return build_profile(grid, threads, [&](int i, MuColumn& c) {
    c.i = i;
    c.x = grid.node(i, 0).x;
    const auto sec = region_section(v, c.x);
    if (!sec) return;
    const double len = sec->length();
    const int n = static_cast<int>(std::ceil(len / grid.spacing - 1e-9)) - 1;
    c.n = std::max(n, 1);
    if (n < 3) {
      c.mu = v.vmax;
      c.capped = true;
      return;
    }
    const double dy = len / (n + 1);
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) w[k] = v.value({c.x, sec->lo + (k + 1) * dy});
    c.mu = first_eig_1d(Tridiagonal1D::from_weights(w, dy));
  });
}

MuProfile mu_profile(const Potential& v, const GridSpec& grid, int threads) {
  return build_profile(grid, threads, [&](int i, MuColumn& c) {
    {
      const ColumnRange r = column_nodes(v, grid, i);
      c.i = i;
      c.x = grid.node(i, 0).x;
      c.j0 = r.j0;
      c.n = r.n;
      if (r.n == 0) return;
      if (r.n < 3) {
        c.mu = v.vmax;
        c.capped = true;
      } else {
        c.mu = first_eig_1d(column_operator(v, grid, i, r));
      }
    }
  });
}

Tridiagonal1D operator_A(const std::vector<double>& mu, double dx) { return Tridiagonal1D::from_weights(mu, dx); }

double operator_A_first_eig(const MuProfile& profile) {
  return first_eig_1d(operator_A(profile.values(), profile.grid.spacing));
}

EigenPair1D operator_A_first_pair(const MuProfile& profile) {
  const Tridiagonal1D t = operator_A(profile.values(), profile.grid.spacing);
  return first_eigfun_1d(t, first_eig_1d(t));
}

DpsiResult dpsi_dx_l2(const Potential& v, const GridSpec& grid, int i, int offset) {
  auto column = [&](int ic) {
    if (ic < 0 || ic >= grid.nx) throw Error(ErrorCode::AtDomainEdge, "neighbour column outside the lattice");
    const ColumnRange r = column_nodes(v, grid, ic);
    if (r.n < 3) throw Error(ErrorCode::AtDomainEdge, "neighbour cross-section empty or too thin");
    const Tridiagonal1D t = column_operator(v, grid, ic, r);
    std::vector<double> full(static_cast<std::size_t>(grid.ny), 0.0);
    const EigenPair1D e = first_eigfun_1d(t, first_eig_1d(t));
    for (int k = 0; k < r.n; ++k) full[r.j0 + k] = e.psi[k];
    return full;
  };
  const auto lo = column(i - offset), hi = column(i + offset), mid = column(i);
  const double dx = 2.0 * offset * grid.spacing;
  DpsiResult out;
  for (int j = 0; j < grid.ny; ++j) {
    const double d = (hi[j] - lo[j]) / dx;
    out.value += d * d * grid.spacing;
    out.orthogonality += d * mid[j] * grid.spacing;
  }
  return out;
}

}  // namespace gstate

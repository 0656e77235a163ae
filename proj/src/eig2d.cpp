#include "gstate/eig2d.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "gstate/error.hpp"
#include "gstate/kernels.hpp"

namespace gstate {

namespace {

std::vector<std::uint8_t> region_mask(const Potential& v, const GridSpec& grid) {
  std::vector<std::uint8_t> m(grid.size(), 0);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) m[grid.index(i, j)] = interior_node(v, grid.node(i, j)) ? 1 : 0;
  return m;
}

std::vector<double> sample_potential(const Potential& v, const GridSpec& grid, const std::vector<std::uint8_t>& m) {
  std::vector<double> p(grid.size(), 0.0);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      if (m[grid.index(i, j)]) p[grid.index(i, j)] = v.value(grid.node(i, j));
  return p;
}

}  // namespace

Operator2D::Operator2D(const Potential& v, const GridSpec& grid) : grid_(grid) {
  mask_ = region_mask(v, grid);
  pot_ = sample_potential(v, grid, mask_);
  build();
}

Operator2D::Operator2D(const GridSpec& grid, std::vector<std::uint8_t> mask, std::vector<double> potential)
    : grid_(grid), mask_(std::move(mask)), pot_(std::move(potential)) {
  if (mask_.size() != grid.size() || pot_.size() != grid.size())
    throw Error(ErrorCode::GridMismatch, "mask or potential does not match the lattice");
  build();
}

void Operator2D::build() {
  const std::size_t padded = stride() * (static_cast<std::size_t>(grid_.ny) + 2);
  diag_.assign(padded, 0.0);
  off_.assign(padded, 0.0);
  const double inv = 1.0 / (grid_.spacing * grid_.spacing);
  for (int j = 0; j < grid_.ny; ++j)
    for (int i = 0; i < grid_.nx; ++i) {
      const std::size_t k = grid_.index(i, j);
      if (!mask_[k]) continue;
      nodes_.push_back(k);
      diag_[padded_index(i, j)] = 4.0 * inv + pot_[k];
      off_[padded_index(i, j)] = inv;
    }
  if (nodes_.empty()) throw Error(ErrorCode::EmptyDomain, "no lattice node in the computational region");
}

void Operator2D::apply(const std::vector<double>& in, std::vector<double>& out) const {
  out.resize(diag_.size());
  const std::size_t s = stride();
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(s), 0.0);
  std::fill(out.end() - static_cast<std::ptrdiff_t>(s), out.end(), 0.0);
  kernels::active().stencil5(in.data(), diag_.data(), off_.data(), out.data(), s, diag_.size() - s, s);
}

std::vector<double> Operator2D::to_padded(const std::vector<double>& lattice) const {
  std::vector<double> p(diag_.size(), 0.0);
  for (int j = 0; j < grid_.ny; ++j)
    for (int i = 0; i < grid_.nx; ++i) {
      const std::size_t k = grid_.index(i, j);
      if (mask_[k]) p[padded_index(i, j)] = lattice[k];
    }
  return p;
}

std::vector<double> Operator2D::to_lattice(const std::vector<double>& padded) const {
  std::vector<double> l(grid_.size(), 0.0);
  for (int j = 0; j < grid_.ny; ++j)
    for (int i = 0; i < grid_.nx; ++i) {
      const std::size_t k = grid_.index(i, j);
      if (mask_[k]) l[k] = padded[padded_index(i, j)];
    }
  return l;
}

std::vector<double> Operator2D::to_dense() const {
  const std::size_t n = nodes_.size();
  std::vector<long> unknown(grid_.size(), -1);
  for (std::size_t k = 0; k < n; ++k) unknown[nodes_[k]] = static_cast<long>(k);
  std::vector<double> a(n * n, 0.0);
  const double inv = 1.0 / (grid_.spacing * grid_.spacing);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t k = nodes_[r];
    const int i = static_cast<int>(k % grid_.nx), j = static_cast<int>(k / grid_.nx);
    a[r * n + r] = 4.0 * inv + pot_[k];
    const int di[4] = {-1, 1, 0, 0}, dj[4] = {0, 0, -1, 1};
    for (int d = 0; d < 4; ++d) {
      const int ii = i + di[d], jj = j + dj[d];
      if (ii < 0 || jj < 0 || ii >= grid_.nx || jj >= grid_.ny) continue;
      const long c = unknown[grid_.index(ii, jj)];
      if (c >= 0) a[r * n + static_cast<std::size_t>(c)] = -inv;
    }
  }
  return a;
}

CgResult conjugate_gradient(const Operator2D& op, const std::vector<double>& b, std::vector<double>& x,
                            double tol) {
  const auto& k = kernels::active();
  const std::size_t n = op.padded_size();
  std::vector<double> inv_diag(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (op.diag()[i] != 0.0) inv_diag[i] = 1.0 / op.diag()[i];
  std::vector<double> r(n), z(n), p(n), ap(n);
  const double bnorm = std::sqrt(k.dot(b.data(), b.data(), n));
  CgResult res;
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return res;
  }
  const long long limit = 10LL * static_cast<long long>(op.unknowns());
  // A few restarts guard against drift of the recursive residual.
  for (int restart = 0; restart < 4; ++restart) {
    op.apply(x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
    double rnorm = std::sqrt(k.dot(r.data(), r.data(), n));
    res.relative_residual = rnorm / bnorm;
    if (res.relative_residual <= tol) return res;
    k.mul(inv_diag.data(), r.data(), z.data(), n);
    p = z;
    double rz = k.dot(r.data(), z.data(), n);
    while (rnorm > tol * bnorm) {
      if (res.iterations >= limit)
        throw Error(ErrorCode::LinearSolveFailed, "conjugate gradient exceeded 10n iterations");
      op.apply(p, ap);
      const double alpha = rz / k.dot(p.data(), ap.data(), n);
      k.axpy(alpha, p.data(), x.data(), n);
      k.axpy(-alpha, ap.data(), r.data(), n);
      k.mul(inv_diag.data(), r.data(), z.data(), n);
      const double rz_new = k.dot(r.data(), z.data(), n);
      k.xpay(z.data(), rz_new / rz, p.data(), n);
      rz = rz_new;
      rnorm = std::sqrt(k.dot(r.data(), r.data(), n));
      ++res.iterations;
    }
  }
  op.apply(x, ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
  res.relative_residual = std::sqrt(k.dot(r.data(), r.data(), n)) / bnorm;
  if (res.relative_residual > 10.0 * tol)
    throw Error(ErrorCode::LinearSolveFailed, "conjugate gradient stalled");
  return res;
}

namespace {

double norm2(const std::vector<double>& v) { return std::sqrt(kernels::dot(v, v)); }

void scale(std::vector<double>& v, double s) {
  for (double& a : v) a *= s;
}

EigenPair2D finish(const Operator2D& op, const std::vector<double>& padded, double lambda, double residual) {
  EigenPair2D out;
  out.lambda = lambda;
  out.residual = residual;
  out.u = op.to_lattice(padded);
  double sum = 0.0, mx = 0.0;
  for (double a : out.u) sum += a;
  if (sum < 0.0) scale(out.u, -1.0);
  for (double a : out.u) mx = std::max(mx, a);
  if (mx > 0.0) scale(out.u, 1.0 / mx);
  return out;
}

}  // namespace

EigenPair2D first_eig_2d(const Operator2D& op, const std::vector<double>& initial, const Eig2DOptions& opts) {
  const std::size_t n = op.padded_size();
  std::vector<double> x;
  if (initial.size() == op.grid().size()) {
    x = op.to_padded(initial);
  } else {
    x.assign(n, 0.0);
    for (std::size_t k : op.nodes()) {
      const int i = static_cast<int>(k % op.grid().nx), j = static_cast<int>(k / op.grid().nx);
      x[op.padded_index(i, j)] = 1.0;
    }
  }
  double nx = norm2(x);
  if (!(nx > 0.0)) throw Error(ErrorCode::EigSolveFailed, "initial vector vanishes on the region");
  scale(x, 1.0 / nx);

  std::vector<double> ax, prev, y;
  op.apply(x, ax);
  double lambda = kernels::dot(x, ax);
  double lambda_prev = std::numeric_limits<double>::infinity();
  EigenPair2D out;
  for (int outer = 1; outer <= opts.max_outer; ++outer) {
    y = x;
    scale(y, 1.0 / lambda);
    out.cg_iterations += conjugate_gradient(op, x, y, opts.cg_tol).iterations;

    // Orthonormal basis of span{x, y, prev}.
    std::vector<std::vector<double>> basis;
    for (const auto* cand : {&x, &y, &prev}) {
      if (cand->empty()) continue;
      std::vector<double> q = *cand;
      const double n0 = norm2(q);
      if (!(n0 > 0.0)) continue;
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) kernels::axpy(-kernels::dot(b, q), b, q);
      const double nq = norm2(q);
      if (nq <= 1e-14 * n0) continue;
      scale(q, 1.0 / nq);
      basis.push_back(std::move(q));
    }
    const std::size_t m = basis.size();
    std::vector<std::vector<double>> w(m);
    for (std::size_t a = 0; a < m; ++a) op.apply(basis[a], w[a]);
    Eigen::MatrixXd g(m, m);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a; b < m; ++b) g(a, b) = g(b, a) = 0.5 * (kernels::dot(basis[a], w[b]) + kernels::dot(basis[b], w[a]));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    const Eigen::VectorXd c = es.eigenvectors().col(0);

    prev = x;
    std::fill(x.begin(), x.end(), 0.0);
    std::fill(ax.begin(), ax.end(), 0.0);
    for (std::size_t a = 0; a < m; ++a) {
      kernels::axpy(c(a), basis[a], x);
      kernels::axpy(c(a), w[a], ax);
    }
    const double nrm = norm2(x);
    scale(x, 1.0 / nrm);
    scale(ax, 1.0 / nrm);
    lambda_prev = lambda;
    lambda = kernels::dot(x, ax);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res += (ax[i] - lambda * x[i]) * (ax[i] - lambda * x[i]);
    res = std::sqrt(res);
    if (std::abs(lambda - lambda_prev) < opts.rq_tol * std::max(1.0, lambda) && res <= opts.residual_tol) {
      EigenPair2D done = finish(op, x, lambda, res);
      done.outer_iterations = outer;
      done.cg_iterations = out.cg_iterations;
      return done;
    }
  }
  throw Error(ErrorCode::EigSolveFailed, "inverse iteration did not converge");
}

EigenPair2D dense_oracle_2d(const Operator2D& op) {
  const std::size_t n = op.unknowns();
  if (n > 4000) throw Error(ErrorCode::OracleTooLarge, "dense oracle limited to 4000 unknowns");
  const std::vector<double> a = op.to_dense();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = a[r * n + c];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigSolveFailed, "dense eigensolver failed");
  std::vector<double> lattice(op.grid().size(), 0.0);
  for (std::size_t r = 0; r < n; ++r) lattice[op.nodes()[r]] = es.eigenvectors()(static_cast<Eigen::Index>(r), 0);
  const auto padded = op.to_padded(lattice);
  std::vector<double> ap;
  op.apply(padded, ap);
  const double lambda = es.eigenvalues()(0);
  double res = 0.0;
  for (std::size_t i = 0; i < padded.size(); ++i) res += (ap[i] - lambda * padded[i]) * (ap[i] - lambda * padded[i]);
  return finish(op, padded, lambda, std::sqrt(res) / norm2(padded));
}

double rayleigh_quotient(const Operator2D& op, const std::vector<double>& lattice_u) {
  const auto p = op.to_padded(lattice_u);
  std::vector<double> ap;
  op.apply(p, ap);
  return kernels::dot(p, ap) / kernels::dot(p, p);
}

HProfile h_profile(const EigenPair2D& pair, const GridSpec& grid) {
  HProfile h;
  h.x.resize(static_cast<std::size_t>(grid.nx));
  h.H.assign(static_cast<std::size_t>(grid.nx), 0.0);
  for (int i = 0; i < grid.nx; ++i) {
    h.x[i] = grid.node(i, 0).x;
    double s = 0.0;
    for (int j = 0; j < grid.ny; ++j) {
      const double u = pair.u[grid.index(i, j)];
      s += u * u;
    }
    h.H[i] = s * grid.spacing;
    if (h.H[i] > h.A_max) {
      h.A_max = h.H[i];
      h.argmax = static_cast<std::size_t>(i);
    }
  }
  return h;
}

namespace {

std::vector<Segment> marching_squares(const std::vector<double>& u, const GridSpec& grid, double c) {
  auto val = [&](int i, int j) {
    if (i < 0 || j < 0 || i >= grid.nx || j >= grid.ny) return 0.0;
    return u[grid.index(i, j)];
  };
  auto node = [&](int i, int j) { return grid.node(0, 0) + Point{i * grid.spacing, j * grid.spacing}; };
  std::vector<Segment> segs;
  for (int j = -1; j < grid.ny; ++j)
    for (int i = -1; i < grid.nx; ++i) {
      // corners: 0=(i,j) 1=(i+1,j) 2=(i+1,j+1) 3=(i,j+1)
      const int ci[4] = {i, i + 1, i + 1, i}, cj[4] = {j, j, j + 1, j + 1};
      double f[4];
      bool above[4];
      int count = 0;
      for (int k = 0; k < 4; ++k) {
        f[k] = val(ci[k], cj[k]);
        above[k] = f[k] >= c;
        count += above[k];
      }
      if (count == 0 || count == 4) continue;
      // edge e joins corner e and corner e+1
      Point cross_pt[4];
      bool has[4];
      for (int e = 0; e < 4; ++e) {
        const int a = e, b = (e + 1) % 4;
        has[e] = above[a] != above[b];
        if (has[e]) {
          const double t = (c - f[a]) / (f[b] - f[a]);
          const Point pa = node(ci[a], cj[a]), pb = node(ci[b], cj[b]);
          cross_pt[e] = pa + t * (pb - pa);
        }
      }
      if (count == 2 && above[0] == above[2]) {
        // saddle: isolate the corners not joined through the centre
        const bool centre_above = 0.25 * (f[0] + f[1] + f[2] + f[3]) >= c;
        for (int k = 0; k < 4; ++k) {
          if (above[k] == centre_above) continue;
          segs.push_back({cross_pt[(k + 3) % 4], cross_pt[k]});
        }
        continue;
      }
      Point ends[2];
      int m = 0;
      for (int e = 0; e < 4; ++e)
        if (has[e]) ends[m++] = cross_pt[e];
      segs.push_back({ends[0], ends[1]});
    }
  return segs;
}

}  // namespace

LevelSetReport level_set(const EigenPair2D& pair, const GridSpec& grid, double c) {
  LevelSetReport r(grid);
  r.c = c;
  for (std::size_t k = 0; k < grid.size(); ++k) r.mask.inside[k] = pair.u[k] >= c ? 1 : 0;
  if (r.mask.count() == 0) throw Error(ErrorCode::LevelEmpty, "no node reaches the requested level");
  r.contour = marching_squares(pair.u, grid, c);
  std::vector<Point> pts;
  for (const auto& s : r.contour) {
    pts.push_back(s.a);
    pts.push_back(s.b);
  }
  const auto hull = convex_hull(pts);
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (const Point& p : hull) {
    xlo = std::min(xlo, p.x);
    xhi = std::max(xhi, p.x);
    ylo = std::min(ylo, p.y);
    yhi = std::max(yhi, p.y);
  }
  r.x_extent = xhi - xlo;
  r.y_extent = yhi - ylo;
  r.inradius = hull_inradius(hull);
  r.diameter = hull_diameter(hull);
  r.eccentricity = r.inradius > 0.0 ? r.diameter / r.inradius : std::numeric_limits<double>::infinity();
  try {
    r.john = john_ellipse(ConvexDomain::from_polygon(hull));
  } catch (const Error&) {
    r.john = john_ellipse(r.mask);
  }
  r.hull = hull_area_ratio(r.mask);
  return r;
}

bool LogConcavityReport::pass() const {
  if (violations != 0) return false;
  for (const auto& h : hull_ratios)
    if (!h.pass()) return false;
  return true;
}

std::vector<int> boundary_depth(const std::vector<std::uint8_t>& mask, const GridSpec& grid, int cap) {
  std::vector<int> depth(grid.size(), 0);
  for (int pass = 1; pass <= cap; ++pass) {
    std::vector<int> next = depth;
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        if (!mask[grid.index(i, j)]) continue;
        auto d = [&](int a, int b) {
          return a < 0 || b < 0 || a >= grid.nx || b >= grid.ny ? 0 : depth[grid.index(a, b)];
        };
        next[grid.index(i, j)] = std::min({d(i - 1, j), d(i + 1, j), d(i, j - 1), d(i, j + 1)}) + 1;
      }
    depth.swap(next);
  }
  return depth;
}

LogConcavityReport log_concavity_check(const std::vector<double>& u, const std::vector<std::uint8_t>& mask,
                                       const GridSpec& grid, const LogConcavityOptions& opts) {
  if (u.size() != grid.size() || mask.size() != grid.size())
    throw Error(ErrorCode::GridMismatch, "field or mask does not match the lattice");
  LogConcavityReport r;
  const std::vector<int> depth = boundary_depth(mask, grid, opts.boundary_layer + 1);
  auto deep = [&](int i, int j) { return depth[grid.index(i, j)] > opts.boundary_layer; };
  r.floor = opts.floor;
  r.divided = opts.divided;
  auto ok = [&](int i, int j) {
    return i >= 0 && j >= 0 && i < grid.nx && j < grid.ny && mask[grid.index(i, j)] && u[grid.index(i, j)] > opts.floor;
  };
  auto lg = [&](int i, int j) { return std::log(u[grid.index(i, j)]); };
  const double h = grid.spacing;
  // max |grad log u|: central where possible, one-sided otherwise
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      if (!ok(i, j)) continue;
      auto partial = [&](int di, int dj) {
        const bool f = ok(i + di, j + dj), b = ok(i - di, j - dj);
        if (f && b) return (lg(i + di, j + dj) - lg(i - di, j - dj)) / (2.0 * h);
        if (f) return (lg(i + di, j + dj) - lg(i, j)) / h;
        if (b) return (lg(i, j) - lg(i - di, j - dj)) / h;
        return 0.0;
      };
      r.max_grad_log = std::max(r.max_grad_log, std::hypot(partial(1, 0), partial(0, 1)));
    }
  r.tolerance = 10.0 * h * r.max_grad_log;
  const int dirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      if (!ok(i, j)) continue;
      for (const auto& d : dirs) {
        if (!ok(i + d[0], j + d[1]) || !ok(i - d[0], j - d[1])) continue;
        double d2 = lg(i + d[0], j + d[1]) - 2.0 * lg(i, j) + lg(i - d[0], j - d[1]);
        if (opts.divided) d2 /= h * h * (d[0] * d[0] + d[1] * d[1]);
        if (!deep(i, j) || !deep(i + d[0], j + d[1]) || !deep(i - d[0], j - d[1])) {
          ++r.layer_tested;
          r.layer_worst = std::max(r.layer_worst, d2);
          if (d2 > r.tolerance) ++r.layer_violations;
          continue;
        }
        ++r.tested;
        if (d2 > r.worst) {
          r.worst = d2;
          r.worst_at = grid.node(i, j);
          r.worst_u = u[grid.index(i, j)];
        }
        if (d2 > r.tolerance) ++r.violations;
      }
    }
  for (double c : opts.levels) {
    RegionMask m(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) m.inside[k] = mask[k] && u[k] >= c ? 1 : 0;
    if (m.count() == 0) continue;
    r.hull_levels.push_back(c);
    r.hull_ratios.push_back(hull_area_ratio(m));
  }
  return r;
}

}  // namespace gstate

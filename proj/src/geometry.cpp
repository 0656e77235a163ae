#include "gstate/geometry.hpp"

#include <algorithm>
#include <tuple>
#include <limits>

#include "gstate/error.hpp"
#include "gstate/lp.hpp"

namespace gstate {

Point rotate_about(Point p, Point c, double angle) {
  const double cs = std::cos(angle), sn = std::sin(angle);
  const Point d = p - c;
  return {c.x + cs * d.x - sn * d.y, c.y + sn * d.x + cs * d.y};
}

namespace {

double scale_of(std::span<const Point> pts) {
  double s = 0.0;
  for (const Point& p : pts) s = std::max({s, std::abs(p.x), std::abs(p.y)});
  return std::max(s, 1.0);
}

double signed_area(std::span<const Point> pts) {
  double a = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    a += cross(pts[i], pts[(i + 1) % pts.size()]);
  return 0.5 * a;
}

}  // namespace

ConvexDomain ConvexDomain::from_polygon(std::vector<Point> v) {
  const double s = scale_of(v);
  std::vector<Point> dedup;
  for (const Point& p : v)
    if (dedup.empty() || norm(p - dedup.back()) > 1e-14 * s) dedup.push_back(p);
  while (dedup.size() > 1 && norm(dedup.front() - dedup.back()) <= 1e-14 * s) dedup.pop_back();
  if (dedup.size() < 3) throw Error(ErrorCode::InvalidDomain, "polygon needs at least 3 distinct vertices");
  if (signed_area(dedup) < 0.0) std::reverse(dedup.begin(), dedup.end());

  // Drop collinear vertices, then require strictly positive turns.
  bool changed = true;
  while (changed && dedup.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < dedup.size(); ++i) {
      const Point a = dedup[(i + dedup.size() - 1) % dedup.size()];
      const Point b = dedup[i];
      const Point c = dedup[(i + 1) % dedup.size()];
      if (std::abs(cross(b - a, c - b)) <= 1e-12 * s * s && dot(b - a, c - b) >= 0.0) {
        dedup.erase(dedup.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  if (dedup.size() < 3) throw Error(ErrorCode::InvalidDomain, "polygon is degenerate");
  for (std::size_t i = 0; i < dedup.size(); ++i) {
    const Point a = dedup[i];
    const Point b = dedup[(i + 1) % dedup.size()];
    const Point c = dedup[(i + 2) % dedup.size()];
    if (cross(b - a, c - b) <= 0.0) throw Error(ErrorCode::InvalidDomain, "polygon is not convex");
  }
  if (!(signed_area(dedup) > 0.0)) throw Error(ErrorCode::InvalidDomain, "polygon has zero area");
  ConvexDomain d;
  d.vertices_ = std::move(dedup);
  return d;
}

ConvexDomain ConvexDomain::from_graph(const GraphForm& g) {
  if (!(g.a < g.b)) throw Error(ErrorCode::InvalidDomain, "graph form needs a < b");
  auto check_chain = [&](const std::vector<Point>& c, const char* name, double sign) {
    if (c.size() < 2) throw Error(ErrorCode::InvalidDomain, std::string(name) + " needs two breakpoints");
    if (std::abs(c.front().x - g.a) > 1e-12 * (1 + std::abs(g.a)) ||
        std::abs(c.back().x - g.b) > 1e-12 * (1 + std::abs(g.b)))
      throw Error(ErrorCode::InvalidDomain, std::string(name) + " must span [a,b]");
    double prev_slope = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < c.size(); ++i) {
      if (!(c[i].x > c[i - 1].x)) throw Error(ErrorCode::InvalidDomain, std::string(name) + " breakpoints must increase");
      const double slope = sign * (c[i].y - c[i - 1].y) / (c[i].x - c[i - 1].x);
      if (slope < prev_slope - 1e-12 * (1 + std::abs(slope)))
        throw Error(ErrorCode::InvalidDomain, sign > 0 ? "g1 must be convex" : "g2 must be concave");
      prev_slope = slope;
    }
  };
  check_chain(g.g1, "g1", 1.0);
  check_chain(g.g2, "g2", -1.0);
  std::vector<Point> v(g.g1.begin(), g.g1.end());
  for (auto it = g.g2.rbegin(); it != g.g2.rend(); ++it) v.push_back(*it);
  ConvexDomain d = from_polygon(std::move(v));
  for (const Point& p : g.g1) {
    if (p.x <= g.a || p.x >= g.b) continue;
    const auto cs = cross_section(d, p.x);
    if (!cs || cs->length() <= 0.0) throw Error(ErrorCode::InvalidDomain, "g1 must lie strictly below g2");
  }
  return d;
}

GraphForm ConvexDomain::to_graph() const {
  const auto& v = vertices_;
  const std::size_t n = v.size();
  auto better_left = [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); };
  std::size_t bl = 0, br = 0, tl = 0, tr = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (better_left(v[i], v[bl])) bl = i;
    if (v[i].x > v[br].x || (v[i].x == v[br].x && v[i].y < v[br].y)) br = i;
    if (v[i].x < v[tl].x || (v[i].x == v[tl].x && v[i].y > v[tl].y)) tl = i;
    if (v[i].x > v[tr].x || (v[i].x == v[tr].x && v[i].y > v[tr].y)) tr = i;
  }
  GraphForm g;
  g.a = v[bl].x;
  g.b = v[br].x;
  for (std::size_t i = bl;; i = (i + 1) % n) {
    g.g1.push_back(v[i]);
    if (i == br) break;
  }
  for (std::size_t i = tr;; i = (i + 1) % n) {
    g.g2.push_back(v[i]);
    if (i == tl) break;
  }
  std::reverse(g.g2.begin(), g.g2.end());
  return g;
}

double ConvexDomain::area() const { return signed_area(vertices_); }

Point ConvexDomain::centroid() const {
  double cx = 0.0, cy = 0.0;
  const auto& v = vertices_;
  // Shift to the first vertex for conditioning.
  const Point o = v[0];
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point p = v[i] - o, q = v[(i + 1) % v.size()] - o;
    const double c = cross(p, q);
    a += c;
    cx += (p.x + q.x) * c;
    cy += (p.y + q.y) * c;
  }
  return {o.x + cx / (3.0 * a), o.y + cy / (3.0 * a)};
}

Interval ConvexDomain::x_range() const {
  Interval r{vertices_[0].x, vertices_[0].x};
  for (const Point& p : vertices_) r = {std::min(r.lo, p.x), std::max(r.hi, p.x)};
  return r;
}

Interval ConvexDomain::y_range() const {
  Interval r{vertices_[0].y, vertices_[0].y};
  for (const Point& p : vertices_) r = {std::min(r.lo, p.y), std::max(r.hi, p.y)};
  return r;
}

double ConvexDomain::inward_distance(Point p) const {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Point a = vertices_[i];
    const Point e = vertices_[(i + 1) % vertices_.size()] - a;
    d = std::min(d, cross(e, p - a) / norm(e));
  }
  return d;
}

std::optional<Interval> cross_section(const ConvexDomain& domain, double x) {
  const Interval xr = domain.x_range();
  if (x < xr.lo || x > xr.hi) return std::nullopt;
  const auto v = domain.vertices();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point a = v[i], b = v[(i + 1) % v.size()];
    if (x < std::min(a.x, b.x) || x > std::max(a.x, b.x)) continue;
    if (a.x == b.x) {
      lo = std::min({lo, a.y, b.y});
      hi = std::max({hi, a.y, b.y});
    } else {
      const double t = (x - a.x) / (b.x - a.x);
      const double y = a.y + t * (b.y - a.y);
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
  }
  if (!(lo <= hi)) return std::nullopt;
  return Interval{lo, hi};
}

ConvexDomain rotate_domain(const ConvexDomain& domain, double angle) {
  if (angle == 0.0) return domain;
  const Point c = domain.centroid();
  std::vector<Point> v;
  for (const Point& p : domain.vertices()) v.push_back(rotate_about(p, c, angle));
  return ConvexDomain::from_polygon(std::move(v));
}

GridSpec GridSpec::covering(const ConvexDomain& domain, double spacing) {
  if (!(spacing > 0.0)) throw Error(ErrorCode::GridMismatch, "grid spacing must be positive");
  const Interval xr = domain.x_range(), yr = domain.y_range();
  auto count = [spacing](Interval r) {
    const double cells = r.length() / spacing;
    int n = static_cast<int>(std::floor(cells + 1e-9)) + 1;
    if ((n - 1) * spacing < r.length() - 1e-9 * spacing) ++n;
    return n;
  };
  return GridSpec{{xr.lo, yr.lo}, spacing, count(xr), count(yr)};
}

bool RegionMask::contains(Point p) const {
  const int i = static_cast<int>(std::lround((p.x - grid.origin.x) / grid.spacing));
  const int j = static_cast<int>(std::lround((p.y - grid.origin.y) / grid.spacing));
  if (i < 0 || j < 0 || i >= grid.nx || j >= grid.ny) return false;
  return at(i, j);
}

std::size_t RegionMask::count() const {
  return static_cast<std::size_t>(std::count(inside.begin(), inside.end(), std::uint8_t{1}));
}

std::vector<Point> RegionMask::points() const {
  std::vector<Point> pts;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      if (at(i, j)) pts.push_back(grid.node(i, j));
  return pts;
}

namespace {

std::vector<Halfspace3> chebyshev_constraints(const ConvexDomain& domain) {
  const auto v = domain.vertices();
  std::vector<Halfspace3> cons;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point e = v[(i + 1) % v.size()] - v[i];
    const double len = norm(e);
    const Point n{e.y / len, -e.x / len};  // outward for CCW
    cons.push_back({{n.x, n.y, 1.0}, dot(n, v[i])});
  }
  return cons;
}

}  // namespace

ChebyshevBall chebyshev_ball(const ConvexDomain& domain) {
  auto cons = chebyshev_constraints(domain);
  const Lp3Result best = maximize3({0.0, 0.0, 1.0}, cons);
  if (best.status != Lp3Result::Status::Optimal) throw Error(ErrorCode::EmptyRegion, "Chebyshev LP failed");
  const double r = best.z[2];
  cons.push_back({{0.0, 0.0, -1.0}, -(r - 1e-10 * (1.0 + r))});
  std::vector<Point> extremes;
  for (const auto& dir : {std::array<double, 3>{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}}) {
    const Lp3Result e = maximize3(dir, cons);
    if (e.status == Lp3Result::Status::Optimal) extremes.push_back({e.z[0], e.z[1]});
  }
  Point center{best.z[0], best.z[1]};
  double span = 0.0;
  for (std::size_t i = 0; i < extremes.size(); ++i)
    for (std::size_t j = i + 1; j < extremes.size(); ++j)
      if (norm(extremes[i] - extremes[j]) > span) {
        span = norm(extremes[i] - extremes[j]);
        center = 0.5 * (extremes[i] + extremes[j]);
      }
  return {center, r};
}

double inradius(const ConvexDomain& domain) { return chebyshev_ball(domain).radius; }

namespace {

// Felzenszwalb-Huttenlocher squared distance transform of one line.
void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
            std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  constexpr double inf = std::numeric_limits<double>::infinity();
  int k = 0;
  v[0] = 0;
  z[0] = -inf;
  z[1] = inf;
  for (int q = 1; q < n; ++q) {
    if (f[q] == inf) continue;
    if (f[v[0]] == inf) {
      v[0] = q;
      continue;
    }
    double s;
    while (true) {
      s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
      if (s <= z[k] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = inf;
  }
  if (f[v[0]] == inf) {
    std::fill(d.begin(), d.end(), inf);
    return;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    d[q] = (q - v[k]) * (q - v[k]) + f[v[k]];
  }
}

// Squared distance (in cells) from every node to the nearest non-member,
// treating everything beyond the lattice as non-member.
std::vector<double> squared_distance_to_complement(const RegionMask& mask) {
  const int W = mask.grid.nx + 2, H = mask.grid.ny + 2;
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> g(static_cast<std::size_t>(W) * H, 0.0);
  for (int j = 0; j < mask.grid.ny; ++j)
    for (int i = 0; i < mask.grid.nx; ++i)
      if (mask.at(i, j)) g[static_cast<std::size_t>(j + 1) * W + (i + 1)] = inf;
  const int L = std::max(W, H);
  std::vector<double> f(L), d(L), z(L + 1);
  std::vector<int> v(L);
  for (int i = 0; i < W; ++i) {
    f.resize(H);
    d.resize(H);
    for (int j = 0; j < H; ++j) f[j] = g[static_cast<std::size_t>(j) * W + i];
    edt_1d(f, d, v, z);
    for (int j = 0; j < H; ++j) g[static_cast<std::size_t>(j) * W + i] = d[j];
  }
  for (int j = 0; j < H; ++j) {
    f.resize(W);
    d.resize(W);
    for (int i = 0; i < W; ++i) f[i] = g[static_cast<std::size_t>(j) * W + i];
    edt_1d(f, d, v, z);
    for (int i = 0; i < W; ++i) g[static_cast<std::size_t>(j) * W + i] = d[i];
  }
  std::vector<double> out(mask.grid.size(), 0.0);
  for (int j = 0; j < mask.grid.ny; ++j)
    for (int i = 0; i < mask.grid.nx; ++i)
      out[mask.grid.index(i, j)] = g[static_cast<std::size_t>(j + 1) * W + (i + 1)];
  return out;
}

}  // namespace

ChebyshevBall chebyshev_ball(const RegionMask& mask) {
  if (mask.count() == 0) throw Error(ErrorCode::EmptyRegion, "mask has no nodes");
  const auto d2 = squared_distance_to_complement(mask);
  std::size_t best = 0;
  double bestv = -1.0;
  for (int j = 0; j < mask.grid.ny; ++j)
    for (int i = 0; i < mask.grid.nx; ++i) {
      const std::size_t k = mask.grid.index(i, j);
      if (mask.inside[k] && d2[k] > bestv) {
        bestv = d2[k];
        best = k;
      }
    }
  const int bi = static_cast<int>(best % mask.grid.nx), bj = static_cast<int>(best / mask.grid.nx);
  return {mask.grid.node(bi, bj), (std::sqrt(bestv) - 0.5) * mask.grid.spacing};
}

double inradius(const RegionMask& mask) { return chebyshev_ball(mask).radius; }

namespace {

double max_pairwise(std::span<const Point> pts) {
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::max(best, norm(pts[i] - pts[j]));
  return best;
}

std::vector<Point> mask_hull(const RegionMask& mask) {
  // Only the extreme node of each row can be a hull vertex.
  std::vector<Point> pts;
  for (int j = 0; j < mask.grid.ny; ++j) {
    int lo = -1, hi = -1;
    for (int i = 0; i < mask.grid.nx; ++i)
      if (mask.at(i, j)) {
        if (lo < 0) lo = i;
        hi = i;
      }
    if (lo < 0) continue;
    pts.push_back(mask.grid.node(lo, j));
    if (hi != lo) pts.push_back(mask.grid.node(hi, j));
  }
  return convex_hull(std::move(pts));
}

}  // namespace

double diameter(const ConvexDomain& domain) { return max_pairwise(domain.vertices()); }

double diameter(const RegionMask& mask) {
  if (mask.count() == 0) throw Error(ErrorCode::EmptyRegion, "mask has no nodes");
  return max_pairwise(mask_hull(mask));
}

double width_along(std::span<const Point> points, double angle) {
  const Point n{-std::sin(angle), std::cos(angle)};
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const Point& p : points) {
    const double s = dot(n, p);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return hi - lo;
}

namespace {

// Directions on the sweep grid plus the edge directions of the hull (where
// the exact minimum of a polygon sits); smallest angle wins among ties.
WidthResult sweep_width(std::span<const Point> pts, const WidthOptions& opts, double default_tie) {
  const double res = opts.resolution > 0.0 ? opts.resolution : std::numbers::pi / 720.0;
  const int steps = static_cast<int>(std::ceil(std::numbers::pi / res - 1e-9));
  std::vector<WidthResult> cand;
  for (int k = 0; k < steps; ++k) cand.push_back({k * res, width_along(pts, k * res)});
  for (std::size_t i = 0; i < pts.size() && pts.size() >= 2; ++i) {
    const Point e = pts[(i + 1) % pts.size()] - pts[i];
    if (norm(e) == 0.0) continue;
    double a = std::atan2(e.y, e.x);
    if (a < 0.0) a += std::numbers::pi;
    if (a >= std::numbers::pi - 1e-15) a = 0.0;
    cand.push_back({a, width_along(pts, a)});
  }
  double wmin = std::numeric_limits<double>::infinity();
  for (const auto& c : cand) wmin = std::min(wmin, c.width);
  const double tie = opts.tie_tolerance >= 0.0 ? opts.tie_tolerance : default_tie;
  WidthResult best{std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& c : cand)
    if (c.width <= wmin + tie && c.angle < best.angle) best = c;
  return best;
}

}  // namespace

WidthResult min_width_direction(const ConvexDomain& domain, const WidthOptions& opts) {
  const double guess = diameter(domain);
  return sweep_width(domain.vertices(), opts, 1e-9 * (1.0 + guess));
}

WidthResult min_width_direction(const RegionMask& mask, const WidthOptions& opts) {
  if (mask.count() == 0) throw Error(ErrorCode::EmptyRegion, "mask has no nodes");
  const auto hull = mask_hull(mask);
  return sweep_width(hull, opts, 0.5 * mask.grid.spacing);
}

Point Ellipse::boundary_point(double t) const {
  const Point u{std::cos(angle), std::sin(angle)};
  const Point w{-std::sin(angle), std::cos(angle)};
  return center + (major * std::cos(t)) * u + (minor * std::sin(t)) * w;
}

double Ellipse::gauge(Point p) const {
  const Point d = p - center;
  const double a = (d.x * std::cos(angle) + d.y * std::sin(angle)) / major;
  const double b = (-d.x * std::sin(angle) + d.y * std::cos(angle)) / minor;
  return std::hypot(a, b);
}

namespace {

// Largest value in [lo, hi] for which the monotone predicate holds (lo assumed to hold).
template <class Pred>
double bisect_largest(double lo, double hi, Pred ok, int iters = 80) {
  if (ok(hi)) return hi;
  for (int k = 0; k < iters; ++k) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

// Axis-aligned search (in the ellipse frame) for the largest area p*q with
// q <= r: coarse scan over q, then golden refinement around the best.
template <class Fits>
std::pair<double, double> max_area_axes(double r, double pmax, Fits fits, int iters) {
  auto major_for = [&](double q) {
    return bisect_largest(q, std::max(pmax, q), [&](double p) { return p == q || fits(p, q); }, iters);
  };
  constexpr int kScan = 24;
  double best_q = r, best_p = major_for(r);
  int best_k = kScan;
  for (int k = 1; k < kScan; ++k) {
    const double q = r * k / kScan, p = major_for(q);
    if (p * q > best_p * best_q) best_q = q, best_p = p, best_k = k;
  }
  double a = r * (best_k - 1) / kScan;
  double b = r * std::min(best_k + 1, kScan) / kScan;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 30; ++it) {
    const double q1 = b - g * (b - a), q2 = a + g * (b - a);
    const double p1 = major_for(q1), p2 = major_for(q2);
    if (p1 * q1 > best_p * best_q) best_q = q1, best_p = p1;
    if (p2 * q2 > best_p * best_q) best_q = q2, best_p = p2;
    if (p1 * q1 >= p2 * q2) b = q2;
    else a = q1;
  }
  return {best_p, best_q};
}

JohnEllipse john_ellipse(const ConvexDomain& domain) {
  const ChebyshevBall ball = chebyshev_ball(domain);
  const WidthResult w = min_width_direction(domain);
  const auto cons = chebyshev_constraints(domain);
  const Point u{std::cos(w.angle), std::sin(w.angle)};
  const Point wn{-std::sin(w.angle), std::cos(w.angle)};
  const double diam = diameter(domain);
  // For a fixed centre and minor semi-axis q the largest major semi-axis is
  // explicit: each edge needs p^2 (n.u)^2 + q^2 (n.w)^2 <= (b - n.c)^2.
  // log(p q) is concave in q, so a golden-section search finds the best q.
  auto axes_at = [&](Point c) {
    double qmax = std::numeric_limits<double>::infinity();
    for (const auto& h : cons) {
      const Point n{h.a[0], h.a[1]};
      const double slack = h.b - dot(n, c);
      if (!(slack > 0.0)) return std::pair<double, double>{0.0, 0.0};
      if (std::abs(dot(n, wn)) > 1e-15) qmax = std::min(qmax, slack / std::abs(dot(n, wn)));
    }
    auto major_for = [&](double q) {
      double p = diam;
      for (const auto& h : cons) {
        const Point n{h.a[0], h.a[1]};
        const double slack = h.b - dot(n, c), nw = q * dot(n, wn), nu = std::abs(dot(n, u));
        const double room = slack * slack - nw * nw;
        if (room <= 0.0) return 0.0;
        if (nu > 1e-15) p = std::min(p, std::sqrt(room) / nu);
      }
      return p;
    };
    if (!std::isfinite(qmax)) qmax = diam;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = 0.0, b = qmax;
    for (int it = 0; it < 200 && b - a > 1e-15 * qmax; ++it) {
      const double q1 = b - g * (b - a), q2 = a + g * (b - a);
      if (q1 * major_for(q1) >= q2 * major_for(q2)) b = q2;
      else a = q1;
    }
    const double q = 0.5 * (a + b);
    return std::pair<double, double>{major_for(q), q};
  };
  // Pattern search on the centre along the axis directions, from the
  // Chebyshev centre.
  Point c = ball.center;
  auto [p0, q0] = axes_at(c);
  double best = p0 * q0;
  for (double step = 0.25 * ball.radius; step > 1e-7 * ball.radius;) {
    bool moved = false;
    for (Point d : {u, -1.0 * u, wn, -1.0 * wn}) {
      const Point t = c + step * d;
      const auto [p, q] = axes_at(t);
      if (p * q > best * (1.0 + 1e-12)) {
        best = p * q;
        c = t;
        moved = true;
        break;
      }
    }
    if (!moved) step *= 0.5;
  }
  Ellipse e{c, 0.0, 0.0, w.angle};
  std::tie(e.major, e.minor) = axes_at(c);
  JohnEllipse out{e, 1.0};
  for (const Point& v : domain.vertices()) out.dilation = std::max(out.dilation, e.gauge(v));
  return out;
}

JohnEllipse john_ellipse(const RegionMask& mask) {
  const ChebyshevBall ball = chebyshev_ball(mask);
  const WidthResult w = min_width_direction(mask);
  Ellipse e{ball.center, 0.0, 0.0, w.angle};
  auto fits = [&](double p, double q) {
    Ellipse t = e;
    t.major = p;
    t.minor = q;
    for (int k = 0; k < 256; ++k)
      if (!mask.contains(t.boundary_point(2.0 * std::numbers::pi * k / 256.0))) return false;
    return true;
  };
  const double r = bisect_largest(0.0, std::max(ball.radius, 0.0),
                                  [&](double x) { return x == 0.0 || fits(x, x); }, 60);
  const double q0 = std::max(r, 1e-3 * mask.grid.spacing);
  const double diam = diameter(mask);
  std::tie(e.major, e.minor) = max_area_axes(q0, std::max(diam, q0), fits, 60);
  JohnEllipse out{e, 1.0};
  for (const Point& v : mask_hull(mask)) out.dilation = std::max(out.dilation, e.gauge(v));
  return out;
}

std::vector<Point> convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point> h(2 * pts.size());
  std::size_t k = 0;
  for (const Point& p : pts) {
    while (k >= 2 && cross(h[k - 1] - h[k - 2], p - h[k - 2]) <= 0.0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

double polygon_area(std::span<const Point> ccw) { return ccw.size() < 3 ? 0.0 : signed_area(ccw); }

double polygon_perimeter(std::span<const Point> ccw) {
  double p = 0.0;
  for (std::size_t i = 0; i < ccw.size(); ++i) p += norm(ccw[(i + 1) % ccw.size()] - ccw[i]);
  return p;
}

HullRatio hull_area_ratio(const RegionMask& mask) {
  const double h = 0.5 * mask.grid.spacing;
  std::vector<Point> corners;
  for (const Point& c : mask_hull(mask))
    for (const Point d : {Point{-h, -h}, Point{h, -h}, Point{h, h}, Point{-h, h}}) corners.push_back(c + d);
  const auto hull = convex_hull(std::move(corners));
  HullRatio r;
  r.area = static_cast<double>(mask.count()) * mask.grid.spacing * mask.grid.spacing;
  if (r.area == 0.0) throw Error(ErrorCode::EmptyRegion, "mask has no nodes");
  r.perimeter = polygon_perimeter(hull);
  r.ratio = r.area / polygon_area(hull);
  r.threshold = 1.0 - 5.0 * mask.grid.spacing * r.perimeter / r.area;
  return r;
}

double hull_inradius(std::span<const Point> points) {
  const auto hull = convex_hull(std::vector<Point>(points.begin(), points.end()));
  if (hull.size() < 3 || !(polygon_area(hull) > 0.0)) return 0.0;
  std::vector<Halfspace3> cons;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point e = hull[(i + 1) % hull.size()] - hull[i];
    const double len = norm(e);
    if (len == 0.0) continue;
    const Point n{e.y / len, -e.x / len};
    cons.push_back({{n.x, n.y, 1.0}, dot(n, hull[i])});
  }
  const Lp3Result r = maximize3({0.0, 0.0, 1.0}, cons);
  return r.status == Lp3Result::Status::Optimal ? std::max(0.0, r.z[2]) : 0.0;
}

double hull_diameter(std::span<const Point> points) {
  return max_pairwise(convex_hull(std::vector<Point>(points.begin(), points.end())));
}

WidthResult hull_min_width(std::span<const Point> points, const WidthOptions& opts) {
  const auto hull = convex_hull(std::vector<Point>(points.begin(), points.end()));
  if (hull.empty()) throw Error(ErrorCode::EmptyRegion, "no points");
  return sweep_width(hull, opts, 1e-9 * (1.0 + max_pairwise(hull)));
}

std::vector<Point> clip_halfplane(std::span<const Point> ccw, Point n, double b) {
  std::vector<Point> out;
  const std::size_t m = ccw.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Point p = ccw[i], q = ccw[(i + 1) % m];
    const double fp = dot(n, p) - b, fq = dot(n, q) - b;
    if (fp <= 0.0) out.push_back(p);
    if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) {
      const double t = fp / (fp - fq);
      out.push_back(p + t * (q - p));
    }
  }
  return out;
}

}  // namespace gstate

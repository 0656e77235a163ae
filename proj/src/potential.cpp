#include "gstate/potential.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "gstate/error.hpp"
#include "gstate/lp.hpp"

namespace gstate {

namespace {

struct Maximum {
  Point at;
  double value;
};

// max over the domain of min_i l_i
Maximum maximize_min_affine(const std::vector<AffinePiece>& pieces, const ConvexDomain& domain) {
  std::vector<Halfspace3> cons;
  const auto v = domain.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point e = v[(i + 1) % v.size()] - v[i];
    const Point n{e.y, -e.x};
    cons.push_back({{n.x, n.y, 0.0}, dot(n, v[i])});
  }
  for (const auto& p : pieces) cons.push_back({{-p.a, -p.b, 1.0}, p.c});
  const Lp3Result r = maximize3({0.0, 0.0, 1.0}, cons);
  if (r.status != Lp3Result::Status::Optimal)
    throw Error(ErrorCode::DegenerateHeight, "cannot locate the maximum of the height function");
  return {{r.z[0], r.z[1]}, r.z[2]};
}

}  // namespace

HeightFunction::HeightFunction(std::vector<AffinePiece> pieces, ConvexDomain domain)
    : pieces_(std::move(pieces)), domain_(std::move(domain)) {
  if (pieces_.empty()) throw Error(ErrorCode::DegenerateHeight, "height needs at least one affine piece");
  argmax_ = maximize_min_affine(pieces_, domain_).at;
}

double HeightFunction::raw(Point p) const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& l : pieces_) m = std::min(m, l(p));
  return m;
}

double HeightFunction::operator()(Point p) const { return std::clamp(raw(p), 0.0, 1.0); }

HeightFunction make_min_affine(std::vector<AffinePiece> pieces, const ConvexDomain& domain) {
  if (pieces.empty()) throw Error(ErrorCode::DegenerateHeight, "height needs at least one affine piece");
  const Maximum m = maximize_min_affine(pieces, domain);
  if (!std::isfinite(m.value)) throw Error(ErrorCode::DegenerateHeight, "unbounded height");
  // Only lift: a raw maximum above 1 is already clipped to 1 (plateau).
  if (m.value < 1.0)
    for (auto& p : pieces) p.c += 1.0 - m.value;
  HeightFunction h(std::move(pieces), domain);
  if (std::abs(h(h.argmax()) - 1.0) > 1e-9) throw Error(ErrorCode::DegenerateHeight, "max h differs from 1");
  return h;
}

HeightFunction constant_height(const ConvexDomain& domain) {
  return HeightFunction({AffinePiece{0.0, 0.0, 1.0}}, domain);
}

HeightFunction cone_height(const ConvexDomain& domain, Point peak, double slope, int facets) {
  if (facets < 3 || !(slope > 0.0)) throw Error(ErrorCode::DegenerateHeight, "cone needs slope > 0 and >= 3 facets");
  if (!domain.contains(peak)) throw Error(ErrorCode::DegenerateHeight, "cone peak outside the domain");
  std::vector<AffinePiece> pieces;
  for (int k = 0; k < facets; ++k) {
    const double t = 2.0 * std::numbers::pi * k / facets;
    const Point u{std::cos(t), std::sin(t)};
    // 1 - slope * u.(p - peak)
    pieces.push_back({-slope * u.x, -slope * u.y, 1.0 + slope * dot(u, peak)});
  }
  return make_min_affine(std::move(pieces), domain);
}

ConvexDomain triangle_example_domain(double n1, double n2) {
  if (!(n1 > 0.0 && n2 > 0.0)) throw Error(ErrorCode::InvalidDomain, "triangle legs must be positive");
  return ConvexDomain::from_polygon({{0.0, 0.0}, {n2, 0.0}, {0.0, n1}});
}

HeightFunction triangle_example_height(double n1, double n2) {
  return make_min_affine({AffinePiece{1.0 / n2, 0.0, 0.0}}, triangle_example_domain(n1, n2));
}

HeightFunction rotate_height(const HeightFunction& h, double angle) {
  if (angle == 0.0) return h;
  const Point c0 = h.domain().centroid();
  const double cs = std::cos(angle), sn = std::sin(angle);
  std::vector<AffinePiece> out;
  for (const auto& p : h.pieces()) {
    const Point g{p.a, p.b};
    const Point rg{cs * g.x - sn * g.y, sn * g.x + cs * g.y};
    out.push_back({rg.x, rg.y, p.c + dot(g, c0) - dot(rg, c0)});
  }
  return HeightFunction(std::move(out), rotate_domain(h.domain(), angle));
}

double Potential::value(Point p) const {
  const double h = height(p);
  if (h <= 0.0) return vmax;
  return std::min(1.0 / (h * h), vmax);
}

double eval_potential(const Potential& v, double x, double y) {
  const Point p{x, y};
  const double scale = 1.0 + std::max(v.domain().x_range().length(), v.domain().y_range().length());
  if (!v.domain().contains(p, -1e-12 * scale))
    throw Error(ErrorCode::OutsideDomain, "point (" + std::to_string(x) + ", " + std::to_string(y) + ") is outside the domain");
  return v.value(p);
}

bool interior_node(const Potential& v, Point p) {
  const double scale = 1.0 + std::max(v.domain().x_range().length(), v.domain().y_range().length());
  return v.domain().inward_distance(p) > 1e-12 * scale && v.height(p) >= v.h_floor;
}

HeightReport validate_samples(const std::function<double(Point)>& f, const ConvexDomain& domain,
                              const GridSpec& grid, std::uint64_t seed, double known_max) {
  HeightReport r;
  r.max_h = -std::numeric_limits<double>::infinity();
  r.min_h = std::numeric_limits<double>::infinity();
  bool any = false;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const Point p = grid.node(i, j);
      if (!domain.contains(p)) continue;
      const double h = f(p);
      any = true;
      r.max_h = std::max(r.max_h, h);
      r.min_h = std::min(r.min_h, h);
      if (h < kExteriorHeight) ++r.exterior_nodes;
    }
  if (known_max >= 0.0) {
    r.max_h = std::max(r.max_h, known_max);
    r.min_h = std::min(r.min_h, known_max);
  }
  if (!any && known_max < 0.0) return r;
  r.max_ok = std::abs(r.max_h - 1.0) <= 1e-6;
  r.range_ok = r.min_h >= 0.0 && r.max_h <= 1.0;

  std::mt19937_64 rng(seed);
  const Interval xr = domain.x_range(), yr = domain.y_range();
  std::uniform_real_distribution<double> ux(xr.lo, xr.hi), uy(yr.lo, yr.hi);
  auto sample = [&] {
    while (true) {
      const Point p{ux(rng), uy(rng)};
      if (domain.contains(p)) return p;
    }
  };
  for (int k = 0; k < 10000; ++k) {
    const Point p = sample(), q = sample();
    const double gap = (f(p) + f(q)) / 2.0 - f(0.5 * (p + q));
    ++r.concavity_pairs;
    r.worst_concavity_gap = std::max(r.worst_concavity_gap, gap);
    if (gap > 1e-9) ++r.concavity_violations;
  }
  return r;
}

HeightReport validate_height(const HeightFunction& h, const ConvexDomain& domain, const GridSpec& grid,
                             std::uint64_t seed) {
  return validate_samples([&h](Point p) { return h(p); }, domain, grid, seed, h(h.argmax()));
}

RegionMask sublevel_region(const Potential& v, double c, const GridSpec& grid) {
  const Interval xr = v.domain().x_range(), yr = v.domain().y_range();
  const double tol = 1e-9 * grid.spacing;
  const Point far = grid.node(grid.nx - 1, grid.ny - 1);
  if (grid.origin.x > xr.lo + tol || grid.origin.y > yr.lo + tol || far.x < xr.hi - tol || far.y < yr.hi - tol)
    throw Error(ErrorCode::GridMismatch, "lattice does not cover the domain");
  RegionMask m(grid);
  const double level = 1.0 + c;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const Point p = grid.node(i, j);
      if (interior_node(v, p) && v.value(p) <= level) m.inside[grid.index(i, j)] = 1;
    }
  return m;
}

std::vector<Point> sublevel_polygon(const Potential& v, double c) {
  // V <= 1+c  <=>  h >= (1+c)^(-1/2)  <=>  every l_i >= s (since s <= 1)
  const double s = 1.0 / std::sqrt(1.0 + c);
  const auto verts = v.domain().vertices();
  std::vector<Point> poly(verts.begin(), verts.end());
  for (const auto& l : v.height.pieces()) {
    poly = clip_halfplane(poly, Point{-l.a, -l.b}, l.c - s);
    if (poly.empty()) break;
  }
  return poly;
}

}  // namespace gstate

#include <doctest.h>

#include <random>

#include "gstate/error.hpp"
#include "gstate/geometry.hpp"
#include "oracles.hpp"

using namespace gstate;

namespace {

ConvexDomain rect(double a, double b) { return ConvexDomain::from_polygon({{0, 0}, {a, 0}, {a, b}, {0, b}}); }

std::vector<Point> circle_points(int n, double r = 1.0, Point c = {}) {
  std::vector<Point> v;
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * oracle::pi * k / n;
    v.push_back({c.x + r * std::cos(t), c.y + r * std::sin(t)});
  }
  return v;
}

RegionMask disc_mask(double spacing) {
  GridSpec g{{-1.25, -1.25}, spacing, static_cast<int>(2.5 / spacing) + 1, static_cast<int>(2.5 / spacing) + 1};
  RegionMask m(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Point p = g.node(i, j);
      m.inside[g.index(i, j)] = p.x * p.x + p.y * p.y <= 1.0 ? 1 : 0;
    }
  return m;
}

}  // namespace

TEST_CASE("polygon validation") {
  CHECK_THROWS_AS(ConvexDomain::from_polygon({{0, 0}, {1, 0}}), Error);
  CHECK_THROWS_AS(ConvexDomain::from_polygon({{0, 0}, {2, 0}, {1, 0.2}, {2, 2}, {0, 2}}), Error);
  CHECK_THROWS_AS(ConvexDomain::from_polygon({{0, 0}, {1, 1}, {2, 2}}), Error);
  // clockwise input and collinear vertices are normalised
  const auto d = ConvexDomain::from_polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0.5}, {1, 0}});
  CHECK(d.vertices().size() == 4);
  CHECK(d.area() == doctest::Approx(1.0));
}

TEST_CASE("graph form round trip and validation") {
  GraphForm g{0, 2, {{0, 0.5}, {1, 0}, {2, 0.5}}, {{0, 1}, {1, 2}, {2, 1}}};
  const auto d = ConvexDomain::from_graph(g);
  CHECK(d.area() == doctest::Approx(2.5));
  const auto back = d.to_graph();
  CHECK(back.a == doctest::Approx(0.0));
  CHECK(back.b == doctest::Approx(2.0));
  GraphForm bad{0, 2, {{0, 0}, {1, 0.5}, {2, 0}}, {{0, 1}, {1, 2}, {2, 1}}};
  try {
    ConvexDomain::from_graph(bad);
    FAIL("expected InvalidDomain");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidDomain);
  }
}

TEST_CASE("cross sections") {
  const auto r = ConvexDomain::from_polygon({{0, 0}, {4, 0}, {4, 1}, {0, 1}});
  auto s = cross_section(r, 2.0);
  REQUIRE(s);
  CHECK(s->lo == doctest::Approx(0.0));
  CHECK(s->hi == doctest::Approx(1.0));
  const auto t = ConvexDomain::from_polygon({{0, 0}, {4, 0}, {0, 3}});
  s = cross_section(t, 2.0);
  REQUIRE(s);
  CHECK(s->lo == doctest::Approx(0.0));
  CHECK(s->hi == doctest::Approx(1.5));
  CHECK_FALSE(cross_section(t, -1.0));
  CHECK_FALSE(cross_section(t, 5.0));
}

TEST_CASE("inradius") {
  CHECK(inradius(rect(2, 2)) == doctest::Approx(1.0).epsilon(1e-12));
  // legs 3, 4: classical r = (3 + 4 - 5)/2
  const auto t = ConvexDomain::from_polygon({{0, 0}, {4, 0}, {0, 3}});
  CHECK(inradius(t) == doctest::Approx(1.0).epsilon(1e-12));
  const auto b = chebyshev_ball(t);
  CHECK(b.center.x == doctest::Approx(1.0));
  CHECK(b.center.y == doctest::Approx(1.0));
  // 2A/perimeter holds for any triangle
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-5, 5);
  for (int k = 0; k < 50; ++k) {
    std::vector<Point> p{{U(rng), U(rng)}, {U(rng), U(rng)}, {U(rng), U(rng)}};
    const double area = 0.5 * std::abs(cross(p[1] - p[0], p[2] - p[0]));
    if (area < 1.0) continue;
    const double per = norm(p[1] - p[0]) + norm(p[2] - p[1]) + norm(p[0] - p[2]);
    CHECK(inradius(ConvexDomain::from_polygon(p)) == doctest::Approx(2.0 * area / per).epsilon(1e-9));
  }
  CHECK(inradius(disc_mask(0.02)) == doctest::Approx(1.0).epsilon(0.02));
  RegionMask empty(GridSpec{{0, 0}, 1.0, 3, 3});
  CHECK_THROWS_AS(inradius(empty), Error);
}

TEST_CASE("chebyshev centre ties take the segment midpoint") {
  const auto b = chebyshev_ball(rect(6, 2));
  CHECK(b.radius == doctest::Approx(1.0));
  CHECK(b.center.x == doctest::Approx(3.0));
  CHECK(b.center.y == doctest::Approx(1.0));
}

TEST_CASE("diameter") {
  CHECK(diameter(rect(3, 1)) == doctest::Approx(std::sqrt(10.0)));
  const double s = 0.02;
  CHECK(std::abs(diameter(disc_mask(s)) - 2.0) <= 2.0 * s);
  RegionMask one(GridSpec{{0, 0}, 1.0, 3, 3});
  one.inside[4] = 1;
  CHECK(diameter(one) == 0.0);
}

TEST_CASE("minimal width direction") {
  auto w = min_width_direction(rect(4, 1));
  CHECK(w.angle == doctest::Approx(0.0));
  CHECK(w.width == doctest::Approx(1.0));
  // all widths equal: the smallest angle wins
  w = min_width_direction(rect(2, 2));
  CHECK(w.angle == 0.0);
  w = min_width_direction(disc_mask(0.02));
  CHECK(w.angle == 0.0);
  CHECK(std::abs(w.width - 2.0) <= 0.04);
  const std::vector<Point> tri{{0, 0}, {4, 0}, {0, 3}};
  w = min_width_direction(ConvexDomain::from_polygon(tri));
  CHECK(w.width <= oracle::brute_min_width(tri, 7200) + 1e-12);
  CHECK(w.width == doctest::Approx(2.4).epsilon(1e-12));
}

TEST_CASE("rotation") {
  const auto t = ConvexDomain::from_polygon({{0, 0}, {4, 0}, {1, 3}});
  const auto same = rotate_domain(t, 0.0);
  for (std::size_t k = 0; k < t.vertices().size(); ++k) {
    CHECK(same.vertices()[k].x == doctest::Approx(t.vertices()[k].x));
    CHECK(same.vertices()[k].y == doctest::Approx(t.vertices()[k].y));
  }
  const auto sq = rotate_domain(rect(2, 2), oracle::pi / 2);
  CHECK(inradius(sq) == doctest::Approx(1.0));
  const auto back = rotate_domain(rotate_domain(t, 0.7), -0.7);
  double err = 0.0;
  for (Point v : t.vertices()) {
    double best = 1e300;
    for (Point w2 : back.vertices()) best = std::min(best, norm(v - w2));
    err = std::max(err, best);
  }
  CHECK(err < 1e-12);
}

TEST_CASE("John ellipse") {
  auto j = john_ellipse(rect(2, 2));
  CHECK(j.ellipse.center.x == doctest::Approx(1.0));
  CHECK(j.ellipse.center.y == doctest::Approx(1.0));
  CHECK(j.ellipse.major == doctest::Approx(1.0));
  CHECK(j.ellipse.minor == doctest::Approx(1.0));
  CHECK(j.dilation == doctest::Approx(std::sqrt(2.0)));
  j = john_ellipse(rect(6, 2));
  CHECK(j.ellipse.major == doctest::Approx(3.0));
  CHECK(j.ellipse.minor == doctest::Approx(1.0));
  CHECK(j.dilation == doctest::Approx(std::sqrt(2.0)));
  // Steiner inellipse: centre at the centroid, area pi/(3 sqrt 3) times the triangle's
  const auto t = ConvexDomain::from_polygon({{0, 0}, {1, 0}, {0, 1}});
  j = john_ellipse(t);
  CHECK(j.ellipse.center.x == doctest::Approx(1.0 / 3.0).epsilon(1e-4));
  CHECK(j.ellipse.center.y == doctest::Approx(1.0 / 3.0).epsilon(1e-4));
  CHECK(oracle::pi * j.ellipse.major * j.ellipse.minor ==
        doctest::Approx(oracle::pi / (3.0 * std::sqrt(3.0)) * 0.5).epsilon(1e-4));
  CHECK(j.dilation <= 4.0);
  // contained: every boundary point is inside
  for (int k = 0; k < 64; ++k) CHECK(t.contains(j.ellipse.boundary_point(2 * oracle::pi * k / 64), -1e-9));
  const auto jm = john_ellipse(disc_mask(0.02));
  CHECK(jm.ellipse.minor == doctest::Approx(1.0).epsilon(0.05));
  CHECK(jm.dilation <= 4.0);
}

TEST_CASE("hulls and hull ratio") {
  const auto h = convex_hull({{0, 0}, {1, 0}, {0.5, 0.5}, {1, 1}, {0, 1}, {0.5, 0}});
  CHECK(h.size() == 4);
  CHECK(polygon_area(h) == doctest::Approx(1.0));
  CHECK(polygon_perimeter(h) == doctest::Approx(4.0));
  const auto disc = hull_area_ratio(disc_mask(0.02));
  CHECK(disc.pass());
  CHECK(disc.ratio > 0.97);
  // an L-shaped mask is far from convex
  GridSpec g{{0, 0}, 0.05, 41, 41};
  RegionMask L(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) L.inside[g.index(i, j)] = (i < 8 || j < 8) ? 1 : 0;
  CHECK(hull_area_ratio(L).ratio < 0.6);
}

TEST_CASE("clipping and hull measurements") {
  const std::vector<Point> sq{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  const auto half = clip_halfplane(sq, {1, 0}, 1.0);
  CHECK(polygon_area(half) == doctest::Approx(2.0));
  CHECK(clip_halfplane(sq, {1, 0}, -1.0).empty());
  CHECK(hull_inradius(half) == doctest::Approx(0.5));
  CHECK(hull_diameter(half) == doctest::Approx(std::sqrt(5.0)));
  CHECK(hull_inradius(std::vector<Point>{{0, 0}, {1, 1}}) == 0.0);
}

TEST_CASE("mask membership follows the nearest cell") {
  auto m = disc_mask(0.1);
  CHECK(m.contains({0, 0}));
  CHECK_FALSE(m.contains({1.2, 1.2}));
  CHECK_FALSE(m.contains({5, 5}));
  std::size_t n = 0;
  for (auto p : m.points()) n += (p.x * p.x + p.y * p.y <= 1.0);
  CHECK(n == m.count());
}

TEST_CASE("random convex polygons satisfy the measurement invariants") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-3, 3);
  for (int k = 0; k < 40; ++k) {
    std::vector<Point> pts;
    for (int i = 0; i < 12; ++i) pts.push_back({U(rng), 0.4 * U(rng)});
    const auto hull = convex_hull(pts);
    if (hull.size() < 3) continue;
    const auto d = ConvexDomain::from_polygon(hull);
    const double r = inradius(d), diam = diameter(d);
    const auto w = min_width_direction(d);
    CHECK(r <= diam / 2 + 1e-12);
    CHECK(w.width >= 2 * r - 1e-12);
    CHECK(w.width <= oracle::brute_min_width(hull, 720) + 1e-12);
    const auto rot = rotate_domain(d, 0.1 + 0.3 * k);
    CHECK(std::abs(inradius(rot) - r) <= 1e-9);
    CHECK(std::abs(diameter(rot) - diam) <= 1e-9);
    CHECK(std::abs(min_width_direction(rot).width - w.width) <= 1e-9);
    const auto j = john_ellipse(d);
    CHECK(j.dilation >= 1.0);
    CHECK(j.dilation <= 4.0);
    for (int s = 0; s < 256; ++s) CHECK(d.contains(j.ellipse.boundary_point(2 * oracle::pi * s / 256), -1e-9));
  }
}

TEST_CASE("mask width is at least twice the inradius up to the lattice") {
  const double s = 0.02;
  const auto m = disc_mask(s);
  CHECK(min_width_direction(m).width >= 2 * inradius(m) - 2 * s);
  CHECK(inradius(m) <= diameter(m) / 2 + s);
}

#include <doctest.h>

#include <random>

#include "gstate/error.hpp"
#include "gstate/potential.hpp"
#include "oracles.hpp"

using namespace gstate;

namespace {
ConvexDomain square(double a) { return ConvexDomain::from_polygon({{0, 0}, {a, 0}, {a, a}, {0, a}}); }
}  // namespace

TEST_CASE("constant height") {
  const Potential v{constant_height(square(2))};
  CHECK(eval_potential(v, 1.0, 1.0) == 1.0);
  CHECK(eval_potential(v, 0.0, 2.0) == 1.0);
  const auto r = validate_height(v.height, v.domain(), GridSpec::covering(v.domain(), 0.1));
  CHECK(r.pass());
  CHECK(r.concavity_pairs == 10000);
}

TEST_CASE("potential values") {
  const Potential half{make_min_affine({{0.0, 0.0, 0.5}, {0.25, 0.0, 0.0}}, square(4))};
  // raw max is 0.5 at x >= 2; lifted by 0.5 so the plateau reaches 1
  CHECK(half.height({3.0, 1.0}) == doctest::Approx(1.0));
  CHECK(eval_potential(half, 0.0, 1.0) == doctest::Approx(4.0));  // h = 1/2
  const Potential tri{triangle_example_height(4, 64)};
  CHECK(eval_potential(tri, 0.0, 2.0) == kDefaultVmax);           // h = 0
  CHECK(eval_potential(tri, 64.0, 0.0) == doctest::Approx(1.0));  // h = 1 at the acute vertex
  CHECK(tri.height({32.0, 0.5}) == doctest::Approx(0.5));
  try {
    eval_potential(tri, 10.0, 10.0);
    FAIL("expected OutsideDomain");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutsideDomain);
  }
}

TEST_CASE("renormalisation") {
  // raw maximum 0.3 is lifted to 1
  const auto h = make_min_affine({{0.1, 0.0, 0.0}}, square(3));
  CHECK(h(h.argmax()) == doctest::Approx(1.0));
  CHECK(h({0.0, 1.0}) == doctest::Approx(0.7));
  // raw maximum above 1 is clipped, not lowered
  const auto g = make_min_affine({{0.0, 0.0, 2.0}, {1.0, 0.0, 0.0}}, square(3));
  CHECK(g({0.5, 0.5}) == doctest::Approx(0.5));
  CHECK(g({2.0, 0.5}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(make_min_affine({}, square(1)), Error);
  CHECK(validate_height(g, g.domain(), GridSpec::covering(g.domain(), 0.05)).pass());
}

TEST_CASE("cone") {
  const double s = 0.3;
  const Point peak{2, 2};
  const Potential v{cone_height(square(4), peak, s)};
  CHECK(v.height(peak) == doctest::Approx(1.0));
  // level {h = 1 - t} is (up to the facet approximation) the circle of radius t/s
  for (double t : {0.1, 0.3, 0.5})
    for (int k = 0; k < 16; ++k) {
      const double a = 2.0 * oracle::pi * k / 16;
      const Point p{peak.x + t / s * std::cos(a), peak.y + t / s * std::sin(a)};
      CHECK(v.height(p) == doctest::Approx(1.0 - t).epsilon(1e-4));
    }
  CHECK(validate_height(v.height, v.domain(), GridSpec::covering(v.domain(), 0.05), 3).pass());
}

TEST_CASE("sublevel region of the cone is a disc") {
  const double s = 0.3, dx = 0.02;
  const Point peak{2, 2};
  const Potential v{cone_height(square(4), peak, s, 512)};
  const GridSpec g = GridSpec::covering(v.domain(), dx);
  for (double c : {0.05, 0.2, 1.0}) {
    const double R = (1.0 - 1.0 / std::sqrt(1.0 + c)) / s;
    const RegionMask m = sublevel_region(v, c, g);
    std::size_t wrong = 0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double rho = norm(g.node(i, j) - peak);
        if (std::abs(rho - R) <= dx) continue;  // band of width one cell
        if (m.at(i, j) != (rho < R)) ++wrong;
      }
    CHECK(wrong == 0);
    CHECK(hull_inradius(sublevel_polygon(v, c)) == doctest::Approx(R).epsilon(1e-3));
  }
  // c = 0: only the peak's neighbourhood of exact minimum (a point here)
  CHECK(sublevel_region(v, 0.0, g).count() <= 1);
}

TEST_CASE("sublevel monotone in c") {
  const Potential v{triangle_example_height(4, 64)};
  const GridSpec g = GridSpec::covering(v.domain(), 0.25);
  const RegionMask a = sublevel_region(v, 0.5, g), b = sublevel_region(v, 2.0, g);
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(a.inside[k] <= b.inside[k]);
  const Potential one{constant_height(square(2))};
  const GridSpec g1 = GridSpec::covering(one.domain(), 0.1);
  const RegionMask all = sublevel_region(one, 0.01, g1);
  std::size_t interior = 0;
  for (int j = 0; j < g1.ny; ++j)
    for (int i = 0; i < g1.nx; ++i) interior += interior_node(one, g1.node(i, j));
  CHECK(all.count() == interior);
  GridSpec small = g1;
  small.nx -= 2;
  CHECK_THROWS_AS(sublevel_region(one, 0.1, small), Error);
}

TEST_CASE("validation catches convex samples") {
  const auto dom = square(2);
  const GridSpec g = GridSpec::covering(dom, 0.1);
  // convex bowl with max 1 on the corners: midpoint test must fail
  auto bowl = [](Point p) { return std::min(1.0, 0.25 * ((p.x - 1) * (p.x - 1) + (p.y - 1) * (p.y - 1)) + 0.5); };
  const auto r = validate_samples(bowl, dom, g, 11);
  CHECK(r.concavity_violations > 0);
  CHECK_FALSE(r.pass());
  // a concave table with max below 1 fails the max test only
  auto low = [](Point p) { return 0.5 - 0.01 * (p.x - 1) * (p.x - 1); };
  const auto q = validate_samples(low, dom, g, 11);
  CHECK(q.concavity_violations == 0);
  CHECK_FALSE(q.max_ok);
}

TEST_CASE("exterior rule") {
  const Potential v{triangle_example_height(4, 64)};
  CHECK_FALSE(interior_node(v, {0.0, 1.0}));      // on the boundary
  CHECK_FALSE(interior_node(v, {0.5 * kExteriorHeight * 64, 1.0}));  // h below the floor
  CHECK(interior_node(v, {1.0, 1.0}));
}

TEST_CASE("rotated height matches the rotated domain") {
  const Potential v{triangle_example_height(4, 64)};
  const auto r = rotate_height(v.height, 0.4);
  const Point c = v.domain().centroid();
  for (Point p : {Point{10, 1}, Point{40, 0.5}, Point{2, 3}}) {
    const Point q = rotate_about(p, c, 0.4);
    CHECK(r(q) == doctest::Approx(v.height(p)).epsilon(1e-12));
    CHECK(r.domain().contains(q, -1e-9));
  }
}

TEST_CASE("V is at least one and sublevel masks are row and column convex") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    const ConvexDomain d = square(4);
    std::vector<AffinePiece> pieces;
    for (int p = 0; p < 3; ++p) pieces.push_back({U(rng) - 0.5, U(rng) - 0.5, 0.5 + U(rng)});
    const Potential v{make_min_affine(pieces, d)};
    const GridSpec g = GridSpec::covering(d, 0.05);
    double vmin = 1e300;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const Point p = g.node(i, j);
        if (!d.contains(p, 0.0)) continue;
        const double val = eval_potential(v, p.x, p.y);
        CHECK(val >= 1.0);
        vmin = std::min(vmin, val);
      }
    CHECK(vmin >= 1.0);
    const Point top = v.height.argmax();
    CHECK(eval_potential(v, top.x, top.y) == doctest::Approx(1.0).epsilon(1e-12));
    for (double c : {0.1, 0.5, 2.0}) {
      const RegionMask m = sublevel_region(v, c, g);
      // inside nodes on any lattice line form one contiguous run
      auto runs = [&](bool rows) {
        int worst = 0;
        const int outer = rows ? g.ny : g.nx, inner = rows ? g.nx : g.ny;
        for (int a = 0; a < outer; ++a) {
          int r = 0;
          bool prev = false;
          for (int b = 0; b < inner; ++b) {
            const bool in = rows ? m.at(b, a) : m.at(a, b);
            if (in && !prev) ++r;
            prev = in;
          }
          worst = std::max(worst, r);
        }
        return worst;
      };
      CHECK(runs(true) <= 1);
      CHECK(runs(false) <= 1);
    }
  }
}

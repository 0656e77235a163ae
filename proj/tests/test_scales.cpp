#include <doctest.h>

#include <random>

#include "gstate/error.hpp"
#include "gstate/scales.hpp"
#include "oracles.hpp"

using namespace gstate;

namespace {
ConvexDomain rect_domain(double a, double b) { return ConvexDomain::from_polygon({{0, 0}, {a, 0}, {a, b}, {0, b}}); }

MuProfile synthetic(const std::vector<double>& mu, double dx) {
  MuProfile p;
  p.grid.spacing = dx;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    MuColumn c;
    c.i = static_cast<int>(k);
    c.x = static_cast<double>(k) * dx;
    c.mu = mu[k];
    p.columns.push_back(c);
    if (mu[k] < mu[p.star]) p.star = k;
  }
  p.mu_star = mu[p.star];
  p.x_star = p.columns[p.star].x;
  return p;
}
}  // namespace

TEST_CASE("L1 of constant rectangles") {
  for (double n : {2.0, 8.0, 40.0}) {
    const Potential v{constant_height(rect_domain(n, 1))};
    const GridSpec g = GridSpec::covering(v.domain(), 1.0 / 64);
    const auto r = compute_L1(v, g);
    CHECK(r.L1 == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(r.L1 <= 0.5);
    CHECK(r.L1_tilde == doctest::Approx(std::sqrt(n * n + 1)).epsilon(1e-9));
    CHECK(r.monotone);
    const auto m = compute_L1(v, g, {L1Method::Mask, 1e-3});
    CHECK(std::abs(m.L1 - 0.5) <= g.spacing);
    // interior nodes sit at least one cell inside each corner
    CHECK(std::abs(m.L1_tilde - std::sqrt(n * n + 1)) <= 2 * std::sqrt(2.0) * g.spacing);
  }
}

TEST_CASE("L1 of a constant square is its inradius") {
  const Potential v{constant_height(rect_domain(6, 6))};
  const auto r = compute_L1(v, GridSpec::covering(v.domain(), 1.0 / 32));
  CHECK(r.L1 == doctest::Approx(inradius(v.domain())).epsilon(1e-3));
}

TEST_CASE("L1 is a fixed point of the sublevel inradius") {
  const Potential v{cone_height(rect_domain(4, 4), {2, 2}, 0.3)};
  const GridSpec g = GridSpec::covering(v.domain(), 1.0 / 64);
  const auto r = compute_L1(v, g);
  CHECK(sublevel_inradius(v, g, r.L1, L1Method::Polygon) >= r.L1);
  CHECK(sublevel_inradius(v, g, r.L1 * 1.002, L1Method::Polygon) < r.L1 * 1.002);
  CHECK(r.monotone);
  // a disc of radius (1 - (1+L^-2)^(-1/2))/s, clipped by nothing here
  const double c = 1.0 / (r.L1 * r.L1);
  CHECK((1.0 - 1.0 / std::sqrt(1.0 + c)) / 0.3 == doctest::Approx(r.L1).epsilon(2e-3));
}

TEST_CASE("resolution too coarse") {
  const Potential v{constant_height(rect_domain(4, 1))};
  try {
    compute_L1(v, GridSpec::covering(v.domain(), 0.6));
    FAIL("expected ResolutionTooCoarse");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ResolutionTooCoarse);
  }
}

TEST_CASE("orientation") {
  const auto base = rect_domain(8, 1);
  const Potential aligned{constant_height(base)};
  const auto o = orient_domain(aligned, 0.5);
  CHECK(o.theta == 0.0);
  CHECK(o.width_y == doctest::Approx(1.0));
  for (double t : {0.3, -0.7, 1.2}) {
    const Potential tilted{rotate_height(aligned.height, t)};
    const auto ot = orient_domain(tilted, 0.5);
    double d = ot.theta + t;
    while (d > oracle::pi / 2) d -= oracle::pi;
    while (d <= -oracle::pi / 2) d += oracle::pi;
    CHECK(std::abs(d) <= oracle::pi / 720 + 1e-12);
    CHECK(ot.width_y <= ot.width_x);
    CHECK(ot.width_y == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(ot.theta > -oracle::pi / 2);
    CHECK(ot.theta <= oracle::pi / 2);
  }
}

TEST_CASE("longest run against brute force") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> mu(1 + trial % 37);
    for (auto& x : mu) x = u(rng);
    const double level = u(rng);
    const Run r = longest_run(mu, level);
    const auto b = oracle::brute_window(mu, level);
    CHECK(r.count == b.second);
    if (b.second > 0) CHECK(r.begin == b.first);
  }
}

TEST_CASE("L2 of a quadratic profile") {
  const double dx = 0.01;
  std::vector<double> mu;
  for (int k = 0; k <= 2000; ++k) {
    const double x = k * dx - 10.0;
    mu.push_back(3.0 + 0.05 * x * x);
  }
  const MuProfile p = synthetic(mu, dx);
  const auto r = compute_L2(p, 0.1, 100.0);
  CHECK_FALSE(r.comparable);
  CHECK(r.monotone);
  const double ref = oracle::brute_L2(mu, dx, 1e-4);
  CHECK(r.L2 == doctest::Approx(ref).epsilon(2e-3));
  // continuum: 2*sqrt(L^-2/a) = L gives L = (4/a)^(1/4)
  CHECK(r.L2 == doctest::Approx(std::pow(4.0 / 0.05, 0.25)).epsilon(0.01));
  CHECK(r.window.lo <= p.x_star);
  CHECK(r.window.hi >= p.x_star);
  CHECK(r.sup_mu_in_window <= p.mu_star + 1.0 / (r.L2 * r.L2) + 1e-12);
}

TEST_CASE("L2 of random profiles") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double dx = 0.05 + 0.2 * u(rng);
    std::vector<double> mu(40 + trial * 5);
    for (std::size_t k = 0; k < mu.size(); ++k) mu[k] = 1.0 + 2.0 * u(rng) * u(rng);
    const auto r = compute_L2(synthetic(mu, dx), 0.01, 1.0);
    CHECK(r.monotone);
    CHECK(r.L2 == doctest::Approx(oracle::brute_L2(mu, dx, 1e-4)).epsilon(2e-3));
  }
}

TEST_CASE("comparable case takes L2 = L1") {
  std::vector<double> mu(100, 2.0);
  const MuProfile p = synthetic(mu, 0.1);
  const auto r = compute_L2(p, 0.5, 3.0);
  CHECK(r.comparable);
  CHECK(r.L2 == 0.5);
  CHECK(r.window.length() == doctest::Approx(0.5));
  CHECK_THROWS_AS(compute_L2(MuProfile{}, 0.5, 3.0), Error);
}

TEST_CASE("scale bounds") {
  ScaleReport s;
  s.L1 = 0.5;
  s.L1_tilde = std::sqrt(65.0);
  s.L2 = 3.0;
  auto b = check_scale_bounds(s, 0.5);
  REQUIRE(b.size() == 4);
  for (const auto& c : b) CHECK(c.pass);
  CHECK(b[1].value == doctest::Approx(0.5 / std::pow(0.5, 0.2)));
  s.L2 = 40.0;  // beyond K * L1_tilde
  b = check_scale_bounds(s, 0.5);
  CHECK_FALSE(b[3].pass);
  s.L1 = 0.6;  // above N1
  CHECK_FALSE(check_scale_bounds(s, 0.5)[0].pass);
}

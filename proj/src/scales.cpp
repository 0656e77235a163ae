#include "gstate/scales.hpp"

#include <algorithm>
#include <cmath>

#include "gstate/error.hpp"

namespace gstate {

double sublevel_inradius(const Potential& v, const GridSpec& grid, double L, L1Method method) {
  const double c = 1.0 / (L * L);
  if (method == L1Method::Polygon) return hull_inradius(sublevel_polygon(v, c));
  const RegionMask m = sublevel_region(v, c, grid);
  if (m.count() == 0) return 0.0;
  return inradius(m);
}

namespace {

bool samples_monotone(const std::vector<PredicateSample>& s) {
  double max_true = -1.0, min_false = std::numeric_limits<double>::infinity();
  for (const auto& p : s) {
    if (p.holds) max_true = std::max(max_true, p.L);
    else min_false = std::min(min_false, p.L);
  }
  return max_true < min_false;
}

}  // namespace

L1Result compute_L1(const Potential& v, const GridSpec& grid, const L1Options& opts) {
  L1Result r;
  r.method = opts.method;
  auto P = [&](double L) {
    const bool ok = sublevel_inradius(v, grid, L, opts.method) >= L;
    r.samples.push_back({L, ok});
    return ok;
  };
  double lo = grid.spacing;
  double hi = diameter(v.domain());
  if (!P(lo)) throw Error(ErrorCode::ResolutionTooCoarse, "sublevel inradius is below the grid spacing");
  if (P(hi)) {
    lo = hi;
  } else {
    while (hi - lo > opts.rel_tol * lo) {
      const double mid = 0.5 * (lo + hi);
      (P(mid) ? lo : hi) = mid;
    }
  }
  // A few extra probes across the bracket for the monotonicity record.
  const double top = diameter(v.domain());
  for (int k = 0; k <= 6; ++k) P(grid.spacing * std::pow(top / grid.spacing, k / 6.0));
  r.monotone = samples_monotone(r.samples);
  r.L1 = lo;
  const double c = 1.0 / (lo * lo);
  if (opts.method == L1Method::Polygon) {
    r.L1_tilde = hull_diameter(sublevel_polygon(v, c));
  } else {
    r.L1_tilde = diameter(sublevel_region(v, c, grid));
  }
  return r;
}

Oriented orient_domain(const Potential& v, double L1, const WidthOptions& opts) {
  const auto poly = sublevel_polygon(v, 1.0 / (L1 * L1));
  const WidthResult w = hull_min_width(poly, opts);
  // Rotating by -phi carries the minimal-width normal onto the y axis.
  double theta = w.angle <= std::numbers::pi / 2.0 ? -w.angle : std::numbers::pi - w.angle;
  if (theta <= -std::numbers::pi / 2.0) theta += std::numbers::pi;
  if (theta == 0.0) theta = 0.0;  // no negative zero in reports
  Oriented o{v, theta, 0.0, 0.0};
  if (theta != 0.0) o.potential.height = rotate_height(v.height, theta);
  const auto rotated = sublevel_polygon(o.potential, 1.0 / (L1 * L1));
  o.width_y = width_along(rotated, 0.0);
  o.width_x = width_along(rotated, std::numbers::pi / 2.0);
  return o;
}

Run longest_run(const std::vector<double>& mu, double level) {
  Run best;
  std::size_t start = 0, len = 0;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    if (mu[k] <= level) {
      if (len == 0) start = k;
      ++len;
      if (len > best.count) best = {start, len};
    } else {
      len = 0;
    }
  }
  return best;
}

L2Result compute_L2(const MuProfile& profile, double L1, double L1_tilde, double C_tilde, double rel_tol) {
  if (profile.columns.empty()) throw Error(ErrorCode::EmptyDomain, "empty profile");
  const double dx = profile.grid.spacing;
  const std::vector<double> mu = profile.values();
  L2Result r;
  auto window_of = [&](Run run) {
    return Interval{profile.columns[run.begin].x - 0.5 * dx, profile.columns[run.begin + run.count - 1].x + 0.5 * dx};
  };
  auto sup_in = [&](Interval I) {
    double s = -std::numeric_limits<double>::infinity();
    for (const auto& c : profile.columns)
      if (c.x >= I.lo && c.x <= I.hi) s = std::max(s, c.mu);
    return s;
  };
  if (L1_tilde <= C_tilde * L1) {
    r.comparable = true;
    r.L2 = L1;
    r.window = {profile.x_star - 0.5 * L1, profile.x_star + 0.5 * L1};
    r.sup_mu_in_window = sup_in(r.window);
    return r;
  }
  auto Q = [&](double L) {
    const bool ok = static_cast<double>(longest_run(mu, profile.mu_star + 1.0 / (L * L)).count) * dx >= L;
    r.samples.push_back({L, ok});
    return ok;
  };
  double lo = dx;
  double hi = static_cast<double>(mu.size()) * dx;
  Q(lo);
  if (Q(hi)) {
    lo = hi;
  } else {
    while (hi - lo > rel_tol * lo) {
      const double mid = 0.5 * (lo + hi);
      (Q(mid) ? lo : hi) = mid;
    }
  }
  r.monotone = samples_monotone(r.samples);
  r.L2 = lo;
  r.window = window_of(longest_run(mu, profile.mu_star + 1.0 / (lo * lo)));
  r.sup_mu_in_window = sup_in(r.window);
  return r;
}

std::vector<BoundCheck> check_scale_bounds(const ScaleReport& r, double N1, const ScaleBoundOptions& o) {
  std::vector<BoundCheck> out;
  out.push_back({"L1_over_N1", r.L1 / N1, 1.0 + o.tol, r.L1 <= N1 * (1.0 + o.tol), true});
  const double lower1 = r.L1 / std::pow(N1, 0.2);
  out.push_back({"L1_over_N1_fifth", lower1, o.floor, lower1 >= o.floor, false});
  const double lower2 = r.L2 / (std::cbrt(r.L1_tilde) * std::pow(r.L1, 2.0 / 3.0));
  out.push_back({"L2_over_L1t_third_L1_two_thirds", lower2, o.floor, lower2 >= o.floor, false});
  const double upper = r.L2 / r.L1_tilde;
  out.push_back({"L2_over_L1_tilde", upper, o.K, upper <= o.K, true});
  return out;
}

}  // namespace gstate

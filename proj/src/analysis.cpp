#include "gstate/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include "gstate/error.hpp"

namespace gstate {

std::string_view to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skip: return "skip";
    case CheckStatus::Info: return "info";
  }
  return "info";
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

CheckResult check(std::string name, std::string statement) {
  CheckResult c;
  c.name = std::move(name);
  c.statement = std::move(statement);
  return c;
}

CheckStatus verdict(bool ok) { return ok ? CheckStatus::Pass : CheckStatus::Fail; }

bool in_band(double v, double k) { return v >= 1.0 / k && v <= k; }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

Gradient grid_gradient(const std::vector<double>& u, const std::vector<std::uint8_t>& mask, const GridSpec& grid,
                       int i, int j) {
  auto on = [&](int a, int b) { return a >= 0 && b >= 0 && a < grid.nx && b < grid.ny && mask[grid.index(a, b)]; };
  auto val = [&](int a, int b) { return on(a, b) ? u[grid.index(a, b)] : 0.0; };
  const double h = grid.spacing;
  auto partial = [&](int di, int dj) {
    const bool f = on(i + di, j + dj), b = on(i - di, j - dj);
    if (f && !b) return (val(i + di, j + dj) - val(i, j)) / h;
    if (b && !f) return (val(i, j) - val(i - di, j - dj)) / h;
    return (val(i + di, j + dj) - val(i - di, j - dj)) / (2.0 * h);
  };
  return {partial(1, 0), partial(0, 1)};
}

CheckResult verify_scales(const ScaleReport& s, const L1Result& l1, const L2Result& l2, const Oriented& o,
                          double spacing, const Tolerances& tol) {
  CheckResult c = check("scale_invariants",
                        "bisection predicates monotone; L2 >= L1 - spacing; |I| >= L2 - spacing; "
                        "sup_I mu <= mu* + L2^-2 when elongated; y-width <= x-width + 2 spacing after rotation");
  const double ilen = s.I.length();
  c.measured = {{"L2_over_L1", s.L2 / s.L1},
                {"I_length_over_L2", ilen / s.L2},
                {"width_y_minus_width_x_over_spacing", (o.width_y - o.width_x) / spacing},
                {"L1_tilde_over_L1", s.L1_tilde / s.L1},
                {"sup_I_mu_excess_times_L2sq", (l2.sup_mu_in_window - s.mu_star) * s.L2 * s.L2}};
  c.thresholds = {{"C_tilde", tol.C_tilde}};
  bool ok = l1.monotone && l2.monotone;
  ok = ok && s.L2 >= s.L1 - spacing && ilen >= s.L2 - spacing;
  ok = ok && o.width_y <= o.width_x + 2.0 * spacing;
  if (!s.comparable)
    ok = ok && l2.sup_mu_in_window <= s.mu_star + 1.0 / (s.L2 * s.L2) + 1e-9 * (1.0 + s.mu_star);
  c.status = verdict(ok);
  c.notes = s.comparable ? "comparable case: L2 = L1 and I is centred at x*" : "elongated case";
  return c;
}

std::vector<CheckResult> verify_scale_bounds(const ScaleReport& s, const Tolerances& tol) {
  ScaleBoundOptions o;
  o.K = tol.scale_K;
  o.floor = tol.scale_floor;
  o.tol = tol.bisection_rel_tol;
  std::vector<CheckResult> out;
  for (const auto& b : check_scale_bounds(s, s.N1, o)) {
    CheckResult c = check("scale_bound." + b.name, b.upper ? "measured ratio <= threshold" : "measured ratio >= floor");
    c.measured = {{b.name, b.value}};
    c.thresholds = {{b.upper ? "max" : "min", b.threshold}};
    c.status = verdict(b.pass);
    out.push_back(std::move(c));
  }
  return out;
}

CheckResult verify_height(const HeightReport& h) {
  CheckResult c = check("height_function", "max h = 1, 0 <= h <= 1, midpoint concavity on random pairs");
  c.measured = {{"max_h", h.max_h},
                {"min_h", h.min_h},
                {"concavity_pairs", static_cast<double>(h.concavity_pairs)},
                {"concavity_violations", static_cast<double>(h.concavity_violations)},
                {"exterior_nodes", static_cast<double>(h.exterior_nodes)}};
  c.thresholds = {{"max_h_tolerance", 1e-6}, {"midpoint_slack", 1e-9}};
  c.status = verdict(h.pass());
  c.notes = "grid nodes with h < 1e-4 are treated as exterior (Dirichlet)";
  return c;
}

CheckResult verify_eigensolution(const EigenPair2D& pair, const Operator2D& op) {
  CheckResult c = check("eigensolution", "residual <= 1e-8, lambda >= 1, u > 0 on the region, max of u away from the region boundary, Rayleigh quotient = lambda");
  const GridSpec& g = op.grid();
  // Far tails sit below the solver's absolute accuracy; sign noise there is
  // judged against the eigenvector tolerance, not zero.
  constexpr double kSignNoise = 1e-6;
  std::size_t nonpositive = 0, best = 0;
  double mx = -1.0, mn = 1.0;
  for (std::size_t k : op.nodes()) {
    if (pair.u[k] <= 0.0) ++nonpositive;
    mn = std::min(mn, pair.u[k]);
    if (pair.u[k] > mx) {
      mx = pair.u[k];
      best = k;
    }
  }
  const int bi = static_cast<int>(best % g.nx), bj = static_cast<int>(best / g.nx);
  auto on = [&](int a, int b) { return a >= 0 && b >= 0 && a < g.nx && b < g.ny && op.mask()[g.index(a, b)]; };
  const bool interior = on(bi - 1, bj) && on(bi + 1, bj) && on(bi, bj - 1) && on(bi, bj + 1);
  const double rq = rayleigh_quotient(op, pair.u);
  const double rq_gap = std::abs(rq - pair.lambda) / std::max(1.0, pair.lambda);
  c.measured = {{"residual", pair.residual},
                {"lambda", pair.lambda},
                {"nonpositive_nodes", static_cast<double>(nonpositive)},
                {"min_u", mn},
                {"rayleigh_gap", rq_gap},
                {"outer_iterations", static_cast<double>(pair.outer_iterations)}};
  c.thresholds = {{"residual", 1e-8}, {"rayleigh_gap", 1e-10}, {"min_u", -kSignNoise}};
  c.status = verdict(pair.residual <= 1e-8 && pair.lambda >= 1.0 && mn > -kSignNoise && interior && rq_gap <= 1e-10);
  if (nonpositive) c.notes = std::to_string(nonpositive) + " nodes at or below 0 within the sign-noise band";
  if (!interior) c.notes += std::string(c.notes.empty() ? "" : "; ") + "maximum sits next to the region boundary";
  return c;
}

std::vector<CheckResult> verify_eigenvalue_bounds(double lambda, double mu, double L1, double L2, double spacing,
                                                  const Tolerances& tol) {
  CheckResult s = check("eigenvalue_sandwich", "mu - 10 spacing^2 lambda <= lambda and (lambda - mu) L2^2 <= C_max");
  const double eps = 10.0 * spacing * spacing * lambda;
  const double cm = (lambda - mu) * L2 * L2;
  s.measured = {{"C_meas", cm}, {"lower_gap_over_eps", (lambda - mu) / eps}};
  s.thresholds = {{"C_max", tol.C_max}, {"eps_disc", eps}};
  s.status = verdict(lambda >= mu - eps && cm <= tol.C_max);
  CheckResult one = check("eigenvalue_above_one", "lambda >= 1; (lambda - 1) L1^2 reported");
  one.measured = {{"lambda_minus_one_L1sq", (lambda - 1.0) * L1 * L1}};
  one.thresholds = {{"lambda_min", 1.0}};
  one.status = verdict(lambda >= 1.0);
  return {s, one};
}

std::vector<CheckResult> verify_mu_profile(const MuProfile& section, const Potential& v, double L1) {
  CheckResult conv = check("mu_convexity", "second differences of mu(x) >= -max(1e-8, 10 dx^2 |mu|) on uncapped sections; mu > 1");
  const auto& cols = section.columns;
  const double dx = section.grid.spacing;
  std::size_t tested = 0, bad = 0, below_one = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (!cols[k].capped && !(cols[k].mu > 1.0)) ++below_one;
    if (k == 0 || k + 1 >= cols.size()) continue;
    if (cols[k - 1].capped || cols[k].capped || cols[k + 1].capped) continue;
    if (cols[k + 1].i != cols[k].i + 1 || cols[k - 1].i != cols[k].i - 1) continue;
    const double d2 = cols[k + 1].mu - 2.0 * cols[k].mu + cols[k - 1].mu;
    const double t = std::max(1e-8, 10.0 * dx * dx * std::abs(cols[k].mu));
    ++tested;
    worst = std::min(worst, d2 / t);
    if (d2 < -t) ++bad;
  }
  conv.measured = {{"tested", static_cast<double>(tested)},
                   {"violations", static_cast<double>(bad)},
                   {"worst_second_difference_over_tol", tested ? worst : 0.0}};
  conv.status = verdict(bad == 0 && below_one == 0);

  CheckResult range = check("mu_vs_L1", "1 + 1/(C L1^2) <= mu(x) <= 1 + C/L1^2 on the middle half of the projection of the L1 sublevel set");
  const auto poly = sublevel_polygon(v, 1.0 / (L1 * L1));
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  for (const Point& p : poly) {
    xlo = std::min(xlo, p.x);
    xhi = std::max(xhi, p.x);
  }
  const double a = xlo + 0.25 * (xhi - xlo), b = xhi - 0.25 * (xhi - xlo);
  double c_lo = 0.0, c_hi = 0.0;
  std::size_t n = 0;
  for (const auto& c : cols) {
    if (c.capped || c.x < a || c.x > b) continue;
    const double g = (c.mu - 1.0) * L1 * L1;
    c_lo = std::max(c_lo, 1.0 / g);
    c_hi = std::max(c_hi, g);
    ++n;
  }
  range.measured = {{"C_lower", c_lo}, {"C_upper", c_hi}, {"sections", static_cast<double>(n)}};
  range.status = n ? CheckStatus::Info : CheckStatus::Skip;
  if (!n) range.notes = "no section inside the middle half";
  return {conv, range};
}

std::vector<double> carleman_allowance(const EigenPair2D& pair, const Operator2D& op) {
  const GridSpec& g = op.grid();
  const auto p = op.to_padded(pair.u);
  std::vector<double> ap;
  op.apply(p, ap);
  std::vector<double> out(static_cast<std::size_t>(g.nx), 0.0);
  for (std::size_t k : op.nodes()) {
    const int i = static_cast<int>(k % g.nx), j = static_cast<int>(k / g.nx);
    const std::size_t q = op.padded_index(i, j);
    const double r = ap[q] - pair.lambda * p[q];
    out[i] += 2.0 * g.spacing * std::abs(pair.u[k] * r);
  }
  return out;
}

std::vector<double> column_mu(const MuProfile& lattice) {
  std::vector<double> mu(static_cast<std::size_t>(lattice.grid.nx), kNaN);
  for (const auto& c : lattice.columns)
    if (!c.capped) mu[c.i] = c.mu;
  return mu;
}

std::vector<CheckResult> verify_carleman_decay(const std::vector<double>& x, const std::vector<double>& H,
                                               const std::vector<double>& mu, double lambda, double L2,
                                               double x_star, double spacing,
                                               const std::vector<double>& allowance, bool elongated,
                                               const Tolerances& tol) {
  const std::size_t n = H.size();
  double A = 0.0;
  for (double h : H) A = std::max(A, h);
  double max_gap = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (std::isfinite(mu[i])) max_gap = std::max(max_gap, std::abs(mu[i] - lambda));
  const double tol_H = 10.0 * spacing * spacing * A * max_gap;

  CheckResult ineq = check("carleman_inequality", "H''(x) >= 2 (mu(x) - lambda) H(x) - tol at nodes with H > 1e-12 A");
  std::size_t tested = 0, held = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!std::isfinite(mu[i]) || !(H[i] > 1e-12 * A)) continue;
    const double d2 = (H[i + 1] - 2.0 * H[i] + H[i - 1]) / (spacing * spacing);
    const double rhs = 2.0 * (mu[i] - lambda) * H[i];
    const double slack = tol_H + (allowance.empty() ? 0.0 : allowance[i]);
    ++tested;
    if (d2 >= rhs - slack) ++held;
    worst = std::min(worst, (d2 - rhs) / std::max(A * max_gap, 1e-300));
  }
  const double frac = tested ? static_cast<double>(held) / static_cast<double>(tested) : 0.0;
  ineq.measured = {{"tested", static_cast<double>(tested)},
                   {"fraction_holding", frac},
                   {"worst_margin_over_A_gap", tested ? worst : 0.0}};
  ineq.thresholds = {{"fraction", tol.carleman_fraction}, {"tol_H", tol_H}};
  ineq.status = tested ? verdict(frac >= tol.carleman_fraction) : CheckStatus::Skip;
  if (!tested) ineq.notes = "no column with a finite section eigenvalue";

  CheckResult decay = check("carleman_decay", "log H(x) decays linearly in |x - x*| beyond C L2 with rate in [0.1/L2, 10/L2]");
  std::vector<double> d, lh;
  for (std::size_t i = 0; i < n; ++i) {
    const double dist = std::abs(x[i] - x_star);
    if (dist >= tol.window_C * L2 && H[i] > 1e-12 * A) {
      d.push_back(dist);
      lh.push_back(std::log(H[i]));
    }
  }
  if (d.size() < 3) {
    decay.status = CheckStatus::Skip;
    decay.notes = "fewer than 3 nodes beyond C L2 from x*";
  } else {
    double md = 0.0, ml = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
      md += d[k];
      ml += lh[k];
    }
    md /= static_cast<double>(d.size());
    ml /= static_cast<double>(d.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
      sxy += (d[k] - md) * (lh[k] - ml);
      sxx += (d[k] - md) * (d[k] - md);
    }
    const double rate = sxx > 0.0 ? -sxy / sxx : kNaN;
    decay.measured = {{"rate_times_L2", rate * L2}, {"points", static_cast<double>(d.size())}};
    decay.thresholds = {{"min_rate_times_L2", 0.1}, {"max_rate_times_L2", 10.0}};
    if (elongated) {
      decay.status = verdict(rate * L2 >= 0.1 && rate * L2 <= 10.0);
    } else {
      decay.status = CheckStatus::Info;
      decay.notes = "comparable case: the window is of the size of the domain, rate reported only";
    }
  }
  return {ineq, decay};
}

std::vector<CheckResult> verify_mass_bounds(const EigenPair2D& pair, const Operator2D& op, const HProfile& H,
                                            const ScaleReport& s, double x_star, const Tolerances& tol) {
  const GridSpec& g = op.grid();
  const double a2 = g.spacing * g.spacing;
  const double half = 3.0 * tol.window_C * s.L2;
  double total = 0.0, wmass = 0.0, wdx = 0.0, wgrad = 0.0;
  for (std::size_t k : op.nodes()) {
    const int i = static_cast<int>(k % g.nx), j = static_cast<int>(k / g.nx);
    const double u = pair.u[k];
    total += u * u * a2;
    if (std::abs(g.node(i, j).x - x_star) > half) continue;
    const Gradient gr = grid_gradient(pair.u, op.mask(), g, i, j);
    wmass += u * u * a2;
    wdx += gr.dx * gr.dx * a2;
    wgrad += (gr.dx * gr.dx + gr.dy * gr.dy) * a2;
  }
  const double L1 = s.L1, L2 = s.L2;
  CheckResult m = check("mass_total", "integral of u^2 <= C L1 L2 (ratio reported)");
  m.measured = {{"mass_over_L1L2", total / (L1 * L2)}};
  m.status = CheckStatus::Info;

  CheckResult a = check("cross_section_mass", "A = max_x H(x) comparable to L1");
  a.measured = {{"A_over_L1", H.A_max / L1}};
  a.thresholds = {{"min", tol.mass_floor}, {"max", tol.mass_ceiling}};
  a.status = verdict(H.A_max / L1 >= tol.mass_floor && H.A_max / L1 <= tol.mass_ceiling);

  const std::string window = "sharp window |x - x*| <= 3 C L2";
  CheckResult w = check("window_mass", "integral of u^2 over the window <= C L1 L2 (ratio reported)");
  w.measured = {{"mass_over_L1L2", wmass / (L1 * L2)}};
  w.status = CheckStatus::Info;
  w.notes = window;
  CheckResult dx = check("window_dx_energy", "integral of (d_x u)^2 over the window <= C L1 / L2 (ratio reported)");
  dx.measured = {{"energy_L2_over_L1", wdx * L2 / L1}};
  dx.status = CheckStatus::Info;
  dx.notes = window;
  CheckResult gr = check("window_gradient_energy", "integral of |grad u|^2 over the window <= C L2 / L1 (ratio reported)");
  gr.measured = {{"energy_L1_over_L2", wgrad * L1 / L2}};
  gr.status = CheckStatus::Info;
  gr.notes = window;
  return {m, a, w, dx, gr};
}

std::vector<CheckResult> verify_level_shape(const EigenPair2D& pair, const Potential& v, const GridSpec& grid,
                                            const ScaleReport& s, const std::vector<double>& levels,
                                            const Tolerances& tol) {
  std::vector<CheckResult> out;
  const double L1 = s.L1, L2 = s.L2, K = tol.K_shape;
  const auto well = sublevel_polygon(v, tol.agmon_C / (L1 * L1));
  std::optional<ConvexDomain> well_dom;
  try {
    if (well.size() >= 3) well_dom = ConvexDomain::from_polygon(convex_hull(well));
  } catch (const Error&) {
  }
  for (double c : levels) {
    CheckResult r = check("level_shape@" + fmt(c),
                          "superlevel set {u >= c}: y-extent/L1, x-extent/L2, inradius/L1, diameter/L2 and John axes in [1/K, K]; hull ratio above threshold");
    if (!(c > tol.level_margin && c < 1.0 - tol.level_margin)) {
      r.status = CheckStatus::Skip;
      r.notes = "level outside (margin, 1 - margin)";
      out.push_back(std::move(r));
      continue;
    }
    const LevelSetReport ls = level_set(pair, grid, c);
    const double ratios[6] = {ls.y_extent / L1, ls.x_extent / L2, ls.inradius / L1, ls.diameter / L2,
                              2.0 * ls.john.ellipse.minor / L1, 2.0 * ls.john.ellipse.major / L2};
    bool ok = ls.hull.pass();
    for (double q : ratios) ok = ok && in_band(q, K);
    double dist = 0.0;
    if (well_dom) {
      dist = std::numeric_limits<double>::infinity();
      for (const auto& seg : ls.contour)
        for (Point p : {seg.a, seg.b}) dist = std::min(dist, std::max(0.0, well_dom->inward_distance(p)));
    }
    r.measured = {{"y_extent_over_L1", ratios[0]},
                  {"x_extent_over_L2", ratios[1]},
                  {"inradius_over_L1", ratios[2]},
                  {"diameter_over_L2", ratios[3]},
                  {"john_minor_axis_over_L1", ratios[4]},
                  {"john_major_axis_over_L2", ratios[5]},
                  {"john_dilation", ls.john.dilation},
                  {"hull_ratio", ls.hull.ratio},
                  {"distance_to_potential_level_over_L1", dist / L1}};
    r.thresholds = {{"K_shape", K}, {"hull_threshold", ls.hull.threshold}};
    r.status = verdict(ok);
    out.push_back(std::move(r));
  }

  CheckResult e = check("eccentricity", "ecc(W_c) = diameter/inradius moves from ecc(domain) toward L2/L1; ecc(W_0.5) L1/L2 in [1/K, K] when elongated");
  const double ecc_domain = diameter(v.domain()) / inradius(v.domain());
  e.measured = {{"ecc_domain", ecc_domain}};
  double ecc_half = kNaN;
  for (double c : {0.01, 0.1, 0.25, 0.5, 0.75}) {
    try {
      const LevelSetReport ls = level_set(pair, grid, c);
      e.measured.push_back({"ecc@" + fmt(c), ls.eccentricity});
      if (c == 0.5) ecc_half = ls.eccentricity;
    } catch (const Error&) {
    }
  }
  const double rel = ecc_half * L1 / L2;
  e.measured.push_back({"ecc_half_over_L2_L1", rel});
  e.thresholds = {{"K_shape", K}};
  if (s.comparable) {
    e.status = CheckStatus::Info;
    e.notes = "comparable case";
  } else {
    e.status = verdict(in_band(rel, K));
  }
  out.push_back(std::move(e));
  return out;
}

std::vector<CheckResult> verify_max_and_gradients(const EigenPair2D& pair, const Operator2D& op,
                                                  const ScaleReport& s, const Tolerances& tol) {
  const GridSpec& g = op.grid();
  const double L1 = s.L1, L2 = s.L2;
  std::vector<CheckResult> out;
  std::size_t best = op.nodes().front();
  for (std::size_t k : op.nodes())
    if (pair.u[k] > pair.u[best]) best = k;
  const int bi = static_cast<int>(best % g.nx), bj = static_cast<int>(best / g.nx);
  const Point star = g.node(bi, bj);

  CheckResult loc = check("max_location", "V(argmax u) - lambda <= -c* L1^-2");
  const double cstar = -(op.potential()[best] - pair.lambda) * L1 * L1;
  loc.measured = {{"c_star", cstar}};
  loc.thresholds = {{"c_star_floor", tol.c_star_floor}};
  loc.status = verdict(cstar >= tol.c_star_floor);
  out.push_back(loc);

  CheckResult gq = check("gradient_bound", "|grad u| L1 bounded on {u >= 0.25}");
  double gmax = 0.0;
  for (std::size_t k : op.nodes()) {
    if (pair.u[k] < 0.25) continue;
    const Gradient gr = grid_gradient(pair.u, op.mask(), g, static_cast<int>(k % g.nx), static_cast<int>(k / g.nx));
    gmax = std::max(gmax, std::hypot(gr.dx, gr.dy));
  }
  gq.measured = {{"max_grad_times_L1", gmax * L1}};
  gq.thresholds = {{"ceiling", tol.gradient_ceiling}};
  gq.status = verdict(gmax * L1 <= tol.gradient_ceiling);
  out.push_back(gq);

  for (double eps : {0.04, 0.16}) {
    CheckResult c = check("near_max@" + fmt(eps),
                          "inradius of {u >= 1 - eps} over eps^1/2 L1 in [floor, ceiling]; |grad u| on its boundary times L1/eps^1/2 <= ceiling");
    const LevelSetReport ls = level_set(pair, g, 1.0 - eps);
    if (ls.inradius < g.spacing) {
      c.status = CheckStatus::Skip;
      c.notes = "superlevel set below grid resolution";
      out.push_back(std::move(c));
      continue;
    }
    double bmax = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        if (!ls.mask.at(i, j)) continue;
        const bool edge = !(i > 0 && ls.mask.at(i - 1, j)) || !(i + 1 < g.nx && ls.mask.at(i + 1, j)) ||
                          !(j > 0 && ls.mask.at(i, j - 1)) || !(j + 1 < g.ny && ls.mask.at(i, j + 1));
        if (!edge) continue;
        const Gradient gr = grid_gradient(pair.u, op.mask(), g, i, j);
        bmax = std::max(bmax, std::hypot(gr.dx, gr.dy));
      }
    const double se = std::sqrt(eps);
    const double rin = ls.inradius / (se * L1);
    const double rg = bmax * L1 / se;
    c.measured = {{"inradius_over_sqrt_eps_L1", rin}, {"boundary_grad_L1_over_sqrt_eps", rg}};
    c.thresholds = {{"min", tol.mass_floor}, {"max", tol.mass_ceiling}, {"gradient_ceiling", tol.gradient_ceiling}};
    c.status = verdict(rin >= tol.mass_floor && rin <= tol.mass_ceiling && rg <= tol.gradient_ceiling);
    out.push_back(std::move(c));
  }

  CheckResult dx = check("central_dx_bound", "|d_x u| L2 bounded on |x - x_u| <= 0.2 L2, |y - y_u| <= 0.2 L1");
  double dmax = 0.0;
  for (std::size_t k : op.nodes()) {
    const int i = static_cast<int>(k % g.nx), j = static_cast<int>(k / g.nx);
    const Point p = g.node(i, j);
    if (std::abs(p.x - star.x) > 0.2 * L2 || std::abs(p.y - star.y) > 0.2 * L1) continue;
    dmax = std::max(dmax, std::abs(grid_gradient(pair.u, op.mask(), g, i, j).dx));
  }
  dx.measured = {{"max_dx_times_L2", dmax * L2}};
  dx.thresholds = {{"ceiling", tol.gradient_ceiling}};
  dx.status = verdict(dmax * L2 <= tol.gradient_ceiling);
  out.push_back(dx);
  return out;
}

bool AgmonField::empty() const { return std::find(region.begin(), region.end(), 1) == region.end(); }

std::vector<std::pair<int, int>> agmon_stencil(int radius) {
  std::vector<std::pair<int, int>> s;
  for (int a = -radius; a <= radius; ++a)
    for (int b = -radius; b <= radius; ++b)
      if ((a != 0 || b != 0) && std::gcd(std::abs(a), std::abs(b)) == 1) s.emplace_back(a, b);
  return s;
}

double segment_cost(const GridSpec& grid, const std::vector<double>& speed, int i0, int j0, int di, int dj) {
  const int m = std::max(std::abs(di), std::abs(dj));
  double sum = 0.0;
  for (int k = 0; k <= m; ++k) {
    const int i = static_cast<int>(std::lround(i0 + static_cast<double>(di) * k / m));
    const int j = static_cast<int>(std::lround(j0 + static_cast<double>(dj) * k / m));
    const double w = speed[grid.index(i, j)];
    sum += (k == 0 || k == m) ? 0.5 * w : w;
  }
  return sum / m * std::hypot(di, dj) * grid.spacing;
}

std::vector<double> weighted_distance(const GridSpec& grid, const std::vector<std::uint8_t>& allowed,
                                      const std::vector<std::uint8_t>& sources,
                                      const std::vector<double>& speed, int radius) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(grid.size(), inf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (sources[k]) {
      dist[k] = 0.0;
      pq.push({0.0, k});
    }
  const auto stencil = agmon_stencil(radius);
  auto usable = [&](int i, int j) {
    if (i < 0 || j < 0 || i >= grid.nx || j >= grid.ny) return false;
    const std::size_t k = grid.index(i, j);
    return allowed[k] || sources[k];
  };
  while (!pq.empty()) {
    const auto [d, k] = pq.top();
    pq.pop();
    if (d > dist[k]) continue;
    const int i = static_cast<int>(k % grid.nx), j = static_cast<int>(k / grid.nx);
    for (const auto& [di, dj] : stencil) {
      const int ti = i + di, tj = j + dj;
      if (!usable(ti, tj)) continue;
      const std::size_t t = grid.index(ti, tj);
      if (!allowed[t]) continue;  // sources already sit at zero
      const int m = std::max(std::abs(di), std::abs(dj));
      bool clear = true;
      for (int q = 1; q < m && clear; ++q)
        clear = usable(static_cast<int>(std::lround(i + static_cast<double>(di) * q / m)),
                       static_cast<int>(std::lround(j + static_cast<double>(dj) * q / m)));
      if (!clear) continue;
      const double nd = d + segment_cost(grid, speed, i, j, di, dj);
      if (nd < dist[t]) {
        dist[t] = nd;
        pq.push({nd, t});
      }
    }
  }
  return dist;
}

AgmonField agmon_distance(const Operator2D& op, double lambda, double L1, double C) {
  const GridSpec& g = op.grid();
  AgmonField f;
  f.grid = g;
  f.region.assign(g.size(), 0);
  f.sources.assign(g.size(), 0);
  f.nu.assign(g.size(), 0.0);
  const double level = 1.0 + C / (L1 * L1);
  for (std::size_t k : op.nodes()) {
    f.nu[k] = op.potential()[k] - lambda;
    if (op.potential()[k] >= level) f.region[k] = 1;
  }
  for (std::size_t k : op.nodes()) {
    if (f.region[k]) continue;
    const int i = static_cast<int>(k % g.nx), j = static_cast<int>(k / g.nx);
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        const int a = i + di, b = j + dj;
        if (a >= 0 && b >= 0 && a < g.nx && b < g.ny && f.region[g.index(a, b)]) f.sources[k] = 1;
      }
  }
  std::vector<double> speed(g.size(), 0.0);
  for (std::size_t k = 0; k < g.size(); ++k) speed[k] = 0.5 * std::sqrt(std::max(0.0, f.nu[k]));
  f.hstar = weighted_distance(g, f.region, f.sources, speed);
  return f;
}

CheckResult verify_agmon(const EigenPair2D& pair, const AgmonField& field, double L1, double L2,
                         const Tolerances& tol) {
  CheckResult c = check("agmon", "integral over {V >= 1 + C L1^-2} of u^2 exp(2 h*) <= C_agmon L1 L2");
  if (field.empty()) {
    c.status = CheckStatus::Skip;
    c.notes = "region {V >= 1 + C L1^-2} is empty";
    return c;
  }
  const double a2 = field.grid.spacing * field.grid.spacing;
  double weighted = 0.0, plain = 0.0;
  std::size_t excluded = 0, unreachable = 0, used = 0;
  for (std::size_t k = 0; k < field.grid.size(); ++k) {
    if (!field.region[k]) continue;
    const double u = pair.u[k];
    plain += u * u * a2;
    if (!(u > 1e-8)) {
      ++excluded;
      continue;
    }
    if (!std::isfinite(field.hstar[k])) {
      ++unreachable;
      continue;
    }
    ++used;
    weighted += std::exp(2.0 * std::log(u) + 2.0 * field.hstar[k]) * a2;
  }
  const double ratio = weighted / (L1 * L2);
  c.measured = {{"weighted_mass_over_L1L2", ratio},
                {"plain_mass_over_L1L2", plain / (L1 * L2)},
                {"nodes_used", static_cast<double>(used)},
                {"nodes_below_1e-8", static_cast<double>(excluded)},
                {"nodes_unreachable", static_cast<double>(unreachable)}};
  c.thresholds = {{"C_agmon", tol.C_agmon}};
  c.status = verdict(ratio <= tol.C_agmon);
  c.notes = "nodes with u <= 1e-8 are left out of the weighted sum";
  return c;
}

CheckResult verify_dpsi(const Potential& v, const GridSpec& grid, const ScaleReport& s, int samples,
                        const Tolerances& tol) {
  CheckResult c = check("dpsi_dx", "integral of (d_x psi)^2 dy <= C_psi L2^-2 at points in the middle half of I");
  const double len = s.I.length();
  if (len < 4.0 * grid.spacing || samples < 1) {
    c.status = CheckStatus::Skip;
    c.notes = "I shorter than 4 dx";
    return c;
  }
  double worst = 0.0, orth = 0.0;
  int done = 0, edge = 0;
  std::vector<int> seen;
  for (int k = 0; k < samples; ++k) {
    const double t = samples == 1 ? 0.5 : 0.25 + 0.5 * k / (samples - 1);
    const double x = s.I.lo + t * len;
    const int i = static_cast<int>(std::lround((x - grid.origin.x) / grid.spacing));
    try {
      const DpsiResult r = dpsi_dx_l2(v, grid, i);
      worst = std::max(worst, r.value * s.L2 * s.L2);
      orth = std::max(orth, std::abs(r.orthogonality));
      ++done;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::AtDomainEdge) throw;
      ++edge;
    }
  }
  c.measured = {{"max_value_times_L2sq", worst},
                {"max_abs_orthogonality", orth},
                {"samples_evaluated", static_cast<double>(done)},
                {"samples_at_edge", static_cast<double>(edge)}};
  c.thresholds = {{"C_psi", tol.C_psi}};
  if (done == 0) {
    c.status = CheckStatus::Skip;
    c.notes = "every sample fell at the edge of the domain";
    return c;
  }
  c.status = verdict(worst <= tol.C_psi);
  c.notes = "functions extended by zero outside their own cross-section";
  if (edge) c.notes += "; partial coverage: " + std::to_string(edge) + " samples at the domain edge";
  return c;
}

std::vector<CheckResult> verify_log_concavity(const EigenPair2D& pair, const Operator2D& op, const Tolerances& tol) {
  LogConcavityOptions o;
  o.floor = tol.logc_floor;
  const LogConcavityReport r = log_concavity_check(pair.u, op.mask(), op.grid(), o);
  CheckResult lc = check("log_concavity", "second differences of log u along x, y and both diagonals <= 10 spacing max|grad log u| where u > floor, away from the boundary row");
  lc.measured = {{"tested", static_cast<double>(r.tested)},
                 {"violations", static_cast<double>(r.violations)},
                 {"worst_over_tol", r.tolerance > 0.0 ? r.worst / r.tolerance : r.worst},
                 {"boundary_row_tested", static_cast<double>(r.layer_tested)},
                 {"boundary_row_violations", static_cast<double>(r.layer_violations)},
                 {"boundary_row_worst_over_tol", r.tolerance > 0.0 ? r.layer_worst / r.tolerance : r.layer_worst}};
  lc.thresholds = {{"tol_lc", r.tolerance}, {"floor", r.floor}};
  lc.status = verdict(r.violations == 0);
  lc.notes = r.divided ? "second differences divided by the squared step" : "raw second differences";
  lc.notes += "; triples touching the lattice row next to the boundary are reported, not judged";
  CheckResult hull = check("superlevel_convexity", "cell area / hull area of {u >= c} >= 1 - 5 spacing perimeter/area");
  bool ok = true;
  for (std::size_t k = 0; k < r.hull_ratios.size(); ++k) {
    hull.measured.push_back({"ratio@" + fmt(r.hull_levels[k]), r.hull_ratios[k].ratio});
    hull.thresholds.push_back({"threshold@" + fmt(r.hull_levels[k]), r.hull_ratios[k].threshold});
    ok = ok && r.hull_ratios[k].pass();
  }
  hull.status = verdict(ok);
  return {lc, hull};
}

}  // namespace gstate

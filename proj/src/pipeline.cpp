#include "gstate/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace gstate {

namespace fs = std::filesystem;

namespace {

const std::vector<double> kShapeLevels{0.25, 0.5, 0.75};
const std::vector<double> kDumpLevels{0.1, 0.25, 0.5, 0.75, 0.9};
constexpr int kDpsiSamples = 5;

ojson num(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  auto r = std::to_chars(buf, buf + 16, v, 16);
  std::string s(buf, r.ptr);
  return std::string(16 - s.size(), '0') + s;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

std::string u_csv(const Instance& inst) {
  std::string s = "x,y,u\n";
  const GridSpec& g = inst.grid;
  for (std::size_t k : inst.op->nodes()) {
    const int i = static_cast<int>(k % g.nx), j = static_cast<int>(k / g.nx);
    const Point p = g.node(i, j);
    s += format_double(p.x) + "," + format_double(p.y) + "," + format_double(inst.pair.u[k]) + "\n";
  }
  return s;
}

std::string h_csv(const Instance& inst) {
  std::string s = "x,H\n";
  for (std::size_t k = 0; k < inst.H.x.size(); ++k)
    s += format_double(inst.H.x[k]) + "," + format_double(inst.H.H[k]) + "\n";
  return s;
}

std::string mu_csv(const Instance& inst) {
  std::string s = "x,mu_lattice,capped,mu_section\n";
  // Both profiles list nonempty columns; match them by lattice column.
  std::size_t q = 0;
  for (const MuColumn& c : inst.lattice.columns) {
    while (q < inst.section.columns.size() && inst.section.columns[q].i < c.i) ++q;
    const bool has = q < inst.section.columns.size() && inst.section.columns[q].i == c.i;
    s += format_double(c.x) + "," + format_double(c.mu) + "," + (c.capped ? "1" : "0") + "," +
         (has ? format_double(inst.section.columns[q].mu) : std::string()) + "\n";
  }
  return s;
}

std::string level_csv(const LevelSetReport& ls) {
  std::string s = "x0,y0,x1,y1\n";
  for (const Segment& seg : ls.contour)
    s += format_double(seg.a.x) + "," + format_double(seg.a.y) + "," + format_double(seg.b.x) + "," +
         format_double(seg.b.y) + "\n";
  return s;
}

ojson conventions() {
  return ojson::array({
      "nodes with h below 1e-4 are treated as exterior (Dirichlet)",
      "V is capped at 1e8",
      "the surrogate 1D operator uses Dirichlet conditions beyond the ends of the x-projection",
      "mu(x) on lattice columns drives mu_star, x_star, L2 and the surrogate operator; exact cross-sections drive the convexity check",
      "x_star is the leftmost minimiser of the lattice profile",
      "a window of m profile nodes has length m*dx",
      "coordinates in u.csv, H.csv, mu.csv and levelsets are in the rotated frame",
  });
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

Instance prepare_instance(const RunConfig& cfg, Stage stage) {
  const ConvexDomain domain = build_domain(cfg.domain);
  Instance inst(build_potential(cfg.potential, domain));
  inst.N1 = inradius(domain);
  inst.N2 = diameter(domain);

  L1Options lo;
  lo.method = cfg.l1_method;
  lo.rel_tol = cfg.tol.bisection_rel_tol;
  if (cfg.spacing) {
    inst.spacing = *cfg.spacing;
    inst.spacing_overridden = true;
  } else {
    // Probe on a fine lattice first; the resolution rule needs L1.
    const double probe = std::min(1.0, inst.N1) / 256.0;
    const L1Result first = compute_L1(inst.original, GridSpec::covering(domain, probe), lo);
    // L1 is only known to rel_tol, so shave that off to keep spacing <= min(1, L1)/16.
    inst.spacing = std::min(1.0, first.L1) / 16.0 * (1.0 - 2.0 * lo.rel_tol);
  }
  inst.l1 = compute_L1(inst.original, GridSpec::covering(domain, inst.spacing), lo);
  WidthOptions wo;
  wo.resolution = cfg.tol.width_resolution;
  inst.oriented = orient_domain(inst.original, inst.l1.L1, wo);
  inst.potential = inst.oriented.potential;
  inst.grid = GridSpec::covering(inst.potential.domain(), inst.spacing);
  inst.height = validate_height(inst.potential.height, inst.potential.domain(), inst.grid, cfg.seed);

  inst.lattice = mu_profile(inst.potential, inst.grid, cfg.threads);
  inst.section = section_profile(inst.potential, inst.grid, cfg.threads);
  inst.l2 = compute_L2(inst.lattice, inst.l1.L1, inst.l1.L1_tilde, cfg.tol.C_tilde, cfg.tol.bisection_rel_tol);
  inst.A = operator_A_first_pair(inst.lattice);

  ScaleReport& s = inst.scales;
  s.L1 = inst.l1.L1;
  s.L1_tilde = inst.l1.L1_tilde;
  s.theta = inst.oriented.theta;
  s.L2 = inst.l2.L2;
  s.I = inst.l2.window;
  s.comparable = inst.l2.comparable;
  s.C_tilde = cfg.tol.C_tilde;
  s.mu_star = inst.lattice.mu_star;
  s.x_star = inst.lattice.x_star;
  s.N1 = inst.N1;
  s.N2 = inst.N2;
  s.bound_checks = check_scale_bounds(s, inst.N1, {cfg.tol.scale_K, cfg.tol.scale_floor, cfg.tol.bisection_rel_tol});

  if (stage == Stage::Scales) return inst;
  inst.op.emplace(inst.potential, inst.grid);
  inst.pair = first_eig_2d(*inst.op, product_guess(inst));
  inst.H = h_profile(inst.pair, inst.grid);
  return inst;
}

std::vector<double> product_guess(const Instance& inst) {
  const GridSpec& g = inst.grid;
  std::vector<double> init(g.size(), 0.0);
  const auto& cols = inst.lattice.columns;
  if (inst.A.psi.size() != cols.size()) return {};
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const MuColumn& c = cols[k];
    if (c.n < 3) continue;
    const Tridiagonal1D t = column_operator(inst.potential, g, c.i, {c.j0, c.n});
    const EigenPair1D e = first_eigfun_1d(t, first_eig_1d(t));
    for (int q = 0; q < c.n; ++q) init[g.index(c.i, c.j0 + q)] = std::abs(inst.A.psi[k]) * e.psi[q];
  }
  return init;
}

std::vector<CheckResult> run_checks(const Instance& inst, const RunConfig& cfg) {
  std::vector<CheckResult> out;
  auto add = [&](std::vector<CheckResult> v) {
    for (auto& c : v) out.push_back(std::move(c));
  };
  const Tolerances& tol = cfg.tol;
  const ScaleReport& s = inst.scales;
  const Operator2D& op = *inst.op;
  const bool elongated = !s.comparable;
  for (const std::string& g : cfg.checks) {
    if (g == "scales") {
      out.push_back(verify_scales(s, inst.l1, inst.l2, inst.oriented, inst.spacing, tol));
      add(verify_scale_bounds(s, tol));
    } else if (g == "height") {
      out.push_back(verify_height(inst.height));
    } else if (g == "eigen") {
      out.push_back(verify_eigensolution(inst.pair, op));
    } else if (g == "sandwich") {
      add(verify_eigenvalue_bounds(inst.pair.lambda, inst.A.mu, s.L1, s.L2, inst.spacing, tol));
    } else if (g == "mu") {
      add(verify_mu_profile(inst.section, inst.potential, s.L1));
    } else if (g == "carleman") {
      add(verify_carleman_decay(inst.H.x, inst.H.H, column_mu(inst.lattice), inst.pair.lambda, s.L2, s.x_star,
                                inst.spacing, carleman_allowance(inst.pair, op), elongated, tol));
    } else if (g == "mass") {
      add(verify_mass_bounds(inst.pair, op, inst.H, s, s.x_star, tol));
    } else if (g == "level_shape") {
      add(verify_level_shape(inst.pair, inst.potential, inst.grid, s, kShapeLevels, tol));
    } else if (g == "max_gradients") {
      add(verify_max_and_gradients(inst.pair, op, s, tol));
    } else if (g == "log_concavity") {
      add(verify_log_concavity(inst.pair, op, tol));
    } else if (g == "agmon") {
      const AgmonField f = agmon_distance(op, inst.pair.lambda, s.L1, tol.agmon_C);
      out.push_back(verify_agmon(inst.pair, f, s.L1, s.L2, tol));
    } else if (g == "dpsi") {
      out.push_back(verify_dpsi(inst.potential, inst.grid, s, kDpsiSamples, tol));
    }
  }
  return out;
}

ojson scales_json(const Instance& inst) {
  const ScaleReport& s = inst.scales;
  ojson j;
  j["N1"] = num(s.N1);
  j["N2"] = num(s.N2);
  j["L1"] = num(s.L1);
  j["L1_tilde"] = num(s.L1_tilde);
  j["L1_method"] = inst.l1.method == L1Method::Polygon ? "polygon" : "mask";
  j["L1_predicate_monotone"] = inst.l1.monotone;
  j["theta"] = num(s.theta);
  j["width_y"] = num(inst.oriented.width_y);
  j["width_x"] = num(inst.oriented.width_x);
  j["L2"] = num(s.L2);
  j["I"] = ojson::array({num(s.I.lo), num(s.I.hi)});
  j["L2_predicate_monotone"] = inst.l2.monotone;
  j["comparable"] = s.comparable;
  j["C_tilde"] = num(s.C_tilde);
  j["mu_star"] = num(s.mu_star);
  j["x_star"] = num(s.x_star);
  j["mu_A"] = num(inst.A.mu);
  ojson b = ojson::array();
  for (const BoundCheck& c : s.bound_checks)
    b.push_back({{"name", c.name}, {"value", num(c.value)}, {"threshold", num(c.threshold)},
                 {"kind", c.upper ? "upper" : "lower"}, {"pass", c.pass}});
  j["bound_checks"] = b;
  return j;
}

ojson check_json(const CheckResult& c) {
  ojson j;
  j["name"] = c.name;
  j["statement"] = c.statement;
  j["status"] = std::string(to_string(c.status));
  ojson m = ojson::object(), t = ojson::object();
  for (const Measure& x : c.measured) m[x.name] = num(x.value);
  for (const Measure& x : c.thresholds) t[x.name] = num(x.value);
  j["measured"] = m;
  j["thresholds"] = t;
  j["notes"] = c.notes;
  return j;
}

ojson error_json(const Error& e) {
  ojson j;
  j["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
  return j;
}

std::string resolve_output_dir(const RunConfig& cfg) {
  if (const char* env = std::getenv("GSTATE_OUTPUT_DIR"); env && *env) return env;
  return cfg.output_dir;
}

PipelineResult run_pipeline(const RunConfig& cfg, Stage stage, bool write_artifacts) {
  const Instance inst = prepare_instance(cfg, stage);
  PipelineResult res;
  ojson& r = res.report;
  r["config"] = cfg.echo();
  r["stage"] = stage == Stage::Scales ? "scales" : stage == Stage::Solve ? "solve" : "verify";
  ojson in;
  in["hash"] = hex(fnv1a(cfg.domain.dump() + "|" + cfg.potential.dump()));
  in["spacing"] = num(inst.spacing);
  in["spacing_from_config"] = inst.spacing_overridden;
  in["resolution_rule_ok"] = inst.spacing <= std::min(1.0, inst.l1.L1) / 16.0 * (1.0 + 1e-12);
  in["nx"] = inst.grid.nx;
  in["ny"] = inst.grid.ny;
  in["origin"] = ojson::array({num(inst.grid.origin.x), num(inst.grid.origin.y)});
  in["exterior_nodes"] = inst.height.exterior_nodes;
  r["instance"] = in;
  r["scales"] = scales_json(inst);
  if (stage != Stage::Scales) {
    ojson e;
    e["lambda"] = num(inst.pair.lambda);
    e["mu"] = num(inst.A.mu);
    e["C_meas"] = num((inst.pair.lambda - inst.A.mu) * inst.scales.L2 * inst.scales.L2);
    e["residual"] = num(inst.pair.residual);
    e["unknowns"] = inst.op->unknowns();
    e["outer_iterations"] = inst.pair.outer_iterations;
    e["cg_iterations"] = inst.pair.cg_iterations;
    e["H_max"] = num(inst.H.A_max);
    r["eigen"] = e;
  }
  if (stage == Stage::Verify) {
    res.checks = run_checks(inst, cfg);
    ojson arr = ojson::array();
    int counts[4] = {0, 0, 0, 0};
    for (const CheckResult& c : res.checks) {
      arr.push_back(check_json(c));
      ++counts[static_cast<int>(c.status)];
    }
    r["checks"] = arr;
    r["summary"] = {{"pass", counts[0]}, {"fail", counts[1]}, {"skip", counts[2]}, {"info", counts[3]},
                    {"all_pass", counts[1] == 0}};
    res.exit_code = counts[1] == 0 ? 0 : 2;
  }
  r["conventions"] = conventions();
  if (!write_artifacts) return res;

  const fs::path dir = resolve_output_dir(cfg);
  fs::path partial = dir;
  partial += ".partial";
  std::error_code ec;
  fs::remove_all(partial, ec);
  try {
    fs::create_directories(partial);
    write_file(partial / "report.json", r.dump(2) + "\n");
    write_file(partial / "mu.csv", mu_csv(inst));
    if (stage != Stage::Scales) {
      write_file(partial / "u.csv", u_csv(inst));
      write_file(partial / "H.csv", h_csv(inst));
      fs::create_directories(partial / "levelsets");
      for (double c : kDumpLevels) {
        try {
          const LevelSetReport ls = level_set(inst.pair, inst.grid, c);
          write_file(partial / "levelsets" / ("c_" + format_double(c) + ".csv"), level_csv(ls));
        } catch (const Error& e) {
          if (e.code() != ErrorCode::LevelEmpty) throw;
        }
      }
    }
    fs::remove_all(dir, ec);
    fs::rename(partial, dir);
  } catch (const fs::filesystem_error& e) {
    fs::remove_all(partial, ec);
    throw Error(ErrorCode::Io, e.what());
  } catch (...) {
    fs::remove_all(partial, ec);
    throw;
  }
  res.output_dir = dir.string();
  return res;
}

Potential sweep_instance(const std::string& family, double p) {
  if (!(p > 0.0)) throw Error(ErrorCode::InvalidConfig, "sweep parameters must be positive");
  if (family == "constant") {
    const double a = 2.0 * p;
    return Potential{constant_height(ConvexDomain::from_polygon({{0, 0}, {a, 0}, {a, a}, {0, a}}))};
  }
  if (family == "triangle_example") return Potential{triangle_example_height(p, p * p)};
  if (family == "trapezoid") {
    // Half-way between the triangle (top edge collapses) and a rectangle.
    const double n2 = p * p;
    const ConvexDomain d = ConvexDomain::from_polygon({{0, 0}, {n2, 0}, {n2, p / 2.0}, {0, p}});
    return Potential{make_min_affine({AffinePiece{0.5 / n2, 0.0, 0.5}}, d)};
  }
  throw Error(ErrorCode::InvalidConfig, "unknown sweep family '" + family + "'");
}

SweepResult sweep_scaling(const std::string& family, const std::vector<double>& params, int threads,
                          double rel_tol) {
  if (params.size() < 3) throw Error(ErrorCode::SweepTooSmall, "a sweep needs at least 3 parameters");
  for (double p : params) sweep_instance(family, p);  // validate up front

  SweepResult res;
  res.family = family;
  res.rows.resize(params.size());
  std::vector<std::exception_ptr> errors(params.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < params.size();) {
      try {
        const Potential v = sweep_instance(family, params[k]);
        const double n1 = inradius(v.domain());
        L1Options o;
        o.rel_tol = rel_tol;
        const L1Result l1 = compute_L1(v, GridSpec::covering(v.domain(), std::min(1.0, n1) / 64.0), o);
        res.rows[k] = {params[k], n1, diameter(v.domain()), l1.L1, l1.L1_tilde};
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(params.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(res.rows.size());
  for (const SweepRow& r : res.rows) {
    const double x = std::log(r.param), y = std::log(r.L1);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = m * sxx - sx * sx;
  if (!(den > 0.0)) throw Error(ErrorCode::SweepTooSmall, "sweep parameters must not all coincide");
  res.slope = (m * sxy - sx * sy) / den;
  res.intercept = (sy - res.slope * sx) / m;
  return res;
}

ojson sweep_json(const SweepResult& s) {
  ojson j;
  j["family"] = s.family;
  ojson rows = ojson::array();
  for (const SweepRow& r : s.rows)
    rows.push_back({{"param", num(r.param)}, {"N1", num(r.N1)}, {"N2", num(r.N2)}, {"L1", num(r.L1)},
                    {"L1_tilde", num(r.L1_tilde)}});
  j["rows"] = rows;
  j["slope"] = num(s.slope);
  j["intercept"] = num(s.intercept);
  return j;
}

std::string sweep_csv(const SweepResult& s) {
  std::string out = "param,N1,N2,L1,L1_tilde\n";
  for (const SweepRow& r : s.rows)
    out += format_double(r.param) + "," + format_double(r.N1) + "," + format_double(r.N2) + "," +
           format_double(r.L1) + "," + format_double(r.L1_tilde) + "\n";
  return out;
}

OracleComparison oracle_compare(const RunConfig& cfg) {
  Instance inst = prepare_instance(cfg, Stage::Scales);
  const Operator2D op(inst.potential, inst.grid);
  if (op.unknowns() > 4000)
    throw Error(ErrorCode::OracleTooLarge,
                std::to_string(op.unknowns()) + " unknowns; the dense oracle takes at most 4000");
  inst.op.emplace(op);
  const EigenPair2D it = first_eig_2d(op, product_guess(inst));
  const EigenPair2D dense = dense_oracle_2d(op);
  OracleComparison c;
  c.unknowns = op.unknowns();
  c.lambda_iterative = it.lambda;
  c.lambda_dense = dense.lambda;
  for (std::size_t k : op.nodes()) c.max_abs_u_diff = std::max(c.max_abs_u_diff, std::abs(it.u[k] - dense.u[k]));
  return c;
}

}  // namespace gstate

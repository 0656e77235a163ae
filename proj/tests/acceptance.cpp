// Acceptance run: one PASS/FAIL line per criterion. Exit status 1 when any
// line fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gstate/analysis.hpp"
#include "gstate/eig2d.hpp"
#include "gstate/pipeline.hpp"
#include "gstate/sturm1d.hpp"
#include "oracles.hpp"

using namespace gstate;

namespace {

// Pinned tolerances.
constexpr double kRectRelErr = 0.01;
constexpr double kRectSeconds = 10.0;
constexpr int kRandom2D = 10;
constexpr std::size_t kMaxUnknowns = 2500;
constexpr double kOracle2D = 1e-8;
constexpr int kMaxN1D = 200;
constexpr double kOracle1D = 1e-9;
constexpr double kSandwichDisc = 10.0;  // lambda >= mu - 10 spacing^2 lambda
constexpr double kCMax = 50.0;
constexpr double kRectCMeas = 0.1;
constexpr double kConstSlope = 1.0, kConstSlopeTol = 0.05;
constexpr double kTriSlope = 0.2, kTriSlopeTol = 0.08;
constexpr double kSweepSeconds = 300.0;
constexpr double kShapeK = 6.0;
constexpr double kCarlemanFraction = 0.99;
constexpr double kRateMin = 0.1, kRateMax = 10.0;
constexpr double kCStarFloor = 0.01;
constexpr double kPsiMax = 50.0, kRectPsi = 0.1;
constexpr double kAgmonMax = 100.0;

struct SuiteRun {
  std::string name;
  RunConfig cfg;
  PipelineResult result;
  double seconds = 0.0;
};

int failures = 0, passes = 0;

void line(const std::string& id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("%s [%s] %s | %s\n", ok ? "PASS" : "FAIL", id.c_str(), what.c_str(), detail.c_str());
  std::fflush(stdout);
  ok ? ++passes : ++failures;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const CheckResult* find(const std::vector<CheckResult>& cs, const std::string& name) {
  for (const auto& c : cs)
    if (c.name == name) return &c;
  return nullptr;
}

double measured(const CheckResult* c, const std::string& name) {
  if (c)
    for (const auto& m : c->measured)
      if (m.name == name) return m.value;
  return std::numeric_limits<double>::quiet_NaN();
}

double threshold(const CheckResult* c, const std::string& name) {
  if (c)
    for (const auto& m : c->thresholds)
      if (m.name == name) return m.value;
  return std::numeric_limits<double>::quiet_NaN();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const char* kSuite[] = {"rect2", "rect8", "rect40_tent", "cone_square", "triangle_4_64", "hexagon_tilted"};

std::vector<SuiteRun> run_suite() {
  std::vector<SuiteRun> out;
  for (const char* name : kSuite) {
    SuiteRun s;
    s.name = name;
    s.cfg = load_config(std::string(GSTATE_CONFIG_DIR) + "/" + name + ".json");
    const auto t0 = std::chrono::steady_clock::now();
    s.result = run_pipeline(s.cfg, Stage::Verify, false);
    s.seconds = seconds_since(t0);
    out.push_back(std::move(s));
  }
  return out;
}

const SuiteRun& by_name(const std::vector<SuiteRun>& suite, const std::string& name) {
  for (const auto& s : suite)
    if (s.name == name) return s;
  throw std::runtime_error("missing suite instance " + name);
}

void criterion_1(const std::vector<SuiteRun>& suite) {
  const SuiteRun& r = by_name(suite, "rect2");
  const double lambda = r.result.report["eigen"]["lambda"].get<double>();
  const double exact = 1.0 + oracle::pi * oracle::pi / 4.0 + oracle::pi * oracle::pi;
  const double rel = std::abs(lambda - exact) / exact;
  const double dx = r.result.report["instance"]["spacing"].get<double>();
  line("1", rel <= kRectRelErr && r.seconds < kRectSeconds && dx == 1.0 / 64,
       "analytic eigenvalue, rectangle 2x1",
       "lambda=" + num(lambda) + " exact=" + num(exact) + " rel_err=" + num(rel) + " spacing=" + num(dx) +
           " time=" + num(r.seconds) + "s");
}

// Random convex polygon (hull of points on a random ellipse) with a random
// min-affine height; spacing chosen so the lattice region stays small.
Potential random_potential(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double a = 1.0 + 3.0 * u(rng), b = 0.5 + 1.5 * u(rng), rot = oracle::pi * u(rng);
  std::vector<Point> pts;
  const int m = 5 + static_cast<int>(6 * u(rng));
  for (int k = 0; k < m; ++k) {
    const double t = 2.0 * oracle::pi * (k + 0.8 * u(rng)) / m;
    const Point p{a * std::cos(t), b * std::sin(t)};
    pts.push_back(rotate_about(p, {0, 0}, rot));
  }
  const ConvexDomain dom = ConvexDomain::from_polygon(convex_hull(pts));
  std::vector<AffinePiece> pieces;
  const int np = 1 + static_cast<int>(3 * u(rng));
  for (int k = 0; k < np; ++k)
    pieces.push_back({0.4 * (u(rng) - 0.5), 0.4 * (u(rng) - 0.5), 0.6 + 0.8 * u(rng)});
  return Potential{make_min_affine(pieces, dom)};
}

void criterion_2() {
  std::mt19937_64 rng(20240601);
  double worst2 = 0.0;
  std::size_t most = 0, fewest = std::numeric_limits<std::size_t>::max();
  bool ok2 = true;
  for (int trial = 0; trial < kRandom2D; ++trial) {
    const Potential v = random_potential(rng);
    double dx = std::sqrt(v.domain().area() / 2000.0);
    GridSpec g = GridSpec::covering(v.domain(), dx);
    Operator2D op(v, g);
    while (op.unknowns() > kMaxUnknowns) {
      dx *= 1.05;
      g = GridSpec::covering(v.domain(), dx);
      op = Operator2D(v, g);
    }
    std::vector<std::size_t> ids;
    const auto m = oracle::stencil_matrix(g, op.mask(), op.potential(), ids);
    const double ref = oracle::dense_min_eig(m, ids.size());
    const double lambda = first_eig_2d(op).lambda;
    const double err = std::abs(lambda - ref);
    worst2 = std::max(worst2, err);
    ok2 = ok2 && err <= kOracle2D && op.unknowns() > 0;
    most = std::max(most, op.unknowns());
    fewest = std::min(fewest, op.unknowns());
  }
  std::uniform_int_distribution<int> len(3, kMaxN1D);
  std::uniform_real_distribution<double> w(0.0, 100.0), hs(0.005, 0.5);
  double worst1 = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = len(rng);
    std::vector<double> wt(n);
    for (auto& x : wt) x = w(rng);
    const auto t = Tridiagonal1D::from_weights(wt, hs(rng));
    worst1 = std::max(worst1, std::abs(first_eig_1d(t) - oracle::tridiag_min_eig(t)));
  }
  line("2", ok2 && worst1 <= kOracle1D, "oracle equivalence, 2D iterative and 1D bisection",
       "2D: " + std::to_string(kRandom2D) + " instances, unknowns " + std::to_string(fewest) + ".." +
           std::to_string(most) + ", max |dlambda|=" + num(worst2) + "; 1D: 100 instances n<=200, max |dmu|=" +
           num(worst1));
}

void criterion_3(const std::vector<SuiteRun>& suite) {
  bool ok = true;
  std::string detail;
  for (const auto& s : suite) {
    const auto& e = s.result.report["eigen"];
    const double lambda = e["lambda"].get<double>(), mu = e["mu"].get<double>();
    const double dx = s.result.report["instance"]["spacing"].get<double>();
    const double cm = e["C_meas"].get<double>();
    const bool lower = lambda >= mu - kSandwichDisc * dx * dx * lambda;
    bool good = lower && cm <= kCMax;
    if (s.name == "rect2") good = good && cm <= kRectCMeas;
    ok = ok && good;
    detail += s.name + ":C_meas=" + num(cm) + (lower ? "" : "(below mu)") + " ";
  }
  line("3", ok && suite.size() >= 6, "eigenvalue sandwich over the suite", detail);
}

void criterion_4() {
  const auto t0 = std::chrono::steady_clock::now();
  const SweepResult c = sweep_scaling("constant", {1, 2, 4, 8, 16}, 4);
  const SweepResult t = sweep_scaling("triangle_example", {16, 32, 64, 128}, 4);
  const double secs = seconds_since(t0);
  std::string rows;
  for (const auto& r : t.rows) rows += " L1(" + num(r.param) + ")=" + num(r.L1);
  line("4a", std::abs(c.slope - kConstSlope) <= kConstSlopeTol && secs < kSweepSeconds,
       "L1 scaling, constant potential", "slope=" + num(c.slope) + " target 1 +- 0.05");
  line("4b", std::abs(t.slope - kTriSlope) <= kTriSlopeTol && secs < kSweepSeconds,
       "L1 scaling, triangle example N2 = N1^2",
       "slope=" + num(t.slope) + " target 0.2 +- 0.08;" + rows + " time=" + num(secs) + "s");
}

void criterion_5(const std::vector<SuiteRun>& suite) {
  bool ok = true;
  double lo = 1e300, hi = 0.0, hull_margin = 1e300;
  std::string bad;
  for (const auto& s : suite)
    for (const char* c : {"0.25", "0.5", "0.75"}) {
      const CheckResult* r = find(s.result.checks, std::string("level_shape@") + c);
      if (!r) {
        ok = false;
        bad += s.name + "@" + c + ":missing ";
        continue;
      }
      for (const char* m : {"y_extent_over_L1", "x_extent_over_L2", "inradius_over_L1", "diameter_over_L2"}) {
        const double v = measured(r, m);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        if (!(v >= 1.0 / kShapeK && v <= kShapeK)) {
          ok = false;
          bad += s.name + "@" + c + ":" + m + "=" + num(v) + " ";
        }
      }
      const double ratio = measured(r, "hull_ratio"), thr = threshold(r, "hull_threshold");
      hull_margin = std::min(hull_margin, ratio - thr);
      if (!(ratio >= thr)) {
        ok = false;
        bad += s.name + "@" + c + ":hull ";
      }
    }
  line("5", ok, "level-set shape at c = 0.25, 0.5, 0.75",
       "ratios in [" + num(lo) + ", " + num(hi) + "], min hull margin " + num(hull_margin) + (bad.empty() ? "" : "; " + bad));
}

void criterion_6(const std::vector<SuiteRun>& suite) {
  bool ok = true;
  std::string detail;
  for (const auto& s : suite) {
    const CheckResult* ineq = find(s.result.checks, "carleman_inequality");
    const double frac = measured(ineq, "fraction_holding");
    ok = ok && frac >= kCarlemanFraction;
    detail += s.name + ":frac=" + num(frac);
    if (!s.result.report["scales"]["comparable"].get<bool>()) {
      const CheckResult* decay = find(s.result.checks, "carleman_decay");
      if (decay && decay->status == CheckStatus::Skip) {
        // nothing lies beyond C L2 from x*, so there is no tail to fit
        detail += ",rate n/a (" + decay->notes + ")";
      } else {
        const double rate = measured(decay, "rate_times_L2");
        ok = ok && rate >= kRateMin && rate <= kRateMax;
        detail += ",rate*L2=" + num(rate);
      }
    }
    detail += " ";
  }
  line("6", ok, "Carleman inequality and decay of H", detail);
}

void criterion_7(const std::vector<SuiteRun>& suite) {
  bool ok = true;
  std::string detail;
  for (const auto& s : suite) {
    const double c = measured(find(s.result.checks, "max_location"), "c_star");
    ok = ok && c >= kCStarFloor;
    detail += s.name + ":c*=" + num(c) + " ";
  }
  line("7", ok, "maximum sits where V < lambda", detail);
}

void criterion_8(const std::vector<SuiteRun>& suite) {
  // every node with u > 1e-8, boundary row included
  bool ok = true;
  std::string detail;
  for (const auto& s : suite) {
    const CheckResult* c = find(s.result.checks, "log_concavity");
    const double inner = measured(c, "violations"), row = measured(c, "boundary_row_violations");
    const double worst = std::max(measured(c, "worst_over_tol"), measured(c, "boundary_row_worst_over_tol"));
    ok = ok && inner == 0.0 && row == 0.0;
    detail += s.name + ":" + num(inner + row) + " viol (" + num(row) + " on boundary row), worst/tol=" + num(worst) + " ";
  }
  // negative control: a bump on the rectangle ground state
  RunConfig cfg = by_name(suite, "rect2").cfg;
  const Instance inst = prepare_instance(cfg, Stage::Solve);
  auto bumped = inst.pair.u;
  const GridSpec& g = inst.grid;
  bumped[g.index(g.nx / 3, g.ny / 2)] *= 1.5;
  LogConcavityOptions opts;
  opts.boundary_layer = 0;
  const auto neg = log_concavity_check(bumped, inst.op->mask(), g, opts);
  const bool caught = !neg.pass();
  line("8", ok && caught, "log-concavity of u on every node above 1e-8",
       detail + "; corrupted field " + (caught ? "rejected" : "accepted") + " (" + std::to_string(neg.violations) +
           " viol)");
}

void criterion_9(const std::vector<SuiteRun>& suite) {
  bool ok = true;
  std::string detail;
  for (const auto& s : suite) {
    const CheckResult* c = find(s.result.checks, "dpsi_dx");
    const double v = measured(c, "max_value_times_L2sq");
    const double n = measured(c, "samples_evaluated");
    bool good = v <= kPsiMax && n >= 1;
    if (s.name == "rect2") good = good && v <= kRectPsi;
    ok = ok && good;
    detail += s.name + ":" + num(v) + "(" + num(n) + "/5) ";
  }
  line("9", ok, "cross-section derivative, L2^2 int (d_x psi)^2", detail);
}

void criterion_10(const std::vector<SuiteRun>& suite) {
  bool ok = true;
  std::string detail;
  int nonempty = 0;
  for (const auto& s : suite) {
    const CheckResult* c = find(s.result.checks, "agmon");
    if (!c || c->status == CheckStatus::Skip) {
      detail += s.name + ":empty ";
      continue;
    }
    ++nonempty;
    const double v = measured(c, "weighted_mass_over_L1L2");
    ok = ok && v <= kAgmonMax;
    detail += s.name + ":" + num(v) + "(" + num(measured(c, "nodes_used")) + " nodes) ";
  }
  // constant nu: one allowed node at the centre, V = lambda + w^2 elsewhere
  GridSpec g{{0, 0}, 0.05, 81, 81};
  const double w = 3.0, lambda = 1.0;
  std::vector<double> pot(g.size(), lambda + w * w);
  pot[g.index(40, 40)] = 1.0;
  const Operator2D op(g, std::vector<std::uint8_t>(g.size(), 1), pot);
  const AgmonField f = agmon_distance(op, lambda, 1.0, 1.0);
  double worst = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!f.region[g.index(i, j)]) continue;
      const double exact = 0.5 * w * norm(g.node(i, j) - g.node(40, 40));
      worst = std::max(worst, std::abs(f.hstar[g.index(i, j)] - exact));
    }
  const bool dij = worst <= 2.0 * g.spacing * w;
  line("10", ok && dij, "Agmon-weighted mass",
       detail + "; constant-nu distance max err " + num(worst) + " vs 2 spacing w = " + num(2.0 * g.spacing * w));
}

void criterion_11(const std::vector<SuiteRun>& suite) {
  bool ok = true;
  int compared = 0;
  // same configs again, all instances at once, several threads each
  std::vector<std::future<std::string>> jobs;
  for (const auto& s : suite) {
    RunConfig cfg = s.cfg;
    cfg.threads = 3;
    jobs.push_back(std::async(std::launch::async, [cfg] { return run_pipeline(cfg, Stage::Verify, false).report.dump(); }));
  }
  for (std::size_t k = 0; k < suite.size(); ++k) {
    ok = ok && jobs[k].get() == suite[k].result.report.dump();
    ++compared;
  }
  // written report files, twice into separate directories
  namespace fs = std::filesystem;
  RunConfig cfg = by_name(suite, "cone_square").cfg;
  std::string bytes[2];
  for (int k = 0; k < 2; ++k) {
    const fs::path dir = fs::temp_directory_path() / ("gstate_accept_" + std::to_string(k));
    cfg.output_dir = dir.string();
    run_pipeline(cfg);
    std::ifstream in(dir / "report.json", std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    bytes[k] = ss.str();
    fs::remove_all(dir);
  }
  const bool files = !bytes[0].empty() && !bytes[1].empty();
  // output_dir is echoed, so compare with it blanked
  auto strip = [](std::string s) {
    auto j = ojson::parse(s);
    j["config"].erase("output_dir");
    return j.dump();
  };
  ok = ok && files && strip(bytes[0]) == strip(bytes[1]);
  line("11", ok, "determinism",
       std::to_string(compared) + " reports identical between sequential single-thread and concurrent 3-thread runs; "
                                  "report.json written twice " + (files ? "identical" : "differs"));
}

}  // namespace

int main() {
  try {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<SuiteRun> suite = run_suite();
    for (const auto& s : suite)
      std::printf("suite %-15s lambda=%-10s status=%s time=%ss\n", s.name.c_str(),
                  num(s.result.report["eigen"]["lambda"].get<double>()).c_str(),
                  s.result.exit_code == 0 ? "all checks pass" : "checks failing", num(s.seconds).c_str());
    criterion_1(suite);
    criterion_2();
    criterion_3(suite);
    criterion_4();
    criterion_5(suite);
    criterion_6(suite);
    criterion_7(suite);
    criterion_8(suite);
    criterion_9(suite);
    criterion_10(suite);
    criterion_11(suite);
    std::printf("acceptance: %d pass, %d fail, %ss\n", passes, failures, num(seconds_since(t0)).c_str());
  } catch (const std::exception& e) {
    std::printf("FAIL [run] acceptance aborted | %s\n", e.what());
    return 1;
  }
  return failures == 0 ? 0 : 1;
}

#pragma once
// End-to-end driver: scales, 1D profiles, 2D ground state and every enabled
// check, with the report and field dumps written atomically to disk.

#include <optional>
#include <string>
#include <vector>

#include "gstate/analysis.hpp"
#include "gstate/config.hpp"
#include "gstate/eig2d.hpp"
#include "gstate/error.hpp"

namespace gstate {

enum class Stage { Scales, Solve, Verify };

struct Instance {
  explicit Instance(const Potential& v) : original(v), potential(v), oriented{v, 0.0, 0.0, 0.0} {}

  Potential original;
  Potential potential;  // rotated so the thin direction is y
  double N1 = 0.0;
  double N2 = 0.0;
  double spacing = 0.0;
  bool spacing_overridden = false;
  GridSpec grid;
  L1Result l1;
  Oriented oriented;
  HeightReport height;
  MuProfile lattice;
  MuProfile section;
  L2Result l2;
  ScaleReport scales;
  EigenPair1D A;
  std::optional<Operator2D> op;
  EigenPair2D pair;
  HProfile H;
};

// Everything up to (and, unless stage == Scales, including) the 2D solve.
Instance prepare_instance(const RunConfig& cfg, Stage stage);

// Cross-section eigenfunctions weighted by the first eigenfunction of the
// surrogate operator; lattice-indexed.
std::vector<double> product_guess(const Instance& inst);

std::vector<CheckResult> run_checks(const Instance& inst, const RunConfig& cfg);

struct PipelineResult {
  ojson report;
  std::vector<CheckResult> checks;
  int exit_code = 0;  // 0 all pass, 2 any check failed
  std::string output_dir;  // empty when nothing was written
};

// Output directory: GSTATE_OUTPUT_DIR when set, else cfg.output_dir.
std::string resolve_output_dir(const RunConfig& cfg);

PipelineResult run_pipeline(const RunConfig& cfg, Stage stage = Stage::Verify, bool write_artifacts = true);

ojson scales_json(const Instance& inst);
ojson check_json(const CheckResult& c);
ojson error_json(const Error& e);

// Shortest round-trip decimal form.
std::string format_double(double v);

struct SweepRow {
  double param = 0.0;
  double N1 = 0.0;  // inradius of the domain
  double N2 = 0.0;  // diameter
  double L1 = 0.0;
  double L1_tilde = 0.0;
};

struct SweepResult {
  std::string family;
  std::vector<SweepRow> rows;  // in parameter order
  double slope = 0.0;          // OLS of log L1 on log param
  double intercept = 0.0;
};

// Families: constant (square of side 2p), triangle_example (legs p and p^2),
// trapezoid (between the two). SweepTooSmall for fewer than 3 parameters.
SweepResult sweep_scaling(const std::string& family, const std::vector<double>& params, int threads = 1,
                          double rel_tol = 1e-3);
Potential sweep_instance(const std::string& family, double p);
ojson sweep_json(const SweepResult& s);
std::string sweep_csv(const SweepResult& s);

struct OracleComparison {
  std::size_t unknowns = 0;
  double lambda_iterative = 0.0;
  double lambda_dense = 0.0;
  double max_abs_u_diff = 0.0;
};
// OracleTooLarge above 4000 unknowns.
OracleComparison oracle_compare(const RunConfig& cfg);

}  // namespace gstate

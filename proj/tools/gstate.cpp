// Command-line driver for the ground-state toolkit.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gstate/pipeline.hpp"

using namespace gstate;

namespace {

RunConfig load(const std::string& path, const std::string& out, int threads) {
  RunConfig cfg = load_config(path);
  if (!out.empty()) cfg.output_dir = out;
  if (threads > 0) cfg.threads = threads;
  return cfg;
}

std::vector<double> parse_params(const std::vector<std::string>& raw) {
  std::vector<double> out;
  for (const std::string& item : raw) {
    std::stringstream ss(item);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      try {
        std::size_t used = 0;
        out.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidConfig, "bad sweep parameter '" + tok + "'");
      }
    }
  }
  return out;
}

void print_checks(const PipelineResult& r) {
  for (const CheckResult& c : r.checks) {
    std::string tag(to_string(c.status));
    for (char& ch : tag) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    std::printf("%-5s %s\n", tag.c_str(), c.name.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground states of -Laplace + h^-2 on convex domains"};
  app.require_subcommand(1);
  std::string config, out_dir, family, csv_path;
  std::vector<std::string> params;
  int threads = 0;

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("config", config, "JSON run configuration")->required();
    sub->add_option("-o,--output-dir", out_dir, "output directory (GSTATE_OUTPUT_DIR wins)");
    sub->add_option("-j,--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  };
  CLI::App* scales = app.add_subcommand("scales", "L1, orientation, L2 and the mu profile");
  add_config(scales);
  CLI::App* solve = app.add_subcommand("solve", "scales plus the 2D ground state and field dumps");
  add_config(solve);
  CLI::App* verify = app.add_subcommand("verify", "full pipeline with every enabled check");
  add_config(verify);
  CLI::App* oracle = app.add_subcommand("oracle", "iterative solver against a dense eigendecomposition");
  add_config(oracle);
  CLI::App* sweep = app.add_subcommand("sweep", "L1 across a family and the log-log slope");
  sweep->add_option("family", family, "constant | triangle_example | trapezoid")->required();
  sweep->add_option("params", params, "parameter values (space or comma separated)")->required();
  sweep->add_option("-j,--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--csv", csv_path, "write the table as CSV to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*sweep) {
      const SweepResult r = sweep_scaling(family, parse_params(params), threads > 0 ? threads : 1);
      if (!csv_path.empty()) {
        std::ofstream f(csv_path);
        if (!(f << sweep_csv(r))) throw Error(ErrorCode::Io, "cannot write '" + csv_path + "'");
      }
      std::cout << sweep_json(r).dump(2) << "\n";
      return 0;
    }
    const RunConfig cfg = load(config, out_dir, threads);
    if (*oracle) {
      const OracleComparison c = oracle_compare(cfg);
      ojson j{{"unknowns", c.unknowns},
              {"lambda_iterative", c.lambda_iterative},
              {"lambda_dense", c.lambda_dense},
              {"abs_diff", std::abs(c.lambda_iterative - c.lambda_dense)},
              {"max_abs_u_diff", c.max_abs_u_diff}};
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    const Stage stage = *scales ? Stage::Scales : *solve ? Stage::Solve : Stage::Verify;
    const PipelineResult r = run_pipeline(cfg, stage);
    if (stage == Stage::Scales) {
      std::cout << r.report.at("scales").dump(2) << "\n";
    } else if (stage == Stage::Solve) {
      std::cout << r.report.at("eigen").dump(2) << "\n";
    } else {
      print_checks(r);
      const auto& s = r.report.at("summary");
      std::printf("%d pass, %d fail, %d skip, %d info\n", s.at("pass").get<int>(), s.at("fail").get<int>(),
                  s.at("skip").get<int>(), s.at("info").get<int>());
    }
    std::printf("artifacts: %s\n", r.output_dir.c_str());
    return r.exit_code;
  } catch (const Error& e) {
    std::cerr << error_json(e).dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << ojson{{"error", {{"code", "Internal"}, {"message", e.what()}}}}.dump() << "\n";
    return 1;
  }
}

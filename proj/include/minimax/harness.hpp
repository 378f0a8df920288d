#pragma once

#include "minimax/bounds.hpp"
#include "minimax/core.hpp"
#include "minimax/problems.hpp"
#include "minimax/prox.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace minimax {

// Solver names accepted in configs: abr, pbr, rhss (depth from rhss_k) or
// rhss-k<d>, eg, gda.
struct SolverChoice {
  std::string name;  // canonical label written to rows
  std::string kind;  // abr | pbr | rhss | eg | gda
  int depth = 0;     // rhss only
};
SolverChoice parse_solver(const std::string& s, int default_depth);

struct InstanceConfig {
  Index n = 8;
  Index m = 8;
  SmoothnessParams params;
  SpectrumShape spectrum = SpectrumShape::Endpoints;
  CouplingLayout coupling = CouplingLayout::Random;
  std::string family = "quadratic";  // quadratic | log-barrier
  double rho = 0;                     // log-barrier weight
  std::string path;                   // optional Matrix Market sidecar
};

struct ExperimentConfig {
  InstanceConfig instance;
  std::vector<std::string> solvers;
  Mode mode = Mode::Practical;
  double epsilon = 1e-6;
  int rhss_k = 2;
  std::string start = "random";  // random | zero
  std::string sweep_parameter = "L_xy";
  std::vector<double> sweep_values;
  std::vector<std::uint64_t> seeds{0};
  std::string out = "results";
  int threads = 1;
  PbrOptions pbr;
  double cg_tolerance = 1e-10;
  double rhss_inner_tolerance = 0;
  long baseline_max_iterations = 20000000;

  void validate() const;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

struct SweepRow {
  std::uint64_t seed = 0;
  Index n = 0;
  Index m = 0;
  SmoothnessParams params;
  std::string solver;
  Mode mode = Mode::Practical;
  std::uint64_t gradient_evals = 0;
  std::uint64_t matvec_products = 0;
  std::uint64_t outer_iterations = 0;
  double final_relative_error = 0;
  double wall_time = 0;
  Termination termination = Termination::ToleranceMet;
  std::string note;
};

// Fixed column order; floats with 17 significant digits.
std::string csv_header();
std::string csv_line(const SweepRow& row);
void write_rows(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

struct CellResult {
  SweepRow row;
  SolveReport report;
  JointPoint start;
  JointPoint reference;
};

// One solver on one instance. Exceptions inside the solver become a row with
// termination PreconditionViolated and the message in `note`.
CellResult run_cell(const ExperimentConfig& cfg, const SolverChoice& solver, std::uint64_t seed,
                    const SmoothnessParams& params);

struct SolveOutput {
  std::vector<CellResult> cells;
};

// Every configured solver on the first seed; writes <out>.csv and <out>.json.
SolveOutput run_solve(const ExperimentConfig& cfg, bool write = true);

struct SummaryRow {
  std::string solver;
  double sweep_value;
  double median_gradient_evals;
  double median_matvec_products;
  double median_relative_error;
  int runs;
  int tolerance_met;
};

struct SweepOutput {
  std::vector<SweepRow> rows;
  std::vector<SummaryRow> summary;
  std::vector<BoundCurve> bounds;
};

// Grid x seeds x solvers; writes <out>.csv, <out>.summary.csv and
// <out>.bounds.csv.
SweepOutput run_sweep(const ExperimentConfig& cfg, bool write = true);

struct CheckResult {
  std::string name;
  bool passed;
  std::string detail;
};

struct ValidationReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool passed() const;
  nlohmann::json to_json() const;
};

std::vector<std::string> validation_suites();
// throws ConfigError for unknown names
ValidationReport validate_suite(const std::string& name, std::uint64_t seed = 0);

void write_bounds(const std::filesystem::path& path, const std::vector<BoundCurve>& curves);

}  // namespace minimax

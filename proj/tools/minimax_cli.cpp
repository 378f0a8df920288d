// minimax: solve, sweep, validate, bounds, generate.
// Exit codes: 0 ok, 1 other failure (including failed validation), 2 config,
// 3 precondition violated, 4 iteration cap or divergence.
#include "minimax/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

using namespace minimax;

namespace {

enum Exit { kOk = 0, kOther = 1, kConfig = 2, kPrecondition = 3, kCap = 4 };

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<std::string> out;
  std::optional<double> epsilon;
  std::vector<std::string> solvers;
  std::optional<int> threads;
};

void add_universal(CLI::App* app, Overrides& o) {
  app->add_option("--seed", o.seed, "single seed, replaces the config's seed list");
  app->add_option("--mode", o.mode, "Theoretical or Practical");
  app->add_option("--out", o.out, "output path prefix");
}

ExperimentConfig build_config(const Overrides& o) {
  ExperimentConfig c;
  nlohmann::json j = nlohmann::json::object();
  if (!o.config.empty()) {
    c = load_config(o.config);
    j = to_json(c);
  }
  if (o.seed) j["seeds"] = {*o.seed};
  if (o.mode) j["mode"] = *o.mode;
  if (o.out) j["out"] = *o.out;
  if (o.epsilon) j["epsilon"] = *o.epsilon;
  if (!o.solvers.empty()) j["solvers"] = o.solvers;
  if (o.threads) j["threads"] = *o.threads;
  return parse_config(j);
}

int exit_for(Termination t) {
  switch (t) {
    case Termination::ToleranceMet: return kOk;
    case Termination::PreconditionViolated: return kPrecondition;
    case Termination::IterationCap:
    case Termination::Diverged: return kCap;
  }
  return kOther;
}

int cmd_solve(const Overrides& o) {
  const ExperimentConfig cfg = build_config(o);
  const SolveOutput out = run_solve(cfg);
  std::cout << csv_header() << "\n";
  int code = kOk;
  for (const auto& c : out.cells) {
    std::cout << csv_line(c.row) << "\n";
    code = std::max(code, exit_for(c.row.termination));
  }
  std::cerr << "wrote " << cfg.out << ".csv and " << cfg.out << ".json\n";
  return code;
}

int cmd_sweep(const Overrides& o) {
  const ExperimentConfig cfg = build_config(o);
  const SweepOutput out = run_sweep(cfg);
  std::printf("%-12s %14s %6s %6s %18s %18s\n", "solver", cfg.sweep_parameter.c_str(), "runs",
              "met", "median evals", "median error");
  for (const auto& s : out.summary)
    std::printf("%-12s %14.6g %6d %6d %18.6g %18.6g\n", s.solver.c_str(), s.sweep_value, s.runs,
                s.tolerance_met, s.median_gradient_evals, s.median_relative_error);
  std::cerr << "wrote " << cfg.out << ".csv, .summary.csv, .bounds.csv, .config.json\n";
  return kOk;
}

int cmd_validate(const std::string& suite, const Overrides& o) {
  const ValidationReport rep = validate_suite(suite, o.seed.value_or(0));
  int failed = 0;
  for (const auto& c : rep.checks) {
    if (!c.passed) {
      ++failed;
      std::cout << "FAIL " << c.name << " (" << c.detail << ")\n";
    }
  }
  std::cout << suite << ": " << rep.checks.size() - failed << "/" << rep.checks.size()
            << " checks passed\n";
  const std::string path = o.out.value_or("validation-" + suite) + ".json";
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << rep.to_json().dump(2) << "\n";
  return rep.passed() ? kOk : kOther;
}

int cmd_bounds(const Overrides& o, const std::vector<double>& grid) {
  ExperimentConfig cfg;
  if (!o.config.empty()) cfg = load_config(o.config);
  if (o.epsilon) cfg.epsilon = *o.epsilon;
  std::vector<double> values = grid.empty() ? cfg.sweep_values : grid;
  if (values.empty()) throw ConfigError("bounds: no grid (use --grid or a config sweep)");
  const auto curves = bound_curves(cfg.instance.params, values, cfg.epsilon);
  const std::string path = o.out.value_or(cfg.out) + ".bounds.csv";
  write_bounds(path, curves);
  for (const auto& c : curves) {
    std::cout << c.label;
    for (const auto& [x, v] : c.values) std::cout << " " << v;
    std::cout << "\n";
  }
  std::cerr << "wrote " << path << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strongly-convex-strongly-concave minimax solvers and experiment harness"};
  app.require_subcommand(1);
  Overrides o;

  auto* solve = app.add_subcommand("solve", "run every configured solver on one instance");
  solve->add_option("--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
  solve->add_option("--solver", o.solvers, "solver names, replacing the config's list");
  solve->add_option("--epsilon", o.epsilon, "target relative error");
  add_universal(solve, o);

  auto* sweep = app.add_subcommand("sweep", "grid x seeds x solvers, with medians and bounds");
  sweep->add_option("--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
  sweep->add_option("--solver", o.solvers, "solver names, replacing the config's list");
  sweep->add_option("--epsilon", o.epsilon, "target relative error");
  sweep->add_option("--threads", o.threads, "worker threads for independent cells");
  add_universal(sweep, o);

  std::string suite;
  auto* validate = app.add_subcommand("validate", "run a named property suite");
  bool list_suites = false;
  validate->add_option("suite", suite, "suite name");
  validate->add_flag("--list", list_suites, "print suite names and exit");
  add_universal(validate, o);

  std::vector<double> grid;
  auto* bounds = app.add_subcommand("bounds", "leading-term and full bound curves over L_xy");
  bounds->add_option("--config", o.config, "JSON config for the fixed parameters")
      ->check(CLI::ExistingFile);
  bounds->add_option("--grid", grid, "L_xy values, strictly increasing");
  bounds->add_option("--epsilon", o.epsilon, "target accuracy for the full bounds");
  add_universal(bounds, o);

  InstanceSpec gen;
  std::string gen_out;
  std::string gen_spectrum = "Endpoints", gen_coupling = "Random";
  auto* generate = app.add_subcommand("generate", "write a seeded instance as Matrix Market files");
  generate->add_option("--n", gen.n)->required();
  generate->add_option("--m", gen.m)->required();
  generate->add_option("--m_x", gen.params.m_x)->required();
  generate->add_option("--m_y", gen.params.m_y)->required();
  generate->add_option("--L_x", gen.params.L_x)->required();
  generate->add_option("--L_xy", gen.params.L_xy)->required();
  generate->add_option("--L_y", gen.params.L_y)->required();
  generate->add_option("--spectrum", gen_spectrum);
  generate->add_option("--coupling", gen_coupling);
  generate->add_option("--seed", gen.seed);
  generate->add_option("--out", gen_out, "sidecar JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*solve) return cmd_solve(o);
    if (*sweep) return cmd_sweep(o);
    if (*validate) {
      if (list_suites) {
        for (const auto& name : validation_suites()) std::cout << name << "\n";
        return kOk;
      }
      if (suite.empty()) throw ConfigError("validate: suite name required (see --list)");
      return cmd_validate(suite, o);
    }
    if (*bounds) return cmd_bounds(o, grid);
    if (*generate) {
      gen.spectrum = parse_spectrum(gen_spectrum);
      gen.coupling = parse_coupling(gen_coupling);
      write_instance(gen_out, {make_quadratic(gen), gen.params, gen.seed});
      std::cerr << "wrote " << gen_out << "\n";
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return kPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOther;
  }
  return kOther;
}

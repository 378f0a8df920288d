#include "minimax/harness.hpp"

#include "minimax/abr.hpp"
#include "minimax/baselines.hpp"
#include "minimax/rhss.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace minimax {

using nlohmann::json;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Field-path aware reader; every complaint names the offending field.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!ok.count(it.key())) throw ConfigError("field '" + sub(it.key()) + "': unknown field");
  }

  bool has(const char* key) const { return j_.contains(key); }
  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const json& at(const char* key) const { return j_.at(key); }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError("field '" + sub(key) + "': expected a number");
    return v.get<double>();
  }
  long integer(const char* key, long fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError("field '" + sub(key) + "': expected an integer");
    return v.get<long>();
  }
  std::string string(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError("field '" + sub(key) + "': expected a string");
    return v.get<std::string>();
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("field '" + (path_.empty() ? std::string("<root>") : path_) + "': " + what);
  }

 private:
  const json& j_;
  std::string path_;
};

template <class F>
auto with_field(const std::string& field, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind("field '", 0) == 0) throw;
    throw ConfigError("field '" + field + "': " + msg);
  }
}

SmoothnessParams apply_sweep(SmoothnessParams p, const std::string& name, double v) {
  if (name == "L_xy") p.L_xy = v;
  else if (name == "m_x") p.m_x = v;
  else if (name == "m_y") p.m_y = v;
  else if (name == "L_x") p.L_x = v;
  else if (name == "L_y") p.L_y = v;
  else if (name == "kappa_x") p.L_x = v * p.m_x;
  else if (name == "kappa_y") p.L_y = v * p.m_y;
  else if (name == "kappa") {
    p.L_x = v * p.m_x;
    p.L_y = v * p.m_y;
  } else {
    throw ConfigError("field 'sweep.parameter': unknown parameter '" + name + "'");
  }
  return p;
}

const std::vector<std::string> kSweepParameters{"L_xy", "m_x", "m_y", "L_x",
                                                "L_y",  "kappa_x", "kappa_y", "kappa"};

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

json point_json(const JointPoint& z) {
  return {{"x", std::vector<double>(z.x.data(), z.x.data() + z.x.size())},
          {"y", std::vector<double>(z.y.data(), z.y.data() + z.y.size())}};
}

json row_json(const SweepRow& r) {
  return {{"seed", r.seed},
          {"n", r.n},
          {"m", r.m},
          {"m_x", r.params.m_x},
          {"m_y", r.params.m_y},
          {"L_x", r.params.L_x},
          {"L_xy", r.params.L_xy},
          {"L_y", r.params.L_y},
          {"solver", r.solver},
          {"mode", to_string(r.mode)},
          {"gradient_evals", r.gradient_evals},
          {"matvec_products", r.matvec_products},
          {"outer_iterations", r.outer_iterations},
          {"final_relative_error", r.final_relative_error},
          {"wall_time", r.wall_time},
          {"termination", to_string(r.termination)},
          {"note", r.note}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

std::filesystem::path with_suffix(const std::string& out, const std::string& suffix) {
  return std::filesystem::path(out + suffix);
}

// Everything a cell needs besides the solver: the instance, its oracle factory,
// declared params and the ground truth.
struct Prepared {
  QuadraticSaddle q;
  bool quadratic = true;
  double rho = 0;
  SmoothnessParams params;  // declared for the objective actually solved
  JointPoint start;
  JointPoint reference;

  GradientOracle oracle() const {
    if (quadratic) return quadratic_oracle(q);
    return LogBarrierSaddle{q, rho}.oracle();
  }
};

Prepared prepare(const ExperimentConfig& cfg, std::uint64_t seed, const SmoothnessParams& params) {
  Prepared p;
  const auto& inst = cfg.instance;
  if (!inst.path.empty()) {
    InstanceFile f = read_instance(inst.path);
    p.q = std::move(f.q);
    p.params = f.params;
  } else {
    InstanceSpec spec{inst.n, inst.m, params, seed, inst.spectrum, inst.coupling};
    p.q = make_quadratic(spec);
    p.params = params;
  }
  const Index n = p.q.n(), m = p.q.m();
  if (inst.family == "log-barrier") {
    p.quadratic = false;
    p.rho = inst.rho;
    const LogBarrierSaddle lb{p.q, p.rho};
    p.params = lb.declared(p.params);
  }
  // start stream is offset from the instance stream so the two never coincide
  p.start = cfg.start == "zero" ? JointPoint::zeros(n, m)
                                : random_point(n, m, seed ^ 0xA5A5A5A5DEADBEEFULL);
  if (p.quadratic) {
    p.reference = direct_saddle(p.q);
  } else {
    p.reference = reference_saddle(p.oracle(), p.params, JointPoint::zeros(n, m), 1e-12);
  }
  return p;
}

SolveReport dispatch(const ExperimentConfig& cfg, const SolverChoice& solver, const Prepared& p) {
  const double eps = cfg.epsilon;
  if (solver.kind == "abr") {
    if (!abr_coupling_ok(p.params)) {
      SolveReport r;
      r.final_point = p.start;
      r.termination = Termination::PreconditionViolated;
      r.note = "coupling above sqrt(m_x m_y)/2";
      return r;
    }
    AbrConfig a;
    a.epsilon = eps / std::sqrt(2.0);
    a.params = p.params;
    return abr_solve(p.oracle(), p.start, a);
  }
  if (solver.kind == "pbr") return pbr_solve(p.oracle(), p.start, eps, p.params, cfg.mode, cfg.pbr);
  if (solver.kind == "rhss") {
    if (!p.quadratic) throw PreconditionError("rhss needs a quadratic instance");
    RhssConfig r;
    r.k = solver.depth;
    r.epsilon = eps;
    r.mode = cfg.mode;
    r.cg_tolerance = cfg.cg_tolerance;
    r.inner_tolerance = cfg.rhss_inner_tolerance;
    r.pbr = cfg.pbr;
    return rhss_solve(p.q, p.params, p.start, r);
  }
  BaselineConfig b;
  b.algorithm = solver.kind == "gda" ? Baseline::GDA : Baseline::ExtraGradient;
  b.tolerance = certified_gradient_ratio(p.params, eps);
  b.max_iterations = cfg.baseline_max_iterations;
  return solver.kind == "gda" ? gda_solve(p.oracle(), p.start, b, p.params)
                              : eg_solve(p.oracle(), p.start, b, p.params);
}

CellResult run_prepared(const ExperimentConfig& cfg, const SolverChoice& solver,
                        std::uint64_t seed, const Prepared& p) {
  CellResult c;
  c.start = p.start;
  c.reference = p.reference;
  SweepRow& row = c.row;
  row.seed = seed;
  row.n = p.q.n();
  row.m = p.q.m();
  row.params = p.params;
  row.solver = solver.name;
  row.mode = cfg.mode;

  const auto t0 = std::chrono::steady_clock::now();
  try {
    c.report = dispatch(cfg, solver, p);
  } catch (const std::exception& e) {
    c.report = SolveReport{};
    c.report.final_point = p.start;
    c.report.termination = Termination::PreconditionViolated;
    c.report.note = e.what();
  }
  row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const SolveReport& r = c.report;
  row.gradient_evals = r.gradient_evals;
  row.matvec_products = r.matvec_products;
  row.outer_iterations = r.outer_iterations;
  row.termination = r.termination;
  row.note = r.note;
  const double d0 = (p.start - p.reference).norm();
  const double d = r.final_point.n() == p.start.n() && r.final_point.m() == p.start.m()
                       ? (r.final_point - p.reference).norm()
                       : std::nan("");
  row.final_relative_error = d0 > 0 ? d / d0 : d;
  if (row.termination == Termination::ToleranceMet && !(row.final_relative_error <= cfg.epsilon)) {
    if (!row.note.empty()) row.note += "; ";
    row.note += "error above epsilon against the reference";
  }
  return c;
}

// Runs jobs [0, count) on up to `threads` workers; results land by index so
// the order never depends on scheduling.
template <class F>
void parallel_for(std::size_t count, int threads, F&& f) {
  const std::size_t workers = std::min<std::size_t>(std::max(1, threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mu;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

SolverChoice parse_solver(const std::string& s, int default_depth) {
  if (s == "abr" || s == "pbr" || s == "eg" || s == "gda") return {s, s, 0};
  if (s == "extragradient") return {"eg", "eg", 0};
  if (s == "rhss") {
    if (default_depth < 1) throw ConfigError("rhss depth must be >= 1");
    return {"rhss-k" + std::to_string(default_depth), "rhss", default_depth};
  }
  if (s.rfind("rhss-k", 0) == 0) {
    const std::string digits = s.substr(6);
    if (!digits.empty() && digits.size() <= 2 &&
        std::all_of(digits.begin(), digits.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
      const int d = std::stoi(digits);
      if (d >= 1) return {s, "rhss", d};
    }
  }
  throw ConfigError("unknown solver '" + s + "' (abr, pbr, rhss, rhss-k<d>, eg, gda)");
}

void ExperimentConfig::validate() const {
  if (solvers.empty()) throw ConfigError("field 'solvers': at least one solver is required");
  for (std::size_t i = 0; i < solvers.size(); ++i) {
    const auto s = with_field("solvers[" + std::to_string(i) + "]",
                              [&] { return parse_solver(solvers[i], rhss_k); });
    if (s.kind == "rhss" && instance.family != "quadratic")
      throw ConfigError("field 'solvers[" + std::to_string(i) + "]': rhss needs a quadratic instance");
  }
  if (!(epsilon > 0 && epsilon < 1)) throw ConfigError("field 'epsilon': must lie in (0, 1)");
  if (rhss_k < 1) throw ConfigError("field 'rhss_k': must be >= 1");
  if (start != "random" && start != "zero")
    throw ConfigError("field 'start': expected \"random\" or \"zero\"");
  if (seeds.empty()) throw ConfigError("field 'seeds': at least one seed is required");
  if (threads < 1) throw ConfigError("field 'threads': must be >= 1");
  if (out.empty()) throw ConfigError("field 'out': must be nonempty");
  if (std::find(kSweepParameters.begin(), kSweepParameters.end(), sweep_parameter) ==
      kSweepParameters.end())
    throw ConfigError("field 'sweep.parameter': unknown parameter '" + sweep_parameter + "'");
  for (std::size_t i = 0; i < sweep_values.size(); ++i)
    if (!std::isfinite(sweep_values[i]))
      throw ConfigError("field 'sweep.values[" + std::to_string(i) + "]': must be finite");
  if (instance.family != "quadratic" && instance.family != "log-barrier")
    throw ConfigError("field 'instance.family': expected \"quadratic\" or \"log-barrier\"");
  if (!(instance.rho >= 0)) throw ConfigError("field 'instance.rho': must be >= 0");
  if (instance.path.empty()) {
    with_field("instance", [&] {
      InstanceSpec{instance.n, instance.m, instance.params, 0, instance.spectrum, instance.coupling}
          .validate();
      return 0;
    });
  }
  if (!(pbr.inner_tolerance > 0 && pbr.inner_tolerance < 1))
    throw ConfigError("field 'pbr.inner_tolerance': must lie in (0, 1)");
  if (!(pbr.abr_tolerance > 0 && pbr.abr_tolerance < 1))
    throw ConfigError("field 'pbr.abr_tolerance': must lie in (0, 1)");
  if (!(pbr.cap_multiplier >= 1)) throw ConfigError("field 'pbr.cap_multiplier': must be >= 1");
  if (!(cg_tolerance > 0 && cg_tolerance < 1))
    throw ConfigError("field 'cg_tolerance': must lie in (0, 1)");
  if (!(rhss_inner_tolerance >= 0 && rhss_inner_tolerance < 1))
    throw ConfigError("field 'rhss_inner_tolerance': must lie in [0, 1)");
  if (baseline_max_iterations < 1) throw ConfigError("field 'baseline_max_iterations': must be >= 1");
}

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  Reader root(j, "");
  root.allow({"instance", "solvers", "mode", "epsilon", "rhss_k", "start", "sweep", "seeds", "out",
              "threads", "pbr", "cg_tolerance", "rhss_inner_tolerance",
              "baseline_max_iterations"});
  if (root.has("instance")) {
    Reader in(root.at("instance"), "instance");
    in.allow({"n", "m", "params", "spectrum", "coupling", "family", "rho", "path"});
    c.instance.n = in.integer("n", c.instance.n);
    c.instance.m = in.integer("m", c.instance.m);
    if (in.has("params")) {
      Reader pr(in.at("params"), "instance.params");
      pr.allow({"m_x", "m_y", "L_x", "L_xy", "L_y"});
      auto& p = c.instance.params;
      p.m_x = pr.number("m_x", p.m_x);
      p.m_y = pr.number("m_y", p.m_y);
      p.L_x = pr.number("L_x", p.L_x);
      p.L_xy = pr.number("L_xy", p.L_xy);
      p.L_y = pr.number("L_y", p.L_y);
    }
    with_field("instance.spectrum", [&] {
      return c.instance.spectrum = parse_spectrum(in.string("spectrum", "Endpoints"));
    });
    with_field("instance.coupling", [&] {
      return c.instance.coupling = parse_coupling(in.string("coupling", "Random"));
    });
    c.instance.family = in.string("family", c.instance.family);
    c.instance.rho = in.number("rho", c.instance.rho);
    c.instance.path = in.string("path", c.instance.path);
  }
  if (root.has("solvers")) {
    const json& s = root.at("solvers");
    if (!s.is_array()) throw ConfigError("field 'solvers': expected an array of names");
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!s[i].is_string())
        throw ConfigError("field 'solvers[" + std::to_string(i) + "]': expected a string");
      c.solvers.push_back(s[i].get<std::string>());
    }
  }
  with_field("mode", [&] { return c.mode = parse_mode(root.string("mode", "Practical")); });
  c.epsilon = root.number("epsilon", c.epsilon);
  c.rhss_k = static_cast<int>(root.integer("rhss_k", c.rhss_k));
  c.start = root.string("start", c.start);
  if (root.has("sweep")) {
    Reader sw(root.at("sweep"), "sweep");
    sw.allow({"parameter", "values"});
    c.sweep_parameter = sw.string("parameter", c.sweep_parameter);
    if (sw.has("values")) {
      const json& v = sw.at("values");
      if (!v.is_array()) throw ConfigError("field 'sweep.values': expected an array of numbers");
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number())
          throw ConfigError("field 'sweep.values[" + std::to_string(i) + "]': expected a number");
        c.sweep_values.push_back(v[i].get<double>());
      }
    }
  }
  if (root.has("seeds")) {
    const json& s = root.at("seeds");
    if (!s.is_array()) throw ConfigError("field 'seeds': expected an array of integers");
    c.seeds.clear();
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!s[i].is_number_integer() || (!s[i].is_number_unsigned() && s[i].get<std::int64_t>() < 0))
        throw ConfigError("field 'seeds[" + std::to_string(i) + "]': expected a nonnegative integer");
      c.seeds.push_back(s[i].get<std::uint64_t>());
    }
  }
  c.out = root.string("out", c.out);
  c.threads = static_cast<int>(root.integer("threads", c.threads));
  if (root.has("pbr")) {
    Reader pb(root.at("pbr"), "pbr");
    pb.allow({"inner_tolerance", "abr_tolerance", "cap_multiplier"});
    c.pbr.inner_tolerance = pb.number("inner_tolerance", c.pbr.inner_tolerance);
    c.pbr.abr_tolerance = pb.number("abr_tolerance", c.pbr.abr_tolerance);
    c.pbr.cap_multiplier = pb.number("cap_multiplier", c.pbr.cap_multiplier);
  }
  c.cg_tolerance = root.number("cg_tolerance", c.cg_tolerance);
  c.rhss_inner_tolerance = root.number("rhss_inner_tolerance", c.rhss_inner_tolerance);
  c.baseline_max_iterations = root.integer("baseline_max_iterations", c.baseline_max_iterations);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // byte offset -> line:column
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(path.string() + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": invalid JSON (" + e.what() + ")");
  }
  try {
    return parse_config(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

json to_json(const ExperimentConfig& c) {
  const auto& p = c.instance.params;
  json inst = {{"n", c.instance.n},
               {"m", c.instance.m},
               {"params", {{"m_x", p.m_x}, {"m_y", p.m_y}, {"L_x", p.L_x}, {"L_xy", p.L_xy}, {"L_y", p.L_y}}},
               {"spectrum", to_string(c.instance.spectrum)},
               {"coupling", to_string(c.instance.coupling)},
               {"family", c.instance.family},
               {"rho", c.instance.rho}};
  if (!c.instance.path.empty()) inst["path"] = c.instance.path;
  return {{"instance", inst},
          {"solvers", c.solvers},
          {"mode", to_string(c.mode)},
          {"epsilon", c.epsilon},
          {"rhss_k", c.rhss_k},
          {"start", c.start},
          {"sweep", {{"parameter", c.sweep_parameter}, {"values", c.sweep_values}}},
          {"seeds", c.seeds},
          {"out", c.out},
          {"threads", c.threads},
          {"pbr",
           {{"inner_tolerance", c.pbr.inner_tolerance},
            {"abr_tolerance", c.pbr.abr_tolerance},
            {"cap_multiplier", c.pbr.cap_multiplier}}},
          {"cg_tolerance", c.cg_tolerance},
          {"rhss_inner_tolerance", c.rhss_inner_tolerance},
          {"baseline_max_iterations", c.baseline_max_iterations}};
}

std::string csv_header() {
  return "seed,n,m,m_x,m_y,L_x,L_xy,L_y,solver,mode,gradient_evals,matvec_products,"
         "outer_iterations,final_relative_error,wall_time,termination,note";
}

std::string csv_line(const SweepRow& r) {
  std::string note = r.note;
  std::string quoted = "\"";
  for (char ch : note) {
    if (ch == '"') quoted += '"';
    quoted += (ch == '\n' ? ' ' : ch);
  }
  quoted += '"';
  std::ostringstream os;
  os << r.seed << ',' << r.n << ',' << r.m << ',' << fmt17(r.params.m_x) << ','
     << fmt17(r.params.m_y) << ',' << fmt17(r.params.L_x) << ',' << fmt17(r.params.L_xy) << ','
     << fmt17(r.params.L_y) << ',' << r.solver << ',' << to_string(r.mode) << ','
     << r.gradient_evals << ',' << r.matvec_products << ',' << r.outer_iterations << ','
     << fmt17(r.final_relative_error) << ',' << fmt17(r.wall_time) << ','
     << to_string(r.termination) << ',' << (note.empty() ? "" : quoted);
  return os.str();
}

void write_rows(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  std::string text = csv_header() + "\n";
  for (const auto& r : rows) text += csv_line(r) + "\n";
  write_text(path, text);
}

CellResult run_cell(const ExperimentConfig& cfg, const SolverChoice& solver, std::uint64_t seed,
                    const SmoothnessParams& params) {
  const Prepared p = prepare(cfg, seed, params);
  return run_prepared(cfg, solver, seed, p);
}

SolveOutput run_solve(const ExperimentConfig& cfg, bool write) {
  cfg.validate();
  const std::uint64_t seed = cfg.seeds.front();
  const Prepared p = prepare(cfg, seed, cfg.instance.params);
  SolveOutput out;
  for (const auto& name : cfg.solvers)
    out.cells.push_back(run_prepared(cfg, parse_solver(name, cfg.rhss_k), seed, p));
  if (write) {
    std::vector<SweepRow> rows;
    json cells = json::array();
    for (const auto& c : out.cells) {
      rows.push_back(c.row);
      json jc = row_json(c.row);
      jc["start"] = point_json(c.start);
      jc["final_point"] = point_json(c.report.final_point);
      jc["reference"] = point_json(c.reference);
      cells.push_back(jc);
    }
    write_rows(with_suffix(cfg.out, ".csv"), rows);
    write_text(with_suffix(cfg.out, ".json"),
               json{{"config", to_json(cfg)}, {"rows", cells}}.dump(2) + "\n");
  }
  return out;
}

SweepOutput run_sweep(const ExperimentConfig& cfg, bool write) {
  cfg.validate();
  if (cfg.sweep_values.empty()) throw ConfigError("field 'sweep.values': grid must be nonempty");
  std::vector<SolverChoice> solvers;
  for (const auto& s : cfg.solvers) solvers.push_back(parse_solver(s, cfg.rhss_k));

  struct Job {
    std::size_t value;
    std::uint64_t seed;
    std::size_t solver;
  };
  std::vector<Job> jobs;
  for (std::size_t v = 0; v < cfg.sweep_values.size(); ++v)
    for (auto seed : cfg.seeds)
      for (std::size_t s = 0; s < solvers.size(); ++s) jobs.push_back({v, seed, s});

  SweepOutput out;
  out.rows.resize(jobs.size());
  parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
    const Job& job = jobs[i];
    const SmoothnessParams params =
        apply_sweep(cfg.instance.params, cfg.sweep_parameter, cfg.sweep_values[job.value]);
    try {
      out.rows[i] = run_cell(cfg, solvers[job.solver], job.seed, params).row;
    } catch (const std::exception& e) {
      // bad grid point or failed reference: recorded, the sweep goes on
      SweepRow& r = out.rows[i];
      r.seed = job.seed;
      r.n = cfg.instance.n;
      r.m = cfg.instance.m;
      r.params = params;
      r.solver = solvers[job.solver].name;
      r.mode = cfg.mode;
      r.final_relative_error = std::nan("");
      r.termination = Termination::PreconditionViolated;
      r.note = e.what();
    }
  });

  for (std::size_t s = 0; s < solvers.size(); ++s) {
    for (std::size_t v = 0; v < cfg.sweep_values.size(); ++v) {
      std::vector<double> evals, matvecs, errors;
      int met = 0;
      for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (jobs[i].solver != s || jobs[i].value != v) continue;
        const SweepRow& r = out.rows[i];
        evals.push_back(static_cast<double>(r.gradient_evals));
        matvecs.push_back(static_cast<double>(r.matvec_products));
        errors.push_back(r.final_relative_error);
        if (r.termination == Termination::ToleranceMet) ++met;
      }
      out.summary.push_back({solvers[s].name, cfg.sweep_values[v], median(evals), median(matvecs),
                             median(errors), static_cast<int>(evals.size()), met});
    }
  }

  // bound curves evaluated point by point so any sweep parameter works
  for (std::size_t v = 0; v < cfg.sweep_values.size(); ++v) {
    const double x = cfg.sweep_values[v];
    SmoothnessParams p;
    try {
      p = apply_sweep(cfg.instance.params, cfg.sweep_parameter, x);
      p.validate();
    } catch (const ConfigError&) {
      continue;
    }
    const auto curves = bound_curves(p, {p.L_xy}, cfg.epsilon);
    for (const auto& c : curves) {
      auto it = std::find_if(out.bounds.begin(), out.bounds.end(),
                             [&](const BoundCurve& b) { return b.label == c.label; });
      if (it == out.bounds.end()) {
        out.bounds.push_back({c.label, {}});
        it = std::prev(out.bounds.end());
      }
      for (const auto& [lxy, val] : c.values) it->values.emplace_back(x, val);
    }
  }

  if (write) {
    write_rows(with_suffix(cfg.out, ".csv"), out.rows);
    std::string text =
        "solver,sweep_parameter,sweep_value,runs,tolerance_met,median_gradient_evals,"
        "median_matvec_products,median_relative_error\n";
    for (const auto& r : out.summary)
      text += r.solver + "," + cfg.sweep_parameter + "," + fmt17(r.sweep_value) + "," +
              std::to_string(r.runs) + "," + std::to_string(r.tolerance_met) + "," +
              fmt17(r.median_gradient_evals) + "," + fmt17(r.median_matvec_products) + "," +
              fmt17(r.median_relative_error) + "\n";
    write_text(with_suffix(cfg.out, ".summary.csv"), text);
    write_bounds(with_suffix(cfg.out, ".bounds.csv"), out.bounds);
    write_text(with_suffix(cfg.out, ".config.json"), to_json(cfg).dump(2) + "\n");
  }
  return out;
}

void write_bounds(const std::filesystem::path& path, const std::vector<BoundCurve>& curves) {
  std::string text = "curve,sweep_value,complexity\n";
  for (const auto& c : curves)
    for (const auto& [x, v] : c.values) text += c.label + "," + fmt17(x) + "," + fmt17(v) + "\n";
  write_text(path, text);
}

bool ValidationReport::passed() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

json ValidationReport::to_json() const {
  json list = json::array();
  for (const auto& c : checks)
    list.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return {{"suite", suite}, {"passed", passed()}, {"checks", list}};
}

}  // namespace minimax

// Property suites behind `minimax validate`. Each check aggregates one property
// over one instance, with the worst observed slack in its detail string.
#include "minimax/abr.hpp"
#include "minimax/agd.hpp"
#include "minimax/harness.hpp"
#include "minimax/rhss.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

namespace minimax {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

class Suite {
 public:
  explicit Suite(std::string name) { rep_.suite = std::move(name); }
  // ok when observed <= limit; detail records both
  void bound(const std::string& name, double observed, double limit) {
    rep_.checks.push_back({name, observed <= limit, "observed " + num(observed) + " limit " + num(limit)});
  }
  void flag(const std::string& name, bool ok, const std::string& detail) {
    rep_.checks.push_back({name, ok, detail});
  }
  void absorb(const ValidationReport& other) {
    for (const auto& c : other.checks) rep_.checks.push_back({other.suite + "/" + c.name, c.passed, c.detail});
  }
  ValidationReport take() { return std::move(rep_); }

 private:
  ValidationReport rep_;
};

double log_uniform(SplitMix64& r, double lo, double hi) {
  return lo * std::exp(r.uniform() * std::log(hi / lo));
}

Index dim(SplitMix64& r, Index lo, Index hi) {
  return lo + static_cast<Index>(r.next() % static_cast<std::uint64_t>(hi - lo + 1));
}

SpectrumShape shape_of(int i) {
  static const SpectrumShape shapes[] = {SpectrumShape::Endpoints, SpectrumShape::LogUniform,
                                         SpectrumShape::Clustered};
  return shapes[i % 3];
}

// general member of the class: kappas up to 1e3, L_xy anywhere in [0, L_x]
InstanceSpec general_instance(std::uint64_t seed, int i) {
  SplitMix64 r(seed * 7919 + static_cast<std::uint64_t>(i) + 1);
  InstanceSpec s;
  s.n = dim(r, 2, 12);
  s.m = dim(r, 2, 12);
  s.params.m_x = log_uniform(r, 0.3, 3);
  s.params.m_y = log_uniform(r, 0.3, 3);
  s.params.L_x = s.params.m_x * log_uniform(r, 1, 1e3);
  s.params.L_y = s.params.m_y * log_uniform(r, 1, 1e3);
  s.params.L_xy = (i % 5 == 0 ? 0.0 : r.uniform()) * s.params.L_x;
  s.seed = r.next();
  s.spectrum = shape_of(i);
  return s;
}

// L_x = L_y, m_x <= m_y < L_xy: the normalized setting of the splitting solver
InstanceSpec split_instance(std::uint64_t seed, int i, Index lo, Index hi, double L_lo = 1e2,
                            double L_hi = 1e3) {
  SplitMix64 r(seed * 6007 + static_cast<std::uint64_t>(i) + 11);
  InstanceSpec s;
  s.n = dim(r, lo, hi);
  s.m = dim(r, lo, hi);
  const double L = log_uniform(r, L_lo, L_hi);
  s.params.m_x = 1;
  s.params.m_y = log_uniform(r, 1, 10);
  s.params.L_x = s.params.L_y = L;
  s.params.L_xy = s.params.m_y * std::pow(L / s.params.m_y, 0.2 + 0.8 * r.uniform());
  s.seed = r.next();
  s.spectrum = shape_of(i);
  return s;
}

// L_xy <= sqrt(m_x m_y) / 2
InstanceSpec weak_instance(std::uint64_t seed, int i) {
  SplitMix64 r(seed * 4421 + static_cast<std::uint64_t>(i) + 5);
  InstanceSpec s;
  s.n = dim(r, 2, 16);
  s.m = dim(r, 2, 16);
  s.params.m_x = log_uniform(r, 0.5, 2);
  s.params.m_y = log_uniform(r, 0.5, 2);
  s.params.L_x = s.params.m_x * log_uniform(r, 1, 100);
  s.params.L_y = s.params.m_y * log_uniform(r, 1, 100);
  s.params.L_xy = r.uniform() * 0.5 * std::sqrt(s.params.m_x * s.params.m_y);
  s.seed = r.next();
  s.spectrum = shape_of(i);
  return s;
}

std::string tag(int i) { return "instance " + std::to_string(i); }

Vec sym_eigs(const Mat& a) {
  return Eigen::SelfAdjointEigenSolver<Mat>(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly)
      .eigenvalues();
}

ValidationReport facts_suite(std::uint64_t seed) {
  Suite s("facts");
  const double slack = 1e-9;
  for (int i = 0; i < 20; ++i) {
    const InstanceSpec spec = general_instance(seed, i);
    const auto& p = spec.params;
    const QuadraticSaddle q = make_quadratic(spec);
    const JointPoint zs = direct_saddle(q);
    const BestResponse br(q);
    const GradientOracle g = quadratic_oracle(q);
    const double mmin = std::min(p.m_x, p.m_y), L = p.L();
    SplitMix64 r(spec.seed ^ 0x1234567ULL);

    double lip_x = 0, lip_y = 0, sandwich = 0, grad_lo = 0, grad_hi = 0, gap = 0;
    for (int t = 0; t < 1000; ++t) {
      const double scale = log_uniform(r, 1e-2, 1e2);
      JointPoint d = random_point(q.n(), q.m(), r.next());
      const JointPoint z = zs + scale * d;
      const JointPoint w = zs + log_uniform(r, 1e-2, 1e2) * random_point(q.n(), q.m(), r.next());
      // best-response Lipschitz ratios, normalized so <= 1 is the claim
      const double dx = (z.x - w.x).norm(), dy = (z.y - w.y).norm();
      if (p.L_xy > 0) {
        lip_y = std::max(lip_y, (br.y_star_of_x(z.x) - br.y_star_of_x(w.x)).norm() /
                                    (p.L_xy / p.m_y * dx));
        lip_x = std::max(lip_x, (br.x_star_of_y(z.y) - br.x_star_of_y(w.y)).norm() /
                                    (p.L_xy / p.m_x * dy));
      } else {
        lip_y = std::max(lip_y, (br.y_star_of_x(z.x) - br.y_star_of_x(w.x)).norm() / dx);
        lip_x = std::max(lip_x, (br.x_star_of_y(z.y) - br.x_star_of_y(w.y)).norm() / dy);
      }
      const auto e = weighted_error(z, zs);
      sandwich = std::max({sandwich, e.sum_norm / std::sqrt(2.0) / e.joint_norm - 1,
                           e.joint_norm / e.sum_norm - 1});
      const double gn = g.eval(z).norm();
      grad_lo = std::max(grad_lo, mmin * e.joint_norm / gn - 1);
      grad_hi = std::max(grad_hi, gn / (2 * L * e.joint_norm) - 1);
      gap = std::max(gap, duality_gap_raw(q, z) / (L * L / mmin * e.joint_norm * e.joint_norm) - 1);
    }
    const std::string t = tag(i);
    if (p.L_xy > 0) {
      s.bound(t + ": y* is L_xy/m_y-Lipschitz", lip_y, 1 + slack);
      s.bound(t + ": x* is L_xy/m_x-Lipschitz", lip_x, 1 + slack);
    } else {
      s.bound(t + ": y* constant without coupling", lip_y, slack);
      s.bound(t + ": x* constant without coupling", lip_x, slack);
    }
    // primal and dual envelopes: Hessians A + B C^-1 B' and C + B' A^-1 B
    const Vec hp = sym_eigs(q.A + q.B * q.C.llt().solve(q.B.transpose()));
    const Vec hd = sym_eigs(q.C + q.B.transpose() * q.A.llt().solve(q.B));
    s.bound(t + ": primal envelope strongly convex", p.m_x / hp.minCoeff(), 1 + slack);
    s.bound(t + ": primal envelope smooth", hp.maxCoeff() / (p.L_x + p.L_xy * p.L_xy / p.m_y),
            1 + slack);
    s.bound(t + ": dual envelope strongly concave", p.m_y / hd.minCoeff(), 1 + slack);
    s.bound(t + ": dual envelope smooth", hd.maxCoeff() / (p.L_y + p.L_xy * p.L_xy / p.m_x),
            1 + slack);
    s.bound(t + ": summed and joint norms sandwich", sandwich, slack);
    s.bound(t + ": gradient lower sandwich", grad_lo, slack);
    s.bound(t + ": gradient upper sandwich", grad_hi, slack);
    s.bound(t + ": duality gap bound", gap, slack);
  }
  return s.take();
}

ValidationReport contraction_suite(std::uint64_t seed) {
  Suite s("contraction");
  for (int i = 0; i < 20; ++i) {
    const InstanceSpec spec = weak_instance(seed, i);
    const QuadraticSaddle q = make_quadratic(spec);
    const JointPoint zs = direct_saddle(q);
    const JointPoint z0 = random_point(q.n(), q.m(), spec.seed + 3);
    const double init = weighted_error(z0, zs).sum_norm;
    for (double eps : {1e-2, 1e-4}) {
      AbrConfig cfg;
      cfg.epsilon = eps;
      cfg.params = spec.params;
      Monitor mon;
      mon.record_iterates = true;
      const SolveReport r = abr_solve(quadratic_oracle(q), z0, cfg, mon);
      const std::string t = tag(i) + " eps " + num(eps);
      s.bound(t + ": summed error ratio", weighted_error(r.final_point, zs).sum_norm / init, eps);
      const auto rounds = abr_round_contraction(r.iterates, zs, spec.params);
      double worst = 0;
      for (double c : rounds) worst = std::max(worst, c);
      s.bound(t + ": weighted contraction per round", worst, 0.55);
    }
  }
  return s.take();
}

ValidationReport agd_suite(std::uint64_t seed) {
  Suite s("agd");
  int idx = 0;
  for (double kappa : {10.0, 1e2, 1e3}) {
    for (int rep = 0; rep < 4; ++rep, ++idx) {
      SplitMix64 r(seed * 313 + static_cast<std::uint64_t>(idx) + 1);
      const Index n = 24;
      const double mu = log_uniform(r, 0.1, 10);
      const Vec e = spectrum_values(n, mu, kappa * mu, shape_of(rep), r);
      const Mat Q = random_orthogonal(n, r);
      const Mat H = Q * e.asDiagonal() * Q.transpose();
      Vec c(n);
      for (Index j = 0; j < n; ++j) c[j] = r.normal();
      const Vec xs = H.llt().solve(-c);
      Vec x0(n);
      for (Index j = 0; j < n; ++j) x0[j] = xs[j] + r.normal();
      const BlockGradient grad = [&](const Vec& x, Vec& g) { g = H * x + c; };
      const double e0 = (x0 - xs).squaredNorm();
      double worst = -1e300;
      for (int T : {0, 1, 2, 5, 10, 20, 50, 100, 200, 400}) {
        const Vec xT = agd(grad, x0, {kappa * mu, mu, T});
        const double lhs = (xT - xs).squaredNorm();
        const double rhs = agd_error_bound(kappa, T) * e0 + 1e-9;
        worst = std::max(worst, lhs - rhs);
      }
      s.bound("kappa " + num(kappa) + " run " + std::to_string(rep) + ": squared error over bound",
              worst, 0);
    }
  }
  return s.take();
}

ValidationReport hss_suite(std::uint64_t seed) {
  Suite s("hss-spectral");
  for (int i = 0; i < 20; ++i) {
    const InstanceSpec spec = split_instance(seed, i, 2, 8);
    const auto& p = spec.params;
    const QuadraticSaddle q = make_quadratic(spec);
    const JointPoint zs = direct_saddle(q);
    const Vec zstar = zs.stacked(), b = q.coupled_rhs();
    const Vec sv = Eigen::JacobiSVD<Mat>(q.coupled_matrix()).singularValues();
    const std::string t = tag(i);
    s.bound(t + ": smallest singular value of J above m_x", p.m_x - 1e-9 - sv.minCoeff(), 0);
    s.bound(t + ": largest singular value of J below L_xy + L_x", sv.maxCoeff(),
            p.L_xy + p.L_x + 1e-9);
    for (int k : {1, 2, 3}) {
      const HssOperators ops = make_hss_operators(q, p, k);
      const std::string tk = t + " k " + std::to_string(k);
      const double radius_bound = hss_spectral_bound(ops);
      s.bound(tk + ": spectral bound below 1", radius_bound, 1 - 1e-15);
      s.bound(tk + ": spectral radius of M within bound", hss_spectral_radius(ops), radius_bound + 1e-10);
      s.bound(tk + ": weighted norm of M within bound", hss_weighted_norm(ops), radius_bound + 1e-10);
      const Vec shifted = sym_eigs(ops.eta * ops.P + ops.G);
      const double cond = shifted.maxCoeff() / shifted.minCoeff();
      const double cond_limit =
          std::min(3 * p.kappa_x() * std::pow(p.m_y / p.L_xy, 1.0 / k), p.kappa_x());
      s.bound(tk + ": condition of eta P + G", cond, cond_limit * (1 + 1e-9));
      if (k < 2) continue;  // depth 1 has no splitting subproblem
      s.bound(tk + ": spectral bound within contraction factor", radius_bound, contraction_factor(p, k));
      // declared subproblem class against its measured spectrum
      const RhssSubproblem sub = rhss_subproblem(q, p, k, Vec::Zero(q.n() + q.m()));
      const Vec ea = sym_eigs(sub.q.A), ec = sym_eigs(sub.q.C);
      const double top = 2 * ops.eta * ops.beta * p.L_x;
      s.bound(tk + ": subproblem primal block above eta alpha",
              ops.eta * ops.alpha - ea.minCoeff(), 1e-9 * top);
      s.bound(tk + ": subproblem dual block above eta", ops.eta - ec.minCoeff(), 1e-9 * top);
      s.bound(tk + ": subproblem blocks below 2 eta beta L_x", std::max(ea.maxCoeff(), ec.maxCoeff()),
              top * (1 + 1e-9));
      const double factor = contraction_factor(p, k);
      SplitMix64 r(spec.seed + static_cast<std::uint64_t>(k));
      Vec z = zstar + random_point(q.n(), q.m(), r.next()).stacked();
      double worst = 0;
      for (int step = 0; step < 12; ++step) {
        const double before = hss_weighted_error(ops, z - zstar);
        if (before < 1e-9 * hss_weighted_error(ops, zstar)) break;
        z = hss_exact_step(ops, z, b);
        worst = std::max(worst, hss_weighted_error(ops, z - zstar) / before);
      }
      s.bound(tk + ": exact splitting step ratio, weighted norm", worst, factor + 1e-10);
    }
  }
  return s.take();
}

// The same operators judged in the plain Euclidean norm, where the contraction
// bound is usually stated. Expected to fail on some instances; kept so the
// gap stays visible.
ValidationReport hss_euclidean_suite(std::uint64_t seed) {
  Suite s("hss-euclidean");
  for (int i = 0; i < 20; ++i) {
    const InstanceSpec spec = split_instance(seed, i, 2, 8);
    const auto& p = spec.params;
    const QuadraticSaddle q = make_quadratic(spec);
    const Vec zstar = direct_saddle(q).stacked(), b = q.coupled_rhs();
    for (int k : {2, 3}) {
      const HssOperators ops = make_hss_operators(q, p, k);
      const std::string tk = tag(i) + " k " + std::to_string(k);
      const double nrm = Eigen::JacobiSVD<Mat>(hss_iteration_matrix(ops)).singularValues()[0];
      s.bound(tk + ": 2-norm of M within spectral bound", nrm, hss_spectral_bound(ops) + 1e-10);
      SplitMix64 r(spec.seed + static_cast<std::uint64_t>(k));
      Vec z = zstar + random_point(q.n(), q.m(), r.next()).stacked();
      double worst = 0;
      for (int step = 0; step < 12; ++step) {
        const double before = (z - zstar).norm();
        if (before < 1e-9 * zstar.norm()) break;
        z = hss_exact_step(ops, z, b);
        worst = std::max(worst, (z - zstar).norm() / before);
      }
      s.bound(tk + ": exact splitting step ratio, 2-norm", worst, contraction_factor(p, k) + 1e-10);
    }
  }
  return s.take();
}

ValidationReport rhss_suite(std::uint64_t seed) {
  Suite s("rhss-certificate");
  // Theoretical inner tolerances make each run cost millions of evaluations,
  // so this suite keeps L modest
  for (int i = 0; i < 6; ++i) {
    const InstanceSpec spec = split_instance(seed + 101, i, 4, 16, 20, 60);
    const auto& p = spec.params;
    const QuadraticSaddle q = make_quadratic(spec);
    const JointPoint zs = direct_saddle(q);
    const JointPoint z0 = random_point(q.n(), q.m(), spec.seed + 9);
    const int k = 2 + i % 2;
    RhssConfig cfg;
    cfg.k = k;
    cfg.epsilon = 1e-6;
    cfg.mode = Mode::Theoretical;
    Monitor mon;
    mon.reference = zs;
    const SolveReport r = rhss_solve(q, p, z0, cfg, mon);
    const std::string t = tag(i) + " k " + std::to_string(k);
    const double rate = 1 - 0.25 * std::pow(p.m_y / p.L_xy, 1.0 / k);
    double worst = 0;
    const auto& h = r.error_history;
    for (std::size_t j = 1; j < h.size(); ++j)
      if (h[j - 1].residual > 1e-12) worst = std::max(worst, h[j].residual / h[j - 1].residual);
    s.flag(t + ": stopping rule fired", r.termination == Termination::ToleranceMet,
           to_string(r.termination) + " after " + std::to_string(r.outer_iterations));
    s.bound(t + ": contraction per outer iteration", worst, rate);
    s.bound(t + ": certified relative error",
            (r.final_point - zs).norm() / (z0 - zs).norm(), cfg.epsilon);
  }
  return s.take();
}

ValidationReport cg_suite(std::uint64_t seed) {
  Suite s("cg");
  int idx = 0;
  for (double kappa : {1e2, 1e4}) {
    for (int rep = 0; rep < 6; ++rep, ++idx) {
      SplitMix64 r(seed * 977 + static_cast<std::uint64_t>(idx) + 3);
      const Index n = 80;
      const Vec e = spectrum_values(n, 1, kappa, rep % 2 ? SpectrumShape::LogUniform
                                                         : SpectrumShape::Endpoints, r);
      const Mat Q = random_orthogonal(n, r);
      const Mat H = Q * e.asDiagonal() * Q.transpose();
      Vec b(n);
      for (Index j = 0; j < n; ++j) b[j] = r.normal();
      const LinearMap apply = [&](const Vec& in, Vec& out) { out = H * in; };
      const double eps = 1e-8;
      const CgResult res = cg(apply, b, Vec::Zero(n), eps);
      const std::string t = "kappa " + num(kappa) + " run " + std::to_string(rep);
      s.flag(t + ": converged", res.converged && (H * res.x - b).norm() <= eps * b.norm() * (1 + 1e-6),
             "iterations " + std::to_string(res.iterations));
      s.bound(t + ": iterations within bound", static_cast<double>(res.iterations),
              static_cast<double>(cg_iteration_bound(kappa, eps)));
    }
  }
  return s.take();
}

ValidationReport conformance_suite(std::uint64_t seed) {
  Suite s("theorem-conformance");
  s.absorb(contraction_suite(seed));
  s.absorb(agd_suite(seed));
  s.absorb(rhss_suite(seed));
  s.absorb(cg_suite(seed));
  return s.take();
}

const std::map<std::string, std::function<ValidationReport(std::uint64_t)>>& registry() {
  static const std::map<std::string, std::function<ValidationReport(std::uint64_t)>> r{
      {"facts", facts_suite},
      {"contraction", contraction_suite},
      {"agd", agd_suite},
      {"hss-spectral", hss_suite},
      {"hss-euclidean", hss_euclidean_suite},
      {"rhss-certificate", rhss_suite},
      {"cg", cg_suite},
      {"theorem-conformance", conformance_suite}};
  return r;
}

}  // namespace

std::vector<std::string> validation_suites() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : registry()) names.push_back(name);
  return names;
}

ValidationReport validate_suite(const std::string& name, std::uint64_t seed) {
  const auto& r = registry();
  const auto it = r.find(name);
  if (it == r.end()) {
    std::string known;
    for (const auto& [n, fn] : r) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown validation suite '" + name + "' (known: " + known + ")");
  }
  return it->second(seed);
}

}  // namespace minimax

// Acceptance suite: runs the numbered end-to-end criteria and prints one
// pass/fail line per criterion. Exit code = number of failed criteria.
// Usage: acceptance [numbers...]   (no arguments runs everything)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dualgrad/experiments.hpp"
#include "dualgrad/mittag_leffler.hpp"
#include "dualgrad/selftest.hpp"

using namespace dualgrad;

namespace {

constexpr std::uint64_t kAcceptanceSeed = 1;

struct Criterion {
  int id;
  std::string name;
  std::function<bool(std::string&)> body;
};

std::string fmt(const char* f, double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

bool check(bool ok, const std::string& what, std::string& detail, bool& all) {
  if (!ok) detail += (detail.empty() ? "" : "; ") + what;
  all = all && ok;
  return ok;
}

const MethodAggregate& find_agg(const ExperimentReport& rep, long n,
                                const std::string& method) {
  for (const auto& a : rep.aggregates)
    if (a.n == n && a.method == method) return a;
  throw std::runtime_error("aggregate not found");
}

// ---- 1. Landweber equivalence -------------------------------------------
bool c1_landweber_equivalence(std::string& detail) {
  std::mt19937_64 eng(2022);
  std::normal_distribution<double> nd;
  const int dim = 20;
  Eigen::MatrixXd a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = nd(eng);
  const Space sp = Space::euclidean(dim);
  const LinearMap op = dense_map(sp, sp, a, a.transpose());
  Eigen::VectorXd ybar(dim);
  for (auto& v : ybar) v = nd(eng);
  const double nrm = estimate_norm(op);
  const double gamma = 1.0 / (nrm * nrm);

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd x_direct = Eigen::VectorXd::Zero(dim);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const StepResult s = dual_step(lambda, op, quadratic_penalty(), ybar, gamma);
    worst = std::max(worst, (s.x - x_direct).cwiseAbs().maxCoeff());
    lambda = s.lambda_next;
    x_direct -= gamma * (a.transpose() * (a * x_direct - ybar));
  }
  detail = "max-abs deviation " + fmt("%.2e", worst) + " over 100 iterations";
  return worst <= 1e-12;
}

// ---- 2. DST roundtrip -----------------------------------------------------
bool c2_dst_roundtrip(std::string& detail) {
  std::mt19937_64 eng(7);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (int N : {4, 16, 64}) {
    Field2D v(N - 1, N - 1);
    for (int i = 0; i < N - 1; ++i)
      for (int j = 0; j < N - 1; ++j) v(i, j) = nd(eng);
    worst = std::max(worst, (idst2(dst2(v)) - v).cwiseAbs().maxCoeff());
  }
  detail = "max roundtrip error " + fmt("%.2e", worst) + " for N in {4,16,64}";
  return worst <= 1e-10;
}

// ---- 3. Mittag-Leffler ----------------------------------------------------
bool c3_mittag_leffler(std::string& detail) {
  bool ok = true;
  double worst_exp = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double z = -10.0 + 11.0 * i / 49.0;
    worst_exp = std::max(worst_exp, std::abs(mittag_leffler(1.0, z) - std::exp(z)));
  }
  check(worst_exp <= 1e-8, "E_1 vs exp " + fmt("%.2e", worst_exp), detail, ok);

  for (double alph : {0.3, 0.5, 0.8, 1.0})
    check(mittag_leffler(alph, 0.0) == 1.0, "E_a(0) != 1", detail, ok);

  double worst_series = 0.0;
  for (double alph : {0.3, 0.5, 0.8}) {
    for (double z = -2.0; z <= 2.0; z += 4.0 / 64.0) {
      double sum = 0.0, comp = 0.0;  // 200-term compensated series oracle
      for (int k = 0; k < 200; ++k) {
        const double term = std::pow(z, k) * std::exp(-std::lgamma(alph * k + 1.0));
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
      }
      worst_series = std::max(worst_series, std::abs(mittag_leffler(alph, z) - sum));
    }
  }
  check(worst_series <= 1e-10, "series oracle " + fmt("%.2e", worst_series), detail, ok);

  const double erfc_ref = std::exp(1.0) * std::erfc(1.0);
  const double de = std::abs(mittag_leffler(0.5, -1.0) - erfc_ref);
  check(de <= 1e-8, "E_1/2(-1) vs e*erfc(1): " + fmt("%.2e", de), detail, ok);
  if (ok)
    detail = "exp " + fmt("%.2e", worst_exp) + ", series " + fmt("%.2e", worst_series) +
             ", erfc " + fmt("%.2e", de);
  return ok;
}

// ---- 4. Adjoint identities ------------------------------------------------
bool c4_adjoints(std::string& detail) {
  const auto defect = [](const LinearMap& op, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> nd;
    double worst = 0.0;
    for (int t = 0; t < 25; ++t) {
      Eigen::VectorXd x(op.domain().dim()), y(op.range().dim());
      for (auto& v : x) v = nd(eng);
      for (auto& v : y) v = nd(eng);
      const double lhs = dot(op.range(), op.apply(x), y);
      const double rhs = dot(op.domain(), x, op.apply_adjoint(y));
      worst = std::max(worst, std::abs(lhs - rhs) /
                                  std::max({std::abs(lhs), std::abs(rhs), 1e-30}));
    }
    return worst;
  };
  const Grid1D g(400);
  const auto gauss = [](double s, double t) {
    return 3.0 * std::exp(-(s - t) * (s - t) / 0.04);
  };
  struct Case { const char* name; double d; };
  const LinearMap a1 = integral_operator(&kernel_ex1, g);
  const Case cases[] = {
      {"ex1-kernel", defect(a1, 11)},
      {"gauss-kernel", defect(integral_operator(gauss, g), 12)},
      {"gradient", defect(discrete_gradient(g), 13)},
      {"stacked-tv", defect(stack_constraint(a1, discrete_gradient(g)).map, 14)},
      {"fracdiff-N64", defect(build_fracdiff_operator({64, 0.5, 0.1}), 15)},
  };
  bool ok = true;
  double worst = 0.0;
  for (const auto& c : cases) {
    worst = std::max(worst, c.d);
    if (c.d > 1e-10) {
      ok = false;
      detail += std::string(detail.empty() ? "" : "; ") + c.name + " defect " +
                fmt("%.2e", c.d);
    }
  }
  if (ok) detail = "worst relative defect " + fmt("%.2e", worst) + " over 5 operators";
  return ok;
}

// ---- 5. Variance identity -------------------------------------------------
bool c5_variance(std::string& detail) {
  const Grid1D g(400);
  const Space sp = trapezoid_space(g);
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(sp.dim());
  const NoiseModel noise{0.2, 0.0};

  double acc = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto e = generate_ensemble(sp, y, noise, 100, stream_seed(kAcceptanceSeed, 5, t));
    const double d = norm(sp, e.mean() - y);
    acc += d * d;
  }
  const double mean_sq = acc / 1000.0;
  bool ok = true;
  check(std::abs(mean_sq - 4e-4) <= 0.15 * 4e-4,
        "mean ||ybar-y||^2 = " + fmt("%.3e", mean_sq) + " vs 4e-4", detail, ok);

  const auto big = generate_ensemble(sp, y, noise, 100000, stream_seed(kAcceptanceSeed, 55, 0));
  const double sn = big.sample_std();
  check(std::abs(sn - 0.2) <= 0.02 * 0.2, "s_n = " + fmt("%.4f", sn) + " vs 0.2",
        detail, ok);
  if (ok)
    detail = "mean ||ybar-y||^2 " + fmt("%.4e", mean_sq) + " (target 4e-4 +-15%), s_n " +
             fmt("%.5f", sn) + " (target 0.2 +-2%)";
  return ok;
}

// ---- 6. Constrained deconvolution benchmark (ex1) ---------------------------
bool c6_table1(std::string& detail) {
  ExperimentSpec spec = builtin_spec(ExperimentId::ex1);
  spec.n_list = {10, 100, 1000};
  spec.n_sims = 50;
  spec.seed = kAcceptanceSeed;
  const ExperimentReport rep = run_experiment(spec);

  bool ok = true;
  for (const auto& method : rep.methods) {
    double prev = 1e300;
    for (long n : spec.n_list) {
      const auto& a = find_agg(rep, n, method);
      check(a.rms_error < prev,
            method + " RMS not decreasing at n=" + std::to_string(n), detail, ok);
      prev = a.rms_error;
      check(a.emergency == 0, method + " emergency stops at n=" + std::to_string(n),
            detail, ok);
    }
  }
  for (long n : {100L, 1000L})
    check(find_agg(rep, n, "dgm-NN").rms_error <=
              find_agg(rep, n, "Landweber").rms_error,
          "dgm-NN worse than Landweber at n=" + std::to_string(n), detail, ok);

  const auto& nn1000 = find_agg(rep, 1000, "dgm-NN");
  check(nn1000.rms_error >= 0.04 && nn1000.rms_error <= 0.15,
        "dgm-NN RMS at n=1000 out of [0.04,0.15]: " + fmt("%.4e", nn1000.rms_error),
        detail, ok);
  check(nn1000.mean_iterations >= 126 && nn1000.mean_iterations <= 504,
        "mean stopping index " + fmt("%.1f", nn1000.mean_iterations) +
            " not within factor 2 of 252",
        detail, ok);
  if (ok)
    detail = "RMS(dgm-NN) " + fmt("%.4e", find_agg(rep, 10, "dgm-NN").rms_error) + " / " +
             fmt("%.4e", find_agg(rep, 100, "dgm-NN").rms_error) + " / " +
             fmt("%.4e", nn1000.rms_error) + " (reference 3.9e-1/1.25e-1/7.4e-2), stop idx " +
             fmt("%.0f", nn1000.mean_iterations) + " (reference 252), 0 emergencies";
  return ok;
}

// ---- 7. A priori rate check ------------------------------------------------
bool c7_rate(std::string& detail) {
  ExperimentSpec spec = builtin_spec(ExperimentId::ex1);
  spec.rule = "apriori";
  spec.q = 1.0;
  spec.c_scale = 1.0;
  spec.with_landweber = false;
  spec.n_list = {100, 1000, 10000};
  spec.n_sims = 20;
  spec.seed = kAcceptanceSeed;
  const ExperimentReport rep = run_experiment(spec);

  std::vector<double> lx, ly;
  for (long n : spec.n_list) {
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(find_agg(rep, n, "dgm-NN").rms_error));
  }
  const double mx = (lx[0] + lx[1] + lx[2]) / 3.0, my = (ly[0] + ly[1] + ly[2]) / 3.0;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < 3; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  const double slope = sxy / sxx;
  detail = "log-log slope " + fmt("%.3f", slope) + " (band [-0.45, -0.10])";
  return slope >= -0.45 && slope <= -0.10;
}

// ---- 8. Density reconstruction benchmark (ex2) ------------------------------
bool c8_table2(std::string& detail) {
  // run the entropic method by explicit steps so that every iterate can be
  // checked for the density property
  ExperimentSpec spec = builtin_spec(ExperimentId::ex2);
  spec.n_list = {10, 100};
  spec.n_sims = 20;
  spec.seed = kAcceptanceSeed;
  const Problem prob = assemble_problem(spec);
  const Space& sp = prob.solution_space;

  bool ok = true;
  bool density_ok = true;
  double worst_mass = 0.0;
  std::vector<double> rms_list;
  for (long n : spec.n_list) {
    std::vector<double> errors;
    for (int sim = 0; sim < spec.n_sims; ++sim) {
      const auto ens = generate_ensemble(prob.data_space, prob.y_exact, spec.noise, n,
                                         stream_seed(spec.seed, n, sim));
      const double thr =
          tau_n(static_cast<double>(n), spec.tau0) * ens.sample_std() / std::sqrt(n);
      const long cap = static_cast<long>(std::ceil(spec.beta0 * n));
      Eigen::VectorXd lambda = Eigen::VectorXd::Zero(prob.op.range().dim());
      Eigen::VectorXd x;
      for (long t = 0;; ++t) {
        const StepResult s = dual_step(lambda, prob.op, prob.penalty, ens.mean(),
                                       prob.gamma);
        x = s.x;
        const double mass_defect = std::abs(sp.weights.dot(x) - 1.0);
        worst_mass = std::max(worst_mass, mass_defect);
        if (x.minCoeff() <= 0.0 || mass_defect > 1e-10) density_ok = false;
        if (s.residual <= thr || t == cap) break;
        lambda = s.lambda_next;
      }
      errors.push_back(relative_error(sp, x, prob.x_exact, ErrorMode::L1));
    }
    rms_list.push_back(aggregate(errors).rms);
  }
  check(density_ok, "an iterate was not a probability density (worst mass defect " +
                        fmt("%.2e", worst_mass) + ")",
        detail, ok);
  check(rms_list[1] < rms_list[0], "RMS L1 error not decreasing", detail, ok);
  check(rms_list[1] >= 0.09 && rms_list[1] <= 0.35,
        "RMS L1 at n=100 out of [0.09,0.35]: " + fmt("%.4e", rms_list[1]), detail, ok);
  if (ok)
    detail = "every iterate a density (worst mass defect " + fmt("%.2e", worst_mass) +
             "), RMS L1 " + fmt("%.4e", rms_list[0]) + " -> " + fmt("%.4e", rms_list[1]) +
             " (reference 4.27e-1 -> 1.79e-1)";
  return ok;
}

// ---- 9. Sparse initial-data recovery (trend-only) ---------------------------
bool c9_ex3(std::string& detail) {
  // The published statistics for this family depend on a grid, alpha and T
  // that were never stated, so this check is trend-only by design.
  ExperimentSpec spec = builtin_spec(ExperimentId::ex3);
  spec.n_list = {10, 100};
  spec.n_sims = 10;
  spec.seed = kAcceptanceSeed;
  const ExperimentReport rep = run_experiment(spec);
  const Problem prob = assemble_problem(spec);

  bool ok = true;
  const auto& a10 = find_agg(rep, 10, "dgm-L1");
  const auto& a100 = find_agg(rep, 100, "dgm-L1");
  check(a100.rms_error < a10.rms_error, "error not decreasing in n", detail, ok);
  check(a100.emergency == 0, "emergency stops at n=100", detail, ok);

  // thresholding activity: every final reconstruction keeps exact zeros
  double worst_zero_frac = 1.0;
  for (long n : spec.n_list) {
    for (int sim = 0; sim < spec.n_sims; ++sim) {
      const auto ens = generate_ensemble(prob.data_space, prob.y_exact, spec.noise, n,
                                         stream_seed(spec.seed, n, sim));
      SolverConfig cfg;
      cfg.gamma = prob.gamma;
      cfg.max_iters = spec.max_iters;
      const SolverRun r =
          run(prob.op, prob.penalty, ens, Discrepancy{spec.beta0, spec.tau0}, cfg);
      const double zf =
          static_cast<double>((r.x.array() == 0.0).count()) / r.x.size();
      worst_zero_frac = std::min(worst_zero_frac, zf);
    }
  }
  check(worst_zero_frac >= 0.10, "zero fraction " + fmt("%.2f", worst_zero_frac),
        detail, ok);
  if (ok)
    detail = "trend-only (reference values depend on unstated grid/alpha/T): RMS " +
             fmt("%.4e", a10.rms_error) + " -> " + fmt("%.4e", a100.rms_error) +
             ", min zero-fraction " + fmt("%.2f", worst_zero_frac) + ", 0 emergencies at n=100";
  return ok;
}

// ---- 10. Piecewise-constant reconstruction benchmark (ex4) ------------------
bool c10_table4(std::string& detail) {
  ExperimentSpec spec = builtin_spec(ExperimentId::ex4);
  spec.n_list = {10, 100, 1000};
  spec.n_sims = 20;
  spec.seed = kAcceptanceSeed;
  const ExperimentReport rep = run_experiment(spec);

  bool ok = true;
  double prev = 1e300;
  for (long n : spec.n_list) {
    const auto& a = find_agg(rep, n, "dgm-TV");
    check(a.rms_error < prev, "RMS not decreasing at n=" + std::to_string(n), detail, ok);
    prev = a.rms_error;
  }
  const auto& a1000 = find_agg(rep, 1000, "dgm-TV");
  check(a1000.rms_error >= 0.08 && a1000.rms_error <= 0.35,
        "RMS at n=1000 out of [0.08,0.35]: " + fmt("%.4e", a1000.rms_error), detail, ok);
  // emergency stops are permitted at n in {10, 100}; their counts are reported
  const int em10 = find_agg(rep, 10, "dgm-TV").emergency;
  const int em100 = find_agg(rep, 100, "dgm-TV").emergency;
  if (ok)
    detail = "RMS " + fmt("%.4e", find_agg(rep, 10, "dgm-TV").rms_error) + " / " +
             fmt("%.4e", find_agg(rep, 100, "dgm-TV").rms_error) + " / " +
             fmt("%.4e", a1000.rms_error) +
             " (reference 3.58e-1/2.27e-1/1.72e-1), emergencies " + std::to_string(em10) +
             "/" + std::to_string(em100) + "/" + std::to_string(a1000.emergency) +
             " (reference 10/70/0 of 200)";
  return ok;
}

// ---- 11. Stopping-rule unit contracts ---------------------------------------
bool c11_stopping(std::string& detail) {
  bool ok = true;
  check(tau_n(1e5, 1.1) == 1.1, "tau_n(1e5, 1.1) != 1.1", detail, ok);
  const double t100 = tau_n(1e100, 1.1);
  check(std::abs(t100 - 1.694) <= 1e-3, "tau_n(1e100) = " + fmt("%.6f", t100), detail, ok);

  std::mt19937_64 eng(31);
  std::normal_distribution<double> nd;
  // fixed spectrum in [0.5, 2]: the discrepancy threshold is reachable
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(12, 12);
  for (int i = 0; i < 12; ++i) a(i, i) = 0.5 + 1.5 * i / 11.0;
  const Space sp = Space::euclidean(12);
  const LinearMap op = dense_map(sp, sp, a, a.transpose());
  Eigen::VectorXd xt(12);
  for (auto& v : xt) v = std::abs(nd(eng));
  const double nrm = estimate_norm(op);

  SolverConfig cfg;
  cfg.gamma = 0.5 / (nrm * nrm);
  cfg.record_residuals = true;
  const auto data = generate_ensemble(op.range(), op.apply(xt), NoiseModel{0.05, 0.0},
                                      50, 2024);
  const SolverRun r = run(op, quadratic_penalty(), data, Discrepancy{50.0, 1.1}, cfg);
  check(r.cause == StopCause::discrepancy, "no discrepancy stop", detail, ok);
  check(r.residual <= r.threshold, "final residual above threshold", detail, ok);
  bool first_cross = true;
  for (long t = 0; t < r.iterations; ++t)
    if (r.residuals[static_cast<std::size_t>(t)] <= r.threshold) first_cross = false;
  check(first_cross, "not the first crossing", detail, ok);

  const auto exact = generate_ensemble(op.range(), op.apply(xt), NoiseModel{1e-300, 0.0},
                                       7, 3);
  const SolverRun re = run(op, quadratic_penalty(), exact, Discrepancy{3.5, 1.1}, cfg);
  check(re.cause == StopCause::emergency, "no emergency stop", detail, ok);
  check(re.iterations == 25, "emergency index " + std::to_string(re.iterations) +
                                 " != ceil(3.5*7) = 25",
        detail, ok);
  if (ok)
    detail = "first-crossing, emergency at ceil(beta0 n), tau values " +
             fmt("%.3f", tau_n(1e5, 1.1)) + " and " + fmt("%.6f", t100);
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<Criterion> all = {
      {1, "Landweber equivalence (quadratic dual iteration vs direct recursion)",
       &c1_landweber_equivalence},
      {2, "DST roundtrip identity", &c2_dst_roundtrip},
      {3, "Mittag-Leffler identities and series oracle", &c3_mittag_leffler},
      {4, "adjoint identities for all experiment operators", &c4_adjoints},
      {5, "variance identity and sample-deviation consistency", &c5_variance},
      {6, "constrained deconvolution benchmark (ex1, 50 sims)", &c6_table1},
      {7, "a priori rate check (log-log slope)", &c7_rate},
      {8, "density reconstruction benchmark (ex2, 20 sims, density iterates)", &c8_table2},
      {9, "sparse recovery trend (ex3 reduced, 10 sims)", &c9_ex3},
      {10, "piecewise-constant reconstruction benchmark (ex4, 20 sims)", &c10_table4},
      {11, "stopping-rule unit contracts", &c11_stopping},
  };

  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() &&
        std::find(wanted.begin(), wanted.end(), c.id) == wanted.end())
      continue;
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = c.body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %2d. %s — %s (%.1fs)\n", ok ? "PASS" : "FAIL", c.id,
                c.name.c_str(), detail.c_str(), secs);
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures;
}

#include "dualgrad/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <vector>

#include "dualgrad/experiments.hpp"
#include "dualgrad/fracdiff.hpp"
#include "dualgrad/mittag_leffler.hpp"
#include "dualgrad/sampling.hpp"
#include "dualgrad/solver.hpp"

namespace dualgrad {

namespace {

struct Check {
  std::string name;
  std::function<double()> worst;  // largest defect observed
  double bound;                   // pass when worst <= bound
};

double adjoint_defect(const LinearMap& op, int trials, std::uint64_t seed) {
  GaussianSampler g(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd x(op.domain().dim()), y(op.range().dim());
    for (auto& v : x) v = g();
    for (auto& v : y) v = g();
    const double lhs = dot(op.range(), op.apply(x), y);
    const double rhs = dot(op.domain(), x, op.apply_adjoint(y));
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-30});
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

double landweber_equivalence_defect() {
  // Random 10-dim system: the dual iteration with the quadratic penalty must
  // reproduce the direct primal recursion x <- x - gamma A^T (A x - y).
  GaussianSampler g(20240601);
  const int dim = 10;
  Eigen::MatrixXd a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = g();
  Space sp = Space::euclidean(dim);
  LinearMap op = dense_map(sp, sp, a, a.transpose());
  Eigen::VectorXd ybar(dim);
  for (auto& v : ybar) v = g();
  const double nrm = estimate_norm(op);
  const double gamma = 1.0 / (nrm * nrm);

  const DualPenalty quad = quadratic_penalty();
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd x_direct = Eigen::VectorXd::Zero(dim);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const StepResult s = dual_step(lambda, op, quad, ybar, gamma);
    worst = std::max(worst, (s.x - x_direct).cwiseAbs().maxCoeff());
    lambda = s.lambda_next;
    x_direct -= gamma * (a.transpose() * (a * x_direct - ybar));
  }
  return worst;
}

double variance_identity_defect() {
  // E ||ybar - y||^2 = sigma^2 / n, estimated over seeded trials.
  const Grid1D grid(100);
  const Space sp = trapezoid_space(grid);
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(sp.dim());
  const NoiseModel noise{0.2, 0.0};
  const long n = 50;
  const int trials = 400;
  double acc = 0.0;
  for (int t = 0; t < trials; ++t) {
    const auto e = generate_ensemble(sp, y, noise, n, stream_seed(515151, t));
    const double d = norm(sp, e.mean() - y);
    acc += d * d;
  }
  const double expected = 0.2 * 0.2 / static_cast<double>(n);
  return std::abs(acc / trials - expected) / expected;  // relative defect
}

}  // namespace

bool run_selftest(std::ostream& os, const std::string& filter, bool inject_fault) {
  std::vector<Check> checks;

  checks.push_back({"adjoint-kernel-ex1", [] {
    return adjoint_defect(integral_operator(&kernel_ex1, Grid1D(100)), 20, 11);
  }, 1e-10});
  checks.push_back({"adjoint-kernel-gauss", [] {
    const auto gauss = [](double s, double t) {
      return 3.0 * std::exp(-(s - t) * (s - t) / 0.04);
    };
    return adjoint_defect(integral_operator(gauss, Grid1D(100)), 20, 15);
  }, 1e-10});
  checks.push_back({"adjoint-gradient", [] {
    return adjoint_defect(discrete_gradient(Grid1D(100)), 20, 12);
  }, 1e-10});
  checks.push_back({"adjoint-stacked-tv", [] {
    const Grid1D g(60);
    return adjoint_defect(stack_constraint(integral_operator(&kernel_ex1, g),
                                           discrete_gradient(g)).map, 20, 13);
  }, 1e-10});
  checks.push_back({"adjoint-fracdiff", [] {
    return adjoint_defect(build_fracdiff_operator({16, 0.5, 0.1}), 20, 14);
  }, 1e-10});

  checks.push_back({"dst-roundtrip", [] {
    GaussianSampler g(77);
    double worst = 0.0;
    for (int N : {4, 16, 32}) {
      Field2D v(N - 1, N - 1);
      for (int i = 0; i < N - 1; ++i)
        for (int j = 0; j < N - 1; ++j) v(i, j) = g();
      worst = std::max(worst, (idst2(dst2(v)) - v).cwiseAbs().maxCoeff());
    }
    return worst;
  }, 1e-10});

  checks.push_back({"mittag-leffler-exp", [] {
    double worst = 0.0;
    for (int i = 0; i <= 40; ++i) {
      const double z = -10.0 + 11.0 * i / 40.0;
      worst = std::max(worst, std::abs(mittag_leffler(1.0, z) - std::exp(z)));
    }
    return worst;
  }, 1e-9});
  checks.push_back({"mittag-leffler-erfc", [] {
    // E_{1/2}(-1) = e * erfc(1)
    const double expected = std::exp(1.0) * std::erfc(1.0);
    return std::abs(mittag_leffler(0.5, -1.0) - expected);
  }, 1e-9});
  checks.push_back({"mittag-leffler-at-zero", [] {
    double worst = 0.0;
    for (double a : {0.3, 0.5, 0.8, 1.0})
      worst = std::max(worst, std::abs(mittag_leffler(a, 0.0) - 1.0));
    return worst;
  }, 0.0});

  checks.push_back({"landweber-equivalence", &landweber_equivalence_defect, 1e-12});
  checks.push_back({"variance-identity", &variance_identity_defect, 0.2});

  checks.push_back({"tau-n-constants", [] {
    const double a = std::abs(tau_n(100000, 1.1) - 1.1);
    const double b = std::abs(tau_n(2, 1.5) - 1.5);
    return std::max(a, b);
  }, 0.0});

  if (inject_fault)
    checks.push_back({"injected-fault", [] { return 1.0; }, 0.0});

  bool all_ok = true;
  int ran = 0;
  for (const auto& c : checks) {
    if (!filter.empty() && c.name.find(filter) == std::string::npos) continue;
    ++ran;
    double worst = 0.0;
    bool ok = true;
    std::string what;
    try {
      worst = c.worst();
      ok = worst <= c.bound;
    } catch (const std::exception& e) {
      ok = false;
      what = e.what();
    }
    char line[160];
    if (what.empty())
      std::snprintf(line, sizeof(line), "%-28s %s  (defect %.3e, bound %.1e)\n",
                    c.name.c_str(), ok ? "ok" : "FAIL", worst, c.bound);
    else
      std::snprintf(line, sizeof(line), "%-28s FAIL  (%s)\n", c.name.c_str(), what.c_str());
    os << line;
    all_ok = all_ok && ok;
  }
  if (ran == 0) {
    os << "no checks match filter '" << filter << "'\n";
    return false;
  }
  return all_ok;
}

}  // namespace dualgrad

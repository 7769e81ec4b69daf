#include "dualgrad/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace dualgrad {

namespace {

std::string fmt(const char* f, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

double quantile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

double relative_error(const Space& space, const Eigen::VectorXd& x_rec,
                      const Eigen::VectorXd& x_ref, ErrorMode mode) {
  if (x_rec.size() != x_ref.size() || x_rec.size() != space.dim())
    throw std::invalid_argument("relative_error: size mismatch");
  const double num = mode == ErrorMode::L2 ? norm(space, x_rec - x_ref)
                                           : norm_l1(space, x_rec - x_ref);
  const double den =
      mode == ErrorMode::L2 ? norm(space, x_ref) : norm_l1(space, x_ref);
  if (den == 0.0) throw std::domain_error("relative_error: zero reference norm");
  return num / den;
}

AggregateStats aggregate(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("aggregate: empty list");
  AggregateStats out;
  double ss = 0.0;
  for (double v : values) ss += v * v;
  out.rms = std::sqrt(ss / static_cast<double>(values.size()));

  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  Quartiles& qt = out.quartiles;
  qt.min = sorted.front();
  qt.max = sorted.back();
  qt.q1 = quantile(sorted, 0.25);
  qt.median = quantile(sorted, 0.5);
  qt.q3 = quantile(sorted, 0.75);
  const double iqr = qt.q3 - qt.q1;
  const double lo = qt.q1 - 1.5 * iqr;
  const double hi = qt.q3 + 1.5 * iqr;
  qt.whisker_low = qt.max;
  qt.whisker_high = qt.min;
  for (double v : sorted) {
    if (v >= lo && v < qt.whisker_low) qt.whisker_low = v;
    if (v <= hi && v > qt.whisker_high) qt.whisker_high = v;
    if (v < lo || v > hi) qt.outliers.push_back(v);
  }
  return out;
}

std::string to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::ex1: return "ex1";
    case ExperimentId::ex2: return "ex2";
    case ExperimentId::ex3: return "ex3";
    case ExperimentId::ex4: return "ex4";
    case ExperimentId::custom: return "custom";
  }
  return "?";
}

void ExperimentSpec::validate() const {
  if (n_sims < 1) throw std::invalid_argument("spec: n_sims must be at least 1");
  if (n_list.empty()) throw std::invalid_argument("spec: n_list must be nonempty");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1) throw std::invalid_argument("spec: sample sizes must be positive");
    if (i > 0 && n_list[i] <= n_list[i - 1])
      throw std::invalid_argument("spec: n_list must be strictly ascending");
  }
  if (m < 1 || N < 2) throw std::invalid_argument("spec: invalid grid size");
  if (!(step_scale > 0.0)) throw std::invalid_argument("spec: step_scale must be positive");
  if (!(beta0 > 0.0) || !(tau0 > 1.0))
    throw std::invalid_argument("spec: need beta0 > 0 and tau0 > 1");
  if (!(q > 0.0) || q > 1.0) throw std::invalid_argument("spec: q must lie in (0, 1]");
  if (!(c_scale > 0.0)) throw std::invalid_argument("spec: c_scale must be positive");
  if (max_iters < 1) throw std::invalid_argument("spec: max_iters must be positive");
  if (rule != "discrepancy" && rule != "apriori")
    throw std::invalid_argument("spec: unknown stopping rule '" + rule + "'");
  if (kernel != "ex1" && kernel != "gauss" && kernel != "fracdiff")
    throw std::invalid_argument("spec: unknown kernel '" + kernel + "'");
  if (solution != "bump" && solution != "density" && solution != "pwconst" &&
      solution != "sparse")
    throw std::invalid_argument("spec: unknown solution '" + solution + "'");
  if (penalty != "quadratic" && penalty != "nonneg" && penalty != "entropy" &&
      penalty != "elastic_net" && penalty != "tv")
    throw std::invalid_argument("spec: unknown penalty '" + penalty + "'");
  if ((penalty == "elastic_net" || penalty == "tv") && !(beta > 0.0))
    throw std::invalid_argument("spec: penalty '" + penalty + "' needs beta > 0");
  if ((kernel == "fracdiff") != (solution == "sparse"))
    throw std::invalid_argument("spec: the fracdiff kernel pairs with the sparse solution");
  if (!(noise.sigma > 0.0) && !(noise.sigma_rel > 0.0))
    throw std::invalid_argument("spec: set noise.sigma or noise.sigma_rel");
  if (kernel == "fracdiff" && penalty == "tv")
    throw std::invalid_argument("spec: the tv penalty is defined on the 1-D grid only");
}

ExperimentSpec builtin_spec(ExperimentId id) {
  ExperimentSpec s;
  s.id = id;
  switch (id) {
    case ExperimentId::ex1:
      s.kernel = "ex1";
      s.solution = "bump";
      s.penalty = "nonneg";
      s.noise.sigma = 0.2;
      s.beta0 = 10.0;
      s.with_landweber = true;
      s.n_list = {10, 100, 1000, 10000, 100000};
      break;
    case ExperimentId::ex2:
      s.kernel = "gauss";
      s.solution = "density";
      s.penalty = "entropy";
      s.noise.sigma = 0.4;
      s.beta0 = 10.0;
      s.error_mode = ErrorMode::L1;
      s.n_list = {10, 100, 1000, 10000, 100000};
      break;
    case ExperimentId::ex3:
      s.kernel = "fracdiff";
      s.solution = "sparse";
      s.penalty = "elastic_net";
      s.beta = 300.0;
      s.noise.sigma_rel = 0.2;
      s.beta0 = 50.0;
      s.n_list = {10, 100, 1000, 10000};
      break;
    case ExperimentId::ex4:
      s.kernel = "ex1";
      s.solution = "pwconst";
      s.penalty = "tv";
      s.beta = 100.0;
      s.noise.sigma = 0.2;
      s.beta0 = 200.0;
      s.n_list = {10, 100, 1000, 10000, 100000};
      break;
    case ExperimentId::custom:
      break;
  }
  return s;
}

namespace {

Eigen::VectorXd bump_solution(const Grid1D& g) {
  Eigen::VectorXd x(g.nodes());
  for (int i = 0; i < g.nodes(); ++i) {
    const double s = g.node(i);
    x[i] = (s >= 0.2 && s <= 0.7) ? 20.0 * s * (s - 0.2) * (0.7 - s) : 0.0;
  }
  return x;
}

Eigen::VectorXd density_solution(const Grid1D& g) {
  Eigen::VectorXd x(g.nodes());
  for (int i = 0; i < g.nodes(); ++i) {
    const double s = g.node(i);
    x[i] = std::exp(-(s - 0.3) * (s - 0.3) / 0.01) +
           3.0 * std::exp(-(s - 0.7) * (s - 0.7) / 0.005);
  }
  const Space sp = trapezoid_space(g);
  x /= sp.weights.dot(x);  // unit trapezoid integral
  return x;
}

Eigen::VectorXd pwconst_solution(const Grid1D& g) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(g.nodes());
  for (int i = 0; i < g.nodes(); ++i) {
    const double s = g.node(i);
    if (s >= 0.1 && s < 0.35) x[i] = 1.0;
    else if (s >= 0.5 && s < 0.8) x[i] = 0.5;
  }
  return x;
}

// A few compact cone bumps; ~95% of the entries are exactly zero.
Field2D sparse_solution(int N) {
  struct Bump { double cx, cy, amp, rad; };
  const Bump bumps[] = {{0.3, 0.35, 80.0, 0.09}, {0.7, 0.6, 64.0, 0.07},
                        {0.45, 0.75, 72.0, 0.06}};
  Field2D f = Field2D::Zero(N - 1, N - 1);
  const double h = 1.0 / N;
  for (int i = 1; i < N; ++i)
    for (int j = 1; j < N; ++j) {
      const double x = i * h, y = j * h;
      double v = 0.0;
      for (const auto& b : bumps) {
        const double d = std::hypot(x - b.cx, y - b.cy);
        if (d < b.rad) v += b.amp * (1.0 - d / b.rad);
      }
      f(i - 1, j - 1) = v;
    }
  return f;
}

Eigen::MatrixXd kernel_matrix(const std::function<double(double, double)>& kernel,
                              const Grid1D& g) {
  Eigen::MatrixXd k(g.nodes(), g.nodes());
  for (int i = 0; i < g.nodes(); ++i)
    for (int j = 0; j < g.nodes(); ++j) k(i, j) = kernel(g.node(i), g.node(j));
  return k;
}

double gauss_kernel(double s, double t) {
  return 3.0 * std::exp(-(s - t) * (s - t) / 0.04);
}

}  // namespace

Problem assemble_problem(const ExperimentSpec& spec) {
  spec.validate();
  Problem p;
  p.error_mode = spec.error_mode;

  LinearMap data_op;
  if (spec.kernel == "fracdiff") {
    FracDiffSpec fd{spec.N, spec.alpha, spec.T};
    data_op = build_fracdiff_operator(fd);
    if (spec.euclidean) {
      // Same action, unit weights; the operator is symmetric either way.
      data_op = LinearMap(Space::euclidean(data_op.domain().dim()),
                          Space::euclidean(data_op.range().dim()),
                          [op = data_op](const Eigen::VectorXd& v) { return op.apply(v); },
                          [op = data_op](const Eigen::VectorXd& v) { return op.apply(v); });
    }
    p.x_exact = flatten(sparse_solution(spec.N));
    p.field_N = spec.N;
    p.alpha = spec.alpha;
    p.T = spec.T;
  } else {
    const Grid1D grid(spec.m);
    const auto kernel = spec.kernel == "ex1"
                            ? std::function<double(double, double)>(&kernel_ex1)
                            : std::function<double(double, double)>(&gauss_kernel);
    if (spec.euclidean) {
      const Space sp = trapezoid_space(grid);
      Eigen::MatrixXd fwd = kernel_matrix(kernel, grid) * sp.weights.asDiagonal();
      Eigen::MatrixXd adj = fwd.transpose();
      data_op = dense_map(Space::euclidean(grid.nodes()), Space::euclidean(grid.nodes()),
                          std::move(fwd), std::move(adj));
    } else {
      data_op = integral_operator(kernel, grid);
    }
    if (spec.solution == "bump") p.x_exact = bump_solution(grid);
    else if (spec.solution == "density") p.x_exact = density_solution(grid);
    else p.x_exact = pwconst_solution(grid);
    p.grid_coords = grid.node_vector();
  }

  p.solution_space = data_op.domain();
  p.data_space = data_op.range();
  p.y_exact = data_op.apply(p.x_exact);
  p.op_norm = estimate_norm(data_op);

  const double scale = spec.strict_theory ? std::min(spec.step_scale, 0.45)
                                          : spec.step_scale;
  const double nsq = p.op_norm * p.op_norm;

  if (spec.penalty == "tv") {
    const Grid1D grid(spec.m);
    LinearMap grad;
    if (spec.euclidean) {
      const int m = grid.m;
      grad = LinearMap(
          Space::euclidean(m + 1), Space::euclidean(m),
          [m](const Eigen::VectorXd& x) -> Eigen::VectorXd {
            return x.tail(m) - x.head(m);
          },
          [m](const Eigen::VectorXd& mu) -> Eigen::VectorXd {
            Eigen::VectorXd out = Eigen::VectorXd::Zero(m + 1);
            out.head(m) -= mu;
            out.tail(m) += mu;
            return out;
          });
    } else {
      grad = discrete_gradient(grid);
    }
    ProductMap stacked = stack_constraint(data_op, grad);
    p.op = std::move(stacked.map);
    p.x_dim = stacked.x_dim;
    p.penalty = tv_penalty(spec.beta, p.x_dim);
    p.gamma = scale * 2.0 / (spec.beta * (nsq + 4.0));
  } else {
    p.op = std::move(data_op);
    p.x_dim = p.op.domain().dim();
    if (spec.penalty == "quadratic") {
      p.penalty = quadratic_penalty();
      p.gamma = scale * 2.0 / nsq;
    } else if (spec.penalty == "nonneg") {
      p.penalty = nonneg_penalty();
      p.gamma = scale * 2.0 / nsq;
    } else if (spec.penalty == "entropy") {
      p.penalty = entropy_penalty(p.solution_space);
      p.gamma = scale * 2.0 / nsq;
    } else {  // elastic_net
      p.penalty = elastic_net_penalty(spec.beta);
      p.gamma = scale * 2.0 / (spec.beta * nsq);
    }
  }
  return p;
}

Eigen::VectorXd exact_solution(const ExperimentSpec& spec) {
  return assemble_problem(spec).x_exact;
}

Eigen::VectorXd exact_data(const ExperimentSpec& spec) {
  return assemble_problem(spec).y_exact;
}

namespace {

std::string method_name(const std::string& penalty) {
  if (penalty == "nonneg") return "dgm-NN";
  if (penalty == "entropy") return "dgm-entropy";
  if (penalty == "elastic_net") return "dgm-L1";
  if (penalty == "tv") return "dgm-TV";
  return "Landweber";
}

struct SimRecord {
  SimOutcome primary;
  SimOutcome comparator;
  Eigen::VectorXd x_primary;
  Eigen::VectorXd x_comparator;
};

}  // namespace

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  const Problem prob = assemble_problem(spec);
  const std::string primary = method_name(spec.penalty);
  const bool paired = spec.with_landweber && spec.penalty != "quadratic";
  const DualPenalty landweber = quadratic_penalty();

  ExperimentReport rep;
  rep.spec = spec;
  rep.methods = {primary};
  if (paired) rep.methods.push_back("Landweber");
  rep.x_exact = prob.x_exact;
  rep.y_exact = prob.y_exact;
  rep.grid_coords = prob.grid_coords;
  rep.field_N = prob.field_N;
  rep.alpha = prob.alpha;
  rep.T = prob.T;

  SolverConfig cfg;
  cfg.gamma = prob.gamma;
  cfg.max_iters = spec.max_iters;
  cfg.op_norm = prob.op_norm;

  const double sigma = spec.noise.resolve(prob.y_exact);
  int jobs = spec.jobs > 0 ? spec.jobs
                           : static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;
  jobs = std::min<int>(jobs, spec.n_sims);

  for (long n : spec.n_list) {
    StoppingRule rule;
    if (spec.rule == "apriori") {
      const long ts = spec.t_star >= 0
                          ? spec.t_star
                          : apriori_index(n, sigma, spec.q, spec.c_scale);
      rule = APriori{ts};
    } else {
      rule = Discrepancy{spec.beta0, spec.tau0};
    }

    std::vector<SimRecord> records(static_cast<std::size_t>(spec.n_sims));
    std::atomic<int> next{0};

    // Solver failures are recorded per simulation, never fatal to the batch.
    auto run_one = [&](const MeasurementEnsemble& ens, const DualPenalty& pen,
                       const std::string& name, long n_, int sim,
                       Eigen::VectorXd& x_out) -> SimOutcome {
      SimOutcome o;
      o.n = n_;
      o.sim = sim;
      o.method = name;
      try {
        SolverRun r = run(prob.op, pen, ens, rule, cfg);
        x_out = r.x.head(prob.x_dim);
        o.iterations = r.iterations;
        o.cause = r.cause;
        o.error = relative_error(prob.solution_space, x_out, prob.x_exact,
                                 prob.error_mode);
      } catch (const std::exception& e) {
        o.failed = true;
        o.message = e.what();
      }
      return o;
    };

    auto worker = [&] {
      for (;;) {
        const int sim = next.fetch_add(1);
        if (sim >= spec.n_sims) break;
        SimRecord& rec = records[static_cast<std::size_t>(sim)];
        const std::uint64_t s = stream_seed(spec.seed, static_cast<std::uint64_t>(n),
                                            static_cast<std::uint64_t>(sim));
        const MeasurementEnsemble ens =
            generate_ensemble(prob.data_space, prob.y_exact, spec.noise, n, s);
        rec.primary = run_one(ens, prob.penalty, primary, n, sim, rec.x_primary);
        if (paired)
          rec.comparator = run_one(ens, landweber, "Landweber", n, sim, rec.x_comparator);
      }
    };

    std::vector<std::thread> pool;
    for (int k = 0; k < jobs; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    // Deterministic reduction in (method, sim) order.
    for (std::size_t mi = 0; mi < rep.methods.size(); ++mi) {
      MethodAggregate agg;
      agg.n = n;
      agg.method = rep.methods[mi];
      agg.sims = spec.n_sims;
      Eigen::VectorXd mean_x = Eigen::VectorXd::Zero(prob.x_dim);
      std::vector<double> errors;
      errors.reserve(records.size());
      double iter_sum = 0;
      int ok_count = 0;
      for (const SimRecord& rec : records) {
        const SimOutcome& o = mi == 0 ? rec.primary : rec.comparator;
        agg.outcomes.push_back(o);
        if (o.failed) {
          ++agg.failures;
          continue;
        }
        ++ok_count;
        errors.push_back(o.error);
        iter_sum += static_cast<double>(o.iterations);
        agg.emergency += o.cause == StopCause::emergency ? 1 : 0;
        mean_x += mi == 0 ? rec.x_primary : rec.x_comparator;
      }
      if (ok_count > 0) {
        agg.mean_iterations = iter_sum / ok_count;
        agg.stats = aggregate(errors);
        agg.rms_error = agg.stats.rms;
        rep.mean_reconstruction[n][rep.methods[mi]] = mean_x / ok_count;
      } else {
        agg.rms_error = std::numeric_limits<double>::quiet_NaN();
        rep.mean_reconstruction[n][rep.methods[mi]] = mean_x;
      }
      rep.total_failures += agg.failures;
      rep.aggregates.push_back(std::move(agg));
    }

    // One noisy sample for plotting: first sample of the sim-0 stream.
    const MeasurementEnsemble one = generate_ensemble(
        prob.data_space, prob.y_exact, spec.noise, 1,
        stream_seed(spec.seed, static_cast<std::uint64_t>(n), 0));
    rep.sample_datum[n] = one.mean();
  }

  rep.step_warning =
      prob.gamma >= 4.0 * prob.penalty.c0 / (prob.op_norm * prob.op_norm);
  return rep;
}

namespace {

void write_box_row(std::ostream& os, const MethodAggregate& a) {
  const Quartiles& q = a.stats.quartiles;
  os << a.method << "," << fmt("%.6e", q.min) << "," << fmt("%.6e", q.q1) << ","
     << fmt("%.6e", q.median) << "," << fmt("%.6e", q.q3) << "," << fmt("%.6e", q.max)
     << "," << fmt("%.6e", q.whisker_low) << "," << fmt("%.6e", q.whisker_high) << ","
     << q.outliers.size() << ",";
  for (std::size_t i = 0; i < q.outliers.size(); ++i)
    os << (i ? " " : "") << fmt("%.6e", q.outliers[i]);
  os << "\n";
}

}  // namespace

std::vector<std::string> write_report(const ExperimentReport& rep, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> files;

  auto open = [&files, &dir](const std::string& name) {
    const std::string path = dir + "/" + name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path);
    files.push_back(path);
    return os;
  };

  {
    auto os = open("report.csv");
    os << "n,method,sims,mean_iterations,rms_error,emergency_stops,failures,"
          "err_min,err_q1,err_median,err_q3,err_max\n";
    for (const auto& a : rep.aggregates) {
      const Quartiles& q = a.stats.quartiles;
      os << a.n << "," << a.method << "," << a.sims << ","
         << fmt("%.1f", a.mean_iterations) << "," << fmt("%.4e", a.rms_error) << ","
         << a.emergency << "," << a.failures << "," << fmt("%.4e", q.min) << ","
         << fmt("%.4e", q.q1) << "," << fmt("%.4e", q.median) << ","
         << fmt("%.4e", q.q3) << "," << fmt("%.4e", q.max) << "\n";
    }
  }

  for (long n : rep.spec.n_list) {
    {
      auto os = open("errors_" + std::to_string(n) + ".csv");
      os << "sim,method,iterations,rel_error,stop_cause\n";
      for (const auto& a : rep.aggregates) {
        if (a.n != n) continue;
        for (const auto& o : a.outcomes) {
          os << o.sim << "," << o.method << ",";
          if (o.failed)
            os << "0,nan,failed\n";
          else
            os << o.iterations << "," << fmt("%.6e", o.error) << ","
               << to_string(o.cause) << "\n";
        }
      }
    }
    {
      auto os = open("boxplot_" + std::to_string(n) + ".csv");
      os << "method,min,q1,median,q3,max,whisker_low,whisker_high,outlier_count,"
            "outliers\n";
      for (const auto& a : rep.aggregates)
        if (a.n == n) write_box_row(os, a);
    }
    if (rep.field_N > 0) {
      // 2-D problems: fields in the row-major comment-header format.
      const FracDiffSpec fd{rep.field_N, rep.alpha, rep.T};
      auto os = open("solution_" + std::to_string(n) + ".csv");
      write_field_csv(os, unflatten(rep.mean_reconstruction.at(n).at(rep.methods[0]),
                                    rep.field_N),
                      fd);
      auto os2 = open("sample_" + std::to_string(n) + ".csv");
      write_field_csv(os2, unflatten(rep.sample_datum.at(n), rep.field_N), fd);
    } else {
      auto os = open("solution_" + std::to_string(n) + ".csv");
      os << "s,x_exact";
      for (const auto& m : rep.methods) os << ",mean_" << m;
      os << ",y_exact,y_sample\n";
      const auto& recon = rep.mean_reconstruction.at(n);
      const auto& sample = rep.sample_datum.at(n);
      for (Eigen::Index i = 0; i < rep.grid_coords.size(); ++i) {
        os << fmt("%.8e", rep.grid_coords[i]) << "," << fmt("%.8e", rep.x_exact[i]);
        for (const auto& m : rep.methods) os << "," << fmt("%.8e", recon.at(m)[i]);
        os << "," << fmt("%.8e", rep.y_exact[i]) << "," << fmt("%.8e", sample[i]) << "\n";
      }
    }
  }

  if (rep.field_N > 0) {
    const FracDiffSpec fd{rep.field_N, rep.alpha, rep.T};
    auto os = open("solution_exact.csv");
    write_field_csv(os, unflatten(rep.x_exact, rep.field_N), fd);
    auto os2 = open("data_exact.csv");
    write_field_csv(os2, unflatten(rep.y_exact, rep.field_N), fd);
  }
  return files;
}

std::string format_summary(const ExperimentReport& rep) {
  std::ostringstream os;
  os << "experiment " << to_string(rep.spec.id) << "  (penalty " << rep.spec.penalty
     << ", sims " << rep.spec.n_sims << ", seed " << rep.spec.seed << ")\n";
  if (rep.step_warning)
    os << "note: step size is at or beyond the 4*c0/||A||^2 regime boundary\n";
  if (rep.total_failures > 0)
    os << "warning: " << rep.total_failures << " simulation(s) failed\n";
  char line[160];
  std::snprintf(line, sizeof(line), "%10s %-12s %14s %14s %10s\n", "n", "method",
                "iterations", "rel_error", "emergency");
  os << line;
  for (const auto& a : rep.aggregates) {
    std::snprintf(line, sizeof(line), "%10ld %-12s %14.1f %14s %10d\n", a.n,
                  a.method.c_str(), a.mean_iterations,
                  fmt("%.4e", a.rms_error).c_str(), a.emergency);
    os << line;
  }
  return os.str();
}

}  // namespace dualgrad

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dualgrad/config.hpp"
#include "dualgrad/experiments.hpp"
#include "dualgrad/selftest.hpp"

namespace {

using namespace dualgrad;

struct CommonOptions {
  std::string experiment;
  std::string config_path;
  std::string n_override;
  long sims = -1;
  long seed = -1;
  int jobs = 0;
  std::string out;
  bool strict = false;
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool with_sims) {
  cmd->add_option("experiment", opt.experiment, "builtin experiment id (ex1..ex4)");
  cmd->add_option("-c,--config", opt.config_path, "configuration file (key = value lines)");
  cmd->add_option("--n", opt.n_override, "comma-separated sample sizes, e.g. 10,100,1000");
  if (with_sims) cmd->add_option("--sims", opt.sims, "simulations per sample size");
  cmd->add_option("--seed", opt.seed, "master seed (fallback: DUALGRAD_SEED, then 1)");
  cmd->add_option("--jobs", opt.jobs, "worker threads (default: hardware)");
  cmd->add_option("--out", opt.out, "output directory");
  cmd->add_flag("--strict-theory", opt.strict, "clamp the step scale to the rate-theory regime");
}

ExperimentSpec spec_from_options(const CommonOptions& opt) {
  ExperimentSpec spec;
  bool have_base = false;
  if (!opt.config_path.empty()) {
    spec = load_config_file(opt.config_path);
    have_base = true;
  }
  if (!opt.experiment.empty()) {
    if (have_base) throw ConfigError("give either an experiment id or --config, not both");
    std::istringstream one("experiment = " + opt.experiment + "\n");
    spec = parse_config(one);
    have_base = true;
  }
  if (!have_base) throw ConfigError("an experiment id or --config is required");

  if (!opt.n_override.empty()) spec.n_list = parse_n_list(opt.n_override);
  if (opt.sims >= 0) spec.n_sims = static_cast<int>(opt.sims);
  if (opt.seed >= 0) {
    spec.seed = static_cast<std::uint64_t>(opt.seed);
  } else if (const char* env = std::getenv("DUALGRAD_SEED")) {
    spec.seed = static_cast<std::uint64_t>(std::strtoull(env, nullptr, 10));
  }
  if (opt.jobs > 0) spec.jobs = opt.jobs;
  if (!opt.out.empty()) spec.out_dir = opt.out;
  if (opt.strict) spec.strict_theory = true;
  spec.validate();
  return spec;
}

int cmd_experiment(const CommonOptions& opt) {
  const ExperimentSpec spec = spec_from_options(opt);
  const ExperimentReport report = run_experiment(spec);
  const auto files = write_report(report, spec.out_dir);
  std::cout << format_summary(report);
  std::cout << files.size() << " files written to " << spec.out_dir << "\n";
  return report.total_failures > 0 ? 1 : 0;
}

int cmd_solve(const CommonOptions& opt) {
  ExperimentSpec spec = spec_from_options(opt);
  const long n = spec.n_list.front();
  const Problem prob = assemble_problem(spec);

  const MeasurementEnsemble ens =
      generate_ensemble(prob.data_space, prob.y_exact, spec.noise, n,
                        stream_seed(spec.seed, static_cast<std::uint64_t>(n), 0));
  StoppingRule rule;
  if (spec.rule == "apriori") {
    const long ts = spec.t_star >= 0
                        ? spec.t_star
                        : apriori_index(n, spec.noise.resolve(prob.y_exact), spec.q,
                                        spec.c_scale);
    rule = APriori{ts};
  } else {
    rule = Discrepancy{spec.beta0, spec.tau0};
  }
  SolverConfig cfg;
  cfg.gamma = prob.gamma;
  cfg.max_iters = spec.max_iters;
  cfg.op_norm = prob.op_norm;
  cfg.record_residuals = true;

  const SolverRun run_out = run(prob.op, prob.penalty, ens, rule, cfg);
  if (run_out.step_warning)
    std::cout << "note: step size is at or beyond the 4*c0/||A||^2 regime boundary\n";

  namespace fs = std::filesystem;
  fs::create_directories(spec.out_dir);
  {
    std::ofstream os(spec.out_dir + "/residuals.csv", std::ios::binary);
    os << "t,residual,threshold\n";
    char buf[96];
    for (std::size_t t = 0; t < run_out.residuals.size(); ++t) {
      std::snprintf(buf, sizeof(buf), "%zu,%.8e,%.8e\n", t, run_out.residuals[t],
                    run_out.threshold);
      os << buf;
    }
  }
  {
    std::ofstream os(spec.out_dir + "/solve_solution.csv", std::ios::binary);
    const Eigen::VectorXd x = run_out.x.head(prob.x_dim);
    if (prob.field_N > 0) {
      write_field_csv(os, unflatten(x, prob.field_N),
                      FracDiffSpec{prob.field_N, prob.alpha, prob.T});
    } else {
      os << "s,x,x_exact\n";
      char buf[96];
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.8e,%.8e,%.8e\n", prob.grid_coords[i], x[i],
                      prob.x_exact[i]);
        os << buf;
      }
    }
  }
  const double err = relative_error(prob.solution_space, run_out.x.head(prob.x_dim),
                                    prob.x_exact, prob.error_mode);
  char line[160];
  std::snprintf(line, sizeof(line),
                "n=%ld stop=%s iterations=%ld residual=%.4e threshold=%.4e rel_error=%.4e\n",
                n, to_string(run_out.cause), run_out.iterations, run_out.residual,
                run_out.threshold, err);
  std::cout << line;
  std::cout << "residuals.csv and solve_solution.csv written to " << spec.out_dir << "\n";
  return 0;
}

int cmd_list() {
  std::cout << "builtin experiments:\n";
  for (ExperimentId id :
       {ExperimentId::ex1, ExperimentId::ex2, ExperimentId::ex3, ExperimentId::ex4}) {
    const ExperimentSpec s = builtin_spec(id);
    char line[256];
    if (s.kernel == "fracdiff") {
      std::snprintf(line, sizeof(line),
                    "  %s  kernel=%s N=%d alpha=%g T=%g penalty=%s beta=%g "
                    "noise.sigma_rel=%g beta0=%g\n",
                    to_string(id).c_str(), s.kernel.c_str(), s.N, s.alpha, s.T,
                    s.penalty.c_str(), s.beta, s.noise.sigma_rel, s.beta0);
    } else {
      std::snprintf(line, sizeof(line),
                    "  %s  kernel=%s m=%d penalty=%s%s noise.sigma=%g beta0=%g%s\n",
                    to_string(id).c_str(), s.kernel.c_str(), s.m, s.penalty.c_str(),
                    s.beta > 0 ? ("(" + std::to_string((int)s.beta) + ")").c_str() : "",
                    s.noise.sigma, s.beta0, s.with_landweber ? " +landweber" : "");
    }
    std::cout << line;
  }
  std::cout << "defaults: sims=200, seed=1, step_scale=0.9, error=L2 (ex2: L1)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dual gradient solver for ill-posed problems with repeated measurements"};
  app.require_subcommand(1);

  CommonOptions exp_opt, solve_opt;
  std::string filter;
  bool inject_fault = false;

  CLI::App* exp = app.add_subcommand("experiment", "run a Monte-Carlo experiment and write CSV reports");
  add_common(exp, exp_opt, true);

  CLI::App* solve = app.add_subcommand("solve", "run one ensemble + one solve, dump residual history");
  add_common(solve, solve_opt, false);

  CLI::App* selftest = app.add_subcommand("selftest", "run the built-in oracle checks");
  selftest->add_option("--filter", filter, "run only checks whose name contains this substring");
  selftest->add_flag("--inject-fault", inject_fault, "deliberately fail one check (test hook)")
      ->group("");  // hidden

  CLI::App* list = app.add_subcommand("list", "list builtin experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors are exit 2
  }

  try {
    if (exp->parsed()) return cmd_experiment(exp_opt);
    if (solve->parsed()) return cmd_solve(solve_opt);
    if (selftest->parsed()) return run_selftest(std::cout, filter, inject_fault) ? 0 : 1;
    if (list->parsed()) return cmd_list();
  } catch (const dualgrad::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

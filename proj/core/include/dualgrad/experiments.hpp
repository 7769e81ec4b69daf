#pragma once

#include <map>
#include <string>
#include <vector>

#include "dualgrad/fracdiff.hpp"
#include "dualgrad/solver.hpp"

namespace dualgrad {

enum class ErrorMode { L2, L1 };

/// ||x_rec - x_ref|| / ||x_ref|| in the weighted L2 or L1 norm.
double relative_error(const Space& space, const Eigen::VectorXd& x_rec,
                      const Eigen::VectorXd& x_ref, ErrorMode mode);

/// Five-number summary with linear-interpolation quantiles; whiskers extend
/// to the most extreme points within 1.5 IQR of the quartiles, points beyond
/// are outliers.
struct Quartiles {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
  double whisker_low = 0, whisker_high = 0;
  std::vector<double> outliers;
};

struct AggregateStats {
  double rms = 0;  // sqrt(mean of squares)
  Quartiles quartiles;
};

AggregateStats aggregate(const std::vector<double>& values);

enum class ExperimentId { ex1, ex2, ex3, ex4, custom };

std::string to_string(ExperimentId id);

/// Declarative description of one Monte-Carlo experiment; builtin_spec()
/// returns the four canonical setups fully parameterized.
struct ExperimentSpec {
  ExperimentId id = ExperimentId::custom;
  std::string kernel = "ex1";      // ex1 | gauss | fracdiff
  std::string solution = "bump";   // bump | density | pwconst | sparse
  int m = 400;                     // 1-D subinterval count
  int N = 64;                      // 2-D grid parameter (fracdiff)
  double alpha = 0.5;              // fractional order (fracdiff)
  double T = 0.1;                  // observation time (fracdiff)
  std::string penalty = "nonneg";  // quadratic | nonneg | entropy | elastic_net | tv
  double beta = 0.0;               // penalty parameter for elastic_net / tv
  NoiseModel noise;
  std::string rule = "discrepancy";  // discrepancy | apriori
  double beta0 = 10.0;
  double tau0 = 1.1;
  double q = 1.0;      // source-condition exponent for the a priori index
  double c_scale = 1.0;
  long t_star = -1;    // fixed a priori index; -1 derives it from (n, sigma, q)
  std::vector<long> n_list{10, 100, 1000};
  int n_sims = 200;
  std::uint64_t seed = 1;
  double step_scale = 0.9;    // fraction of the nominal step size
  bool strict_theory = false;  // clamps step_scale to 0.45
  bool euclidean = false;      // plain-Euclidean inner products instead of weighted
  long max_iters = 1'000'000;
  int jobs = 0;  // simulation worker threads; 0 = hardware concurrency
  ErrorMode error_mode = ErrorMode::L2;
  bool with_landweber = false;  // paired plain-Landweber comparator
  std::string out_dir = "out";

  void validate() const;
};

ExperimentSpec builtin_spec(ExperimentId id);

/// Fully assembled problem instance: operator, penalty, exact pair, step size.
struct Problem {
  LinearMap op;             // solver operator (stacked for the tv penalty)
  DualPenalty penalty;
  Space solution_space;     // space of the solution block
  Eigen::VectorXd x_exact;  // exact solution on the solution block
  Space data_space;         // space of the measured data block
  Eigen::VectorXd y_exact;  // exact data A x_exact
  double gamma = 0;
  double op_norm = 0;       // estimated norm of the data operator
  Eigen::Index x_dim = 0;   // leading solution block within the solver iterate
  ErrorMode error_mode = ErrorMode::L2;
  Eigen::VectorXd grid_coords;  // 1-D node coordinates (empty for fields)
  int field_N = 0;              // 2-D side parameter, 0 for 1-D problems
  double alpha = 0, T = 0;
};

Problem assemble_problem(const ExperimentSpec& spec);

Eigen::VectorXd exact_solution(const ExperimentSpec& spec);
Eigen::VectorXd exact_data(const ExperimentSpec& spec);

struct SimOutcome {
  long n = 0;
  int sim = 0;
  std::string method;
  long iterations = 0;
  double error = 0;
  StopCause cause = StopCause::discrepancy;
  bool failed = false;    // solver failure; recorded, not fatal to the batch
  std::string message;
};

struct MethodAggregate {
  long n = 0;
  std::string method;
  int sims = 0;
  double mean_iterations = 0;  // over successful simulations
  double rms_error = 0;        // over successful simulations
  int emergency = 0;
  int failures = 0;
  AggregateStats stats;
  std::vector<SimOutcome> outcomes;  // ordered by simulation index
};

struct ExperimentReport {
  ExperimentSpec spec;
  std::vector<std::string> methods;           // primary first
  std::vector<MethodAggregate> aggregates;    // ordered by (n, method)
  std::map<long, std::map<std::string, Eigen::VectorXd>> mean_reconstruction;
  std::map<long, Eigen::VectorXd> sample_datum;  // one noisy sample per n
  Eigen::VectorXd x_exact;
  Eigen::VectorXd y_exact;
  Eigen::VectorXd grid_coords;
  int field_N = 0;
  double alpha = 0, T = 0;
  bool step_warning = false;
  int total_failures = 0;
};

/// Runs n_sims seeded simulations per entry of n_list (worker pool across
/// simulations; the assembly is a deterministic reduction in simulation
/// order, so the report does not depend on the thread count).
ExperimentReport run_experiment(const ExperimentSpec& spec);

/// Writes report.csv, errors_<n>.csv, boxplot_<n>.csv and solution files
/// under dir. Returns the list of files written.
std::vector<std::string> write_report(const ExperimentReport& report, const std::string& dir);

/// Per-n summary table (iterations, error, emergency counts) to a string.
std::string format_summary(const ExperimentReport& report);

}  // namespace dualgrad

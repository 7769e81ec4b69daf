#pragma once

#include <variant>
#include <vector>

#include <Eigen/Core>

#include "dualgrad/linear_map.hpp"
#include "dualgrad/penalties.hpp"
#include "dualgrad/sampling.hpp"

namespace dualgrad {

/// Stop after exactly t_star dual updates, returning x_{t_star}.
struct APriori {
  long t_star = 0;
};

/// Statistical discrepancy principle: stop at the first t <= ceil(beta0 n)
/// with ||A x_t - ybar|| <= tau_n(n, tau0) * s_n / sqrt(n); if no such t
/// exists, stop at ceil(beta0 n) ("emergency"). Requires n >= 2.
struct Discrepancy {
  double beta0 = 10.0;
  double tau0 = 1.1;
};

using StoppingRule = std::variant<APriori, Discrepancy>;

struct SolverConfig {
  double gamma = 0.0;           // step size, > 0
  long max_iters = 1'000'000;   // absolute safety cap on dual updates
  bool record_residuals = false;
  double op_norm = 0.0;  // optional ||A|| estimate; enables the step-size regime warning
};

enum class StopCause { a_priori, discrepancy, emergency, max_iters };

const char* to_string(StopCause c);

struct SolverRun {
  Eigen::VectorXd x;       // primal iterate at the stopping index
  Eigen::VectorXd lambda;  // dual iterate at the stopping index
  long iterations = 0;     // number of dual updates performed (the stopping index)
  StopCause cause = StopCause::a_priori;
  double residual = 0.0;        // rule residual at the stopping index
  double threshold = 0.0;       // discrepancy threshold (0 under a priori)
  bool step_warning = false;    // gamma >= 4 c0 / ||A||^2 (only when op_norm given)
  std::vector<double> residuals;  // per-step rule residuals when recorded
};

/// tau_n = max(tau0, log|log|log n||) with natural logarithms. n >= 2, tau0 > 1.
double tau_n(double n, double tau0);

/// A priori stopping index round(c_scale * (n / sigma^2)^((2-q)/2)), at least 1.
long apriori_index(long n, double sigma, double q, double c_scale);

struct StepResult {
  Eigen::VectorXd x;
  Eigen::VectorXd lambda_next;
  double residual = 0.0;  // ||A x - ybar|| in the weighted range norm
};

/// One dual gradient step from lambda: x = nabla R*(A* lambda),
/// lambda_next = lambda - gamma (A x - ybar). Throws on non-finite state.
StepResult dual_step(const Eigen::VectorXd& lambda, const LinearMap& op,
                     const DualPenalty& penalty, const Eigen::VectorXd& ybar,
                     double gamma);

/// Runs the dual gradient method from lambda_0 = 0 on the averaged data of the
/// ensemble until the stopping rule fires. If the ensemble lives on a leading
/// block of the operator range (the stacked constraint case), the remaining
/// rows are driven to zero data and the rule residual is taken over the
/// ensemble block only.
SolverRun run(const LinearMap& op, const DualPenalty& penalty,
              const MeasurementEnsemble& data, const StoppingRule& rule,
              const SolverConfig& cfg);

}  // namespace dualgrad

#include "dualgrad/solver.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dualgrad {

const char* to_string(StopCause c) {
  switch (c) {
    case StopCause::a_priori: return "a_priori";
    case StopCause::discrepancy: return "discrepancy";
    case StopCause::emergency: return "emergency";
    case StopCause::max_iters: return "max_iters";
  }
  return "?";
}

double tau_n(double n, double tau0) {
  if (n < 2) throw std::domain_error("tau_n: need n >= 2");
  if (!(tau0 > 1.0)) throw std::invalid_argument("tau_n: tau0 must exceed 1");
  const double v =
      std::log(std::abs(std::log(std::abs(std::log(n)))));
  return std::max(tau0, v);
}

long apriori_index(long n, double sigma, double q, double c_scale) {
  if (n < 1 || !(sigma > 0.0) || !(q > 0.0) || q > 1.0 || !(c_scale > 0.0))
    throw std::invalid_argument("apriori_index: invalid parameters");
  const double t = c_scale * std::pow(n / (sigma * sigma), 0.5 * (2.0 - q));
  if (!(t < 9e18))
    throw std::invalid_argument("apriori_index: index overflows (noise level too small)");
  return std::max(1L, std::lround(t));
}

StepResult dual_step(const Eigen::VectorXd& lambda, const LinearMap& op,
                     const DualPenalty& penalty, const Eigen::VectorXd& ybar,
                     double gamma) {
  StepResult out;
  out.x = penalty(op.apply_adjoint(lambda));
  Eigen::VectorXd r = op.apply(out.x) - ybar;
  out.residual = norm(op.range(), r);
  if (!std::isfinite(out.residual))
    throw std::runtime_error("dual_step: non-finite residual");
  out.lambda_next = lambda - gamma * r;
  return out;
}

SolverRun run(const LinearMap& op, const DualPenalty& penalty,
              const MeasurementEnsemble& data, const StoppingRule& rule,
              const SolverConfig& cfg) {
  if (!(cfg.gamma > 0.0)) throw std::invalid_argument("run: step size must be positive");
  const Eigen::Index range_dim = op.range().dim();
  const Eigen::Index rule_dim = data.space().dim();
  if (rule_dim > range_dim)
    throw std::invalid_argument("run: ensemble larger than the operator range");

  Eigen::VectorXd ybar = Eigen::VectorXd::Zero(range_dim);
  ybar.head(rule_dim) = data.mean();
  const auto& wr = op.range().weights;

  SolverRun out;
  out.step_warning =
      cfg.op_norm > 0.0 && cfg.gamma >= 4.0 * penalty.c0 / (cfg.op_norm * cfg.op_norm);

  long stop_at = -1;  // a priori index; -1 under the discrepancy rule
  long cap = cfg.max_iters;
  double threshold = 0.0;
  if (const auto* ap = std::get_if<APriori>(&rule)) {
    if (ap->t_star < 0) throw std::invalid_argument("run: t_star must be nonnegative");
    stop_at = ap->t_star;
    cap = std::min(cap, stop_at);
  } else {
    const auto& d = std::get<Discrepancy>(rule);
    if (data.count() < 2)
      throw std::invalid_argument("run: the discrepancy rule needs n >= 2");
    if (!(d.beta0 > 0.0)) throw std::invalid_argument("run: beta0 must be positive");
    threshold = tau_n(data.count(), d.tau0) * data.sample_std() /
                std::sqrt(static_cast<double>(data.count()));
    cap = std::min(cap, static_cast<long>(std::ceil(d.beta0 * data.count())));
  }
  out.threshold = threshold;

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(range_dim);
  Eigen::VectorXd x, r;
  for (long t = 0;; ++t) {
    x = penalty(op.apply_adjoint(lambda));
    r = op.apply(x) - ybar;
    const double res =
        std::sqrt((wr.head(rule_dim).array() * r.head(rule_dim).array().square()).sum());
    if (!std::isfinite(res))
      throw std::runtime_error("run: non-finite residual at iteration " + std::to_string(t));
    if (cfg.record_residuals) out.residuals.push_back(res);

    StopCause cause;
    bool stop = false;
    if (stop_at >= 0) {  // a priori
      if (t == stop_at) { cause = StopCause::a_priori; stop = true; }
    } else if (res <= threshold) {
      cause = StopCause::discrepancy;
      stop = true;
    }
    if (!stop && t == cap) {
      cause = stop_at >= 0 ? StopCause::max_iters
              : cap == cfg.max_iters ? StopCause::max_iters
                                     : StopCause::emergency;
      stop = true;
    }
    if (stop) {
      out.x = std::move(x);
      out.lambda = std::move(lambda);
      out.iterations = t;
      out.cause = cause;
      out.residual = res;
      return out;
    }
    lambda -= cfg.gamma * r;
  }
}

}  // namespace dualgrad

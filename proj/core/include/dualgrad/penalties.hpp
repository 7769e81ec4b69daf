#pragma once

#include <functional>

#include <Eigen/Core>

#include "dualgrad/grid.hpp"

namespace dualgrad {

/// A strongly convex penalty R, exposed only through the map xi -> nabla R*(xi)
/// taking a dual vector to the minimizer of R(x) - <xi, x>, together with its
/// strong-convexity constant c0. The map is (1/2c0)-Lipschitz. Stateless and
/// safe for concurrent use.
struct DualPenalty {
  double c0 = 0.0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> primal;

  Eigen::VectorXd operator()(const Eigen::VectorXd& xi) const { return primal(xi); }
};

/// R(x) = ||x||^2 / 2: the dual-to-primal map is the identity. c0 = 1/2.
Eigen::VectorXd quadratic_map(const Eigen::VectorXd& xi);

/// R(x) = ||x||^2 / 2 + indicator(x >= 0): componentwise max(xi, 0). c0 = 1/2.
Eigen::VectorXd nonneg_quadratic_map(const Eigen::VectorXd& xi);

/// Negative Boltzmann-Shannon entropy restricted to the probability simplex:
/// x_i = exp(xi_i - max xi) / sum_j w_j exp(xi_j - max xi). Output is strictly
/// positive with weighted sum exactly 1 up to rounding. c0 = 1/2 (L1 norm).
Eigen::VectorXd entropy_simplex_map(const Eigen::VectorXd& xi, const Eigen::VectorXd& weights);

/// R(x) = ||x||_1 + ||x||^2 / (2 beta): soft threshold at 1 scaled by beta,
/// beta * sign(xi) * max(|xi| - 1, 0). c0 = 1/(2 beta). Requires beta > 0.
Eigen::VectorXd elastic_net_map(const Eigen::VectorXd& xi, double beta);

/// Dual-to-primal map of the split total-variation penalty
/// R(x, z) = ||x||^2/(2 beta) + ||z||_1 + ||z||^2/(2 beta):
/// x = beta * xi_x and z = elastic_net_map(xi_z, beta). c0 = 1/(2 beta).
std::pair<Eigen::VectorXd, Eigen::VectorXd> tv_product_map(const Eigen::VectorXd& xi_x,
                                                           const Eigen::VectorXd& xi_z,
                                                           double beta);

DualPenalty quadratic_penalty();
DualPenalty nonneg_penalty();
DualPenalty entropy_penalty(const Space& domain);
DualPenalty elastic_net_penalty(double beta);
/// Operates on the stacked vector (x, z); x_dim is the leading block size.
DualPenalty tv_penalty(double beta, Eigen::Index x_dim);

}  // namespace dualgrad

#include "dualgrad/penalties.hpp"

#include <stdexcept>

namespace dualgrad {

Eigen::VectorXd quadratic_map(const Eigen::VectorXd& xi) { return xi; }

Eigen::VectorXd nonneg_quadratic_map(const Eigen::VectorXd& xi) {
  return xi.cwiseMax(0.0);
}

Eigen::VectorXd entropy_simplex_map(const Eigen::VectorXd& xi,
                                    const Eigen::VectorXd& weights) {
  if (xi.size() != weights.size())
    throw std::invalid_argument("entropy_simplex_map: weight size mismatch");
  const double shift = xi.maxCoeff();  // keeps the exponentials in range
  Eigen::VectorXd e = (xi.array() - shift).exp();
  const double mass = weights.dot(e);
  return e / mass;
}

Eigen::VectorXd elastic_net_map(const Eigen::VectorXd& xi, double beta) {
  if (!(beta > 0.0)) throw std::domain_error("elastic_net_map: beta must be positive");
  return xi.unaryExpr([beta](double v) {
    const double a = std::abs(v) - 1.0;
    return a > 0.0 ? (v > 0.0 ? beta * a : -beta * a) : 0.0;
  });
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> tv_product_map(const Eigen::VectorXd& xi_x,
                                                           const Eigen::VectorXd& xi_z,
                                                           double beta) {
  if (!(beta > 0.0)) throw std::domain_error("tv_product_map: beta must be positive");
  return {beta * xi_x, elastic_net_map(xi_z, beta)};
}

DualPenalty quadratic_penalty() { return {0.5, &quadratic_map}; }

DualPenalty nonneg_penalty() { return {0.5, &nonneg_quadratic_map}; }

DualPenalty entropy_penalty(const Space& domain) {
  Eigen::VectorXd w = domain.weights;
  return {0.5, [w](const Eigen::VectorXd& xi) { return entropy_simplex_map(xi, w); }};
}

DualPenalty elastic_net_penalty(double beta) {
  if (!(beta > 0.0)) throw std::domain_error("elastic_net_penalty: beta must be positive");
  return {1.0 / (2.0 * beta),
          [beta](const Eigen::VectorXd& xi) { return elastic_net_map(xi, beta); }};
}

DualPenalty tv_penalty(double beta, Eigen::Index x_dim) {
  if (!(beta > 0.0)) throw std::domain_error("tv_penalty: beta must be positive");
  // Separable sum; the composite constant is the minimum of the blocks'.
  return {1.0 / (2.0 * beta), [beta, x_dim](const Eigen::VectorXd& xi) {
            Eigen::VectorXd out(xi.size());
            out.head(x_dim) = beta * xi.head(x_dim);
            out.tail(xi.size() - x_dim) = elastic_net_map(xi.tail(xi.size() - x_dim), beta);
            return out;
          }};
}

}  // namespace dualgrad

#pragma once

#include <cstdint>
#include <functional>
#include <utility>

#include <Eigen/Core>

#include "dualgrad/grid.hpp"

namespace dualgrad {

/// A bounded linear operator between two weighted spaces, exposed through its
/// action and the action of its adjoint. Adjoints are taken with respect to
/// the weighted inner products of the domain and range, so that
/// <A x, y>_range = <x, A* y>_domain. Immutable after construction and safe to
/// share across threads; apply/apply_adjoint are pure.
class LinearMap {
 public:
  using Apply = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  LinearMap() = default;
  LinearMap(Space domain, Space range, Apply forward, Apply adjoint)
      : domain_(std::move(domain)),
        range_(std::move(range)),
        forward_(std::move(forward)),
        adjoint_(std::move(adjoint)) {}

  const Space& domain() const { return domain_; }
  const Space& range() const { return range_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return forward_(x); }
  Eigen::VectorXd apply_adjoint(const Eigen::VectorXd& y) const { return adjoint_(y); }

 private:
  Space domain_;
  Space range_;
  Apply forward_;
  Apply adjoint_;
};

/// Stacked operator B(x, z) = (A x, D x - z) for the split formulation of
/// total-variation problems, acting on the concatenated vector (x, z).
/// Its adjoint is B*(lambda, mu) = (A* lambda + D* mu, -mu).
struct ProductMap {
  LinearMap map;            // the stacked operator itself
  Eigen::Index x_dim = 0;   // leading block of the domain (the primal x)
  Eigen::Index z_dim = 0;   // trailing block of the domain (the slack z)
  Eigen::Index data_dim = 0;  // leading block of the range (rows of A)
};

/// Dense operator from an explicit matrix pair (forward, adjoint).
LinearMap dense_map(Space domain, Space range, Eigen::MatrixXd forward,
                    Eigen::MatrixXd adjoint);

/// Discretization of (A x)(s) = \int_0^1 k(s,t) x(t) dt on the grid by the
/// trapezoidal rule: (A x)_i = sum_j w_j k(s_i, t_j) x_j. Throws if the kernel
/// is not finite at some node pair.
LinearMap integral_operator(const std::function<double(double, double)>& kernel,
                            const Grid1D& grid);

/// Triangular product kernel 40 s (1-t) for s <= t, symmetric continuation.
double kernel_ex1(double s, double t);

/// Unscaled forward differences (D x)_i = x_{i+1} - x_i, range dimension m
/// with uniform weights h. The operator norm is at most 2.
LinearMap discrete_gradient(const Grid1D& grid);

/// Builds B(x, z) = (A x, D x - z); A and D must share their domain.
ProductMap stack_constraint(const LinearMap& a, const LinearMap& d);

/// Operator norm sqrt(lambda_max(A* A)) by power iteration under the weighted
/// inner products. Deterministic start vector; returns 0 for the zero map.
double estimate_norm(const LinearMap& op, int max_iters = 200, double tol = 1e-8,
                     std::uint64_t seed = 0x6f7065726e6f726dULL);

}  // namespace dualgrad

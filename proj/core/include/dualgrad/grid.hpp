#pragma once

#include <Eigen/Core>
#include <stdexcept>

namespace dualgrad {

/// Uniform grid on [0,1] with m subintervals and nodes s_i = i/m, i = 0..m.
struct Grid1D {
  int m = 1;

  explicit Grid1D(int subintervals) : m(subintervals) {
    if (m < 1) throw std::invalid_argument("Grid1D: subinterval count must be positive");
  }

  double h() const { return 1.0 / m; }
  int nodes() const { return m + 1; }
  double node(int i) const { return static_cast<double>(i) / m; }

  Eigen::VectorXd node_vector() const {
    Eigen::VectorXd s(nodes());
    for (int i = 0; i <= m; ++i) s[i] = node(i);
    return s;
  }
};

/// A finite-dimensional space with quadrature weights; inner products and
/// norms are weighted so that they approximate their L^p counterparts.
struct Space {
  Eigen::VectorXd weights;

  Space() = default;
  explicit Space(Eigen::VectorXd w) : weights(std::move(w)) {
    if ((weights.array() < 0).any())
      throw std::invalid_argument("Space: quadrature weights must be nonnegative");
  }

  Eigen::Index dim() const { return weights.size(); }

  static Space uniform(Eigen::Index n, double w) {
    return Space(Eigen::VectorXd::Constant(n, w));
  }
  static Space euclidean(Eigen::Index n) { return uniform(n, 1.0); }
};

/// Trapezoidal weights h*(1/2, 1, ..., 1, 1/2); they sum to 1 up to rounding.
inline Space trapezoid_space(const Grid1D& g) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(g.nodes(), g.h());
  w[0] *= 0.5;
  w[g.m] *= 0.5;
  return Space(std::move(w));
}

inline double dot(const Space& sp, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  return (sp.weights.array() * u.array() * v.array()).sum();
}

inline double norm(const Space& sp, const Eigen::VectorXd& v) {
  return std::sqrt((sp.weights.array() * v.array().square()).sum());
}

/// Weighted L1 norm (discrete integral of |v|).
inline double norm_l1(const Space& sp, const Eigen::VectorXd& v) {
  return (sp.weights.array() * v.array().abs()).sum();
}

/// Concatenation of two weighted spaces (product space).
inline Space stack(const Space& a, const Space& b) {
  Eigen::VectorXd w(a.dim() + b.dim());
  w << a.weights, b.weights;
  return Space(std::move(w));
}

}  // namespace dualgrad

#include "dualgrad/linear_map.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace dualgrad {

LinearMap dense_map(Space domain, Space range, Eigen::MatrixXd forward,
                    Eigen::MatrixXd adjoint) {
  if (forward.cols() != domain.dim() || forward.rows() != range.dim())
    throw std::invalid_argument("dense_map: forward matrix shape mismatch");
  if (adjoint.cols() != range.dim() || adjoint.rows() != domain.dim())
    throw std::invalid_argument("dense_map: adjoint matrix shape mismatch");
  auto fwd = std::make_shared<Eigen::MatrixXd>(std::move(forward));
  auto adj = std::make_shared<Eigen::MatrixXd>(std::move(adjoint));
  return LinearMap(
      std::move(domain), std::move(range),
      [fwd](const Eigen::VectorXd& x) -> Eigen::VectorXd { return (*fwd) * x; },
      [adj](const Eigen::VectorXd& y) -> Eigen::VectorXd { return (*adj) * y; });
}

LinearMap integral_operator(const std::function<double(double, double)>& kernel,
                            const Grid1D& grid) {
  const int n = grid.nodes();
  Eigen::MatrixXd k(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double v = kernel(grid.node(i), grid.node(j));
      if (!std::isfinite(v))
        throw std::invalid_argument("integral_operator: kernel not finite at nodes");
      k(i, j) = v;
    }
  Space sp = trapezoid_space(grid);
  // (A x)_i = sum_j k(s_i, t_j) w_j x_j; (A* y)_j = sum_i k(s_i, t_j) w_i y_i.
  Eigen::MatrixXd fwd = k * sp.weights.asDiagonal();
  Eigen::MatrixXd adj = k.transpose() * sp.weights.asDiagonal();
  return dense_map(sp, sp, std::move(fwd), std::move(adj));
}

double kernel_ex1(double s, double t) {
  return s <= t ? 40.0 * s * (1.0 - t) : 40.0 * t * (1.0 - s);
}

LinearMap discrete_gradient(const Grid1D& grid) {
  const int m = grid.m;
  Space dom = trapezoid_space(grid);
  Space ran = Space::uniform(m, grid.h());
  Eigen::VectorXd wx = dom.weights;
  Eigen::VectorXd wz = ran.weights;
  auto forward = [m](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return x.tail(m) - x.head(m);
  };
  // <D x, mu>_wz = <x, D* mu>_wx componentwise transposition of the stencil.
  auto adjoint = [m, wx, wz](const Eigen::VectorXd& mu) -> Eigen::VectorXd {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(m + 1);
    out.head(m) -= wz.cwiseProduct(mu);
    out.tail(m) += wz.cwiseProduct(mu);
    return out.cwiseQuotient(wx);
  };
  return LinearMap(std::move(dom), std::move(ran), std::move(forward), std::move(adjoint));
}

ProductMap stack_constraint(const LinearMap& a, const LinearMap& d) {
  if (a.domain().dim() != d.domain().dim())
    throw std::invalid_argument("stack_constraint: A and D must share their domain");
  const Eigen::Index nx = a.domain().dim();
  const Eigen::Index nz = d.range().dim();
  const Eigen::Index ny = a.range().dim();
  Space dom = stack(a.domain(), d.range());
  Space ran = stack(a.range(), d.range());
  auto forward = [a, d, nx, nz, ny](const Eigen::VectorXd& xz) -> Eigen::VectorXd {
    Eigen::VectorXd out(ny + nz);
    out.head(ny) = a.apply(xz.head(nx));
    out.tail(nz) = d.apply(xz.head(nx)) - xz.tail(nz);
    return out;
  };
  auto adjoint = [a, d, nx, nz, ny](const Eigen::VectorXd& lm) -> Eigen::VectorXd {
    Eigen::VectorXd out(nx + nz);
    out.head(nx) = a.apply_adjoint(lm.head(ny)) + d.apply_adjoint(lm.tail(nz));
    out.tail(nz) = -lm.tail(nz);
    return out;
  };
  ProductMap pm;
  pm.map = LinearMap(std::move(dom), std::move(ran), std::move(forward), std::move(adjoint));
  pm.x_dim = nx;
  pm.z_dim = nz;
  pm.data_dim = ny;
  return pm;
}

namespace {

std::uint64_t splitmix_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

double estimate_norm(const LinearMap& op, int max_iters, double tol, std::uint64_t seed) {
  const Eigen::Index n = op.domain().dim();
  if (n < 1) throw std::invalid_argument("estimate_norm: empty domain");

  // Deterministic pseudo-random start, biased away from exact null spaces.
  Eigen::VectorXd v(n);
  std::uint64_t state = seed;
  for (Eigen::Index i = 0; i < n; ++i)
    v[i] = static_cast<double>(splitmix_next(state) >> 11) * 0x1.0p-53 - 0.5;
  double nv = norm(op.domain(), v);
  if (nv == 0.0) v.setOnes(), nv = norm(op.domain(), v);
  v /= nv;

  double lambda = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Eigen::VectorXd u = op.apply_adjoint(op.apply(v));  // A*A v
    const double rayleigh = dot(op.domain(), v, u);     // = ||A v||^2 for unit v
    const double nu = norm(op.domain(), u);
    if (nu == 0.0) return 0.0;
    v = u / nu;
    if (it > 0 && std::abs(rayleigh - lambda) <= tol * std::abs(rayleigh)) {
      lambda = rayleigh;
      break;
    }
    lambda = rayleigh;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

}  // namespace dualgrad

#include "dualgrad/fracdiff.hpp"

#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>
#include <stdexcept>

#include "dualgrad/mittag_leffler.hpp"

namespace dualgrad {

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::MatrixXd sine_matrix(int N) {
  const int n = N - 1;
  const double h = 1.0 / N;
  Eigen::MatrixXd s(n, n);
  for (int i = 1; i <= n; ++i)
    for (int p = 1; p <= n; ++p) s(i - 1, p - 1) = std::sin(i * p * h * kPi);
  return s;  // symmetric; S_mat * S_mat = (N/2) I by sine orthogonality
}

int side_of(const Field2D& v) {
  if (v.rows() != v.cols() || v.rows() < 1)
    throw std::invalid_argument("fracdiff: field must be square and nonempty");
  return static_cast<int>(v.rows()) + 1;  // N
}

}  // namespace

void FracDiffSpec::validate() const {
  if (N < 2) throw std::invalid_argument("FracDiffSpec: N must be at least 2");
  if (!(alpha > 0.0) || alpha > 1.0)
    throw std::invalid_argument("FracDiffSpec: alpha must lie in (0, 1]");
  if (!(T >= 0.0)) throw std::invalid_argument("FracDiffSpec: T must be nonnegative");
}

double laplacian_eigenvalue(int p, int q, int N) {
  if (N < 2 || p < 1 || p > N - 1 || q < 1 || q > N - 1)
    throw std::out_of_range("laplacian_eigenvalue: indices must satisfy 1 <= p,q <= N-1");
  const double h = 1.0 / N;
  return (4.0 - 2.0 * std::cos(p * h * kPi) - 2.0 * std::cos(q * h * kPi)) / (h * h);
}

Field2D dst2(const Field2D& v) {
  const int N = side_of(v);
  const double h = 1.0 / N;
  const Eigen::MatrixXd s = sine_matrix(N);
  return 4.0 * h * h * (s * v * s);
}

Field2D idst2(const Field2D& w) {
  const int N = side_of(w);
  const Eigen::MatrixXd s = sine_matrix(N);
  return s * w * s;
}

Space field_space(int N) {
  const double h = 1.0 / N;
  return Space::uniform(static_cast<Eigen::Index>(N - 1) * (N - 1), h * h);
}

Eigen::VectorXd flatten(const Field2D& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
}

Field2D unflatten(const Eigen::VectorXd& v, int N) {
  if (v.size() != static_cast<Eigen::Index>(N - 1) * (N - 1))
    throw std::invalid_argument("unflatten: size mismatch");
  return Eigen::Map<const Field2D>(v.data(), N - 1, N - 1);
}

double fracdiff_factor(const FracDiffSpec& spec, int p, int q) {
  const double mu = laplacian_eigenvalue(p, q, spec.N);
  return mittag_leffler(spec.alpha, -mu * std::pow(spec.T, spec.alpha));
}

LinearMap build_fracdiff_operator(const FracDiffSpec& spec) {
  spec.validate();
  const int N = spec.N;
  const int n = N - 1;
  const double h = 1.0 / N;

  auto sine = std::make_shared<Eigen::MatrixXd>(sine_matrix(N));
  auto factors = std::make_shared<Eigen::MatrixXd>(n, n);
  const double talpha = std::pow(spec.T, spec.alpha);
  for (int p = 1; p <= n; ++p)
    for (int q = p; q <= n; ++q) {
      const double f =
          mittag_leffler(spec.alpha, -laplacian_eigenvalue(p, q, N) * talpha);
      (*factors)(p - 1, q - 1) = f;
      (*factors)(q - 1, p - 1) = f;  // mu is symmetric in (p, q)
    }

  Space sp = field_space(N);
  const double scale = 4.0 * h * h;
  auto apply = [sine, factors, n, scale](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    Eigen::Map<const Eigen::MatrixXd> v(x.data(), n, n);
    Eigen::MatrixXd coeff = scale * (*sine * v * *sine);
    coeff.array() *= factors->array();
    Eigen::MatrixXd out = *sine * coeff * *sine;
    return Eigen::Map<Eigen::VectorXd>(out.data(), out.size());
  };
  // Symmetric under the uniform weights: the adjoint is the same action.
  return LinearMap(sp, sp, apply, apply);
}

void write_field_csv(std::ostream& os, const Field2D& v, const FracDiffSpec& spec) {
  char head[96];
  std::snprintf(head, sizeof(head), "# N=%d,alpha=%.12g,T=%.12g\n", spec.N, spec.alpha,
                spec.T);
  os << head;
  char buf[32];
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.12e", v(i, j));
      os << buf << (j + 1 < v.cols() ? "," : "");
    }
    os << "\n";
  }
}

}  // namespace dualgrad

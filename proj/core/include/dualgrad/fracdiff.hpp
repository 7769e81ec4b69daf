#pragma once

#include <iosfwd>

#include <Eigen/Core>

#include "dualgrad/linear_map.hpp"

namespace dualgrad {

/// Interior values of a zero-boundary field on the (N+1)x(N+1) grid of
/// [0,1]^2; shape (N-1)x(N-1), entry (i-1, j-1) holds the value at (i h, j h).
using Field2D = Eigen::MatrixXd;

/// Forward problem for recovering the initial field of the time-fractional
/// diffusion equation from its state at time T.
struct FracDiffSpec {
  int N = 64;          // grid parameter, h = 1/N
  double alpha = 0.5;  // fractional order in (0, 1]
  double T = 0.1;      // observation time, >= 0

  void validate() const;
};

/// Eigenvalue (4 - 2 cos(p h pi) - 2 cos(q h pi)) / h^2 of the discrete
/// Dirichlet Laplacian, h = 1/N. Requires 1 <= p, q <= N-1.
double laplacian_eigenvalue(int p, int q, int N);

/// Discrete sine transform (S v)_{p,q} = 4 h^2 sum_{i,j} v_{ij} sin(i p h pi) sin(j q h pi)
/// and its inverse (without the 4 h^2 factor); idst2(dst2(v)) == v.
Field2D dst2(const Field2D& v);
Field2D idst2(const Field2D& w);

/// Uniform-weight space (h^2 per interior node) for vectorized fields.
Space field_space(int N);

/// Column-major vectorization used by the operator below.
Eigen::VectorXd flatten(const Field2D& v);
Field2D unflatten(const Eigen::VectorXd& v, int N);

/// The solution operator A f = S^{-1} W_T S f with diagonal spectral factors
/// (W_T)_{p,q} = E_alpha(-mu_{p,q} T^alpha). Self-adjoint under the uniform
/// weights; all factors lie in (0, 1], so the operator norm is at most 1.
LinearMap build_fracdiff_operator(const FracDiffSpec& spec);

/// Spectral factor E_alpha(-mu_{p,q} T^alpha) for one mode.
double fracdiff_factor(const FracDiffSpec& spec, int p, int q);

/// Row-major CSV with a "# N=..,alpha=..,T=.." comment line.
void write_field_csv(std::ostream& os, const Field2D& v, const FracDiffSpec& spec);

}  // namespace dualgrad

#pragma once

#include <vector>

#include "boostr/core.hpp"

namespace boostr {

/// Clamped B-spline basis of order v (degree v - 1) with u internal knots,
/// giving u + v basis functions on [z_lo, z_hi]. Evaluation clamps its
/// argument into the knot range, so the basis always sums to one.
struct SplineBasis {
  int u = 0;
  int v = 1;
  std::vector<double> knots;  // full clamped knot vector, length u + 2v

  int n_basis() const { return u + v; }
  int degree() const { return v - 1; }
  double z_lo() const { return knots.front(); }
  double z_hi() const { return knots.back(); }
};

/// Internal knots at evenly spaced quantiles of the pooled samples,
/// boundary knots at the sample range. Throws on a degenerate range.
SplineBasis make_basis(const std::vector<double>& samples, int u, int v);

/// All u + v basis values at z (Cox-de Boor, local triangle).
ArrayXd basis_eval(const SplineBasis& basis, double z);

/// Phi[j](b) = integral of B_b(z(tau)) over (0, t_j], with z zero-order
/// held between its samples. Exact for the piecewise-constant path.
/// Rows are non-decreasing in j.
MatrixXd integrate_basis(const SplineBasis& basis, const DynamicSeries& z, const TimeGrid& grid);

/// Same integral up to an arbitrary time t (supports extrapolation past
/// the grid horizon by holding the last sample value).
ArrayXd integrate_basis_at(const SplineBasis& basis, const DynamicSeries& z, double t);

}  // namespace boostr

#include "boostr/splines.hpp"

#include <algorithm>
#include <cmath>

namespace boostr {

namespace {

// Type-7 (linear interpolation) sample quantile of a sorted vector.
double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double pos = p * (static_cast<double>(sorted.size()) - 1.0);
  const auto lo = static_cast<size_t>(std::floor(pos));
  const auto hi = static_cast<size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

SplineBasis make_basis(const std::vector<double>& samples, int u, int v) {
  if (u < 0 || v < 1) throw std::invalid_argument("make_basis: need u >= 0 and v >= 1");
  if (samples.size() < 2) throw std::invalid_argument("make_basis: need at least two samples");
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();
  if (!(lo < hi)) throw std::invalid_argument("make_basis: degenerate sample range");

  std::vector<double> internal(u);
  for (int k = 0; k < u; ++k) internal[k] = quantile_sorted(sorted, static_cast<double>(k + 1) / (u + 1));
  // Quantiles of very lumpy samples can tie or touch the boundary; fall
  // back to even spacing, which keeps the knot invariants.
  bool ok = true;
  double prev = lo;
  for (double k : internal) {
    if (!(k > prev && k < hi)) ok = false;
    prev = k;
  }
  if (!ok)
    for (int k = 0; k < u; ++k) internal[k] = lo + (hi - lo) * static_cast<double>(k + 1) / (u + 1);

  SplineBasis basis;
  basis.u = u;
  basis.v = v;
  basis.knots.reserve(u + 2 * v);
  basis.knots.insert(basis.knots.end(), v, lo);
  basis.knots.insert(basis.knots.end(), internal.begin(), internal.end());
  basis.knots.insert(basis.knots.end(), v, hi);
  return basis;
}

ArrayXd basis_eval(const SplineBasis& basis, double z) {
  const int deg = basis.degree();
  const int nb = basis.n_basis();
  const auto& kn = basis.knots;
  z = std::clamp(z, basis.z_lo(), basis.z_hi());

  // Knot span index: kn[span] <= z < kn[span + 1], last span closed.
  int span;
  if (z >= basis.z_hi()) {
    span = nb - 1;
  } else {
    span = static_cast<int>(std::upper_bound(kn.begin(), kn.end(), z) - kn.begin()) - 1;
    span = std::clamp(span, deg, nb - 1);
  }

  // Local triangle of the Cox-de Boor recursion; only the deg + 1 bases
  // supported on this span are nonzero.
  ArrayXd local = ArrayXd::Zero(deg + 1);
  std::vector<double> left(deg + 1), right(deg + 1);
  local[0] = 1.0;
  for (int d = 1; d <= deg; ++d) {
    left[d] = z - kn[span + 1 - d];
    right[d] = kn[span + d] - z;
    double saved = 0.0;
    for (int r = 0; r < d; ++r) {
      const double denom = right[r + 1] + left[d - r];
      const double temp = local[r] / denom;
      local[r] = saved + right[r + 1] * temp;
      saved = left[d - r] * temp;
    }
    local[d] = saved;
  }

  ArrayXd out = ArrayXd::Zero(nb);
  out.segment(span - deg, deg + 1) = local;
  return out;
}

namespace {

// Adds the integral of B(z(tau)) over [from, to) to acc. The path is
// piecewise constant, so each segment contributes value * length exactly.
void accumulate_segments(const SplineBasis& basis, const DynamicSeries& z, double from, double to, ArrayXd& acc) {
  double cur = from;
  while (cur < to) {
    auto it = std::upper_bound(z.times.begin(), z.times.end(), cur);
    const double seg_end = (it == z.times.end()) ? to : std::min(*it, to);
    acc += basis_eval(basis, z.at(cur)) * (seg_end - cur);
    cur = seg_end;
  }
}

}  // namespace

MatrixXd integrate_basis(const SplineBasis& basis, const DynamicSeries& z, const TimeGrid& grid) {
  if (z.times.empty()) throw std::invalid_argument("integrate_basis: empty series");
  MatrixXd phi(grid.m, basis.n_basis());
  ArrayXd acc = ArrayXd::Zero(basis.n_basis());
  double cur = 0.0;
  for (int j = 0; j < grid.m; ++j) {
    accumulate_segments(basis, z, cur, grid.t(j), acc);
    cur = grid.t(j);
    phi.row(j) = acc.matrix().transpose();
  }
  return phi;
}

ArrayXd integrate_basis_at(const SplineBasis& basis, const DynamicSeries& z, double t) {
  if (z.times.empty()) throw std::invalid_argument("integrate_basis_at: empty series");
  ArrayXd acc = ArrayXd::Zero(basis.n_basis());
  accumulate_segments(basis, z, 0.0, t, acc);
  return acc;
}

}  // namespace boostr

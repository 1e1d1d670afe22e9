#include <doctest.h>

#include <cmath>

#include "boostr/rng.hpp"
#include "boostr/splines.hpp"
#include "oracles.hpp"

using namespace boostr;

namespace {

std::vector<double> uniform_samples(int n, uint64_t seed, double lo = 0.0, double hi = 1.0) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = rng.uniform(lo, hi);
  return out;
}

}  // namespace

TEST_CASE("make_basis counts: u=2, v=3 gives 5 basis functions") {
  const SplineBasis basis = make_basis(uniform_samples(200, 1), 2, 3);
  CHECK(basis.n_basis() == 5);
  CHECK(basis.degree() == 2);
  CHECK(basis.knots.size() == 2 + 2 * 3);
}

TEST_CASE("make_basis degenerate cases") {
  CHECK_THROWS_AS(make_basis({1.0, 1.0, 1.0}, 2, 3), std::invalid_argument);  // all equal
  CHECK_THROWS_AS(make_basis({1.0}, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_basis(uniform_samples(10, 2), -1, 3), std::invalid_argument);
  CHECK_THROWS_AS(make_basis(uniform_samples(10, 2), 0, 0), std::invalid_argument);
}

TEST_CASE("u=0, v=1 is a single box function") {
  const SplineBasis basis = make_basis({0.0, 1.0}, 0, 1);
  CHECK(basis.n_basis() == 1);
  for (double z : {0.0, 0.3, 0.99, 1.0}) CHECK(basis_eval(basis, z)[0] == 1.0);
}

TEST_CASE("internal knots sit near quantiles of the samples") {
  const auto samples = uniform_samples(20000, 3);
  const SplineBasis basis = make_basis(samples, 3, 2);
  // Quartiles of U[0, 1] at this sample size.
  CHECK(basis.knots[2] == doctest::Approx(0.25).epsilon(0.03));
  CHECK(basis.knots[3] == doctest::Approx(0.50).epsilon(0.03));
  CHECK(basis.knots[4] == doctest::Approx(0.75).epsilon(0.03));
}

TEST_CASE("partition of unity and non-negativity") {
  for (auto [u, v] : {std::pair{2, 3}, {0, 1}, {5, 4}, {1, 2}}) {
    const SplineBasis basis = make_basis(uniform_samples(500, 17 + u + v), u, v);
    Rng rng(99);
    for (int i = 0; i < 1000; ++i) {
      const ArrayXd b = basis_eval(basis, rng.uniform(-0.2, 1.2));  // clamping included
      CHECK(b.minCoeff() >= 0.0);
      CHECK(b.sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("clamped boundary values") {
  const SplineBasis basis = make_basis(uniform_samples(100, 5), 2, 3);
  const ArrayXd at_lo = basis_eval(basis, basis.z_lo());
  CHECK(at_lo[0] == doctest::Approx(1.0).epsilon(1e-14));
  for (int j = 1; j < basis.n_basis(); ++j) CHECK(at_lo[j] == doctest::Approx(0.0).epsilon(1e-14));
  const ArrayXd at_hi = basis_eval(basis, basis.z_hi());
  CHECK(at_hi[basis.n_basis() - 1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("basis_eval matches the direct recursive definition") {
  const SplineBasis basis = make_basis(uniform_samples(300, 7), 4, 3);  // degree 2
  Rng rng(123);
  for (int i = 0; i < 500; ++i) {
    const double z = rng.uniform(basis.z_lo(), basis.z_hi());
    const ArrayXd fast = basis_eval(basis, z);
    const ArrayXd naive = oracles::bspline_all_recursive(basis, z);
    CHECK((fast - naive).abs().maxCoeff() < 1e-12);
  }
  // And the closed right end.
  CHECK((basis_eval(basis, basis.z_hi()) - oracles::bspline_all_recursive(basis, basis.z_hi())).abs().maxCoeff() <
        1e-12);
}

TEST_CASE("integrate_basis: constant path is exact") {
  const SplineBasis basis = make_basis(uniform_samples(100, 11), 2, 3);
  const TimeGrid grid = build_grid(10, 40);
  const double z0 = 0.37;
  DynamicSeries z{{0.0}, {z0}};
  const MatrixXd phi = integrate_basis(basis, z, grid);
  const ArrayXd b = basis_eval(basis, z0);
  for (int j = 0; j < grid.m; ++j)
    for (int k = 0; k < basis.n_basis(); ++k) CHECK(phi(j, k) == doctest::Approx(b[k] * grid.t(j)).epsilon(1e-14));
}

TEST_CASE("integrate_basis: two-segment switch is exact") {
  const SplineBasis basis = make_basis(uniform_samples(100, 13), 2, 3);
  const TimeGrid grid = build_grid(8, 16);
  DynamicSeries z{{0.0, 4.0}, {0.2, 0.8}};
  const MatrixXd phi = integrate_basis(basis, z, grid);
  const ArrayXd expect = (basis_eval(basis, 0.2) + basis_eval(basis, 0.8)) * 4.0;
  CHECK((phi.row(grid.m - 1).transpose().array() - expect).abs().maxCoeff() < 1e-12);
}

TEST_CASE("integrate_basis rows are non-decreasing and empty series throws") {
  const SplineBasis basis = make_basis(uniform_samples(100, 15), 1, 2);
  const TimeGrid grid = build_grid(5, 25);
  Rng rng(77);
  DynamicSeries z;
  for (int i = 0; i < 12; ++i) {
    z.times.push_back(i * 0.45);
    z.values.push_back(rng.uniform());
  }
  const MatrixXd phi = integrate_basis(basis, z, grid);
  for (int j = 1; j < grid.m; ++j)
    for (int k = 0; k < basis.n_basis(); ++k) CHECK(phi(j, k) >= phi(j - 1, k) - 1e-15);
  CHECK_THROWS_AS(integrate_basis(basis, DynamicSeries{}, grid), std::invalid_argument);
}

TEST_CASE("integrated basis sums to elapsed time") {
  const SplineBasis basis = make_basis(uniform_samples(200, 19), 2, 3);
  const TimeGrid grid = build_grid(12, 30);
  Rng rng(5);
  DynamicSeries z;
  for (int i = 0; i < 40; ++i) {
    z.times.push_back(i * 0.3);
    z.values.push_back(rng.uniform());
  }
  const MatrixXd phi = integrate_basis(basis, z, grid);
  for (int j = 0; j < grid.m; ++j) CHECK(std::abs(phi.row(j).sum() - grid.t(j)) <= 1e-9 * grid.t(j));
}

TEST_CASE("sampled sinusoid: fine series agrees within 1e-3 relative") {
  const SplineBasis basis = make_basis(uniform_samples(500, 21, -1.0, 1.0), 2, 3);
  const TimeGrid grid = build_grid(10, 20);
  auto sample_series = [&](int n_samples) {
    DynamicSeries z;
    for (int i = 0; i < n_samples; ++i) {
      const double t = 10.0 * i / n_samples;
      z.times.push_back(t);
      z.values.push_back(std::sin(1.3 * t));
    }
    return z;
  };
  const MatrixXd coarse = integrate_basis(basis, sample_series(2000), grid);
  const MatrixXd fine = integrate_basis(basis, sample_series(20000), grid);
  const int last = grid.m - 1;
  for (int k = 0; k < basis.n_basis(); ++k) {
    const double ref = fine(last, k);
    if (std::abs(ref) > 1e-6) CHECK(std::abs(coarse(last, k) - ref) <= 1e-3 * std::abs(ref) + 1e-6);
  }
}

TEST_CASE("quadrature error roughly halves when the sampling rate doubles") {
  const SplineBasis basis = make_basis(uniform_samples(500, 23, -1.0, 1.0), 2, 3);
  auto total_at = [&](int n_samples, double t_end) {
    DynamicSeries z;
    for (int i = 0; i < n_samples; ++i) {
      const double t = t_end * i / n_samples;
      z.times.push_back(t);
      z.values.push_back(std::sin(1.7 * t + 0.4));
    }
    return integrate_basis_at(basis, z, t_end);
  };
  const ArrayXd reference = total_at(1 << 15, 6.0);
  double prev_err = -1.0;
  double ratio_sum = 0.0;
  int ratios = 0;
  for (int n : {64, 128, 256, 512}) {
    const double err = (total_at(n, 6.0) - reference).abs().maxCoeff();
    if (prev_err > 0.0 && err > 0.0) {
      ratio_sum += prev_err / err;
      ++ratios;
    }
    prev_err = err;
  }
  CHECK(ratios == 3);
  CHECK(ratio_sum / ratios >= 1.9);
}

TEST_CASE("integrate_basis_at extrapolates by holding the last value") {
  const SplineBasis basis = make_basis(uniform_samples(100, 29), 2, 3);
  DynamicSeries z{{0.0, 1.0}, {0.3, 0.6}};
  const ArrayXd at2 = integrate_basis_at(basis, z, 2.0);
  const ArrayXd at4 = integrate_basis_at(basis, z, 4.0);
  const ArrayXd expect = at2 + 2.0 * basis_eval(basis, 0.6);
  CHECK((at4 - expect).abs().maxCoeff() < 1e-12);
}

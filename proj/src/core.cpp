#include "boostr/core.hpp"

#include <algorithm>
#include <cmath>

namespace boostr {

TimeGrid build_grid(double t_max, int m) {
  if (!(t_max > 0.0)) throw std::invalid_argument("build_grid: t_max must be > 0");
  if (m < 2) throw std::invalid_argument("build_grid: m must be >= 2");
  return TimeGrid{t_max, m};
}

void EventHistory::validate() const {
  if (!(censor > 0.0)) throw std::invalid_argument("EventHistory: censor must be > 0");
  double prev = 0.0;
  for (double t : times) {
    if (!(t > prev)) throw std::invalid_argument("EventHistory: times must be strictly ascending and > 0");
    if (t > censor) throw std::invalid_argument("EventHistory: event time beyond censoring time");
    prev = t;
  }
}

int EventHistory::count_at(double t) const {
  return static_cast<int>(std::upper_bound(times.begin(), times.end(), t) - times.begin());
}

double DynamicSeries::at(double t) const {
  if (times.empty()) throw std::invalid_argument("DynamicSeries: empty series");
  // Last sample with time <= t; before the first sample, hold the first value.
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return values.front();
  return values[static_cast<size_t>(it - times.begin()) - 1];
}

Curve zero_curve(const TimeGrid& grid) {
  return Curve{grid, ArrayXd::Zero(grid.m), grid.m};
}

Curve empirical_mcf(const EventHistory& events, const TimeGrid& grid) {
  events.validate();
  Curve c;
  c.grid = grid;
  c.values.resize(grid.m);
  c.n_obs = 0;
  const int at_censor = events.count_at(events.censor);
  for (int j = 0; j < grid.m; ++j) {
    const double tj = grid.t(j);
    if (tj <= events.censor) {
      c.values[j] = events.count_at(tj);
      c.n_obs = j + 1;
    } else {
      c.values[j] = at_censor;
    }
  }
  return c;
}

ArrayXd quad_weights(const TimeGrid& grid, int n) {
  const double d = grid.delta();
  ArrayXd w = ArrayXd::Constant(std::max(n, 0), d);
  if (n >= 2) {
    w[0] = 1.5 * d;
    w[n - 1] = 0.5 * d;
  }
  return w;
}

double curve_integral(const Curve& a, const Curve& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("curve_integral: grid mismatch");
  const int n = std::min(a.n_obs, b.n_obs);
  if (n <= 0) return 0.0;
  const ArrayXd w = quad_weights(a.grid, n);
  return (w * a.values.head(n) * b.values.head(n)).sum();
}

void Dataset::validate() const {
  if (individuals.empty()) throw std::invalid_argument("Dataset: empty");
  for (const auto& ind : individuals) {
    if (ind.x.size() != p) throw std::invalid_argument("Dataset: inconsistent static feature length for id " + ind.id);
    if (static_cast<int>(ind.z.size()) != q)
      throw std::invalid_argument("Dataset: inconsistent dynamic feature count for id " + ind.id);
    ind.events.validate();
  }
}

MatrixXd Dataset::feature_matrix() const {
  MatrixXd X(size(), p);
  for (int i = 0; i < size(); ++i) X.row(i) = individuals[i].x.transpose();
  return X;
}

Dataset Dataset::subset(const std::vector<int>& indices) const {
  Dataset out;
  out.p = p;
  out.q = q;
  out.grid = grid;
  out.individuals.reserve(indices.size());
  for (int i : indices) out.individuals.push_back(individuals.at(i));
  return out;
}

}  // namespace boostr

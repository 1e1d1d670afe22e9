#pragma once

#include <Eigen/Core>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace boostr {

using Eigen::ArrayXd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Thrown when a numeric routine fails (solver divergence, bound violation).
/// Distinct from std::invalid_argument so callers can map it to a different
/// exit status.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform grid t_j = j * delta, j = 1..m, spanning (0, t_max].
struct TimeGrid {
  double t_max = 0.0;
  int m = 0;

  double delta() const { return t_max / m; }
  // t(j) for 0-based j; written so that t(m - 1) == t_max exactly.
  double t(int j) const { return t_max * static_cast<double>(j + 1) / m; }
  bool operator==(const TimeGrid& other) const = default;
};

TimeGrid build_grid(double t_max, int m);

/// Event times of one individual plus its right-censoring time.
struct EventHistory {
  std::vector<double> times;  // strictly ascending, all in (0, censor]
  double censor = 0.0;

  void validate() const;
  // Number of events in (0, t].
  int count_at(double t) const;
};

/// One sample path of a dynamic feature: (time, value) pairs, times
/// ascending and starting at 0. Zero-order hold between samples, last
/// value held beyond the final sample.
struct DynamicSeries {
  std::vector<double> times;
  std::vector<double> values;

  double at(double t) const;  // zero-order-hold lookup
};

struct Individual {
  std::string id;
  VectorXd x;                     // static features, length p
  std::vector<DynamicSeries> z;   // dynamic features, length q (may be empty)
  EventHistory events;
};

/// Function sampled on a TimeGrid. The mask is a prefix: points
/// j < n_obs are observed (t_j <= censor), the rest are held values that
/// never enter objectives.
struct Curve {
  TimeGrid grid;
  ArrayXd values;
  int n_obs = 0;

  bool observed(int j) const { return j < n_obs; }
};

Curve zero_curve(const TimeGrid& grid);

/// Step function counting events: values[j] = #{times <= t_j}. Beyond the
/// censoring time the count is held constant and masked out.
Curve empirical_mcf(const EventHistory& events, const TimeGrid& grid);

/// Quadrature weights over the first n points of the grid. Trapezoids on
/// the interior panels; the leading panel [0, t_0] is a rectangle at the
/// t_0 value, so constants integrate exactly.
ArrayXd quad_weights(const TimeGrid& grid, int n);

/// Approximates the integral of a(t) * b(t) over the intersection of both
/// masks. Throws std::invalid_argument on grid mismatch.
double curve_integral(const Curve& a, const Curve& b);

struct Dataset {
  std::vector<Individual> individuals;
  int p = 0;  // static feature count
  int q = 0;  // dynamic feature count
  TimeGrid grid;

  int size() const { return static_cast<int>(individuals.size()); }
  void validate() const;

  // Static features as an n x p matrix, row per individual.
  MatrixXd feature_matrix() const;
  // Sub-dataset given by the (dataset-order) indices.
  Dataset subset(const std::vector<int>& indices) const;
};

}  // namespace boostr

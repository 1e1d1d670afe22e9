#pragma once

#include <array>
#include <memory>
#include <vector>

#include "boostr/boost_static.hpp"
#include "boostr/core.hpp"

namespace boostr {

/// Risk-set-weighted population MCF (Nelson-Aalen type): increments
/// dN(s) / Y(s) at each event time, with Y(s) the number of individuals
/// still under observation at s.
Curve pooled_mcf(const Dataset& train);

/// pooled_mcf restricted to the K nearest training individuals in
/// Euclidean feature distance; distance ties break by dataset order.
Curve mcf_knn(const Dataset& train, const VectorXd& x_query, int k);

/// Poisson MLE for a log-linear event rate exp(b0 + b' x) with exposure
/// equal to each individual's censoring time. Newton iterations; the
/// gradient norm is below 1e-8 at exit or numeric_error is thrown.
struct HppLoglinear {
  VectorXd beta;  // intercept first

  double rate(const VectorXd& x) const;
  Curve predict(const VectorXd& x, const TimeGrid& grid) const;
};
HppLoglinear hpp_loglinear_fit(const Dataset& train);

/// Boosted constant-leaf trees on rows (x, t_j) -> mcf value, the ad hoc
/// "time as another feature" scheme. Routing compares t against fixed
/// thresholds, so predictions are constant in t beyond the training
/// horizon.
struct TimeFeatureBooster {
  std::vector<Tree> trees;
  TimeGrid grid;
  int p = 0;

  double predict_value(const VectorXd& x, double t) const;
  Curve predict(const VectorXd& x) const;
};
TimeFeatureBooster time_feature_booster_fit(const Dataset& train, const BoostConfig& config);

/// Empirical probability of ranking pairs correctly: pairs with equal
/// observed counts are excluded; tied predictions score 1/2. Throws
/// numeric_error when no pair has distinct observed counts.
double c_index(const std::vector<double>& predicted, const std::vector<double>& observed);

/// Squared L2 distance over the masked intersection.
double l2_distance(const Curve& a, const Curve& b);

double mse_counts(const std::vector<double>& predicted, const std::vector<double>& observed);

class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual Curve predict_curve(const Individual& ind) const = 0;
  // Default: interpolate the curve, extrapolating past t_max by the last
  // segment's slope.
  virtual double predict_value(const Individual& ind, double t) const;
};

using FitMethod = std::function<std::unique_ptr<Predictor>(const Dataset& train)>;

FitMethod make_boostr_method(const BoostConfig& config);
FitMethod make_pooled_mcf_method();
FitMethod make_mcf_knn_method(int k);
FitMethod make_hpp_method();
FitMethod make_time_feature_method(const BoostConfig& config);

struct Summary {
  double mean = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, lo = 0.0, hi = 0.0;
};
Summary summarize(std::vector<double> values);

struct MetricReport {
  std::vector<double> c_index_reps;
  std::vector<double> l2_reps;   // mean squared-L2 distance per replicate
  std::vector<double> mse_reps;  // count MSE at t_eval per replicate
};

/// Repeated random train/test splits. t_eval < 0 uses the smallest
/// censoring time in the dataset. Replicates get independent sub-seeds,
/// so the report does not depend on thread count.
MetricReport cross_validate(const Dataset& data, const FitMethod& method, int train_n, int test_n, int reps,
                            uint64_t seed, double t_eval = -1.0, int n_threads = 1);

/// Latin hypercube over (gamma1, gamma2): best of 200 random Latin
/// designs by minimum pairwise distance in the unit square.
struct LhdDesign {
  MatrixXd points;  // n_runs x 2, already scaled to the ranges
  std::array<std::pair<double, double>, 2> ranges;
};
LhdDesign lhd_sample(std::pair<double, double> gamma1_range, std::pair<double, double> gamma2_range, int n_runs,
                     uint64_t seed);

struct TuneRun {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  Summary leaves_per_tree;
  bool in_target_band = false;  // median leaves within [4, 8]
};
std::vector<TuneRun> tune(const Dataset& data, const LhdDesign& design, const BoostConfig& base);

}  // namespace boostr

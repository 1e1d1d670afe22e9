#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "boostr/core.hpp"
#include "boostr/tree.hpp"

namespace boostr {

struct BoostConfig {
  int K = 50;
  double gamma1 = 300.0;  // per-leaf penalty, blocks weak splits
  double gamma2 = 100.0;  // shrinkage on leaf functions
  int d_max = 4;          // growth stops once a level starts with >= d_max leaves
  int min_leaf = 5;
  int max_thresholds = 32;
  double eta = 1.0;  // optional extra learning rate; 1 = off
  uint64_t seed = 42;
  int n_threads = 1;

  void validate() const;
};

/// Additive ensemble for static features: prediction is the sum of the
/// leaf curves x routes to in every tree.
struct EnsembleStatic {
  std::vector<Tree> trees;
  TimeGrid grid;
  BoostConfig config;
  int p = 0;
  VectorXd importance_raw;  // per-feature accumulated split gains

  Curve predict(const VectorXd& x) const;
  // Value at an arbitrary time: linear interpolation on the grid, and
  // last-segment-slope extrapolation beyond t_max.
  double predict_at(const VectorXd& x, double t) const;
};

/// First and second derivatives of the squared-L2 loss at the current
/// prediction: g = mu_hat - mu_tilde and h = 1 on the observed prefix,
/// both zero afterwards.
std::pair<Curve, Curve> gradients(const Curve& mu_tilde, const Curve& mu_hat);

/// Pointwise minimizer of the node objective: f = -gsum / (hsum + gamma2),
/// zero where the denominator vanishes.
Curve optimal_leaf(const Curve& gsum, const Curve& hsum, double gamma2);

/// Node objective value at its optimal leaf: -1/2 * integral of
/// gsum^2 / (hsum + gamma2).
double node_score(const Curve& gsum, const Curve& hsum, double gamma2);

/// Objective reduction achieved by a split, minus the leaf penalty.
double split_gain_g1(double parent_score, double left_score, double right_score, double gamma1);

struct BestSplit {
  SplitRule rule;
  double gain = 0.0;
};

/// Best (feature, threshold) over midpoint candidates of consecutive
/// distinct sorted values, capped at max_thresholds evenly spaced picks.
/// Candidates leaving fewer than min_leaf individuals on a side are
/// skipped. Returns nullopt when no candidate has positive gain; ties go
/// to the lowest feature index, then the lowest threshold.
std::optional<BestSplit> find_best_split(const std::vector<int>& node_individuals, const MatrixXd& features,
                                         const std::vector<ArrayXd>& g, const std::vector<ArrayXd>& h,
                                         const TimeGrid& grid, const BoostConfig& config);

/// Grows one tree level-wise: every leaf with a positive-gain split is
/// split at each level, until nothing splits or a level starts with
/// d_max or more leaves (simultaneous splits can push the final count
/// past d_max). Leaves store their optimal curves.
Tree grow_tree(const std::vector<int>& individuals, const MatrixXd& features, const std::vector<ArrayXd>& g,
               const std::vector<ArrayXd>& h, const TimeGrid& grid, const BoostConfig& config);

struct FitTrace {
  std::vector<double> loss;      // loss.at(k) = total loss after k trees
  std::vector<int> leaf_counts;  // per tree
};

EnsembleStatic fit_static(const Dataset& data, const BoostConfig& config, FitTrace* trace = nullptr);

/// Raw importance w_i = (1/K^2) * sum of gains on nodes split by feature
/// i; standardized variant is affinely mapped so max = 1 and min = 0.
VectorXd feature_importance(const EnsembleStatic& ensemble, bool standardize);
VectorXd standardize_importance(const VectorXd& raw);

Curve clamp_nonneg(const Curve& c);

// Shared helpers for curve-valued boosting (also used by the dynamic
// ensemble and the time-as-feature baseline).
double interp_at(const Curve& c, double t);     // linear on the grid, from (0, 0)
double extrapolate_at(const Curve& c, double t);  // last-segment slope past t_max

/// Candidate split positions for one feature: indices into `order` (its
/// values sorted ascending) after which the node is cut; midpoints of
/// consecutive distinct values, evenly subsampled down to max_thresholds.
std::vector<int> candidate_cuts(const std::vector<double>& sorted_values, int max_thresholds);

}  // namespace boostr

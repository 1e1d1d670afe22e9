#include "boostr/boost_static.hpp"

#include <algorithm>
#include <cmath>

#include "boostr/parallel.hpp"

namespace boostr {

void BoostConfig::validate() const {
  if (K < 1) throw std::invalid_argument("BoostConfig: K must be >= 1");
  if (gamma1 < 0.0 || gamma2 < 0.0) throw std::invalid_argument("BoostConfig: penalties must be >= 0");
  if (d_max < 2) throw std::invalid_argument("BoostConfig: d_max must be >= 2");
  if (min_leaf < 1) throw std::invalid_argument("BoostConfig: min_leaf must be >= 1");
  if (max_thresholds < 1) throw std::invalid_argument("BoostConfig: max_thresholds must be >= 1");
  if (eta <= 0.0) throw std::invalid_argument("BoostConfig: eta must be > 0");
  if (n_threads < 1) throw std::invalid_argument("BoostConfig: n_threads must be >= 1");
}

std::pair<Curve, Curve> gradients(const Curve& mu_tilde, const Curve& mu_hat) {
  if (!(mu_tilde.grid == mu_hat.grid)) throw std::invalid_argument("gradients: grid mismatch");
  const int m = mu_tilde.grid.m;
  const int n_obs = mu_tilde.n_obs;
  Curve g{mu_tilde.grid, ArrayXd::Zero(m), n_obs};
  Curve h{mu_tilde.grid, ArrayXd::Zero(m), n_obs};
  g.values.head(n_obs) = mu_hat.values.head(n_obs) - mu_tilde.values.head(n_obs);
  h.values.head(n_obs) = 1.0;
  return {g, h};
}

namespace {

ArrayXd optimal_leaf_values(const ArrayXd& gsum, const ArrayXd& hsum, double gamma2) {
  const ArrayXd denom = hsum + gamma2;
  return (denom > 0.0).select(-gsum / denom, ArrayXd::Zero(gsum.size()));
}

double score_arrays(const ArrayXd& gsum, const ArrayXd& hsum, double gamma2, const ArrayXd& weights) {
  const ArrayXd denom = hsum + gamma2;
  const ArrayXd ratio = (denom > 0.0).select(gsum.square() / denom, ArrayXd::Zero(gsum.size()));
  return -0.5 * (weights * ratio).sum();
}

}  // namespace

Curve optimal_leaf(const Curve& gsum, const Curve& hsum, double gamma2) {
  if (!(gsum.grid == hsum.grid)) throw std::invalid_argument("optimal_leaf: grid mismatch");
  return Curve{gsum.grid, optimal_leaf_values(gsum.values, hsum.values, gamma2), gsum.grid.m};
}

double node_score(const Curve& gsum, const Curve& hsum, double gamma2) {
  if (!(gsum.grid == hsum.grid)) throw std::invalid_argument("node_score: grid mismatch");
  const int n = std::min(gsum.n_obs, hsum.n_obs);
  const ArrayXd w = quad_weights(gsum.grid, n);
  return score_arrays(gsum.values.head(n), hsum.values.head(n), gamma2, w);
}

double split_gain_g1(double parent_score, double left_score, double right_score, double gamma1) {
  return parent_score - left_score - right_score - gamma1;
}

std::vector<int> candidate_cuts(const std::vector<double>& sorted_values, int max_thresholds) {
  std::vector<int> cuts;
  const int n = static_cast<int>(sorted_values.size());
  for (int i = 0; i + 1 < n; ++i)
    if (sorted_values[i] < sorted_values[i + 1]) cuts.push_back(i);
  const int c = static_cast<int>(cuts.size());
  if (c <= max_thresholds) return cuts;
  if (max_thresholds == 1) return {cuts[(c - 1) / 2]};
  std::vector<int> picked(max_thresholds);
  for (int k = 0; k < max_thresholds; ++k)
    picked[k] = cuts[static_cast<size_t>(static_cast<long>(k) * (c - 1) / (max_thresholds - 1))];
  return picked;
}

namespace {

struct FeatureBest {
  bool found = false;
  double threshold = 0.0;
  double gain = 0.0;
};

// Best cut for one feature: prefix-sum walk over the node's individuals
// in ascending feature order, scoring each candidate boundary.
FeatureBest best_cut_for_feature(const std::vector<int>& node_idx, const MatrixXd& features, int feature,
                                 const std::vector<ArrayXd>& g, const std::vector<ArrayXd>& h, const ArrayXd& gsum,
                                 const ArrayXd& hsum, double parent_score, const ArrayXd& weights,
                                 const BoostConfig& config) {
  const int n = static_cast<int>(node_idx.size());
  std::vector<std::pair<double, int>> order(n);
  for (int i = 0; i < n; ++i) order[i] = {features(node_idx[i], feature), node_idx[i]};
  std::sort(order.begin(), order.end());

  std::vector<double> sorted_values(n);
  for (int i = 0; i < n; ++i) sorted_values[i] = order[i].first;
  const std::vector<int> cuts = candidate_cuts(sorted_values, config.max_thresholds);

  FeatureBest best;
  if (cuts.empty()) return best;

  const int m = static_cast<int>(gsum.size());
  ArrayXd g_left = ArrayXd::Zero(m);
  ArrayXd h_left = ArrayXd::Zero(m);
  size_t next_cut = 0;
  for (int i = 0; i < n && next_cut < cuts.size(); ++i) {
    g_left += g[order[i].second];
    h_left += h[order[i].second];
    if (i != cuts[next_cut]) continue;
    ++next_cut;
    const int n_left = i + 1;
    if (n_left < config.min_leaf || n - n_left < config.min_leaf) continue;
    const double left_score = score_arrays(g_left, h_left, config.gamma2, weights);
    const double right_score = score_arrays(gsum - g_left, hsum - h_left, config.gamma2, weights);
    const double gain = split_gain_g1(parent_score, left_score, right_score, config.gamma1);
    if (!best.found || gain > best.gain) {
      best.found = true;
      best.gain = gain;
      best.threshold = 0.5 * (sorted_values[i] + sorted_values[i + 1]);
    }
  }
  return best;
}

void accumulate_sums(const std::vector<int>& idx, const std::vector<ArrayXd>& g, const std::vector<ArrayXd>& h,
                     ArrayXd& gsum, ArrayXd& hsum) {
  gsum.setZero();
  hsum.setZero();
  for (int i : idx) {
    gsum += g[i];
    hsum += h[i];
  }
}

}  // namespace

std::optional<BestSplit> find_best_split(const std::vector<int>& node_individuals, const MatrixXd& features,
                                         const std::vector<ArrayXd>& g, const std::vector<ArrayXd>& h,
                                         const TimeGrid& grid, const BoostConfig& config) {
  const int n = static_cast<int>(node_individuals.size());
  if (n < 2 * config.min_leaf) return std::nullopt;
  const int p = static_cast<int>(features.cols());
  const int m = grid.m;

  ArrayXd gsum(m), hsum(m);
  accumulate_sums(node_individuals, g, h, gsum, hsum);
  const ArrayXd weights = quad_weights(grid, m);
  const double parent_score = score_arrays(gsum, hsum, config.gamma2, weights);

  std::vector<FeatureBest> per_feature(p);
  parallel_for(p, config.n_threads, [&](int f) {
    per_feature[f] =
        best_cut_for_feature(node_individuals, features, f, g, h, gsum, hsum, parent_score, weights, config);
  });

  std::optional<BestSplit> best;
  for (int f = 0; f < p; ++f) {
    if (!per_feature[f].found) continue;
    if (!best || per_feature[f].gain > best->gain)
      best = BestSplit{SplitRule{f, per_feature[f].threshold}, per_feature[f].gain};
  }
  if (best && best->gain > 0.0) return best;
  return std::nullopt;
}

namespace {

struct BuildNode {
  int node_id;
  std::vector<int> idx;
  ArrayXd gsum, hsum;
};

}  // namespace

Tree grow_tree(const std::vector<int>& individuals, const MatrixXd& features, const std::vector<ArrayXd>& g,
               const std::vector<ArrayXd>& h, const TimeGrid& grid, const BoostConfig& config) {
  const int m = grid.m;
  Tree tree;

  auto make_node = [&](std::vector<int> idx) {
    BuildNode b;
    b.node_id = static_cast<int>(tree.nodes.size());
    b.idx = std::move(idx);
    b.gsum.resize(m);
    b.hsum.resize(m);
    accumulate_sums(b.idx, g, h, b.gsum, b.hsum);
    TreeNode node;
    node.leaf_values = config.eta * optimal_leaf_values(b.gsum, b.hsum, config.gamma2);
    tree.nodes.push_back(std::move(node));
    return b;
  };

  std::vector<BuildNode> active;
  active.push_back(make_node(individuals));

  while (tree.n_leaves() < config.d_max && !active.empty()) {
    std::vector<BuildNode> next;
    bool any_split = false;
    for (auto& b : active) {
      const auto best = find_best_split(b.idx, features, g, h, grid, config);
      if (!best) continue;
      any_split = true;
      std::vector<int> left_idx, right_idx;
      for (int i : b.idx)
        (features(i, best->rule.feature) <= best->rule.threshold ? left_idx : right_idx).push_back(i);
      BuildNode left = make_node(std::move(left_idx));
      BuildNode right = make_node(std::move(right_idx));
      TreeNode& node = tree.nodes[b.node_id];
      node.feature = best->rule.feature;
      node.threshold = best->rule.threshold;
      node.gain = best->gain;
      node.left = left.node_id;
      node.right = right.node_id;
      node.leaf_values.resize(0);
      next.push_back(std::move(left));
      next.push_back(std::move(right));
    }
    if (!any_split) break;
    active = std::move(next);
  }
  return tree;
}

namespace {

double total_loss(const std::vector<Curve>& mu_tilde, const std::vector<ArrayXd>& mu_hat) {
  double loss = 0.0;
  for (size_t i = 0; i < mu_tilde.size(); ++i) {
    Curve diff{mu_tilde[i].grid, mu_hat[i] - mu_tilde[i].values, mu_tilde[i].n_obs};
    loss += 0.5 * curve_integral(diff, diff);
  }
  return loss;
}

}  // namespace

EnsembleStatic fit_static(const Dataset& data, const BoostConfig& config, FitTrace* trace) {
  data.validate();
  config.validate();
  const int n = data.size();
  const int m = data.grid.m;

  const MatrixXd X = data.feature_matrix();
  std::vector<Curve> mu_tilde(n);
  std::vector<ArrayXd> mu_hat(n, ArrayXd::Zero(m));
  for (int i = 0; i < n; ++i) mu_tilde[i] = empirical_mcf(data.individuals[i].events, data.grid);

  std::vector<int> all_idx(n);
  for (int i = 0; i < n; ++i) all_idx[i] = i;

  EnsembleStatic ens;
  ens.grid = data.grid;
  ens.config = config;
  ens.p = data.p;
  ens.importance_raw = VectorXd::Zero(data.p);

  if (trace) {
    trace->loss.clear();
    trace->leaf_counts.clear();
    trace->loss.push_back(total_loss(mu_tilde, mu_hat));
  }

  std::vector<ArrayXd> g(n), h(n);
  for (int k = 0; k < config.K; ++k) {
    for (int i = 0; i < n; ++i) {
      auto [gi, hi] = gradients(mu_tilde[i], Curve{data.grid, mu_hat[i], mu_tilde[i].n_obs});
      g[i] = std::move(gi.values);
      h[i] = std::move(hi.values);
    }
    Tree tree = grow_tree(all_idx, X, g, h, data.grid, config);
    for (int i = 0; i < n; ++i) mu_hat[i] += tree.nodes[tree.route(data.individuals[i].x)].leaf_values;
    for (const auto& node : tree.nodes)
      if (!node.is_leaf()) ens.importance_raw[node.feature] += node.gain;
    if (trace) {
      trace->leaf_counts.push_back(tree.n_leaves());
      trace->loss.push_back(total_loss(mu_tilde, mu_hat));
    }
    ens.trees.push_back(std::move(tree));
  }
  return ens;
}

Curve EnsembleStatic::predict(const VectorXd& x) const {
  if (x.size() != p) throw std::invalid_argument("predict: expected " + std::to_string(p) + " features");
  Curve out = zero_curve(grid);
  for (const auto& tree : trees) out.values += tree.nodes[tree.route(x)].leaf_values;
  return out;
}

double interp_at(const Curve& c, double t) {
  const int m = c.grid.m;
  const double d = c.grid.delta();
  if (t <= 0.0) return 0.0;
  if (t >= c.grid.t_max) return c.values[m - 1];
  // Curves are anchored at (0, 0); grid point j sits at t(j).
  const int j = static_cast<int>(std::ceil(t / d)) - 1;
  const int jc = std::clamp(j, 0, m - 1);
  const double t_hi = c.grid.t(jc);
  const double t_lo = t_hi - d;
  const double v_lo = (jc == 0) ? 0.0 : c.values[jc - 1];
  const double frac = (t - t_lo) / d;
  return v_lo + frac * (c.values[jc] - v_lo);
}

double extrapolate_at(const Curve& c, double t) {
  const int m = c.grid.m;
  const double slope = (c.values[m - 1] - c.values[m - 2]) / c.grid.delta();
  return c.values[m - 1] + slope * (t - c.grid.t_max);
}

double EnsembleStatic::predict_at(const VectorXd& x, double t) const {
  const Curve c = predict(x);
  return (t <= grid.t_max) ? interp_at(c, t) : extrapolate_at(c, t);
}

VectorXd standardize_importance(const VectorXd& raw) {
  const double lo = raw.minCoeff();
  const double hi = raw.maxCoeff();
  if (!(hi > lo)) return VectorXd::Zero(raw.size());
  return (raw.array() - lo) / (hi - lo);
}

VectorXd feature_importance(const EnsembleStatic& ensemble, bool standardize) {
  const double k = static_cast<double>(ensemble.config.K);
  VectorXd raw = ensemble.importance_raw / (k * k);
  return standardize ? standardize_importance(raw) : raw;
}

Curve clamp_nonneg(const Curve& c) { return Curve{c.grid, c.values.max(0.0), c.n_obs}; }

}  // namespace boostr

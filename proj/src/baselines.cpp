#include "boostr/baselines.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "boostr/parallel.hpp"
#include "boostr/rng.hpp"

namespace boostr {

Curve pooled_mcf(const Dataset& train) {
  if (train.individuals.empty()) throw std::invalid_argument("pooled_mcf: empty training set");
  std::vector<double> events;
  std::vector<double> censors;
  censors.reserve(train.size());
  for (const auto& ind : train.individuals) {
    events.insert(events.end(), ind.events.times.begin(), ind.events.times.end());
    censors.push_back(ind.events.censor);
  }
  std::sort(events.begin(), events.end());
  std::sort(censors.begin(), censors.end());

  // Y(s) = #{i : c_i >= s}.
  auto at_risk = [&](double s) {
    return static_cast<double>(censors.end() - std::lower_bound(censors.begin(), censors.end(), s));
  };

  Curve out = zero_curve(train.grid);
  double acc = 0.0;
  size_t e = 0;
  for (int j = 0; j < train.grid.m; ++j) {
    const double tj = train.grid.t(j);
    while (e < events.size() && events[e] <= tj) {
      acc += 1.0 / at_risk(events[e]);
      ++e;
    }
    out.values[j] = acc;
  }
  return out;
}

Curve mcf_knn(const Dataset& train, const VectorXd& x_query, int k) {
  if (k < 1) throw std::invalid_argument("mcf_knn: k must be >= 1");
  if (k > train.size()) throw std::invalid_argument("mcf_knn: k exceeds training size");
  std::vector<std::tuple<double, std::string, int>> dist(train.size());
  for (int i = 0; i < train.size(); ++i)
    dist[i] = {(train.individuals[i].x - x_query).norm(), train.individuals[i].id, i};
  std::sort(dist.begin(), dist.end());  // distance ties resolve by id
  std::vector<int> picked(k);
  for (int i = 0; i < k; ++i) picked[i] = std::get<2>(dist[i]);
  return pooled_mcf(train.subset(picked));
}

double HppLoglinear::rate(const VectorXd& x) const {
  double eta = beta[0];
  for (int j = 0; j < x.size(); ++j) eta += beta[j + 1] * x[j];
  return std::exp(eta);
}

Curve HppLoglinear::predict(const VectorXd& x, const TimeGrid& grid) const {
  Curve out = zero_curve(grid);
  const double lam = rate(x);
  for (int j = 0; j < grid.m; ++j) out.values[j] = lam * grid.t(j);
  return out;
}

HppLoglinear hpp_loglinear_fit(const Dataset& train) {
  const int n = train.size();
  const int d = train.p + 1;
  MatrixXd design(n, d);
  VectorXd counts(n), exposure(n);
  for (int i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design.row(i).tail(train.p) = train.individuals[i].x.transpose();
    counts[i] = static_cast<double>(train.individuals[i].events.times.size());
    exposure[i] = train.individuals[i].events.censor;
  }

  VectorXd beta = VectorXd::Zero(d);
  // Intercept at the closed-form featureless MLE keeps early steps tame.
  const double total_events = counts.sum();
  const double total_exposure = exposure.sum();
  beta[0] = std::log(std::max(total_events, 0.5) / total_exposure);

  auto loglik = [&](const VectorXd& b) {
    const VectorXd eta = design * b;
    double ll = 0.0;
    for (int i = 0; i < n; ++i) ll += counts[i] * eta[i] - exposure[i] * std::exp(eta[i]);
    return ll;
  };

  double ll = loglik(beta);
  for (int iter = 0; iter < 100; ++iter) {
    const VectorXd mu = (design * beta).array().exp().matrix().cwiseProduct(exposure);
    const VectorXd grad = design.transpose() * (counts - mu);
    if (grad.lpNorm<Eigen::Infinity>() < 1e-8) return HppLoglinear{beta};
    MatrixXd hess = design.transpose() * mu.asDiagonal() * design;
    Eigen::LDLT<MatrixXd> ldlt(hess);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      hess += 1e-6 * MatrixXd::Identity(d, d);
      ldlt.compute(hess);
    }
    VectorXd step = ldlt.solve(grad);
    // Halve the step until the likelihood improves.
    double scale = 1.0;
    for (int half = 0; half < 40; ++half) {
      const VectorXd trial = beta + scale * step;
      const double trial_ll = loglik(trial);
      if (trial_ll >= ll - 1e-12) {
        beta = trial;
        ll = trial_ll;
        break;
      }
      scale *= 0.5;
    }
  }
  const VectorXd mu = (design * beta).array().exp().matrix().cwiseProduct(exposure);
  if ((design.transpose() * (counts - mu)).lpNorm<Eigen::Infinity>() < 1e-8) return HppLoglinear{beta};
  throw numeric_error("hpp_loglinear_fit: Newton did not converge in 100 iterations");
}

// ---------------------------------------------------------------------------
// Time-as-feature booster: plain squared-error boosting over (x, t) rows.

namespace {

struct ScalarBest {
  bool found = false;
  double threshold = 0.0;
  double gain = 0.0;
};

double scalar_score(double gsum, double hsum, double gamma2) {
  const double denom = hsum + gamma2;
  return denom > 0.0 ? -0.5 * gsum * gsum / denom : 0.0;
}

ScalarBest scalar_best_cut(const std::vector<int>& rows, const MatrixXd& features, int feature,
                           const std::vector<double>& g, double gsum, double parent_score, const BoostConfig& config) {
  const int n = static_cast<int>(rows.size());
  std::vector<std::pair<double, int>> order(n);
  for (int i = 0; i < n; ++i) order[i] = {features(rows[i], feature), rows[i]};
  std::sort(order.begin(), order.end());
  std::vector<double> sorted_values(n);
  for (int i = 0; i < n; ++i) sorted_values[i] = order[i].first;
  const auto cuts = candidate_cuts(sorted_values, config.max_thresholds);

  ScalarBest best;
  double g_left = 0.0;
  size_t next_cut = 0;
  for (int i = 0; i < n && next_cut < cuts.size(); ++i) {
    g_left += g[order[i].second];
    if (i != cuts[next_cut]) continue;
    ++next_cut;
    const int n_left = i + 1;
    if (n_left < config.min_leaf || n - n_left < config.min_leaf) continue;
    const double left = scalar_score(g_left, n_left, config.gamma2);
    const double right = scalar_score(gsum - g_left, n - n_left, config.gamma2);
    const double gain = parent_score - left - right - config.gamma1;
    if (!best.found || gain > best.gain) {
      best.found = true;
      best.gain = gain;
      best.threshold = 0.5 * (sorted_values[i] + sorted_values[i + 1]);
    }
  }
  return best;
}

Tree grow_scalar_tree(const std::vector<int>& rows, const MatrixXd& features, const std::vector<double>& g,
                      const BoostConfig& config) {
  Tree tree;
  struct Build {
    int node_id;
    std::vector<int> rows;
    double gsum;
  };
  auto make_node = [&](std::vector<int> idx) {
    Build b;
    b.node_id = static_cast<int>(tree.nodes.size());
    b.gsum = 0.0;
    for (int r : idx) b.gsum += g[r];
    b.rows = std::move(idx);
    TreeNode node;
    const double denom = static_cast<double>(b.rows.size()) + config.gamma2;
    node.leaf_values = ArrayXd::Constant(1, config.eta * (denom > 0.0 ? -b.gsum / denom : 0.0));
    tree.nodes.push_back(std::move(node));
    return b;
  };

  std::vector<Build> active;
  active.push_back(make_node(rows));
  while (tree.n_leaves() < config.d_max && !active.empty()) {
    std::vector<Build> next;
    bool any = false;
    for (auto& b : active) {
      const int n = static_cast<int>(b.rows.size());
      if (n < 2 * config.min_leaf) continue;
      const double parent_score = scalar_score(b.gsum, n, config.gamma2);
      ScalarBest best;
      int best_feature = -1;
      for (int f = 0; f < features.cols(); ++f) {
        const auto cand = scalar_best_cut(b.rows, features, f, g, b.gsum, parent_score, config);
        if (cand.found && (!best.found || cand.gain > best.gain)) {
          best = cand;
          best_feature = f;
        }
      }
      if (!best.found || best.gain <= 0.0) continue;
      any = true;
      std::vector<int> left_rows, right_rows;
      for (int r : b.rows) (features(r, best_feature) <= best.threshold ? left_rows : right_rows).push_back(r);
      Build left = make_node(std::move(left_rows));
      Build right = make_node(std::move(right_rows));
      TreeNode& node = tree.nodes[b.node_id];
      node.feature = best_feature;
      node.threshold = best.threshold;
      node.gain = best.gain;
      node.left = left.node_id;
      node.right = right.node_id;
      node.leaf_values.resize(0);
      next.push_back(std::move(left));
      next.push_back(std::move(right));
    }
    if (!any) break;
    active = std::move(next);
  }
  return tree;
}

}  // namespace

TimeFeatureBooster time_feature_booster_fit(const Dataset& train, const BoostConfig& config) {
  train.validate();
  config.validate();
  const int m = train.grid.m;

  // One row per observed (individual, grid point) pair.
  std::vector<double> target;
  int n_rows = 0;
  for (int i = 0; i < train.size(); ++i) {
    const Curve mcf = empirical_mcf(train.individuals[i].events, train.grid);
    for (int j = 0; j < mcf.n_obs; ++j) target.push_back(mcf.values[j]);
    n_rows += mcf.n_obs;
  }
  MatrixXd features(n_rows, train.p + 1);
  int r = 0;
  for (int i = 0; i < train.size(); ++i) {
    const int n_obs = empirical_mcf(train.individuals[i].events, train.grid).n_obs;
    for (int j = 0; j < n_obs; ++j, ++r) {
      features.row(r).head(train.p) = train.individuals[i].x.transpose();
      features(r, train.p) = train.grid.t(j);
    }
  }

  std::vector<int> all_rows(n_rows);
  std::iota(all_rows.begin(), all_rows.end(), 0);
  std::vector<double> pred(n_rows, 0.0), g(n_rows);

  TimeFeatureBooster model;
  model.grid = train.grid;
  model.p = train.p;
  for (int k = 0; k < config.K; ++k) {
    for (int i = 0; i < n_rows; ++i) g[i] = pred[i] - target[i];
    Tree tree = grow_scalar_tree(all_rows, features, g, config);
    for (int i = 0; i < n_rows; ++i) {
      VectorXd xrow = features.row(i).transpose();
      pred[i] += tree.nodes[tree.route(xrow)].leaf_values[0];
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

double TimeFeatureBooster::predict_value(const VectorXd& x, double t) const {
  VectorXd row(p + 1);
  row.head(p) = x;
  row[p] = t;
  double out = 0.0;
  for (const auto& tree : trees) out += tree.nodes[tree.route(row)].leaf_values[0];
  return out;
}

Curve TimeFeatureBooster::predict(const VectorXd& x) const {
  Curve out = zero_curve(grid);
  for (int j = 0; j < grid.m; ++j) out.values[j] = predict_value(x, grid.t(j));
  return out;
}

// ---------------------------------------------------------------------------
// Metrics.

double c_index(const std::vector<double>& predicted, const std::vector<double>& observed) {
  if (predicted.size() != observed.size()) throw std::invalid_argument("c_index: length mismatch");
  const int n = static_cast<int>(predicted.size());
  double score = 0.0;
  long pairs = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (observed[i] == observed[j]) continue;
      ++pairs;
      const bool obs_up = observed[i] < observed[j];
      if (predicted[i] == predicted[j])
        score += 0.5;
      else if ((predicted[i] < predicted[j]) == obs_up)
        score += 1.0;
    }
  }
  if (pairs == 0) throw numeric_error("c_index: no pair with distinct observed counts");
  return score / static_cast<double>(pairs);
}

double l2_distance(const Curve& a, const Curve& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("l2_distance: grid mismatch");
  Curve diff{a.grid, a.values - b.values, std::min(a.n_obs, b.n_obs)};
  return curve_integral(diff, diff);
}

double mse_counts(const std::vector<double>& predicted, const std::vector<double>& observed) {
  if (predicted.size() != observed.size() || predicted.empty())
    throw std::invalid_argument("mse_counts: bad input lengths");
  double acc = 0.0;
  for (size_t i = 0; i < predicted.size(); ++i) acc += (predicted[i] - observed[i]) * (predicted[i] - observed[i]);
  return acc / static_cast<double>(predicted.size());
}

// ---------------------------------------------------------------------------
// Cross-validation.

double Predictor::predict_value(const Individual& ind, double t) const {
  const Curve c = predict_curve(ind);
  return (t <= c.grid.t_max) ? interp_at(c, t) : extrapolate_at(c, t);
}

namespace {

class BoostrPredictor : public Predictor {
 public:
  explicit BoostrPredictor(EnsembleStatic ens) : ens_(std::move(ens)) {}
  Curve predict_curve(const Individual& ind) const override { return ens_.predict(ind.x); }
  double predict_value(const Individual& ind, double t) const override { return ens_.predict_at(ind.x, t); }

 private:
  EnsembleStatic ens_;
};

class PooledMcfPredictor : public Predictor {
 public:
  explicit PooledMcfPredictor(Curve c) : curve_(std::move(c)) {}
  Curve predict_curve(const Individual&) const override { return curve_; }

 private:
  Curve curve_;
};

class McfKnnPredictor : public Predictor {
 public:
  McfKnnPredictor(Dataset train, int k) : train_(std::move(train)), k_(k) {}
  Curve predict_curve(const Individual& ind) const override { return mcf_knn(train_, ind.x, k_); }

 private:
  Dataset train_;
  int k_;
};

class HppPredictor : public Predictor {
 public:
  HppPredictor(HppLoglinear model, TimeGrid grid) : model_(std::move(model)), grid_(grid) {}
  Curve predict_curve(const Individual& ind) const override { return model_.predict(ind.x, grid_); }
  double predict_value(const Individual& ind, double t) const override { return model_.rate(ind.x) * t; }

 private:
  HppLoglinear model_;
  TimeGrid grid_;
};

class TimeFeaturePredictor : public Predictor {
 public:
  explicit TimeFeaturePredictor(TimeFeatureBooster model) : model_(std::move(model)) {}
  Curve predict_curve(const Individual& ind) const override { return model_.predict(ind.x); }
  double predict_value(const Individual& ind, double t) const override { return model_.predict_value(ind.x, t); }

 private:
  TimeFeatureBooster model_;
};

}  // namespace

FitMethod make_boostr_method(const BoostConfig& config) {
  return [config](const Dataset& train) -> std::unique_ptr<Predictor> {
    return std::make_unique<BoostrPredictor>(fit_static(train, config));
  };
}

FitMethod make_pooled_mcf_method() {
  return [](const Dataset& train) -> std::unique_ptr<Predictor> {
    return std::make_unique<PooledMcfPredictor>(pooled_mcf(train));
  };
}

FitMethod make_mcf_knn_method(int k) {
  return [k](const Dataset& train) -> std::unique_ptr<Predictor> {
    return std::make_unique<McfKnnPredictor>(train, std::min(k, train.size()));
  };
}

FitMethod make_hpp_method() {
  return [](const Dataset& train) -> std::unique_ptr<Predictor> {
    return std::make_unique<HppPredictor>(hpp_loglinear_fit(train), train.grid);
  };
}

FitMethod make_time_feature_method(const BoostConfig& config) {
  return [config](const Dataset& train) -> std::unique_ptr<Predictor> {
    return std::make_unique<TimeFeaturePredictor>(time_feature_booster_fit(train, config));
  };
}

Summary summarize(std::vector<double> values) {
  Summary s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  const auto q = [&](double p) {
    const double pos = p * (static_cast<double>(values.size()) - 1.0);
    const auto lo = static_cast<size_t>(std::floor(pos));
    const auto hi = static_cast<size_t>(std::ceil(pos));
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  s.q1 = q(0.25);
  s.median = q(0.5);
  s.q3 = q(0.75);
  s.lo = values.front();
  s.hi = values.back();
  return s;
}

MetricReport cross_validate(const Dataset& data, const FitMethod& method, int train_n, int test_n, int reps,
                            uint64_t seed, double t_eval, int n_threads) {
  data.validate();
  if (train_n + test_n > data.size()) throw std::invalid_argument("cross_validate: split larger than dataset");
  if (reps < 1) throw std::invalid_argument("cross_validate: reps must be >= 1");
  if (t_eval < 0.0) {
    t_eval = data.individuals.front().events.censor;
    for (const auto& ind : data.individuals) t_eval = std::min(t_eval, ind.events.censor);
  }

  MetricReport report;
  report.c_index_reps.resize(reps);
  report.l2_reps.resize(reps);
  report.mse_reps.resize(reps);

  // Split assignments are keyed to ids, not file positions, so the report
  // does not depend on the input row order.
  std::vector<int> canonical(data.size());
  std::iota(canonical.begin(), canonical.end(), 0);
  std::sort(canonical.begin(), canonical.end(),
            [&](int a, int b) { return data.individuals[a].id < data.individuals[b].id; });

  const double t_eval_final = t_eval;
  parallel_for(reps, n_threads, [&](int rep) {
    Rng rng = Rng::substream(seed, 100, rep);
    std::vector<int> perm = canonical;
    for (int i = data.size() - 1; i > 0; --i)
      std::swap(perm[i], perm[static_cast<int>(rng.integer(static_cast<uint64_t>(i) + 1))]);

    std::vector<int> train_idx(perm.begin(), perm.begin() + train_n);
    std::vector<int> test_idx(perm.begin() + train_n, perm.begin() + train_n + test_n);
    const Dataset train = data.subset(train_idx);
    const auto model = method(train);

    std::vector<double> pred, obs;
    double l2_acc = 0.0;
    for (int i : test_idx) {
      const Individual& ind = data.individuals[i];
      const Curve fitted = model->predict_curve(ind);
      l2_acc += l2_distance(fitted, empirical_mcf(ind.events, data.grid));
      if (ind.events.censor >= t_eval_final) {
        pred.push_back(model->predict_value(ind, t_eval_final));
        obs.push_back(static_cast<double>(ind.events.count_at(t_eval_final)));
      }
    }
    report.c_index_reps[rep] = c_index(pred, obs);
    report.l2_reps[rep] = l2_acc / static_cast<double>(test_idx.size());
    report.mse_reps[rep] = mse_counts(pred, obs);
  });
  return report;
}

LhdDesign lhd_sample(std::pair<double, double> gamma1_range, std::pair<double, double> gamma2_range, int n_runs,
                     uint64_t seed) {
  if (n_runs < 2) throw std::invalid_argument("lhd_sample: need at least 2 runs");
  Rng rng(seed);
  MatrixXd best;
  double best_score = -1.0;
  for (int trial = 0; trial < 200; ++trial) {
    MatrixXd unit(n_runs, 2);
    for (int dim = 0; dim < 2; ++dim) {
      std::vector<int> perm(n_runs);
      std::iota(perm.begin(), perm.end(), 0);
      for (int i = n_runs - 1; i > 0; --i)
        std::swap(perm[i], perm[static_cast<int>(rng.integer(static_cast<uint64_t>(i) + 1))]);
      for (int i = 0; i < n_runs; ++i) unit(i, dim) = (perm[i] + rng.uniform()) / n_runs;
    }
    double min_dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_runs; ++i)
      for (int j = i + 1; j < n_runs; ++j) min_dist = std::min(min_dist, (unit.row(i) - unit.row(j)).norm());
    if (min_dist > best_score) {
      best_score = min_dist;
      best = unit;
    }
  }
  LhdDesign design;
  design.ranges = {gamma1_range, gamma2_range};
  design.points.resize(n_runs, 2);
  for (int i = 0; i < n_runs; ++i) {
    design.points(i, 0) = gamma1_range.first + best(i, 0) * (gamma1_range.second - gamma1_range.first);
    design.points(i, 1) = gamma2_range.first + best(i, 1) * (gamma2_range.second - gamma2_range.first);
  }
  return design;
}

std::vector<TuneRun> tune(const Dataset& data, const LhdDesign& design, const BoostConfig& base) {
  std::vector<TuneRun> runs;
  runs.reserve(design.points.rows());
  for (int r = 0; r < design.points.rows(); ++r) {
    BoostConfig config = base;
    config.gamma1 = design.points(r, 0);
    config.gamma2 = design.points(r, 1);
    FitTrace trace;
    fit_static(data, config, &trace);
    std::vector<double> leaves(trace.leaf_counts.begin(), trace.leaf_counts.end());
    TuneRun run;
    run.gamma1 = config.gamma1;
    run.gamma2 = config.gamma2;
    run.leaves_per_tree = summarize(leaves);
    run.in_target_band = run.leaves_per_tree.median >= 4.0 && run.leaves_per_tree.median <= 8.0;
    runs.push_back(run);
  }
  return runs;
}

}  // namespace boostr

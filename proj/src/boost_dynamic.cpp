#include "boostr/boost_dynamic.hpp"

#include <algorithm>
#include <cmath>

#include "boostr/parallel.hpp"

namespace boostr {

double quadratic_value(const NodeQuadratic& q, const VectorXd& beta) {
  return q.b.dot(beta) + 0.5 * beta.dot(q.A * beta);
}

namespace {

double penalized_objective(const NodeQuadratic& q, const VectorXd& beta, double gamma2, int n_groups) {
  const int gs = q.size() / n_groups;
  double norms = 0.0;
  for (int l = 0; l < n_groups; ++l) norms += beta.segment(l * gs, gs).norm();
  return quadratic_value(q, beta) + 0.5 * gamma2 * norms;
}

// Largest eigenvalue by power iteration; deterministic start.
double lambda_max_estimate(const MatrixXd& a, int iters) {
  VectorXd x = VectorXd::Ones(a.rows()).normalized();
  for (int i = 0; i < iters; ++i) {
    VectorXd y = a * x;
    const double norm = y.norm();
    if (norm <= 0.0) return 0.0;
    x = y / norm;
  }
  return x.dot(a * x);
}

bool is_scaled_identity(const MatrixXd& block, double& scale) {
  scale = block(0, 0);
  const double tol = 1e-12 * std::max(1.0, std::abs(scale));
  for (int i = 0; i < block.rows(); ++i) {
    for (int j = 0; j < block.cols(); ++j) {
      const double want = (i == j) ? scale : 0.0;
      if (std::abs(block(i, j) - want) > tol) return false;
    }
  }
  return true;
}

}  // namespace

namespace {

double kkt_residual_at(const NodeQuadratic& q, const VectorXd& beta, double thresh, int n_groups) {
  const int gs = q.size() / n_groups;
  const VectorXd grad = q.b + q.A * beta;
  double kkt = 0.0;
  for (int l = 0; l < n_groups; ++l) {
    const VectorXd block_beta = beta.segment(l * gs, gs);
    const VectorXd block_grad = grad.segment(l * gs, gs);
    const double nrm = block_beta.norm();
    if (nrm > 0.0)
      kkt = std::max(kkt, (block_grad + thresh * block_beta / nrm).norm());
    else
      kkt = std::max(kkt, std::max(0.0, block_grad.norm() - thresh));
  }
  return kkt;
}

}  // namespace

GroupLassoResult group_lasso_fit(const NodeQuadratic& q, double gamma2, int n_groups, const VectorXd* warm_start,
                                 const GroupLassoOptions& opts) {
  const int s = q.size();
  if (n_groups < 1 || s % n_groups != 0) throw std::invalid_argument("group_lasso_fit: bad group structure");
  if (q.A.rows() != s || q.A.cols() != s) throw std::invalid_argument("group_lasso_fit: dimension mismatch");
  const int gs = s / n_groups;
  const double thresh = 0.5 * gamma2;

  GroupLassoResult res;
  res.beta = (warm_start && warm_start->size() == s) ? *warm_start : VectorXd::Zero(s);

  // Per-block Lipschitz bounds; the power-iteration estimate approaches
  // lambda_max from below, so it gets a small safety margin.
  std::vector<double> lipschitz(n_groups, 0.0);
  std::vector<char> identity_block(n_groups, 0);
  std::vector<double> identity_scale(n_groups, 0.0);
  for (int l = 0; l < n_groups; ++l) {
    const MatrixXd block = q.A.block(l * gs, l * gs, gs, gs);
    double scale = 0.0;
    if (opts.identity_fastpath && is_scaled_identity(block, scale)) {
      identity_block[l] = 1;
      identity_scale[l] = scale;
    } else {
      lipschitz[l] = 1.05 * lambda_max_estimate(block, opts.power_iters);
    }
  }

  double obj = penalized_objective(q, res.beta, gamma2, n_groups);
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (int l = 0; l < n_groups; ++l) {
      const auto seg = Eigen::seqN(l * gs, gs);
      const VectorXd old_block = res.beta(seg);
      const MatrixXd block = q.A(seg, seg);
      // Gradient contribution from everything except this block.
      const VectorXd r = q.b(seg) + (q.A(seg, Eigen::all) * res.beta) - block * old_block;

      auto prox_pass = [&](double lip) {
        VectorXd x = old_block;
        if (lip <= 0.0) return VectorXd(VectorXd::Zero(gs));
        const double step = 1.0 / lip;
        for (int it = 0; it < opts.prox_max_iters; ++it) {
          const VectorXd y = x - step * (r + block * x);
          const double ny = y.norm();
          VectorXd x_new = (ny > step * thresh) ? VectorXd((1.0 - step * thresh / ny) * y) : VectorXd::Zero(gs);
          const double change = (x_new - x).lpNorm<Eigen::Infinity>();
          x = x_new;
          if (change < 1e-13) break;
        }
        return x;
      };

      // Attempt the block update; on a (float-level or bad-step) uphill
      // move, halve the step and retry before keeping the old block.
      bool accepted = false;
      for (int attempt = 0; attempt < 4 && !accepted; ++attempt) {
        VectorXd candidate;
        if (identity_block[l]) {
          const double scale = identity_scale[l];
          if (scale <= 0.0) {
            candidate = VectorXd::Zero(gs);
          } else {
            const double nrm = r.norm();
            candidate = (nrm > thresh) ? VectorXd(-((nrm - thresh) / (scale * nrm)) * r) : VectorXd::Zero(gs);
          }
        } else {
          candidate = prox_pass(lipschitz[l] * (1 << attempt));
        }
        res.beta(seg) = candidate;
        const double new_obj = penalized_objective(q, res.beta, gamma2, n_groups);
        if (new_obj <= obj) {
          obj = new_obj;
          max_change = std::max(max_change, (candidate - old_block).lpNorm<Eigen::Infinity>());
          accepted = true;
        } else {
          res.beta(seg) = old_block;
        }
        if (identity_block[l]) break;  // exact update, nothing to retry
      }
    }
    res.objective.push_back(obj);
    res.sweeps = sweep + 1;
    if (max_change < opts.tol) {
      res.kkt_residual = kkt_residual_at(q, res.beta, thresh, n_groups);
      if (res.kkt_residual <= opts.kkt_tol) {
        res.converged = true;
        break;
      }
    }
  }
  res.kkt_residual = kkt_residual_at(q, res.beta, thresh, n_groups);
  return res;
}

NodeQuadratic assemble_quadratic(const std::vector<int>& node_individuals, const std::vector<ArrayXd>& g,
                                 const std::vector<ArrayXd>& h, const std::vector<IntegratedBasis>& phis,
                                 const TimeGrid& grid) {
  if (phis.empty()) throw std::invalid_argument("assemble_quadratic: no integrated bases");
  const int s = static_cast<int>(phis.front().phi.cols());
  NodeQuadratic q;
  q.A = MatrixXd::Zero(s, s);
  q.b = VectorXd::Zero(s);
  for (int i : node_individuals) {
    const MatrixXd& phi = phis[i].phi;
    if (phi.cols() != s) throw std::invalid_argument("assemble_quadratic: inconsistent basis width");
    // h is 1 on the observed prefix and 0 after, so its support sets the
    // per-individual integration range.
    int n_obs = 0;
    for (int j = static_cast<int>(h[i].size()); j > 0; --j) {
      if (h[i][j - 1] != 0.0) {
        n_obs = j;
        break;
      }
    }
    if (n_obs == 0) continue;
    const ArrayXd w = quad_weights(grid, n_obs);
    const MatrixXd top = phi.topRows(n_obs);
    q.A.noalias() += top.transpose() * (w * h[i].head(n_obs)).matrix().asDiagonal() * top;
    q.b.noalias() += top.transpose() * (w * g[i].head(n_obs)).matrix();
  }
  return q;
}

double split_gain_g2(double f2_parent, double f2_left, double f2_right, double gamma1) {
  return f2_parent - f2_left - f2_right - 2.0 * gamma1;
}

namespace {

struct DynNode {
  int node_id = 0;
  std::vector<int> idx;
  NodeQuadratic q;
  VectorXd beta;
  double f2 = 0.0;
};

struct DynSplitBest {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

// Per-individual quadratic blocks so node assembly and prefix walks are
// sums of precomputed pieces.
struct PerIndividualQuadratic {
  MatrixXd a;
  VectorXd b;
};

DynSplitBest dyn_best_cut_for_feature(const DynNode& node, const MatrixXd& features, int feature,
                                      const std::vector<PerIndividualQuadratic>& pieces, const BoostConfig& config,
                                      int n_groups, const GroupLassoOptions& solver_opts) {
  const int n = static_cast<int>(node.idx.size());
  std::vector<std::pair<double, int>> order(n);
  for (int i = 0; i < n; ++i) order[i] = {features(node.idx[i], feature), node.idx[i]};
  std::sort(order.begin(), order.end());
  std::vector<double> sorted_values(n);
  for (int i = 0; i < n; ++i) sorted_values[i] = order[i].first;
  const auto cuts = candidate_cuts(sorted_values, config.max_thresholds);

  DynSplitBest best;
  if (cuts.empty()) return best;

  const int s = node.q.size();
  NodeQuadratic left;
  left.A = MatrixXd::Zero(s, s);
  left.b = VectorXd::Zero(s);
  size_t next_cut = 0;
  for (int i = 0; i < n && next_cut < cuts.size(); ++i) {
    left.A += pieces[order[i].second].a;
    left.b += pieces[order[i].second].b;
    if (i != cuts[next_cut]) continue;
    ++next_cut;
    const int n_left = i + 1;
    if (n_left < config.min_leaf || n - n_left < config.min_leaf) continue;
    NodeQuadratic right;
    right.A = node.q.A - left.A;
    right.b = node.q.b - left.b;
    const auto fit_l = group_lasso_fit(left, config.gamma2, n_groups, &node.beta, solver_opts);
    const auto fit_r = group_lasso_fit(right, config.gamma2, n_groups, &node.beta, solver_opts);
    const double gain = split_gain_g2(node.f2, quadratic_value(left, fit_l.beta), quadratic_value(right, fit_r.beta),
                                      config.gamma1);
    if (!best.found || gain > best.gain) {
      best.found = true;
      best.feature = feature;
      best.threshold = 0.5 * (sorted_values[i] + sorted_values[i + 1]);
      best.gain = gain;
    }
  }
  return best;
}

}  // namespace

EnsembleDynamic fit_dynamic(const Dataset& data, const BoostConfig& config, int u, int v, FitTrace* trace) {
  data.validate();
  config.validate();
  if (data.q < 1) throw std::invalid_argument("fit_dynamic: dataset has no dynamic features");
  const int n = data.size();
  const int m = data.grid.m;
  const int q_features = data.q;

  EnsembleDynamic ens;
  ens.grid = data.grid;
  ens.config = config;
  ens.p = data.p;
  ens.q = q_features;
  ens.u = u;
  ens.v = v;
  ens.importance_raw = VectorXd::Zero(data.p);

  // Global bases from pooled samples keep leaf betas comparable across
  // the whole ensemble.
  for (int l = 0; l < q_features; ++l) {
    std::vector<double> pooled;
    for (const auto& ind : data.individuals)
      pooled.insert(pooled.end(), ind.z[l].values.begin(), ind.z[l].values.end());
    ens.bases.push_back(make_basis(pooled, u, v));
  }
  const int nb = ens.bases.front().n_basis();
  const int s = q_features * nb;
  const int n_groups = q_features;

  std::vector<IntegratedBasis> phis(n);
  for (int i = 0; i < n; ++i) {
    phis[i].phi.resize(m, s);
    for (int l = 0; l < q_features; ++l)
      phis[i].phi.middleCols(l * nb, nb) = integrate_basis(ens.bases[l], data.individuals[i].z[l], data.grid);
  }

  const MatrixXd X = data.feature_matrix();
  std::vector<Curve> mu_tilde(n);
  std::vector<ArrayXd> mu_hat(n, ArrayXd::Zero(m));
  for (int i = 0; i < n; ++i) mu_tilde[i] = empirical_mcf(data.individuals[i].events, data.grid);

  // A blocks depend only on the observation masks; b blocks change with
  // the residuals every boosting round.
  std::vector<PerIndividualQuadratic> pieces(n);
  for (int i = 0; i < n; ++i) {
    const int n_obs = mu_tilde[i].n_obs;
    const ArrayXd w = quad_weights(data.grid, n_obs);
    const MatrixXd top = phis[i].phi.topRows(n_obs);
    pieces[i].a = top.transpose() * w.matrix().asDiagonal() * top;
    pieces[i].b = VectorXd::Zero(s);
  }

  GroupLassoOptions solver_opts;

  auto total_loss = [&]() {
    double loss = 0.0;
    for (int i = 0; i < n; ++i) {
      Curve diff{data.grid, mu_hat[i] - mu_tilde[i].values, mu_tilde[i].n_obs};
      loss += 0.5 * curve_integral(diff, diff);
    }
    return loss;
  };
  if (trace) {
    trace->loss.clear();
    trace->leaf_counts.clear();
    trace->loss.push_back(total_loss());
  }

  std::vector<int> all_idx(n);
  for (int i = 0; i < n; ++i) all_idx[i] = i;
  std::vector<ArrayXd> g(n), h(n);

  for (int k = 0; k < config.K; ++k) {
    for (int i = 0; i < n; ++i) {
      auto [gi, hi] = gradients(mu_tilde[i], Curve{data.grid, mu_hat[i], mu_tilde[i].n_obs});
      g[i] = std::move(gi.values);
      h[i] = std::move(hi.values);
      const int n_obs = mu_tilde[i].n_obs;
      const ArrayXd w = quad_weights(data.grid, n_obs);
      pieces[i].b = phis[i].phi.topRows(n_obs).transpose() * (w * g[i].head(n_obs)).matrix();
    }

    Tree tree;
    std::vector<DynNode> active;
    auto make_node = [&](std::vector<int> idx, const VectorXd* warm) {
      DynNode b;
      b.node_id = static_cast<int>(tree.nodes.size());
      b.q.A = MatrixXd::Zero(s, s);
      b.q.b = VectorXd::Zero(s);
      for (int i : idx) {
        b.q.A += pieces[i].a;
        b.q.b += pieces[i].b;
      }
      b.idx = std::move(idx);
      const auto fit = group_lasso_fit(b.q, config.gamma2, n_groups, warm, solver_opts);
      b.beta = fit.beta;
      b.f2 = quadratic_value(b.q, b.beta);
      TreeNode node;
      node.beta = MatrixXd(nb, q_features);
      for (int l = 0; l < q_features; ++l) node.beta.col(l) = config.eta * b.beta.segment(l * nb, nb);
      tree.nodes.push_back(std::move(node));
      return b;
    };
    active.push_back(make_node(all_idx, nullptr));

    while (tree.n_leaves() < config.d_max && !active.empty()) {
      std::vector<DynNode> next;
      bool any = false;
      for (auto& b : active) {
        if (static_cast<int>(b.idx.size()) < 2 * config.min_leaf) continue;
        std::vector<DynSplitBest> per_feature(data.p);
        parallel_for(data.p, config.n_threads, [&](int f) {
          per_feature[f] = dyn_best_cut_for_feature(b, X, f, pieces, config, n_groups, solver_opts);
        });
        DynSplitBest best;
        for (int f = 0; f < data.p; ++f)
          if (per_feature[f].found && (!best.found || per_feature[f].gain > best.gain)) best = per_feature[f];
        if (!best.found || best.gain <= 0.0) continue;
        any = true;
        std::vector<int> left_idx, right_idx;
        for (int i : b.idx) (X(i, best.feature) <= best.threshold ? left_idx : right_idx).push_back(i);
        DynNode left = make_node(std::move(left_idx), &b.beta);
        DynNode right = make_node(std::move(right_idx), &b.beta);
        TreeNode& node = tree.nodes[b.node_id];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.gain = best.gain;
        node.left = left.node_id;
        node.right = right.node_id;
        node.beta.resize(0, 0);
        node.leaf_values.resize(0);
        next.push_back(std::move(left));
        next.push_back(std::move(right));
      }
      if (!any) break;
      active = std::move(next);
    }

    for (int i = 0; i < n; ++i) {
      const TreeNode& leaf = tree.nodes[tree.route(data.individuals[i].x)];
      VectorXd flat(s);
      for (int l = 0; l < q_features; ++l) flat.segment(l * nb, nb) = leaf.beta.col(l);
      mu_hat[i] += (phis[i].phi * flat).array();
    }
    for (const auto& node : tree.nodes)
      if (!node.is_leaf()) ens.importance_raw[node.feature] += node.gain;
    if (trace) {
      trace->leaf_counts.push_back(tree.n_leaves());
      trace->loss.push_back(total_loss());
    }
    ens.trees.push_back(std::move(tree));
  }
  return ens;
}

namespace {

void check_dynamic_input(const EnsembleDynamic& ens, const VectorXd& x, const std::vector<DynamicSeries>& z) {
  if (x.size() != ens.p) throw std::invalid_argument("predict: expected " + std::to_string(ens.p) + " static features");
  if (static_cast<int>(z.size()) != ens.q)
    throw std::invalid_argument("predict: expected " + std::to_string(ens.q) + " dynamic series");
}

}  // namespace

MatrixXd EnsembleDynamic::aggregated_beta(const VectorXd& x) const {
  const int nb = bases.empty() ? 0 : bases.front().n_basis();
  MatrixXd total = MatrixXd::Zero(nb, q);
  for (const auto& tree : trees) total += tree.nodes[tree.route(x)].beta;
  return total;
}

Curve EnsembleDynamic::predict(const VectorXd& x, const std::vector<DynamicSeries>& z) const {
  check_dynamic_input(*this, x, z);
  Curve out = zero_curve(grid);
  if (trees.empty()) return out;
  const MatrixXd total = aggregated_beta(x);
  for (int l = 0; l < q; ++l) {
    const MatrixXd phi = integrate_basis(bases[l], z[l], grid);
    out.values += (phi * total.col(l)).array();
  }
  return out;
}

double EnsembleDynamic::predict_at(const VectorXd& x, const std::vector<DynamicSeries>& z, double t) const {
  check_dynamic_input(*this, x, z);
  if (trees.empty()) return 0.0;
  const MatrixXd total = aggregated_beta(x);
  double out = 0.0;
  for (int l = 0; l < q; ++l) out += (integrate_basis_at(bases[l], z[l], t) * total.col(l).array()).sum();
  return out;
}

std::vector<BetaMapCell> beta_by_region_export(const EnsembleDynamic& ensemble, int cells, double lo, double hi) {
  if (ensemble.p != 2) throw std::invalid_argument("beta_by_region_export: defined for 2 static features only");
  if (cells < 1) throw std::invalid_argument("beta_by_region_export: cells must be >= 1");
  std::vector<BetaMapCell> out;
  if (ensemble.trees.empty()) return out;
  out.reserve(static_cast<size_t>(cells) * cells);
  for (int a = 0; a < cells; ++a) {
    for (int b = 0; b < cells; ++b) {
      BetaMapCell cell;
      cell.x1 = lo + (hi - lo) * (a + 0.5) / cells;
      cell.x2 = lo + (hi - lo) * (b + 0.5) / cells;
      VectorXd x(2);
      x << cell.x1, cell.x2;
      cell.beta = ensemble.aggregated_beta(x);
      out.push_back(std::move(cell));
    }
  }
  return out;
}

}  // namespace boostr

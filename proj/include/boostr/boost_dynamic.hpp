#pragma once

#include <optional>
#include <vector>

#include "boostr/boost_static.hpp"
#include "boostr/core.hpp"
#include "boostr/splines.hpp"
#include "boostr/tree.hpp"

namespace boostr {

/// Quadratic form of the node objective in the flat coefficient vector
/// (group l of size u+v per dynamic feature): value at beta is
/// b' beta + 1/2 beta' A beta.
struct NodeQuadratic {
  MatrixXd A;  // symmetric PSD
  VectorXd b;

  int size() const { return static_cast<int>(b.size()); }
};

double quadratic_value(const NodeQuadratic& q, const VectorXd& beta);

struct GroupLassoOptions {
  int max_sweeps = 500;
  double tol = 1e-6;              // max coefficient change per sweep
  double kkt_tol = 1e-5;          // required subgradient residual at exit
  bool identity_fastpath = true;  // closed-form block update when A_ll = c I
  int prox_max_iters = 300;
  int power_iters = 20;
};

struct GroupLassoResult {
  VectorXd beta;
  bool converged = false;
  int sweeps = 0;
  std::vector<double> objective;  // after each sweep, never increasing
  double kkt_residual = 0.0;
};

/// Block coordinate descent for
///   b' beta + 1/2 beta' A beta + 1/2 gamma2 sum_l ||beta_l||_2.
/// Exact group soft-threshold on scaled-identity blocks, proximal
/// gradient steps (step 1 / lambda_max) otherwise. Non-convergence is
/// reported, not thrown; the best iterate is returned.
GroupLassoResult group_lasso_fit(const NodeQuadratic& q, double gamma2, int n_groups,
                                 const VectorXd* warm_start = nullptr, const GroupLassoOptions& opts = {});

/// Per-individual integrated-basis features, flattened to m x q(u+v).
struct IntegratedBasis {
  MatrixXd phi;  // column l*(u+v)+j = integral of basis j of feature l

  ArrayXd at_row(int j) const { return phi.row(j).transpose().array(); }
};

/// A = sum_i integral of h_i Phi_i Phi_i' over (0, c_i], b likewise with
/// g_i Phi_i. The A part does not depend on the boosting residuals, so
/// callers may pass precomputed per-individual blocks.
NodeQuadratic assemble_quadratic(const std::vector<int>& node_individuals, const std::vector<ArrayXd>& g,
                                 const std::vector<ArrayXd>& h, const std::vector<IntegratedBasis>& phis,
                                 const TimeGrid& grid);

/// G2 = F2(parent) - F2(left) - F2(right) - 2 gamma1, every F2 at that
/// node's own fitted coefficients with the penalty term excluded.
double split_gain_g2(double f2_parent, double f2_left, double f2_right, double gamma1);

struct EnsembleDynamic {
  std::vector<Tree> trees;  // leaves carry (u+v) x q beta blocks
  TimeGrid grid;
  BoostConfig config;
  int p = 0;
  int q = 0;
  int u = 0;
  int v = 1;
  std::vector<SplineBasis> bases;  // one per dynamic feature, shared by all leaves
  VectorXd importance_raw;

  Curve predict(const VectorXd& x, const std::vector<DynamicSeries>& z) const;
  // Exact at any t where the dynamic path is known, including past t_max.
  double predict_at(const VectorXd& x, const std::vector<DynamicSeries>& z, double t) const;

  // Sum of routed leaf betas across trees for a static-feature point.
  MatrixXd aggregated_beta(const VectorXd& x) const;
};

EnsembleDynamic fit_dynamic(const Dataset& data, const BoostConfig& config, int u, int v, FitTrace* trace = nullptr);

/// Aggregated beta over a cells x cells grid of the (2-dimensional)
/// static feature plane; the Fig.-11-style spatial view of spline
/// coefficients. Throws for p != 2.
struct BetaMapCell {
  double x1 = 0.0;
  double x2 = 0.0;
  MatrixXd beta;  // (u+v) x q
};
std::vector<BetaMapCell> beta_by_region_export(const EnsembleDynamic& ensemble, int cells = 20, double lo = 0.0,
                                               double hi = 1.0);

}  // namespace boostr

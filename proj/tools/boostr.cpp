#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <optional>

#include "boostr/baselines.hpp"
#include "boostr/boost_dynamic.hpp"
#include "boostr/boost_static.hpp"
#include "boostr/io.hpp"
#include "boostr/model_io.hpp"
#include "boostr/simulate.hpp"

namespace {

using namespace boostr;

struct CommonOptions {
  std::string events_path;
  std::string static_path;
  std::string dynamic_path;
  int grid_m = 100;
  double t_max_override = -1.0;
};

void add_data_options(CLI::App* cmd, CommonOptions& opts, bool dynamic_allowed) {
  static std::string config_path;  // handled by splice_config_tokens; registered so the flag parses
  cmd->add_option("--config", config_path, "flat key=value config file; command-line flags win");
  cmd->add_option("--events", opts.events_path, "events CSV (id,time,kind)")->required();
  cmd->add_option("--static", opts.static_path, "static feature CSV (id,x1,...,xp)")->required();
  if (dynamic_allowed) cmd->add_option("--dynamic", opts.dynamic_path, "dynamic feature CSV (id,feature,time,value)");
  cmd->add_option("--m", opts.grid_m, "time grid size")->capture_default_str();
  cmd->add_option("--t-max", opts.t_max_override, "grid horizon override (default: max censoring time)");
}

Dataset load_common(const CommonOptions& opts) {
  std::optional<std::string> dyn;
  if (!opts.dynamic_path.empty()) dyn = opts.dynamic_path;
  Dataset data = load_dataset(opts.events_path, opts.static_path, dyn, opts.grid_m);
  if (opts.t_max_override > 0.0) data.grid = build_grid(opts.t_max_override, opts.grid_m);
  return data;
}

void add_boost_options(CLI::App* cmd, BoostConfig& config) {
  cmd->add_option("--K", config.K, "number of trees")->capture_default_str();
  cmd->add_option("--gamma1", config.gamma1, "leaf-count penalty")->capture_default_str();
  cmd->add_option("--gamma2", config.gamma2, "shrinkage penalty")->capture_default_str();
  cmd->add_option("--d-max", config.d_max, "leaf cap per tree")->capture_default_str();
  cmd->add_option("--min-leaf", config.min_leaf, "minimum individuals per leaf")->capture_default_str();
  cmd->add_option("--max-thresholds", config.max_thresholds, "candidate split cap per feature")->capture_default_str();
  cmd->add_option("--eta", config.eta, "extra learning rate (1 = off)")->capture_default_str();
  cmd->add_option("--seed", config.seed, "random seed")->envname("BOOSTR_SEED")->capture_default_str();
  cmd->add_option("--threads", config.n_threads, "worker threads (results identical for any value)")
      ->capture_default_str();
}

void write_trace_csv(const FitTrace& trace, const std::string& loss_path, const std::string& leaves_path) {
  if (!loss_path.empty()) {
    std::ofstream out(loss_path);
    if (!out) throw std::runtime_error(loss_path + ": cannot open for writing");
    out << "k,loss\n";
    for (size_t k = 0; k < trace.loss.size(); ++k) out << k << "," << format_double(trace.loss[k]) << "\n";
  }
  if (!leaves_path.empty()) {
    std::ofstream out(leaves_path);
    if (!out) throw std::runtime_error(leaves_path + ": cannot open for writing");
    out << "k,leaves\n";
    for (size_t k = 0; k < trace.leaf_counts.size(); ++k) out << (k + 1) << "," << trace.leaf_counts[k] << "\n";
  }
}

int run_simulate(const std::string& dataset, int n, double sigma, uint64_t seed, int grid_m,
                 const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  Dataset data;
  if (dataset == "A")
    data = gen_dataset_a(n, seed, grid_m);
  else if (dataset == "B")
    data = gen_dataset_b(n, seed, grid_m);
  else if (dataset == "C")
    data = gen_dataset_c(n, seed, grid_m);
  else if (dataset == "D")
    data = gen_dataset_d(n, seed, grid_m);
  else if (dataset == "morvita") {
    TrialSpec spec;
    spec.sigma = sigma;
    data = gen_morvita(n, spec, seed, grid_m);
  } else {
    throw std::invalid_argument("unknown dataset '" + dataset + "' (expected A, B, C, D or morvita)");
  }
  const auto dir = std::filesystem::path(out_dir);
  save_dataset(data, (dir / "events.csv").string(), (dir / "static.csv").string());
  std::cout << "wrote " << (dir / "events.csv").string() << " and " << (dir / "static.csv").string() << " (n=" << n
            << ")\n";
  return 0;
}

int run_train(const CommonOptions& data_opts, BoostConfig config, const std::string& mode, int u, int v,
              const std::string& model_path, std::string loss_path, std::string leaves_path) {
  // The traces are part of the training contract; default their paths
  // off the model file when not given explicitly.
  const std::string stem =
      model_path.ends_with(".json") ? model_path.substr(0, model_path.size() - 5) : model_path;
  if (loss_path.empty()) loss_path = stem + "_loss.csv";
  if (leaves_path.empty()) leaves_path = stem + "_leaves.csv";

  const Dataset data = load_common(data_opts);
  FitTrace trace;
  if (mode == "static") {
    const EnsembleStatic ens = fit_static(data, config, &trace);
    save_model(ens, model_path);
  } else if (mode == "dynamic") {
    if (data.q < 1) throw std::invalid_argument("dynamic mode requires a --dynamic CSV");
    const EnsembleDynamic ens = fit_dynamic(data, config, u, v, &trace);
    save_model(ens, model_path);
  } else {
    throw std::invalid_argument("mode must be 'static' or 'dynamic'");
  }
  write_trace_csv(trace, loss_path, leaves_path);
  std::cout << "trained " << mode << " model -> " << model_path << "\n";
  return 0;
}

int run_predict(const CommonOptions& data_opts, const std::string& model_path, const std::string& out_path,
                bool clamp_zero, double at_time, const std::string& at_out) {
  const std::string version = model_version(model_path);
  const Dataset data = load_common(data_opts);
  std::vector<std::pair<std::string, Curve>> curves;
  std::vector<std::pair<std::string, double>> at_values;

  if (version == "boostr-static-v1") {
    const EnsembleStatic ens = load_static_model(model_path);
    for (const auto& ind : data.individuals) {
      Curve c = ens.predict(ind.x);
      if (clamp_zero) c = clamp_nonneg(c);
      curves.emplace_back(ind.id, std::move(c));
      if (at_time > 0.0) at_values.emplace_back(ind.id, ens.predict_at(ind.x, at_time));
    }
  } else if (version == "boostr-dynamic-v1") {
    const EnsembleDynamic ens = load_dynamic_model(model_path);
    for (const auto& ind : data.individuals) {
      Curve c = ens.predict(ind.x, ind.z);
      if (clamp_zero) c = clamp_nonneg(c);
      curves.emplace_back(ind.id, std::move(c));
      if (at_time > 0.0) at_values.emplace_back(ind.id, ens.predict_at(ind.x, ind.z, at_time));
    }
  } else {
    throw std::runtime_error(model_path + ": unsupported model version '" + version + "'");
  }

  save_curves(curves, out_path);
  if (at_time > 0.0) {
    std::ofstream out(at_out);
    if (!out) throw std::runtime_error(at_out + ": cannot open for writing");
    out << "id,t,value\n";
    for (const auto& [id, value] : at_values)
      out << id << "," << format_double(at_time) << "," << format_double(value) << "\n";
  }
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int run_evaluate(const CommonOptions& data_opts, const BoostConfig& config, const std::string& method_name, int knn_k,
                 int train_n, int test_n, int reps, double t_eval, const std::string& out_prefix) {
  const Dataset data = load_common(data_opts);
  FitMethod method;
  if (method_name == "boostr")
    method = make_boostr_method(config);
  else if (method_name == "mcf")
    method = make_pooled_mcf_method();
  else if (method_name == "mcf-knn")
    method = make_mcf_knn_method(knn_k);
  else if (method_name == "hpp")
    method = make_hpp_method();
  else if (method_name == "time-feature")
    method = make_time_feature_method(config);
  else
    throw std::invalid_argument("unknown method '" + method_name + "'");

  const MetricReport report =
      cross_validate(data, method, train_n, test_n, reps, config.seed, t_eval, config.n_threads);

  {
    std::ofstream out(out_prefix + "_reps.csv");
    if (!out) throw std::runtime_error(out_prefix + "_reps.csv: cannot open for writing");
    out << "rep,c_index,l2,mse\n";
    for (int r = 0; r < reps; ++r)
      out << r << "," << format_double(report.c_index_reps[r]) << "," << format_double(report.l2_reps[r]) << ","
          << format_double(report.mse_reps[r]) << "\n";
  }
  {
    auto to_json = [](const Summary& s) {
      return nlohmann::json{{"mean", s.mean}, {"q1", s.q1},   {"median", s.median},
                            {"q3", s.q3},     {"lo", s.lo},   {"hi", s.hi}};
    };
    nlohmann::json summary{{"method", method_name},
                           {"reps", reps},
                           {"train_n", train_n},
                           {"test_n", test_n},
                           {"c_index", to_json(summarize(report.c_index_reps))},
                           {"l2", to_json(summarize(report.l2_reps))},
                           {"mse", to_json(summarize(report.mse_reps))}};
    std::ofstream out(out_prefix + "_summary.json");
    if (!out) throw std::runtime_error(out_prefix + "_summary.json: cannot open for writing");
    out << summary.dump(2) << "\n";
  }
  std::cout << "mean c-index " << summarize(report.c_index_reps).mean << " over " << reps << " replicates\n";
  return 0;
}

int run_importance(const std::string& model_path, const std::string& out_path) {
  const std::string version = model_version(model_path);
  VectorXd raw;
  if (version == "boostr-static-v1") {
    const EnsembleStatic ens = load_static_model(model_path);
    raw = feature_importance(ens, false);
  } else if (version == "boostr-dynamic-v1") {
    const EnsembleDynamic ens = load_dynamic_model(model_path);
    const double k = static_cast<double>(ens.config.K);
    raw = ens.importance_raw / (k * k);
  } else {
    throw std::runtime_error(model_path + ": unsupported model version '" + version + "'");
  }
  const VectorXd std_imp = standardize_importance(raw);
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error(out_path + ": cannot open for writing");
  out << "feature,raw,standardized\n";
  for (int i = 0; i < raw.size(); ++i)
    out << "x" << (i + 1) << "," << format_double(raw[i]) << "," << format_double(std_imp[i]) << "\n";
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int run_tune(const CommonOptions& data_opts, const BoostConfig& base, int runs, double g1_lo, double g1_hi,
             double g2_lo, double g2_hi, const std::string& out_path) {
  const Dataset data = load_common(data_opts);
  const LhdDesign design = lhd_sample({g1_lo, g1_hi}, {g2_lo, g2_hi}, runs, base.seed);
  const auto report = tune(data, design, base);
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error(out_path + ": cannot open for writing");
  out << "run,gamma1,gamma2,leaves_min,leaves_q1,leaves_median,leaves_q3,leaves_max,in_target_band\n";
  for (size_t r = 0; r < report.size(); ++r) {
    const auto& t = report[r];
    out << r << "," << format_double(t.gamma1) << "," << format_double(t.gamma2) << ","
        << format_double(t.leaves_per_tree.lo) << "," << format_double(t.leaves_per_tree.q1) << ","
        << format_double(t.leaves_per_tree.median) << "," << format_double(t.leaves_per_tree.q3) << ","
        << format_double(t.leaves_per_tree.hi) << "," << (t.in_target_band ? 1 : 0) << "\n";
  }
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

void export_partition(const std::string& model_path, const std::string& out_path) {
  const std::string version = model_version(model_path);
  std::vector<Tree> trees;
  int p = 0;
  if (version == "boostr-static-v1") {
    const EnsembleStatic ens = load_static_model(model_path);
    trees = ens.trees;
    p = ens.p;
  } else {
    const EnsembleDynamic ens = load_dynamic_model(model_path);
    trees = ens.trees;
    p = ens.p;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error(out_path + ": cannot open for writing");
  out << "tree,leaf,feature,lo,hi\n";
  const double inf = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < trees.size(); ++k) {
    const Tree& tree = trees[k];
    // Depth-first descent tracking the feature box of each node.
    struct Frame {
      int node;
      std::vector<double> lo, hi;
    };
    std::vector<Frame> stack{{0, std::vector<double>(p, -inf), std::vector<double>(p, inf)}};
    while (!stack.empty()) {
      Frame f = std::move(stack.back());
      stack.pop_back();
      const TreeNode& node = tree.nodes[f.node];
      if (node.is_leaf()) {
        for (int j = 0; j < p; ++j) {
          out << k << "," << f.node << ",x" << (j + 1) << ",";
          out << (std::isinf(f.lo[j]) ? std::string("-inf") : format_double(f.lo[j])) << ",";
          out << (std::isinf(f.hi[j]) ? std::string("inf") : format_double(f.hi[j])) << "\n";
        }
        continue;
      }
      Frame left{node.left, f.lo, f.hi};
      left.hi[node.feature] = std::min(left.hi[node.feature], node.threshold);
      Frame right{node.right, std::move(f.lo), std::move(f.hi)};
      right.lo[node.feature] = std::max(right.lo[node.feature], node.threshold);
      stack.push_back(std::move(right));
      stack.push_back(std::move(left));
    }
  }
}

void export_leaf_curves(const std::string& model_path, const std::string& out_path) {
  const EnsembleStatic ens = load_static_model(model_path);
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error(out_path + ": cannot open for writing");
  out << "tree,leaf,t,value\n";
  for (size_t k = 0; k < ens.trees.size(); ++k)
    for (size_t d = 0; d < ens.trees[k].nodes.size(); ++d) {
      const TreeNode& node = ens.trees[k].nodes[d];
      if (!node.is_leaf()) continue;
      for (int j = 0; j < ens.grid.m; ++j)
        out << k << "," << d << "," << format_double(ens.grid.t(j)) << "," << format_double(node.leaf_values[j])
            << "\n";
    }
}

void export_beta_map(const std::string& model_path, const std::string& out_path, int cells) {
  const EnsembleDynamic ens = load_dynamic_model(model_path);
  const auto map = beta_by_region_export(ens, cells);
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error(out_path + ": cannot open for writing");
  out << "x1,x2,feature,basis,beta\n";
  for (const auto& cell : map)
    for (int l = 0; l < cell.beta.cols(); ++l)
      for (int j = 0; j < cell.beta.rows(); ++j)
        out << format_double(cell.x1) << "," << format_double(cell.x2) << "," << (l + 1) << "," << (j + 1) << ","
            << format_double(cell.beta(j, l)) << "\n";
}

// Flat key=value config support: the file's pairs are spliced in as
// --key value tokens right after the subcommand, so explicit flags
// (parsed later, take-last policy) always win.
std::vector<std::string> splice_config_tokens(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size())
      config_path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0)
      config_path = args[i].substr(9);
  }
  if (config_path.empty()) return args;

  std::ifstream in(config_path);
  if (!in) throw std::runtime_error(config_path + ": cannot open config file");
  std::vector<std::string> injected;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    size_t start = line.find_first_not_of(' ');
    if (start == std::string::npos || line[start] == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(config_path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = line.substr(start, eq - start);
    while (!key.empty() && key.back() == ' ') key.pop_back();
    std::string value = line.substr(eq + 1);
    const size_t vstart = value.find_first_not_of(' ');
    value = (vstart == std::string::npos) ? "" : value.substr(vstart);
    injected.push_back("--" + key);
    injected.push_back(value);
  }

  // Insert after the subcommand token(s); "export" carries a nested one.
  size_t pos = args.empty() ? 0 : 1;
  if (!args.empty() && args[0] == "export" && args.size() > 1) pos = 2;
  args.insert(args.begin() + pos, injected.begin(), injected.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boost-R: gradient boosted trees for recurrent event data"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate a synthetic dataset");
  std::string sim_dataset = "A", sim_out_dir = ".";
  int sim_n = 200, sim_m = 0;
  double sim_sigma = 0.0;
  uint64_t sim_seed = 42;
  sim->add_option("--dataset", sim_dataset, "A, B, C, D or morvita")->required();
  sim->add_option("--n", sim_n, "number of individuals")->capture_default_str();
  sim->add_option("--sigma", sim_sigma, "random-effect scale (morvita only)")->capture_default_str();
  sim->add_option("--seed", sim_seed, "random seed")->envname("BOOSTR_SEED")->capture_default_str();
  sim->add_option("--m", sim_m, "time grid size (default 100, morvita 120)");
  sim->add_option("--out-dir", sim_out_dir, "output directory")->capture_default_str();

  // train
  auto* train = app.add_subcommand("train", "fit a Boost-R ensemble");
  CommonOptions train_data;
  BoostConfig train_config;
  std::string train_mode = "static", train_model = "model.json", train_loss, train_leaves;
  int train_u = 2, train_v = 3;
  add_data_options(train, train_data, true);
  add_boost_options(train, train_config);
  train->add_option("--mode", train_mode, "static or dynamic")->capture_default_str();
  train->add_option("--u", train_u, "internal knots (dynamic mode)")->capture_default_str();
  train->add_option("--v", train_v, "spline order (dynamic mode)")->capture_default_str();
  train->add_option("--out", train_model, "model JSON path")->capture_default_str();
  train->add_option("--loss-trace", train_loss, "training loss CSV (default: <model>_loss.csv)");
  train->add_option("--leaves", train_leaves, "leaves-per-tree CSV (default: <model>_leaves.csv)");

  // predict
  auto* predict = app.add_subcommand("predict", "predict cumulative intensity curves");
  CommonOptions predict_data;
  std::string predict_model, predict_out = "curves.csv", predict_at_out = "predictions_at.csv";
  bool predict_clamp = false;
  double predict_at = -1.0;
  add_data_options(predict, predict_data, true);
  predict->add_option("--model", predict_model, "model JSON")->required();
  predict->add_option("--out", predict_out, "curves CSV")->capture_default_str();
  predict->add_flag("--clamp-zero", predict_clamp, "clamp predictions at zero");
  predict->add_option("--at", predict_at, "also predict at this time (may exceed the horizon)");
  predict->add_option("--at-out", predict_at_out, "point-prediction CSV for --at")->capture_default_str();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "cross-validated comparison metrics");
  CommonOptions eval_data;
  BoostConfig eval_config;
  std::string eval_method = "boostr", eval_prefix = "evaluation";
  int eval_train = 150, eval_test = 50, eval_reps = 50, eval_knn = 20;
  double eval_t = -1.0;
  add_data_options(evaluate, eval_data, false);
  add_boost_options(evaluate, eval_config);
  evaluate->add_option("--method", eval_method, "boostr, mcf, mcf-knn, hpp or time-feature")->capture_default_str();
  evaluate->add_option("--knn", eval_knn, "neighbor count for mcf-knn")->capture_default_str();
  evaluate->add_option("--train-size", eval_train, "training individuals per replicate")->capture_default_str();
  evaluate->add_option("--test-size", eval_test, "testing individuals per replicate")->capture_default_str();
  evaluate->add_option("--reps", eval_reps, "replicates")->capture_default_str();
  evaluate->add_option("--t-eval", eval_t, "evaluation time (default: smallest censoring time)");
  evaluate->add_option("--out-prefix", eval_prefix, "writes <prefix>_reps.csv and <prefix>_summary.json")
      ->capture_default_str();

  // importance
  auto* importance = app.add_subcommand("importance", "per-feature split gains of a fitted model");
  std::string imp_model, imp_out = "importance.csv";
  importance->add_option("--model", imp_model, "model JSON")->required();
  importance->add_option("--out", imp_out, "CSV path")->capture_default_str();

  // tune
  auto* tune_cmd = app.add_subcommand("tune", "Latin hypercube search over (gamma1, gamma2)");
  CommonOptions tune_data;
  BoostConfig tune_config;
  tune_config.d_max = 16;  // let trees grow enough to reveal the 4..8 band
  int tune_runs = 15;
  double tune_g1_lo = 0.0, tune_g1_hi = 600.0, tune_g2_lo = 0.0, tune_g2_hi = 200.0;
  std::string tune_out = "tuning.csv";
  add_data_options(tune_cmd, tune_data, false);
  add_boost_options(tune_cmd, tune_config);
  tune_cmd->add_option("--runs", tune_runs, "design size")->capture_default_str();
  tune_cmd->add_option("--gamma1-lo", tune_g1_lo, "")->capture_default_str();
  tune_cmd->add_option("--gamma1-hi", tune_g1_hi, "")->capture_default_str();
  tune_cmd->add_option("--gamma2-lo", tune_g2_lo, "")->capture_default_str();
  tune_cmd->add_option("--gamma2-hi", tune_g2_hi, "")->capture_default_str();
  tune_cmd->add_option("--out", tune_out, "report CSV")->capture_default_str();

  // export
  auto* exp = app.add_subcommand("export", "machine-readable views of a fitted model");
  exp->require_subcommand(1);
  auto* exp_part = exp->add_subcommand("partition", "per-tree leaf rectangles");
  auto* exp_leaf = exp->add_subcommand("leaf-curves", "per-leaf curves of a static model");
  auto* exp_beta = exp->add_subcommand("beta-map", "aggregated spline coefficients over a 2-D static plane");
  std::string exp_model, exp_out;
  int exp_cells = 20;
  for (auto* sub : {exp_part, exp_leaf, exp_beta}) {
    sub->add_option("--model", exp_model, "model JSON")->required();
    sub->add_option("--out", exp_out, "output CSV")->required();
  }
  exp_beta->add_option("--cells", exp_cells, "grid cells per axis")->capture_default_str();

  try {
    std::vector<std::string> args = splice_config_tokens(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11's vector API expects reversed tokens
    app.parse(args);

    if (*sim) {
      const int m = (sim_m > 0) ? sim_m : (sim_dataset == "morvita" ? 120 : 100);
      return run_simulate(sim_dataset, sim_n, sim_sigma, sim_seed, m, sim_out_dir);
    }
    if (*train)
      return run_train(train_data, train_config, train_mode, train_u, train_v, train_model, train_loss, train_leaves);
    if (*predict)
      return run_predict(predict_data, predict_model, predict_out, predict_clamp, predict_at, predict_at_out);
    if (*evaluate)
      return run_evaluate(eval_data, eval_config, eval_method, eval_knn, eval_train, eval_test, eval_reps, eval_t,
                          eval_prefix);
    if (*importance) return run_importance(imp_model, imp_out);
    if (*tune_cmd)
      return run_tune(tune_data, tune_config, tune_runs, tune_g1_lo, tune_g1_hi, tune_g2_lo, tune_g2_hi, tune_out);
    if (*exp) {
      if (*exp_part) export_partition(exp_model, exp_out);
      if (*exp_leaf) export_leaf_curves(exp_model, exp_out);
      if (*exp_beta) export_beta_map(exp_model, exp_out, exp_cells);
      std::cout << "wrote " << exp_out << "\n";
      return 0;
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const numeric_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

#include "boostr/model_io.hpp"

#include <fstream>
#include <json.hpp>

namespace boostr {

using nlohmann::json;

namespace {

json config_to_json(const BoostConfig& c) {
  return json{{"K", c.K},           {"gamma1", c.gamma1},
              {"gamma2", c.gamma2}, {"d_max", c.d_max},
              {"min_leaf", c.min_leaf}, {"max_thresholds", c.max_thresholds},
              {"eta", c.eta},       {"seed", c.seed}};
}

BoostConfig config_from_json(const json& j) {
  BoostConfig c;
  c.K = j.at("K").get<int>();
  c.gamma1 = j.at("gamma1").get<double>();
  c.gamma2 = j.at("gamma2").get<double>();
  c.d_max = j.at("d_max").get<int>();
  c.min_leaf = j.at("min_leaf").get<int>();
  c.max_thresholds = j.at("max_thresholds").get<int>();
  c.eta = j.at("eta").get<double>();
  c.seed = j.at("seed").get<uint64_t>();
  return c;
}

json grid_to_json(const TimeGrid& g) { return json{{"t_max", g.t_max}, {"m", g.m}}; }

TimeGrid grid_from_json(const json& j) { return build_grid(j.at("t_max").get<double>(), j.at("m").get<int>()); }

json node_to_json(const TreeNode& node, bool dynamic) {
  if (!node.is_leaf()) {
    return json{{"kind", "split"},   {"feature", node.feature + 1},  // 1-based externally
                {"threshold", node.threshold}, {"gain", node.gain},
                {"left", node.left}, {"right", node.right}};
  }
  json leaf{{"kind", "leaf"}};
  if (dynamic) {
    json rows = json::array();
    for (int r = 0; r < node.beta.rows(); ++r) {
      json row = json::array();
      for (int c = 0; c < node.beta.cols(); ++c) row.push_back(node.beta(r, c));
      rows.push_back(std::move(row));
    }
    leaf["beta"] = std::move(rows);
  } else {
    json values = json::array();
    for (int j = 0; j < node.leaf_values.size(); ++j) values.push_back(node.leaf_values[j]);
    leaf["leaf_values"] = std::move(values);
  }
  return leaf;
}

TreeNode node_from_json(const json& j, bool dynamic) {
  TreeNode node;
  if (j.at("kind") == "split") {
    node.feature = j.at("feature").get<int>() - 1;
    node.threshold = j.at("threshold").get<double>();
    node.gain = j.at("gain").get<double>();
    node.left = j.at("left").get<int>();
    node.right = j.at("right").get<int>();
    return node;
  }
  if (dynamic) {
    const auto& rows = j.at("beta");
    const int nr = static_cast<int>(rows.size());
    const int nc = nr > 0 ? static_cast<int>(rows[0].size()) : 0;
    node.beta.resize(nr, nc);
    for (int r = 0; r < nr; ++r)
      for (int c = 0; c < nc; ++c) node.beta(r, c) = rows[r][c].get<double>();
  } else {
    const auto& values = j.at("leaf_values");
    node.leaf_values.resize(static_cast<int>(values.size()));
    for (int k = 0; k < node.leaf_values.size(); ++k) node.leaf_values[k] = values[k].get<double>();
  }
  return node;
}

json trees_to_json(const std::vector<Tree>& trees, bool dynamic) {
  json out = json::array();
  for (const auto& tree : trees) {
    json nodes = json::array();
    for (const auto& node : tree.nodes) nodes.push_back(node_to_json(node, dynamic));
    out.push_back(json{{"nodes", std::move(nodes)}});
  }
  return out;
}

std::vector<Tree> trees_from_json(const json& j, bool dynamic) {
  std::vector<Tree> trees;
  for (const auto& jt : j) {
    Tree tree;
    for (const auto& jn : jt.at("nodes")) tree.nodes.push_back(node_from_json(jn, dynamic));
    if (tree.nodes.empty()) throw std::runtime_error("model: tree without nodes");
    trees.push_back(std::move(tree));
  }
  return trees;
}

json importance_to_json(const VectorXd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

VectorXd importance_from_json(const json& j) {
  VectorXd v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << text;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  json j;
  in >> j;
  return j;
}

}  // namespace

std::string model_to_json(const EnsembleStatic& ensemble) {
  json j{{"version", "boostr-static-v1"},
         {"config", config_to_json(ensemble.config)},
         {"grid", grid_to_json(ensemble.grid)},
         {"p", ensemble.p},
         {"trees", trees_to_json(ensemble.trees, false)},
         {"importance_raw", importance_to_json(ensemble.importance_raw)}};
  return j.dump(2) + "\n";
}

std::string model_to_json(const EnsembleDynamic& ensemble) {
  json bases = json::array();
  for (const auto& basis : ensemble.bases)
    bases.push_back(json{{"u", basis.u}, {"v", basis.v}, {"knots", basis.knots}});
  json j{{"version", "boostr-dynamic-v1"},
         {"config", config_to_json(ensemble.config)},
         {"grid", grid_to_json(ensemble.grid)},
         {"p", ensemble.p},
         {"q", ensemble.q},
         {"u", ensemble.u},
         {"v", ensemble.v},
         {"bases", std::move(bases)},
         {"trees", trees_to_json(ensemble.trees, true)},
         {"importance_raw", importance_to_json(ensemble.importance_raw)}};
  return j.dump(2) + "\n";
}

void save_model(const EnsembleStatic& ensemble, const std::string& path) { write_file(path, model_to_json(ensemble)); }

void save_model(const EnsembleDynamic& ensemble, const std::string& path) { write_file(path, model_to_json(ensemble)); }

std::string model_version(const std::string& path) { return read_json(path).at("version").get<std::string>(); }

EnsembleStatic load_static_model(const std::string& path) {
  const json j = read_json(path);
  if (j.at("version") != "boostr-static-v1") throw std::runtime_error(path + ": not a boostr-static-v1 model");
  EnsembleStatic ens;
  ens.config = config_from_json(j.at("config"));
  ens.grid = grid_from_json(j.at("grid"));
  ens.p = j.at("p").get<int>();
  ens.trees = trees_from_json(j.at("trees"), false);
  ens.importance_raw = importance_from_json(j.at("importance_raw"));
  return ens;
}

EnsembleDynamic load_dynamic_model(const std::string& path) {
  const json j = read_json(path);
  if (j.at("version") != "boostr-dynamic-v1") throw std::runtime_error(path + ": not a boostr-dynamic-v1 model");
  EnsembleDynamic ens;
  ens.config = config_from_json(j.at("config"));
  ens.grid = grid_from_json(j.at("grid"));
  ens.p = j.at("p").get<int>();
  ens.q = j.at("q").get<int>();
  ens.u = j.at("u").get<int>();
  ens.v = j.at("v").get<int>();
  for (const auto& jb : j.at("bases")) {
    SplineBasis basis;
    basis.u = jb.at("u").get<int>();
    basis.v = jb.at("v").get<int>();
    basis.knots = jb.at("knots").get<std::vector<double>>();
    ens.bases.push_back(std::move(basis));
  }
  ens.trees = trees_from_json(j.at("trees"), true);
  ens.importance_raw = importance_from_json(j.at("importance_raw"));
  return ens;
}

}  // namespace boostr

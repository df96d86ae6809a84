#include "gate/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <limits>
#include <set>

#include "gate/rng.hpp"

namespace gate {

using json = nlohmann::ordered_json;

std::string to_string(ConstructionTag tag) {
  switch (tag) {
    case ConstructionTag::gate: return "gate";
    case ConstructionTag::ed: return "ed";
    case ConstructionTag::knn: return "knn";
    case ConstructionTag::gat: return "gat";
  }
  return "gate";
}

ConstructionTag construction_tag_from_string(const std::string& s) {
  if (s == "gate") return ConstructionTag::gate;
  if (s == "ed") return ConstructionTag::ed;
  if (s == "knn") return ConstructionTag::knn;
  if (s == "gat") return ConstructionTag::gat;
  throw ConfigError("unknown construction tag: " + s);
}

NormalizedFingerprint FingerprintGraph::node_feature(int i) const {
  NormalizedFingerprint f;
  f.values = node_features.row(i).transpose();
  return f;
}

double attention_score(const Eigen::VectorXd& fi, const Eigen::VectorXd& fj) {
  if (fi.size() != fj.size()) {
    throw ConfigError("attention_score: length mismatch");
  }
  double ni = fi.norm();
  double nj = fj.norm();
  if (ni == 0.0 || nj == 0.0) return 0.0;
  double s = fi.dot(fj) / (ni * nj);
  return std::clamp(s, -1.0, 1.0);
}

double attention_score(const NormalizedFingerprint& fi,
                       const NormalizedFingerprint& fj) {
  return attention_score(fi.values, fj.values);
}

double ed_distance(const Eigen::VectorXd& fi, const Eigen::VectorXd& fj) {
  if (fi.size() != fj.size()) throw ConfigError("ed_distance: length mismatch");
  return (fi - fj).squaredNorm() / static_cast<double>(fi.size());
}

double ed_distance(const NormalizedFingerprint& fi,
                   const NormalizedFingerprint& fj) {
  return ed_distance(fi.values, fj.values);
}

double euclidean_distance(const Eigen::VectorXd& fi,
                          const Eigen::VectorXd& fj) {
  if (fi.size() != fj.size()) {
    throw ConfigError("euclidean_distance: length mismatch");
  }
  return (fi - fj).norm();
}

Eigen::MatrixXd compute_node_features(const Dataset& ds) {
  ds.validate();
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(ds.n_rps, ds.n_aps);
  std::vector<int> counts(ds.n_rps, 0);
  for (const auto& s : ds.samples) {
    sums.row(s.rp_id) += s.fingerprint.rss.transpose();
    counts[s.rp_id]++;
  }
  for (int i = 0; i < ds.n_rps; ++i) {
    if (counts[i] == 0) {
      throw SchemaError("no samples for rp " + std::to_string(i));
    }
    sums.row(i) /= static_cast<double>(counts[i]);
  }
  // +100 shift: mean then normalize equals normalize then mean.
  return sums.array() + 100.0;
}

namespace {

void sort_edge_lists(FingerprintGraph& g) {
  for (auto& list : g.edges) {
    std::sort(list.begin(), list.end(),
              [](const Edge& a, const Edge& b) { return a.neighbor < b.neighbor; });
  }
}

}  // namespace

FingerprintGraph build_gate_graph(const Dataset& ds, const ModelConfig& cfg) {
  cfg.validate();
  if (ds.n_rps < 2) throw ConfigError("degenerate path: n_rps < 2");

  FingerprintGraph g;
  g.tag = ConstructionTag::gate;
  g.node_features = compute_node_features(ds);
  int n = g.n_rps();
  g.k_nb = cfg.k_nb(n);
  g.edges.assign(n, {});

  Eigen::MatrixXd scores(n, n);
  for (int i = 0; i < n; ++i) {
    scores(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      double s = attention_score(
          Eigen::VectorXd(g.node_features.row(i).transpose()),
          Eigen::VectorXd(g.node_features.row(j).transpose()));
      scores(i, j) = s;
      scores(j, i) = s;
    }
  }

  for (int i = 0; i < n; ++i) {
    std::set<int> picked;
    if (i > 0) picked.insert(i - 1);
    if (i + 1 < n) picked.insert(i + 1);

    // k_nb highest-attention nodes; ties break toward the lower index.
    std::vector<int> order;
    order.reserve(n - 1);
    for (int j = 0; j < n; ++j) {
      if (j != i) order.push_back(j);
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (scores(i, a) != scores(i, b)) return scores(i, a) > scores(i, b);
      return a < b;
    });
    for (int r = 0; r < g.k_nb; ++r) picked.insert(order[r]);

    for (int j : picked) g.edges[i].push_back({j, scores(i, j)});
  }
  sort_edge_lists(g);
  return g;
}

FingerprintGraph build_ed_graph(const Dataset& ds, const EdConfig& cfg) {
  FingerprintGraph g;
  g.tag = ConstructionTag::ed;
  g.phi_ed = cfg.phi_ed;
  g.sqrt_ed = cfg.sqrt_ed;
  g.node_features = compute_node_features(ds);
  int n = g.n_rps();
  g.edges.assign(n, {});

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      Eigen::VectorXd fi = g.node_features.row(i).transpose();
      Eigen::VectorXd fj = g.node_features.row(j).transpose();
      double d = cfg.sqrt_ed ? euclidean_distance(fi, fj) : ed_distance(fi, fj);
      if (d <= cfg.phi_ed) g.edges[i].push_back({j, 0.0});
    }
    if (g.edges[i].empty()) {
      g.isolated_nodes++;
    } else {
      double w = 1.0 / static_cast<double>(g.edges[i].size());
      for (auto& e : g.edges[i]) e.weight = w;
    }
  }
  return g;
}

FingerprintGraph build_knn_graph(const Dataset& ds, const KnnConfig& cfg) {
  FingerprintGraph g;
  g.tag = ConstructionTag::knn;
  g.node_features = compute_node_features(ds);
  int n = g.n_rps();
  if (cfg.k < 1 || cfg.k >= n) {
    throw ConfigError("knn k must satisfy 1 <= k < n_rps");
  }
  g.k_nb = cfg.k;
  g.edges.assign(n, {});

  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<double, int>> dist;
    dist.reserve(n - 1);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      dist.emplace_back(
          ed_distance(Eigen::VectorXd(g.node_features.row(i).transpose()),
                      Eigen::VectorXd(g.node_features.row(j).transpose())),
          j);
    }
    std::sort(dist.begin(), dist.end());  // (distance, index): ties to lower j
    double w = 1.0 / static_cast<double>(cfg.k);
    for (int r = 0; r < cfg.k; ++r) g.edges[i].push_back({dist[r].second, w});
  }
  sort_edge_lists(g);
  return g;
}

GatParams make_gat_params(int n_aps, int dim, std::uint64_t seed,
                          double leaky_slope) {
  GatParams p;
  p.leaky_slope = leaky_slope;
  Rng rng(derive_seed(seed, std::string_view("gat_params")));
  double bound = std::sqrt(6.0 / static_cast<double>(n_aps + dim));
  p.w.resize(dim, n_aps);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < n_aps; ++c) p.w(r, c) = rng.uniform(-bound, bound);
  }
  p.a.resize(2 * dim);
  double abound = std::sqrt(6.0 / static_cast<double>(2 * dim + 1));
  for (int r = 0; r < 2 * dim; ++r) p.a[r] = rng.uniform(-abound, abound);
  return p;
}

FingerprintGraph gat_attention(const FingerprintGraph& graph,
                               const GatParams& params) {
  FingerprintGraph g = graph;
  g.tag = ConstructionTag::gat;
  int n = g.n_rps();
  int d = static_cast<int>(params.w.rows());

  Eigen::MatrixXd proj = g.node_features * params.w.transpose();  // n x d
  Eigen::VectorXd a_src = params.a.head(d);
  Eigen::VectorXd a_dst = params.a.tail(d);

  for (int i = 0; i < n; ++i) {
    auto& list = g.edges[i];
    if (list.empty()) continue;
    std::vector<double> logits(list.size());
    double self_term = proj.row(i).dot(a_src);
    double max_logit = -std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < list.size(); ++e) {
      double z = self_term + proj.row(list[e].neighbor).dot(a_dst);
      if (z < 0.0) z *= params.leaky_slope;
      logits[e] = z;
      max_logit = std::max(max_logit, z);
    }
    double denom = 0.0;
    for (double& z : logits) {
      z = std::exp(z - max_logit);
      denom += z;
    }
    for (std::size_t e = 0; e < list.size(); ++e) {
      list[e].weight = logits[e] / denom;
    }
  }
  return g;
}

std::string serialize_graph(const FingerprintGraph& graph) {
  json j;
  j["nodes"] = graph.n_rps();
  json edges = json::array();
  for (int i = 0; i < graph.n_rps(); ++i) {
    for (const auto& e : graph.edges[i]) {
      edges.push_back(json::array({i, e.neighbor, e.weight}));
    }
  }
  j["edges"] = std::move(edges);
  j["tag"] = to_string(graph.tag);
  j["k_nb"] = graph.k_nb;
  j["isolated"] = graph.isolated_nodes;
  j["phi_ed"] = graph.phi_ed;
  j["sqrt_ed"] = graph.sqrt_ed;
  json feats = json::array();
  for (int i = 0; i < graph.n_rps(); ++i) {
    json row = json::array();
    for (int k = 0; k < graph.n_aps(); ++k) row.push_back(graph.node_features(i, k));
    feats.push_back(std::move(row));
  }
  j["node_features"] = std::move(feats);
  return j.dump(2) + "\n";
}

void save_graph(const FingerprintGraph& graph,
                const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << serialize_graph(graph);
  if (!out) throw IoError("write failed: " + path.string());
}

FingerprintGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open graph file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SchemaError("corrupt graph file " + path.string() + ": " + e.what());
  }
  FingerprintGraph g;
  try {
    int n = j.at("nodes").get<int>();
    g.tag = construction_tag_from_string(j.at("tag").get<std::string>());
    g.k_nb = j.at("k_nb").get<int>();
    g.isolated_nodes = j.value("isolated", 0);
    g.phi_ed = j.value("phi_ed", 0.0);
    g.sqrt_ed = j.value("sqrt_ed", false);
    const auto& feats = j.at("node_features");
    if (static_cast<int>(feats.size()) != n) {
      throw SchemaError("node_features row count mismatch");
    }
    int n_aps = n > 0 ? static_cast<int>(feats[0].size()) : 0;
    g.node_features.resize(n, n_aps);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(feats[i].size()) != n_aps) {
        throw SchemaError("ragged node_features");
      }
      for (int k = 0; k < n_aps; ++k) {
        g.node_features(i, k) = feats[i][k].get<double>();
      }
    }
    g.edges.assign(n, {});
    for (const auto& e : j.at("edges")) {
      int src = e.at(0).get<int>();
      int dst = e.at(1).get<int>();
      double w = e.at(2).get<double>();
      if (src < 0 || src >= n || dst < 0 || dst >= n) {
        throw SchemaError("edge endpoint out of range");
      }
      g.edges[src].push_back({dst, w});
    }
  } catch (const json::exception& e) {
    throw SchemaError("corrupt graph file " + path.string() + ": " + e.what());
  }
  return g;
}

}  // namespace gate

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gate/types.hpp"

namespace gate {

enum class ConstructionTag { gate, ed, knn, gat };

std::string to_string(ConstructionTag tag);
ConstructionTag construction_tag_from_string(const std::string& s);

struct Edge {
  int neighbor = 0;
  double weight = 0.0;
};

// Fingerprint graph over the RPs of a train split. Node i's feature is the
// element-wise mean of that RP's training fingerprints, normalized. Edge
// lists are directed per-node neighbor sets, sorted by neighbor index.
struct FingerprintGraph {
  Eigen::MatrixXd node_features;         // n_rps x N, row per RP
  std::vector<std::vector<Edge>> edges;  // per-node, ascending neighbor id
  ConstructionTag tag = ConstructionTag::gate;
  int k_nb = 0;            // fixed MDHV neighbor budget this graph serves
  int isolated_nodes = 0;  // ed construction may leave nodes edgeless
  double phi_ed = 0.0;     // threshold the ed constructor was built with
  bool sqrt_ed = false;

  int n_rps() const { return static_cast<int>(node_features.rows()); }
  int n_aps() const { return static_cast<int>(node_features.cols()); }
  NormalizedFingerprint node_feature(int i) const;
};

struct EdConfig {
  double phi_ed = 0.0;
  bool sqrt_ed = false;  // threshold on sqrt(sum sq) instead of Eq.-5 form
};

struct KnnConfig {
  int k = 1;
};

struct GatParams {
  Eigen::MatrixXd w;         // d x N projection
  Eigen::VectorXd a;         // length 2d attention vector
  double leaky_slope = 0.2;
};

// Cosine of two normalized fingerprints, in [-1, 1]. An all-zero operand
// (all-sentinel fingerprint) scores 0 against everything.
double attention_score(const NormalizedFingerprint& fi,
                       const NormalizedFingerprint& fj);
double attention_score(const Eigen::VectorXd& fi, const Eigen::VectorXd& fj);

// Eq.-form distance: mean of squared per-AP differences (no square root).
double ed_distance(const NormalizedFingerprint& fi,
                   const NormalizedFingerprint& fj);
double ed_distance(const Eigen::VectorXd& fi, const Eigen::VectorXd& fj);

// Conventional Euclidean distance, for the --sqrt-ed comparison mode.
double euclidean_distance(const Eigen::VectorXd& fi, const Eigen::VectorXd& fj);

// Per-RP mean of the split's fingerprints, normalized. Requires at least
// one sample for every rp in [0, n_rps).
Eigen::MatrixXd compute_node_features(const Dataset& ds);

// Path-adjacency edges (i, i+-1) plus each node's k_nb highest-attention
// neighbors, deduplicated; every edge weighted by its attention score.
FingerprintGraph build_gate_graph(const Dataset& ds, const ModelConfig& cfg);

// Edges exactly where distance <= phi_ed; uniform weights 1/|N(i)|.
FingerprintGraph build_ed_graph(const Dataset& ds, const EdConfig& cfg);

// Exactly k lowest-distance neighbors per node; uniform weights 1/k.
FingerprintGraph build_knn_graph(const Dataset& ds, const KnnConfig& cfg);

GatParams make_gat_params(int n_aps, int dim, std::uint64_t seed,
                          double leaky_slope = 0.2);

// Replaces edge weights with the per-node softmax of
// LeakyReLU(a . [W f_i || W f_j]); weights over each node sum to 1.
FingerprintGraph gat_attention(const FingerprintGraph& graph,
                               const GatParams& params);

void save_graph(const FingerprintGraph& graph,
                const std::filesystem::path& path);
FingerprintGraph load_graph(const std::filesystem::path& path);
std::string serialize_graph(const FingerprintGraph& graph);

}  // namespace gate

#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "gate/gcn.hpp"
#include "gate/graph.hpp"
#include "gate/mdhv.hpp"
#include "gate/types.hpp"

namespace gate {

// A fingerprint captured at an unknown location, attached to the graph as a
// temporary node during inference.
struct QueryFingerprint {
  Fingerprint fingerprint;
  std::string device_id;  // metadata only
};

struct Prediction {
  int rp_id = 0;
  Eigen::VectorXd probabilities;
  std::vector<int> neighbor_ids;  // selected neighbors, best score first
  double latency_ms = 0.0;
  double rtec_ms = 0.0;  // edge construction + MDHV assembly
  double gcn_ms = 0.0;   // forward pass
  bool low_confidence = false;  // all-sentinel query
};

// Scores the query against every stored node feature and returns the
// k_nb best (node_id, attention) pairs, ties toward the lower index.
// The stored graph is never mutated.
std::vector<NeighborCandidate> attach_and_score(const QueryFingerprint& query,
                                                const FingerprintGraph& graph);

// Full online pipeline: temporary-node edges, MDHV assembled exactly as in
// training, forward pass. With ablation=no_mdhv the edge step is skipped
// and the bare fingerprint is classified.
Prediction infer(const QueryFingerprint& query, const FingerprintGraph& graph,
                 const GcnModel& model);

}  // namespace gate

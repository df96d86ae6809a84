#include "gate/rtec.hpp"

#include <algorithm>
#include <chrono>

namespace gate {

std::vector<NeighborCandidate> attach_and_score(const QueryFingerprint& query,
                                                const FingerprintGraph& graph) {
  if (query.fingerprint.n_aps() != graph.n_aps()) {
    throw ConfigError("attach_and_score: query length != graph AP count");
  }
  if (graph.k_nb < 1) {
    throw ConfigError("attach_and_score: graph carries no neighbor budget");
  }
  Eigen::VectorXd q = normalize(query.fingerprint).values;

  std::vector<NeighborCandidate> all;
  all.reserve(graph.n_rps());
  for (int i = 0; i < graph.n_rps(); ++i) {
    double s = attention_score(
        q, Eigen::VectorXd(graph.node_features.row(i).transpose()));
    all.push_back({i, s});
  }
  return select_neighbors(std::move(all), graph.k_nb);
}

Prediction infer(const QueryFingerprint& query, const FingerprintGraph& graph,
                 const GcnModel& model) {
  if (query.fingerprint.n_aps() != model.n_aps) {
    throw ConfigError("infer: query length != model AP count");
  }
  if (graph.n_aps() != model.n_aps || graph.n_rps() != model.n_rps) {
    throw ConfigError("infer: graph does not match model dimensions");
  }
  query.fingerprint.validate();

  Prediction pred;
  Eigen::VectorXd q = normalize(query.fingerprint).values;
  pred.low_confidence = q.norm() == 0.0;

  auto t0 = std::chrono::steady_clock::now();
  int k = model.config.k_nb(graph.n_rps());
  Mdhv mdhv;
  if (model.config.ablation == Ablation::no_mdhv) {
    // RTEC disabled: the classifier sees the bare fingerprint.
    mdhv.m = q;
  } else {
    if (graph.k_nb != k) {
      throw ConfigError("infer: graph neighbor budget != model config");
    }
    auto selected = attach_and_score(query, graph);
    pred.neighbor_ids.reserve(selected.size());
    for (const auto& nb : selected) pred.neighbor_ids.push_back(nb.id);
    mdhv = assemble_sample_mdhv(q, selected, graph.node_features, k,
                                model.config.ablation);
  }
  scale_gcn_input(mdhv, model.config.ablation, k);
  auto t1 = std::chrono::steady_clock::now();

  pred.probabilities = forward(model, mdhv);
  auto t2 = std::chrono::steady_clock::now();

  Eigen::Index arg;
  pred.probabilities.maxCoeff(&arg);
  pred.rp_id = static_cast<int>(arg);
  pred.rtec_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  pred.gcn_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
  pred.latency_ms = pred.rtec_ms + pred.gcn_ms;
  return pred;
}

}  // namespace gate

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gate/gcn.hpp"
#include "gate/graph.hpp"
#include "gate/rtec.hpp"
#include "gate/simulator.hpp"
#include "gate/types.hpp"

namespace gate {

// Attention embedding width for the frozen-parameter GAT baseline.
inline constexpr int kGatAttentionDim = 8;

struct DeviceStats {
  std::string device_id;
  int samples = 0;
  double mean_m = 0.0;
  double worst_m = 0.0;
  double best_m = 0.0;
};

struct LatencyStats {
  double rtec_ms_mean = 0.0;
  double gcn_ms_mean = 0.0;
  double total_ms_mean = 0.0;
};

struct EvalReport {
  std::vector<DeviceStats> per_device;  // sorted by device_id
  int n_samples = 0;
  double overall_mean_m = 0.0;
  double overall_worst_m = 0.0;
  double overall_best_m = 0.0;
  double device_variance_m = 0.0;  // max per-device mean - min per-device mean
  LatencyStats latency;
  long long flop_estimate = 0;
  std::string config_echo;
};

// Mean absolute RP-index error per device, in meters (1 RP = 1 m).
EvalReport evaluate(const GcnModel& model, const FingerprintGraph& graph,
                    const Dataset& ds_test);

// Online inference dispatched on the graph's construction tag: gate graphs
// go through RTEC; baseline graphs attach the query by their own edge rule
// (knn: k_nb nearest by distance; ed: the phi_ed threshold set; gat: knn
// base reweighted by the seed-derived attention parameters).
Prediction harness_infer(const GcnModel& model, const FingerprintGraph& graph,
                         const QueryFingerprint& query);

// Shared knobs for canned simulator-backed runs: train on one device's
// samples, test one fingerprint per (rp, device) across all devices.
struct HarnessConfig {
  ModelConfig model;
  int samples_per_rp = 5;
  std::string train_device = "d0";
  bool sqrt_ed = false;
};

struct RunResult {
  GcnModel model;
  FingerprintGraph graph;
  TrainReport train_report;
  EvalReport report;
  std::uint64_t train_hash = 0;
  std::uint64_t test_hash = 0;
};

// Generate splits, build the tagged constructor's graph, train, evaluate.
RunResult run_single(const Scenario& sc, const HarnessConfig& hc,
                     ConstructionTag tag);

// phi_ED chosen as the pairwise-distance quantile whose threshold yields a
// mean degree of about k_nb, so baseline arms share one edge budget.
double derive_phi_ed(const Eigen::MatrixXd& node_features, int k_nb,
                     bool sqrt_ed);

struct SweepCell {
  double nb_percent = 0.0;
  double h_percent = 0.0;
  double mean_error_m = 0.0;
};

std::vector<SweepCell> sweep_nb_h(const Scenario& sc,
                                  const std::vector<double>& nb_list,
                                  const std::vector<double>& h_list,
                                  const HarnessConfig& hc);

struct SamplesRow {
  int samples_per_rp = 0;
  EvalReport report;
};

std::vector<SamplesRow> sweep_samples(const Scenario& sc,
                                      const std::vector<int>& sample_counts,
                                      const HarnessConfig& hc);

struct AblationRow {
  Ablation variant = Ablation::full;
  EvalReport report;
};

std::vector<AblationRow> run_ablation(const Scenario& sc,
                                      const std::vector<Ablation>& variants,
                                      const HarnessConfig& hc);

struct BaselineRow {
  std::string name;
  EvalReport report;
};

// Trains the same GCN atop each constructor's graph. With knn_classifier,
// appends a plain nearest-training-fingerprint row.
std::vector<BaselineRow> run_baselines(const Scenario& sc,
                                       const std::vector<ConstructionTag>& tags,
                                       bool knn_classifier,
                                       const HarnessConfig& hc);

struct TruncationRow {
  double percent = 0.0;
  Ablation variant = Ablation::full;
  double mean_error_m = 0.0;
};

// Edge structure is frozen at 0% truncation; node features and attention
// weights are recomputed from the truncated train split per level.
std::vector<TruncationRow> run_truncation(const Scenario& sc,
                                          const std::vector<double>& percents,
                                          const std::vector<Ablation>& variants,
                                          const HarnessConfig& hc);

// --- canned trend experiments ------------------------------------------------
// Fixed-recipe runs shared by `gate calibrate` and the regression suite, so
// calibration always measures exactly the configurations the checks assert.

namespace experiments {

struct NbBlindspot {
  double err_low_nb = 0.0;   // mean error at NB=10%
  double err_high_nb = 0.0;  // mean error at NB=100%
};
NbBlindspot nb_blindspot(std::uint64_t seed);  // dense-AP preset (b1 shape)

struct SamplesVariance {
  double variance_at_1 = 0.0;
  double variance_at_5 = 0.0;
};
SamplesVariance samples_variance(std::uint64_t seed);  // 7-device preset

struct AblationOrdering {
  double full = 0.0;
  double no_msg = 0.0;
  double no_ahv = 0.0;
  double no_mdhv = 0.0;
};
AblationOrdering ablation_ordering(std::uint64_t seed);

struct BaselineOrdering {
  double gate = 0.0;
  double gat = 0.0;
  double ed = 0.0;
  double knn = 0.0;
};
BaselineOrdering baseline_ordering(std::uint64_t seed);

struct TruncationTrend {
  std::vector<double> percents;
  std::vector<double> full_err;
  std::vector<double> no_ahv_err;
};
TruncationTrend truncation_trend(std::uint64_t seed);

}  // namespace experiments

// --- report emission (deterministic bytes) ----------------------------------

std::string eval_report_csv(const EvalReport& r, bool zero_latency);
std::string sweep_csv(const std::vector<SweepCell>& cells);
std::string samples_csv(const std::vector<SamplesRow>& rows);
std::string ablation_csv(const std::vector<AblationRow>& rows,
                         bool zero_latency);
std::string baselines_csv(const std::vector<BaselineRow>& rows,
                          bool zero_latency);
std::string truncation_csv(const std::vector<TruncationRow>& rows);

}  // namespace gate

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "gate/graph.hpp"
#include "gate/mdhv.hpp"
#include "gate/types.hpp"

namespace gate {

// GCN input conditioning, applied identically when assembling training and
// inference inputs. Each MDHV column is brought to O(1) scale (F by 1/100,
// MSG by 1/(100 k) for neighbor budget k, AHV columns are already
// norm-divided) and then mean-centered. Centering keeps conv pre-activation
// signs balanced across AP rows -- without it a narrow all-ReLU stack can be
// born dead on nonnegative inputs -- and cancels constant per-device RSS
// offsets.
inline constexpr double kMdhvInputScale = 0.01;

void scale_gcn_input(Mdhv& mdhv, Ablation ablation, int k_nb);

// Two kernel-1 conv layers (per-AP-row dense maps over MDHV columns) and a
// fully connected softmax head over the RP classes.
struct GcnModel {
  Eigen::MatrixXd conv1_w;  // C x C
  Eigen::VectorXd conv1_b;  // C
  Eigen::MatrixXd conv2_w;  // C2 x C
  Eigen::VectorXd conv2_b;  // C2
  Eigen::MatrixXd fc_w;     // n_rps x (N * C2)
  Eigen::VectorXd fc_b;     // n_rps
  ModelConfig config;
  int n_aps = 0;
  int n_rps = 0;

  int c() const { return static_cast<int>(conv1_w.rows()); }
  int c2() const { return static_cast<int>(conv2_w.rows()); }
  void validate() const;
};

struct Gradients {
  Eigen::MatrixXd conv1_w;
  Eigen::VectorXd conv1_b;
  Eigen::MatrixXd conv2_w;
  Eigen::VectorXd conv2_b;
  Eigen::MatrixXd fc_w;
  Eigen::VectorXd fc_b;
};

struct TrainReport {
  std::vector<double> epoch_loss;
  double final_train_accuracy = 0.0;
  double wall_seconds = 0.0;
  long long flop_estimate = 0;
};

// conv2 channel count under H% compression: retain (1 - H/100) of C.
int conv2_channels(double h_percent, int c);

GcnModel init_model(const ModelConfig& cfg, int n_aps, int n_rps,
                    int mdhv_cols);

Eigen::VectorXd forward(const GcnModel& model, const Mdhv& mdhv);
double loss(const Eigen::VectorXd& probs, int true_rp);
Gradients backward(const GcnModel& model, const Mdhv& mdhv, int true_rp);

// Builds the GATE graph from the train split and trains on per-sample MDHVs.
std::pair<GcnModel, TrainReport> train(const Dataset& ds_train,
                                       const ModelConfig& cfg);

// Trains atop an already-constructed graph (gate or any baseline
// constructor). For gate graphs the per-sample neighbor weights are the
// attention scores of the sample against the node features; other
// constructors keep their stored edge weights.
std::pair<GcnModel, TrainReport> train_on_graph(const Dataset& ds_train,
                                                const FingerprintGraph& graph,
                                                const ModelConfig& cfg);

// The per-sample MDHV used during training, exposed so online inference can
// assemble queries through the identical path.
Mdhv training_sample_mdhv(const FingerprintGraph& graph,
                          const ModelConfig& cfg, int rp_id,
                          const NormalizedFingerprint& sample);

long long count_params(const GcnModel& model);

// 2 x multiply-accumulate count for one end-to-end inference, including
// RTEC scoring and MDHV assembly (per the ablation's active components).
long long estimate_flops(const GcnModel& model);

void save_model(const GcnModel& model, const std::filesystem::path& path);
GcnModel load_model(const std::filesystem::path& path);

}  // namespace gate

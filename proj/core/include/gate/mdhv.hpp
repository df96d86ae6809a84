#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "gate/types.hpp"

namespace gate {

// Attention-weighted sum of neighbor fingerprints.
struct MsgVector {
  Eigen::VectorXd values;
};

// One column per connected neighbor: (F_i (.) F_j) / (|F_i| |F_j|).
// Each column sums to the attention score between the two fingerprints.
struct AhvTensor {
  Eigen::MatrixXd columns;  // N x k

  int n_aps() const { return static_cast<int>(columns.rows()); }
  int k() const { return static_cast<int>(columns.cols()); }
};

// Per-node feature matrix fed to the GCN. Column layout is fixed:
//   full:    [F | MSG | AHV_1..k]   (C = 2 + k)
//   no_msg:  [F | AHV_1..k]         (C = 1 + k)
//   no_ahv:  [F | MSG]              (C = 2)
//   no_mdhv: [F]                    (C = 1)
struct Mdhv {
  Eigen::MatrixXd m;  // N x C

  int n_aps() const { return static_cast<int>(m.rows()); }
  int cols() const { return static_cast<int>(m.cols()); }
};

int mdhv_width(Ablation ablation, int k);

MsgVector compute_msg(
    const NormalizedFingerprint& f_center,
    const std::vector<std::pair<NormalizedFingerprint, double>>& neighbors);

// Columns in the order the neighbor list is given; a zero-norm operand
// yields a zero column (same guard as attention_score).
AhvTensor compute_ahv(const NormalizedFingerprint& f_center,
                      const std::vector<NormalizedFingerprint>& neighbors);

Mdhv assemble_mdhv(const NormalizedFingerprint& f, const MsgVector& msg,
                   const AhvTensor& ahv, Ablation ablation);

// --- pipeline assembly -----------------------------------------------------
// The same code path serves offline (per training sample) and online (RTEC
// query) assembly, so both phases order, truncate and pad identically.

struct NeighborCandidate {
  int id = 0;
  double weight = 0.0;
};

// Orders by descending weight, ties toward the lower node index, and
// truncates to at most k entries. This is the fixed neighbor rank used for
// AHV column order and for MSG's neighbor set.
std::vector<NeighborCandidate> select_neighbors(
    std::vector<NeighborCandidate> candidates, int k);

// Builds the N x C matrix for one center vector against the graph's node
// feature rows. Fewer than k selected neighbors pad with zero columns.
Mdhv assemble_sample_mdhv(const Eigen::VectorXd& center,
                          const std::vector<NeighborCandidate>& selected,
                          const Eigen::MatrixXd& node_features, int k,
                          Ablation ablation);

}  // namespace gate

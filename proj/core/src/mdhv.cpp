#include "gate/mdhv.hpp"

#include <algorithm>

namespace gate {

int mdhv_width(Ablation ablation, int k) {
  switch (ablation) {
    case Ablation::full: return 2 + k;
    case Ablation::no_msg: return 1 + k;
    case Ablation::no_ahv: return 2;
    case Ablation::no_mdhv: return 1;
  }
  return 2 + k;
}

MsgVector compute_msg(
    const NormalizedFingerprint& f_center,
    const std::vector<std::pair<NormalizedFingerprint, double>>& neighbors) {
  MsgVector msg;
  msg.values = Eigen::VectorXd::Zero(f_center.n_aps());
  for (const auto& [fp, w] : neighbors) {
    if (fp.n_aps() != f_center.n_aps()) {
      throw ConfigError("compute_msg: neighbor length mismatch");
    }
    msg.values += w * fp.values;
  }
  return msg;
}

AhvTensor compute_ahv(const NormalizedFingerprint& f_center,
                      const std::vector<NormalizedFingerprint>& neighbors) {
  if (neighbors.empty()) throw ConfigError("compute_ahv: empty neighbor list");
  AhvTensor ahv;
  int n = f_center.n_aps();
  ahv.columns = Eigen::MatrixXd::Zero(n, static_cast<int>(neighbors.size()));
  double nc = f_center.values.norm();
  for (std::size_t j = 0; j < neighbors.size(); ++j) {
    const auto& fj = neighbors[j];
    if (fj.n_aps() != n) throw ConfigError("compute_ahv: length mismatch");
    double nj = fj.values.norm();
    if (nc == 0.0 || nj == 0.0) continue;  // zero column
    ahv.columns.col(static_cast<int>(j)) =
        f_center.values.cwiseProduct(fj.values) / (nc * nj);
  }
  return ahv;
}

Mdhv assemble_mdhv(const NormalizedFingerprint& f, const MsgVector& msg,
                   const AhvTensor& ahv, Ablation ablation) {
  int n = f.n_aps();
  bool use_msg = ablation == Ablation::full || ablation == Ablation::no_ahv;
  bool use_ahv = ablation == Ablation::full || ablation == Ablation::no_msg;
  if (use_msg && msg.values.size() != n) {
    throw ConfigError("assemble_mdhv: MSG length mismatch");
  }
  if (use_ahv && ahv.columns.rows() != n) {
    throw ConfigError("assemble_mdhv: AHV row count mismatch");
  }

  int k = use_ahv ? ahv.k() : 0;
  Mdhv out;
  out.m.resize(n, mdhv_width(ablation, k));
  int col = 0;
  out.m.col(col++) = f.values;
  if (use_msg) out.m.col(col++) = msg.values;
  if (use_ahv) {
    out.m.block(0, col, n, k) = ahv.columns;
  }
  return out;
}

std::vector<NeighborCandidate> select_neighbors(
    std::vector<NeighborCandidate> candidates, int k) {
  std::sort(candidates.begin(), candidates.end(),
            [](const NeighborCandidate& a, const NeighborCandidate& b) {
              if (a.weight != b.weight) return a.weight > b.weight;
              return a.id < b.id;
            });
  if (static_cast<int>(candidates.size()) > k) candidates.resize(k);
  return candidates;
}

Mdhv assemble_sample_mdhv(const Eigen::VectorXd& center,
                          const std::vector<NeighborCandidate>& selected,
                          const Eigen::MatrixXd& node_features, int k,
                          Ablation ablation) {
  int n = static_cast<int>(center.size());
  if (node_features.cols() != n) {
    throw ConfigError("assemble_sample_mdhv: feature width mismatch");
  }
  if (static_cast<int>(selected.size()) > k) {
    throw ConfigError("assemble_sample_mdhv: more neighbors than budget");
  }

  Mdhv out;
  out.m = Eigen::MatrixXd::Zero(n, mdhv_width(ablation, k));
  int col = 0;
  out.m.col(col++) = center;

  if (ablation == Ablation::full || ablation == Ablation::no_ahv) {
    Eigen::VectorXd msg = Eigen::VectorXd::Zero(n);
    for (const auto& nb : selected) {
      msg += nb.weight * node_features.row(nb.id).transpose();
    }
    out.m.col(col++) = msg;
  }

  if (ablation == Ablation::full || ablation == Ablation::no_msg) {
    double nc = center.norm();
    for (std::size_t j = 0; j < selected.size(); ++j) {
      Eigen::VectorXd fj = node_features.row(selected[j].id).transpose();
      double nj = fj.norm();
      if (nc == 0.0 || nj == 0.0) {
        ++col;  // zero column already in place
        continue;
      }
      out.m.col(col++) = center.cwiseProduct(fj) / (nc * nj);
    }
    col += k - static_cast<int>(selected.size());  // zero padding
  }
  return out;
}

}  // namespace gate

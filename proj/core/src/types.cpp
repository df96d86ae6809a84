#include "gate/types.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace gate {

void Fingerprint::validate() const {
  for (Eigen::Index k = 0; k < rss.size(); ++k) {
    double v = rss[k];
    if (!std::isfinite(v) || v < kRssSentinel || v > kRssMax) {
      throw SchemaError("rss out of range: " + std::to_string(v) + " at ap " +
                        std::to_string(k));
    }
  }
}

NormalizedFingerprint normalize(const Fingerprint& fp) {
  NormalizedFingerprint out;
  out.values = fp.rss.array() + 100.0;
  return out;
}

std::string to_string(SplitTag tag) {
  return tag == SplitTag::train ? "train" : "test";
}

SplitTag split_tag_from_string(const std::string& s) {
  if (s == "train") return SplitTag::train;
  if (s == "test") return SplitTag::test;
  throw ConfigError("unknown split tag: " + s);
}

bool operator==(const Fingerprint& a, const Fingerprint& b) {
  if (a.rss.size() != b.rss.size()) return false;
  return std::equal(a.rss.data(), a.rss.data() + a.rss.size(), b.rss.data());
}

bool operator==(const LabeledSample& a, const LabeledSample& b) {
  return a.rp_id == b.rp_id && a.device_id == b.device_id &&
         a.sample_idx == b.sample_idx && a.fingerprint == b.fingerprint;
}

void Dataset::validate() const {
  if (n_aps < 1) throw SchemaError("dataset has no AP columns");
  if (n_rps < 1) throw SchemaError("dataset has no RPs");
  std::map<std::pair<int, std::string>, int> per_cell;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (s.fingerprint.n_aps() != n_aps) {
      throw SchemaError("inconsistent AP count at row " + std::to_string(i + 1));
    }
    if (s.rp_id < 0 || s.rp_id >= n_rps) {
      throw SchemaError("rp_id out of range at row " + std::to_string(i + 1));
    }
    s.fingerprint.validate();
    per_cell[{s.rp_id, s.device_id}]++;
  }
  if (split_tag == SplitTag::train) {
    for (const auto& [cell, count] : per_cell) {
      if (count > 5) {
        throw SchemaError("train split holds more than 5 samples for rp " +
                          std::to_string(cell.first) + ", device " +
                          cell.second);
      }
    }
  }
}

std::string to_string(Ablation a) {
  switch (a) {
    case Ablation::full: return "full";
    case Ablation::no_msg: return "no_msg";
    case Ablation::no_ahv: return "no_ahv";
    case Ablation::no_mdhv: return "no_mdhv";
  }
  return "full";
}

Ablation ablation_from_string(const std::string& s) {
  if (s == "full") return Ablation::full;
  if (s == "no_msg") return Ablation::no_msg;
  if (s == "no_ahv") return Ablation::no_ahv;
  if (s == "no_mdhv") return Ablation::no_mdhv;
  throw ConfigError("unknown ablation variant: " + s);
}

std::string to_string(Optimizer o) {
  return o == Optimizer::adam ? "adam" : "sgd";
}

Optimizer optimizer_from_string(const std::string& s) {
  if (s == "adam") return Optimizer::adam;
  if (s == "sgd") return Optimizer::sgd;
  throw ConfigError("unknown optimizer: " + s);
}

void ModelConfig::validate() const {
  if (!(nb_percent > 0.0 && nb_percent <= 100.0)) {
    throw ConfigError("nb_percent must be in (0, 100]");
  }
  if (!(h_percent >= 0.0 && h_percent <= 90.0)) {
    throw ConfigError("h_percent must be in [0, 90]");
  }
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
}

int ModelConfig::k_nb(int n_rps) const {
  if (n_rps < 2) throw ConfigError("k_nb undefined for n_rps < 2");
  int k = static_cast<int>(std::lround(nb_percent / 100.0 * n_rps));
  return std::clamp(k, 1, n_rps - 1);
}

}  // namespace gate

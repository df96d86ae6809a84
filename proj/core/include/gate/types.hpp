#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gate {

// RSS floor: an undetected AP is encoded exactly as this sentinel.
inline constexpr double kRssSentinel = -100.0;
inline constexpr double kRssMax = 0.0;

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One RSS reading per visible AP, dBm in [-100, 0].
struct Fingerprint {
  Eigen::VectorXd rss;

  int n_aps() const { return static_cast<int>(rss.size()); }
  void validate() const;
};

// Shift by +100 so an undetected AP contributes exactly zero to dot
// products; all similarity math operates on this form, never on raw dBm.
struct NormalizedFingerprint {
  Eigen::VectorXd values;  // in [0, 100]

  int n_aps() const { return static_cast<int>(values.size()); }
};

NormalizedFingerprint normalize(const Fingerprint& fp);

bool operator==(const Fingerprint& a, const Fingerprint& b);

struct LabeledSample {
  int rp_id = 0;  // ordinal index along the path; 1 RP == 1 meter
  std::string device_id;
  int sample_idx = 0;
  Fingerprint fingerprint;
};

bool operator==(const LabeledSample& a, const LabeledSample& b);

enum class SplitTag { train, test };

std::string to_string(SplitTag tag);
SplitTag split_tag_from_string(const std::string& s);

struct Dataset {
  int n_aps = 0;
  int n_rps = 0;
  std::vector<LabeledSample> samples;
  SplitTag split_tag = SplitTag::train;

  void validate() const;
  bool operator==(const Dataset&) const = default;
};

enum class Ablation { full, no_msg, no_ahv, no_mdhv };

std::string to_string(Ablation a);
Ablation ablation_from_string(const std::string& s);

enum class Optimizer { adam, sgd };

std::string to_string(Optimizer o);
Optimizer optimizer_from_string(const std::string& s);

struct ModelConfig {
  double nb_percent = 10.0;   // edges per node as % of nodes ("NB")
  double h_percent = 50.0;    // compression between conv layers ("H")
  double learning_rate = 0.001;
  int epochs = 1000;
  std::uint64_t seed = 1;
  Ablation ablation = Ablation::full;
  Optimizer optimizer = Optimizer::adam;

  void validate() const;

  // Neighbor count derived from NB%; clamped so nb_percent=100 yields the
  // complete graph (k_nb must stay below n_rps).
  int k_nb(int n_rps) const;
};

}  // namespace gate

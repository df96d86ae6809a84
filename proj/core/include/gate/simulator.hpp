#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gate/rng.hpp"
#include "gate/types.hpp"

namespace gate {

struct PathLoss {
  double p0_dbm = -30.0;  // received power at 1 m
  double exponent = 3.0;
};

// Per-AP sigma realizes the non-uniform AP-specific offsets; shadowing is a
// single shared draw per sample (the uniform-offset noise component).
struct NoiseModel {
  Eigen::VectorXd per_ap_sigma;
  double shadowing_sigma = 1.0;
};

// Affine RSS distortion plus a detection floor, standing in for one
// handset's chipset/firmware behavior.
struct DeviceProfile {
  std::string device_id;
  double gain_a = 1.0;
  double offset_b = 0.0;     // dBm
  double detect_floor = -95.0;  // readings below become the -100 sentinel
};

struct Scenario {
  int n_rps = 0;
  int n_aps = 0;
  std::vector<Eigen::Vector2d> ap_positions;
  std::vector<Eigen::Vector2d> rp_positions;  // 1 m apart along a polyline
  PathLoss pathloss;
  NoiseModel noise;
  std::vector<DeviceProfile> devices;
  std::uint64_t seed = 1;

  void validate() const;
  const DeviceProfile& device(const std::string& device_id) const;
  std::vector<std::string> device_ids() const;
};

struct ScenarioSpec {
  int n_rps = 20;
  int n_aps = 30;
  double sigma_min = 0.5;
  double sigma_max = 12.0;
  double shadowing_sigma = 1.0;
  PathLoss pathloss;
  int n_devices = 7;
  // Single sigma shared by every AP (the uniform-noise contrast mode).
  bool euclidean_noise = false;
};

// Named presets: b1..b5 reproduce the (n_rps, n_aps) shapes (59,339),
// (60,203), (60,183), (48,125), (88,78); `noisefree` is a clean 20x30
// single-device world; `hetero` is a 40x60 seven-device world.
ScenarioSpec preset_spec(const std::string& name);

Scenario generate_scenario(const ScenarioSpec& spec, std::uint64_t seed);

// Log-distance path loss + per-AP noise + shared shadowing, then the device
// transform and floor/sentinel clamping. Consumes draws from rng in a fixed
// order (shadowing first, then one per AP).
Fingerprint sample_fingerprint(const Scenario& sc, int rp_id,
                               const std::string& device_id, Rng& rng);

// Full factorial rp x device x sample. Each cell uses its own PRNG stream
// keyed by (seed, split, rp, device, sample), so any subset regenerates
// identically regardless of order.
Dataset generate_dataset(const Scenario& sc, int samples_per_rp,
                         const std::vector<std::string>& devices,
                         SplitTag split);

// Forces a seeded random subset of floor(percent/100 * N) AP indices to the
// sentinel, the same subset for every sample and device at a given RP.
Dataset truncate_fingerprints(const Dataset& ds, double percent,
                              std::uint64_t seed);

void save_scenario(const Scenario& sc, const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace gate

#include "gate/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>

namespace gate {

using json = nlohmann::ordered_json;

void Scenario::validate() const {
  if (n_rps < 2) throw ConfigError("scenario: n_rps must be >= 2");
  if (n_aps < 1) throw ConfigError("scenario: n_aps must be >= 1");
  if (static_cast<int>(ap_positions.size()) != n_aps ||
      static_cast<int>(rp_positions.size()) != n_rps) {
    throw ConfigError("scenario: position counts inconsistent");
  }
  if (!(pathloss.exponent > 0.0)) {
    throw ConfigError("scenario: pathloss exponent must be > 0");
  }
  if (noise.per_ap_sigma.size() != n_aps) {
    throw ConfigError("scenario: per_ap_sigma length != n_aps");
  }
  if (noise.per_ap_sigma.minCoeff() < 0.0 || noise.shadowing_sigma < 0.0) {
    throw ConfigError("scenario: negative noise sigma");
  }
  if (devices.empty()) throw ConfigError("scenario: no device profiles");
  for (const auto& d : devices) {
    if (!(d.gain_a > 0.0)) throw ConfigError("scenario: device gain must be > 0");
  }
}

const DeviceProfile& Scenario::device(const std::string& device_id) const {
  for (const auto& d : devices) {
    if (d.device_id == device_id) return d;
  }
  throw ConfigError("unknown device: " + device_id);
}

std::vector<std::string> Scenario::device_ids() const {
  std::vector<std::string> ids;
  ids.reserve(devices.size());
  for (const auto& d : devices) ids.push_back(d.device_id);
  return ids;
}

ScenarioSpec preset_spec(const std::string& name) {
  ScenarioSpec s;
  if (name == "b1") {
    s.n_rps = 59;
    s.n_aps = 339;
  } else if (name == "b2") {
    s.n_rps = 60;
    s.n_aps = 203;
  } else if (name == "b3") {
    s.n_rps = 60;
    s.n_aps = 183;
  } else if (name == "b4") {
    s.n_rps = 48;
    s.n_aps = 125;
  } else if (name == "b5") {
    s.n_rps = 88;
    s.n_aps = 78;
  } else if (name == "noisefree") {
    s.n_rps = 20;
    s.n_aps = 30;
    s.sigma_min = 0.0;
    s.sigma_max = 0.0;
    s.shadowing_sigma = 0.0;
    s.n_devices = 1;
  } else if (name == "hetero") {
    s.n_rps = 40;
    s.n_aps = 60;
  } else {
    throw ConfigError("unknown preset: " + name);
  }
  return s;
}

namespace {

// Seven fixed handset stand-ins; d0 is the neutral training device.
const DeviceProfile kDevicePresets[7] = {
    {"d0", 1.00, 0.0, -95.0},  {"d1", 0.94, -3.5, -92.0},
    {"d2", 1.06, 2.5, -97.0},  {"d3", 0.90, 6.0, -90.0},
    {"d4", 1.10, -6.0, -94.0}, {"d5", 0.97, 4.0, -88.0},
    {"d6", 1.03, -2.0, -96.0},
};

}  // namespace

Scenario generate_scenario(const ScenarioSpec& spec, std::uint64_t seed) {
  if (spec.n_rps < 2 || spec.n_aps < 1) {
    throw ConfigError("scenario spec: invalid sizes");
  }
  if (spec.n_devices < 1 || spec.n_devices > 7) {
    throw ConfigError("scenario spec: n_devices must be in [1, 7]");
  }
  if (spec.sigma_min < 0.0 || spec.sigma_max < spec.sigma_min) {
    throw ConfigError("scenario spec: bad sigma range");
  }

  Scenario sc;
  sc.seed = seed;
  sc.n_rps = spec.n_rps;
  sc.n_aps = spec.n_aps;
  sc.pathloss = spec.pathloss;
  sc.noise.shadowing_sigma = spec.shadowing_sigma;

  Rng rng(derive_seed(seed, std::string_view("scenario")));

  // Corridor-style polyline: unit steps with occasional 90-degree turns.
  sc.rp_positions.reserve(spec.n_rps);
  Eigen::Vector2d pos(0.0, 0.0);
  Eigen::Vector2d dir(1.0, 0.0);
  int until_turn = 6 + static_cast<int>(rng.below(9));
  for (int i = 0; i < spec.n_rps; ++i) {
    sc.rp_positions.push_back(pos);
    pos += dir;
    if (--until_turn == 0) {
      double sign = rng.uniform01() < 0.5 ? 1.0 : -1.0;
      dir = Eigen::Vector2d(-sign * dir.y(), sign * dir.x());
      until_turn = 6 + static_cast<int>(rng.below(9));
    }
  }

  double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
  for (const auto& p : sc.rp_positions) {
    min_x = std::min(min_x, p.x());
    max_x = std::max(max_x, p.x());
    min_y = std::min(min_y, p.y());
    max_y = std::max(max_y, p.y());
  }
  const double margin = 8.0;
  sc.ap_positions.reserve(spec.n_aps);
  for (int k = 0; k < spec.n_aps; ++k) {
    double x = rng.uniform(min_x - margin, max_x + margin);
    double y = rng.uniform(min_y - margin, max_y + margin);
    sc.ap_positions.emplace_back(x, y);
  }

  sc.noise.per_ap_sigma.resize(spec.n_aps);
  if (spec.euclidean_noise) {
    double shared = rng.uniform(spec.sigma_min, spec.sigma_max);
    sc.noise.per_ap_sigma.setConstant(shared);
  } else {
    for (int k = 0; k < spec.n_aps; ++k) {
      sc.noise.per_ap_sigma[k] = rng.uniform(spec.sigma_min, spec.sigma_max);
    }
  }

  sc.devices.assign(kDevicePresets, kDevicePresets + spec.n_devices);
  sc.validate();
  return sc;
}

Fingerprint sample_fingerprint(const Scenario& sc, int rp_id,
                               const std::string& device_id, Rng& rng) {
  if (rp_id < 0 || rp_id >= sc.n_rps) {
    throw ConfigError("sample_fingerprint: rp_id out of range");
  }
  const DeviceProfile& dev = sc.device(device_id);
  const Eigen::Vector2d& rp = sc.rp_positions[rp_id];

  Fingerprint fp;
  fp.rss.resize(sc.n_aps);
  double shadow = sc.noise.shadowing_sigma > 0.0
                      ? rng.normal(0.0, sc.noise.shadowing_sigma)
                      : 0.0;
  for (int k = 0; k < sc.n_aps; ++k) {
    double d = (sc.ap_positions[k] - rp).norm();
    double clean = sc.pathloss.p0_dbm -
                   10.0 * sc.pathloss.exponent * std::log10(std::max(d, 1.0));
    double sigma = sc.noise.per_ap_sigma[k];
    double noisy = clean + (sigma > 0.0 ? rng.normal(0.0, sigma) : 0.0) + shadow;
    double distorted = dev.gain_a * noisy + dev.offset_b;
    if (distorted < dev.detect_floor) {
      fp.rss[k] = kRssSentinel;
    } else {
      fp.rss[k] = std::clamp(distorted, kRssSentinel, kRssMax);
    }
  }
  return fp;
}

Dataset generate_dataset(const Scenario& sc, int samples_per_rp,
                         const std::vector<std::string>& devices,
                         SplitTag split) {
  sc.validate();
  if (split == SplitTag::train && (samples_per_rp < 1 || samples_per_rp > 5)) {
    throw ConfigError("train split requires 1 <= samples_per_rp <= 5");
  }
  if (samples_per_rp < 1) throw ConfigError("samples_per_rp must be >= 1");
  if (devices.empty()) throw ConfigError("generate_dataset: no devices");

  Dataset ds;
  ds.n_aps = sc.n_aps;
  ds.n_rps = sc.n_rps;
  ds.split_tag = split;
  ds.samples.reserve(static_cast<std::size_t>(sc.n_rps) * devices.size() *
                     samples_per_rp);
  std::string split_key = to_string(split);
  for (int rp = 0; rp < sc.n_rps; ++rp) {
    for (const auto& dev : devices) {
      sc.device(dev);  // fail early on unknown device
      for (int s = 0; s < samples_per_rp; ++s) {
        Rng cell(derive_seed(sc.seed, std::string_view(split_key),
                             static_cast<std::uint64_t>(rp),
                             std::string_view(dev),
                             static_cast<std::uint64_t>(s)));
        LabeledSample row;
        row.rp_id = rp;
        row.device_id = dev;
        row.sample_idx = s;
        row.fingerprint = sample_fingerprint(sc, rp, dev, cell);
        ds.samples.push_back(std::move(row));
      }
    }
  }
  ds.validate();
  return ds;
}

Dataset truncate_fingerprints(const Dataset& ds, double percent,
                              std::uint64_t seed) {
  if (percent < 0.0 || percent > 90.0) {
    throw ConfigError("truncation percent must be in [0, 90]");
  }
  Dataset out = ds;
  int drop = static_cast<int>(std::floor(percent / 100.0 * ds.n_aps));
  if (drop == 0) return out;

  std::vector<std::vector<int>> dropped(ds.n_rps);
  for (int rp = 0; rp < ds.n_rps; ++rp) {
    std::vector<int> idx(ds.n_aps);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(derive_seed(seed, std::string_view("truncate"),
                        static_cast<std::uint64_t>(rp)));
    // Partial Fisher-Yates: first `drop` entries form the dropped set.
    for (int i = 0; i < drop; ++i) {
      int j = i + static_cast<int>(rng.below(ds.n_aps - i));
      std::swap(idx[i], idx[j]);
    }
    dropped[rp].assign(idx.begin(), idx.begin() + drop);
  }
  for (auto& s : out.samples) {
    for (int k : dropped[s.rp_id]) s.fingerprint.rss[k] = kRssSentinel;
  }
  return out;
}

namespace {

json vec2_list(const std::vector<Eigen::Vector2d>& v) {
  json arr = json::array();
  for (const auto& p : v) arr.push_back(json::array({p.x(), p.y()}));
  return arr;
}

std::vector<Eigen::Vector2d> vec2_from_json(const json& j) {
  std::vector<Eigen::Vector2d> out;
  out.reserve(j.size());
  for (const auto& p : j) {
    out.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  }
  return out;
}

}  // namespace

void save_scenario(const Scenario& sc, const std::filesystem::path& path) {
  sc.validate();
  json j;
  j["version"] = 1;
  j["n_rps"] = sc.n_rps;
  j["n_aps"] = sc.n_aps;
  j["rp_positions"] = vec2_list(sc.rp_positions);
  j["ap_positions"] = vec2_list(sc.ap_positions);
  j["pathloss"] = {{"p0_dbm", sc.pathloss.p0_dbm},
                   {"exponent", sc.pathloss.exponent}};
  json sigma = json::array();
  for (int k = 0; k < sc.n_aps; ++k) sigma.push_back(sc.noise.per_ap_sigma[k]);
  j["noise"] = {{"per_ap_sigma", std::move(sigma)},
                {"shadowing_sigma", sc.noise.shadowing_sigma}};
  json devs = json::array();
  for (const auto& d : sc.devices) {
    devs.push_back({{"device_id", d.device_id},
                    {"gain_a", d.gain_a},
                    {"offset_b", d.offset_b},
                    {"detect_floor", d.detect_floor}});
  }
  j["devices"] = std::move(devs);
  j["seed"] = sc.seed;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scenario file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SchemaError("corrupt scenario file " + path.string() + ": " +
                      e.what());
  }
  Scenario sc;
  try {
    sc.n_rps = j.at("n_rps").get<int>();
    sc.n_aps = j.at("n_aps").get<int>();
    sc.rp_positions = vec2_from_json(j.at("rp_positions"));
    sc.ap_positions = vec2_from_json(j.at("ap_positions"));
    sc.pathloss.p0_dbm = j.at("pathloss").at("p0_dbm").get<double>();
    sc.pathloss.exponent = j.at("pathloss").at("exponent").get<double>();
    const auto& sigma = j.at("noise").at("per_ap_sigma");
    sc.noise.per_ap_sigma.resize(static_cast<int>(sigma.size()));
    for (int k = 0; k < sc.noise.per_ap_sigma.size(); ++k) {
      sc.noise.per_ap_sigma[k] = sigma[k].get<double>();
    }
    sc.noise.shadowing_sigma = j.at("noise").at("shadowing_sigma").get<double>();
    for (const auto& d : j.at("devices")) {
      sc.devices.push_back({d.at("device_id").get<std::string>(),
                            d.at("gain_a").get<double>(),
                            d.at("offset_b").get<double>(),
                            d.at("detect_floor").get<double>()});
    }
    sc.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw SchemaError("corrupt scenario file " + path.string() + ": " +
                      e.what());
  }
  sc.validate();
  return sc;
}

}  // namespace gate

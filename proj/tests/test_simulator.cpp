#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "gate/dataset_io.hpp"
#include "gate/simulator.hpp"

using namespace gate;

TEST_CASE("presets reproduce the building shapes") {
  struct Expect {
    const char* name;
    int rps, aps;
  } shapes[] = {{"b1", 59, 339}, {"b2", 60, 203}, {"b3", 60, 183},
                {"b4", 48, 125}, {"b5", 88, 78}};
  for (const auto& e : shapes) {
    Scenario sc = generate_scenario(preset_spec(e.name), 1);
    CHECK(sc.n_rps == e.rps);
    CHECK(sc.n_aps == e.aps);
    CHECK(sc.devices.size() == 7);
  }
  CHECK_THROWS_AS(preset_spec("b9"), ConfigError);
}

TEST_CASE("same spec and seed give identical scenarios") {
  Scenario a = generate_scenario(preset_spec("hetero"), 42);
  Scenario b = generate_scenario(preset_spec("hetero"), 42);
  CHECK(a.noise.per_ap_sigma.isApprox(b.noise.per_ap_sigma, 0.0));
  REQUIRE(a.rp_positions.size() == b.rp_positions.size());
  for (std::size_t i = 0; i < a.rp_positions.size(); ++i) {
    CHECK(a.rp_positions[i].isApprox(b.rp_positions[i], 0.0));
  }
  for (std::size_t i = 0; i < a.ap_positions.size(); ++i) {
    CHECK(a.ap_positions[i].isApprox(b.ap_positions[i], 0.0));
  }
  Scenario c = generate_scenario(preset_spec("hetero"), 43);
  CHECK(!a.noise.per_ap_sigma.isApprox(c.noise.per_ap_sigma, 0.0));
}

TEST_CASE("rp spacing is exactly 1 meter along the path") {
  Scenario sc = generate_scenario(preset_spec("b5"), 9);
  for (std::size_t i = 0; i + 1 < sc.rp_positions.size(); ++i) {
    CHECK((sc.rp_positions[i + 1] - sc.rp_positions[i]).norm() ==
          doctest::Approx(1.0));
  }
}

TEST_CASE("noise-free fingerprint equals the path-loss law") {
  ScenarioSpec spec = preset_spec("noisefree");
  Scenario sc = generate_scenario(spec, 5);
  // Pin an AP exactly 1 m from RP 0: rss must equal p0.
  sc.ap_positions[0] = sc.rp_positions[0] + Eigen::Vector2d(1.0, 0.0);
  Rng rng(1);
  Fingerprint fp = sample_fingerprint(sc, 0, "d0", rng);
  CHECK(fp.rss[0] == doctest::Approx(sc.pathloss.p0_dbm));

  // Sub-meter distances clamp to the 1 m reference.
  sc.ap_positions[0] = sc.rp_positions[0] + Eigen::Vector2d(0.2, 0.0);
  Rng rng2(1);
  Fingerprint near = sample_fingerprint(sc, 0, "d0", rng2);
  CHECK(near.rss[0] == doctest::Approx(sc.pathloss.p0_dbm));
}

TEST_CASE("signals below the device floor become the sentinel") {
  ScenarioSpec spec = preset_spec("noisefree");
  Scenario sc = generate_scenario(spec, 6);
  sc.ap_positions[0] = sc.rp_positions[0] + Eigen::Vector2d(5000.0, 0.0);
  Rng rng(1);
  Fingerprint fp = sample_fingerprint(sc, 0, "d0", rng);
  CHECK(fp.rss[0] == -100.0);
}

TEST_CASE("every generated rss lies in [-100, 0]") {
  Scenario sc = generate_scenario(preset_spec("hetero"), 77);
  Dataset ds = generate_dataset(sc, 3, sc.device_ids(), SplitTag::train);
  for (const auto& s : ds.samples) {
    CHECK(s.fingerprint.rss.minCoeff() >= -100.0);
    CHECK(s.fingerprint.rss.maxCoeff() <= 0.0);
  }
}

TEST_CASE("noise-free fingerprints are monotone in distance") {
  Scenario sc = generate_scenario(preset_spec("noisefree"), 31);
  Rng rng(1);
  for (int rp_a = 0; rp_a < sc.n_rps; ++rp_a) {
    Fingerprint fa = sample_fingerprint(sc, rp_a, "d0", rng);
    for (int rp_b = 0; rp_b < sc.n_rps; ++rp_b) {
      if (rp_a == rp_b) continue;
      for (int k = 0; k < sc.n_aps; k += 7) {
        double da = (sc.ap_positions[k] - sc.rp_positions[rp_a]).norm();
        double db = (sc.ap_positions[k] - sc.rp_positions[rp_b]).norm();
        if (da < db) {
          Fingerprint fb = sample_fingerprint(sc, rp_b, "d0", rng);
          CHECK(fa.rss[k] >= fb.rss[k]);
        }
      }
    }
  }
}

TEST_CASE("per-AP variance is heterogeneous only in non-Euclidean mode") {
  auto empirical_sigma_ratio = [](bool euclidean) {
    ScenarioSpec spec;
    spec.n_rps = 4;
    spec.n_aps = 12;
    spec.euclidean_noise = euclidean;
    Scenario sc = generate_scenario(spec, 3);
    // Keep the detect floor out of the way so variance is purely the noise.
    sc.devices = {{"d0", 1.0, 0.0, -5000.0}};
    const int trials = 1000;
    Eigen::MatrixXd obs(trials, sc.n_aps);
    Rng rng(17);
    for (int t = 0; t < trials; ++t) {
      Fingerprint fp = sample_fingerprint(sc, 0, "d0", rng);
      obs.row(t) = fp.rss.transpose();
    }
    Eigen::VectorXd var(sc.n_aps);
    for (int k = 0; k < sc.n_aps; ++k) {
      double mean = obs.col(k).mean();
      var[k] = (obs.col(k).array() - mean).square().sum() / (trials - 1);
    }
    return var.maxCoeff() / var.minCoeff();
  };
  CHECK(empirical_sigma_ratio(false) > 2.0);   // non-Euclidean: spread sigmas
  CHECK(empirical_sigma_ratio(true) < 2.0);    // shared sigma: near-uniform
}

TEST_CASE("generate_dataset counts and invariants") {
  Scenario sc = generate_scenario(preset_spec("noisefree"), 11);
  Dataset ds = generate_dataset(sc, 5, {"d0"}, SplitTag::train);
  CHECK(ds.samples.size() == 20u * 5u);
  CHECK_NOTHROW(ds.validate());

  Scenario multi = generate_scenario(preset_spec("hetero"), 12);
  Dataset test = generate_dataset(multi, 1, multi.device_ids(), SplitTag::test);
  CHECK(test.samples.size() == 40u * 7u);
}

TEST_CASE("keyed streams regenerate any device subset identically") {
  Scenario sc = generate_scenario(preset_spec("hetero"), 21);
  Dataset all = generate_dataset(sc, 2, sc.device_ids(), SplitTag::train);
  Dataset only_d3 = generate_dataset(sc, 2, {"d3"}, SplitTag::train);

  std::size_t j = 0;
  for (const auto& s : all.samples) {
    if (s.device_id != "d3") continue;
    REQUIRE(j < only_d3.samples.size());
    CHECK(s == only_d3.samples[j]);
    ++j;
  }
  CHECK(j == only_d3.samples.size());
}

TEST_CASE("train and test streams never coincide") {
  Scenario sc = generate_scenario(preset_spec("hetero"), 23);
  Dataset train = generate_dataset(sc, 1, {"d0"}, SplitTag::train);
  Dataset test = generate_dataset(sc, 1, {"d0"}, SplitTag::test);
  REQUIRE(train.samples.size() == test.samples.size());
  int identical = 0;
  for (std::size_t i = 0; i < train.samples.size(); ++i) {
    if (train.samples[i].fingerprint == test.samples[i].fingerprint) {
      ++identical;
    }
  }
  CHECK(identical == 0);
}

TEST_CASE("truncation: identity at 0, exact counts, determinism") {
  ScenarioSpec ten;
  ten.n_rps = 6;
  ten.n_aps = 10;
  ten.sigma_min = ten.sigma_max = 0.0;
  ten.shadowing_sigma = 0.0;
  ten.n_devices = 1;
  Scenario sc10 = generate_scenario(ten, 29);
  sc10.devices[0].detect_floor = -5000.0;
  Dataset ds = generate_dataset(sc10, 3, {"d0"}, SplitTag::train);

  Dataset zero = truncate_fingerprints(ds, 0.0, 5);
  CHECK(zero == ds);

  Dataset half = truncate_fingerprints(ds, 50.0, 5);
  for (const auto& s : half.samples) {
    int dropped = 0;
    for (int k = 0; k < 10; ++k) {
      if (s.fingerprint.rss[k] == -100.0) ++dropped;
    }
    // 50% of 10 APs forced to sentinel (original data has no sentinels here).
    CHECK(dropped == 5);
  }

  // Same RP drops identical AP subsets across samples.
  Dataset again = truncate_fingerprints(ds, 50.0, 5);
  CHECK(again == half);
  for (std::size_t i = 0; i + 1 < half.samples.size(); ++i) {
    if (half.samples[i].rp_id != half.samples[i + 1].rp_id) continue;
    for (int k = 0; k < 10; ++k) {
      CHECK((half.samples[i].fingerprint.rss[k] == -100.0) ==
            (half.samples[i + 1].fingerprint.rss[k] == -100.0));
    }
  }

  CHECK_THROWS_AS(truncate_fingerprints(ds, 95.0, 5), ConfigError);
  CHECK_THROWS_AS(truncate_fingerprints(ds, -1.0, 5), ConfigError);
}

TEST_CASE("scenario JSON round-trip") {
  Scenario sc = generate_scenario(preset_spec("hetero"), 37);
  auto p = std::filesystem::temp_directory_path() / "gate_scenario_test.json";
  save_scenario(sc, p);
  Scenario back = load_scenario(p);
  CHECK(back.n_rps == sc.n_rps);
  CHECK(back.n_aps == sc.n_aps);
  CHECK(back.seed == sc.seed);
  CHECK(back.noise.per_ap_sigma.isApprox(sc.noise.per_ap_sigma, 0.0));
  CHECK(back.devices.size() == sc.devices.size());
  CHECK(back.devices[3].gain_a == sc.devices[3].gain_a);
  for (std::size_t i = 0; i < sc.rp_positions.size(); ++i) {
    CHECK(back.rp_positions[i].isApprox(sc.rp_positions[i], 0.0));
  }
  // Regeneration from the loaded scenario matches the original datasets.
  Dataset a = generate_dataset(sc, 2, {"d0"}, SplitTag::train);
  Dataset b = generate_dataset(back, 2, {"d0"}, SplitTag::train);
  CHECK(a == b);
  std::filesystem::remove(p);
}

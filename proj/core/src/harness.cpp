#include "gate/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>

#include "gate/dataset_io.hpp"
#include "gate/rng.hpp"

namespace gate {

namespace {

std::vector<std::pair<double, int>> distances_to_nodes(
    const FingerprintGraph& g, const Eigen::VectorXd& q, bool sqrt_ed) {
  std::vector<std::pair<double, int>> dist;
  dist.reserve(g.n_rps());
  for (int i = 0; i < g.n_rps(); ++i) {
    Eigen::VectorXd fi = g.node_features.row(i).transpose();
    double d = sqrt_ed ? euclidean_distance(q, fi) : ed_distance(q, fi);
    dist.emplace_back(d, i);
  }
  std::sort(dist.begin(), dist.end());
  return dist;
}

// Query-side edge rule for each baseline constructor; the returned
// candidates go through the same select_neighbors/assembly path as a
// training sample.
std::vector<NeighborCandidate> baseline_attach(const FingerprintGraph& g,
                                               const Eigen::VectorXd& q, int k,
                                               const GatParams* gat) {
  std::vector<NeighborCandidate> cands;
  switch (g.tag) {
    case ConstructionTag::knn: {
      auto dist = distances_to_nodes(g, q, false);
      double w = 1.0 / static_cast<double>(k);
      for (int r = 0; r < k; ++r) cands.push_back({dist[r].second, w});
      break;
    }
    case ConstructionTag::ed: {
      for (int i = 0; i < g.n_rps(); ++i) {
        Eigen::VectorXd fi = g.node_features.row(i).transpose();
        double d = g.sqrt_ed ? euclidean_distance(q, fi) : ed_distance(q, fi);
        if (d <= g.phi_ed) cands.push_back({i, 0.0});
      }
      if (!cands.empty()) {
        double w = 1.0 / static_cast<double>(cands.size());
        for (auto& c : cands) c.weight = w;
      }
      break;
    }
    case ConstructionTag::gat: {
      if (gat == nullptr) {
        throw ConfigError("baseline_attach: gat parameters required");
      }
      auto dist = distances_to_nodes(g, q, false);
      int d = static_cast<int>(gat->w.rows());
      Eigen::VectorXd pq = gat->w * q;
      Eigen::VectorXd a_src = gat->a.head(d);
      Eigen::VectorXd a_dst = gat->a.tail(d);
      double self_term = pq.dot(a_src);
      std::vector<double> logits(k);
      double max_logit = -std::numeric_limits<double>::infinity();
      for (int r = 0; r < k; ++r) {
        Eigen::VectorXd fj = g.node_features.row(dist[r].second).transpose();
        double z = self_term + (gat->w * fj).dot(a_dst);
        if (z < 0.0) z *= gat->leaky_slope;
        logits[r] = z;
        max_logit = std::max(max_logit, z);
      }
      double denom = 0.0;
      for (double& z : logits) {
        z = std::exp(z - max_logit);
        denom += z;
      }
      for (int r = 0; r < k; ++r) {
        cands.push_back({dist[r].second, logits[r] / denom});
      }
      break;
    }
    case ConstructionTag::gate:
      throw ConfigError("baseline_attach: gate graphs use RTEC");
  }
  return select_neighbors(std::move(cands), k);
}

}  // namespace

Prediction harness_infer(const GcnModel& model, const FingerprintGraph& graph,
                         const QueryFingerprint& query) {
  if (graph.tag == ConstructionTag::gate ||
      model.config.ablation == Ablation::no_mdhv) {
    return infer(query, graph, model);
  }
  if (query.fingerprint.n_aps() != model.n_aps ||
      graph.n_aps() != model.n_aps || graph.n_rps() != model.n_rps) {
    throw ConfigError("harness_infer: dimension mismatch");
  }
  query.fingerprint.validate();

  Prediction pred;
  Eigen::VectorXd q = normalize(query.fingerprint).values;
  pred.low_confidence = q.norm() == 0.0;

  auto t0 = std::chrono::steady_clock::now();
  int k = model.config.k_nb(graph.n_rps());
  GatParams params;
  const GatParams* pp = nullptr;
  if (graph.tag == ConstructionTag::gat) {
    params = make_gat_params(model.n_aps, kGatAttentionDim, model.config.seed);
    pp = &params;
  }
  auto selected = baseline_attach(graph, q, k, pp);
  pred.neighbor_ids.reserve(selected.size());
  for (const auto& nb : selected) pred.neighbor_ids.push_back(nb.id);
  Mdhv mdhv = assemble_sample_mdhv(q, selected, graph.node_features, k,
                                   model.config.ablation);
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

EvalReport evaluate(const GcnModel& model, const FingerprintGraph& graph,
                    const Dataset& ds_test) {
  ds_test.validate();
  if (ds_test.samples.empty()) throw ConfigError("evaluate: empty test set");
  if (ds_test.n_aps != model.n_aps || ds_test.n_rps != model.n_rps) {
    throw ConfigError("evaluate: test split does not match model");
  }

  std::map<std::string, std::vector<double>> per_device;
  EvalReport r;
  double err_sum = 0.0;
  for (const auto& s : ds_test.samples) {
    QueryFingerprint q{s.fingerprint, s.device_id};
    Prediction pred = harness_infer(model, graph, q);
    double err = std::abs(pred.rp_id - s.rp_id);
    per_device[s.device_id].push_back(err);
    err_sum += err;
    r.latency.rtec_ms_mean += pred.rtec_ms;
    r.latency.gcn_ms_mean += pred.gcn_ms;
    r.latency.total_ms_mean += pred.latency_ms;
  }

  r.n_samples = static_cast<int>(ds_test.samples.size());
  r.overall_mean_m = err_sum / r.n_samples;
  r.latency.rtec_ms_mean /= r.n_samples;
  r.latency.gcn_ms_mean /= r.n_samples;
  r.latency.total_ms_mean /= r.n_samples;

  double best_dev_mean = std::numeric_limits<double>::infinity();
  double worst_dev_mean = -best_dev_mean;
  r.overall_best_m = std::numeric_limits<double>::infinity();
  r.overall_worst_m = 0.0;
  for (const auto& [dev, errs] : per_device) {
    DeviceStats st;
    st.device_id = dev;
    st.samples = static_cast<int>(errs.size());
    st.mean_m = 0.0;
    st.worst_m = 0.0;
    st.best_m = std::numeric_limits<double>::infinity();
    for (double e : errs) {
      st.mean_m += e;
      st.worst_m = std::max(st.worst_m, e);
      st.best_m = std::min(st.best_m, e);
    }
    st.mean_m /= st.samples;
    best_dev_mean = std::min(best_dev_mean, st.mean_m);
    worst_dev_mean = std::max(worst_dev_mean, st.mean_m);
    r.overall_worst_m = std::max(r.overall_worst_m, st.worst_m);
    r.overall_best_m = std::min(r.overall_best_m, st.best_m);
    r.per_device.push_back(std::move(st));
  }
  r.device_variance_m = worst_dev_mean - best_dev_mean;
  r.flop_estimate = estimate_flops(model);
  return r;
}

double derive_phi_ed(const Eigen::MatrixXd& node_features, int k_nb,
                     bool sqrt_ed) {
  int n = static_cast<int>(node_features.rows());
  if (n < 2) throw ConfigError("derive_phi_ed: need at least 2 nodes");
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Eigen::VectorXd fi = node_features.row(i).transpose();
      Eigen::VectorXd fj = node_features.row(j).transpose();
      dists.push_back(sqrt_ed ? euclidean_distance(fi, fj)
                              : ed_distance(fi, fj));
    }
  }
  std::sort(dists.begin(), dists.end());
  // Qualifying pairs contribute two directed edges each; aim the threshold
  // at a mean degree of k_nb.
  std::size_t target = static_cast<std::size_t>(
      std::max(1L, std::lround(k_nb * n / 2.0)));
  target = std::min(target, dists.size());
  return dists[target - 1];
}

namespace {

std::string echo_config(const HarnessConfig& hc, const std::string& tag) {
  const ModelConfig& m = hc.model;
  return "tag=" + tag + " nb=" + format_double(m.nb_percent) +
         " h=" + format_double(m.h_percent) +
         " lr=" + format_double(m.learning_rate) +
         " epochs=" + std::to_string(m.epochs) +
         " seed=" + std::to_string(m.seed) +
         " ablation=" + to_string(m.ablation) +
         " optimizer=" + to_string(m.optimizer) +
         " samples_per_rp=" + std::to_string(hc.samples_per_rp) +
         " train_device=" + hc.train_device;
}

}  // namespace

RunResult run_single(const Scenario& sc, const HarnessConfig& hc,
                     ConstructionTag tag) {
  hc.model.validate();
  Dataset train = generate_dataset(sc, hc.samples_per_rp, {hc.train_device},
                                   SplitTag::train);
  Dataset test = generate_dataset(sc, 1, sc.device_ids(), SplitTag::test);

  int k = hc.model.k_nb(sc.n_rps);
  FingerprintGraph graph;
  switch (tag) {
    case ConstructionTag::gate:
      graph = build_gate_graph(train, hc.model);
      break;
    case ConstructionTag::knn:
      graph = build_knn_graph(train, KnnConfig{k});
      break;
    case ConstructionTag::ed: {
      Eigen::MatrixXd feats = compute_node_features(train);
      EdConfig cfg{derive_phi_ed(feats, k, hc.sqrt_ed), hc.sqrt_ed};
      graph = build_ed_graph(train, cfg);
      graph.k_nb = k;  // MDHV width budget
      break;
    }
    case ConstructionTag::gat: {
      FingerprintGraph base = build_knn_graph(train, KnnConfig{k});
      GatParams params =
          make_gat_params(sc.n_aps, kGatAttentionDim, hc.model.seed);
      graph = gat_attention(base, params);
      break;
    }
  }

  RunResult rr;
  auto [model, trep] = train_on_graph(train, graph, hc.model);
  rr.model = std::move(model);
  rr.train_report = std::move(trep);
  rr.report = evaluate(rr.model, graph, test);
  rr.report.config_echo = echo_config(hc, to_string(tag));
  rr.graph = std::move(graph);
  rr.train_hash = dataset_hash(train);
  rr.test_hash = dataset_hash(test);
  return rr;
}

std::vector<SweepCell> sweep_nb_h(const Scenario& sc,
                                  const std::vector<double>& nb_list,
                                  const std::vector<double>& h_list,
                                  const HarnessConfig& hc) {
  if (nb_list.empty() || h_list.empty()) {
    throw ConfigError("sweep grid must be non-empty");
  }
  std::vector<SweepCell> cells;
  for (double nb : nb_list) {
    for (double h : h_list) {
      HarnessConfig cell_hc = hc;
      cell_hc.model.nb_percent = nb;
      cell_hc.model.h_percent = h;
      RunResult rr = run_single(sc, cell_hc, ConstructionTag::gate);
      cells.push_back({nb, h, rr.report.overall_mean_m});
    }
  }
  return cells;
}

std::vector<SamplesRow> sweep_samples(const Scenario& sc,
                                      const std::vector<int>& sample_counts,
                                      const HarnessConfig& hc) {
  std::vector<SamplesRow> rows;
  for (int spr : sample_counts) {
    HarnessConfig row_hc = hc;
    row_hc.samples_per_rp = spr;
    RunResult rr = run_single(sc, row_hc, ConstructionTag::gate);
    rows.push_back({spr, std::move(rr.report)});
  }
  return rows;
}

std::vector<AblationRow> run_ablation(const Scenario& sc,
                                      const std::vector<Ablation>& variants,
                                      const HarnessConfig& hc) {
  std::vector<AblationRow> rows;
  std::uint64_t train_hash = 0, test_hash = 0;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    HarnessConfig arm = hc;
    arm.model.ablation = variants[i];
    RunResult rr = run_single(sc, arm, ConstructionTag::gate);
    if (i == 0) {
      train_hash = rr.train_hash;
      test_hash = rr.test_hash;
    } else if (rr.train_hash != train_hash || rr.test_hash != test_hash) {
      throw ConfigError("run_ablation: dataset hash mismatch across arms");
    }
    rows.push_back({variants[i], std::move(rr.report)});
  }
  return rows;
}

namespace {

EvalReport knn_classifier_eval(const Dataset& train, const Dataset& test) {
  std::vector<Eigen::VectorXd> train_feats;
  train_feats.reserve(train.samples.size());
  for (const auto& s : train.samples) {
    train_feats.push_back(normalize(s.fingerprint).values);
  }

  std::map<std::string, std::vector<double>> per_device;
  EvalReport r;
  double err_sum = 0.0;
  for (const auto& s : test.samples) {
    auto t0 = std::chrono::steady_clock::now();
    Eigen::VectorXd q = normalize(s.fingerprint).values;
    double best = std::numeric_limits<double>::infinity();
    int best_rp = 0;
    for (std::size_t i = 0; i < train_feats.size(); ++i) {
      double d = ed_distance(q, train_feats[i]);
      if (d < best) {
        best = d;
        best_rp = train.samples[i].rp_id;
      }
    }
    auto t1 = std::chrono::steady_clock::now();
    double err = std::abs(best_rp - s.rp_id);
    per_device[s.device_id].push_back(err);
    err_sum += err;
    r.latency.rtec_ms_mean +=
        std::chrono::duration<double, std::milli>(t1 - t0).count();
  }
  r.n_samples = static_cast<int>(test.samples.size());
  r.overall_mean_m = err_sum / r.n_samples;
  r.latency.rtec_ms_mean /= r.n_samples;
  r.latency.total_ms_mean = r.latency.rtec_ms_mean;

  double best_dev = std::numeric_limits<double>::infinity();
  double worst_dev = -best_dev;
  r.overall_best_m = std::numeric_limits<double>::infinity();
  for (const auto& [dev, errs] : per_device) {
    DeviceStats st;
    st.device_id = dev;
    st.samples = static_cast<int>(errs.size());
    st.best_m = std::numeric_limits<double>::infinity();
    for (double e : errs) {
      st.mean_m += e;
      st.worst_m = std::max(st.worst_m, e);
      st.best_m = std::min(st.best_m, e);
    }
    st.mean_m /= st.samples;
    best_dev = std::min(best_dev, st.mean_m);
    worst_dev = std::max(worst_dev, st.mean_m);
    r.overall_worst_m = std::max(r.overall_worst_m, st.worst_m);
    r.overall_best_m = std::min(r.overall_best_m, st.best_m);
    r.per_device.push_back(std::move(st));
  }
  r.device_variance_m = worst_dev - best_dev;
  // One distance = N multiply-accumulates; scan over all train samples.
  r.flop_estimate =
      2LL * static_cast<long long>(train.samples.size()) * train.n_aps;
  r.config_echo = "tag=knn_classifier";
  return r;
}

}  // namespace

std::vector<BaselineRow> run_baselines(const Scenario& sc,
                                       const std::vector<ConstructionTag>& tags,
                                       bool knn_classifier,
                                       const HarnessConfig& hc) {
  std::vector<BaselineRow> rows;
  std::uint64_t train_hash = 0, test_hash = 0;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    RunResult rr = run_single(sc, hc, tags[i]);
    if (i == 0) {
      train_hash = rr.train_hash;
      test_hash = rr.test_hash;
    } else if (rr.train_hash != train_hash || rr.test_hash != test_hash) {
      throw ConfigError("run_baselines: dataset hash mismatch across arms");
    }
    rows.push_back({to_string(tags[i]), std::move(rr.report)});
  }
  if (knn_classifier) {
    Dataset train = generate_dataset(sc, hc.samples_per_rp, {hc.train_device},
                                     SplitTag::train);
    Dataset test = generate_dataset(sc, 1, sc.device_ids(), SplitTag::test);
    if (!tags.empty() &&
        (dataset_hash(train) != train_hash || dataset_hash(test) != test_hash)) {
      throw ConfigError("run_baselines: dataset hash mismatch across arms");
    }
    rows.push_back({"knn_classifier", knn_classifier_eval(train, test)});
  }
  return rows;
}

std::vector<TruncationRow> run_truncation(const Scenario& sc,
                                          const std::vector<double>& percents,
                                          const std::vector<Ablation>& variants,
                                          const HarnessConfig& hc) {
  Dataset train = generate_dataset(sc, hc.samples_per_rp, {hc.train_device},
                                   SplitTag::train);
  Dataset test = generate_dataset(sc, 1, sc.device_ids(), SplitTag::test);
  FingerprintGraph base_graph = build_gate_graph(train, hc.model);

  std::vector<TruncationRow> rows;
  for (double pct : percents) {
    Dataset tr = truncate_fingerprints(train, pct, hc.model.seed);
    // The test mask is keyed separately: a query device sees its own random
    // subset of APs, so the train-side drop pattern carries no label signal.
    Dataset te = truncate_fingerprints(
        test, pct, derive_seed(hc.model.seed, std::string_view("test-mask")));

    // Same edge targets as at 0%; features and attention weights refreshed
    // from the truncated fingerprints.
    FingerprintGraph graph = base_graph;
    graph.node_features = compute_node_features(tr);
    for (int i = 0; i < graph.n_rps(); ++i) {
      for (auto& e : graph.edges[i]) {
        e.weight = attention_score(
            Eigen::VectorXd(graph.node_features.row(i).transpose()),
            Eigen::VectorXd(graph.node_features.row(e.neighbor).transpose()));
      }
    }

    for (Ablation v : variants) {
      HarnessConfig arm = hc;
      arm.model.ablation = v;
      auto [model, trep] = train_on_graph(tr, graph, arm.model);
      EvalReport report = evaluate(model, graph, te);
      rows.push_back({pct, v, report.overall_mean_m});
    }
  }
  return rows;
}

namespace experiments {

namespace {

HarnessConfig trend_config(std::uint64_t seed, int epochs) {
  HarnessConfig hc;
  hc.model.nb_percent = 10.0;
  hc.model.h_percent = 50.0;
  // Desk-scale worlds converge reliably at this rate; the paper's 1e-3
  // belongs to building-scale inputs.
  hc.model.learning_rate = 0.01;
  hc.model.epochs = epochs;
  hc.model.seed = seed;
  hc.samples_per_rp = 5;
  return hc;
}

}  // namespace

NbBlindspot nb_blindspot(std::uint64_t seed) {
  Scenario sc = generate_scenario(preset_spec("b1"), seed);
  HarnessConfig hc = trend_config(seed, 60);
  NbBlindspot out;
  out.err_low_nb = run_single(sc, hc, ConstructionTag::gate).report.overall_mean_m;
  hc.model.nb_percent = 100.0;
  out.err_high_nb =
      run_single(sc, hc, ConstructionTag::gate).report.overall_mean_m;
  return out;
}

SamplesVariance samples_variance(std::uint64_t seed) {
  Scenario sc = generate_scenario(preset_spec("hetero"), seed);
  HarnessConfig hc = trend_config(seed, 300);
  auto rows = sweep_samples(sc, {1, 5}, hc);
  SamplesVariance out;
  out.variance_at_1 = rows[0].report.device_variance_m;
  out.variance_at_5 = rows[1].report.device_variance_m;
  return out;
}

AblationOrdering ablation_ordering(std::uint64_t seed) {
  Scenario sc = generate_scenario(preset_spec("hetero"), seed);
  HarnessConfig hc = trend_config(seed, 300);
  auto rows = run_ablation(sc,
                           {Ablation::full, Ablation::no_msg, Ablation::no_ahv,
                            Ablation::no_mdhv},
                           hc);
  AblationOrdering out;
  out.full = rows[0].report.overall_mean_m;
  out.no_msg = rows[1].report.overall_mean_m;
  out.no_ahv = rows[2].report.overall_mean_m;
  out.no_mdhv = rows[3].report.overall_mean_m;
  return out;
}

BaselineOrdering baseline_ordering(std::uint64_t seed) {
  Scenario sc = generate_scenario(preset_spec("b1"), seed);
  HarnessConfig hc = trend_config(seed, 120);
  auto rows = run_baselines(sc,
                            {ConstructionTag::gate, ConstructionTag::gat,
                             ConstructionTag::ed, ConstructionTag::knn},
                            false, hc);
  BaselineOrdering out;
  out.gate = rows[0].report.overall_mean_m;
  out.gat = rows[1].report.overall_mean_m;
  out.ed = rows[2].report.overall_mean_m;
  out.knn = rows[3].report.overall_mean_m;
  return out;
}

TruncationTrend truncation_trend(std::uint64_t seed) {
  Scenario sc = generate_scenario(preset_spec("hetero"), seed);
  HarnessConfig hc = trend_config(seed, 300);
  TruncationTrend out;
  out.percents = {0.0, 20.0, 40.0, 60.0};
  auto rows =
      run_truncation(sc, out.percents, {Ablation::full, Ablation::no_ahv}, hc);
  for (const auto& row : rows) {
    if (row.variant == Ablation::full) {
      out.full_err.push_back(row.mean_error_m);
    } else {
      out.no_ahv_err.push_back(row.mean_error_m);
    }
  }
  return out;
}

}  // namespace experiments

// --- CSV emission ------------------------------------------------------------

std::string eval_report_csv(const EvalReport& r, bool zero_latency) {
  std::string out;
  out += "# overall_mean_m=" + format_double(r.overall_mean_m) + "\n";
  out += "# overall_worst_m=" + format_double(r.overall_worst_m) + "\n";
  out += "# overall_best_m=" + format_double(r.overall_best_m) + "\n";
  out += "# device_variance_m=" + format_double(r.device_variance_m) + "\n";
  out += "# n_samples=" + std::to_string(r.n_samples) + "\n";
  out += "# flop_estimate=" + std::to_string(r.flop_estimate) + "\n";
  LatencyStats lat = zero_latency ? LatencyStats{} : r.latency;
  out += "# rtec_ms_mean=" + format_double(lat.rtec_ms_mean) + "\n";
  out += "# gcn_ms_mean=" + format_double(lat.gcn_ms_mean) + "\n";
  out += "# total_ms_mean=" + format_double(lat.total_ms_mean) + "\n";
  if (!r.config_echo.empty()) out += "# config: " + r.config_echo + "\n";
  out += "device_id,samples,mean_error_m,worst_error_m,best_error_m\n";
  for (const auto& d : r.per_device) {
    out += d.device_id + "," + std::to_string(d.samples) + "," +
           format_double(d.mean_m) + "," + format_double(d.worst_m) + "," +
           format_double(d.best_m) + "\n";
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepCell>& cells) {
  std::string out = "nb_percent,h_percent,mean_error_m\n";
  for (const auto& c : cells) {
    out += format_double(c.nb_percent) + "," + format_double(c.h_percent) +
           "," + format_double(c.mean_error_m) + "\n";
  }
  return out;
}

std::string samples_csv(const std::vector<SamplesRow>& rows) {
  std::string out =
      "samples_per_rp,overall_mean_m,device_variance_m,worst_device_mean_m,"
      "best_device_mean_m\n";
  for (const auto& row : rows) {
    double worst_dev = 0.0, best_dev = 0.0;
    if (!row.report.per_device.empty()) {
      worst_dev = -std::numeric_limits<double>::infinity();
      best_dev = std::numeric_limits<double>::infinity();
      for (const auto& d : row.report.per_device) {
        worst_dev = std::max(worst_dev, d.mean_m);
        best_dev = std::min(best_dev, d.mean_m);
      }
    }
    out += std::to_string(row.samples_per_rp) + "," +
           format_double(row.report.overall_mean_m) + "," +
           format_double(row.report.device_variance_m) + "," +
           format_double(worst_dev) + "," + format_double(best_dev) + "\n";
  }
  return out;
}

std::string ablation_csv(const std::vector<AblationRow>& rows,
                         bool zero_latency) {
  std::string out =
      "variant,overall_mean_m,overall_worst_m,device_variance_m,total_ms_mean,"
      "flop_estimate\n";
  for (const auto& row : rows) {
    double ms = zero_latency ? 0.0 : row.report.latency.total_ms_mean;
    out += to_string(row.variant) + "," +
           format_double(row.report.overall_mean_m) + "," +
           format_double(row.report.overall_worst_m) + "," +
           format_double(row.report.device_variance_m) + "," +
           format_double(ms) + "," + std::to_string(row.report.flop_estimate) +
           "\n";
  }
  return out;
}

std::string baselines_csv(const std::vector<BaselineRow>& rows,
                          bool zero_latency) {
  std::string out =
      "constructor,overall_mean_m,overall_worst_m,device_variance_m,"
      "rtec_ms_mean,gcn_ms_mean,total_ms_mean,flop_estimate\n";
  for (const auto& row : rows) {
    LatencyStats lat = zero_latency ? LatencyStats{} : row.report.latency;
    out += row.name + "," + format_double(row.report.overall_mean_m) + "," +
           format_double(row.report.overall_worst_m) + "," +
           format_double(row.report.device_variance_m) + "," +
           format_double(lat.rtec_ms_mean) + "," +
           format_double(lat.gcn_ms_mean) + "," +
           format_double(lat.total_ms_mean) + "," +
           std::to_string(row.report.flop_estimate) + "\n";
  }
  return out;
}

std::string truncation_csv(const std::vector<TruncationRow>& rows) {
  std::string out = "percent,variant,mean_error_m\n";
  for (const auto& row : rows) {
    out += format_double(row.percent) + "," + to_string(row.variant) + "," +
           format_double(row.mean_error_m) + "\n";
  }
  return out;
}

}  // namespace gate

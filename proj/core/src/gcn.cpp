#include "gate/gcn.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "gate/rng.hpp"

namespace gate {

using json = nlohmann::ordered_json;

void GcnModel::validate() const {
  int C = c();
  int C2 = c2();
  if (conv1_w.cols() != C || conv1_b.size() != C) {
    throw ConfigError("model: conv1 shape inconsistent");
  }
  if (conv2_w.cols() != C || conv2_b.size() != C2) {
    throw ConfigError("model: conv2 shape inconsistent");
  }
  if (fc_w.rows() != n_rps || fc_w.cols() != static_cast<Eigen::Index>(n_aps) * C2 ||
      fc_b.size() != n_rps) {
    throw ConfigError("model: fc shape inconsistent");
  }
  auto finite = [](const Eigen::MatrixXd& m) { return m.allFinite(); };
  if (!finite(conv1_w) || !finite(conv1_b) || !finite(conv2_w) ||
      !finite(conv2_b) || !finite(fc_w) || !finite(fc_b)) {
    throw ConfigError("model: non-finite weights");
  }
}

void scale_gcn_input(Mdhv& mdhv, Ablation ablation, int k_nb) {
  mdhv.m.col(0) *= kMdhvInputScale;  // F
  if (ablation == Ablation::full || ablation == Ablation::no_ahv) {
    mdhv.m.col(1) *= kMdhvInputScale / std::max(1, k_nb);  // MSG
  }
  for (int c = 0; c < mdhv.cols(); ++c) {
    mdhv.m.col(c).array() -= mdhv.m.col(c).mean();
  }
}

int conv2_channels(double h_percent, int c) {
  int c2 = static_cast<int>(std::lround((1.0 - h_percent / 100.0) * c));
  return std::max(1, c2);
}

namespace {

void xavier_fill(Eigen::MatrixXd& m, int fan_in, int fan_out, Rng& rng) {
  double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index col = 0; col < m.cols(); ++col) {
      m(r, col) = rng.uniform(-bound, bound);
    }
  }
}

struct ForwardCache {
  Eigen::MatrixXd h1;    // N x C
  Eigen::MatrixXd h2;    // N x C2
  Eigen::VectorXd flat;  // N * C2, row-major over h2
  Eigen::VectorXd probs;
};

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  Eigen::VectorXd z = (logits.array() - logits.maxCoeff()).exp();
  return z / z.sum();
}

ForwardCache run_forward(const GcnModel& model, const Eigen::MatrixXd& x) {
  int n = model.n_aps;
  int c2 = model.c2();
  ForwardCache fc;
  fc.h1 = ((x * model.conv1_w.transpose()).rowwise() +
           model.conv1_b.transpose())
              .cwiseMax(0.0);
  fc.h2 = ((fc.h1 * model.conv2_w.transpose()).rowwise() +
           model.conv2_b.transpose())
              .cwiseMax(0.0);
  fc.flat.resize(static_cast<Eigen::Index>(n) * c2);
  for (int r = 0; r < n; ++r) {
    fc.flat.segment(static_cast<Eigen::Index>(r) * c2, c2) =
        fc.h2.row(r).transpose();
  }
  fc.probs = softmax(model.fc_w * fc.flat + model.fc_b);
  return fc;
}

void check_input(const GcnModel& model, const Mdhv& mdhv) {
  if (mdhv.n_aps() != model.n_aps || mdhv.cols() != model.c()) {
    throw ConfigError("gcn: MDHV shape mismatch, expected " +
                      std::to_string(model.n_aps) + "x" +
                      std::to_string(model.c()) + ", got " +
                      std::to_string(mdhv.n_aps()) + "x" +
                      std::to_string(mdhv.cols()));
  }
}

}  // namespace

GcnModel init_model(const ModelConfig& cfg, int n_aps, int n_rps,
                    int mdhv_cols) {
  cfg.validate();
  GcnModel m;
  m.config = cfg;
  m.n_aps = n_aps;
  m.n_rps = n_rps;
  int c = mdhv_cols;
  int c2 = conv2_channels(cfg.h_percent, c);

  // MDHV inputs are nonnegative, so a conv unit whose weights sum negative
  // is dead for every sample; with only a handful of channels the whole
  // layer can die at init and training freezes at the uniform fixed point.
  // A positive bias starts every unit in the active region. fc biases stay
  // at zero.
  m.conv1_w.resize(c, c);
  m.conv1_b = Eigen::VectorXd::Constant(c, 0.1);
  m.conv2_w.resize(c2, c);
  m.conv2_b = Eigen::VectorXd::Constant(c2, 0.1);
  m.fc_w.resize(n_rps, static_cast<Eigen::Index>(n_aps) * c2);
  m.fc_b = Eigen::VectorXd::Zero(n_rps);

  Rng rng(derive_seed(cfg.seed, std::string_view("gcn_init")));
  xavier_fill(m.conv1_w, c, c, rng);
  xavier_fill(m.conv2_w, c, c2, rng);
  xavier_fill(m.fc_w, n_aps * c2, n_rps, rng);
  return m;
}

Eigen::VectorXd forward(const GcnModel& model, const Mdhv& mdhv) {
  check_input(model, mdhv);
  return run_forward(model, mdhv.m).probs;
}

double loss(const Eigen::VectorXd& probs, int true_rp) {
  if (true_rp < 0 || true_rp >= probs.size()) {
    throw ConfigError("loss: true_rp out of range");
  }
  return -std::log(std::max(probs[true_rp], 1e-12));
}

Gradients backward(const GcnModel& model, const Mdhv& mdhv, int true_rp) {
  check_input(model, mdhv);
  if (true_rp < 0 || true_rp >= model.n_rps) {
    throw ConfigError("backward: true_rp out of range");
  }
  int n = model.n_aps;
  int c2 = model.c2();

  ForwardCache fc = run_forward(model, mdhv.m);

  Eigen::VectorXd dlogits = fc.probs;
  dlogits[true_rp] -= 1.0;

  Gradients g;
  g.fc_w = dlogits * fc.flat.transpose();
  g.fc_b = dlogits;

  Eigen::VectorXd dflat = model.fc_w.transpose() * dlogits;
  Eigen::MatrixXd dh2(n, c2);
  for (int r = 0; r < n; ++r) {
    dh2.row(r) = dflat.segment(static_cast<Eigen::Index>(r) * c2, c2).transpose();
  }
  dh2 = dh2.cwiseProduct((fc.h2.array() > 0.0).cast<double>().matrix());

  g.conv2_w = dh2.transpose() * fc.h1;
  g.conv2_b = dh2.colwise().sum().transpose();

  Eigen::MatrixXd dh1 = dh2 * model.conv2_w;
  dh1 = dh1.cwiseProduct((fc.h1.array() > 0.0).cast<double>().matrix());

  g.conv1_w = dh1.transpose() * mdhv.m;
  g.conv1_b = dh1.colwise().sum().transpose();
  return g;
}

Mdhv training_sample_mdhv(const FingerprintGraph& graph,
                          const ModelConfig& cfg, int rp_id,
                          const NormalizedFingerprint& sample) {
  int k = cfg.k_nb(graph.n_rps());
  std::vector<NeighborCandidate> cands;
  cands.reserve(graph.edges[rp_id].size());
  for (const auto& e : graph.edges[rp_id]) {
    double w = e.weight;
    if (graph.tag == ConstructionTag::gate) {
      // Attention re-scored against the sample itself, mirroring the
      // temporary-node scoring used online.
      w = attention_score(
          sample.values,
          Eigen::VectorXd(graph.node_features.row(e.neighbor).transpose()));
    }
    cands.push_back({e.neighbor, w});
  }
  auto selected = select_neighbors(std::move(cands), k);
  Mdhv mdhv = assemble_sample_mdhv(sample.values, selected,
                                   graph.node_features, k, cfg.ablation);
  scale_gcn_input(mdhv, cfg.ablation, k);
  return mdhv;
}

namespace {

struct AdamState {
  Eigen::MatrixXd m, v;
  explicit AdamState(const Eigen::MatrixXd& shape)
      : m(Eigen::MatrixXd::Zero(shape.rows(), shape.cols())),
        v(Eigen::MatrixXd::Zero(shape.rows(), shape.cols())) {}
};

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEps = 1e-8;

void adam_step(Eigen::Ref<Eigen::MatrixXd> w, const Eigen::MatrixXd& grad,
               AdamState& st, double lr, int t) {
  st.m = kBeta1 * st.m + (1.0 - kBeta1) * grad;
  st.v = kBeta2 * st.v + (1.0 - kBeta2) * grad.cwiseProduct(grad);
  double mc = 1.0 - std::pow(kBeta1, t);
  double vc = 1.0 - std::pow(kBeta2, t);
  w -= (lr * (st.m / mc).array() / ((st.v / vc).array().sqrt() + kEps))
           .matrix();
}

}  // namespace

std::pair<GcnModel, TrainReport> train(const Dataset& ds_train,
                                       const ModelConfig& cfg) {
  FingerprintGraph graph = build_gate_graph(ds_train, cfg);
  return train_on_graph(ds_train, graph, cfg);
}

std::pair<GcnModel, TrainReport> train_on_graph(const Dataset& ds_train,
                                                const FingerprintGraph& graph,
                                                const ModelConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  cfg.validate();
  ds_train.validate();
  if (ds_train.split_tag != SplitTag::train) {
    throw ConfigError("train requires a train split");
  }
  if (graph.n_rps() != ds_train.n_rps || graph.n_aps() != ds_train.n_aps) {
    throw ConfigError("train: graph and dataset dimensions disagree");
  }

  int n = ds_train.n_aps;
  int n_rps = ds_train.n_rps;
  int k = cfg.k_nb(n_rps);
  int c = mdhv_width(cfg.ablation, k);
  int s_count = static_cast<int>(ds_train.samples.size());
  if (s_count == 0) throw ConfigError("train: empty train split");

  // MDHVs are fixed for the whole run (graph and samples never change), so
  // assemble once and train on the stacked blocks.
  Eigen::MatrixXd x(static_cast<Eigen::Index>(s_count) * n, c);
  std::vector<int> labels(s_count);
  for (int s = 0; s < s_count; ++s) {
    const auto& sample = ds_train.samples[s];
    Mdhv mdhv = training_sample_mdhv(graph, cfg, sample.rp_id,
                                     normalize(sample.fingerprint));
    x.middleRows(static_cast<Eigen::Index>(s) * n, n) = mdhv.m;
    labels[s] = sample.rp_id;
  }

  GcnModel model = init_model(cfg, n, n_rps, c);
  int c2 = model.c2();

  TrainReport report;
  report.epoch_loss.reserve(cfg.epochs);

  AdamState st_w1(model.conv1_w), st_b1(model.conv1_b);
  AdamState st_w2(model.conv2_w), st_b2(model.conv2_b);
  AdamState st_fw(model.fc_w), st_fb(model.fc_b);

  Eigen::MatrixXd flat(s_count, static_cast<Eigen::Index>(n) * c2);
  Eigen::MatrixXd probs(s_count, n_rps);

  auto forward_batch = [&](Eigen::MatrixXd& h1, Eigen::MatrixXd& h2) {
    h1 = ((x * model.conv1_w.transpose()).rowwise() +
          model.conv1_b.transpose())
             .cwiseMax(0.0);
    h2 = ((h1 * model.conv2_w.transpose()).rowwise() +
          model.conv2_b.transpose())
             .cwiseMax(0.0);
    for (int s = 0; s < s_count; ++s) {
      for (int r = 0; r < n; ++r) {
        flat.block(s, static_cast<Eigen::Index>(r) * c2, 1, c2) =
            h2.row(static_cast<Eigen::Index>(s) * n + r);
      }
    }
    Eigen::MatrixXd logits =
        (flat * model.fc_w.transpose()).rowwise() + model.fc_b.transpose();
    for (int s = 0; s < s_count; ++s) {
      probs.row(s) = softmax(logits.row(s).transpose()).transpose();
    }
  };

  Eigen::MatrixXd h1, h2;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    forward_batch(h1, h2);

    double epoch_loss = 0.0;
    Eigen::MatrixXd dlogits = probs;
    for (int s = 0; s < s_count; ++s) {
      epoch_loss += -std::log(std::max(probs(s, labels[s]), 1e-12));
      dlogits(s, labels[s]) -= 1.0;
    }
    epoch_loss /= s_count;
    dlogits /= static_cast<double>(s_count);
    report.epoch_loss.push_back(epoch_loss);

    Gradients g;
    g.fc_w = dlogits.transpose() * flat;
    g.fc_b = dlogits.colwise().sum().transpose();

    Eigen::MatrixXd dflat = dlogits * model.fc_w;  // s_count x (n*c2)
    Eigen::MatrixXd dh2(static_cast<Eigen::Index>(s_count) * n, c2);
    for (int s = 0; s < s_count; ++s) {
      for (int r = 0; r < n; ++r) {
        dh2.row(static_cast<Eigen::Index>(s) * n + r) =
            dflat.block(s, static_cast<Eigen::Index>(r) * c2, 1, c2);
      }
    }
    dh2 = dh2.cwiseProduct((h2.array() > 0.0).cast<double>().matrix());
    g.conv2_w = dh2.transpose() * h1;
    g.conv2_b = dh2.colwise().sum().transpose();

    Eigen::MatrixXd dh1 = dh2 * model.conv2_w;
    dh1 = dh1.cwiseProduct((h1.array() > 0.0).cast<double>().matrix());
    g.conv1_w = dh1.transpose() * x;
    g.conv1_b = dh1.colwise().sum().transpose();

    if (cfg.optimizer == Optimizer::adam) {
      int t = epoch + 1;
      adam_step(model.conv1_w, g.conv1_w, st_w1, cfg.learning_rate, t);
      adam_step(model.conv1_b, g.conv1_b, st_b1, cfg.learning_rate, t);
      adam_step(model.conv2_w, g.conv2_w, st_w2, cfg.learning_rate, t);
      adam_step(model.conv2_b, g.conv2_b, st_b2, cfg.learning_rate, t);
      adam_step(model.fc_w, g.fc_w, st_fw, cfg.learning_rate, t);
      adam_step(model.fc_b, g.fc_b, st_fb, cfg.learning_rate, t);
    } else {
      model.conv1_w -= cfg.learning_rate * g.conv1_w;
      model.conv1_b -= cfg.learning_rate * g.conv1_b;
      model.conv2_w -= cfg.learning_rate * g.conv2_w;
      model.conv2_b -= cfg.learning_rate * g.conv2_b;
      model.fc_w -= cfg.learning_rate * g.fc_w;
      model.fc_b -= cfg.learning_rate * g.fc_b;
    }
  }

  forward_batch(h1, h2);
  int correct = 0;
  for (int s = 0; s < s_count; ++s) {
    Eigen::Index arg;
    probs.row(s).maxCoeff(&arg);
    if (static_cast<int>(arg) == labels[s]) ++correct;
  }
  report.final_train_accuracy =
      static_cast<double>(correct) / static_cast<double>(s_count);
  report.flop_estimate = estimate_flops(model);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return {std::move(model), std::move(report)};
}

long long count_params(const GcnModel& model) {
  return static_cast<long long>(model.conv1_w.size()) + model.conv1_b.size() +
         model.conv2_w.size() + model.conv2_b.size() + model.fc_w.size() +
         model.fc_b.size();
}

long long estimate_flops(const GcnModel& model) {
  long long n = model.n_aps;
  long long rps = model.n_rps;
  long long c = model.c();
  long long c2 = model.c2();
  long long k = model.config.k_nb(model.n_rps);
  Ablation ab = model.config.ablation;

  // MAC accounting for one query: RTEC scoring (dot + node norm per stored
  // node, plus the query norm), MSG and AHV assembly, then the three dense
  // maps. FLOP = 2 x MAC.
  long long macs = 0;
  if (ab != Ablation::no_mdhv) {
    macs += rps * n + rps * n + n;              // attention scores
    if (ab != Ablation::no_msg) macs += k * n;  // MSG
    if (ab != Ablation::no_ahv) macs += k * n;  // AHV
  }
  macs += n * c * c;
  macs += n * c2 * c;
  macs += rps * n * c2;
  return 2 * macs;
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  int rows = static_cast<int>(j.size());
  int cols = rows > 0 ? static_cast<int>(j[0].size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j[r].size()) != cols) {
      throw SchemaError("model file: ragged matrix");
    }
    for (int c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

constexpr int kModelFileVersion = 1;

}  // namespace

void save_model(const GcnModel& model, const std::filesystem::path& path) {
  model.validate();
  json j;
  j["version"] = kModelFileVersion;
  j["config"] = {{"nb_percent", model.config.nb_percent},
                 {"h_percent", model.config.h_percent},
                 {"learning_rate", model.config.learning_rate},
                 {"epochs", model.config.epochs},
                 {"seed", model.config.seed},
                 {"ablation", to_string(model.config.ablation)},
                 {"optimizer", to_string(model.config.optimizer)}};
  j["n_aps"] = model.n_aps;
  j["n_rps"] = model.n_rps;
  j["conv1_w"] = matrix_to_json(model.conv1_w);
  j["conv1_b"] = vector_to_json(model.conv1_b);
  j["conv2_w"] = matrix_to_json(model.conv2_w);
  j["conv2_b"] = vector_to_json(model.conv2_b);
  j["fc_w"] = matrix_to_json(model.fc_w);
  j["fc_b"] = vector_to_json(model.fc_b);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

GcnModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SchemaError("corrupt model file " + path.string() + ": " + e.what());
  }
  GcnModel m;
  try {
    int version = j.at("version").get<int>();
    if (version != kModelFileVersion) {
      throw SchemaError("model file version mismatch: expected " +
                        std::to_string(kModelFileVersion) + ", got " +
                        std::to_string(version));
    }
    const auto& c = j.at("config");
    m.config.nb_percent = c.at("nb_percent").get<double>();
    m.config.h_percent = c.at("h_percent").get<double>();
    m.config.learning_rate = c.at("learning_rate").get<double>();
    m.config.epochs = c.at("epochs").get<int>();
    m.config.seed = c.at("seed").get<std::uint64_t>();
    m.config.ablation = ablation_from_string(c.at("ablation").get<std::string>());
    m.config.optimizer =
        optimizer_from_string(c.at("optimizer").get<std::string>());
    m.n_aps = j.at("n_aps").get<int>();
    m.n_rps = j.at("n_rps").get<int>();
    m.conv1_w = matrix_from_json(j.at("conv1_w"));
    m.conv1_b = vector_from_json(j.at("conv1_b"));
    m.conv2_w = matrix_from_json(j.at("conv2_w"));
    m.conv2_b = vector_from_json(j.at("conv2_b"));
    m.fc_w = matrix_from_json(j.at("fc_w"));
    m.fc_b = vector_from_json(j.at("fc_b"));
  } catch (const json::exception& e) {
    throw SchemaError("corrupt model file " + path.string() + ": " + e.what());
  }
  m.validate();
  return m;
}

}  // namespace gate

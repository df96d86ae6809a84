#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gate/graph.hpp"
#include "gate/mdhv.hpp"
#include "test_util.hpp"

using namespace gate;

namespace {

NormalizedFingerprint nf(std::initializer_list<double> vals) {
  NormalizedFingerprint f;
  f.values.resize(static_cast<int>(vals.size()));
  int i = 0;
  for (double v : vals) f.values[i++] = v;
  return f;
}

}  // namespace

TEST_CASE("compute_msg hand oracles") {
  auto center = nf({0, 0});

  SUBCASE("single neighbor with weight 1 passes through") {
    auto msg = compute_msg(center, {{nf({5, 7}), 1.0}});
    CHECK(msg.values[0] == 5.0);
    CHECK(msg.values[1] == 7.0);
  }
  SUBCASE("weighted sum") {
    auto msg = compute_msg(center, {{nf({2, 0}), 0.5}, {nf({0, 4}), 0.5}});
    CHECK(msg.values[0] == doctest::Approx(1.0));
    CHECK(msg.values[1] == doctest::Approx(2.0));
  }
  SUBCASE("all-zero weights annihilate") {
    auto msg = compute_msg(center, {{nf({2, 3}), 0.0}, {nf({9, 9}), 0.0}});
    CHECK(msg.values.isZero(0.0));
  }
  SUBCASE("empty neighbor list gives the zero vector") {
    auto msg = compute_msg(center, {});
    CHECK(msg.values.isZero(0.0));
  }
}

TEST_CASE("compute_msg is linear in the weights") {
  Rng rng(5);
  for (int t = 0; t < 30; ++t) {
    NormalizedFingerprint c;
    c.values = Eigen::VectorXd::Zero(4);
    std::vector<std::pair<NormalizedFingerprint, double>> nbs, doubled;
    for (int j = 0; j < 3; ++j) {
      NormalizedFingerprint f;
      f.values.resize(4);
      for (int k = 0; k < 4; ++k) f.values[k] = rng.uniform(0.0, 100.0);
      double w = rng.uniform(-1.0, 1.0);
      nbs.push_back({f, w});
      doubled.push_back({f, 2.0 * w});
    }
    auto m1 = compute_msg(c, nbs);
    auto m2 = compute_msg(c, doubled);
    CHECK((m2.values - 2.0 * m1.values).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("compute_ahv hand oracles") {
  SUBCASE("(1,2) vs (2,1): (2,2)/5") {
    auto ahv = compute_ahv(nf({1, 2}), {nf({2, 1})});
    CHECK(ahv.columns(0, 0) == doctest::Approx(0.4));
    CHECK(ahv.columns(1, 0) == doctest::Approx(0.4));
  }
  SUBCASE("self column sums to 1") {
    auto ahv = compute_ahv(nf({3, 4}), {nf({3, 4})});
    CHECK(ahv.columns(0, 0) == doctest::Approx(9.0 / 25.0));
    CHECK(ahv.columns(1, 0) == doctest::Approx(16.0 / 25.0));
    CHECK(ahv.columns.col(0).sum() == doctest::Approx(1.0));
  }
  SUBCASE("all-zero neighbor yields a zero column") {
    auto ahv = compute_ahv(nf({3, 4}), {nf({0, 0}), nf({1, 1})});
    CHECK(ahv.columns.col(0).isZero(0.0));
    CHECK(!ahv.columns.col(1).isZero(0.0));
  }
  SUBCASE("empty list is an error") {
    CHECK_THROWS_AS(compute_ahv(nf({1, 2}), {}), ConfigError);
  }
}

TEST_CASE("AHV column sums equal attention scores (cross-module identity)") {
  Rng rng(11);
  for (int t = 0; t < 100; ++t) {
    NormalizedFingerprint c;
    c.values.resize(7);
    for (int k = 0; k < 7; ++k) c.values[k] = rng.uniform(0.0, 100.0);
    std::vector<NormalizedFingerprint> nbs;
    for (int j = 0; j < 4; ++j) {
      NormalizedFingerprint f;
      f.values.resize(7);
      for (int k = 0; k < 7; ++k) f.values[k] = rng.uniform(0.0, 100.0);
      nbs.push_back(f);
    }
    auto ahv = compute_ahv(c, nbs);
    for (int j = 0; j < 4; ++j) {
      CHECK(ahv.columns.col(j).sum() ==
            doctest::Approx(attention_score(c, nbs[j])).epsilon(1e-9));
    }
  }
}

TEST_CASE("assemble_mdhv shapes per ablation") {
  auto f = nf({1, 2, 3});
  MsgVector msg;
  msg.values = Eigen::VectorXd::Ones(3);
  AhvTensor ahv;
  ahv.columns = Eigen::MatrixXd::Ones(3, 2);

  auto full = assemble_mdhv(f, msg, ahv, Ablation::full);
  CHECK(full.n_aps() == 3);
  CHECK(full.cols() == 4);  // F | MSG | 2 AHV columns
  CHECK(full.m.col(0).isApprox(f.values, 0.0));
  CHECK(full.m.col(1).isApprox(msg.values, 0.0));

  AhvTensor ahv3;
  ahv3.columns = Eigen::MatrixXd::Ones(3, 3);
  auto no_msg = assemble_mdhv(f, msg, ahv3, Ablation::no_msg);
  CHECK(no_msg.cols() == 4);  // F | 3 AHV columns

  auto no_ahv = assemble_mdhv(f, msg, ahv, Ablation::no_ahv);
  CHECK(no_ahv.cols() == 2);

  auto bare = assemble_mdhv(f, msg, ahv, Ablation::no_mdhv);
  CHECK(bare.cols() == 1);
  CHECK(bare.m.col(0).isApprox(f.values, 0.0));
}

TEST_CASE("assemble_mdhv rejects shape mismatches") {
  auto f = nf({1, 2, 3});
  MsgVector bad_msg;
  bad_msg.values = Eigen::VectorXd::Ones(2);
  AhvTensor ahv;
  ahv.columns = Eigen::MatrixXd::Ones(3, 1);
  CHECK_THROWS_AS(assemble_mdhv(f, bad_msg, ahv, Ablation::full), ConfigError);

  MsgVector msg;
  msg.values = Eigen::VectorXd::Ones(3);
  AhvTensor bad_ahv;
  bad_ahv.columns = Eigen::MatrixXd::Ones(2, 1);
  CHECK_THROWS_AS(assemble_mdhv(f, msg, bad_ahv, Ablation::full), ConfigError);
  // Unused parts are not validated under the ablation that drops them.
  CHECK_NOTHROW(assemble_mdhv(f, bad_msg, ahv, Ablation::no_msg));
}

TEST_CASE("identical neighbors with weights summing to 1 reproduce F as MSG") {
  auto f = nf({10, 20, 30});
  std::vector<std::pair<NormalizedFingerprint, double>> nbs = {
      {f, 0.25}, {f, 0.5}, {f, 0.25}};
  auto msg = compute_msg(f, nbs);
  CHECK((msg.values - f.values).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("select_neighbors orders by weight then index and truncates") {
  std::vector<NeighborCandidate> c = {
      {4, 0.5}, {1, 0.9}, {7, 0.9}, {2, 0.1}, {0, 0.5}};
  auto top3 = select_neighbors(c, 3);
  REQUIRE(top3.size() == 3);
  CHECK(top3[0].id == 1);
  CHECK(top3[1].id == 7);
  CHECK(top3[2].id == 0);  // weight tie 0.5: lower index wins over 4

  auto all = select_neighbors(c, 10);
  CHECK(all.size() == 5);
}

TEST_CASE("assemble_sample_mdhv matches a scalar-loop reference") {
  Rng rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    int n_nodes = 3 + static_cast<int>(rng.below(4));  // 3..6
    int n = 2 + static_cast<int>(rng.below(4));        // 2..5 APs
    Eigen::MatrixXd feats(n_nodes, n);
    for (int i = 0; i < n_nodes; ++i) {
      for (int k = 0; k < n; ++k) feats(i, k) = rng.uniform(0.0, 100.0);
    }
    Eigen::VectorXd center(n);
    for (int k = 0; k < n; ++k) center[k] = rng.uniform(0.0, 100.0);

    int k_budget = 1 + static_cast<int>(rng.below(n_nodes));
    std::vector<NeighborCandidate> cands;
    for (int i = 0; i < n_nodes; ++i) {
      cands.push_back({i, rng.uniform(0.0, 1.0)});
    }
    auto selected = select_neighbors(cands, k_budget);
    Mdhv got =
        assemble_sample_mdhv(center, selected, feats, k_budget, Ablation::full);

    //  Scalar reference: [F | MSG | AHV columns in selected order].
    REQUIRE(got.cols() == 2 + k_budget);
    for (int r = 0; r < n; ++r) {
      CHECK(got.m(r, 0) == center[r]);
      double msg = 0.0;
      for (const auto& nb : selected) msg += nb.weight * feats(nb.id, r);
      CHECK(got.m(r, 1) == doctest::Approx(msg).epsilon(1e-12));
      double nc = 0.0;
      for (int q = 0; q < n; ++q) nc += center[q] * center[q];
      nc = std::sqrt(nc);
      for (std::size_t j = 0; j < selected.size(); ++j) {
        double nj = 0.0;
        for (int q = 0; q < n; ++q) {
          nj += feats(selected[j].id, q) * feats(selected[j].id, q);
        }
        nj = std::sqrt(nj);
        double expect =
            nc == 0.0 || nj == 0.0 ? 0.0 : center[r] * feats(selected[j].id, r) / (nc * nj);
        CHECK(got.m(r, 2 + static_cast<int>(j)) ==
              doctest::Approx(expect).epsilon(1e-12));
      }
      // Zero padding beyond the selected set.
      for (int j = static_cast<int>(selected.size()); j < k_budget; ++j) {
        CHECK(got.m(r, 2 + j) == 0.0);
      }
    }
  }
}

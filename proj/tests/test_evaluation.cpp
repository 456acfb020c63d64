#include "torivec/evaluation.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "test_util.h"
#include "json.hpp"
#include "torivec/ioutil.h"
#include "torivec/rng.h"

using namespace torivec;

namespace {

LabeledSet manual_set(const std::vector<std::string>& ids,
                      const std::vector<std::vector<double>>& features,
                      const std::vector<int>& labels,
                      const std::vector<std::string>& names) {
  LabeledSet set;
  set.label_names = names;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    LabeledItem item;
    item.song_id = ids[i];
    item.features = features[i];
    item.label = labels[i];
    set.items.push_back(item);
  }
  return set;
}

// Factor a small PSD Gram matrix so the row vectors realize exact pairwise
// cosine similarities; fails loudly if the matrix is not PSD.
std::vector<std::vector<double>> cholesky_rows(const std::vector<std::vector<double>>& g) {
  const std::size_t n = g.size();
  std::vector<std::vector<double>> l(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = g[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      if (i == j) {
        REQUIRE(s > 0.0);
        l[i][i] = std::sqrt(s);
      } else {
        l[i][j] = s / l[j][j];
      }
    }
  }
  return l;
}

// Direct restatement of the ranking metric: per query, sort candidates by
// (similarity desc, song_id asc), binary relevance, full-depth DCG over IDCG,
// skipping queries without a same-label partner.
double ndcg_oracle(const LabeledSet& set) {
  const std::size_t n = set.items.size();
  std::vector<double> scores;
  for (std::size_t q = 0; q < n; ++q) {
    int partners = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != q && set.items[j].label == set.items[q].label) ++partners;
    }
    if (partners == 0) continue;

    struct Cand {
      double sim;
      const std::string* id;
      bool rel;
    };
    std::vector<Cand> cands;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == q) continue;
      double dot = 0.0, nq = 0.0, nj = 0.0;
      for (std::size_t d = 0; d < set.items[q].features.size(); ++d) {
        dot += set.items[q].features[d] * set.items[j].features[d];
        nq += set.items[q].features[d] * set.items[q].features[d];
        nj += set.items[j].features[d] * set.items[j].features[d];
      }
      cands.push_back({dot / std::sqrt(nq * nj), &set.items[j].song_id,
                       set.items[j].label == set.items[q].label});
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
      if (a.sim != b.sim) return a.sim > b.sim;
      return *a.id < *b.id;
    });
    double dcg = 0.0, idcg = 0.0;
    for (std::size_t r = 0; r < cands.size(); ++r) {
      if (cands[r].rel) dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
      if (static_cast<int>(r) < partners) {
        idcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
      }
    }
    scores.push_back(dcg / idcg);
  }
  REQUIRE_FALSE(scores.empty());
  double sum = 0.0;
  for (double s : scores) sum += s;
  return sum / static_cast<double>(scores.size());
}

// Gaussian blob around a center, one row per point.
void add_blob(std::vector<std::vector<double>>& rows, std::vector<int>& labels,
              const std::vector<double>& center, int count, int label, Rng& rng) {
  for (int i = 0; i < count; ++i) {
    std::vector<double> p = center;
    for (auto& v : p) v += rng.normal() * 0.3;
    rows.push_back(p);
    labels.push_back(label);
  }
}

}  // namespace

TEST_CASE("cosine similarity matrix basics") {
  std::vector<std::vector<double>> rows = {
      {1.0, 0.0}, {2.0, 0.0}, {0.0, 5.0}, {-3.0, 0.0}};
  Tensor64 sim = cosine_similarity_matrix(rows);
  REQUIRE(sim.dim(0) == 4);
  REQUIRE(sim.dim(1) == 4);
  CHECK(sim.at(0, 1) == doctest::Approx(1.0).epsilon(1e-12));   // parallel
  CHECK(sim.at(0, 2) == doctest::Approx(0.0).epsilon(1e-12));   // orthogonal
  CHECK(sim.at(0, 3) == doctest::Approx(-1.0).epsilon(1e-12));  // opposite
  for (int i = 0; i < 4; ++i) {
    CHECK(sim.at(i, i) == doctest::Approx(1.0).epsilon(1e-12));
    for (int j = 0; j < 4; ++j) {
      CHECK(sim.at(i, j) == sim.at(j, i));
      CHECK(sim.at(i, j) >= -1.0 - 1e-12);
      CHECK(sim.at(i, j) <= 1.0 + 1e-12);
    }
  }

  rows.push_back({0.0, 0.0});
  CHECK_THROWS(cosine_similarity_matrix(rows));
}

TEST_CASE("ndcg hand example: relevant at ranks 1 and 3") {
  // similarities chosen so each x-query sees its partners at ranks 1 and 3
  std::vector<std::vector<double>> gram = {
      {1.0, 0.9, 0.5, 0.7},
      {0.9, 1.0, 0.45, 0.7},
      {0.5, 0.45, 1.0, 0.48},
      {0.7, 0.7, 0.48, 1.0},
  };
  auto rows = cholesky_rows(gram);
  LabeledSet set = manual_set({"a", "b", "c", "d"}, rows, {0, 0, 0, 1}, {"x", "y"});
  const double per_query = 1.5 / (1.0 + 1.0 / std::log2(3.0));
  const double got = mean_ndcg(set);
  CHECK(got == doctest::Approx(per_query).epsilon(1e-9));
  CHECK(got == doctest::Approx(0.9197).epsilon(2e-4));
}

TEST_CASE("ndcg is one for perfectly clustered features") {
  Rng rng(3);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  add_blob(rows, labels, {10.0, 0.0, 0.0}, 4, 0, rng);
  add_blob(rows, labels, {0.0, 10.0, 0.0}, 3, 1, rng);
  add_blob(rows, labels, {0.0, 0.0, 10.0}, 5, 2, rng);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < rows.size(); ++i) ids.push_back("s" + std::to_string(i));
  LabeledSet set = manual_set(ids, rows, labels, {"x", "y", "z"});
  CHECK(mean_ndcg(set) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ndcg with a single relevant item ranked last") {
  // angles on the unit circle; three singleton labels are skipped
  auto at_angle = [](double deg) {
    const double rad = deg * 3.14159265358979323846 / 180.0;
    return std::vector<double>{std::cos(rad), std::sin(rad)};
  };
  LabeledSet set = manual_set(
      {"x1", "y", "z", "w", "x2"},
      {at_angle(0.0), at_angle(18.0), at_angle(26.0), at_angle(31.0), at_angle(60.0)},
      {0, 1, 2, 3, 0}, {"x", "y", "z", "w"});
  // both x queries rank the other x item fourth of four
  CHECK(mean_ndcg(set) == doctest::Approx(1.0 / std::log2(5.0)).epsilon(1e-9));
}

TEST_CASE("ndcg similarity ties break by ascending song id") {
  // b and c are bitwise identical, so their similarity to the query ties
  std::vector<std::vector<double>> rows = {
      {1.0, 0.0}, {0.8, 0.6}, {0.8, 0.6}, {0.0, 1.0}};
  SUBCASE("tied twins rank by id") {
    LabeledSet set = manual_set({"a", "b", "c", "d"}, rows, {0, 0, 1, 1}, {"x", "y"});
    // query a: b(rel) and c tie on similarity; "b" < "c" puts the relevant
    // twin at rank 1, so query a scores a perfect 1
    CHECK(mean_ndcg(set) == doctest::Approx(ndcg_oracle(set)).epsilon(1e-12));
  }
  SUBCASE("swapping ids flips the tie order and changes the metric") {
    LabeledSet lo = manual_set({"a", "b", "c", "d"}, rows, {0, 1, 0, 1}, {"x", "y"});
    LabeledSet hi = manual_set({"a", "c", "b", "d"}, rows, {0, 1, 0, 1}, {"x", "y"});
    // in `lo` the relevant twin is named "c" (ties behind "b"); in `hi` it is
    // named "b" (ties ahead) -- the metric must move accordingly
    CHECK(mean_ndcg(lo) < mean_ndcg(hi));
    CHECK(mean_ndcg(lo) == doctest::Approx(ndcg_oracle(lo)).epsilon(1e-12));
    CHECK(mean_ndcg(hi) == doctest::Approx(ndcg_oracle(hi)).epsilon(1e-12));
  }
}

TEST_CASE("ndcg agrees with a brute-force oracle on random sets") {
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 5 + static_cast<int>(rng.uniform_int(0, 15));
    const int dim = 2 + static_cast<int>(rng.uniform_int(0, 4));
    const int classes = 2 + static_cast<int>(rng.uniform_int(0, 2));
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::vector<std::string> ids;
    bool ok = false;
    std::vector<int> counts(static_cast<std::size_t>(classes), 0);
    for (int i = 0; i < n; ++i) {
      std::vector<double> v;
      for (int d = 0; d < dim; ++d) v.push_back(rng.normal());
      rows.push_back(v);
      const int label = static_cast<int>(rng.uniform_int(0, classes - 1));
      labels.push_back(label);
      ++counts[static_cast<std::size_t>(label)];
      ids.push_back("song" + std::to_string(i));
    }
    for (int c : counts) ok |= c >= 2;
    if (!ok) continue;  // every query would be skipped
    std::vector<std::string> names;
    for (int c = 0; c < classes; ++c) names.push_back("l" + std::to_string(c));
    LabeledSet set = manual_set(ids, rows, labels, names);
    CHECK(mean_ndcg(set) == doctest::Approx(ndcg_oracle(set)).epsilon(1e-12));
  }
}

TEST_CASE("ndcg range and scale invariance") {
  Rng rng(9);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  add_blob(rows, labels, {1.0, 1.0}, 6, 0, rng);
  add_blob(rows, labels, {1.2, 0.8}, 6, 1, rng);  // overlapping -> imperfect
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < rows.size(); ++i) ids.push_back("s" + std::to_string(i));
  LabeledSet set = manual_set(ids, rows, labels, {"x", "y"});
  const double base = mean_ndcg(set);
  CHECK(base > 0.0);
  CHECK(base <= 1.0);

  LabeledSet scaled = set;
  for (auto& item : scaled.items) {
    for (auto& v : item.features) v *= 41.5;
  }
  CHECK(mean_ndcg(scaled) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("ndcg throws when no query is valid") {
  LabeledSet set = manual_set({"a", "b"}, {{1.0, 0.0}, {0.0, 1.0}}, {0, 1}, {"x", "y"});
  CHECK_THROWS(mean_ndcg(set));
}

TEST_CASE("make_labeled_set joins features with manifest labels") {
  std::vector<SongRecord> manifest;
  auto rec = [&](const std::string& id, const char* label, bool excluded = false) {
    SongRecord r;
    r.song_id = id;
    r.contour_path = id + ".csv";
    r.title = id;
    r.region = "jeju";
    if (label != nullptr) r.tori_label = label;
    r.excluded = excluded;
    manifest.push_back(r);
  };
  rec("a", "menari");
  rec("b", "gyung");
  rec("c", nullptr);          // unlabeled: dropped
  rec("d", "yukja", true);    // excluded: dropped
  rec("e", "gyung");

  std::vector<Embedding> features;
  for (const char* id : {"a", "b", "c", "d", "e"}) {
    Embedding e;
    e.song_id = id;
    e.vector = {1.0f, 2.0f};
    features.push_back(e);
  }

  LabeledSet set = make_labeled_set(features, manifest);
  REQUIRE(set.items.size() == 3);
  REQUIRE(set.label_names.size() == 2);
  CHECK(set.label_names[0] == "gyung");  // canonical order
  CHECK(set.label_names[1] == "menari");
  CHECK(set.items[0].song_id == "a");
  CHECK(set.items[0].label == 1);
  CHECK(set.items[1].label == 0);
  CHECK(set.items[2].label == 0);

  // unknown feature row
  Embedding stray;
  stray.song_id = "zz";
  stray.vector = {0.0f, 1.0f};
  std::vector<Embedding> bad = features;
  bad.push_back(stray);
  CHECK_THROWS_WITH_AS(make_labeled_set(bad, manifest), doctest::Contains("zz"),
                       std::runtime_error);

  // dimension drift
  std::vector<Embedding> drift = features;
  drift[4].vector = {1.0f, 2.0f, 3.0f};
  CHECK_THROWS(make_labeled_set(drift, manifest));

  // fewer than two surviving labels
  std::vector<Embedding> only_a = {features[0]};
  CHECK_THROWS(make_labeled_set(only_a, manifest));
}

TEST_CASE("random forest separates clean blobs") {
  Rng rng(15);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  add_blob(rows, labels, {0.0, 0.0, 0.0, 0.0}, 50, 0, rng);
  add_blob(rows, labels, {3.0, 3.0, 3.0, 3.0}, 50, 1, rng);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < rows.size(); ++i) ids.push_back("s" + std::to_string(i));
  LabeledSet train = manual_set(ids, rows, labels, {"x", "y"});

  ForestModel forest = train_forest(train, 7);
  CHECK(forest.trees.size() == 100);
  CHECK(forest.feature_subsample == 2);  // floor(sqrt(4))

  // held-out probes from the same distributions
  int correct = 0, total = 0;
  Rng probe_rng(16);
  std::vector<std::vector<double>> probe_rows;
  std::vector<int> probe_labels;
  add_blob(probe_rows, probe_labels, {0.0, 0.0, 0.0, 0.0}, 40, 0, probe_rng);
  add_blob(probe_rows, probe_labels, {3.0, 3.0, 3.0, 3.0}, 40, 1, probe_rng);
  for (std::size_t i = 0; i < probe_rows.size(); ++i) {
    correct += predict(forest, probe_rows[i]) == probe_labels[i];
    ++total;
  }
  CHECK(static_cast<double>(correct) / total > 0.95);

  // training-set accuracy is perfect on separable data
  int train_good = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    train_good += predict(forest, rows[i]) == labels[i];
  }
  CHECK(train_good == static_cast<int>(rows.size()));
}

TEST_CASE("random forest rejects degenerate training sets") {
  LabeledSet empty;
  empty.label_names = {"x", "y"};
  CHECK_THROWS(train_forest(empty, 1));

  LabeledSet single = manual_set({"a", "b"}, {{0.0}, {1.0}}, {0, 0}, {"x", "y"});
  CHECK_THROWS(train_forest(single, 1));
}

TEST_CASE("random forest is row-order invariant") {
  Rng rng(31);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  add_blob(rows, labels, {0.0, 0.0, 0.0}, 25, 0, rng);
  add_blob(rows, labels, {1.5, 1.5, 1.5}, 25, 1, rng);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < rows.size(); ++i) ids.push_back("s" + std::to_string(i));
  LabeledSet ordered = manual_set(ids, rows, labels, {"x", "y"});

  LabeledSet shuffled = ordered;
  Rng shuffle_rng(99);
  shuffle_rng.shuffle(shuffled.items);

  ForestModel a = train_forest(ordered, 4, 25);
  ForestModel b = train_forest(shuffled, 4, 25);
  Rng probe(5);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> p = {probe.uniform(-0.5, 2.0), probe.uniform(-0.5, 2.0),
                             probe.uniform(-0.5, 2.0)};
    CHECK(predict(a, p) == predict(b, p));
  }
}

TEST_CASE("forest prediction ties break toward the lower label") {
  // two trees voting for different classes -> class 0 wins
  ForestModel forest;
  forest.classes = 2;
  forest.feature_subsample = 1;
  DecisionTree t0, t1;
  TreeNode leaf0;
  leaf0.class_counts = {5, 0};
  t0.nodes.push_back(leaf0);
  TreeNode leaf1;
  leaf1.class_counts = {0, 5};
  t1.nodes.push_back(leaf1);
  forest.trees.push_back(t0);
  forest.trees.push_back(t1);
  CHECK(predict(forest, {0.0}) == 0);
}

TEST_CASE("repeated split eval on one-hot features is perfect") {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::vector<std::string> ids;
  for (int i = 0; i < 40; ++i) {
    const int label = i % 4;
    std::vector<double> v(4, 0.0);
    v[static_cast<std::size_t>(label)] = 1.0;
    rows.push_back(v);
    labels.push_back(label);
    ids.push_back("s" + std::to_string(i));
  }
  LabeledSet set = manual_set(ids, rows, labels, {"a", "b", "c", "d"});
  SplitEvalResult res = repeated_split_eval(set, 10, 0.75, 3);
  CHECK(res.mean == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res.std_dev == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(res.per_repeat.size() == 10);
}

TEST_CASE("repeated split eval on noise sits at chance") {
  Rng rng(8);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::vector<std::string> ids;
  for (int i = 0; i < 120; ++i) {
    std::vector<double> v;
    for (int d = 0; d < 6; ++d) v.push_back(rng.normal());
    rows.push_back(v);
    labels.push_back(i % 4);  // balanced, uncorrelated with features
    ids.push_back("s" + std::to_string(i));
  }
  LabeledSet set = manual_set(ids, rows, labels, {"a", "b", "c", "d"});
  SplitEvalResult res = repeated_split_eval(set, 30, 0.75, 12);
  CHECK(res.mean > 0.15);
  CHECK(res.mean < 0.35);
}

TEST_CASE("repeated split eval determinism and stratification errors") {
  Rng rng(5);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  add_blob(rows, labels, {0.0, 0.0}, 12, 0, rng);
  add_blob(rows, labels, {2.0, 2.0}, 12, 1, rng);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < rows.size(); ++i) ids.push_back("s" + std::to_string(i));
  LabeledSet set = manual_set(ids, rows, labels, {"x", "y"});

  SplitEvalResult a = repeated_split_eval(set, 8, 0.75, 21);
  SplitEvalResult b = repeated_split_eval(set, 8, 0.75, 21);
  CHECK(a.mean == b.mean);
  CHECK(a.std_dev == b.std_dev);
  CHECK(a.per_repeat == b.per_repeat);

  // population standard deviation of the per-repeat accuracies
  double mean = 0.0;
  for (double acc : a.per_repeat) mean += acc;
  mean /= static_cast<double>(a.per_repeat.size());
  double var = 0.0;
  for (double acc : a.per_repeat) var += (acc - mean) * (acc - mean);
  var /= static_cast<double>(a.per_repeat.size());
  CHECK(a.std_dev == doctest::Approx(std::sqrt(var)).epsilon(1e-12));

  // a single-member class cannot be split with both sides non-empty
  LabeledSet tiny = manual_set({"a", "b", "c"}, {{0.0}, {1.0}, {2.0}}, {0, 0, 1}, {"x", "y"});
  CHECK_THROWS(repeated_split_eval(tiny, 3, 0.75, 1));
}

TEST_CASE("eval report and per-repeat csv are written as declared") {
  const std::string dir = testutil::make_temp_dir("eval_report");
  EvalReport report;
  report.embedding_name = "embeddings";
  report.ndcg = 0.875;
  report.rf_accuracy_mean = 0.8125;
  report.rf_accuracy_std = 0.0625;
  report.repeats = 30;
  report.seed = 17;
  const std::string path = dir + "/report.json";
  write_eval_report(report, path);
  auto j = nlohmann::json::parse(read_text_file(path));
  CHECK(j["embedding_name"] == "embeddings");
  CHECK(j["ndcg"].get<double>() == 0.875);
  CHECK(j["rf_accuracy_mean"].get<double>() == 0.8125);
  CHECK(j["rf_accuracy_std"].get<double>() == 0.0625);
  CHECK(j["repeats"].get<int>() == 30);
  CHECK(j["seed"].get<std::uint64_t>() == 17);

  write_per_repeat_csv({0.5, 0.75}, dir + "/repeats.csv");
  CHECK(read_text_file(dir + "/repeats.csv") == "repeat,accuracy\n0,0.5\n1,0.75\n");
}

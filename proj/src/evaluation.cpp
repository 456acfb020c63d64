#include "torivec/evaluation.h"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "torivec/ioutil.h"
#include "torivec/rng.h"

namespace torivec {

LabeledSet make_labeled_set(const std::vector<Embedding>& features,
                            const std::vector<SongRecord>& manifest) {
  std::map<std::string, const SongRecord*> by_id;
  for (const SongRecord& rec : manifest) by_id[rec.song_id] = &rec;

  LabeledSet set;
  std::vector<bool> label_present(kToriLabels.size(), false);
  std::vector<LabeledItem> staged;
  std::vector<std::size_t> staged_label;  // canonical tori index per staged item

  for (const Embedding& emb : features) {
    auto it = by_id.find(emb.song_id);
    if (it == by_id.end()) {
      throw std::runtime_error("labeled set: song " + emb.song_id + " missing from manifest");
    }
    const SongRecord& rec = *it->second;
    if (rec.excluded || !rec.tori_label.has_value()) continue;
    std::size_t tori = kToriLabels.size();
    for (std::size_t i = 0; i < kToriLabels.size(); ++i) {
      if (*rec.tori_label == kToriLabels[i]) tori = i;
    }
    if (tori == kToriLabels.size()) {
      throw std::runtime_error("labeled set: song " + emb.song_id + " has unknown label '" +
                               *rec.tori_label + "'");
    }
    if (!staged.empty() && emb.vector.size() != staged.front().features.size()) {
      throw std::runtime_error("labeled set: feature dimension mismatch at " + emb.song_id);
    }
    LabeledItem item;
    item.song_id = emb.song_id;
    item.features.assign(emb.vector.begin(), emb.vector.end());
    staged.push_back(std::move(item));
    staged_label.push_back(tori);
    label_present[tori] = true;
  }

  std::vector<int> remap(kToriLabels.size(), -1);
  for (std::size_t i = 0; i < kToriLabels.size(); ++i) {
    if (label_present[i]) {
      remap[i] = static_cast<int>(set.label_names.size());
      set.label_names.push_back(kToriLabels[i]);
    }
  }
  if (set.label_names.size() < 2) {
    throw std::runtime_error("labeled set: needs at least 2 distinct labels, found " +
                             std::to_string(set.label_names.size()));
  }
  for (std::size_t i = 0; i < staged.size(); ++i) {
    staged[i].label = remap[staged_label[i]];
    set.items.push_back(std::move(staged[i]));
  }
  return set;
}

Tensor64 cosine_similarity_matrix(const std::vector<std::vector<double>>& features) {
  const int n = static_cast<int>(features.size());
  if (n == 0) throw std::invalid_argument("cosine matrix: empty input");
  const std::size_t dim = features.front().size();

  std::vector<double> norms(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (features[static_cast<std::size_t>(i)].size() != dim) {
      throw std::invalid_argument("cosine matrix: ragged feature rows");
    }
    double acc = 0.0;
    for (double v : features[static_cast<std::size_t>(i)]) acc += v * v;
    norms[static_cast<std::size_t>(i)] = std::sqrt(acc);
    if (norms[static_cast<std::size_t>(i)] == 0.0) {
      throw std::runtime_error("cosine matrix: zero-norm vector at row " + std::to_string(i));
    }
  }

  Tensor64 sim({n, n});
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    sim.at(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        dot += features[static_cast<std::size_t>(i)][k] * features[static_cast<std::size_t>(j)][k];
      }
      sim.at(i, j) = dot / (norms[static_cast<std::size_t>(i)] * norms[static_cast<std::size_t>(j)]);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) sim.at(i, j) = sim.at(j, i);
  }
  return sim;
}

double mean_ndcg(const LabeledSet& set) {
  const int n = static_cast<int>(set.items.size());
  if (n < 2) throw std::invalid_argument("mean_ndcg: needs at least 2 items");
  std::vector<std::vector<double>> features;
  features.reserve(static_cast<std::size_t>(n));
  for (const LabeledItem& item : set.items) features.push_back(item.features);
  Tensor64 sim = cosine_similarity_matrix(features);

  std::vector<int> label_count(set.label_names.size(), 0);
  for (const LabeledItem& item : set.items) ++label_count[static_cast<std::size_t>(item.label)];

  double total = 0.0;
  int queries = 0;
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) {
    const LabeledItem& query = set.items[static_cast<std::size_t>(q)];
    const int relevant = label_count[static_cast<std::size_t>(query.label)] - 1;
    if (relevant < 1) {
      std::cerr << "mean_ndcg: skipping " << query.song_id << " (only member of '"
                << set.label_names[static_cast<std::size_t>(query.label)] << "')\n";
      continue;
    }
    order.clear();
    for (int i = 0; i < n; ++i) {
      if (i != q) order.push_back(i);
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (sim.at(q, a) != sim.at(q, b)) return sim.at(q, a) > sim.at(q, b);
      return set.items[static_cast<std::size_t>(a)].song_id <
             set.items[static_cast<std::size_t>(b)].song_id;
    });
    double dcg = 0.0;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
      if (set.items[static_cast<std::size_t>(order[rank])].label == query.label) {
        dcg += 1.0 / std::log2(static_cast<double>(rank + 2));
      }
    }
    double idcg = 0.0;
    for (int rank = 0; rank < relevant; ++rank) {
      idcg += 1.0 / std::log2(static_cast<double>(rank + 2));
    }
    total += dcg / idcg;
    ++queries;
  }
  if (queries == 0) throw std::runtime_error("mean_ndcg: no query has a same-label partner");
  return total / static_cast<double>(queries);
}

// ------------------------------------------------------------------ forest

namespace {

double gini(const std::vector<int>& counts, int total) {
  if (total == 0) return 0.0;
  double acc = 0.0;
  for (int c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    acc += p * p;
  }
  return 1.0 - acc;
}

int majority(const std::vector<int>& counts) {
  int best = 0;
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] > counts[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
  }
  return best;
}

struct TreeBuilder {
  const LabeledSet& data;
  int classes;
  int features_per_node;
  Rng& rng;
  DecisionTree tree;

  // `samples` holds indices into `rows`' index space (item indices).
  int build(std::vector<int>& samples) {
    std::vector<int> counts(static_cast<std::size_t>(classes), 0);
    for (int s : samples) {
      ++counts[static_cast<std::size_t>(data.items[static_cast<std::size_t>(s)].label)];
    }
    const int total = static_cast<int>(samples.size());
    const double node_gini = gini(counts, total);

    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (total < 2 || node_gini == 0.0) {
      tree.nodes[static_cast<std::size_t>(node_id)].class_counts = counts;
      return node_id;
    }

    const int dim = static_cast<int>(data.items.front().features.size());
    std::vector<int> candidates = rng.sample_without_replacement(dim, features_per_node);

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_impurity = node_gini;
    std::vector<int> sorted = samples;
    for (int feature : candidates) {
      std::sort(sorted.begin(), sorted.end(), [&](int a, int b) {
        const double fa = data.items[static_cast<std::size_t>(a)].features[static_cast<std::size_t>(feature)];
        const double fb = data.items[static_cast<std::size_t>(b)].features[static_cast<std::size_t>(feature)];
        if (fa != fb) return fa < fb;
        return a < b;  // stable under canonical row order
      });
      std::vector<int> left_counts(static_cast<std::size_t>(classes), 0);
      std::vector<int> right_counts = counts;
      for (int k = 0; k + 1 < total; ++k) {
        const int s = sorted[static_cast<std::size_t>(k)];
        const int label = data.items[static_cast<std::size_t>(s)].label;
        ++left_counts[static_cast<std::size_t>(label)];
        --right_counts[static_cast<std::size_t>(label)];
        const double v = data.items[static_cast<std::size_t>(s)].features[static_cast<std::size_t>(feature)];
        const double nv = data.items[static_cast<std::size_t>(sorted[static_cast<std::size_t>(k + 1)])]
                              .features[static_cast<std::size_t>(feature)];
        if (v == nv) continue;  // no threshold between equal values
        const int n_left = k + 1;
        const int n_right = total - n_left;
        const double impurity = (static_cast<double>(n_left) * gini(left_counts, n_left) +
                                 static_cast<double>(n_right) * gini(right_counts, n_right)) /
                                static_cast<double>(total);
        if (impurity < best_impurity) {
          best_impurity = impurity;
          best_feature = feature;
          best_threshold = v + 0.5 * (nv - v);
        }
      }
    }

    if (best_feature < 0) {  // nothing separable among the sampled features
      tree.nodes[static_cast<std::size_t>(node_id)].class_counts = counts;
      return node_id;
    }

    std::vector<int> left, right;
    for (int s : samples) {
      const double v =
          data.items[static_cast<std::size_t>(s)].features[static_cast<std::size_t>(best_feature)];
      (v <= best_threshold ? left : right).push_back(s);
    }
    tree.nodes[static_cast<std::size_t>(node_id)].feature = best_feature;
    tree.nodes[static_cast<std::size_t>(node_id)].threshold = best_threshold;
    const int left_id = build(left);
    tree.nodes[static_cast<std::size_t>(node_id)].left = left_id;
    const int right_id = build(right);
    tree.nodes[static_cast<std::size_t>(node_id)].right = right_id;
    return node_id;
  }
};

int tree_vote(const DecisionTree& tree, const std::vector<double>& features) {
  int node = 0;
  while (tree.nodes[static_cast<std::size_t>(node)].feature >= 0) {
    const TreeNode& n = tree.nodes[static_cast<std::size_t>(node)];
    node = features[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return majority(tree.nodes[static_cast<std::size_t>(node)].class_counts);
}

}  // namespace

ForestModel train_forest(const LabeledSet& train, std::uint64_t seed, int tree_count) {
  if (train.items.empty()) throw std::invalid_argument("train_forest: empty training set");
  std::vector<bool> seen(train.label_names.size(), false);
  for (const LabeledItem& item : train.items) seen[static_cast<std::size_t>(item.label)] = true;
  if (std::count(seen.begin(), seen.end(), true) < 2) {
    throw std::invalid_argument("train_forest: needs at least 2 classes in training data");
  }
  if (tree_count < 1) throw std::invalid_argument("train_forest: tree_count < 1");

  const int n = static_cast<int>(train.items.size());
  const int dim = static_cast<int>(train.items.front().features.size());
  for (const LabeledItem& item : train.items) {
    if (static_cast<int>(item.features.size()) != dim) {
      throw std::invalid_argument("train_forest: ragged feature rows");
    }
  }

  // Canonical row order: bootstrap indices refer to the song_id-sorted view,
  // so shuffling the caller's rows cannot change the model.
  std::vector<int> canon(static_cast<std::size_t>(n));
  std::iota(canon.begin(), canon.end(), 0);
  std::sort(canon.begin(), canon.end(), [&](int a, int b) {
    return train.items[static_cast<std::size_t>(a)].song_id <
           train.items[static_cast<std::size_t>(b)].song_id;
  });

  ForestModel forest;
  forest.classes = static_cast<int>(train.label_names.size());
  forest.feature_subsample = std::max(1, static_cast<int>(std::floor(std::sqrt(dim))));
  forest.seed = seed;
  forest.trees.resize(static_cast<std::size_t>(tree_count));

#pragma omp parallel for schedule(dynamic, 1)
  for (int t = 0; t < tree_count; ++t) {
    Rng rng(derive_seed(seed, "tree-" + std::to_string(t)));
    std::vector<int> bootstrap(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      bootstrap[static_cast<std::size_t>(i)] =
          canon[static_cast<std::size_t>(rng.uniform_int(0, n - 1))];
    }
    TreeBuilder builder{train, forest.classes, forest.feature_subsample, rng, {}};
    builder.build(bootstrap);
    forest.trees[static_cast<std::size_t>(t)] = std::move(builder.tree);
  }
  return forest;
}

int predict(const ForestModel& forest, const std::vector<double>& features) {
  if (forest.trees.empty()) throw std::invalid_argument("predict: empty forest");
  std::vector<int> votes(static_cast<std::size_t>(forest.classes), 0);
  for (const DecisionTree& tree : forest.trees) {
    ++votes[static_cast<std::size_t>(tree_vote(tree, features))];
  }
  return majority(votes);
}

SplitEvalResult repeated_split_eval(const LabeledSet& set, int repeats, double train_fraction,
                                    std::uint64_t seed) {
  if (repeats < 1) throw std::invalid_argument("repeated_split_eval: repeats < 1");
  if (!(train_fraction > 0.0) || !(train_fraction < 1.0)) {
    throw std::invalid_argument("repeated_split_eval: train_fraction must be in (0,1)");
  }

  // Class member lists in canonical song_id order, for draw determinism.
  std::vector<std::vector<int>> members(set.label_names.size());
  for (int i = 0; i < static_cast<int>(set.items.size()); ++i) {
    members[static_cast<std::size_t>(set.items[static_cast<std::size_t>(i)].label)].push_back(i);
  }
  for (auto& m : members) {
    std::sort(m.begin(), m.end(), [&](int a, int b) {
      return set.items[static_cast<std::size_t>(a)].song_id <
             set.items[static_cast<std::size_t>(b)].song_id;
    });
  }
  for (std::size_t c = 0; c < members.size(); ++c) {
    if (members[c].size() < 2) {
      throw std::runtime_error("repeated_split_eval: class '" + set.label_names[c] +
                               "' has fewer than 2 items; cannot stratify");
    }
  }

  SplitEvalResult result;
  for (int r = 0; r < repeats; ++r) {
    Rng rng(derive_seed(seed, "split-" + std::to_string(r)));
    LabeledSet train_set{{}, set.label_names};
    LabeledSet test_set{{}, set.label_names};
    for (const auto& m : members) {
      std::vector<int> shuffled = m;
      rng.shuffle(shuffled);
      const int n_c = static_cast<int>(m.size());
      int take = static_cast<int>(std::llround(train_fraction * static_cast<double>(n_c)));
      take = std::clamp(take, 1, n_c - 1);
      for (int k = 0; k < n_c; ++k) {
        auto& dst = k < take ? train_set : test_set;
        dst.items.push_back(set.items[static_cast<std::size_t>(shuffled[static_cast<std::size_t>(k)])]);
      }
    }
    ForestModel forest = train_forest(train_set, derive_seed(seed, "forest-" + std::to_string(r)));
    int correct = 0;
    for (const LabeledItem& item : test_set.items) {
      if (predict(forest, item.features) == item.label) ++correct;
    }
    result.per_repeat.push_back(static_cast<double>(correct) /
                                static_cast<double>(test_set.items.size()));
  }

  double mean = 0.0;
  for (double a : result.per_repeat) mean += a;
  mean /= static_cast<double>(result.per_repeat.size());
  double var = 0.0;
  for (double a : result.per_repeat) var += (a - mean) * (a - mean);
  var /= static_cast<double>(result.per_repeat.size());
  result.mean = mean;
  result.std_dev = std::sqrt(var);
  return result;
}

void write_eval_report(const EvalReport& report, const std::string& json_path) {
  nlohmann::ordered_json j;
  j["embedding_name"] = report.embedding_name;
  j["ndcg"] = report.ndcg;
  j["rf_accuracy_mean"] = report.rf_accuracy_mean;
  j["rf_accuracy_std"] = report.rf_accuracy_std;
  j["repeats"] = report.repeats;
  j["seed"] = report.seed;
  write_text_file(json_path, j.dump(2) + "\n");
}

void write_per_repeat_csv(const std::vector<double>& accuracies, const std::string& path) {
  std::string out = "repeat,accuracy\n";
  for (std::size_t i = 0; i < accuracies.size(); ++i) {
    out += std::to_string(i) + "," + format_double(accuracies[i]) + "\n";
  }
  write_text_file(path, out);
}

}  // namespace torivec

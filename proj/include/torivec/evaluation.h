#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "torivec/contour.h"
#include "torivec/encoder.h"
#include "torivec/tensor.h"

namespace torivec {

struct LabeledItem {
  std::string song_id;
  std::vector<double> features;
  int label = -1;  // index into LabeledSet::label_names
};

struct LabeledSet {
  std::vector<LabeledItem> items;
  std::vector<std::string> label_names;  // canonical order; ties resolve by index
};

// Joins feature rows with manifest tori labels. Only non-excluded records with
// a tori label make it in; label_names follow the canonical tori order.
// Throws if fewer than 2 distinct labels survive or dimensions disagree.
LabeledSet make_labeled_set(const std::vector<Embedding>& features,
                            const std::vector<SongRecord>& manifest);

// Pairwise cosine similarity; throws on a zero-norm row.
Tensor64 cosine_similarity_matrix(const std::vector<std::vector<double>>& features);

// Mean over queries of DCG/IDCG at full ranking depth with binary (same-label)
// relevance; similarity ties rank by ascending song_id. Queries whose label
// has no other member are skipped with a stderr warning.
double mean_ndcg(const LabeledSet& set);

struct TreeNode {
  int feature = -1;   // -1 on leaves
  double threshold = 0.0;
  int left = -1, right = -1;
  std::vector<int> class_counts;  // leaves only
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // node 0 is the root
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  int feature_subsample = 0;  // features examined per node
  int classes = 0;
  std::uint64_t seed = 0;
};

// 100-tree random forest: per tree a bootstrap sample of size n, Gini splits
// over floor(sqrt(d)) features per node, grown until pure or below 2 samples.
// Rows are canonically ordered by song_id before any drawing, so training is
// row-order invariant.
ForestModel train_forest(const LabeledSet& train, std::uint64_t seed, int tree_count = 100);

// Majority vote over trees; ties break toward the lower label index.
int predict(const ForestModel& forest, const std::vector<double>& features);

struct SplitEvalResult {
  double mean = 0.0;
  double std_dev = 0.0;  // population standard deviation
  std::vector<double> per_repeat;
};

// `repeats` independent stratified train/test splits; per-class split counts
// keep at least one item on each side. Deterministic in (set, seed).
SplitEvalResult repeated_split_eval(const LabeledSet& set, int repeats, double train_fraction,
                                    std::uint64_t seed);

struct EvalReport {
  std::string embedding_name;
  double ndcg = 0.0;
  double rf_accuracy_mean = 0.0;
  double rf_accuracy_std = 0.0;
  int repeats = 0;
  std::uint64_t seed = 0;
};

void write_eval_report(const EvalReport& report, const std::string& json_path);
void write_per_repeat_csv(const std::vector<double>& accuracies, const std::string& path);

}  // namespace torivec

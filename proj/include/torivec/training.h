#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "torivec/adam.h"
#include "torivec/contour.h"
#include "torivec/encoder.h"
#include "torivec/rng.h"
#include "torivec/tensor.h"

namespace torivec {

struct TrainConfig {
  int updates = 25000;
  int batch_size = 128;
  double margin = 0.4;
  int negatives = 8;
  double slice_seconds = 30.0;
  AdamConfig adam;
  std::uint64_t seed = 0;
  std::string mode = "ssl";  // "ssl" | "region"
  int checkpoint_every = 1000;
  // Fraction of songs held out for an end-of-run loss report (0 disables).
  double val_fraction = 0.0;

  void validate() const;
  int slice_frames() const;  // slice_seconds at the 20 Hz series rate
};

struct TrainingSong {
  std::string song_id;
  std::vector<float> pitch;       // tonic-normalized semitones, masked to 0
  std::vector<float> confidence;  // 0 where f0 absent
  int region = -1;                // index into kRegionNames, -1 if unknown
};

struct TrainingCorpus {
  std::vector<TrainingSong> songs;  // excluded records already dropped
};

// Parses, tonic-normalizes and decimates every non-excluded song. Tonics come
// from `tonic_table` when present, otherwise estimated. Any unreadable song is
// fatal here (training needs the whole corpus), unlike encode_corpus.
TrainingCorpus prepare_training_corpus(const std::vector<SongRecord>& manifest,
                                       const std::string& manifest_path,
                                       const std::map<std::string, double>& tonic_table,
                                       int workers);

struct TripletBatch {
  Tensor anchors;    // [B,2,F]
  Tensor positives;  // [B,2,F]
  // Per item: indices of other batch items whose anchors serve as negatives.
  std::vector<std::vector<int>> negative_sets;
  std::vector<int> song_indices;  // batch item -> corpus song index
};

// Draws min(config.batch_size, corpus size) distinct songs; two independent
// uniformly-placed slices per song (whole contour right-padded with zeros when
// shorter than the slice); negatives are other anchors, sampled without
// replacement.
TripletBatch sample_triplet_batch(const TrainingCorpus& corpus, const TrainConfig& config,
                                  Rng& rng);

struct RegionBatch {
  Tensor inputs;  // [B,2,F]
  std::vector<int> labels;
  std::vector<int> song_indices;
};

RegionBatch sample_region_batch(const TrainingCorpus& corpus, const TrainConfig& config,
                                Rng& rng);

// Hinge triplet loss over rows of an embedding matrix, averaged over items and
// over each item's negatives. Gradients (cosine similarity through both the
// anchor-positive and anchor-negative terms) accumulate into *grad_rows when
// given. Throws on a zero-norm participating row.
template <typename S>
double triplet_loss_rows(const TensorT<S>& rows, const std::vector<int>& anchor_rows,
                         const std::vector<int>& positive_rows,
                         const std::vector<std::vector<int>>& negative_rows, double margin,
                         TensorT<S>* grad_rows);

// Single-triplet convenience form: loss for one (anchor, positive, negatives)
// triple with optional gradients.
double triplet_loss(const std::vector<double>& anchor, const std::vector<double>& positive,
                    const std::vector<std::vector<double>>& negatives, double margin,
                    std::vector<double>* grad_anchor = nullptr,
                    std::vector<double>* grad_positive = nullptr,
                    std::vector<std::vector<double>>* grad_negatives = nullptr);

// w_c = N / (C * N_c) over region labels; throws naming any region absent
// from the corpus.
std::vector<double> region_class_weights(const TrainingCorpus& corpus);

// L = -sum_i w_{y_i} log softmax(logits_i)_{y_i} / sum_i w_{y_i}.
template <typename S>
double weighted_cross_entropy(const TensorT<S>& logits, const std::vector<int>& labels,
                              const std::vector<double>& class_weights,
                              TensorT<S>* grad_logits);

struct TrainOutputs {
  std::vector<double> losses;  // one entry per update
  std::string checkpoint_path;
  std::vector<std::string> all_checkpoints;  // intermediates plus the final
  std::string loss_csv_path;
  int train_songs = 0;
  int val_songs = 0;
  std::optional<double> val_loss;  // held-out triplet loss, ssl mode only
};

// Runs config.updates Adam steps on `model` (plus a region head in region
// mode), appending `step,loss` rows to <out_dir>/loss.csv, echoing the config
// to <out_dir>/train_config.json and checkpointing every checkpoint_every
// updates and at the end (<out_dir>/model.ckpt). Aborts with step and batch
// song ids if the loss turns non-finite.
TrainOutputs train(Encoder<float>& model, const TrainingCorpus& corpus, const TrainConfig& config,
                   const std::string& out_dir);

}  // namespace torivec

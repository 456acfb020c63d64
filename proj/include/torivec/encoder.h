#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "torivec/contour.h"
#include "torivec/layers.h"
#include "torivec/tensor.h"

namespace torivec {

struct EncoderConfig {
  std::vector<int> channels = {64, 128, 256, 256};
  int kernel = 3;
  std::vector<int> pool_sizes = {5, 4, 4};
  int embedding_dim = 256;
  int attention_heads = 8;
  std::string activation = "relu";  // "relu" | "identity"
  int input_channels = 2;           // (pitch, confidence)

  void validate() const;
  // Shortest input for which every pooling stage yields at least one frame.
  int min_input_length() const;
};

struct Embedding {
  std::string song_id;
  std::vector<float> vector;
};

// Conv (+ batch norm + activation) stack with interleaved max pooling, topped
// by context-attention pooling into a fixed-size embedding.
template <typename S>
class Encoder {
 public:
  Encoder(const EncoderConfig& config, std::uint64_t seed);

  TensorT<S> forward(const TensorT<S>& input);          // [N,2,T] -> [N,E]
  TensorT<S> backward(const TensorT<S>& grad_out);      // -> grad wrt input

  void set_train(bool train);
  bool train_mode() const { return train_; }

  std::vector<ParamSlot<S>> params();
  // Parameters plus batch-norm running statistics, in checkpoint order.
  std::vector<ParamSlot<S>> persistent_tensors();
  void zero_grad();

  const EncoderConfig& config() const { return config_; }
  std::uint64_t init_seed() const { return seed_; }
  bool running_stats_ready() const;
  void mark_running_stats(bool ready);

 private:
  EncoderConfig config_;
  std::uint64_t seed_ = 0;
  std::vector<Conv1d<S>> convs_;
  std::vector<BatchNorm1d<S>> norms_;
  std::vector<ReLU<S>> activations_;
  std::vector<MaxPool1d<S>> pools_;
  ContextAttention<S> attention_;
  bool train_ = true;
  int cached_batch_ = 0, cached_frames_ = 0;  // attention input layout
};

// PitchSeries -> [1, 2, T] float input (pitch channel first).
Tensor series_to_input(const PitchSeries& series);

struct EncodeIssue {
  std::string song_id;
  std::string message;
};

struct EncodeResult {
  std::vector<Embedding> embeddings;
  std::vector<EncodeIssue> issues;  // per-song failures, reported not fatal
};

// Whole-contour eval-mode embeddings for every non-excluded manifest record.
// Tonic values come from `tonic_table` when present, otherwise estimated from
// the contour. Contour paths resolve relative to the manifest location.
EncodeResult encode_corpus(Encoder<float>& model, const std::vector<SongRecord>& manifest,
                           const std::map<std::string, double>& tonic_table,
                           const std::string& manifest_path, int workers);

// Self-describing container: one JSON header line (config, seed, tensor
// inventory, payload checksum) followed by the raw little-endian float32
// payload in header order.
void save_checkpoint(const Encoder<float>& model, const Linear<float>* region_head,
                     const std::string& path);

struct LoadedCheckpoint {
  Encoder<float> model;
  std::optional<Linear<float>> region_head;
};

// expected_embedding_dim >= 0 makes a differing checkpoint a config error.
LoadedCheckpoint load_checkpoint(const std::string& path, int expected_embedding_dim = -1);

void write_embeddings_csv(const std::vector<Embedding>& embeddings, const std::string& path);
std::vector<Embedding> read_embeddings_csv(const std::string& path);

}  // namespace torivec

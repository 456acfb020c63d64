#include "torivec/training.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "torivec/ioutil.h"
#include "torivec/scale.h"

namespace torivec {

void TrainConfig::validate() const {
  if (updates < 0) throw std::invalid_argument("train config: negative update count");
  if (batch_size < 2) throw std::invalid_argument("train config: batch_size < 2");
  if (!(margin > 0.0) || margin > 2.0) {
    throw std::invalid_argument("train config: margin must be in (0,2]");
  }
  if (negatives < 1) throw std::invalid_argument("train config: negatives < 1");
  if (batch_size - 1 < negatives) {
    throw std::invalid_argument("train config: batch_size " + std::to_string(batch_size) +
                                " cannot supply " + std::to_string(negatives) + " negatives");
  }
  const double frames = slice_seconds * kSeriesRateHz;
  if (std::abs(frames - std::round(frames)) > 1e-9 || std::round(frames) < 1.0) {
    throw std::invalid_argument("train config: slice_seconds must map to a whole frame count");
  }
  if (!(adam.learning_rate > 0.0)) {
    throw std::invalid_argument("train config: learning_rate must be positive");
  }
  if (mode != "ssl" && mode != "region") {
    throw std::invalid_argument("train config: mode must be 'ssl' or 'region', got '" + mode +
                                "'");
  }
  if (checkpoint_every < 1) throw std::invalid_argument("train config: checkpoint_every < 1");
  if (val_fraction < 0.0 || val_fraction >= 1.0) {
    throw std::invalid_argument("train config: val_fraction must be in [0,1)");
  }
}

int TrainConfig::slice_frames() const {
  return static_cast<int>(std::round(slice_seconds * kSeriesRateHz));
}

TrainingCorpus prepare_training_corpus(const std::vector<SongRecord>& manifest,
                                       const std::string& manifest_path,
                                       const std::map<std::string, double>& tonic_table,
                                       int workers) {
  std::vector<const SongRecord*> included;
  for (const SongRecord& rec : manifest) {
    if (!rec.excluded) included.push_back(&rec);
  }

  std::vector<TrainingSong> songs(included.size());
  std::vector<std::string> errors(included.size());
  std::atomic<std::size_t> next{0};
  workers = std::max(1, workers);

  auto run = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= songs.size()) break;
      const SongRecord& rec = *included[i];
      try {
        Contour contour = parse_contour_file(resolve_relative(manifest_path, rec.contour_path));
        double tonic;
        if (auto it = tonic_table.find(rec.song_id); it != tonic_table.end()) {
          tonic = it->second;
        } else {
          tonic = estimate_tonic(contour).tonic_midi;
        }
        PitchSeries series = to_pitch_series(decimate(contour), tonic);
        TrainingSong song;
        song.song_id = rec.song_id;
        song.pitch.assign(series.pitch.begin(), series.pitch.end());
        song.confidence.assign(series.confidence.begin(), series.confidence.end());
        for (std::size_t r = 0; r < kRegionNames.size(); ++r) {
          if (rec.region == kRegionNames[r]) song.region = static_cast<int>(r);
        }
        songs[i] = std::move(song);
      } catch (const std::exception& e) {
        errors[i] = rec.song_id + ": " + e.what();
      }
    }
  };

  if (workers == 1) {
    run();
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) threads.emplace_back(run);
    for (auto& t : threads) t.join();
  }

  for (const std::string& err : errors) {
    if (!err.empty()) throw std::runtime_error("prepare_training_corpus: " + err);
  }
  return TrainingCorpus{std::move(songs)};
}

namespace {

// Copies up to `frames` frames of `song` starting at `start` into channel
// rows (pitch, confidence) of batch row n; the tensor is pre-zeroed, so short
// songs end up right-padded with pitch 0 / confidence 0.
void fill_slice(Tensor& batch, int n, const TrainingSong& song, int start, int frames) {
  const int avail = static_cast<int>(song.pitch.size()) - start;
  const int count = std::min(frames, avail);
  for (int t = 0; t < count; ++t) {
    batch.at(n, 0, t) = song.pitch[static_cast<std::size_t>(start + t)];
    batch.at(n, 1, t) = song.confidence[static_cast<std::size_t>(start + t)];
  }
}

int slice_start(const TrainingSong& song, int frames, Rng& rng) {
  const int len = static_cast<int>(song.pitch.size());
  if (len <= frames) return 0;
  return static_cast<int>(rng.uniform_int(0, len - frames));
}

std::vector<int> draw_songs(const TrainingCorpus& corpus, const TrainConfig& config, Rng& rng) {
  config.validate();
  const int n = static_cast<int>(corpus.songs.size());
  if (n < config.negatives + 1) {
    throw std::runtime_error("triplet sampling needs at least " +
                             std::to_string(config.negatives + 1) + " eligible songs, have " +
                             std::to_string(n));
  }
  const int batch = std::min(config.batch_size, n);
  if (batch - 1 < config.negatives) {
    throw std::runtime_error("batch of " + std::to_string(batch) + " cannot supply " +
                             std::to_string(config.negatives) + " negatives");
  }
  return rng.sample_without_replacement(n, batch);
}

}  // namespace

TripletBatch sample_triplet_batch(const TrainingCorpus& corpus, const TrainConfig& config,
                                  Rng& rng) {
  std::vector<int> ids = draw_songs(corpus, config, rng);
  const int batch = static_cast<int>(ids.size());
  const int frames = config.slice_frames();

  TripletBatch out;
  out.song_indices = ids;
  out.anchors = Tensor({batch, 2, frames});
  out.positives = Tensor({batch, 2, frames});
  out.anchors.fill(0.0f);
  out.positives.fill(0.0f);
  for (int i = 0; i < batch; ++i) {
    const TrainingSong& song = corpus.songs[static_cast<std::size_t>(ids[i])];
    fill_slice(out.anchors, i, song, slice_start(song, frames, rng), frames);
    fill_slice(out.positives, i, song, slice_start(song, frames, rng), frames);
  }
  out.negative_sets.resize(static_cast<std::size_t>(batch));
  for (int i = 0; i < batch; ++i) {
    std::vector<int> draw = rng.sample_without_replacement(batch - 1, config.negatives);
    for (int& j : draw) {
      if (j >= i) ++j;  // skip self
    }
    out.negative_sets[static_cast<std::size_t>(i)] = std::move(draw);
  }
  return out;
}

RegionBatch sample_region_batch(const TrainingCorpus& corpus, const TrainConfig& config,
                                Rng& rng) {
  std::vector<int> ids = draw_songs(corpus, config, rng);
  const int batch = static_cast<int>(ids.size());
  const int frames = config.slice_frames();

  RegionBatch out;
  out.song_indices = ids;
  out.inputs = Tensor({batch, 2, frames});
  out.inputs.fill(0.0f);
  out.labels.resize(static_cast<std::size_t>(batch));
  for (int i = 0; i < batch; ++i) {
    const TrainingSong& song = corpus.songs[static_cast<std::size_t>(ids[i])];
    fill_slice(out.inputs, i, song, slice_start(song, frames, rng), frames);
    if (song.region < 0) {
      throw std::runtime_error("region batch: song " + song.song_id + " has no region label");
    }
    out.labels[static_cast<std::size_t>(i)] = song.region;
  }
  return out;
}

template <typename S>
double triplet_loss_rows(const TensorT<S>& rows, const std::vector<int>& anchor_rows,
                         const std::vector<int>& positive_rows,
                         const std::vector<std::vector<int>>& negative_rows, double margin,
                         TensorT<S>* grad_rows) {
  if (rows.rank() != 2) throw std::invalid_argument("triplet_loss: rows must be [M,E]");
  if (anchor_rows.size() != positive_rows.size() ||
      anchor_rows.size() != negative_rows.size() || anchor_rows.empty()) {
    throw std::invalid_argument("triplet_loss: item lists disagree");
  }
  if (!(margin > 0.0)) throw std::invalid_argument("triplet_loss: margin must be positive");
  if (grad_rows != nullptr && grad_rows->shape() != rows.shape()) {
    throw std::invalid_argument("triplet_loss: gradient shape mismatch");
  }
  const int dim = rows.dim(1);

  std::vector<double> norm(static_cast<std::size_t>(rows.dim(0)), -1.0);
  auto row_norm = [&](int r) {
    double& cached = norm[static_cast<std::size_t>(r)];
    if (cached < 0.0) {
      double acc = 0.0;
      for (int j = 0; j < dim; ++j) {
        const double v = static_cast<double>(rows.at(r, j));
        acc += v * v;
      }
      cached = std::sqrt(acc);
      if (cached == 0.0) {
        throw std::runtime_error("triplet_loss: zero-norm embedding at row " + std::to_string(r));
      }
    }
    return cached;
  };
  auto dot = [&](int a, int b) {
    double acc = 0.0;
    for (int j = 0; j < dim; ++j) {
      acc += static_cast<double>(rows.at(a, j)) * static_cast<double>(rows.at(b, j));
    }
    return acc;
  };
  // d Sim(x,y) / dx = y/(|x||y|) - Sim * x/|x|^2, scaled by `w` into grads.
  auto add_sim_grad = [&](int x, int y, double sim, double w) {
    if (grad_rows == nullptr) return;
    const double nx = row_norm(x), ny = row_norm(y);
    for (int j = 0; j < dim; ++j) {
      const double xv = static_cast<double>(rows.at(x, j));
      const double yv = static_cast<double>(rows.at(y, j));
      grad_rows->at(x, j) += static_cast<S>(w * (yv / (nx * ny) - sim * xv / (nx * nx)));
      grad_rows->at(y, j) += static_cast<S>(w * (xv / (nx * ny) - sim * yv / (ny * ny)));
    }
  };

  const std::size_t items = anchor_rows.size();
  double total = 0.0;
  for (std::size_t k = 0; k < items; ++k) {
    const int a = anchor_rows[k];
    const int p = positive_rows[k];
    const auto& negs = negative_rows[k];
    if (negs.empty()) throw std::invalid_argument("triplet_loss: item without negatives");
    const double sim_ap = dot(a, p) / (row_norm(a) * row_norm(p));
    const double w = 1.0 / (static_cast<double>(items) * static_cast<double>(negs.size()));
    double item_loss = 0.0;
    for (int nrow : negs) {
      const double sim_an = dot(a, nrow) / (row_norm(a) * row_norm(nrow));
      const double hinge = margin - sim_ap + sim_an;
      if (hinge > 0.0) {
        item_loss += hinge;
        add_sim_grad(a, p, sim_ap, -w);
        add_sim_grad(a, nrow, sim_an, w);
      }
    }
    total += item_loss / static_cast<double>(negs.size());
  }
  return total / static_cast<double>(items);
}

template double triplet_loss_rows<float>(const Tensor&, const std::vector<int>&,
                                         const std::vector<int>&,
                                         const std::vector<std::vector<int>>&, double, Tensor*);
template double triplet_loss_rows<double>(const Tensor64&, const std::vector<int>&,
                                          const std::vector<int>&,
                                          const std::vector<std::vector<int>>&, double,
                                          Tensor64*);

double triplet_loss(const std::vector<double>& anchor, const std::vector<double>& positive,
                    const std::vector<std::vector<double>>& negatives, double margin,
                    std::vector<double>* grad_anchor, std::vector<double>* grad_positive,
                    std::vector<std::vector<double>>* grad_negatives) {
  const int dim = static_cast<int>(anchor.size());
  if (positive.size() != anchor.size()) {
    throw std::invalid_argument("triplet_loss: dimension mismatch");
  }
  const int rows_n = 2 + static_cast<int>(negatives.size());
  Tensor64 rows({rows_n, dim});
  std::copy(anchor.begin(), anchor.end(), rows.data());
  std::copy(positive.begin(), positive.end(), rows.data() + dim);
  std::vector<int> neg_rows;
  for (std::size_t i = 0; i < negatives.size(); ++i) {
    if (negatives[i].size() != anchor.size()) {
      throw std::invalid_argument("triplet_loss: dimension mismatch");
    }
    std::copy(negatives[i].begin(), negatives[i].end(),
              rows.data() + static_cast<std::int64_t>(2 + i) * dim);
    neg_rows.push_back(2 + static_cast<int>(i));
  }

  const bool want_grads =
      grad_anchor != nullptr || grad_positive != nullptr || grad_negatives != nullptr;
  Tensor64 grads;
  if (want_grads) {
    grads = Tensor64({rows_n, dim});
    grads.fill(0.0);
  }
  const double loss =
      triplet_loss_rows<double>(rows, {0}, {1}, {neg_rows}, margin, want_grads ? &grads : nullptr);
  if (grad_anchor != nullptr) grad_anchor->assign(grads.data(), grads.data() + dim);
  if (grad_positive != nullptr) grad_positive->assign(grads.data() + dim, grads.data() + 2 * dim);
  if (grad_negatives != nullptr) {
    grad_negatives->resize(negatives.size());
    for (std::size_t i = 0; i < negatives.size(); ++i) {
      const double* base = grads.data() + static_cast<std::int64_t>(2 + i) * dim;
      (*grad_negatives)[i].assign(base, base + dim);
    }
  }
  return loss;
}

std::vector<double> region_class_weights(const TrainingCorpus& corpus) {
  const std::size_t classes = kRegionNames.size();
  std::vector<std::int64_t> counts(classes, 0);
  std::int64_t total = 0;
  for (const TrainingSong& song : corpus.songs) {
    if (song.region >= 0) {
      ++counts[static_cast<std::size_t>(song.region)];
      ++total;
    }
  }
  std::vector<double> weights(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    if (counts[c] == 0) {
      throw std::runtime_error(std::string("region class weights: no songs labeled '") +
                               kRegionNames[c] + "'");
    }
    weights[c] = static_cast<double>(total) /
                 (static_cast<double>(classes) * static_cast<double>(counts[c]));
  }
  return weights;
}

template <typename S>
double weighted_cross_entropy(const TensorT<S>& logits, const std::vector<int>& labels,
                              const std::vector<double>& class_weights,
                              TensorT<S>* grad_logits) {
  if (logits.rank() != 2) throw std::invalid_argument("cross entropy: logits must be [B,C]");
  const int batch = logits.dim(0);
  const int classes = logits.dim(1);
  if (static_cast<int>(labels.size()) != batch) {
    throw std::invalid_argument("cross entropy: label count mismatch");
  }
  if (static_cast<int>(class_weights.size()) != classes) {
    throw std::invalid_argument("cross entropy: weight count mismatch");
  }
  for (double w : class_weights) {
    if (!(w > 0.0)) throw std::invalid_argument("cross entropy: non-positive class weight");
  }
  if (grad_logits != nullptr && grad_logits->shape() != logits.shape()) {
    throw std::invalid_argument("cross entropy: gradient shape mismatch");
  }

  double weight_sum = 0.0;
  for (int i = 0; i < batch; ++i) {
    if (labels[static_cast<std::size_t>(i)] < 0 ||
        labels[static_cast<std::size_t>(i)] >= classes) {
      throw std::invalid_argument("cross entropy: label out of range at item " +
                                  std::to_string(i));
    }
    weight_sum += class_weights[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
  }

  double loss = 0.0;
  std::vector<double> probs(static_cast<std::size_t>(classes));
  for (int i = 0; i < batch; ++i) {
    double top = static_cast<double>(logits.at(i, 0));
    for (int c = 1; c < classes; ++c) top = std::max(top, static_cast<double>(logits.at(i, c)));
    double z = 0.0;
    for (int c = 0; c < classes; ++c) {
      probs[static_cast<std::size_t>(c)] = std::exp(static_cast<double>(logits.at(i, c)) - top);
      z += probs[static_cast<std::size_t>(c)];
    }
    const int y = labels[static_cast<std::size_t>(i)];
    const double w = class_weights[static_cast<std::size_t>(y)];
    loss -= w * (std::log(probs[static_cast<std::size_t>(y)]) - std::log(z));
    if (grad_logits != nullptr) {
      for (int c = 0; c < classes; ++c) {
        const double p = probs[static_cast<std::size_t>(c)] / z;
        const double indicator = c == y ? 1.0 : 0.0;
        grad_logits->at(i, c) += static_cast<S>(w * (p - indicator) / weight_sum);
      }
    }
  }
  return loss / weight_sum;
}

template double weighted_cross_entropy<float>(const Tensor&, const std::vector<int>&,
                                              const std::vector<double>&, Tensor*);
template double weighted_cross_entropy<double>(const Tensor64&, const std::vector<int>&,
                                               const std::vector<double>&, Tensor64*);

namespace {

std::string batch_diagnostic(const TrainingCorpus& corpus, const std::vector<int>& ids) {
  std::string out;
  const std::size_t shown = std::min<std::size_t>(ids.size(), 8);
  for (std::size_t i = 0; i < shown; ++i) {
    if (i > 0) out += ", ";
    out += corpus.songs[static_cast<std::size_t>(ids[i])].song_id;
  }
  if (ids.size() > shown) out += ", ...";
  return out;
}

void write_config_sidecar(const TrainConfig& config, int train_songs, int val_songs,
                          const std::string& path) {
  nlohmann::ordered_json j;
  j["updates"] = config.updates;
  j["batch_size"] = config.batch_size;
  j["margin"] = config.margin;
  j["negatives"] = config.negatives;
  j["slice_seconds"] = config.slice_seconds;
  j["learning_rate"] = config.adam.learning_rate;
  j["beta1"] = config.adam.beta1;
  j["beta2"] = config.adam.beta2;
  j["epsilon"] = config.adam.epsilon;
  j["seed"] = config.seed;
  j["mode"] = config.mode;
  j["checkpoint_every"] = config.checkpoint_every;
  j["val_fraction"] = config.val_fraction;
  j["train_songs"] = train_songs;
  j["val_songs"] = val_songs;
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace

TrainOutputs train(Encoder<float>& model, const TrainingCorpus& corpus, const TrainConfig& config,
                   const std::string& out_dir) {
  config.validate();
  const int frames = config.slice_frames();
  if (frames < model.config().min_input_length()) {
    throw std::invalid_argument("train: slice of " + std::to_string(frames) +
                                " frames is below the encoder minimum of " +
                                std::to_string(model.config().min_input_length()));
  }

  // Optional held-out split, drawn up front so the sampler stream is
  // unaffected by val_fraction=0 runs.
  TrainingCorpus train_set, val_set;
  if (config.val_fraction > 0.0) {
    const int n = static_cast<int>(corpus.songs.size());
    const int val_n =
        static_cast<int>(std::llround(config.val_fraction * static_cast<double>(n)));
    if (val_n < config.negatives + 1) {
      throw std::runtime_error("train: val split of " + std::to_string(val_n) +
                               " songs is too small to report a triplet loss");
    }
    if (n - val_n < config.negatives + 1) {
      throw std::runtime_error("train: val_fraction leaves too few training songs");
    }
    Rng vrng(derive_seed(config.seed, "val-split"));
    std::vector<int> picks = vrng.sample_without_replacement(n, val_n);
    std::vector<bool> held(static_cast<std::size_t>(n), false);
    for (int p : picks) held[static_cast<std::size_t>(p)] = true;
    for (int i = 0; i < n; ++i) {
      auto& dst = held[static_cast<std::size_t>(i)] ? val_set : train_set;
      dst.songs.push_back(corpus.songs[static_cast<std::size_t>(i)]);
    }
  } else {
    train_set = corpus;
  }

  const bool region_mode = config.mode == "region";
  std::optional<Linear<float>> head;
  std::vector<double> class_weights;
  if (region_mode) {
    int unlabeled = 0;
    for (const TrainingSong& song : train_set.songs) {
      if (song.region < 0) ++unlabeled;
    }
    if (unlabeled > 0) {
      throw std::runtime_error("train: region mode with " + std::to_string(unlabeled) +
                               " songs missing a region label");
    }
    class_weights = region_class_weights(train_set);
    head.emplace(model.config().embedding_dim, static_cast<int>(kRegionNames.size()));
    Rng hrng(derive_seed(config.seed, "region-head-init"));
    init_glorot_uniform(head->weight, head->in_features(), head->out_features(), hrng);
  }

  std::filesystem::create_directories(out_dir);
  TrainOutputs outputs;
  outputs.train_songs = static_cast<int>(train_set.songs.size());
  outputs.val_songs = static_cast<int>(val_set.songs.size());
  outputs.loss_csv_path = out_dir + "/loss.csv";
  outputs.checkpoint_path = out_dir + "/model.ckpt";
  write_config_sidecar(config, outputs.train_songs, outputs.val_songs,
                       out_dir + "/train_config.json");

  std::ofstream loss_csv(outputs.loss_csv_path, std::ios::binary);
  if (!loss_csv) throw std::runtime_error("cannot open " + outputs.loss_csv_path);
  loss_csv << "step,loss\n";

  Rng sampler(derive_seed(config.seed, "train-sampler"));
  Adam<float> optimizer(config.adam);
  model.set_train(true);

  for (int step = 1; step <= config.updates; ++step) {
    double loss = 0.0;
    std::vector<int> batch_songs;
    if (region_mode) {
      RegionBatch batch = sample_region_batch(train_set, config, sampler);
      batch_songs = batch.song_indices;
      Tensor emb = model.forward(batch.inputs);
      Tensor logits = head->forward(emb);
      Tensor grad_logits(logits.shape());
      grad_logits.fill(0.0f);
      loss = weighted_cross_entropy(logits, batch.labels, class_weights, &grad_logits);
      if (std::isfinite(loss)) {
        model.zero_grad();
        head->grad_weight.fill(0.0f);
        head->grad_bias.fill(0.0f);
        model.backward(head->backward(grad_logits));
        std::vector<ParamSlot<float>> slots = model.params();
        head->collect("region_head", slots);
        optimizer.step(slots);
      }
    } else {
      TripletBatch batch = sample_triplet_batch(train_set, config, sampler);
      batch_songs = batch.song_indices;
      const int b = batch.anchors.dim(0);
      Tensor combined({2 * b, 2, frames});
      std::memcpy(combined.data(), batch.anchors.data(),
                  static_cast<std::size_t>(batch.anchors.size()) * sizeof(float));
      std::memcpy(combined.data() + batch.anchors.size(), batch.positives.data(),
                  static_cast<std::size_t>(batch.positives.size()) * sizeof(float));
      Tensor emb = model.forward(combined);

      std::vector<int> anchor_rows(static_cast<std::size_t>(b));
      std::vector<int> positive_rows(static_cast<std::size_t>(b));
      for (int i = 0; i < b; ++i) {
        anchor_rows[static_cast<std::size_t>(i)] = i;
        positive_rows[static_cast<std::size_t>(i)] = b + i;
      }
      Tensor grad_emb(emb.shape());
      grad_emb.fill(0.0f);
      loss = triplet_loss_rows(emb, anchor_rows, positive_rows, batch.negative_sets,
                               config.margin, &grad_emb);
      if (std::isfinite(loss)) {
        model.zero_grad();
        model.backward(grad_emb);
        optimizer.step(model.params());
      }
    }

    if (!std::isfinite(loss)) {
      throw std::runtime_error("train: non-finite loss at step " + std::to_string(step) +
                               " (songs: " + batch_diagnostic(train_set, batch_songs) + ")");
    }
    outputs.losses.push_back(loss);
    loss_csv << step << ',' << format_double(loss) << '\n';

    if (step % config.checkpoint_every == 0 && step != config.updates) {
      const std::string path = out_dir + "/checkpoint_" + std::to_string(step) + ".ckpt";
      save_checkpoint(model, head ? &*head : nullptr, path);
      outputs.all_checkpoints.push_back(path);
    }
  }
  loss_csv.close();
  save_checkpoint(model, head ? &*head : nullptr, outputs.checkpoint_path);
  outputs.all_checkpoints.push_back(outputs.checkpoint_path);

  if (!val_set.songs.empty() && !region_mode && model.running_stats_ready()) {
    model.set_train(false);
    Rng vrng(derive_seed(config.seed, "val-loss"));
    TrainConfig val_config = config;
    val_config.batch_size =
        std::min(config.batch_size, static_cast<int>(val_set.songs.size()));
    const int rounds = (static_cast<int>(val_set.songs.size()) + val_config.batch_size - 1) /
                       val_config.batch_size;
    double acc = 0.0;
    for (int r = 0; r < rounds; ++r) {
      TripletBatch batch = sample_triplet_batch(val_set, val_config, vrng);
      const int b = batch.anchors.dim(0);
      Tensor combined({2 * b, 2, frames});
      std::memcpy(combined.data(), batch.anchors.data(),
                  static_cast<std::size_t>(batch.anchors.size()) * sizeof(float));
      std::memcpy(combined.data() + batch.anchors.size(), batch.positives.data(),
                  static_cast<std::size_t>(batch.positives.size()) * sizeof(float));
      Tensor emb = model.forward(combined);
      std::vector<int> anchor_rows(static_cast<std::size_t>(b));
      std::vector<int> positive_rows(static_cast<std::size_t>(b));
      for (int i = 0; i < b; ++i) {
        anchor_rows[static_cast<std::size_t>(i)] = i;
        positive_rows[static_cast<std::size_t>(i)] = b + i;
      }
      acc += triplet_loss_rows<float>(emb, anchor_rows, positive_rows, batch.negative_sets,
                                      config.margin, nullptr);
    }
    outputs.val_loss = acc / static_cast<double>(rounds);
  }
  return outputs;
}

}  // namespace torivec

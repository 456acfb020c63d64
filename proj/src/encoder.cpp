#include "torivec/encoder.h"

#include <atomic>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "torivec/ioutil.h"
#include "torivec/rng.h"
#include "torivec/scale.h"

namespace torivec {

static_assert(std::endian::native == std::endian::little,
              "checkpoint payload is written little-endian");

void EncoderConfig::validate() const {
  if (channels.empty()) throw std::invalid_argument("encoder config: no conv layers");
  for (int c : channels) {
    if (c < 1) throw std::invalid_argument("encoder config: non-positive channel count");
  }
  if (pool_sizes.size() + 1 != channels.size()) {
    throw std::invalid_argument("encoder config: need one pool size per conv layer but the last");
  }
  for (int p : pool_sizes) {
    if (p < 1) throw std::invalid_argument("encoder config: non-positive pool size");
  }
  if (embedding_dim != channels.back()) {
    throw std::invalid_argument("encoder config: embedding_dim must equal last channel count");
  }
  if (attention_heads < 1 || embedding_dim % attention_heads != 0) {
    throw std::invalid_argument("encoder config: embedding_dim not divisible by attention_heads");
  }
  if (kernel < 1 || kernel % 2 == 0) {
    throw std::invalid_argument("encoder config: kernel must be odd and positive");
  }
  if (activation != "relu" && activation != "identity") {
    throw std::invalid_argument("encoder config: unknown activation '" + activation + "'");
  }
  if (input_channels < 1) throw std::invalid_argument("encoder config: input_channels < 1");
}

int EncoderConfig::min_input_length() const {
  int len = 1;
  for (int p : pool_sizes) len *= p;
  return len;
}

template <typename S>
Encoder<S>::Encoder(const EncoderConfig& config, std::uint64_t seed)
    : config_(config),
      seed_(seed),
      attention_((config.validate(), config.embedding_dim), config.attention_heads) {
  Rng rng(derive_seed(seed, "encoder-init"));
  int in_ch = config_.input_channels;
  for (std::size_t i = 0; i < config_.channels.size(); ++i) {
    int out_ch = config_.channels[i];
    convs_.emplace_back(in_ch, out_ch, config_.kernel);
    init_glorot_uniform(convs_.back().weight, in_ch * config_.kernel, out_ch * config_.kernel,
                        rng);
    norms_.emplace_back(out_ch);
    activations_.emplace_back();
    if (i < config_.pool_sizes.size()) pools_.emplace_back(config_.pool_sizes[i]);
    in_ch = out_ch;
  }
  init_glorot_uniform(attention_.proj_weight, config_.embedding_dim, config_.embedding_dim, rng);
  const int head_dim = config_.embedding_dim / config_.attention_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  for (std::int64_t i = 0; i < attention_.context.size(); ++i) {
    attention_.context[i] = static_cast<S>(rng.normal() * scale);
  }
}

template <typename S>
TensorT<S> Encoder<S>::forward(const TensorT<S>& input) {
  if (input.rank() != 3 || input.dim(1) != config_.input_channels) {
    throw std::invalid_argument("encoder: expected input [N," +
                                std::to_string(config_.input_channels) + ",T], got " +
                                shape_to_string(input.shape()));
  }
  const int min_len = config_.min_input_length();
  if (input.dim(2) < min_len) {
    throw std::runtime_error("encoder: input length " + std::to_string(input.dim(2)) +
                             " below minimum " + std::to_string(min_len));
  }
  TensorT<S> x = input;
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    x = convs_[i].forward(x);
    x = norms_[i].forward(x);
    if (config_.activation == "relu") x = activations_[i].forward(x);
    if (i < pools_.size()) x = pools_[i].forward(x);
  }
  // [N,C,T] -> [N,T,C] for attention pooling
  cached_batch_ = x.dim(0);
  cached_frames_ = x.dim(2);
  const int channels = x.dim(1);
  TensorT<S> frames({cached_batch_, cached_frames_, channels});
  for (int n = 0; n < cached_batch_; ++n) {
    for (int c = 0; c < channels; ++c) {
      for (int t = 0; t < cached_frames_; ++t) frames.at(n, t, c) = x.at(n, c, t);
    }
  }
  return attention_.forward(frames);
}

template <typename S>
TensorT<S> Encoder<S>::backward(const TensorT<S>& grad_out) {
  TensorT<S> grad_frames = attention_.backward(grad_out);
  const int channels = grad_frames.dim(2);
  TensorT<S> g({cached_batch_, channels, cached_frames_});
  for (int n = 0; n < cached_batch_; ++n) {
    for (int t = 0; t < cached_frames_; ++t) {
      for (int c = 0; c < channels; ++c) g.at(n, c, t) = grad_frames.at(n, t, c);
    }
  }
  for (std::size_t i = convs_.size(); i-- > 0;) {
    if (i < pools_.size()) g = pools_[i].backward(g);
    if (config_.activation == "relu") g = activations_[i].backward(g);
    g = norms_[i].backward(g);
    g = convs_[i].backward(g);
  }
  return g;
}

template <typename S>
void Encoder<S>::set_train(bool train) {
  train_ = train;
  for (auto& bn : norms_) bn.set_train(train);
}

template <typename S>
std::vector<ParamSlot<S>> Encoder<S>::params() {
  std::vector<ParamSlot<S>> slots;
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    convs_[i].collect("conv" + std::to_string(i + 1), slots);
    norms_[i].collect("bn" + std::to_string(i + 1), slots);
  }
  attention_.collect("attention", slots);
  return slots;
}

template <typename S>
std::vector<ParamSlot<S>> Encoder<S>::persistent_tensors() {
  std::vector<ParamSlot<S>> slots;
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    const std::string conv = "conv" + std::to_string(i + 1);
    const std::string bn = "bn" + std::to_string(i + 1);
    convs_[i].collect(conv, slots);
    norms_[i].collect(bn, slots);
    slots.push_back({bn + ".running_mean", &norms_[i].running_mean, nullptr});
    slots.push_back({bn + ".running_var", &norms_[i].running_var, nullptr});
  }
  attention_.collect("attention", slots);
  return slots;
}

template <typename S>
void Encoder<S>::zero_grad() {
  for (ParamSlot<S>& slot : params()) slot.grad->fill(S(0));
}

template <typename S>
bool Encoder<S>::running_stats_ready() const {
  for (const auto& bn : norms_) {
    if (!bn.initialized) return false;
  }
  return true;
}

template <typename S>
void Encoder<S>::mark_running_stats(bool ready) {
  for (auto& bn : norms_) bn.initialized = ready;
}

template class Encoder<float>;
template class Encoder<double>;

Tensor series_to_input(const PitchSeries& series) {
  const int t_len = static_cast<int>(series.pitch.size());
  Tensor input({1, 2, t_len});
  for (int t = 0; t < t_len; ++t) {
    input.at(0, 0, t) = static_cast<float>(series.pitch[static_cast<std::size_t>(t)]);
    input.at(0, 1, t) = static_cast<float>(series.confidence[static_cast<std::size_t>(t)]);
  }
  return input;
}

EncodeResult encode_corpus(Encoder<float>& model, const std::vector<SongRecord>& manifest,
                           const std::map<std::string, double>& tonic_table,
                           const std::string& manifest_path, int workers) {
  if (!model.running_stats_ready()) {
    throw std::runtime_error("encode_corpus: model has uninitialized running statistics");
  }
  std::vector<const SongRecord*> included;
  for (const SongRecord& rec : manifest) {
    if (!rec.excluded) included.push_back(&rec);
  }

  struct Slot {
    Embedding embedding;
    std::string error;
    bool failed = false;
  };
  std::vector<Slot> slots(included.size());
  std::atomic<std::size_t> next{0};
  workers = std::max(1, workers);

  auto run = [&](Encoder<float> local) {
    local.set_train(false);
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= slots.size()) break;
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
        Tensor out = local.forward(series_to_input(series));
        Embedding emb;
        emb.song_id = rec.song_id;
        emb.vector.assign(out.data(), out.data() + out.size());
        slots[i].embedding = std::move(emb);
      } catch (const std::exception& e) {
        slots[i].failed = true;
        slots[i].error = e.what();
      }
    }
  };

  if (workers == 1) {
    run(model);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) threads.emplace_back(run, model);
    for (auto& t : threads) t.join();
  }

  EncodeResult result;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].failed) {
      result.issues.push_back({included[i]->song_id, slots[i].error});
    } else {
      result.embeddings.push_back(std::move(slots[i].embedding));
    }
  }
  return result;
}

// ------------------------------------------------------------- checkpoint

namespace {

constexpr const char* kCheckpointFormat = "torivec-checkpoint";
constexpr int kCheckpointVersion = 1;

nlohmann::ordered_json config_to_json(const EncoderConfig& c) {
  nlohmann::ordered_json j;
  j["channels"] = c.channels;
  j["kernel"] = c.kernel;
  j["pool_sizes"] = c.pool_sizes;
  j["embedding_dim"] = c.embedding_dim;
  j["attention_heads"] = c.attention_heads;
  j["activation"] = c.activation;
  j["input_channels"] = c.input_channels;
  return j;
}

EncoderConfig config_from_json(const nlohmann::json& j) {
  EncoderConfig c;
  c.channels = j.at("channels").get<std::vector<int>>();
  c.kernel = j.at("kernel").get<int>();
  c.pool_sizes = j.at("pool_sizes").get<std::vector<int>>();
  c.embedding_dim = j.at("embedding_dim").get<int>();
  c.attention_heads = j.at("attention_heads").get<int>();
  c.activation = j.at("activation").get<std::string>();
  c.input_channels = j.at("input_channels").get<int>();
  return c;
}

}  // namespace

void save_checkpoint(const Encoder<float>& model, const Linear<float>* region_head,
                     const std::string& path) {
  auto& mutable_model = const_cast<Encoder<float>&>(model);  // slot collection only
  std::vector<ParamSlot<float>> slots = mutable_model.persistent_tensors();
  std::vector<std::pair<std::string, const Tensor*>> tensors;
  for (const auto& slot : slots) tensors.emplace_back(slot.name, slot.value);
  if (region_head != nullptr) {
    tensors.emplace_back("region_head.weight", &region_head->weight);
    tensors.emplace_back("region_head.bias", &region_head->bias);
  }

  std::string payload;
  nlohmann::ordered_json inventory = nlohmann::ordered_json::array();
  for (const auto& [name, tensor] : tensors) {
    nlohmann::ordered_json entry;
    entry["name"] = name;
    entry["shape"] = tensor->shape();
    inventory.push_back(entry);
    const std::size_t bytes = static_cast<std::size_t>(tensor->size()) * sizeof(float);
    const std::size_t offset = payload.size();
    payload.resize(offset + bytes);
    std::memcpy(payload.data() + offset, tensor->data(), bytes);
  }

  nlohmann::ordered_json header;
  header["format"] = kCheckpointFormat;
  header["version"] = kCheckpointVersion;
  header["seed"] = model.init_seed();
  header["config"] = config_to_json(model.config());
  header["bn_initialized"] = model.running_stats_ready();
  header["region_head_classes"] =
      region_head != nullptr ? region_head->out_features() : 0;
  header["tensors"] = inventory;
  header["payload_bytes"] = payload.size();
  header["payload_crc32"] = crc32(payload.data(), payload.size());

  std::string out = header.dump();
  out += '\n';
  out += payload;
  write_text_file(path, out);
}

LoadedCheckpoint load_checkpoint(const std::string& path, int expected_embedding_dim) {
  std::string content = read_text_file(path);
  std::size_t newline = content.find('\n');
  if (newline == std::string::npos) {
    throw std::runtime_error("checkpoint " + path + ": missing header line");
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(content.substr(0, newline));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("checkpoint " + path + ": bad header: " + e.what());
  }
  if (header.value("format", "") != kCheckpointFormat) {
    throw std::runtime_error("checkpoint " + path + ": unrecognized format");
  }
  if (header.value("version", -1) != kCheckpointVersion) {
    throw std::runtime_error("checkpoint " + path + ": unsupported version " +
                             std::to_string(header.value("version", -1)));
  }

  const std::string payload = content.substr(newline + 1);
  const std::size_t expected_bytes = header.at("payload_bytes").get<std::size_t>();
  if (payload.size() != expected_bytes) {
    throw std::runtime_error("checkpoint " + path + ": payload truncated (" +
                             std::to_string(payload.size()) + " of " +
                             std::to_string(expected_bytes) + " bytes)");
  }
  const std::uint32_t crc = crc32(payload.data(), payload.size());
  if (crc != header.at("payload_crc32").get<std::uint32_t>()) {
    throw std::runtime_error("checkpoint " + path + ": payload checksum mismatch");
  }

  EncoderConfig config = config_from_json(header.at("config"));
  if (expected_embedding_dim >= 0 && config.embedding_dim != expected_embedding_dim) {
    throw std::runtime_error("checkpoint " + path + ": embedding_dim " +
                             std::to_string(config.embedding_dim) + " does not match expected " +
                             std::to_string(expected_embedding_dim));
  }

  LoadedCheckpoint loaded{Encoder<float>(config, header.at("seed").get<std::uint64_t>()),
                          std::nullopt};
  const int head_classes = header.value("region_head_classes", 0);
  if (head_classes > 0) loaded.region_head.emplace(config.embedding_dim, head_classes);

  std::vector<std::pair<std::string, Tensor*>> tensors;
  for (const auto& slot : loaded.model.persistent_tensors()) {
    tensors.emplace_back(slot.name, slot.value);
  }
  if (loaded.region_head) {
    tensors.emplace_back("region_head.weight", &loaded.region_head->weight);
    tensors.emplace_back("region_head.bias", &loaded.region_head->bias);
  }

  const auto& inventory = header.at("tensors");
  if (inventory.size() != tensors.size()) {
    throw std::runtime_error("checkpoint " + path + ": tensor inventory mismatch");
  }
  std::size_t offset = 0;
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const auto& entry = inventory[i];
    auto& [name, tensor] = tensors[i];
    if (entry.at("name").get<std::string>() != name ||
        entry.at("shape").get<std::vector<int>>() != tensor->shape()) {
      throw std::runtime_error("checkpoint " + path + ": tensor " + std::to_string(i) +
                               " does not match model layout");
    }
    const std::size_t bytes = static_cast<std::size_t>(tensor->size()) * sizeof(float);
    std::memcpy(tensor->data(), payload.data() + offset, bytes);
    offset += bytes;
  }
  loaded.model.mark_running_stats(header.value("bn_initialized", false));
  return loaded;
}

void write_embeddings_csv(const std::vector<Embedding>& embeddings, const std::string& path) {
  if (embeddings.empty()) throw std::invalid_argument("write_embeddings_csv: no embeddings");
  const std::size_t dim = embeddings.front().vector.size();
  std::string out = "song_id";
  for (std::size_t i = 0; i < dim; ++i) out += ",e" + std::to_string(i);
  out += '\n';
  for (const Embedding& emb : embeddings) {
    if (emb.vector.size() != dim) {
      throw std::invalid_argument("write_embeddings_csv: mixed dimensions");
    }
    out += emb.song_id;
    for (float v : emb.vector) {
      out += ',';
      out += format_double(static_cast<double>(v));
    }
    out += '\n';
  }
  write_text_file(path, out);
}

std::vector<Embedding> read_embeddings_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open embeddings file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("song_id,", 0) != 0) {
    throw std::runtime_error(path + ": not an embeddings CSV (bad header)");
  }
  const std::size_t dim = split_csv_line(line).size() - 1;
  std::vector<Embedding> embeddings;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != dim + 1) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": wrong field count");
    }
    Embedding emb;
    emb.song_id = std::string(fields[0]);
    emb.vector.reserve(dim);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      double v;
      if (!parse_double(fields[i], v)) {
        throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                                 ": malformed value");
      }
      emb.vector.push_back(static_cast<float>(v));
    }
    embeddings.push_back(std::move(emb));
  }
  return embeddings;
}

}  // namespace torivec

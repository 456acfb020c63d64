// torivec command-line tool: end-to-end pipeline orchestration with seeded,
// reproducible runs. Every subcommand writes a provenance JSON next to its
// primary output (full config, seed, input/output checksums).

#include <atomic>
#include <cstdint>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "torivec/contour.h"
#include "torivec/encoder.h"
#include "torivec/evaluation.h"
#include "torivec/ioutil.h"
#include "torivec/projection.h"
#include "torivec/rng.h"
#include "torivec/scale.h"
#include "torivec/synth.h"
#include "torivec/training.h"

namespace {

using nlohmann::ordered_json;

// Runs f(0..n-1) across `workers` threads; f must only touch slot i.
template <typename F>
void parallel_indices(std::size_t n, int workers, F f) {
  workers = std::max(1, workers);
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      f(i);
    }
  };
  std::vector<std::thread> threads;
  for (int w = 0; w < workers; ++w) threads.emplace_back(run);
  for (auto& t : threads) t.join();
}

void write_provenance(const std::string& command, const ordered_json& config,
                      const std::vector<std::string>& inputs,
                      const std::vector<std::string>& outputs, const std::string& path) {
  auto files = [](const std::vector<std::string>& paths) {
    ordered_json arr = ordered_json::array();
    for (const std::string& p : paths) {
      ordered_json entry;
      entry["path"] = p;
      entry["crc32"] = torivec::crc32_file(p);
      arr.push_back(std::move(entry));
    }
    return arr;
  };
  ordered_json j;
  j["command"] = command;
  j["config"] = config;
  j["inputs"] = files(inputs);
  j["outputs"] = files(outputs);
  torivec::write_text_file(path, j.dump(2) + "\n");
}

std::map<std::string, double> load_tonic_table(const std::string& path) {
  std::map<std::string, double> table;
  if (path.empty()) return table;
  for (const auto& [song_id, estimate] : torivec::read_tonic_csv(path)) {
    table[song_id] = estimate.tonic_midi;
  }
  return table;
}

std::vector<std::string> contour_paths(const std::vector<torivec::SongRecord>& records,
                                       const std::string& manifest_path) {
  std::vector<std::string> paths;
  for (const auto& rec : records) {
    if (!rec.excluded) {
      paths.push_back(torivec::resolve_relative(manifest_path, rec.contour_path));
    }
  }
  return paths;
}

// "report.json" -> "report_repeats.csv"
std::string repeats_csv_path(const std::string& report_path) {
  const std::string suffix = ".json";
  if (report_path.size() > suffix.size() &&
      report_path.compare(report_path.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return report_path.substr(0, report_path.size() - suffix.size()) + "_repeats.csv";
  }
  return report_path + ".repeats.csv";
}

struct IngestArgs {
  std::string manifest, out = "ingest_report.json";
  int workers = 1;
  std::uint64_t seed = 0;
};

int run_ingest(const IngestArgs& args) {
  auto records = torivec::load_manifest(args.manifest);
  std::vector<const torivec::SongRecord*> active;
  for (const auto& rec : records) {
    if (!rec.excluded) active.push_back(&rec);
  }

  std::vector<std::string> issues(active.size());
  parallel_indices(active.size(), args.workers, [&](std::size_t i) {
    try {
      torivec::Contour contour = torivec::parse_contour_file(
          torivec::resolve_relative(args.manifest, active[i]->contour_path));
      torivec::decimate(contour);  // also verifies the rate divides evenly
    } catch (const std::exception& e) {
      issues[i] = e.what();
    }
  });

  std::map<std::string, int> regions, labels;
  for (const auto& rec : records) {
    if (rec.excluded) continue;
    ++regions[rec.region];
    if (rec.tori_label.has_value()) ++labels[*rec.tori_label];
  }

  ordered_json report;
  report["manifest"] = args.manifest;
  report["songs"] = records.size();
  report["excluded"] = records.size() - active.size();
  ordered_json issue_list = ordered_json::array();
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (!issues[i].empty()) {
      ordered_json entry;
      entry["song_id"] = active[i]->song_id;
      entry["message"] = issues[i];
      issue_list.push_back(std::move(entry));
    }
  }
  report["issues"] = issue_list;
  report["regions"] = regions;
  report["tori_labels"] = labels;
  torivec::write_text_file(args.out, report.dump(2) + "\n");

  ordered_json config;
  config["manifest"] = args.manifest;
  config["out"] = args.out;
  config["workers"] = args.workers;
  config["seed"] = args.seed;
  std::vector<std::string> inputs = contour_paths(records, args.manifest);
  inputs.insert(inputs.begin(), args.manifest);
  write_provenance("ingest", config, inputs, {args.out}, args.out + ".prov.json");

  std::cout << "ingest: " << active.size() << " active songs, " << issue_list.size()
            << " issue(s)\n";
  if (!issue_list.empty()) {
    for (const auto& entry : issue_list) {
      std::cerr << "  " << entry["song_id"].get<std::string>() << ": "
                << entry["message"].get<std::string>() << "\n";
    }
    return 1;
  }
  return 0;
}

struct TonicArgs {
  std::string manifest, out;
  int workers = 1;
  std::uint64_t seed = 0;
};

int run_tonic(const TonicArgs& args) {
  auto records = torivec::load_manifest(args.manifest);
  std::vector<const torivec::SongRecord*> active;
  for (const auto& rec : records) {
    if (!rec.excluded) active.push_back(&rec);
  }

  std::vector<std::pair<std::string, torivec::TonicEstimate>> rows(active.size());
  std::vector<std::string> errors(active.size());
  parallel_indices(active.size(), args.workers, [&](std::size_t i) {
    try {
      torivec::Contour contour = torivec::parse_contour_file(
          torivec::resolve_relative(args.manifest, active[i]->contour_path));
      rows[i] = {active[i]->song_id, torivec::estimate_tonic(contour)};
    } catch (const std::exception& e) {
      errors[i] = active[i]->song_id + ": " + e.what();
    }
  });
  for (const std::string& err : errors) {
    if (!err.empty()) throw std::runtime_error("tonic: " + err);
  }
  torivec::write_tonic_csv(rows, args.out);

  ordered_json config;
  config["manifest"] = args.manifest;
  config["out"] = args.out;
  config["workers"] = args.workers;
  config["seed"] = args.seed;
  std::vector<std::string> inputs = contour_paths(records, args.manifest);
  inputs.insert(inputs.begin(), args.manifest);
  write_provenance("tonic", config, inputs, {args.out}, args.out + ".prov.json");
  std::cout << "tonic: wrote " << rows.size() << " estimates to " << args.out << "\n";
  return 0;
}

struct HistogramArgs {
  std::string manifest, out, tonic;
  int bins = 25;
  int workers = 1;
  std::uint64_t seed = 0;
};

int run_histogram(const HistogramArgs& args) {
  auto records = torivec::load_manifest(args.manifest);
  auto table = load_tonic_table(args.tonic);
  std::vector<const torivec::SongRecord*> active;
  for (const auto& rec : records) {
    if (!rec.excluded) active.push_back(&rec);
  }

  std::vector<std::pair<std::string, torivec::ToneHistogram>> rows(active.size());
  std::vector<std::string> errors(active.size());
  parallel_indices(active.size(), args.workers, [&](std::size_t i) {
    try {
      torivec::Contour contour = torivec::parse_contour_file(
          torivec::resolve_relative(args.manifest, active[i]->contour_path));
      torivec::TonicEstimate tonic;
      if (auto it = table.find(active[i]->song_id); it != table.end()) {
        tonic.tonic_midi = it->second;
      } else {
        tonic = torivec::estimate_tonic(contour);
      }
      rows[i] = {active[i]->song_id, torivec::build_histogram(contour, tonic, args.bins)};
    } catch (const std::exception& e) {
      errors[i] = active[i]->song_id + ": " + e.what();
    }
  });
  for (const std::string& err : errors) {
    if (!err.empty()) throw std::runtime_error("histogram: " + err);
  }
  torivec::write_histogram_csv(rows, args.out);

  ordered_json config;
  config["manifest"] = args.manifest;
  config["out"] = args.out;
  config["bins"] = args.bins;
  config["tonic"] = args.tonic;
  config["workers"] = args.workers;
  config["seed"] = args.seed;
  std::vector<std::string> inputs = contour_paths(records, args.manifest);
  inputs.insert(inputs.begin(), args.manifest);
  if (!args.tonic.empty()) inputs.insert(inputs.begin() + 1, args.tonic);
  write_provenance("histogram", config, inputs, {args.out}, args.out + ".prov.json");
  std::cout << "histogram: wrote " << rows.size() << " rows (" << args.bins << " bins) to "
            << args.out << "\n";
  return 0;
}

struct SynthArgs {
  std::string out;
  int classes = 3;
  int per_class = 20;
  std::uint64_t seed = 0;
};

int run_synth(const SynthArgs& args) {
  auto spec = torivec::default_synthetic_spec(args.classes, args.per_class);
  auto records = torivec::generate_synthetic_corpus(spec, args.seed, args.out);

  ordered_json config;
  config["out"] = args.out;
  config["classes"] = args.classes;
  config["per_class"] = args.per_class;
  config["seed"] = args.seed;
  std::vector<std::string> outputs;
  outputs.push_back(args.out + "/manifest.jsonl");
  for (const auto& rec : records) outputs.push_back(args.out + "/" + rec.contour_path);
  write_provenance("synth", config, {}, outputs, args.out + "/synth.prov.json");
  std::cout << "synth: wrote " << records.size() << " songs to " << args.out << "\n";
  return 0;
}

struct TrainArgs {
  std::string manifest, out, tonic;
  torivec::TrainConfig config;
  int workers = 1;
};

int run_train(const TrainArgs& args) {
  auto records = torivec::load_manifest(args.manifest);
  auto table = load_tonic_table(args.tonic);
  auto corpus =
      torivec::prepare_training_corpus(records, args.manifest, table, args.workers);

  torivec::EncoderConfig encoder_config;
  torivec::Encoder<float> model(encoder_config, args.config.seed);
  auto outputs = torivec::train(model, corpus, args.config, args.out);

  ordered_json config;
  config["manifest"] = args.manifest;
  config["out"] = args.out;
  config["tonic"] = args.tonic;
  config["mode"] = args.config.mode;
  config["updates"] = args.config.updates;
  config["batch_size"] = args.config.batch_size;
  config["margin"] = args.config.margin;
  config["negatives"] = args.config.negatives;
  config["slice_seconds"] = args.config.slice_seconds;
  config["learning_rate"] = args.config.adam.learning_rate;
  config["checkpoint_every"] = args.config.checkpoint_every;
  config["val_fraction"] = args.config.val_fraction;
  config["workers"] = args.workers;
  config["seed"] = args.config.seed;
  config["encoder"] = {{"channels", encoder_config.channels},
                       {"kernel", encoder_config.kernel},
                       {"pool_sizes", encoder_config.pool_sizes},
                       {"embedding_dim", encoder_config.embedding_dim},
                       {"attention_heads", encoder_config.attention_heads},
                       {"activation", encoder_config.activation}};
  std::vector<std::string> inputs = contour_paths(records, args.manifest);
  inputs.insert(inputs.begin(), args.manifest);
  if (!args.tonic.empty()) inputs.insert(inputs.begin() + 1, args.tonic);
  std::vector<std::string> out_files = outputs.all_checkpoints;
  out_files.push_back(outputs.loss_csv_path);
  out_files.push_back(args.out + "/train_config.json");
  write_provenance("train", config, inputs, out_files, args.out + "/train.prov.json");

  std::cout << "train: " << args.config.mode << " mode, " << outputs.losses.size()
            << " updates on " << outputs.train_songs << " songs";
  if (!outputs.losses.empty()) {
    std::cout << ", final loss " << torivec::format_double(outputs.losses.back());
  }
  if (outputs.val_loss.has_value()) {
    std::cout << ", val loss " << torivec::format_double(*outputs.val_loss) << " ("
              << outputs.val_songs << " held-out songs)";
  }
  std::cout << "\n";
  return 0;
}

struct EncodeArgs {
  std::string manifest, checkpoint, out, tonic;
  int workers = 1;
  std::uint64_t seed = 0;
};

int run_encode(const EncodeArgs& args) {
  auto records = torivec::load_manifest(args.manifest);
  auto table = load_tonic_table(args.tonic);
  auto loaded = torivec::load_checkpoint(args.checkpoint);
  auto result =
      torivec::encode_corpus(loaded.model, records, table, args.manifest, args.workers);
  for (const auto& issue : result.issues) {
    std::cerr << "encode: skipped " << issue.song_id << ": " << issue.message << "\n";
  }
  if (result.embeddings.empty()) {
    throw std::runtime_error("encode: no song could be embedded");
  }
  torivec::write_embeddings_csv(result.embeddings, args.out);

  ordered_json config;
  config["manifest"] = args.manifest;
  config["checkpoint"] = args.checkpoint;
  config["out"] = args.out;
  config["tonic"] = args.tonic;
  config["workers"] = args.workers;
  config["seed"] = args.seed;
  std::vector<std::string> inputs = contour_paths(records, args.manifest);
  inputs.insert(inputs.begin(), args.checkpoint);
  inputs.insert(inputs.begin(), args.manifest);
  if (!args.tonic.empty()) inputs.push_back(args.tonic);
  write_provenance("encode", config, inputs, {args.out}, args.out + ".prov.json");
  std::cout << "encode: wrote " << result.embeddings.size() << " embeddings to " << args.out
            << "\n";
  return 0;
}

struct EvalArgs {
  std::string manifest, features, embeddings, out, name, tonic;
  int repeats = 30;
  double train_fraction = 0.75;
  int workers = 1;
  std::uint64_t seed = 0;
};

int run_eval(const EvalArgs& args) {
  auto records = torivec::load_manifest(args.manifest);

  std::vector<torivec::Embedding> features;
  if (args.features == "embeddings") {
    if (args.embeddings.empty()) {
      throw std::runtime_error("eval: --features embeddings requires --embeddings FILE");
    }
    features = torivec::read_embeddings_csv(args.embeddings);
  } else {
    const int bins = args.features == "hist25" ? 25 : 124;
    auto table = load_tonic_table(args.tonic);
    std::vector<const torivec::SongRecord*> active;
    for (const auto& rec : records) {
      if (!rec.excluded) active.push_back(&rec);
    }
    features.resize(active.size());
    std::vector<std::string> errors(active.size());
    parallel_indices(active.size(), args.workers, [&](std::size_t i) {
      try {
        torivec::Contour contour = torivec::parse_contour_file(
            torivec::resolve_relative(args.manifest, active[i]->contour_path));
        torivec::TonicEstimate tonic;
        if (auto it = table.find(active[i]->song_id); it != table.end()) {
          tonic.tonic_midi = it->second;
        } else {
          tonic = torivec::estimate_tonic(contour);
        }
        auto hist = torivec::build_histogram(contour, tonic, bins);
        features[i].song_id = active[i]->song_id;
        features[i].vector.assign(hist.bins.begin(), hist.bins.end());
      } catch (const std::exception& e) {
        errors[i] = active[i]->song_id + ": " + e.what();
      }
    });
    for (const std::string& err : errors) {
      if (!err.empty()) throw std::runtime_error("eval: " + err);
    }
  }

  auto set = torivec::make_labeled_set(features, records);
  const double ndcg = torivec::mean_ndcg(set);
  auto split = torivec::repeated_split_eval(set, args.repeats, args.train_fraction, args.seed);

  torivec::EvalReport report;
  report.embedding_name = args.name.empty() ? args.features : args.name;
  report.ndcg = ndcg;
  report.rf_accuracy_mean = split.mean;
  report.rf_accuracy_std = split.std_dev;
  report.repeats = args.repeats;
  report.seed = args.seed;
  torivec::write_eval_report(report, args.out);
  const std::string repeats_csv = repeats_csv_path(args.out);
  torivec::write_per_repeat_csv(split.per_repeat, repeats_csv);

  ordered_json config;
  config["manifest"] = args.manifest;
  config["features"] = args.features;
  config["embeddings"] = args.embeddings;
  config["out"] = args.out;
  config["name"] = report.embedding_name;
  config["repeats"] = args.repeats;
  config["train_fraction"] = args.train_fraction;
  config["tonic"] = args.tonic;
  config["workers"] = args.workers;
  config["seed"] = args.seed;
  std::vector<std::string> inputs = {args.manifest};
  if (!args.embeddings.empty()) inputs.push_back(args.embeddings);
  if (args.features != "embeddings") {
    auto contours = contour_paths(records, args.manifest);
    inputs.insert(inputs.end(), contours.begin(), contours.end());
  }
  write_provenance("eval", config, inputs, {args.out, repeats_csv}, args.out + ".prov.json");

  std::cout << "eval[" << report.embedding_name << "]: " << set.items.size()
            << " labeled songs, ndcg " << torivec::format_double(ndcg) << ", rf accuracy "
            << torivec::format_double(split.mean) << " +- "
            << torivec::format_double(split.std_dev) << "\n";
  return 0;
}

struct ProjectArgs {
  std::string embeddings, manifest, out;
  std::uint64_t seed = 0;
  bool html = false;  // report subcommand reuses this runner
};

int run_project(const ProjectArgs& args) {
  auto records = torivec::load_manifest(args.manifest);
  auto embeddings = torivec::read_embeddings_csv(args.embeddings);
  auto projection = torivec::pca_2d(embeddings);
  if (args.html) {
    torivec::export_report(projection, records, args.out);
  } else {
    torivec::write_projection_csv(projection, records, args.out);
  }

  ordered_json config;
  config["embeddings"] = args.embeddings;
  config["manifest"] = args.manifest;
  config["out"] = args.out;
  config["seed"] = args.seed;
  write_provenance(args.html ? "report" : "project", config, {args.embeddings, args.manifest},
                   {args.out}, args.out + ".prov.json");
  std::cout << (args.html ? "report" : "project") << ": wrote " << projection.points.size()
            << " points to " << args.out << " (explained variance "
            << torivec::format_double(projection.explained_variance[0]) << " / "
            << torivec::format_double(projection.explained_variance[1]) << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"torivec: melodic contour embeddings for folk-song corpora"};
  app.require_subcommand(1);

  IngestArgs ingest_args;
  auto* ingest = app.add_subcommand("ingest", "Validate a manifest and its contour files");
  ingest->add_option("--manifest", ingest_args.manifest, "Manifest JSONL")->required();
  ingest->add_option("--out", ingest_args.out, "Validation report JSON");
  ingest->add_option("--workers", ingest_args.workers, "Parallel parse workers");
  ingest->add_option("--seed", ingest_args.seed, "Recorded in provenance");

  TonicArgs tonic_args;
  auto* tonic = app.add_subcommand("tonic", "Estimate per-song tonics into a table CSV");
  tonic->add_option("--manifest", tonic_args.manifest, "Manifest JSONL")->required();
  tonic->add_option("--out", tonic_args.out, "Tonic table CSV")->required();
  tonic->add_option("--workers", tonic_args.workers, "Parallel workers");
  tonic->add_option("--seed", tonic_args.seed, "Recorded in provenance");

  HistogramArgs hist_args;
  auto* hist = app.add_subcommand("histogram", "Write tonic-normalized pitch histograms");
  hist->add_option("--manifest", hist_args.manifest, "Manifest JSONL")->required();
  hist->add_option("--out", hist_args.out, "Histogram CSV")->required();
  hist->add_option("--bins", hist_args.bins, "Bin count over two octaves")
      ->check(CLI::IsMember({25, 124}));
  hist->add_option("--tonic", hist_args.tonic, "Tonic table CSV (else estimated)");
  hist->add_option("--workers", hist_args.workers, "Parallel workers");
  hist->add_option("--seed", hist_args.seed, "Recorded in provenance");

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic labeled corpus");
  synth->add_option("--out", synth_args.out, "Output directory")->required();
  synth->add_option("--classes", synth_args.classes, "Class count (2-4)")
      ->check(CLI::Range(2, 4));
  synth->add_option("--per-class", synth_args.per_class, "Songs per class")
      ->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_args.seed, "Generator seed");

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train the encoder (ssl or region mode)");
  train->add_option("--manifest", train_args.manifest, "Manifest JSONL")->required();
  train->add_option("--out", train_args.out, "Output directory")->required();
  train->add_option("--mode", train_args.config.mode, "ssl | region")
      ->check(CLI::IsMember({"ssl", "region"}));
  train->add_option("--updates", train_args.config.updates, "Optimizer updates");
  train->add_option("--batch", train_args.config.batch_size, "Batch size");
  train->add_option("--margin", train_args.config.margin, "Triplet hinge margin");
  train->add_option("--negatives", train_args.config.negatives, "Negatives per anchor");
  train->add_option("--slice-seconds", train_args.config.slice_seconds, "Training slice length");
  train->add_option("--lr", train_args.config.adam.learning_rate, "Adam learning rate");
  train->add_option("--checkpoint-every", train_args.config.checkpoint_every,
                    "Checkpoint cadence in updates");
  train->add_option("--val-fraction", train_args.config.val_fraction,
                    "Held-out fraction for the end-of-run loss report");
  train->add_option("--tonic", train_args.tonic, "Tonic table CSV (else estimated)");
  train->add_option("--workers", train_args.workers, "Corpus preparation workers");
  train->add_option("--seed", train_args.config.seed, "Run seed");

  EncodeArgs encode_args;
  auto* encode = app.add_subcommand("encode", "Embed every song with a trained checkpoint");
  encode->add_option("--manifest", encode_args.manifest, "Manifest JSONL")->required();
  encode->add_option("--checkpoint", encode_args.checkpoint, "Model checkpoint")->required();
  encode->add_option("--out", encode_args.out, "Embeddings CSV")->required();
  encode->add_option("--tonic", encode_args.tonic, "Tonic table CSV (else estimated)");
  encode->add_option("--workers", encode_args.workers, "Parallel workers");
  encode->add_option("--seed", encode_args.seed, "Recorded in provenance");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "nDCG and random-forest metrics for a feature set");
  eval->add_option("--manifest", eval_args.manifest, "Manifest JSONL")->required();
  eval->add_option("--features", eval_args.features, "embeddings | hist25 | hist124")
      ->required()
      ->check(CLI::IsMember({"embeddings", "hist25", "hist124"}));
  eval->add_option("--embeddings", eval_args.embeddings, "Embeddings CSV (features=embeddings)");
  eval->add_option("--out", eval_args.out, "Report JSON")->required();
  eval->add_option("--name", eval_args.name, "embedding_name in the report");
  eval->add_option("--repeats", eval_args.repeats, "Split repeats")->check(CLI::PositiveNumber);
  eval->add_option("--train-fraction", eval_args.train_fraction, "Train split fraction");
  eval->add_option("--tonic", eval_args.tonic, "Tonic table CSV (histogram features)");
  eval->add_option("--workers", eval_args.workers, "Parallel workers");
  eval->add_option("--seed", eval_args.seed, "Split/forest seed");

  ProjectArgs project_args;
  auto* project = app.add_subcommand("project", "2D PCA projection CSV");
  project->add_option("--embeddings", project_args.embeddings, "Embeddings CSV")->required();
  project->add_option("--manifest", project_args.manifest, "Manifest JSONL")->required();
  project->add_option("--out", project_args.out, "Projection CSV")->required();
  project->add_option("--seed", project_args.seed, "Recorded in provenance");

  ProjectArgs report_args;
  report_args.html = true;
  auto* report = app.add_subcommand("report", "Self-contained HTML embedding map");
  report->add_option("--embeddings", report_args.embeddings, "Embeddings CSV")->required();
  report->add_option("--manifest", report_args.manifest, "Manifest JSONL")->required();
  report->add_option("--out", report_args.out, "HTML file")->required();
  report->add_option("--seed", report_args.seed, "Recorded in provenance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) return run_ingest(ingest_args);
    if (*tonic) return run_tonic(tonic_args);
    if (*hist) return run_histogram(hist_args);
    if (*synth) return run_synth(synth_args);
    if (*train) return run_train(train_args);
    if (*encode) return run_encode(encode_args);
    if (*eval) return run_eval(eval_args);
    if (*project) return run_project(project_args);
    if (*report) return run_project(report_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#include "torivec/synth.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "torivec/rng.h"

namespace torivec {

void SyntheticSpec::validate() const {
  if (classes.size() < 2) {
    throw std::invalid_argument("synthetic spec: needs at least 2 classes, have " +
                                std::to_string(classes.size()));
  }
  for (const SynthClassSpec& c : classes) {
    if (c.name.empty()) throw std::invalid_argument("synthetic spec: unnamed class");
    if (c.scale_degrees.empty()) {
      throw std::invalid_argument("synthetic spec: class " + c.name + " has no scale degrees");
    }
    if (c.vibrato_depth < 0.0 || (c.vibrato_depth > 0.0 && c.vibrato_rate_hz <= 0.0)) {
      throw std::invalid_argument("synthetic spec: class " + c.name + " has a bad vibrato");
    }
    if (c.min_note_frames < 5 || c.max_note_frames < c.min_note_frames) {
      throw std::invalid_argument("synthetic spec: class " + c.name + " has a bad note range");
    }
    if (c.min_phrase_notes < 1 || c.max_phrase_notes < c.min_phrase_notes) {
      throw std::invalid_argument("synthetic spec: class " + c.name + " has a bad phrase range");
    }
    if (c.min_gap_frames < 5 || c.max_gap_frames < c.min_gap_frames) {
      throw std::invalid_argument("synthetic spec: class " + c.name + " has a bad gap range");
    }
  }
  if (songs_per_class < 1) throw std::invalid_argument("synthetic spec: songs_per_class < 1");
  if (!(min_duration_sec > 0.0) || max_duration_sec < min_duration_sec) {
    throw std::invalid_argument("synthetic spec: bad duration range");
  }
  if (!(tonic_lo_hz > 0.0) || tonic_hi_hz < tonic_lo_hz) {
    throw std::invalid_argument("synthetic spec: bad tonic range");
  }
  if (jitter_sigma < 0.0) throw std::invalid_argument("synthetic spec: negative jitter");
}

SyntheticSpec default_synthetic_spec(int classes, int per_class) {
  if (classes < 2 || classes > 4) {
    throw std::invalid_argument("default synthetic spec supports 2 to 4 classes, got " +
                                std::to_string(classes));
  }
  // All presets share one pentatonic scale so the histogram baseline cannot
  // separate them on pitch content alone; the ornamented classes also share
  // one vibrato depth. The class signatures live in time-domain habits a
  // pitch histogram cannot see: vibrato rate, tempo, and above all phrasing —
  // rest frames are confidence-masked, so phrase/gap structure is invisible
  // to the histogram by construction.
  const std::vector<double> scale = {0.0, 2.0, 4.0, 7.0, 9.0};
  std::vector<SynthClassSpec> presets(4);
  presets[0] = {"gyung", scale, 0.0, 0.0, {}, false, 16, 26, 3, 5, 30, 50};
  presets[1] = {"menari", scale, 0.8, 5.5, {4.0, 9.0}, true, 44, 56, 2, 3, 70, 100};
  presets[2] = {"yukja", scale, 0.8, 2.5, {4.0, 9.0}, true, 68, 84, 6, 8, 12, 20};
  presets[3] = {"others", scale, 0.8, 7.5, {2.0, 7.0}, true, 30, 40, 4, 6, 20, 35};

  SyntheticSpec spec;
  spec.classes.assign(presets.begin(), presets.begin() + classes);
  spec.songs_per_class = per_class;
  return spec;
}

namespace {

std::string song_name(const std::string& class_name, int index) {
  std::string num = std::to_string(index);
  while (num.size() < 3) num.insert(num.begin(), '0');
  return class_name + "_" + num;
}

Contour synthesize_song(const SynthClassSpec& cls, const SyntheticSpec& spec,
                        const std::string& song_id, Rng& rng) {
  const double tonic_midi =
      rng.uniform(hz_to_semitone(spec.tonic_lo_hz), hz_to_semitone(spec.tonic_hi_hz));
  const int total = static_cast<int>(rng.uniform_int(
      static_cast<std::int64_t>(spec.min_duration_sec * 100.0),
      static_cast<std::int64_t>(spec.max_duration_sec * 100.0)));

  // Home degree = the one nearest the tonic; the walk keeps returning to it.
  std::size_t home = 0;
  for (std::size_t i = 1; i < cls.scale_degrees.size(); ++i) {
    if (std::abs(cls.scale_degrees[i]) < std::abs(cls.scale_degrees[home])) home = i;
  }

  Contour contour;
  contour.song_id = song_id;
  contour.source_rate_hz = 100.0;
  contour.frames.reserve(static_cast<std::size_t>(total));

  auto push_voiced = [&](double midi, double conf) {
    ContourFrame f;
    f.time_sec = static_cast<double>(contour.frames.size()) / 100.0;
    f.f0_hz = semitone_to_hz(midi);
    f.confidence = conf;
    contour.frames.push_back(f);
  };
  auto push_gap = [&](double conf) {
    ContourFrame f;
    f.time_sec = static_cast<double>(contour.frames.size()) / 100.0;
    f.confidence = conf;
    contour.frames.push_back(f);
  };

  std::size_t degree = home;
  double prev_note_end = tonic_midi + cls.scale_degrees[home] - 1.5;
  while (static_cast<int>(contour.frames.size()) < total) {
    const int phrase_notes =
        static_cast<int>(rng.uniform_int(cls.min_phrase_notes, cls.max_phrase_notes));
    for (int note = 0; note < phrase_notes && static_cast<int>(contour.frames.size()) < total;
         ++note) {
      if (rng.uniform() < 0.2) {
        degree = home;
      } else {
        const auto step = rng.uniform_int(-2, 2);
        const auto top = static_cast<std::int64_t>(cls.scale_degrees.size()) - 1;
        degree = static_cast<std::size_t>(
            std::clamp(static_cast<std::int64_t>(degree) + step, std::int64_t{0}, top));
      }
      const double value = cls.scale_degrees[degree];
      const double base = tonic_midi + value;
      const bool vibrato =
          cls.vibrato_depth > 0.0 &&
          std::any_of(cls.vibrato_degrees.begin(), cls.vibrato_degrees.end(),
                      [&](double d) { return std::abs(d - value) < 1e-9; });

      const int note_len =
          static_cast<int>(rng.uniform_int(cls.min_note_frames, cls.max_note_frames));
      int glide_len = 0;
      if (cls.glide) {
        glide_len = std::min(static_cast<int>(rng.uniform_int(15, 25)), note_len / 2);
      }
      for (int k = 0; k < note_len && static_cast<int>(contour.frames.size()) < total; ++k) {
        double midi;
        if (k < glide_len) {
          midi = prev_note_end +
                 (base - prev_note_end) * static_cast<double>(k + 1) /
                     static_cast<double>(glide_len + 1);
        } else {
          midi = base;
          if (vibrato) {
            midi += cls.vibrato_depth *
                    std::sin(2.0 * M_PI * cls.vibrato_rate_hz *
                             static_cast<double>(k - glide_len) / 100.0);
          }
        }
        if (spec.jitter_sigma > 0.0) midi += rng.normal(0.0, spec.jitter_sigma);
        const double conf =
            rng.uniform() < 0.05 ? rng.uniform(0.3, 0.75) : rng.uniform(0.85, 0.995);
        push_voiced(midi, conf);
      }
      prev_note_end = base;
    }
    const int gap_len =
        static_cast<int>(rng.uniform_int(cls.min_gap_frames, cls.max_gap_frames));
    for (int k = 0; k < gap_len && static_cast<int>(contour.frames.size()) < total; ++k) {
      push_gap(rng.uniform(0.0, 0.15));
    }
  }
  return contour;
}

}  // namespace

std::vector<SongRecord> generate_synthetic_corpus(const SyntheticSpec& spec, std::uint64_t seed,
                                                  const std::string& out_dir) {
  spec.validate();
  std::filesystem::create_directories(out_dir + "/contours");

  std::vector<SongRecord> records;
  int global = 0;
  for (const SynthClassSpec& cls : spec.classes) {
    for (int i = 0; i < spec.songs_per_class; ++i, ++global) {
      const std::string song_id = song_name(cls.name, i);
      Rng rng(derive_seed(seed, "synth-" + song_id));
      Contour contour = synthesize_song(cls, spec, song_id, rng);
      const std::string rel_path = "contours/" + song_id + ".csv";
      write_contour_file(contour, out_dir + "/" + rel_path);

      SongRecord rec;
      rec.song_id = song_id;
      rec.contour_path = rel_path;
      rec.title = "Synthetic " + cls.name + " melody " + std::to_string(i);
      rec.region = kRegionNames[static_cast<std::size_t>(global) % kRegionNames.size()];
      rec.singer = "voice-" + std::to_string(global % 4);
      rec.tori_label = cls.name;
      if (global % 7 == 0) {
        rec.audio_url = "https://example.org/audio/" + song_id + ".mp3";
      }
      records.push_back(std::move(rec));
    }
  }
  write_manifest(records, out_dir + "/manifest.jsonl");
  return records;
}

}  // namespace torivec

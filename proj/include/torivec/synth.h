#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "torivec/contour.h"

namespace torivec {

// One synthetic "style": a scale, an ornament idiom, a tempo band and a
// phrasing habit. The class name doubles as the emitted tori_label.
struct SynthClassSpec {
  std::string name;
  std::vector<double> scale_degrees;    // semitone offsets from the tonic
  double vibrato_depth = 0.0;           // semitones; 0 disables
  double vibrato_rate_hz = 0.0;
  std::vector<double> vibrato_degrees;  // degrees carrying the vibrato
  bool glide = false;                   // approach each note with a ramp
  int min_note_frames = 30;             // note lengths at the 100 Hz source rate
  int max_note_frames = 70;
  int min_phrase_notes = 3;             // notes sung between breaths
  int max_phrase_notes = 6;
  int min_gap_frames = 20;              // unvoiced rest between phrases
  int max_gap_frames = 50;
};

struct SyntheticSpec {
  std::vector<SynthClassSpec> classes;
  int songs_per_class = 20;
  double min_duration_sec = 25.0;
  double max_duration_sec = 45.0;
  double tonic_lo_hz = 130.0;
  double tonic_hi_hz = 262.0;
  double jitter_sigma = 0.03;  // per-frame pitch noise, semitones

  void validate() const;
};

// Class presets named after the tori labels; `classes` in [2,4].
SyntheticSpec default_synthetic_spec(int classes, int per_class);

// Writes <out_dir>/contours/<song_id>.csv (100 Hz, parseable by
// parse_contour_file) and <out_dir>/manifest.jsonl, and returns the records.
// Regions cycle through the nine names independently of class, so region is
// deliberately uninformative about the class label. Deterministic in seed.
std::vector<SongRecord> generate_synthetic_corpus(const SyntheticSpec& spec, std::uint64_t seed,
                                                  const std::string& out_dir);

}  // namespace torivec

#include "torivec/synth.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "test_util.h"
#include "torivec/contour.h"
#include "torivec/ioutil.h"

using namespace torivec;

namespace {

int count_files(const std::string& dir) {
  int n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    n += entry.is_regular_file();
  }
  return n;
}

}  // namespace

TEST_CASE("spec validation") {
  SyntheticSpec spec = default_synthetic_spec(3, 5);
  CHECK_NOTHROW(spec.validate());
  CHECK(spec.classes.size() == 3);

  SyntheticSpec bad = spec;
  bad.classes.resize(1);
  CHECK_THROWS(bad.validate());

  bad = spec;
  bad.songs_per_class = 0;
  CHECK_THROWS(bad.validate());

  bad = spec;
  bad.min_duration_sec = 50.0;  // above max
  CHECK_THROWS(bad.validate());

  bad = spec;
  bad.classes[1].vibrato_depth = 0.5;
  bad.classes[1].vibrato_rate_hz = 0.0;
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("menari"), std::invalid_argument);

  CHECK_THROWS(default_synthetic_spec(1, 5));
  CHECK_THROWS(default_synthetic_spec(5, 5));
}

TEST_CASE("presets share one scale and differ in ornament") {
  SyntheticSpec spec = default_synthetic_spec(4, 1);
  REQUIRE(spec.classes.size() == 4);
  CHECK(spec.classes[0].name == "gyung");
  CHECK(spec.classes[1].name == "menari");
  CHECK(spec.classes[2].name == "yukja");
  CHECK(spec.classes[3].name == "others");
  for (const auto& cls : spec.classes) {
    CHECK(cls.scale_degrees == std::vector<double>{0.0, 2.0, 4.0, 7.0, 9.0});
  }
  CHECK(spec.classes[0].vibrato_depth == 0.0);
  CHECK(spec.classes[1].vibrato_depth > 0.0);
  CHECK(spec.classes[2].glide);
}

TEST_CASE("corpus counting and metadata") {
  const std::string dir = testutil::make_temp_dir("synth_count");
  SyntheticSpec spec = default_synthetic_spec(3, 20);
  spec.min_duration_sec = 6.0;  // keep the fixture small
  spec.max_duration_sec = 8.0;
  std::vector<SongRecord> records = generate_synthetic_corpus(spec, 11, dir);

  REQUIRE(records.size() == 60);
  CHECK(count_files(dir + "/contours") == 60);
  const std::string manifest = read_text_file(dir + "/manifest.jsonl");
  CHECK(std::count(manifest.begin(), manifest.end(), '\n') == 60);

  // labels match the class blocks; ids are zero-padded
  CHECK(records[0].song_id == "gyung_000");
  CHECK(records[0].tori_label.value() == "gyung");
  CHECK(records[20].song_id == "menari_000");
  CHECK(records[59].tori_label.value() == "yukja");

  // regions cycle: 60 songs over 9 regions -> counts of 7 or 6, and the cycle
  // is independent of the class blocks
  std::map<std::string, int> region_counts;
  std::map<std::string, std::set<std::string>> regions_per_class;
  for (const auto& r : records) {
    ++region_counts[r.region];
    regions_per_class[*r.tori_label].insert(r.region);
  }
  REQUIRE(region_counts.size() == 9);
  for (const auto& [name, count] : region_counts) {
    CHECK(count >= 6);
    CHECK(count <= 7);
  }
  for (const auto& [cls, regions] : regions_per_class) {
    CHECK(regions.size() == 9);  // every class touches every region
  }

  // every seventh song carries an audio link
  int with_audio = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].audio_url.has_value()) {
      CHECK(i % 7 == 0);
      ++with_audio;
    }
  }
  CHECK(with_audio == 9);  // ceil(60/7)

  // loading the manifest back agrees with the returned records
  auto loaded = load_manifest(dir + "/manifest.jsonl");
  REQUIRE(loaded.size() == records.size());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    CHECK(loaded[i].song_id == records[i].song_id);
    CHECK(loaded[i].region == records[i].region);
    CHECK(loaded[i].tori_label == records[i].tori_label);
  }
}

TEST_CASE("same seed is byte-identical, different seed is not") {
  SyntheticSpec spec = default_synthetic_spec(2, 3);
  spec.min_duration_sec = 5.0;
  spec.max_duration_sec = 6.0;
  const std::string a = testutil::make_temp_dir("synth_det_a");
  const std::string b = testutil::make_temp_dir("synth_det_b");
  const std::string c = testutil::make_temp_dir("synth_det_c");
  auto ra = generate_synthetic_corpus(spec, 99, a);
  generate_synthetic_corpus(spec, 99, b);
  generate_synthetic_corpus(spec, 100, c);

  CHECK(crc32_file(a + "/manifest.jsonl") == crc32_file(b + "/manifest.jsonl"));
  bool any_diff = false;
  for (const auto& rec : ra) {
    CHECK(crc32_file(a + "/" + rec.contour_path) == crc32_file(b + "/" + rec.contour_path));
    any_diff |= crc32_file(a + "/" + rec.contour_path) != crc32_file(c + "/" + rec.contour_path);
  }
  CHECK(any_diff);
}

TEST_CASE("generated contours parse and respect the duration band") {
  const std::string dir = testutil::make_temp_dir("synth_parse");
  SyntheticSpec spec = default_synthetic_spec(2, 4);
  spec.min_duration_sec = 5.0;
  spec.max_duration_sec = 7.0;
  auto records = generate_synthetic_corpus(spec, 7, dir);
  for (const auto& rec : records) {
    Contour c = parse_contour_file(dir + "/" + rec.contour_path);
    CHECK_NOTHROW(c.validate());
    CHECK(c.source_rate_hz == doctest::Approx(100.0));
    const double dur = static_cast<double>(c.frames.size()) / 100.0;
    CHECK(dur >= 5.0);
    CHECK(dur <= 7.0);
    // phrase gaps exist and are unvoiced with low confidence
    bool saw_gap = false;
    for (const auto& f : c.frames) {
      if (!f.f0_hz.has_value()) {
        saw_gap = true;
        CHECK(f.confidence < 0.15);
      }
    }
    CHECK(saw_gap);
  }
}

TEST_CASE("vibrato frames follow the closed-form sinusoid") {
  // one scale degree, fixed note length, no jitter and no glide: every voiced
  // run is a chain of 40-frame notes, so the phase is fully reconstructable
  SynthClassSpec cls;
  cls.name = "vib";
  cls.scale_degrees = {7.0};
  cls.vibrato_depth = 0.5;
  cls.vibrato_rate_hz = 5.0;
  cls.vibrato_degrees = {7.0};
  cls.glide = false;
  cls.min_note_frames = 40;
  cls.max_note_frames = 40;
  SynthClassSpec flat = cls;
  flat.name = "flat";
  flat.vibrato_depth = 0.0;
  flat.vibrato_rate_hz = 0.0;
  flat.vibrato_degrees = {};

  SyntheticSpec spec;
  spec.classes = {cls, flat};
  spec.songs_per_class = 2;
  spec.min_duration_sec = 6.0;
  spec.max_duration_sec = 8.0;
  spec.jitter_sigma = 0.0;

  const std::string dir = testutil::make_temp_dir("synth_vibrato");
  auto records = generate_synthetic_corpus(spec, 31, dir);

  for (const auto& rec : records) {
    Contour c = parse_contour_file(dir + "/" + rec.contour_path);
    const bool vibrato = *rec.tori_label == "vib";

    // collect voiced runs
    std::vector<std::pair<std::size_t, std::size_t>> runs;  // [begin, end)
    std::size_t begin = 0;
    bool in_run = false;
    for (std::size_t i = 0; i <= c.frames.size(); ++i) {
      const bool voiced = i < c.frames.size() && c.frames[i].f0_hz.has_value();
      if (voiced && !in_run) {
        begin = i;
        in_run = true;
      } else if (!voiced && in_run) {
        runs.push_back({begin, i});
        in_run = false;
      }
    }
    REQUIRE_FALSE(runs.empty());

    // base pitch: frame 0 of any note has zero vibrato phase
    const double base = hz_to_semitone(*c.frames[runs[0].first].f0_hz);
    double lo = 1e9, hi = -1e9;
    for (const auto& [from, to] : runs) {
      for (std::size_t i = from; i < to; ++i) {
        const double midi = hz_to_semitone(*c.frames[i].f0_hz);
        const std::size_t k = (i - from) % 40;  // phase within the note
        const double want =
            vibrato
                ? base + 0.5 * std::sin(2.0 * M_PI * 5.0 * static_cast<double>(k) / 100.0)
                : base;
        CHECK(std::abs(midi - want) < 1e-9);
        lo = std::min(lo, midi);
        hi = std::max(hi, midi);
      }
    }
    if (vibrato) {
      // the envelope actually reaches +-depth
      CHECK(hi - base == doctest::Approx(0.5).epsilon(1e-9));
      CHECK(base - lo == doctest::Approx(0.5).epsilon(1e-9));
    } else {
      CHECK(hi - lo < 1e-9);
    }
  }
}

TEST_CASE("jitter perturbs pitches without breaking the envelope") {
  SynthClassSpec cls;
  cls.name = "a";
  cls.scale_degrees = {0.0};
  cls.min_note_frames = 30;
  cls.max_note_frames = 40;
  SynthClassSpec other = cls;
  other.name = "b";
  SyntheticSpec spec;
  spec.classes = {cls, other};
  spec.songs_per_class = 1;
  spec.min_duration_sec = 5.0;
  spec.max_duration_sec = 6.0;
  spec.jitter_sigma = 0.03;

  const std::string dir = testutil::make_temp_dir("synth_jitter");
  auto records = generate_synthetic_corpus(spec, 3, dir);
  Contour c = parse_contour_file(dir + "/" + records[0].contour_path);
  std::vector<double> voiced;
  for (const auto& f : c.frames) {
    if (f.f0_hz.has_value()) voiced.push_back(hz_to_semitone(*f.f0_hz));
  }
  REQUIRE(voiced.size() > 100);
  const double lo = *std::min_element(voiced.begin(), voiced.end());
  const double hi = *std::max_element(voiced.begin(), voiced.end());
  CHECK(hi - lo > 1e-6);       // jitter moved something
  CHECK(hi - lo < 0.03 * 12);  // but stays near the single degree
}

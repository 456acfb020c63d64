#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace torivec {

// Pitch values below this confidence are masked to zero in model input.
inline constexpr double kConfidenceMask = 0.8;

// Model-side frame rate; tracker output is decimated down to this.
inline constexpr double kSeriesRateHz = 20.0;

// The nine administrative regions carried by corpus metadata.
inline constexpr std::array<const char*, 9> kRegionNames = {
    "gyeonggi", "gangwon",   "chungbuk", "chungnam", "jeonbuk",
    "jeonnam",  "gyeongbuk", "gyeongnam", "jeju"};

inline constexpr const char* kUnknownRegion = "unknown";

inline constexpr std::array<const char*, 4> kToriLabels = {"gyung", "menari", "yukja",
                                                           "others"};

struct ContourFrame {
  double time_sec = 0.0;
  std::optional<double> f0_hz;  // absent on unvoiced / silent frames
  double confidence = 0.0;
};

// Raw pitch-tracker output for one song.
struct Contour {
  std::string song_id;
  std::vector<ContourFrame> frames;
  double source_rate_hz = 0.0;

  // Throws if times are not strictly increasing at the stated rate, a
  // confidence leaves [0,1], an f0 is non-positive, or there are no frames.
  void validate() const;
};

// Tonic-normalized, confidence-masked 20 Hz model input.
struct PitchSeries {
  std::string song_id;
  std::vector<double> pitch;       // semitone offset from tonic; 0 where masked
  std::vector<double> confidence;  // same length as pitch
  double tonic_midi = 0.0;
};

struct SongRecord {
  std::string song_id;
  std::string contour_path;
  std::string title;
  std::string region;
  std::optional<std::string> singer;
  std::optional<std::string> tori_label;
  std::optional<std::string> audio_url;
  bool excluded = false;
};

double hz_to_semitone(double f0_hz);   // MIDI pitch number, fractional
double semitone_to_hz(double midi);

// CSV with header `time_sec,f0_hz,confidence`; empty f0 field is a frame
// with absent pitch. song_id is the file stem.
Contour parse_contour_file(const std::string& path);
void write_contour_file(const Contour& contour, const std::string& path);

// Keeps every k-th frame, k = source_rate / target_rate (must divide evenly).
Contour decimate(const Contour& contour, double target_rate_hz = kSeriesRateHz);

// Requires a 20 Hz contour. Frames below the confidence threshold, or with
// absent f0, carry pitch 0; absent f0 forces confidence 0.
PitchSeries to_pitch_series(const Contour& contour, double tonic_midi);

// JSON-lines manifest. Duplicate song_id is an error; unknown regions map to
// "unknown" with a stderr warning; `excluded` defaults to false.
std::vector<SongRecord> load_manifest(const std::string& path);
void write_manifest(const std::vector<SongRecord>& records, const std::string& path);

bool is_known_region(const std::string& region);
bool is_tori_label(const std::string& label);

}  // namespace torivec

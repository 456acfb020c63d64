#include "torivec/contour.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "torivec/ioutil.h"

namespace torivec {

namespace {

constexpr double kSpacingTolSec = 1e-6;
constexpr const char* kContourHeader = "time_sec,f0_hz,confidence";

// Tracker-native rate assumed when a file has a single frame and spacing
// cannot be inferred.
constexpr double kDefaultSourceRate = 100.0;

[[noreturn]] void parse_fail(const std::string& path, std::size_t line_no,
                             const std::string& what) {
  throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": " + what);
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

double hz_to_semitone(double f0_hz) {
  if (!(f0_hz > 0.0)) {
    throw std::invalid_argument("hz_to_semitone: non-positive frequency " +
                                format_double(f0_hz));
  }
  return 69.0 + 12.0 * std::log2(f0_hz / 440.0);
}

double semitone_to_hz(double midi) { return 440.0 * std::exp2((midi - 69.0) / 12.0); }

void Contour::validate() const {
  if (frames.empty()) throw std::runtime_error("contour " + song_id + ": no frames");
  if (!(source_rate_hz > 0.0)) {
    throw std::runtime_error("contour " + song_id + ": non-positive source rate");
  }
  const double expected_dt = 1.0 / source_rate_hz;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const ContourFrame& f = frames[i];
    if (f.time_sec < 0.0) {
      throw std::runtime_error("contour " + song_id + ": negative time at frame " +
                               std::to_string(i));
    }
    if (f.confidence < 0.0 || f.confidence > 1.0) {
      throw std::runtime_error("contour " + song_id + ": confidence outside [0,1] at frame " +
                               std::to_string(i));
    }
    if (f.f0_hz && !(*f.f0_hz > 0.0)) {
      throw std::runtime_error("contour " + song_id + ": non-positive f0 at frame " +
                               std::to_string(i));
    }
    if (i > 0) {
      double dt = f.time_sec - frames[i - 1].time_sec;
      if (dt <= 0.0) {
        throw std::runtime_error("contour " + song_id + ": non-increasing time at frame " +
                                 std::to_string(i));
      }
      if (std::abs(dt - expected_dt) > kSpacingTolSec) {
        throw std::runtime_error("contour " + song_id + ": frame spacing " +
                                 format_double(dt) + " s inconsistent with rate " +
                                 format_double(source_rate_hz) + " Hz at frame " +
                                 std::to_string(i));
      }
    }
  }
}

Contour parse_contour_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open contour file: " + path);

  Contour contour;
  contour.song_id = path_stem(path);

  std::string raw;
  std::size_t line_no = 0;

  if (!std::getline(in, raw)) throw std::runtime_error(path + ": empty file");
  ++line_no;
  if (strip_cr(raw) != kContourHeader) {
    parse_fail(path, line_no, "expected header '" + std::string(kContourHeader) + "'");
  }

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = strip_cr(raw);
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 3) {
      parse_fail(path, line_no, "expected 3 fields, got " + std::to_string(fields.size()));
    }
    ContourFrame frame;
    if (!parse_double(fields[0], frame.time_sec)) {
      parse_fail(path, line_no, "malformed time_sec field");
    }
    if (!fields[1].empty()) {
      double f0;
      if (!parse_double(fields[1], f0)) parse_fail(path, line_no, "malformed f0_hz field");
      if (!(f0 > 0.0)) parse_fail(path, line_no, "non-positive f0_hz");
      frame.f0_hz = f0;
    }
    if (!parse_double(fields[2], frame.confidence)) {
      parse_fail(path, line_no, "malformed confidence field");
    }
    if (frame.confidence < 0.0 || frame.confidence > 1.0) {
      parse_fail(path, line_no, "confidence outside [0,1]");
    }
    if (!contour.frames.empty() && frame.time_sec <= contour.frames.back().time_sec) {
      parse_fail(path, line_no, "non-increasing time");
    }
    contour.frames.push_back(frame);
  }

  if (contour.frames.empty()) throw std::runtime_error(path + ": no data rows");

  if (contour.frames.size() == 1) {
    contour.source_rate_hz = kDefaultSourceRate;
  } else {
    double dt = contour.frames[1].time_sec - contour.frames[0].time_sec;
    double rate = 1.0 / dt;
    double snapped = std::round(rate);
    if (snapped > 0.0 && std::abs(rate - snapped) < 1e-3) rate = snapped;
    contour.source_rate_hz = rate;
  }

  contour.validate();
  return contour;
}

void write_contour_file(const Contour& contour, const std::string& path) {
  std::string out;
  out.reserve(contour.frames.size() * 24 + 32);
  out += kContourHeader;
  out += '\n';
  for (const ContourFrame& f : contour.frames) {
    out += format_double(f.time_sec);
    out += ',';
    if (f.f0_hz) out += format_double(*f.f0_hz);
    out += ',';
    out += format_double(f.confidence);
    out += '\n';
  }
  write_text_file(path, out);
}

Contour decimate(const Contour& contour, double target_rate_hz) {
  contour.validate();
  if (!(target_rate_hz > 0.0)) throw std::invalid_argument("decimate: non-positive target rate");
  double factor = contour.source_rate_hz / target_rate_hz;
  double snapped = std::round(factor);
  if (snapped < 1.0 || std::abs(factor - snapped) > 1e-9) {
    throw std::runtime_error("decimate: source rate " + format_double(contour.source_rate_hz) +
                             " Hz is not an integer multiple of target " +
                             format_double(target_rate_hz) + " Hz");
  }
  auto k = static_cast<std::size_t>(snapped);
  Contour out;
  out.song_id = contour.song_id;
  out.source_rate_hz = target_rate_hz;
  out.frames.reserve(contour.frames.size() / k + 1);
  for (std::size_t i = 0; i < contour.frames.size(); i += k) {
    out.frames.push_back(contour.frames[i]);
  }
  return out;
}

PitchSeries to_pitch_series(const Contour& contour, double tonic_midi) {
  if (std::abs(contour.source_rate_hz - kSeriesRateHz) > 1e-9) {
    throw std::runtime_error("to_pitch_series: contour " + contour.song_id + " is at " +
                             format_double(contour.source_rate_hz) + " Hz, expected " +
                             format_double(kSeriesRateHz) + " Hz");
  }
  PitchSeries series;
  series.song_id = contour.song_id;
  series.tonic_midi = tonic_midi;
  series.pitch.reserve(contour.frames.size());
  series.confidence.reserve(contour.frames.size());
  for (const ContourFrame& f : contour.frames) {
    double conf = f.f0_hz ? f.confidence : 0.0;
    double pitch = 0.0;
    if (f.f0_hz && conf >= kConfidenceMask) {
      pitch = hz_to_semitone(*f.f0_hz) - tonic_midi;
    }
    series.pitch.push_back(pitch);
    series.confidence.push_back(conf);
  }
  return series;
}

bool is_known_region(const std::string& region) {
  return std::find(kRegionNames.begin(), kRegionNames.end(), region) != kRegionNames.end();
}

bool is_tori_label(const std::string& label) {
  return std::find(kToriLabels.begin(), kToriLabels.end(), label) != kToriLabels.end();
}

namespace {

std::string require_string(const nlohmann::json& obj, const char* field,
                           const std::string& path, std::size_t line_no) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) {
    parse_fail(path, line_no, std::string("missing field '") + field + "'");
  }
  if (!it->is_string()) {
    parse_fail(path, line_no, std::string("field '") + field + "' must be a string");
  }
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const nlohmann::json& obj, const char* field,
                                           const std::string& path, std::size_t line_no) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    parse_fail(path, line_no, std::string("field '") + field + "' must be a string");
  }
  return it->get<std::string>();
}

}  // namespace

std::vector<SongRecord> load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);

  std::vector<SongRecord> records;
  std::set<std::string> seen_ids;
  std::string raw;
  std::size_t line_no = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = strip_cr(raw);
    if (line.empty()) continue;

    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      parse_fail(path, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) parse_fail(path, line_no, "expected a JSON object");

    SongRecord rec;
    rec.song_id = require_string(obj, "song_id", path, line_no);
    rec.contour_path = require_string(obj, "contour_path", path, line_no);
    rec.title = require_string(obj, "title", path, line_no);
    rec.region = require_string(obj, "region", path, line_no);
    rec.singer = optional_string(obj, "singer", path, line_no);
    rec.tori_label = optional_string(obj, "tori_label", path, line_no);
    rec.audio_url = optional_string(obj, "audio_url", path, line_no);
    if (auto it = obj.find("excluded"); it != obj.end() && !it->is_null()) {
      if (!it->is_boolean()) parse_fail(path, line_no, "field 'excluded' must be a boolean");
      rec.excluded = it->get<bool>();
    }

    if (!seen_ids.insert(rec.song_id).second) {
      parse_fail(path, line_no, "duplicate song_id '" + rec.song_id + "'");
    }
    if (!is_known_region(rec.region) && rec.region != kUnknownRegion) {
      std::cerr << path << ": line " << line_no << ": unknown region '" << rec.region
                << "' for song " << rec.song_id << ", mapped to '" << kUnknownRegion << "'\n";
      rec.region = kUnknownRegion;
    }
    if (rec.tori_label && !is_tori_label(*rec.tori_label)) {
      parse_fail(path, line_no, "unknown tori_label '" + *rec.tori_label + "'");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_manifest(const std::vector<SongRecord>& records, const std::string& path) {
  std::string out;
  for (const SongRecord& rec : records) {
    nlohmann::ordered_json obj;
    obj["song_id"] = rec.song_id;
    obj["contour_path"] = rec.contour_path;
    obj["title"] = rec.title;
    obj["region"] = rec.region;
    if (rec.singer) obj["singer"] = *rec.singer;
    if (rec.tori_label) obj["tori_label"] = *rec.tori_label;
    if (rec.audio_url) obj["audio_url"] = *rec.audio_url;
    obj["excluded"] = rec.excluded;
    out += obj.dump();
    out += '\n';
  }
  write_text_file(path, out);
}

}  // namespace torivec

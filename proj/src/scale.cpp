#include "torivec/scale.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "torivec/ioutil.h"

namespace torivec {

namespace {

// Unmasked pitches in cents (100 * MIDI).
std::vector<double> unmasked_cents(const Contour& contour) {
  std::vector<double> cents;
  cents.reserve(contour.frames.size());
  for (const ContourFrame& f : contour.frames) {
    if (f.f0_hz && f.confidence >= kConfidenceMask) {
      cents.push_back(100.0 * hz_to_semitone(*f.f0_hz));
    }
  }
  return cents;
}

}  // namespace

TonicEstimate estimate_tonic(const Contour& contour) {
  std::vector<double> cents = unmasked_cents(contour);
  if (cents.empty()) {
    throw std::runtime_error("estimate_tonic: contour " + contour.song_id +
                             " has no unmasked frames");
  }
  std::sort(cents.begin(), cents.end());

  long best_count = 0;
  int best_offset = 0;
  double best_center = 0.0;
  bool have_best = false;

  for (int offset = 0; offset < 100; offset += 10) {
    // cents are sorted, so equal bin indices form contiguous runs.
    std::size_t i = 0;
    while (i < cents.size()) {
      double bin = std::floor((cents[i] - offset) / 100.0);
      std::size_t j = i;
      while (j < cents.size() && std::floor((cents[j] - offset) / 100.0) == bin) ++j;
      long count = static_cast<long>(j - i);
      double center = bin * 100.0 + offset + 50.0;
      if (!have_best || count > best_count ||
          (count == best_count && (offset < best_offset ||
                                   (offset == best_offset && center < best_center)))) {
        have_best = true;
        best_count = count;
        best_offset = offset;
        best_center = center;
      }
      i = j;
    }
  }

  TonicEstimate est;
  est.tonic_midi = best_center / 100.0;
  est.offset_cents = best_offset;
  est.peak_count = best_count;
  return est;
}

ToneHistogram build_histogram(const Contour& contour, const TonicEstimate& tonic,
                              int bin_count) {
  if (bin_count < 2) throw std::invalid_argument("build_histogram: bin_count must be >= 2");

  ToneHistogram hist;
  hist.bin_count = bin_count;
  hist.bins.assign(static_cast<std::size_t>(bin_count), 0.0);
  const double width = (ToneHistogram::kRangeHiCents - ToneHistogram::kRangeLoCents) /
                       bin_count;

  for (const ContourFrame& f : contour.frames) {
    if (!f.f0_hz || f.confidence < kConfidenceMask) continue;
    double offset = 100.0 * (hz_to_semitone(*f.f0_hz) - tonic.tonic_midi);
    if (offset < ToneHistogram::kRangeLoCents || offset >= ToneHistogram::kRangeHiCents) {
      continue;  // out-of-range frames are discarded, not clipped
    }
    int idx = static_cast<int>(std::floor((offset - ToneHistogram::kRangeLoCents) / width));
    idx = std::clamp(idx, 0, bin_count - 1);
    hist.bins[static_cast<std::size_t>(idx)] += 1.0;
    ++hist.counted_frames;
  }

  if (hist.counted_frames == 0) {
    throw std::runtime_error("build_histogram: contour " + contour.song_id +
                             " has no frames inside the two-octave range");
  }
  for (double& b : hist.bins) b /= static_cast<double>(hist.counted_frames);
  return hist;
}

void write_histogram_csv(const std::vector<std::pair<std::string, ToneHistogram>>& rows,
                         const std::string& path) {
  if (rows.empty()) throw std::invalid_argument("write_histogram_csv: no rows");
  const int bins = rows.front().second.bin_count;
  std::string out = "song_id";
  for (int b = 0; b < bins; ++b) out += ",b" + std::to_string(b);
  out += '\n';
  for (const auto& [song_id, hist] : rows) {
    if (hist.bin_count != bins) {
      throw std::invalid_argument("write_histogram_csv: mixed bin counts");
    }
    out += song_id;
    for (double v : hist.bins) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  write_text_file(path, out);
}

void write_tonic_csv(const std::vector<std::pair<std::string, TonicEstimate>>& rows,
                     const std::string& path) {
  std::string out = "song_id,tonic_midi,offset_cents,peak_count\n";
  for (const auto& [song_id, est] : rows) {
    out += song_id;
    out += ',';
    out += format_double(est.tonic_midi);
    out += ',';
    out += std::to_string(est.offset_cents);
    out += ',';
    out += std::to_string(est.peak_count);
    out += '\n';
  }
  write_text_file(path, out);
}

std::vector<std::pair<std::string, TonicEstimate>> read_tonic_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open tonic table: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("song_id,tonic_midi", 0) != 0) {
    throw std::runtime_error(path + ": not a tonic table (bad header)");
  }
  std::vector<std::pair<std::string, TonicEstimate>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 4) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": expected 4 fields");
    }
    TonicEstimate est;
    double offset = 0.0, peak = 0.0;
    if (!parse_double(fields[1], est.tonic_midi) || !parse_double(fields[2], offset) ||
        !parse_double(fields[3], peak)) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": malformed row");
    }
    est.offset_cents = static_cast<int>(offset);
    est.peak_count = static_cast<long>(peak);
    rows.emplace_back(std::string(fields[0]), est);
  }
  return rows;
}

}  // namespace torivec

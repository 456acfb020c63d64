#pragma once

#include <string>
#include <utility>
#include <vector>

#include "torivec/contour.h"

namespace torivec {

// Normalized pitch-class-offset distribution over [-1200, +1200) cents
// around the tonic.
struct ToneHistogram {
  std::vector<double> bins;
  int bin_count = 0;
  long counted_frames = 0;

  static constexpr double kRangeLoCents = -1200.0;
  static constexpr double kRangeHiCents = 1200.0;
};

struct TonicEstimate {
  double tonic_midi = 0.0;
  int offset_cents = 0;  // winning grid shift, in {0, 10, ..., 90}
  long peak_count = 0;
};

// Sweeps 100-cent bins over grid shifts of 0..90 cents and picks the
// (shift, bin) with the highest unmasked-frame count. Ties go to the smaller
// shift, then the lower bin center. The tonic is the winning bin's center.
TonicEstimate estimate_tonic(const Contour& contour);

// Counts unmasked frames by cent offset from the tonic into bin_count uniform
// bins across two octaves; offsets outside the range are discarded; bins are
// normalized to sum to 1.
ToneHistogram build_histogram(const Contour& contour, const TonicEstimate& tonic,
                              int bin_count);

// CSV export: header `song_id,b0,...,b{n-1}`, one row per song.
void write_histogram_csv(const std::vector<std::pair<std::string, ToneHistogram>>& rows,
                         const std::string& path);

// CSV export: header `song_id,tonic_midi,offset_cents,peak_count`.
void write_tonic_csv(const std::vector<std::pair<std::string, TonicEstimate>>& rows,
                     const std::string& path);
std::vector<std::pair<std::string, TonicEstimate>> read_tonic_csv(const std::string& path);

}  // namespace torivec

#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "ganterp/audio.hpp"

namespace ganterp {

// Mean absolute difference between consecutive spectrogram slices. values[i]
// measures the change from slice i to slice i + 1, so a spectrogram with T
// slices yields T - 1 values.
struct TvSeries {
  std::vector<double> values;
  bool normalized = false;

  // Number of spectrogram slices the series was derived from.
  std::size_t num_slices() const noexcept { return values.size() + 1; }

  friend bool operator==(const TvSeries&, const TvSeries&) = default;
};

struct InflectionParams {
  std::size_t rolling_length = 30;
  double delta = 0.1;

  friend bool operator==(const InflectionParams&, const InflectionParams&) = default;
};

// Slice indices where interpolation segments begin and end. Always starts at
// 0 and ends at T - 1; strictly increasing.
struct InflectionSet {
  std::vector<std::size_t> indices;
  InflectionParams params;

  std::size_t num_segments() const noexcept { return indices.empty() ? 0 : indices.size() - 1; }

  friend bool operator==(const InflectionSet&, const InflectionSet&) = default;
};

enum class AlphaMode {
  // Cumulative TV normalized by the segment's total TV; reaches 1 at each
  // segment end.
  kCumulative,
  // Cumulative TV divided by the segment length in slices. Does not in
  // general reach 1 at segment ends; kept for compatibility with the
  // original reference procedure.
  kLegacyLength,
};

struct AlphaTrack {
  std::vector<double> alphas;  // one per slice, index 0..T-1
  InflectionSet segment_bounds;
  AlphaMode mode = AlphaMode::kCumulative;

  friend bool operator==(const AlphaTrack&, const AlphaTrack&) = default;
};

TvSeries compute_tv_series(const Spectrogram& spec, bool normalize);

InflectionSet detect_inflection_points(const TvSeries& tv, InflectionParams params);

// Alphas within a segment advance in proportion to the spectral change
// accumulated since the segment start. Cumulative-mode values are rounded to
// a 2^-24 grid so the track is independent of the overall TV scale.
AlphaTrack compute_alpha_track(const TvSeries& tv, const InflectionSet& inflections,
                               AlphaMode mode = AlphaMode::kCumulative);

// Validity checks shared by producers and consumers. Throw Error(kInvalidArgument).
void validate(const InflectionSet& inflections, std::size_t num_slices);

// Tab-separated per-slice table: index, tv, is_inflection, alpha. The tv
// column is "-" for the final slice, which has no successor.
void write_analysis_table(std::ostream& out, const TvSeries& tv, const InflectionSet& inflections,
                          const AlphaTrack& alphas);

}  // namespace ganterp

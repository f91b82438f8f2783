#include "ganterp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <string>

#include "ganterp/error.hpp"

namespace ganterp {
namespace {

// Resolution of cumulative-mode alphas. Coarse enough that ulp-level
// differences from rescaling the TV series never change the rounded value,
// fine enough to be invisible after 8-bit rendering.
constexpr int kAlphaFractionBits = 24;

int sign(double v) { return (v > 0.0) - (v < 0.0); }

double window_mean(const std::vector<double>& v, std::size_t first, std::size_t count) {
  double sum = 0.0;
  for (std::size_t i = first; i < first + count; ++i) sum += v[i];
  return sum / static_cast<double>(count);
}

void check_values(const TvSeries& tv) {
  if (tv.values.empty()) throw Error(ErrorCode::kInvalidArgument, "TV series is empty");
  for (double v : tv.values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, "TV values must be finite and non-negative");
    }
  }
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

TvSeries compute_tv_series(const Spectrogram& spec, bool normalize) {
  const std::size_t slices = spec.num_slices();
  const std::size_t freqs = spec.num_freqs();
  if (slices < 2 || freqs == 0) {
    throw Error(ErrorCode::kInvalidArgument, "spectrogram needs at least 2 slices and 1 frequency bin");
  }

  TvSeries tv;
  tv.values.resize(slices - 1);
  for (std::size_t t = 0; t + 1 < slices; ++t) {
    auto cur = spec.slice(t);
    auto next = spec.slice(t + 1);
    double sum = 0.0;
    for (std::size_t f = 0; f < freqs; ++f) sum += std::abs(cur[f] - next[f]);
    tv.values[t] = sum / static_cast<double>(freqs);
  }

  if (normalize) {
    tv.normalized = true;
    const double peak = *std::max_element(tv.values.begin(), tv.values.end());
    if (peak > 0.0) {
      for (double& v : tv.values) v /= peak;
    }
  }
  return tv;
}

InflectionSet detect_inflection_points(const TvSeries& tv, InflectionParams params) {
  if (params.rolling_length < 1) throw Error(ErrorCode::kInvalidArgument, "rolling length must be >= 1");
  if (!(params.delta >= 0.0) || !std::isfinite(params.delta)) {
    throw Error(ErrorCode::kInvalidArgument, "delta must be a finite non-negative number");
  }
  check_values(tv);

  const auto& v = tv.values;
  const std::size_t len = params.rolling_length;
  const std::size_t last_slice = v.size();  // T - 1

  InflectionSet out;
  out.params = params;
  out.indices.push_back(0);
  // Both windows must fit: t - len >= 0 and t + len <= last tv index.
  for (std::size_t t = len; t + len < v.size(); ++t) {
    const double prev_dev = v[t] - window_mean(v, t - len, len);
    const double next_dev = v[t] - window_mean(v, t + 1, len);
    const int s = sign(prev_dev);
    if (s != 0 && s == sign(next_dev) && std::abs(prev_dev) > params.delta &&
        std::abs(next_dev) > params.delta) {
      out.indices.push_back(t);
    }
  }
  out.indices.push_back(last_slice);
  return out;
}

void validate(const InflectionSet& inflections, std::size_t num_slices) {
  const auto& idx = inflections.indices;
  if (idx.size() < 2) throw Error(ErrorCode::kInvalidArgument, "inflection set needs at least 2 entries");
  if (idx.front() != 0) throw Error(ErrorCode::kInvalidArgument, "first inflection index must be 0");
  if (idx.back() + 1 != num_slices) {
    throw Error(ErrorCode::kInvalidArgument, "last inflection index must be T - 1 = " +
                                                 std::to_string(num_slices - 1));
  }
  if (!std::is_sorted(idx.begin(), idx.end(), std::less_equal<>())) {
    throw Error(ErrorCode::kInvalidArgument, "inflection indices must be strictly increasing");
  }
}

AlphaTrack compute_alpha_track(const TvSeries& tv, const InflectionSet& inflections, AlphaMode mode) {
  check_values(tv);
  const std::size_t slices = tv.num_slices();
  validate(inflections, slices);

  AlphaTrack track;
  track.segment_bounds = inflections;
  track.mode = mode;
  track.alphas.assign(slices, 0.0);

  const auto& idx = inflections.indices;
  for (std::size_t seg = 1; seg < idx.size(); ++seg) {
    const std::size_t begin = idx[seg - 1];
    const std::size_t end = idx[seg];
    const double length = static_cast<double>(end - begin);

    double total = 0.0;
    for (std::size_t j = begin; j < end; ++j) total += tv.values[j];

    double running = 0.0;
    for (std::size_t t = begin + 1; t <= end; ++t) {
      running += tv.values[t - 1];
      double alpha;
      if (mode == AlphaMode::kLegacyLength) {
        alpha = std::clamp(running / length, 0.0, 1.0);
      } else if (total > 0.0) {
        alpha = std::ldexp(std::round(std::ldexp(running / total, kAlphaFractionBits)), -kAlphaFractionBits);
      } else {
        alpha = static_cast<double>(t - begin) / length;
      }
      track.alphas[t] = alpha;
    }
  }
  return track;
}

void write_analysis_table(std::ostream& out, const TvSeries& tv, const InflectionSet& inflections,
                          const AlphaTrack& alphas) {
  const std::size_t slices = tv.num_slices();
  out << "# index\ttv\tis_inflection\talpha\n";
  auto next_inflection = inflections.indices.begin();
  for (std::size_t t = 0; t < slices; ++t) {
    while (next_inflection != inflections.indices.end() && *next_inflection < t) ++next_inflection;
    const bool is_inflection = next_inflection != inflections.indices.end() && *next_inflection == t;
    out << t << '\t' << (t + 1 < slices ? format_real(tv.values[t]) : std::string("-")) << '\t'
        << (is_inflection ? 1 : 0) << '\t' << format_real(alphas.alphas.at(t)) << '\n';
  }
}

}  // namespace ganterp

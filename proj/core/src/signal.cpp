#include "emgfit/signal.hpp"

#include <algorithm>
#include <cmath>

#include "emgfit/error.hpp"

namespace emgfit {

const char* to_string(Experience e) {
  switch (e) {
    case Experience::novice: return "novice";
    case Experience::intermediate: return "intermediate";
    case Experience::trained: return "trained";
  }
  return "novice";
}

const char* to_string(Activity a) {
  return a == Activity::isotonic ? "isotonic" : "isometric";
}

const char* to_string(Muscle m) { return m == Muscle::bb ? "BB" : "FCU"; }

Experience parse_experience(const std::string& s) {
  if (s == "novice") return Experience::novice;
  if (s == "intermediate") return Experience::intermediate;
  if (s == "trained") return Experience::trained;
  throw DataError("unknown experience level: '" + s + "'");
}

Activity parse_activity(const std::string& s) {
  if (s == "isotonic") return Activity::isotonic;
  if (s == "isometric") return Activity::isometric;
  throw DataError("unknown activity: '" + s + "'");
}

Muscle parse_muscle(const std::string& s) {
  if (s == "BB" || s == "bb") return Muscle::bb;
  if (s == "FCU" || s == "fcu") return Muscle::fcu;
  throw DataError("unknown muscle: '" + s + "'");
}

std::vector<double> moving_rms(std::span<const double> samples, std::size_t window) {
  if (window == 0 || samples.size() < window) return {};
  std::vector<double> prefix(samples.size() + 1, 0.0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    prefix[i + 1] = prefix[i] + samples[i] * samples[i];
  }
  std::vector<double> rms(samples.size() - window + 1);
  const double inv_w = 1.0 / static_cast<double>(window);
  for (std::size_t j = 0; j < rms.size(); ++j) {
    rms[j] = std::sqrt(std::max(0.0, (prefix[j + window] - prefix[j]) * inv_w));
  }
  return rms;
}

namespace {

Segment manual_segment(const SampleSeries& series, const SegmentationConfig& cfg) {
  if (cfg.manual_start_s.has_value() != cfg.manual_end_s.has_value()) {
    throw ConfigError("manual segmentation needs both manual_start_s and manual_end_s");
  }
  const double start_s = *cfg.manual_start_s;
  const double end_s = *cfg.manual_end_s;
  if (!(start_s >= 0.0) || !(end_s > start_s)) {
    throw ConfigError("manual segment bounds must satisfy 0 <= start < end");
  }
  const auto start = static_cast<std::size_t>(std::llround(start_s * series.rate));
  auto end = static_cast<std::size_t>(std::llround(end_s * series.rate));
  end = std::min(end, series.samples.size());
  if (start >= end) {
    throw ConfigError("manual segment lies outside the recording");
  }
  return {start, end};
}

}  // namespace

Segment segment_action(const SampleSeries& series, const SegmentationConfig& cfg) {
  if (!(series.rate > 0.0)) throw DataError("segment_action: rate must be positive");
  if (cfg.manual_start_s || cfg.manual_end_s) return manual_segment(series, cfg);

  const auto window = static_cast<std::size_t>(
      std::max(1.0, std::round(cfg.window_ms / 1000.0 * series.rate)));
  const std::size_t n = series.samples.size();
  if (n < 2 * window) {
    throw DataError("segment_action: series shorter than two detector windows");
  }

  const auto rms = moving_rms(series.samples, window);

  auto baseline_n = static_cast<std::size_t>(std::llround(cfg.baseline_s * series.rate));
  baseline_n = std::clamp<std::size_t>(baseline_n, 1, n);
  double acc = 0.0;
  for (std::size_t i = 0; i < baseline_n; ++i) {
    acc += series.samples[i] * series.samples[i];
  }
  const double baseline = std::sqrt(acc / static_cast<double>(baseline_n));

  const double rms_max = *std::max_element(rms.begin(), rms.end());
  if (rms_max == 0.0) throw DataError("segment_action: no activity in signal");
  if (baseline == 0.0) {
    throw DataError("segment_action: degenerate signal (zero baseline RMS)");
  }

  const double on = cfg.on_factor * baseline;
  const double off = cfg.off_factor * baseline;

  // Maximal runs of windows above `off` that contain at least one window
  // above `on`; the hysteresis extension falls out of the run structure.
  std::size_t best_start = 0, best_len = 0;
  std::size_t run_start = 0;
  bool in_run = false, run_has_on = false;
  for (std::size_t j = 0; j <= rms.size(); ++j) {
    const bool above_off = j < rms.size() && rms[j] >= off;
    if (above_off) {
      if (!in_run) {
        in_run = true;
        run_start = j;
        run_has_on = false;
      }
      if (rms[j] >= on) run_has_on = true;
    } else if (in_run) {
      in_run = false;
      const std::size_t len = j - run_start;
      if (run_has_on && len > best_len) {
        best_len = len;
        best_start = run_start;
      }
    }
  }
  if (best_len == 0) {
    throw DataError("segment_action: no region exceeds the on threshold");
  }
  return {best_start, std::min(best_start + best_len - 1 + window, n)};
}

SampleSeries extract_segment(const SampleSeries& series, const Segment& seg) {
  if (seg.start_index >= seg.end_index || seg.end_index > series.samples.size()) {
    throw DataError("extract_segment: segment indices out of range");
  }
  SampleSeries out;
  out.rate = series.rate;
  out.channel = series.channel;
  out.samples.assign(series.samples.begin() + static_cast<std::ptrdiff_t>(seg.start_index),
                     series.samples.begin() + static_cast<std::ptrdiff_t>(seg.end_index));
  return out;
}

}  // namespace emgfit

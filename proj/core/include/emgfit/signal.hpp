#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace emgfit {

enum class Experience { novice, intermediate, trained };
enum class Activity { isotonic, isometric };
enum class Muscle { bb, fcu };

const char* to_string(Experience e);
const char* to_string(Activity a);
const char* to_string(Muscle m);
Experience parse_experience(const std::string& s);
Activity parse_activity(const std::string& s);
Muscle parse_muscle(const std::string& s);

/// A single-channel amplitude record in millivolts.
struct SampleSeries {
  std::vector<double> samples;
  double rate = 0.0;  // Hz
  std::string channel;

  double duration_seconds() const {
    return rate > 0.0 ? static_cast<double>(samples.size()) / rate : 0.0;
  }
};

struct TrialMetadata {
  int subject_id = 0;
  Experience experience = Experience::novice;
  double weight_kg = 0.0;
  Activity activity = Activity::isotonic;
  Muscle muscle = Muscle::bb;
  int trial_index = 1;
};

/// Half-open sample index range [start_index, end_index).
struct Segment {
  std::size_t start_index = 0;
  std::size_t end_index = 0;

  std::size_t length() const { return end_index - start_index; }
};

/// Double-threshold moving-RMS detector settings. Thresholds are multiples
/// of the baseline RMS taken over the first `baseline_s` seconds. Setting
/// both manual bounds bypasses the detector entirely.
struct SegmentationConfig {
  double window_ms = 100.0;
  double on_factor = 3.0;
  double off_factor = 1.5;
  double baseline_s = 2.0;
  std::optional<double> manual_start_s;
  std::optional<double> manual_end_s;
};

/// Locates the action segment: the longest contiguous region whose moving
/// RMS exceeds on_factor * baseline, extended while it stays above
/// off_factor * baseline.
Segment segment_action(const SampleSeries& series, const SegmentationConfig& cfg = {});

/// Slices [seg.start_index, seg.end_index) preserving rate and channel.
SampleSeries extract_segment(const SampleSeries& series, const Segment& seg);

/// Moving RMS over trailing windows of `window` samples; result has
/// size() - window + 1 entries.
std::vector<double> moving_rms(std::span<const double> samples, std::size_t window);

}  // namespace emgfit

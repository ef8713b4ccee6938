#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "emgfit/signal.hpp"

namespace emgfit {

enum class TrialFormat { csv };

/// A parsed trial file: samples plus metadata, with any metadata fields that
/// had to be defaulted flagged through `warnings`.
struct LoadedRecording {
  SampleSeries series;
  TrialMetadata meta;
  bool metadata_defaulted = false;
  std::vector<std::string> warnings;
  std::map<std::string, std::string> extras;  // leading '# key=value' comments
};

/// Reads the trial CSV format: optional '#' comment lines, one header line of
/// comma-separated key=value pairs (rate is mandatory), then one amplitude
/// per line.
LoadedRecording load_recording(const std::filesystem::path& path,
                               TrialFormat format = TrialFormat::csv);

/// Writes the same format; `extras` become leading comment lines.
void write_recording(const std::filesystem::path& path, const SampleSeries& series,
                     const TrialMetadata& meta,
                     const std::map<std::string, std::string>& extras = {});

}  // namespace emgfit

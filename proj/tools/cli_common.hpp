#pragma once

#include <exception>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "emgfit/histogram.hpp"
#include "emgfit/models.hpp"
#include "emgfit/signal.hpp"
#include "emgfit/trial_io.hpp"

#include "commands.hpp"

namespace emgfit::cli {

struct Manifest {
  std::string command;
  std::uint64_t seed = 0;
  nlohmann::json config;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;  // paths relative to the manifest directory
  std::vector<std::string> warnings;
};

void write_manifest(const Manifest& manifest, const std::filesystem::path& dir);
Manifest read_manifest(const std::filesystem::path& path);

/// Runs fn(0..n-1) on a small worker pool; results must be written into
/// index-addressed slots by the caller. Collected exceptions are returned in
/// index order (nullptr for clean runs).
std::vector<std::exception_ptr> parallel_for(std::size_t n, int jobs,
                                             const std::function<void(std::size_t)>& fn);

SegmentationConfig to_segmentation_config(const SegmentationOptions& o);

/// One trial through load -> segment -> extract -> fit-per-family.
struct TrialFits {
  std::string input;  // as given on the command line
  TrialMetadata meta;
  Segment segment;
  double rate = 0.0;
  std::vector<double> action;  // extracted action samples
  std::vector<std::pair<ModelFamily, FitResult>> fits;
};

TrialFits fit_one_trial(const std::filesystem::path& input, const SegmentationOptions& seg,
                        const FitSettings& settings, std::uint64_t trial_seed);

EmConfig make_em_config(const FitSettings& settings, std::uint64_t trial_seed);

nlohmann::json trial_fit_json(const TrialFits& trial, const FitResult& fit,
                              const FitSettings& settings);

void ensure_out_dir(const std::filesystem::path& dir);

}  // namespace emgfit::cli

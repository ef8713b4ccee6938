#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace emgfit::cli {

struct SegmentationOptions {
  double window_ms = 100.0;
  double on_factor = 3.0;
  double off_factor = 1.5;
  double baseline_s = 2.0;
  std::optional<double> manual_start_s;
  std::optional<double> manual_end_s;
};
void to_json(nlohmann::json& j, const SegmentationOptions& o);
void from_json(const nlohmann::json& j, SegmentationOptions& o);

struct FitSettings {
  std::vector<std::string> families = {"lgm", "sg", "sl", "sm"};
  bool zero_mean = false;
  std::uint64_t seed = 1;
  double tol = 1e-8;
  int max_iter = 500;
  int restarts = 3;
  int jobs = 0;  // 0 = hardware concurrency
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(FitSettings, families, zero_mean, seed, tol,
                                                max_iter, restarts, jobs)

struct SynthOptions {
  std::string out_dir;
  int n_trials = 1;
  std::uint64_t seed = 1;
  double rest_s = 10.0;
  double action_s = 5.0;
  double release_s = 3.0;
  double rest_sigma = 0.05;
  double rate = 2000.0;
  std::string model = "lgm";  // action-phase model: lgm | sm
  double lambda1 = 0.7;
  double mu1 = 0.0;
  double sigma1 = 0.25;
  double mu2 = 0.0;
  double sigma2 = 0.75;
  double sm_mu = 0.0;
  double sm_scale = 0.3;
  double sm_nu = 4.0;
  int subject = 1;
  std::string experience = "novice";
  double weight_kg = 0.0;
  std::string activity = "isotonic";
  std::string muscle = "BB";
  int trial_start = 1;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SynthOptions, n_trials, seed, rest_s, action_s,
                                                release_s, rest_sigma, rate, model, lambda1, mu1,
                                                sigma1, mu2, sigma2, sm_mu, sm_scale, sm_nu,
                                                subject, experience, weight_kg, activity, muscle,
                                                trial_start)

struct FitOptions {
  std::vector<std::string> inputs;
  std::string out_dir;
  std::string table;  // defaults to <out_dir>/params.csv
  FitSettings fit;
  SegmentationOptions seg;
};
void to_json(nlohmann::json& j, const FitOptions& o);
void from_json(const nlohmann::json& j, FitOptions& o);

struct CompareOptions {
  std::vector<std::string> inputs;
  std::string out_dir;
  int bins = 100;
  FitSettings fit;
  SegmentationOptions seg;
};
void to_json(nlohmann::json& j, const CompareOptions& o);
void from_json(const nlohmann::json& j, CompareOptions& o);

struct AnalyzeOptions {
  std::string table;
  std::string out_dir;
  double alpha = 0.05;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(AnalyzeOptions, table, alpha)

struct ReproOptions {
  std::string out_dir;
  std::uint64_t seed = 1;
  std::vector<double> weights = {0.0, 2.5, 5.0, 10.0};
  int trials = 2;
  double action_s = 2.5;
  int bins = 100;
  int restarts = 3;
  int jobs = 0;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ReproOptions, seed, weights, trials, action_s,
                                                bins, restarts, jobs)

// Each command returns its exit code (0 = success, partial failures warn).
int run_synth(const SynthOptions& options);
int run_fit(const FitOptions& options);
int run_compare(const CompareOptions& options);
int run_analyze(const AnalyzeOptions& options);
int run_repro(const ReproOptions& options);
int run_rerun(const std::string& manifest_path, const std::string& out_dir_override);

}  // namespace emgfit::cli

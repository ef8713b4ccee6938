#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "emgfit/error.hpp"
#include "emgfit/signal.hpp"
#include "emgfit/synth.hpp"
#include "emgfit/trial_io.hpp"
#include "test_util.hpp"

using namespace emgfit;

namespace {

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("load_recording parses a minimal trial file") {
  const auto path = temp_file("emgfit_minimal.csv");
  write_text(path,
             "rate=2000,channel=BB,subject=3,experience=trained,weight_kg=2.5,"
             "activity=isometric,muscle=BB,trial=4\n"
             "0.1\n-0.2\n0.3\n-0.4\n");
  const auto rec = load_recording(path);
  CHECK(rec.series.samples.size() == 4);
  CHECK(rec.series.rate == 2000.0);
  CHECK(rec.series.duration_seconds() == doctest::Approx(0.002));
  CHECK(rec.meta.subject_id == 3);
  CHECK(rec.meta.experience == Experience::trained);
  CHECK(rec.meta.weight_kg == 2.5);
  CHECK(rec.meta.activity == Activity::isometric);
  CHECK(rec.meta.muscle == Muscle::bb);
  CHECK(rec.meta.trial_index == 4);
  CHECK_FALSE(rec.metadata_defaulted);
  std::filesystem::remove(path);
}

TEST_CASE("load_recording error paths") {
  const auto path = temp_file("emgfit_bad.csv");

  write_text(path, "rate=2000\n0.1\nNaN\n0.3\n");
  CHECK_THROWS_WITH_AS(load_recording(path), doctest::Contains("line 3"), DataError);

  write_text(path, "rate=2000\n0.1\nnot_a_number\n");
  CHECK_THROWS_WITH_AS(load_recording(path), doctest::Contains("line 3"), DataError);

  write_text(path, "channel=BB\n0.1\n0.2\n");
  CHECK_THROWS_WITH_AS(load_recording(path), doctest::Contains("rate"), DataError);

  write_text(path, "rate=-100\n0.1\n");
  CHECK_THROWS_AS(load_recording(path), DataError);

  write_text(path, "rate=2000,weight_kg=-3\n0.1\n");
  CHECK_THROWS_AS(load_recording(path), DataError);

  CHECK_THROWS_AS(load_recording(temp_file("emgfit_does_not_exist.csv")), DataError);
  std::filesystem::remove(path);
}

TEST_CASE("missing metadata keys default with a warning flag") {
  const auto path = temp_file("emgfit_defaults.csv");
  write_text(path, "rate=1000\n0.5\n-0.5\n");
  const auto rec = load_recording(path);
  CHECK(rec.metadata_defaulted);
  CHECK(rec.warnings.size() >= 6);
  CHECK(rec.meta.subject_id == 0);
  std::filesystem::remove(path);
}

TEST_CASE("synth export round trip is bit identical") {
  TrialProfile profile;
  profile.seed = 99;
  profile.meta = {5, Experience::intermediate, 6.0, Activity::isotonic, Muscle::fcu, 2};
  profile.channel = "FCU";
  const auto trial = make_trial(profile);

  const auto path = temp_file("emgfit_roundtrip.csv");
  write_recording(path, trial.series, trial.meta,
                  {{"truth_action_start_s", "10"}, {"truth_action_end_s", "15"}});
  const auto rec = load_recording(path);
  CHECK(rec.series.samples == trial.series.samples);  // bit-identical
  CHECK(rec.series.rate == trial.series.rate);
  CHECK(rec.meta.subject_id == 5);
  CHECK(rec.meta.muscle == Muscle::fcu);
  CHECK(rec.extras.at("truth_action_start_s") == "10");
  std::filesystem::remove(path);
}

TEST_CASE("segment_action finds a variance-boosted action phase") {
  TrialProfile profile;
  profile.seed = 17;
  profile.rest_sigma = 0.05;
  // Action variance 25x the rest variance.
  profile.action_model = LgmParams{0.7, 0.0, 0.25, 0.0, 0.25};
  const auto trial = make_trial(profile);

  const auto seg = segment_action(trial.series);
  const double onset_s = static_cast<double>(seg.start_index) / trial.series.rate;
  const double offset_s = static_cast<double>(seg.end_index) / trial.series.rate;
  CHECK(std::abs(onset_s - trial.action_start_s) <= 0.25);
  CHECK(std::abs(offset_s - trial.action_end_s) <= 0.25);

  // Determinism: same series and config, same segment.
  const auto seg2 = segment_action(trial.series);
  CHECK(seg.start_index == seg2.start_index);
  CHECK(seg.end_index == seg2.end_index);

  // Most extracted windows sit above the on threshold.
  const auto action = extract_segment(trial.series, seg);
  const auto rms = moving_rms(action.samples, 200);
  double baseline = 0.0;
  for (std::size_t i = 0; i < 4000; ++i) {
    baseline += trial.series.samples[i] * trial.series.samples[i];
  }
  baseline = std::sqrt(baseline / 4000.0);
  int above = 0;
  for (double r : rms) {
    if (r >= 3.0 * baseline) ++above;
  }
  CHECK(above >= static_cast<int>(0.9 * rms.size()));
}

TEST_CASE("segment_action error contracts") {
  SampleSeries zeros;
  zeros.rate = 1000.0;
  zeros.samples.assign(4000, 0.0);
  CHECK_THROWS_WITH_AS(segment_action(zeros), doctest::Contains("no activity"), DataError);

  // Quiet baseline, activity later: zero baseline RMS is degenerate.
  TrialProfile profile;
  profile.seed = 23;
  profile.rest_sigma = 0.0;
  const auto trial = make_trial(profile);
  CHECK_THROWS_WITH_AS(segment_action(trial.series), doctest::Contains("degenerate"), DataError);

  // Rest-only noise never crosses the on threshold.
  SampleSeries rest;
  rest.rate = 2000.0;
  rest.samples = sample_gaussian(0.0, 0.05, 8000, 3);
  CHECK_THROWS_WITH_AS(segment_action(rest), doctest::Contains("no region"), DataError);

  SampleSeries tiny;
  tiny.rate = 2000.0;
  tiny.samples = sample_gaussian(0.0, 1.0, 100, 4);
  CHECK_THROWS_AS(segment_action(tiny), DataError);  // shorter than two windows
}

TEST_CASE("saturated series segments to (almost) the whole series") {
  // Uniform activity has no rest contrast; sub-unity thresholds express
  // "everything is active" and the hysteresis must span the record.
  SampleSeries active;
  active.rate = 2000.0;
  active.samples = sample_lgm({0.7, 0.0, 0.3, 0.0, 0.9}, 20000, 77);
  SegmentationConfig cfg;
  cfg.on_factor = 0.5;
  cfg.off_factor = 0.4;
  const auto seg = segment_action(active, cfg);
  CHECK(seg.start_index == 0);
  CHECK(seg.end_index >= active.samples.size() - 400);
}

TEST_CASE("manual override bypasses the detector") {
  TrialProfile profile;
  profile.seed = 5;
  const auto trial = make_trial(profile);
  SegmentationConfig cfg;
  cfg.manual_start_s = 10.0;
  cfg.manual_end_s = 15.0;
  const auto seg = segment_action(trial.series, cfg);
  CHECK(seg.start_index == 20000);
  CHECK(seg.end_index == 30000);

  cfg.manual_end_s.reset();
  CHECK_THROWS_AS(segment_action(trial.series, cfg), ConfigError);
  cfg.manual_end_s = 9.0;
  CHECK_THROWS_AS(segment_action(trial.series, cfg), ConfigError);
}

TEST_CASE("extract_segment identity, slicing and bounds") {
  SampleSeries s;
  s.rate = 100.0;
  s.channel = "BB";
  s.samples = {1.0, 2.0, 3.0, 4.0};

  const auto whole = extract_segment(s, {0, 4});
  CHECK(whole.samples == s.samples);
  CHECK(whole.rate == s.rate);
  CHECK(whole.channel == s.channel);

  const auto first = extract_segment(s, {0, 1});
  CHECK(first.samples == std::vector<double>{1.0});

  // re-extracting the full range is idempotent
  const auto again = extract_segment(whole, {0, whole.samples.size()});
  CHECK(again.samples == whole.samples);

  CHECK_THROWS_AS(extract_segment(s, {2, 8}), DataError);
  CHECK_THROWS_AS(extract_segment(s, {3, 3}), DataError);
}

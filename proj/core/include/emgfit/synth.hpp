#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "emgfit/models.hpp"
#include "emgfit/rng.hpp"
#include "emgfit/signal.hpp"

namespace emgfit {

/// Rest / action / release profile of one synthetic trial (defaults follow
/// the 10s / 5s / 3s protocol at 2000 Hz).
struct TrialProfile {
  double rest_s = 10.0;
  double action_s = 5.0;
  double release_s = 3.0;
  double rest_sigma = 0.05;  // baseline noise stddev (mV)
  std::variant<LgmParams, ScaleMixtureParams> action_model =
      LgmParams{0.7, 0.0, 0.25, 0.0, 0.75};
  double rate = 2000.0;
  std::uint64_t seed = 0;
  TrialMetadata meta;
  std::string channel = "EMG";
};

/// Synthetic trial plus its ground-truth action boundaries.
struct SynthTrial {
  SampleSeries series;
  TrialMetadata meta;
  double action_start_s = 0.0;
  double action_end_s = 0.0;
  std::uint64_t seed = 0;
};

std::vector<double> sample_lgm(const LgmParams& p, std::size_t n, std::uint64_t seed);
std::vector<double> sample_sm(const ScaleMixtureParams& p, std::size_t n, std::uint64_t seed);
std::vector<double> sample_gaussian(double mu, double sigma, std::size_t n, std::uint64_t seed);

// In-place variants drawing from a shared generator.
void sample_lgm(const LgmParams& p, std::size_t n, Rng& rng, std::vector<double>& out);
void sample_sm(const ScaleMixtureParams& p, std::size_t n, Rng& rng, std::vector<double>& out);

SynthTrial make_trial(const TrialProfile& profile);

}  // namespace emgfit

#include <doctest.h>

#include <cmath>

#include "emgfit/error.hpp"
#include "emgfit/synth.hpp"
#include "test_util.hpp"

using namespace emgfit;

TEST_CASE("generators are deterministic under a fixed seed") {
  const LgmParams lgm{0.6, 0.0, 1.0, 0.0, 2.0};
  const auto a = sample_lgm(lgm, 5000, 42);
  const auto b = sample_lgm(lgm, 5000, 42);
  CHECK(a == b);
  const auto c = sample_lgm(lgm, 5000, 43);
  CHECK(a != c);

  const ScaleMixtureParams sm{0.0, 1.0, 4.0};
  CHECK(sample_sm(sm, 2000, 9) == sample_sm(sm, 2000, 9));
}

TEST_CASE("pure Laplacian draw has kurtosis near 6") {
  const LgmParams p{1.0, 0.0, 1.0, 0.0, 1.0};
  const auto z = sample_lgm(p, 1'000'000, 2024);
  CHECK(testutil::kurtosis(z) == doctest::Approx(6.0).epsilon(0.1 / 6.0));
}

TEST_CASE("LGM mixture variance matches lambda1*var1 + lambda2*var2") {
  // lambda=0.5, var1=1, var2=4 -> 2.5; mixture fourth moment gives the SE.
  const LgmParams p{0.5, 0.0, 1.0, 0.0, 2.0};
  const std::size_t n = 1'000'000;
  const auto z = sample_lgm(p, n, 77);
  // mu4 = 0.5*6*1 + 0.5*3*16 = 27, var(m2) ~ (mu4 - var^2)/n
  const double se = std::sqrt((27.0 - 2.5 * 2.5) / static_cast<double>(n));
  CHECK(std::abs(testutil::variance(z) - 2.5) < 3.0 * se);
}

TEST_CASE("scale-mixture variance follows nu/(nu-2)") {
  const std::size_t n = 1'000'000;
  // Heavy-tailed case; fourth moment is infinite at nu=4 so allow a wide band.
  const auto z4 = sample_sm({0.0, 1.0, 4.0}, n, 5150);
  CHECK(testutil::variance(z4) == doctest::Approx(2.0).epsilon(0.15));

  // Gaussian limit: variance -> scale^2.
  const auto zg = sample_sm({0.0, 1.5, 1e6}, 200'000, 99);
  const double se = std::sqrt(2.0 * std::pow(1.5, 4) / 200'000.0);
  CHECK(std::abs(testutil::variance(zg) - 2.25) < 4.0 * se);
}

TEST_CASE("moment error shrinks from n=1e4 to n=1e6") {
  const LgmParams p{0.7, 0.0, 1.0, 0.0, 3.0};
  const double true_var = 0.7 * 1.0 + 0.3 * 9.0;
  const auto small = sample_lgm(p, 10'000, 31);
  const auto large = sample_lgm(p, 1'000'000, 31);
  const double err_small = std::abs(testutil::variance(small) - true_var);
  const double err_large = std::abs(testutil::variance(large) - true_var);
  CHECK(err_large < err_small);
}

TEST_CASE("make_trial produces the protocol length and boundaries") {
  TrialProfile profile;
  profile.seed = 7;
  const auto trial = make_trial(profile);
  CHECK(trial.series.samples.size() == 36000);  // 18 s at 2000 Hz
  CHECK(trial.action_start_s == doctest::Approx(10.0));
  CHECK(trial.action_end_s == doctest::Approx(15.0));
  CHECK(trial.series.duration_seconds() == doctest::Approx(18.0));

  const auto again = make_trial(profile);
  CHECK(trial.series.samples == again.series.samples);
}

TEST_CASE("make_trial validates the profile") {
  TrialProfile profile;
  profile.rest_s = 0.0;
  CHECK_THROWS_AS(make_trial(profile), ConfigError);
  profile = {};
  profile.rate = -5.0;
  CHECK_THROWS_AS(make_trial(profile), ConfigError);
}

TEST_CASE("scale-mixture trial profile draws from the t model") {
  TrialProfile profile;
  profile.action_model = ScaleMixtureParams{0.0, 0.4, 5.0};
  profile.seed = 3;
  const auto trial = make_trial(profile);
  CHECK(trial.series.samples.size() == 36000);
  // Action-phase variance should be near scale^2 * nu/(nu-2) = 0.2667.
  std::vector<double> action(trial.series.samples.begin() + 20000,
                             trial.series.samples.begin() + 30000);
  CHECK(testutil::variance(action) == doctest::Approx(0.4 * 0.4 * 5.0 / 3.0).epsilon(0.2));
}

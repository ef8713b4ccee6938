#include "emgfit/synth.hpp"

#include <cmath>

#include "emgfit/error.hpp"

namespace emgfit {

namespace {

void sample_model(const LgmParams& p, std::size_t n, Rng& rng, std::vector<double>& out) {
  sample_lgm(p, n, rng, out);
}
void sample_model(const ScaleMixtureParams& p, std::size_t n, Rng& rng,
                  std::vector<double>& out) {
  sample_sm(p, n, rng, out);
}

}  // namespace

void sample_lgm(const LgmParams& p, std::size_t n, Rng& rng, std::vector<double>& out) {
  p.validate();
  const double b = p.sigma1 / std::numbers::sqrt2;
  out.reserve(out.size() + n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.uniform() < p.lambda1) {
      out.push_back(rng.laplace(p.mu1, b));
    } else {
      out.push_back(rng.normal(p.mu2, p.sigma2));
    }
  }
}

void sample_sm(const ScaleMixtureParams& p, std::size_t n, Rng& rng, std::vector<double>& out) {
  p.validate();
  // Latent variance ~ InvGamma(nu/2, nu*scale^2/2) gives the t marginal.
  const double shape = 0.5 * p.nu;
  const double scale = 0.5 * p.nu * p.scale * p.scale;
  out.reserve(out.size() + n);
  for (std::size_t i = 0; i < n; ++i) {
    const double variance = rng.inverse_gamma(shape, scale);
    out.push_back(p.mu + std::sqrt(variance) * rng.normal());
  }
}

std::vector<double> sample_lgm(const LgmParams& p, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw UsageError("sample_lgm: n must be >= 1");
  Rng rng(seed);
  std::vector<double> out;
  sample_lgm(p, n, rng, out);
  return out;
}

std::vector<double> sample_sm(const ScaleMixtureParams& p, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw UsageError("sample_sm: n must be >= 1");
  Rng rng(seed);
  std::vector<double> out;
  sample_sm(p, n, rng, out);
  return out;
}

std::vector<double> sample_gaussian(double mu, double sigma, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& z : out) z = rng.normal(mu, sigma);
  return out;
}

SynthTrial make_trial(const TrialProfile& profile) {
  if (!(profile.rest_s > 0.0) || !(profile.action_s > 0.0) || !(profile.release_s > 0.0)) {
    throw ConfigError("make_trial: phase durations must be positive");
  }
  if (!(profile.rate > 0.0)) throw ConfigError("make_trial: rate must be positive");
  if (profile.rest_sigma < 0.0) throw ConfigError("make_trial: rest_sigma must be >= 0");

  const auto n_rest = static_cast<std::size_t>(std::llround(profile.rest_s * profile.rate));
  const auto n_action = static_cast<std::size_t>(std::llround(profile.action_s * profile.rate));
  const auto n_release = static_cast<std::size_t>(std::llround(profile.release_s * profile.rate));

  Rng rng(profile.seed);
  SynthTrial trial;
  trial.meta = profile.meta;
  trial.seed = profile.seed;
  trial.series.rate = profile.rate;
  trial.series.channel = profile.channel;
  auto& z = trial.series.samples;
  z.reserve(n_rest + n_action + n_release);

  for (std::size_t i = 0; i < n_rest; ++i) z.push_back(rng.normal(0.0, profile.rest_sigma));
  std::visit([&](const auto& model) { sample_model(model, n_action, rng, z); },
             profile.action_model);
  for (std::size_t i = 0; i < n_release; ++i) z.push_back(rng.normal(0.0, profile.rest_sigma));

  trial.action_start_s = static_cast<double>(n_rest) / profile.rate;
  trial.action_end_s = static_cast<double>(n_rest + n_action) / profile.rate;
  return trial;
}

}  // namespace emgfit

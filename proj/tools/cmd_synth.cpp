#include <cstdio>

#include "emgfit/error.hpp"
#include "emgfit/format.hpp"
#include "emgfit/rng.hpp"
#include "emgfit/synth.hpp"
#include "emgfit/trial_io.hpp"

#include "cli_common.hpp"

namespace emgfit::cli {

namespace {

TrialProfile profile_from_options(const SynthOptions& o, int index) {
  TrialProfile profile;
  profile.rest_s = o.rest_s;
  profile.action_s = o.action_s;
  profile.release_s = o.release_s;
  profile.rest_sigma = o.rest_sigma;
  profile.rate = o.rate;
  profile.seed = Rng::derive_seed(o.seed, static_cast<std::uint64_t>(index));
  if (o.model == "lgm") {
    profile.action_model = LgmParams{o.lambda1, o.mu1, o.sigma1, o.mu2, o.sigma2};
  } else if (o.model == "sm") {
    profile.action_model = ScaleMixtureParams{o.sm_mu, o.sm_scale, o.sm_nu};
  } else {
    throw ConfigError("synth: --model must be lgm or sm");
  }
  profile.meta.subject_id = o.subject;
  profile.meta.experience = parse_experience(o.experience);
  profile.meta.weight_kg = o.weight_kg;
  profile.meta.activity = parse_activity(o.activity);
  profile.meta.muscle = parse_muscle(o.muscle);
  profile.meta.trial_index = o.trial_start + index;
  profile.channel = o.muscle;
  return profile;
}

std::map<std::string, std::string> truth_comments(const TrialProfile& profile,
                                                  const SynthTrial& trial,
                                                  const std::string& model) {
  std::map<std::string, std::string> extras;
  extras["truth_action_start_s"] = format_sig(trial.action_start_s);
  extras["truth_action_end_s"] = format_sig(trial.action_end_s);
  extras["truth_model"] = model;
  extras["truth_seed"] = std::to_string(trial.seed);
  if (const auto* lgm = std::get_if<LgmParams>(&profile.action_model)) {
    extras["truth_lambda1"] = format_sig(lgm->lambda1);
    extras["truth_sigma1"] = format_sig(lgm->sigma1);
    extras["truth_sigma2"] = format_sig(lgm->sigma2);
  } else {
    const auto& sm = std::get<ScaleMixtureParams>(profile.action_model);
    extras["truth_scale"] = format_sig(sm.scale);
    extras["truth_nu"] = format_sig(sm.nu);
  }
  extras["truth_rest_sigma"] = format_sig(profile.rest_sigma);
  return extras;
}

}  // namespace

int run_synth(const SynthOptions& options) {
  if (options.n_trials < 1) throw ConfigError("synth: --n-trials must be >= 1");
  const std::filesystem::path out_dir(options.out_dir);
  ensure_out_dir(out_dir);

  Manifest manifest;
  manifest.command = "synth";
  manifest.seed = options.seed;
  manifest.config = options;

  for (int i = 0; i < options.n_trials; ++i) {
    const TrialProfile profile = profile_from_options(options, i);
    const SynthTrial trial = make_trial(profile);
    char name[32];
    std::snprintf(name, sizeof name, "trial_%03d.csv", options.trial_start + i);
    write_recording(out_dir / name, trial.series, trial.meta,
                    truth_comments(profile, trial, options.model));
    manifest.outputs.emplace_back(name);
  }

  write_manifest(manifest, out_dir);
  std::fprintf(stderr, "emgfit: wrote %d trial(s) to %s\n", options.n_trials,
               out_dir.string().c_str());
  return 0;
}

}  // namespace emgfit::cli

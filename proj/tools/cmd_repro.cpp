#include <cstdio>

#include "emgfit/error.hpp"
#include "emgfit/format.hpp"
#include "emgfit/rng.hpp"
#include "emgfit/synth.hpp"
#include "emgfit/trial_io.hpp"

#include "cli_common.hpp"

namespace emgfit::cli {

namespace {

// Ground-truth gradients for the synthetic reproduction batch: the FCU
// Laplacian stddev rises with weight at an experience-dependent slope, BB
// scales it by an experience-dependent ratio, and the Laplacian weight
// grows with load.
constexpr double kFcuSlope[3] = {0.04, 0.08, 0.12};
constexpr double kBbRatio[3] = {1.1, 1.4, 1.7};
constexpr Experience kExperiences[3] = {Experience::novice, Experience::intermediate,
                                        Experience::trained};

struct PlannedTrial {
  TrialProfile profile;
  std::string filename;
};

std::vector<PlannedTrial> plan_trials(const ReproOptions& options) {
  std::vector<PlannedTrial> plan;
  std::uint64_t index = 0;
  for (int e = 0; e < 3; ++e) {
    for (const double w : options.weights) {
      for (int trial = 1; trial <= options.trials; ++trial) {
        const double sigma_fcu = 0.15 * (1.0 + kFcuSlope[e] * w);
        for (const Muscle muscle : {Muscle::bb, Muscle::fcu}) {
          const double sigma1 = muscle == Muscle::bb ? kBbRatio[e] * sigma_fcu : sigma_fcu;
          PlannedTrial p;
          p.profile.rest_s = 3.0;
          p.profile.action_s = options.action_s;
          p.profile.release_s = 1.0;
          p.profile.rest_sigma = 0.03;
          p.profile.rate = 2000.0;
          p.profile.seed = Rng::derive_seed(options.seed, index++);
          p.profile.action_model =
              LgmParams{std::min(0.55 + 0.025 * w, 0.9), 0.0, sigma1, 0.0, 2.5 * sigma1};
          p.profile.meta = {e + 1, kExperiences[e], w, Activity::isotonic, muscle, trial};
          p.profile.channel = to_string(muscle);
          char name[64];
          std::snprintf(name, sizeof name, "s%d_%s_w%g_t%d_%s.csv", e + 1,
                        to_string(kExperiences[e]), w, trial, to_string(muscle));
          p.filename = name;
          plan.push_back(std::move(p));
        }
      }
    }
  }
  return plan;
}

}  // namespace

int run_repro(const ReproOptions& options) {
  if (options.weights.size() < 3) {
    throw ConfigError("repro: need at least 3 weights for slope tests");
  }
  if (options.trials < 1) throw ConfigError("repro: --trials must be >= 1");
  const std::filesystem::path out_dir(options.out_dir);
  ensure_out_dir(out_dir);
  const auto trials_dir = out_dir / "trials";
  ensure_out_dir(trials_dir);

  Manifest manifest;
  manifest.command = "repro";
  manifest.seed = options.seed;
  manifest.config = options;

  // Stage 1: synthesize the graded trial batch.
  const auto plan = plan_trials(options);
  std::vector<std::string> inputs;
  for (const auto& p : plan) {
    const SynthTrial trial = make_trial(p.profile);
    std::map<std::string, std::string> extras{
        {"truth_action_start_s", format_sig(trial.action_start_s)},
        {"truth_action_end_s", format_sig(trial.action_end_s)},
        {"truth_sigma1", format_sig(std::get<LgmParams>(p.profile.action_model).sigma1)},
        {"truth_lambda1", format_sig(std::get<LgmParams>(p.profile.action_model).lambda1)}};
    write_recording(trials_dir / p.filename, trial.series, trial.meta, extras);
    inputs.push_back((trials_dir / p.filename).string());
    manifest.outputs.push_back("trials/" + p.filename);
  }

  // Stage 2: fit every family per trial; fresh table each run.
  FitOptions fit_options;
  fit_options.inputs = inputs;
  fit_options.out_dir = (out_dir / "fits").string();
  fit_options.table = (out_dir / "params.csv").string();
  fit_options.fit.seed = options.seed;
  fit_options.fit.restarts = options.restarts;
  fit_options.fit.jobs = options.jobs;
  std::filesystem::remove(fit_options.table);
  run_fit(fit_options);
  for (const auto& p : plan) {
    const auto stem = std::filesystem::path(p.filename).stem().string();
    for (const char* fam : {"lgm", "sg", "sl", "sm"}) {
      manifest.outputs.push_back("fits/" + stem + "." + fam + ".json");
    }
  }
  manifest.outputs.emplace_back("fits/manifest.json");
  manifest.outputs.emplace_back("params.csv");

  // Stage 3: model comparison report.
  CompareOptions compare_options;
  compare_options.inputs = inputs;
  compare_options.out_dir = (out_dir / "compare").string();
  compare_options.bins = options.bins;
  compare_options.fit.seed = options.seed;
  compare_options.fit.restarts = options.restarts;
  compare_options.fit.jobs = options.jobs;
  run_compare(compare_options);
  manifest.outputs.emplace_back("compare/compare_report.json");
  manifest.outputs.emplace_back("compare/manifest.json");

  // Stage 4: trend tables and slope tests.
  AnalyzeOptions analyze_options;
  analyze_options.table = fit_options.table;
  analyze_options.out_dir = (out_dir / "trends").string();
  run_analyze(analyze_options);
  for (const char* name : {"sigma_l_trend.csv", "lambda_l_trend.csv", "rho_l_trend.csv",
                           "gamma_l_trend.csv", "ftest_summary.csv", "manifest.json"}) {
    manifest.outputs.push_back(std::string("trends/") + name);
  }

  write_manifest(manifest, out_dir);
  std::fprintf(stderr, "emgfit: repro complete, %zu trials under %s\n", plan.size(),
               out_dir.string().c_str());
  return 0;
}

int run_rerun(const std::string& manifest_path, const std::string& out_dir_override) {
  const std::filesystem::path path(manifest_path);
  const Manifest m = read_manifest(path);
  const std::string out_dir = out_dir_override.empty()
                                  ? path.parent_path().string()
                                  : out_dir_override;
  if (m.command == "synth") {
    SynthOptions o = m.config.get<SynthOptions>();
    o.out_dir = out_dir;
    return run_synth(o);
  }
  if (m.command == "fit") {
    FitOptions o = m.config.get<FitOptions>();
    o.out_dir = out_dir;
    return run_fit(o);
  }
  if (m.command == "compare") {
    CompareOptions o = m.config.get<CompareOptions>();
    o.out_dir = out_dir;
    return run_compare(o);
  }
  if (m.command == "analyze") {
    AnalyzeOptions o = m.config.get<AnalyzeOptions>();
    o.out_dir = out_dir;
    return run_analyze(o);
  }
  if (m.command == "repro") {
    ReproOptions o = m.config.get<ReproOptions>();
    o.out_dir = out_dir;
    return run_repro(o);
  }
  throw ConfigError("rerun: unknown command in manifest: " + m.command);
}

}  // namespace emgfit::cli

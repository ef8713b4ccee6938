#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "emgfit/error.hpp"
#include "emgfit/version.hpp"

#include "commands.hpp"

namespace {

using namespace emgfit::cli;

void add_fit_settings(CLI::App* cmd, FitSettings& s) {
  cmd->add_option("--families", s.families, "Model families to fit")
      ->delimiter(',')
      ->check(CLI::IsMember({"lgm", "sg", "sl", "sm"}));
  cmd->add_flag("--zero-mean", s.zero_mean, "Pin all location parameters at zero");
  cmd->add_option("--seed", s.seed, "Base seed for EM restarts (per-trial seeds derive from it)");
  cmd->add_option("--tol", s.tol, "EM relative log-likelihood tolerance");
  cmd->add_option("--max-iter", s.max_iter, "EM iteration cap");
  cmd->add_option("--restarts", s.restarts, "EM restarts per fit");
  cmd->add_option("--jobs", s.jobs, "Worker threads (0 = all cores)");
}

void add_segmentation(CLI::App* cmd, SegmentationOptions& s) {
  cmd->add_option("--window-ms", s.window_ms, "Moving-RMS window (ms)");
  cmd->add_option("--on-factor", s.on_factor, "Onset threshold as a multiple of baseline RMS");
  cmd->add_option("--off-factor", s.off_factor, "Offset threshold as a multiple of baseline RMS");
  cmd->add_option("--baseline-s", s.baseline_s, "Seconds of leading rest used for the baseline");
  cmd->add_option("--manual-start-s", s.manual_start_s, "Manual segment start (s), bypasses detector");
  cmd->add_option("--manual-end-s", s.manual_end_s, "Manual segment end (s), bypasses detector");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Amplitude-distribution model fitting and comparison for segmented sEMG-style "
               "recordings"};
  app.set_version_flag("--version", emgfit::kVersion);
  app.set_config("--config", "", "Read options from a TOML-style config file");
  app.require_subcommand(1);

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic rest/action/release trials");
  synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory")->required();
  synth_cmd->add_option("--n-trials", synth.n_trials, "Number of trials to generate");
  synth_cmd->add_option("--seed", synth.seed, "Base seed; trial seeds derive from it");
  synth_cmd->add_option("--rest-s", synth.rest_s, "Rest phase duration (s)");
  synth_cmd->add_option("--action-s", synth.action_s, "Action phase duration (s)");
  synth_cmd->add_option("--release-s", synth.release_s, "Release phase duration (s)");
  synth_cmd->add_option("--rest-sigma", synth.rest_sigma, "Rest noise stddev (mV)");
  synth_cmd->add_option("--rate", synth.rate, "Sampling rate (Hz)");
  synth_cmd->add_option("--model", synth.model, "Action-phase model")
      ->check(CLI::IsMember({"lgm", "sm"}));
  synth_cmd->add_option("--lambda1", synth.lambda1, "LGM Laplacian mixing weight");
  synth_cmd->add_option("--mu1", synth.mu1, "LGM Laplacian location (mV)");
  synth_cmd->add_option("--sigma1", synth.sigma1, "LGM Laplacian stddev (mV)");
  synth_cmd->add_option("--mu2", synth.mu2, "LGM Gaussian mean (mV)");
  synth_cmd->add_option("--sigma2", synth.sigma2, "LGM Gaussian stddev (mV)");
  synth_cmd->add_option("--sm-mu", synth.sm_mu, "Scale-mixture location (mV)");
  synth_cmd->add_option("--sm-scale", synth.sm_scale, "Scale-mixture scale (mV)");
  synth_cmd->add_option("--sm-nu", synth.sm_nu, "Scale-mixture degrees of freedom");
  synth_cmd->add_option("--subject", synth.subject, "Subject id");
  synth_cmd->add_option("--experience", synth.experience, "Experience level")
      ->check(CLI::IsMember({"novice", "intermediate", "trained"}));
  synth_cmd->add_option("--weight", synth.weight_kg, "Lifted weight (kg)");
  synth_cmd->add_option("--activity", synth.activity, "Contraction type")
      ->check(CLI::IsMember({"isotonic", "isometric"}));
  synth_cmd->add_option("--muscle", synth.muscle, "Muscle site")
      ->check(CLI::IsMember({"BB", "FCU"}));
  synth_cmd->add_option("--trial-start", synth.trial_start, "First trial index");
  synth_cmd->callback([&] { run_synth(synth); });

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Segment trials and fit the model families");
  fit_cmd->add_option("inputs", fit.inputs, "Trial CSV files")->required();
  fit_cmd->add_option("--out-dir", fit.out_dir, "Output directory")->required();
  fit_cmd->add_option("--table", fit.table, "Parameter table CSV (default <out-dir>/params.csv)");
  add_fit_settings(fit_cmd, fit.fit);
  add_segmentation(fit_cmd, fit.seg);
  fit_cmd->callback([&] { run_fit(fit); });

  CompareOptions compare;
  auto* compare_cmd =
      app.add_subcommand("compare", "Fit families and score them against the empirical pdf");
  compare_cmd->add_option("inputs", compare.inputs, "Trial CSV files")->required();
  compare_cmd->add_option("--out-dir", compare.out_dir, "Output directory")->required();
  compare_cmd->add_option("--bins", compare.bins, "Histogram bin count");
  add_fit_settings(compare_cmd, compare.fit);
  add_segmentation(compare_cmd, compare.seg);
  compare_cmd->callback([&] { run_compare(compare); });

  AnalyzeOptions analyze;
  auto* analyze_cmd =
      app.add_subcommand("analyze", "Aggregate fitted parameters into trend tables and F-tests");
  analyze_cmd->add_option("--table", analyze.table, "Parameter table CSV")->required();
  analyze_cmd->add_option("--out-dir", analyze.out_dir, "Output directory")->required();
  analyze_cmd->add_option("--alpha", analyze.alpha, "Slope F-test significance level");
  analyze_cmd->callback([&] { run_analyze(analyze); });

  ReproOptions repro;
  auto* repro_cmd = app.add_subcommand(
      "repro", "Chain synth -> fit -> compare -> analyze on a graded synthetic batch");
  repro_cmd->add_option("--out-dir", repro.out_dir, "Output directory")->required();
  repro_cmd->add_option("--seed", repro.seed, "Base seed");
  repro_cmd->add_option("--weights", repro.weights, "Dumbbell weights (kg)")->delimiter(',');
  repro_cmd->add_option("--trials", repro.trials, "Trials per (experience, weight, muscle) cell");
  repro_cmd->add_option("--action-s", repro.action_s, "Action phase duration (s)");
  repro_cmd->add_option("--bins", repro.bins, "Histogram bin count");
  repro_cmd->add_option("--restarts", repro.restarts, "EM restarts per fit");
  repro_cmd->add_option("--jobs", repro.jobs, "Worker threads (0 = all cores)");
  repro_cmd->callback([&] { run_repro(repro); });

  std::string rerun_manifest, rerun_out_dir;
  auto* rerun_cmd = app.add_subcommand("rerun", "Re-execute a command from its manifest");
  rerun_cmd->add_option("manifest", rerun_manifest, "Path to a manifest.json")->required();
  rerun_cmd->add_option("--out-dir", rerun_out_dir,
                        "Output directory (default: the manifest's directory)");
  rerun_cmd->callback([&] { run_rerun(rerun_manifest, rerun_out_dir); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::fprintf(stderr, "emgfit: error [config]: invalid command line\n");
    return 2;
  } catch (const emgfit::Error& e) {
    std::fprintf(stderr, "emgfit: error [%s]: %s\n", emgfit::to_string(e.category()), e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "emgfit: error [internal]: %s\n", e.what());
    return 1;
  }
  return 0;
}

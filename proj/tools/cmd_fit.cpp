#include <algorithm>
#include <cstdio>

#include "emgfit/analysis.hpp"
#include "emgfit/error.hpp"
#include "emgfit/rng.hpp"
#include "emgfit/serialize.hpp"

#include "cli_common.hpp"

namespace emgfit::cli {

namespace {

ParamRow to_param_row(const TrialFits& trial, ModelFamily family, const FitResult& fit) {
  ParamRow row;
  row.meta = trial.meta;
  row.family = family;
  row.params = fit.params;
  row.loglik = fit.loglik;
  row.n = fit.n;
  row.converged = fit.converged;
  return row;
}

}  // namespace

int run_fit(const FitOptions& options) {
  if (options.inputs.empty()) throw ConfigError("fit: at least one input trial is required");
  const std::filesystem::path out_dir(options.out_dir);
  ensure_out_dir(out_dir);
  const std::filesystem::path table_path =
      options.table.empty() ? out_dir / "params.csv" : std::filesystem::path(options.table);

  std::vector<std::string> inputs = options.inputs;
  std::sort(inputs.begin(), inputs.end());

  std::vector<TrialFits> results(inputs.size());
  const auto errors = parallel_for(inputs.size(), options.fit.jobs, [&](std::size_t i) {
    results[i] = fit_one_trial(inputs[i], options.seg, options.fit,
                               Rng::derive_seed(options.fit.seed, i));
  });

  Manifest manifest;
  manifest.command = "fit";
  manifest.seed = options.fit.seed;
  manifest.config = options;
  manifest.inputs = inputs;

  ParameterTable table;
  std::size_t failed = 0;
  std::exception_ptr first_error;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (errors[i]) {
      ++failed;
      if (!first_error) first_error = errors[i];
      try {
        std::rethrow_exception(errors[i]);
      } catch (const std::exception& e) {
        std::fprintf(stderr, "emgfit: warning: %s failed: %s\n", inputs[i].c_str(), e.what());
        manifest.warnings.push_back(inputs[i] + ": " + e.what());
      }
      continue;
    }
    const auto& trial = results[i];
    const auto stem = std::filesystem::path(inputs[i]).stem().string();
    for (const auto& [family, fit] : trial.fits) {
      const std::string name = stem + "." + to_string(family) + ".json";
      write_json_file(trial_fit_json(trial, fit, options.fit), out_dir / name);
      manifest.outputs.push_back(name);
      table.add(to_param_row(trial, family, fit));
    }
  }

  if (failed == inputs.size()) std::rethrow_exception(first_error);

  write_table_csv(table, table_path, /*append=*/true);
  manifest.outputs.push_back(std::filesystem::relative(table_path, out_dir).string());
  write_manifest(manifest, out_dir);
  std::fprintf(stderr, "emgfit: fitted %zu/%zu trial(s), table at %s\n",
               inputs.size() - failed, inputs.size(), table_path.string().c_str());
  return 0;
}

}  // namespace emgfit::cli

#include <algorithm>
#include <cstdio>
#include <map>

#include "emgfit/error.hpp"
#include "emgfit/format.hpp"
#include "emgfit/histogram.hpp"
#include "emgfit/metrics.hpp"
#include "emgfit/rng.hpp"
#include "emgfit/serialize.hpp"
#include "emgfit/version.hpp"

#include "cli_common.hpp"

namespace emgfit::cli {

namespace {

struct TrialMetrics {
  TrialFits fits;
  std::map<ModelFamily, std::pair<double, double>> kld_ad;  // family -> (kld, ad)
  std::map<ModelFamily, LrtResult> lrt;                     // null family -> result
};

TrialMetrics compare_one_trial(const std::filesystem::path& input,
                               const CompareOptions& options, std::uint64_t trial_seed) {
  TrialMetrics out;
  out.fits = fit_one_trial(input, options.seg, options.fit, trial_seed);

  HistogramConfig hist_cfg;
  hist_cfg.bins = options.bins;
  const EmpiricalPdf mpdf = build_histogram(out.fits.action, hist_cfg);

  for (const auto& [family, fit] : out.fits.fits) {
    const auto& params = fit.params;
    const auto mass =
        bin_model([&params](double z) { return model_pdf(z, params); }, mpdf.edges);
    out.kld_ad[family] = {kl_divergence(mpdf.mass, mass), area_difference(mpdf.mass, mass)};
  }

  const FitResult* lgm = nullptr;
  for (const auto& [family, fit] : out.fits.fits) {
    if (family == ModelFamily::lgm) lgm = &fit;
  }
  if (lgm) {
    for (const auto& [family, fit] : out.fits.fits) {
      if (family == ModelFamily::sg || family == ModelFamily::sl) {
        out.lrt[family] = likelihood_ratio_test(fit, *lgm, out.fits.action);
      }
    }
  }
  return out;
}

nlohmann::json lrt_to_json(const LrtResult& r) {
  return {{"statistic", round_sig(r.statistic, 12)},
          {"df", r.df},
          {"p_value", round_sig(r.p_value, 12)},
          {"reject_null_at_05", r.reject_null_at_05}};
}

}  // namespace

int run_compare(const CompareOptions& options) {
  if (options.inputs.empty()) throw ConfigError("compare: at least one input trial is required");
  if (std::find(options.fit.families.begin(), options.fit.families.end(), "lgm") ==
      options.fit.families.end()) {
    throw ConfigError("compare: the families list must include lgm");
  }
  const std::filesystem::path out_dir(options.out_dir);
  ensure_out_dir(out_dir);

  std::vector<std::string> inputs = options.inputs;
  std::sort(inputs.begin(), inputs.end());

  std::vector<TrialMetrics> results(inputs.size());
  const auto errors = parallel_for(inputs.size(), options.fit.jobs, [&](std::size_t i) {
    results[i] = compare_one_trial(inputs[i], options, Rng::derive_seed(options.fit.seed, i));
  });
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
  }

  nlohmann::json report;
  report["tool"] = "emgfit";
  report["version"] = kVersion;
  report["bins"] = options.bins;
  report["zero_mean"] = options.fit.zero_mean;
  report["families"] = options.fit.families;

  struct Avg {
    double kld = 0.0, ad = 0.0;
    int n = 0;
  };
  std::map<double, std::map<ModelFamily, Avg>> by_weight;
  std::map<ModelFamily, Avg> overall;
  std::map<ModelFamily, std::vector<double>> lrt_ps;
  std::map<ModelFamily, int> lrt_rejects;

  auto& trials = report["trials"] = nlohmann::json::array();
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& r = results[i];
    nlohmann::json jt;
    jt["input"] = std::filesystem::path(inputs[i]).filename().string();
    jt["subject"] = r.fits.meta.subject_id;
    jt["experience"] = to_string(r.fits.meta.experience);
    jt["activity"] = to_string(r.fits.meta.activity);
    jt["muscle"] = to_string(r.fits.meta.muscle);
    jt["weight_kg"] = round_sig(r.fits.meta.weight_kg, 12);
    jt["trial"] = r.fits.meta.trial_index;
    jt["n_action"] = r.fits.action.size();
    auto& jm = jt["metrics"] = nlohmann::json::object();
    for (const auto& [family, fit] : r.fits.fits) {
      const auto [kld, ad] = r.kld_ad.at(family);
      jm[to_string(family)] = {{"kld", round_sig(kld, 12)},
                               {"ad", round_sig(ad, 12)},
                               {"loglik", round_sig(fit.loglik, 12)}};
      auto& cell = by_weight[r.fits.meta.weight_kg][family];
      cell.kld += kld;
      cell.ad += ad;
      ++cell.n;
      auto& tot = overall[family];
      tot.kld += kld;
      tot.ad += ad;
      ++tot.n;
    }
    if (!r.lrt.empty()) {
      auto& jl = jt["lrt"] = nlohmann::json::object();
      for (const auto& [family, lrt] : r.lrt) {
        jl[to_string(family)] = lrt_to_json(lrt);
        lrt_ps[family].push_back(lrt.p_value);
        if (lrt.reject_null_at_05) ++lrt_rejects[family];
      }
    }
    trials.push_back(std::move(jt));
  }

  auto& avg = report["averages_by_weight"] = nlohmann::json::array();
  for (const auto& [weight, cells] : by_weight) {
    nlohmann::json jw;
    jw["weight_kg"] = round_sig(weight, 12);
    int n_trials = 0;
    auto& jm = jw["metrics"] = nlohmann::json::object();
    for (const auto& [family, cell] : cells) {
      jm[to_string(family)] = {{"kld", round_sig(cell.kld / cell.n, 12)},
                               {"ad", round_sig(cell.ad / cell.n, 12)}};
      n_trials = cell.n;
    }
    jw["n_trials"] = n_trials;
    avg.push_back(std::move(jw));
  }

  auto& jo = report["overall"] = nlohmann::json::object();
  jo["n_trials"] = inputs.size();
  auto& jom = jo["metrics"] = nlohmann::json::object();
  for (const auto& [family, cell] : overall) {
    jom[to_string(family)] = {{"kld", round_sig(cell.kld / cell.n, 12)},
                              {"ad", round_sig(cell.ad / cell.n, 12)}};
  }

  auto& js = report["lrt_summary"] = nlohmann::json::object();
  for (auto& [family, ps] : lrt_ps) {
    std::sort(ps.begin(), ps.end());
    const std::size_t n = ps.size();
    const double median =
        n % 2 == 1 ? ps[n / 2] : 0.5 * (ps[n / 2 - 1] + ps[n / 2]);
    js[to_string(family)] = {{"n", n},
                             {"rejections", lrt_rejects[family]},
                             {"median_p", round_sig(median, 12)}};
  }

  write_json_file(report, out_dir / "compare_report.json");

  Manifest manifest;
  manifest.command = "compare";
  manifest.seed = options.fit.seed;
  manifest.config = options;
  manifest.inputs = inputs;
  manifest.outputs = {"compare_report.json"};
  write_manifest(manifest, out_dir);
  std::fprintf(stderr, "emgfit: compared %zu trial(s), report at %s\n", inputs.size(),
               (out_dir / "compare_report.json").string().c_str());
  return 0;
}

}  // namespace emgfit::cli

#include "cli_common.hpp"

#include <atomic>
#include <thread>

#include "emgfit/error.hpp"
#include "emgfit/format.hpp"
#include "emgfit/rng.hpp"
#include "emgfit/serialize.hpp"
#include "emgfit/version.hpp"

namespace emgfit::cli {

void to_json(nlohmann::json& j, const SegmentationOptions& o) {
  j = {{"window_ms", o.window_ms},
       {"on_factor", o.on_factor},
       {"off_factor", o.off_factor},
       {"baseline_s", o.baseline_s},
       {"manual_start_s", o.manual_start_s ? nlohmann::json(*o.manual_start_s) : nullptr},
       {"manual_end_s", o.manual_end_s ? nlohmann::json(*o.manual_end_s) : nullptr}};
}

void from_json(const nlohmann::json& j, SegmentationOptions& o) {
  o.window_ms = j.value("window_ms", o.window_ms);
  o.on_factor = j.value("on_factor", o.on_factor);
  o.off_factor = j.value("off_factor", o.off_factor);
  o.baseline_s = j.value("baseline_s", o.baseline_s);
  if (j.contains("manual_start_s") && !j["manual_start_s"].is_null()) {
    o.manual_start_s = j["manual_start_s"].get<double>();
  }
  if (j.contains("manual_end_s") && !j["manual_end_s"].is_null()) {
    o.manual_end_s = j["manual_end_s"].get<double>();
  }
}

void to_json(nlohmann::json& j, const FitOptions& o) {
  j = {{"inputs", o.inputs}, {"table", o.table}, {"fit", o.fit}, {"seg", o.seg}};
}

void from_json(const nlohmann::json& j, FitOptions& o) {
  o.inputs = j.value("inputs", o.inputs);
  o.table = j.value("table", o.table);
  if (j.contains("fit")) j["fit"].get_to(o.fit);
  if (j.contains("seg")) j["seg"].get_to(o.seg);
}

void to_json(nlohmann::json& j, const CompareOptions& o) {
  j = {{"inputs", o.inputs}, {"bins", o.bins}, {"fit", o.fit}, {"seg", o.seg}};
}

void from_json(const nlohmann::json& j, CompareOptions& o) {
  o.inputs = j.value("inputs", o.inputs);
  o.bins = j.value("bins", o.bins);
  if (j.contains("fit")) j["fit"].get_to(o.fit);
  if (j.contains("seg")) j["seg"].get_to(o.seg);
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& dir) {
  nlohmann::json j;
  j["tool"] = "emgfit";
  j["version"] = kVersion;
  j["command"] = manifest.command;
  j["seed"] = manifest.seed;
  j["config"] = manifest.config;
  j["inputs"] = manifest.inputs;
  j["outputs"] = manifest.outputs;
  j["warnings"] = manifest.warnings;
  write_json_file(j, dir / "manifest.json");
}

Manifest read_manifest(const std::filesystem::path& path) {
  const auto j = read_json_file(path);
  Manifest m;
  if (!j.contains("command") || !j.contains("config")) {
    throw ConfigError("manifest is missing command/config: " + path.string());
  }
  m.command = j["command"].get<std::string>();
  m.seed = j.value("seed", 0ULL);
  m.config = j["config"];
  m.inputs = j.value("inputs", std::vector<std::string>{});
  m.outputs = j.value("outputs", std::vector<std::string>{});
  return m;
}

std::vector<std::exception_ptr> parallel_for(std::size_t n, int jobs,
                                             const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  if (n == 0) return errors;
  unsigned workers = jobs > 0 ? static_cast<unsigned>(jobs)
                              : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    return errors;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  return errors;
}

SegmentationConfig to_segmentation_config(const SegmentationOptions& o) {
  SegmentationConfig cfg;
  cfg.window_ms = o.window_ms;
  cfg.on_factor = o.on_factor;
  cfg.off_factor = o.off_factor;
  cfg.baseline_s = o.baseline_s;
  cfg.manual_start_s = o.manual_start_s;
  cfg.manual_end_s = o.manual_end_s;
  return cfg;
}

EmConfig make_em_config(const FitSettings& settings, std::uint64_t trial_seed) {
  EmConfig cfg;
  cfg.tol = settings.tol;
  cfg.max_iter = settings.max_iter;
  cfg.n_restarts = settings.restarts;
  cfg.zero_mean = settings.zero_mean;
  cfg.seed = trial_seed;
  return cfg;
}

TrialFits fit_one_trial(const std::filesystem::path& input, const SegmentationOptions& seg,
                        const FitSettings& settings, std::uint64_t trial_seed) {
  const auto rec = load_recording(input);
  const auto segment = segment_action(rec.series, to_segmentation_config(seg));
  auto action = extract_segment(rec.series, segment);

  TrialFits out;
  out.input = input.string();
  out.meta = rec.meta;
  out.segment = segment;
  out.rate = rec.series.rate;
  out.action = std::move(action.samples);

  const EmConfig em = make_em_config(settings, trial_seed);
  for (const auto& name : settings.families) {
    const ModelFamily family = parse_family(name);
    FitResult fit;
    switch (family) {
      case ModelFamily::lgm: fit = fit_lgm_em(out.action, em); break;
      case ModelFamily::sg: fit = fit_gaussian_mle(out.action, em.zero_mean); break;
      case ModelFamily::sl: fit = fit_laplacian_mle(out.action, em.zero_mean); break;
      case ModelFamily::sm: fit = fit_sm_em(out.action, em); break;
    }
    out.fits.emplace_back(family, std::move(fit));
  }
  return out;
}

nlohmann::json trial_fit_json(const TrialFits& trial, const FitResult& fit,
                              const FitSettings& settings) {
  const EmConfig em = make_em_config(settings, fit.seed);
  const bool is_em = fit.family == ModelFamily::lgm || fit.family == ModelFamily::sm;
  nlohmann::json j = fit_result_to_json(fit, is_em ? &em : nullptr);
  j["input"] = std::filesystem::path(trial.input).filename().string();
  j["segment"] = {{"start_index", trial.segment.start_index},
                  {"end_index", trial.segment.end_index},
                  {"start_s", round_sig(trial.segment.start_index / trial.rate, 12)},
                  {"end_s", round_sig(trial.segment.end_index / trial.rate, 12)}};
  j["metadata"] = {{"subject", trial.meta.subject_id},
                   {"experience", to_string(trial.meta.experience)},
                   {"activity", to_string(trial.meta.activity)},
                   {"muscle", to_string(trial.meta.muscle)},
                   {"weight_kg", round_sig(trial.meta.weight_kg, 12)},
                   {"trial", trial.meta.trial_index}};
  return j;
}

void ensure_out_dir(const std::filesystem::path& dir) {
  if (dir.empty()) throw ConfigError("--out-dir is required");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string());
}

}  // namespace emgfit::cli

#include <cstdio>
#include <fstream>

#include "emgfit/analysis.hpp"
#include "emgfit/error.hpp"
#include "emgfit/format.hpp"

#include "cli_common.hpp"

namespace emgfit::cli {

namespace {

// Slope F-tests between experience groups sharing the other label parts.
// Series labels look like "novice|isotonic" or "novice|isotonic|BB".
void append_f_tests(const std::string& metric, const std::vector<TrendSeries>& series,
                    double alpha, std::string& csv, std::vector<std::string>& warnings) {
  for (std::size_t i = 0; i < series.size(); ++i) {
    for (std::size_t j = i + 1; j < series.size(); ++j) {
      const auto& a = series[i];
      const auto& b = series[j];
      const auto rest_a = a.label.substr(a.label.find('|'));
      const auto rest_b = b.label.substr(b.label.find('|'));
      if (rest_a != rest_b) continue;  // compare only within the same cell
      try {
        const auto t = slope_f_test(a, b, alpha);
        csv += metric + ',' + a.label + ',' + b.label + ',' + format_sig(t.f_stat) + ',' +
               format_sig(t.p_value) + ',' + (t.same_slope ? "1" : "0") + '\n';
      } catch (const DataError& e) {
        warnings.push_back(metric + " " + a.label + " vs " + b.label + ": " + e.what());
      }
    }
  }
}

}  // namespace

int run_analyze(const AnalyzeOptions& options) {
  if (options.table.empty()) throw ConfigError("analyze: --table is required");
  const std::filesystem::path out_dir(options.out_dir);
  ensure_out_dir(out_dir);

  const ParameterTable table = read_table_csv(options.table);
  if (table.empty()) throw DataError("analyze: parameter table has no rows");

  Manifest manifest;
  manifest.command = "analyze";
  manifest.config = options;
  manifest.inputs = {options.table};

  const std::vector<std::string> sigma_groups{"experience", "activity", "muscle"};
  const auto sigma_series = aggregate(table, select_sigma_l(), sigma_groups);
  write_trend_csv(sigma_series, out_dir / "sigma_l_trend.csv");
  manifest.outputs.emplace_back("sigma_l_trend.csv");

  const auto lambda_series = aggregate(table, select_lambda_l(), sigma_groups);
  write_trend_csv(lambda_series, out_dir / "lambda_l_trend.csv");
  manifest.outputs.emplace_back("lambda_l_trend.csv");

  const auto pairing = pair_muscles(table);
  for (const auto& w : pairing.warnings) {
    std::fprintf(stderr, "emgfit: warning: %s\n", w.c_str());
    manifest.warnings.push_back(w);
  }

  std::string ftest_csv = "metric,group_a,group_b,f_stat,p_value,same_slope\n";
  append_f_tests("sigma_l", sigma_series, options.alpha, ftest_csv, manifest.warnings);

  if (!pairing.pairs.empty()) {
    const std::vector<std::string> pair_groups{"experience", "activity"};
    const auto rho_series = aggregate_pairs(
        pairing.pairs, [](const MusclePair& p) { return p.rho; }, pair_groups);
    write_trend_csv(rho_series, out_dir / "rho_l_trend.csv");
    manifest.outputs.emplace_back("rho_l_trend.csv");

    const auto gamma_series = aggregate_pairs(
        pairing.pairs, [](const MusclePair& p) { return p.gamma; }, pair_groups);
    write_trend_csv(gamma_series, out_dir / "gamma_l_trend.csv");
    manifest.outputs.emplace_back("gamma_l_trend.csv");

    append_f_tests("rho_l", rho_series, options.alpha, ftest_csv, manifest.warnings);
    append_f_tests("gamma_l", gamma_series, options.alpha, ftest_csv, manifest.warnings);
  } else {
    std::fprintf(stderr, "emgfit: warning: no BB/FCU pairs; rho/gamma trends skipped\n");
    manifest.warnings.emplace_back("no BB/FCU pairs; rho/gamma trends skipped");
  }

  {
    std::ofstream out(out_dir / "ftest_summary.csv", std::ios::binary);
    if (!out) throw DataError("analyze: cannot write ftest_summary.csv");
    out << ftest_csv;
  }
  manifest.outputs.emplace_back("ftest_summary.csv");

  write_manifest(manifest, out_dir);
  std::fprintf(stderr, "emgfit: analyzed %zu table row(s) into %s\n", table.size(),
               out_dir.string().c_str());
  return 0;
}

}  // namespace emgfit::cli

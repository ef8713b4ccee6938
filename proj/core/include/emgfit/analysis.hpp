#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "emgfit/models.hpp"
#include "emgfit/signal.hpp"

namespace emgfit {

struct ParamRow {
  TrialMetadata meta;
  ModelFamily family = ModelFamily::lgm;
  FitParams params;
  double loglik = 0.0;
  std::size_t n = 0;
  bool converged = true;
};

/// Per-trial fitted parameters joined with trial metadata. Rows are unique
/// on (subject, activity, muscle, weight, trial, family).
class ParameterTable {
 public:
  void add(ParamRow row);
  const std::vector<ParamRow>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }
  std::size_t size() const { return rows_.size(); }

 private:
  std::vector<ParamRow> rows_;
};

struct TrendPoint {
  double weight_kg = 0.0;
  double mean = 0.0;
  double stderr_mean = 0.0;  // 0 when n == 1
  int n = 0;
};

/// Mean value vs lifted weight for one metadata group, points sorted by weight.
struct TrendSeries {
  std::string label;
  std::vector<TrendPoint> points;
};

/// Extracts the value a trend aggregates; return nullopt to skip the row.
using ValueSelector = std::function<std::optional<double>(const ParamRow&)>;

ValueSelector select_sigma_l();   // Laplacian stddev of the LGM fit
ValueSelector select_lambda_l();  // Laplacian mixing weight of the LGM fit

/// Groups rows by the given metadata keys ("experience", "activity",
/// "muscle", "subject") and averages the selected value per weight cell.
std::vector<TrendSeries> aggregate(const ParameterTable& table, const ValueSelector& value,
                                   const std::vector<std::string>& group_by);

/// sqrt(sigma_bb^2 + sigma_fcu^2); its square is the Laplacian signal power.
double rho_l(double sigma_bb, double sigma_fcu);

/// sigma_bb / sigma_fcu; how signal power splits across the muscle sites.
double gamma_l(double sigma_bb, double sigma_fcu);

/// Per-trial BB/FCU pairing of LGM Laplacian stddevs (paired by subject,
/// activity, weight and trial index; unpaired trials are reported).
struct MusclePair {
  TrialMetadata meta;  // muscle field meaningless here
  double sigma_bb = 0.0;
  double sigma_fcu = 0.0;
  double rho = 0.0;
  double gamma = 0.0;
};

struct PairingResult {
  std::vector<MusclePair> pairs;
  std::vector<std::string> warnings;
};

PairingResult pair_muscles(const ParameterTable& table);

/// Builds trend series directly from paired per-trial values.
std::vector<TrendSeries> aggregate_pairs(const std::vector<MusclePair>& pairs,
                                         const std::function<double(const MusclePair&)>& value,
                                         const std::vector<std::string>& group_by);

struct SlopeFTest {
  double f_stat = 0.0;
  double p_value = 1.0;
  bool same_slope = true;
  int df_num = 1;
  int df_den = 0;
};

/// Extra-sum-of-squares F-test of slope equality between two trend series
/// (value regressed on weight, pooled-slope vs separate-slope models).
SlopeFTest slope_f_test(const TrendSeries& a, const TrendSeries& b, double alpha = 0.05);

void write_trend_csv(const std::vector<TrendSeries>& series, const std::filesystem::path& path);

void write_table_csv(const ParameterTable& table, const std::filesystem::path& path,
                     bool append = false);
ParameterTable read_table_csv(const std::filesystem::path& path);

}  // namespace emgfit

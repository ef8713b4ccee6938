#include "emgfit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "emgfit/error.hpp"
#include "emgfit/format.hpp"
#include "emgfit/special.hpp"

namespace emgfit {

namespace {

using RowKey = std::tuple<int, Activity, Muscle, double, int, ModelFamily>;

RowKey key_of(const ParamRow& r) {
  return {r.meta.subject_id, r.meta.activity, r.meta.muscle, r.meta.weight_kg,
          r.meta.trial_index, r.family};
}

std::string group_label(const TrialMetadata& meta, const std::vector<std::string>& keys) {
  std::string label;
  for (const auto& k : keys) {
    if (!label.empty()) label += '|';
    if (k == "experience") label += to_string(meta.experience);
    else if (k == "activity") label += to_string(meta.activity);
    else if (k == "muscle") label += to_string(meta.muscle);
    else if (k == "subject") label += "s" + std::to_string(meta.subject_id);
    else throw UsageError("aggregate: unknown group key '" + k + "'");
  }
  return label.empty() ? "all" : label;
}

struct Cell {
  double sum = 0.0;
  double sum_sq = 0.0;
  int n = 0;
};

std::vector<TrendSeries> cells_to_series(
    const std::map<std::string, std::map<double, Cell>>& groups) {
  std::vector<TrendSeries> out;
  for (const auto& [label, cells] : groups) {
    TrendSeries s;
    s.label = label;
    for (const auto& [weight, cell] : cells) {
      TrendPoint pt;
      pt.weight_kg = weight;
      pt.n = cell.n;
      pt.mean = cell.sum / cell.n;
      if (cell.n > 1) {
        const double var = std::max(0.0, (cell.sum_sq - cell.sum * cell.sum / cell.n) /
                                             (cell.n - 1));
        pt.stderr_mean = std::sqrt(var / cell.n);
      }
      s.points.push_back(pt);
    }
    out.push_back(std::move(s));
  }
  return out;
}

struct RegStats {
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  int n = 0;
};

RegStats regression_stats(const TrendSeries& s, const char* who) {
  std::vector<double> weights;
  for (const auto& pt : s.points) weights.push_back(pt.weight_kg);
  std::sort(weights.begin(), weights.end());
  weights.erase(std::unique(weights.begin(), weights.end()), weights.end());
  if (weights.size() < 3) {
    throw DataError(std::string(who) + ": series '" + s.label +
                    "' needs at least 3 distinct weights");
  }
  double wm = 0.0, ym = 0.0;
  for (const auto& pt : s.points) {
    wm += pt.weight_kg;
    ym += pt.mean;
  }
  const int n = static_cast<int>(s.points.size());
  wm /= n;
  ym /= n;
  RegStats r;
  r.n = n;
  for (const auto& pt : s.points) {
    const double dw = pt.weight_kg - wm;
    const double dy = pt.mean - ym;
    r.sxx += dw * dw;
    r.sxy += dw * dy;
    r.syy += dy * dy;
  }
  return r;
}

}  // namespace

void ParameterTable::add(ParamRow row) {
  const RowKey key = key_of(row);
  for (const auto& r : rows_) {
    if (key_of(r) == key) {
      throw DataError("ParameterTable: duplicate row for subject " +
                      std::to_string(row.meta.subject_id) + ", " +
                      to_string(row.meta.activity) + ", " + to_string(row.meta.muscle) +
                      ", weight " + format_sig(row.meta.weight_kg, 6) + ", trial " +
                      std::to_string(row.meta.trial_index) + ", family " +
                      to_string(row.family));
    }
  }
  rows_.push_back(std::move(row));
}

ValueSelector select_sigma_l() {
  return [](const ParamRow& r) -> std::optional<double> {
    if (r.family != ModelFamily::lgm) return std::nullopt;
    return std::get<LgmParams>(r.params).sigma1;
  };
}

ValueSelector select_lambda_l() {
  return [](const ParamRow& r) -> std::optional<double> {
    if (r.family != ModelFamily::lgm) return std::nullopt;
    return std::get<LgmParams>(r.params).lambda1;
  };
}

std::vector<TrendSeries> aggregate(const ParameterTable& table, const ValueSelector& value,
                                   const std::vector<std::string>& group_by) {
  if (table.empty()) throw DataError("aggregate: empty parameter table");
  std::map<std::string, std::map<double, Cell>> groups;
  for (const auto& row : table.rows()) {
    const auto v = value(row);
    if (!v) continue;
    auto& cell = groups[group_label(row.meta, group_by)][row.meta.weight_kg];
    cell.sum += *v;
    cell.sum_sq += *v * *v;
    ++cell.n;
  }
  if (groups.empty()) throw DataError("aggregate: selector matched no rows");
  return cells_to_series(groups);
}

double rho_l(double sigma_bb, double sigma_fcu) {
  if (sigma_bb < 0.0 || sigma_fcu < 0.0) {
    throw UsageError("rho_l: sigmas must be non-negative");
  }
  return std::hypot(sigma_bb, sigma_fcu);
}

double gamma_l(double sigma_bb, double sigma_fcu) {
  if (!(sigma_fcu > 0.0)) throw UsageError("gamma_l: sigma_fcu must be positive");
  return sigma_bb / sigma_fcu;
}

PairingResult pair_muscles(const ParameterTable& table) {
  struct Slot {
    TrialMetadata meta;
    std::optional<double> bb, fcu;
  };
  std::map<std::tuple<int, Activity, double, int>, Slot> slots;
  for (const auto& row : table.rows()) {
    if (row.family != ModelFamily::lgm) continue;
    const auto& p = std::get<LgmParams>(row.params);
    auto& slot = slots[{row.meta.subject_id, row.meta.activity, row.meta.weight_kg,
                        row.meta.trial_index}];
    slot.meta = row.meta;
    (row.meta.muscle == Muscle::bb ? slot.bb : slot.fcu) = p.sigma1;
  }

  PairingResult out;
  for (const auto& [key, slot] : slots) {
    if (slot.bb && slot.fcu) {
      MusclePair pair;
      pair.meta = slot.meta;
      pair.sigma_bb = *slot.bb;
      pair.sigma_fcu = *slot.fcu;
      pair.rho = rho_l(pair.sigma_bb, pair.sigma_fcu);
      pair.gamma = gamma_l(pair.sigma_bb, pair.sigma_fcu);
      out.pairs.push_back(pair);
    } else {
      out.warnings.push_back("unpaired trial: subject " +
                             std::to_string(slot.meta.subject_id) + ", " +
                             to_string(slot.meta.activity) + ", weight " +
                             format_sig(slot.meta.weight_kg, 6) + ", trial " +
                             std::to_string(slot.meta.trial_index) + " (missing " +
                             (slot.bb ? "FCU" : "BB") + ")");
    }
  }
  return out;
}

std::vector<TrendSeries> aggregate_pairs(const std::vector<MusclePair>& pairs,
                                         const std::function<double(const MusclePair&)>& value,
                                         const std::vector<std::string>& group_by) {
  if (pairs.empty()) throw DataError("aggregate_pairs: no paired trials");
  std::map<std::string, std::map<double, Cell>> groups;
  for (const auto& pair : pairs) {
    const double v = value(pair);
    auto& cell = groups[group_label(pair.meta, group_by)][pair.meta.weight_kg];
    cell.sum += v;
    cell.sum_sq += v * v;
    ++cell.n;
  }
  return cells_to_series(groups);
}

SlopeFTest slope_f_test(const TrendSeries& a, const TrendSeries& b, double alpha) {
  const RegStats ra = regression_stats(a, "slope_f_test");
  const RegStats rb = regression_stats(b, "slope_f_test");

  const double sse_a = ra.syy - ra.sxy * ra.sxy / ra.sxx;
  const double sse_b = rb.syy - rb.sxy * rb.sxy / rb.sxx;
  const double sse_full = std::max(0.0, sse_a) + std::max(0.0, sse_b);

  const double pooled_slope = (ra.sxy + rb.sxy) / (ra.sxx + rb.sxx);
  auto sse_with_slope = [](const RegStats& r, double slope) {
    return r.syy - 2.0 * slope * r.sxy + slope * slope * r.sxx;
  };
  const double sse_reduced = std::max(0.0, sse_with_slope(ra, pooled_slope)) +
                             std::max(0.0, sse_with_slope(rb, pooled_slope));

  SlopeFTest t;
  t.df_num = 1;
  t.df_den = ra.n + rb.n - 4;
  if (t.df_den < 1) throw DataError("slope_f_test: not enough points for residual dof");

  const double scale = std::max(ra.syy + rb.syy, 1e-300);
  if (sse_full <= 1e-12 * scale) {
    if (sse_reduced - sse_full <= 1e-12 * scale) {
      t.f_stat = 0.0;
      t.p_value = 1.0;
      t.same_slope = true;
      return t;
    }
    throw DataError("slope_f_test: zero residual variance");
  }

  t.f_stat = std::max(0.0, (sse_reduced - sse_full) / (sse_full / t.df_den));
  t.p_value = special::f_sf(t.f_stat, 1.0, static_cast<double>(t.df_den));
  t.same_slope = t.p_value >= alpha;
  return t;
}

void write_trend_csv(const std::vector<TrendSeries>& series, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("write_trend_csv: cannot open " + path.string());
  out << "group,weight_kg,mean,stderr,n\n";
  for (const auto& s : series) {
    for (const auto& pt : s.points) {
      out << s.label << ',' << format_sig(pt.weight_kg) << ',' << format_sig(pt.mean) << ','
          << format_sig(pt.stderr_mean) << ',' << pt.n << '\n';
    }
  }
}

namespace {

constexpr const char* kTableHeader =
    "subject,experience,activity,muscle,weight_kg,trial,family,"
    "lambda1,mu1,sigma1,mu2,sigma2,mu,sigma,scale,nu,loglik,n,converged";

std::string param_fields(const ParamRow& row) {
  // Column layout: lambda1,mu1,sigma1,mu2,sigma2 (LGM), mu,sigma (SG/SL,
  // mu shared with SM), scale,nu (SM); unused columns stay empty.
  std::string lgm_cols = ",,,,";
  std::string mu_sigma_cols = ",";
  std::string sm_cols = ",";
  switch (row.family) {
    case ModelFamily::lgm: {
      const auto& p = std::get<LgmParams>(row.params);
      lgm_cols = format_sig(p.lambda1) + ',' + format_sig(p.mu1) + ',' + format_sig(p.sigma1) +
                 ',' + format_sig(p.mu2) + ',' + format_sig(p.sigma2);
      break;
    }
    case ModelFamily::sg: {
      const auto& p = std::get<GaussianParams>(row.params);
      mu_sigma_cols = format_sig(p.mu) + ',' + format_sig(p.sigma);
      break;
    }
    case ModelFamily::sl: {
      const auto& p = std::get<LaplacianParams>(row.params);
      mu_sigma_cols = format_sig(p.mu) + ',' + format_sig(p.sigma);
      break;
    }
    case ModelFamily::sm: {
      const auto& p = std::get<ScaleMixtureParams>(row.params);
      mu_sigma_cols = format_sig(p.mu) + ',';
      sm_cols = format_sig(p.scale) + ',' + format_sig(p.nu);
      break;
    }
  }
  return lgm_cols + ',' + mu_sigma_cols + ',' + sm_cols;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double field_num(const std::vector<std::string>& f, std::size_t i, std::size_t line_no) {
  try {
    return std::stod(f.at(i));
  } catch (const std::exception&) {
    throw DataError("parameter table: bad numeric field at line " + std::to_string(line_no));
  }
}

}  // namespace

void write_table_csv(const ParameterTable& table, const std::filesystem::path& path,
                     bool append) {
  const bool exists = std::filesystem::exists(path) && std::filesystem::file_size(path) > 0;
  std::ofstream out(path, append ? (std::ios::binary | std::ios::app) : std::ios::binary);
  if (!out) throw DataError("write_table_csv: cannot open " + path.string());
  if (!append || !exists) out << kTableHeader << '\n';
  for (const auto& row : table.rows()) {
    out << row.meta.subject_id << ',' << to_string(row.meta.experience) << ','
        << to_string(row.meta.activity) << ',' << to_string(row.meta.muscle) << ','
        << format_sig(row.meta.weight_kg) << ',' << row.meta.trial_index << ','
        << to_string(row.family) << ',' << param_fields(row) << ',' << format_sig(row.loglik)
        << ',' << row.n << ',' << (row.converged ? 1 : 0) << '\n';
  }
}

ParameterTable read_table_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("read_table_csv: cannot open " + path.string());
  ParameterTable table;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() < 19) {
      throw DataError("parameter table: short row at line " + std::to_string(line_no));
    }
    ParamRow row;
    row.meta.subject_id = static_cast<int>(field_num(f, 0, line_no));
    row.meta.experience = parse_experience(f[1]);
    row.meta.activity = parse_activity(f[2]);
    row.meta.muscle = parse_muscle(f[3]);
    row.meta.weight_kg = field_num(f, 4, line_no);
    row.meta.trial_index = static_cast<int>(field_num(f, 5, line_no));
    row.family = parse_family(f[6]);
    switch (row.family) {
      case ModelFamily::lgm:
        row.params = LgmParams{field_num(f, 7, line_no), field_num(f, 8, line_no),
                               field_num(f, 9, line_no), field_num(f, 10, line_no),
                               field_num(f, 11, line_no)};
        break;
      case ModelFamily::sg:
        row.params = GaussianParams{field_num(f, 12, line_no), field_num(f, 13, line_no)};
        break;
      case ModelFamily::sl:
        row.params = LaplacianParams{field_num(f, 12, line_no), field_num(f, 13, line_no)};
        break;
      case ModelFamily::sm:
        row.params = ScaleMixtureParams{field_num(f, 12, line_no), field_num(f, 14, line_no),
                                        field_num(f, 15, line_no)};
        break;
    }
    row.loglik = field_num(f, 16, line_no);
    row.n = static_cast<std::size_t>(field_num(f, 17, line_no));
    row.converged = field_num(f, 18, line_no) != 0.0;
    table.add(std::move(row));
  }
  return table;
}

}  // namespace emgfit

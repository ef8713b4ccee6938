#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "emgfit/analysis.hpp"
#include "emgfit/error.hpp"
#include "emgfit/rng.hpp"
#include "test_util.hpp"

using namespace emgfit;

namespace {

ParamRow lgm_row(int subject, Experience exp, Activity act, Muscle muscle, double weight,
                 int trial, double sigma_l, double lambda_l = 0.6) {
  ParamRow row;
  row.meta = {subject, exp, weight, act, muscle, trial};
  row.family = ModelFamily::lgm;
  row.params = LgmParams{lambda_l, 0.0, sigma_l, 0.0, sigma_l * 2.5};
  row.loglik = -100.0;
  row.n = 1000;
  return row;
}

TrendSeries line_series(const std::string& label, double intercept, double slope,
                        double noise_sigma, std::uint64_t seed) {
  static const double weights[] = {0.0, 1.0, 2.5, 5.0, 6.0, 9.0, 10.0};
  Rng rng(seed);
  TrendSeries s;
  s.label = label;
  for (double w : weights) {
    TrendPoint pt;
    pt.weight_kg = w;
    pt.mean = intercept + slope * w + rng.normal(0.0, noise_sigma);
    pt.n = 1;
    s.points.push_back(pt);
  }
  return s;
}

}  // namespace

TEST_CASE("aggregate cell means and single-row behavior") {
  ParameterTable table;
  table.add(lgm_row(1, Experience::novice, Activity::isotonic, Muscle::bb, 5.0, 1, 1.0));
  auto series = aggregate(table, select_sigma_l(), {"experience"});
  REQUIRE(series.size() == 1);
  REQUIRE(series[0].points.size() == 1);
  CHECK(series[0].points[0].mean == doctest::Approx(1.0));
  CHECK(series[0].points[0].stderr_mean == 0.0);
  CHECK(series[0].points[0].n == 1);

  table.add(lgm_row(2, Experience::novice, Activity::isotonic, Muscle::bb, 5.0, 1, 3.0));
  series = aggregate(table, select_sigma_l(), {"experience"});
  CHECK(series[0].points[0].mean == doctest::Approx(2.0));
  CHECK(series[0].points[0].n == 2);
}

TEST_CASE("aggregate recovers constructed per-cell constants exactly") {
  ParameterTable table;
  const double values[2][3] = {{0.5, 1.0, 1.5}, {2.0, 2.5, 3.0}};
  const Experience exps[2] = {Experience::novice, Experience::trained};
  const double weights[3] = {0.0, 5.0, 10.0};
  for (int e = 0; e < 2; ++e) {
    for (int w = 0; w < 3; ++w) {
      for (int trial = 1; trial <= 3; ++trial) {
        table.add(lgm_row(e + 1, exps[e], Activity::isotonic, Muscle::bb, weights[w], trial,
                          values[e][w]));
      }
    }
  }
  const auto series = aggregate(table, select_sigma_l(), {"experience"});
  REQUIRE(series.size() == 2);
  for (const auto& s : series) {
    REQUIRE(s.points.size() == 3);
    const int e = s.label == "novice" ? 0 : 1;
    for (int w = 0; w < 3; ++w) {
      CHECK(s.points[w].weight_kg == weights[w]);
      CHECK(s.points[w].mean == doctest::Approx(values[e][w]).epsilon(1e-14));
      CHECK(s.points[w].stderr_mean == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("aggregate commutes with filtering on disjoint keys") {
  ParameterTable table;
  int subject = 0;
  for (auto act : {Activity::isotonic, Activity::isometric}) {
    for (int trial = 1; trial <= 4; ++trial) {
      table.add(lgm_row(++subject % 3 + 1, Experience::novice, act, Muscle::bb, 5.0, trial,
                        0.5 + 0.1 * trial));
    }
  }
  const auto joint = aggregate(table, select_sigma_l(), {"activity"});
  // Filter rows to one activity, then aggregate with no grouping.
  ParameterTable isotonic_only;
  for (const auto& row : table.rows()) {
    if (row.meta.activity == Activity::isotonic) isotonic_only.add(row);
  }
  const auto filtered = aggregate(isotonic_only, select_sigma_l(), {});
  const auto& joint_iso = *std::find_if(joint.begin(), joint.end(),
                                        [](const auto& s) { return s.label == "isotonic"; });
  REQUIRE(filtered.size() == 1);
  CHECK(filtered[0].points[0].mean == doctest::Approx(joint_iso.points[0].mean).epsilon(1e-14));
}

TEST_CASE("duplicate table keys are rejected") {
  ParameterTable table;
  table.add(lgm_row(1, Experience::novice, Activity::isotonic, Muscle::bb, 5.0, 1, 1.0));
  CHECK_THROWS_AS(
      table.add(lgm_row(1, Experience::novice, Activity::isotonic, Muscle::bb, 5.0, 1, 2.0)),
      DataError);
  CHECK_THROWS_AS(aggregate(ParameterTable{}, select_sigma_l(), {}), DataError);
}

TEST_CASE("rho_l analytic values and homogeneity") {
  CHECK(rho_l(3.0, 4.0) == 5.0);
  CHECK(rho_l(0.0, 0.0) == 0.0);
  CHECK(rho_l(1.0, 1.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(rho_l(-1.0, 2.0), UsageError);

  Rng rng(37);
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform(0.0, 5.0);
    const double b = rng.uniform(0.0, 5.0);
    const double c = rng.uniform(0.0, 3.0);
    CHECK(rho_l(a, b) == doctest::Approx(rho_l(b, a)).epsilon(1e-15));
    CHECK(rho_l(c * a, c * b) == doctest::Approx(c * rho_l(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("gamma_l ratio and scale invariance") {
  CHECK(gamma_l(2.0, 2.0) == 1.0);
  CHECK(gamma_l(2.0, 1.0) == 2.0);
  CHECK_THROWS_AS(gamma_l(1.0, 0.0), UsageError);

  Rng rng(41);
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform(0.1, 5.0);
    const double b = rng.uniform(0.1, 5.0);
    const double c = rng.uniform(0.1, 10.0);
    CHECK(std::abs(gamma_l(c * a, c * b) - gamma_l(a, b)) <=
          1e-12 * std::abs(gamma_l(a, b)));
  }
}

TEST_CASE("pair_muscles joins BB and FCU rows and flags unpaired trials") {
  ParameterTable table;
  table.add(lgm_row(1, Experience::novice, Activity::isotonic, Muscle::bb, 5.0, 1, 3.0));
  table.add(lgm_row(1, Experience::novice, Activity::isotonic, Muscle::fcu, 5.0, 1, 4.0));
  table.add(lgm_row(1, Experience::novice, Activity::isotonic, Muscle::bb, 5.0, 2, 2.0));

  const auto result = pair_muscles(table);
  REQUIRE(result.pairs.size() == 1);
  CHECK(result.pairs[0].rho == doctest::Approx(5.0));
  CHECK(result.pairs[0].gamma == doctest::Approx(0.75));
  REQUIRE(result.warnings.size() == 1);
  CHECK(result.warnings[0].find("trial 2") != std::string::npos);
}

TEST_CASE("slope_f_test keeps equal slopes and rejects distinct ones") {
  const auto a = line_series("a", 0.0, 1.0, 0.01, 1);
  const auto b = line_series("b", 0.2, 1.0, 0.01, 2);
  const auto same = slope_f_test(a, b);
  CHECK(same.same_slope);

  const auto c = line_series("c", 0.0, 3.0, 0.1, 3);
  const auto diff = slope_f_test(a, c);
  CHECK_FALSE(diff.same_slope);
  CHECK(diff.p_value < 0.05);

  // identical series: zero F, same slope
  const auto self = slope_f_test(a, a);
  CHECK(self.f_stat == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(self.same_slope);

  TrendSeries tiny;
  tiny.label = "tiny";
  tiny.points = {{0.0, 0.0, 0.0, 1}, {1.0, 1.0, 0.0, 1}};
  CHECK_THROWS_AS(slope_f_test(tiny, a), DataError);

  // perfect lines with different slopes: zero residual variance
  const auto pa = line_series("pa", 0.0, 1.0, 0.0, 4);
  const auto pb = line_series("pb", 0.0, 2.0, 0.0, 5);
  CHECK_THROWS_AS(slope_f_test(pa, pb), DataError);
}

TEST_CASE("slope_f_test rejection rate on distinct slopes") {
  int reject = 0, accept_same = 0;
  for (int seed = 0; seed < 40; ++seed) {
    const auto a = line_series("a", 0.0, 1.0, 0.1, 100 + seed);
    const auto b = line_series("b", 0.0, 3.0, 0.1, 200 + seed);
    if (!slope_f_test(a, b).same_slope) ++reject;
    const auto c = line_series("c", 0.5, 2.0, 0.1, 300 + seed);
    const auto d = line_series("d", 0.0, 2.0, 0.1, 400 + seed);
    if (slope_f_test(c, d).same_slope) ++accept_same;
  }
  CHECK(reject >= 39);
  CHECK(accept_same >= 34);
}

TEST_CASE("trend recovers monotone means from a weight-graded table") {
  ParameterTable table;
  const double slopes[3] = {0.05, 0.10, 0.15};
  const Experience exps[3] = {Experience::novice, Experience::intermediate, Experience::trained};
  Rng rng(71);
  for (int e = 0; e < 3; ++e) {
    for (double w : {0.0, 1.0, 2.5, 5.0, 6.0, 9.0, 10.0}) {
      for (int trial = 1; trial <= 3; ++trial) {
        const double sigma = 0.3 + slopes[e] * w + rng.normal(0.0, 0.005);
        table.add(lgm_row(e + 1, exps[e], Activity::isotonic, Muscle::bb, w, trial, sigma));
      }
    }
  }
  const auto series = aggregate(table, select_sigma_l(), {"experience"});
  REQUIRE(series.size() == 3);
  for (const auto& s : series) {
    for (std::size_t i = 1; i < s.points.size(); ++i) {
      CHECK(s.points[i].mean > s.points[i - 1].mean);  // rank correlation 1.0
    }
  }
}

TEST_CASE("parameter table CSV round trip") {
  ParameterTable table;
  table.add(lgm_row(1, Experience::trained, Activity::isometric, Muscle::fcu, 2.5, 3, 1.25, 0.7));
  ParamRow sg_row;
  sg_row.meta = {2, Experience::novice, 5.0, Activity::isotonic, Muscle::bb, 1};
  sg_row.family = ModelFamily::sg;
  sg_row.params = GaussianParams{0.1, 2.0};
  sg_row.loglik = -55.5;
  sg_row.n = 512;
  table.add(sg_row);
  ParamRow sm_row = sg_row;
  sm_row.family = ModelFamily::sm;
  sm_row.params = ScaleMixtureParams{0.05, 1.5, 7.5};
  table.add(sm_row);

  const auto path = std::filesystem::temp_directory_path() / "emgfit_table_test.csv";
  write_table_csv(table, path);
  const auto back = read_table_csv(path);
  REQUIRE(back.size() == 3);
  CHECK(std::get<LgmParams>(back.rows()[0].params).sigma1 == doctest::Approx(1.25));
  CHECK(back.rows()[0].meta.trial_index == 3);
  CHECK(std::get<GaussianParams>(back.rows()[1].params).sigma == doctest::Approx(2.0));
  CHECK(std::get<ScaleMixtureParams>(back.rows()[2].params).nu == doctest::Approx(7.5));
  std::filesystem::remove(path);
}

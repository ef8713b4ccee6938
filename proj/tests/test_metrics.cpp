#include <doctest.h>

#include <cmath>

#include "emgfit/error.hpp"
#include "emgfit/histogram.hpp"
#include "emgfit/metrics.hpp"
#include "emgfit/synth.hpp"
#include "test_util.hpp"

using namespace emgfit;

TEST_CASE("kl_divergence analytic cases") {
  const std::vector<double> half{0.5, 0.5};
  CHECK(kl_divergence(half, half) == doctest::Approx(0.0));

  const std::vector<double> point{1.0, 0.0};
  CHECK(kl_divergence(point, half) == doctest::Approx(std::log(2.0)).epsilon(1e-9));

  CHECK_THROWS_AS(kl_divergence(half, {std::vector<double>{1.0}}), UsageError);
}

TEST_CASE("kl_divergence of discretized N(0,1) vs N(0,2) matches closed form") {
  std::vector<double> edges;
  for (int i = 0; i <= 400; ++i) edges.push_back(-10.0 + 20.0 * i / 400.0);
  const auto p1 = bin_model([](double z) { return normal_pdf(z, 0.0, 1.0); }, edges);
  const auto p2 = bin_model([](double z) { return normal_pdf(z, 0.0, 2.0); }, edges);
  // ln 2 + 1/8 - 1/2
  CHECK(kl_divergence(p1, p2) == doctest::Approx(0.3181471805599453).epsilon(0.01 / 0.318));
}

TEST_CASE("kl_divergence is non-negative and asymmetric on random simplexes") {
  Rng rng(23);
  int asymmetric = 0;
  for (int run = 0; run < 100; ++run) {
    const auto p = testutil::random_simplex(rng, 8);
    const auto q = testutil::random_simplex(rng, 8);
    const double pq = kl_divergence(p, q);
    const double qp = kl_divergence(q, p);
    CHECK(pq >= 0.0);
    CHECK(qp >= 0.0);
    if (std::abs(pq - qp) > 1e-9) ++asymmetric;
    CHECK(kl_divergence(p, p) == doctest::Approx(0.0));
  }
  CHECK(asymmetric == 100);
}

TEST_CASE("area_difference analytic cases and metric properties") {
  const std::vector<double> a{0.6, 0.4};
  const std::vector<double> b{0.5, 0.5};
  CHECK(area_difference(a, b) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(area_difference(a, a) == doctest::Approx(0.0));
  CHECK(area_difference({std::vector<double>{1.0, 0.0}}, {std::vector<double>{0.0, 1.0}}) ==
        doctest::Approx(2.0));

  Rng rng(29);
  for (int run = 0; run < 100; ++run) {
    const auto p = testutil::random_simplex(rng, 6);
    const auto q = testutil::random_simplex(rng, 6);
    const auto r = testutil::random_simplex(rng, 6);
    CHECK(area_difference(p, q) == doctest::Approx(area_difference(q, p)).epsilon(1e-12));
    CHECK(area_difference(p, r) <= area_difference(p, q) + area_difference(q, r) + 1e-12);
    // AD equals twice the total-variation distance (sum of positive parts).
    double tv = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) tv += std::max(p[i] - q[i], 0.0);
    CHECK(std::abs(area_difference(p, q) - 2.0 * tv) <= 1e-12);
  }
}

TEST_CASE("chi_square_sf reference values") {
  CHECK(chi_square_sf(0.0, 3) == doctest::Approx(1.0));
  // df=2 closed form: sf = exp(-x/2); x = 2 ln 20 gives exactly 0.05.
  CHECK(chi_square_sf(2.0 * std::log(20.0), 2) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(chi_square_sf(7.815, 3) == doctest::Approx(0.05).epsilon(5e-4 / 0.05));
  CHECK(chi_square_sf(7.815, 3) == doctest::Approx(0.049993902974883875).epsilon(1e-10));
  CHECK_THROWS_AS(chi_square_sf(1.0, 0), UsageError);
  CHECK_THROWS_AS(chi_square_sf(-1.0, 2), UsageError);
}

TEST_CASE("chi_square_sf against Simpson integration of the density") {
  for (const int df : {1, 2, 3, 5, 10}) {
    for (const double x : {0.5, 2.0, 7.815, 15.0}) {
      const double a = df / 2.0;
      const auto pdf = [a](double t) {
        return std::exp((a - 1.0) * std::log(t) - t / 2.0 - a * std::log(2.0) - std::lgamma(a));
      };
      const double upper = x + 80.0 + 10.0 * df;
      const double oracle = testutil::simpson(pdf, x, upper, 6000);
      CHECK(chi_square_sf(x, df) == doctest::Approx(oracle).epsilon(1e-7));
    }
  }
}

TEST_CASE("likelihood_ratio_test on LGM-generated data rejects the Gaussian null") {
  const auto z = sample_lgm({0.7, 0.0, 1.0, 0.0, 3.0}, 100'000, 4242);
  EmConfig cfg;
  cfg.zero_mean = true;
  const auto alt = fit_lgm_em(z, cfg);
  const auto null_fit = fit_gaussian_mle(z, true);
  const auto lrt = likelihood_ratio_test(null_fit, alt, z);
  CHECK(lrt.df == 2);  // zero-mean mode: 3 free vs 1
  CHECK(lrt.statistic > 100.0);
  CHECK(lrt.p_value < 1e-6);
  CHECK(lrt.reject_null_at_05);
}

TEST_CASE("likelihood_ratio_test dof convention and contract errors") {
  const auto z = sample_lgm({0.6, 0.0, 1.0, 0.0, 2.5}, 5000, 11);
  const auto alt = fit_lgm_em(z, {});
  const auto null_sg = fit_gaussian_mle(z);
  const auto lrt = likelihood_ratio_test(null_sg, alt, z);
  CHECK(lrt.df == 3);  // five free LGM parameters vs two

  // statistic == 0 gives p == 1 regardless of dof.
  FitResult a = alt, b = alt;
  b.family = ModelFamily::sg;
  b.params = GaussianParams{0.0, 1.0};
  b.loglik = a.loglik;
  CHECK(likelihood_ratio_test(b, a, z).p_value == doctest::Approx(1.0));

  // mismatched sample counts are a usage error
  FitResult short_null = null_sg;
  short_null.n = 17;
  CHECK_THROWS_AS(likelihood_ratio_test(short_null, alt, z), UsageError);

  // alternative must be LGM, null must be standalone
  CHECK_THROWS_AS(likelihood_ratio_test(null_sg, null_sg, z), UsageError);
  CHECK_THROWS_AS(likelihood_ratio_test(alt, alt, z), UsageError);

  // a null fit beating the alternative beyond slack is a fit-quality error
  FitResult bad_alt = alt;
  bad_alt.loglik = null_sg.loglik - 1.0;
  CHECK_THROWS_AS(likelihood_ratio_test(null_sg, bad_alt, z), FitError);
}

TEST_CASE("lrt statistic of 7.815 at df=3 sits at the 5% threshold") {
  FitResult alt;
  alt.family = ModelFamily::lgm;
  alt.params = LgmParams{};
  alt.loglik = 7.815 / 2.0;
  alt.n = 100;
  FitResult null_fit;
  null_fit.family = ModelFamily::sg;
  null_fit.params = GaussianParams{};
  null_fit.loglik = 0.0;
  null_fit.n = 100;
  const std::vector<double> z(100, 0.0);
  const auto lrt = likelihood_ratio_test(null_fit, alt, z);
  CHECK(lrt.statistic == doctest::Approx(7.815));
  CHECK(lrt.p_value == doctest::Approx(0.05).epsilon(5e-4 / 0.05));
}

TEST_CASE("binned model against itself gives zero divergence and area difference") {
  std::vector<double> edges;
  for (int i = 0; i <= 50; ++i) edges.push_back(-5.0 + 10.0 * i / 50.0);
  const auto p = bin_model([](double z) { return lgm_pdf(z, {0.6, 0.0, 1.0, 0.0, 2.0}); }, edges);
  CHECK(kl_divergence(p, p) == doctest::Approx(0.0));
  CHECK(area_difference(p, p) == doctest::Approx(0.0));
}

#include "emgfit/metrics.hpp"

#include <cmath>
#include <vector>

#include "emgfit/error.hpp"
#include "emgfit/special.hpp"

namespace emgfit {

namespace {

constexpr double kMassFloor = 1e-12;
constexpr double kSumTol = 1e-9;
constexpr double kNegativeStatSlack = 1e-6;

void check_mass_vector(std::span<const double> p, const char* who) {
  double sum = 0.0;
  for (double v : p) {
    if (v < 0.0) throw UsageError(std::string(who) + ": negative mass entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSumTol) {
    throw UsageError(std::string(who) + ": masses must sum to 1 within 1e-9");
  }
}

std::vector<double> floored(std::span<const double> p) {
  std::vector<double> out(p.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    out[i] = std::max(p[i], kMassFloor);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

}  // namespace

double kl_divergence(std::span<const double> p1, std::span<const double> p2) {
  if (p1.size() != p2.size()) throw UsageError("kl_divergence: length mismatch");
  check_mass_vector(p1, "kl_divergence");
  check_mass_vector(p2, "kl_divergence");
  const auto q1 = floored(p1);
  const auto q2 = floored(p2);
  double acc = 0.0;
  for (std::size_t i = 0; i < q1.size(); ++i) {
    acc += q1[i] * std::log(q1[i] / q2[i]);
  }
  return std::max(acc, 0.0);
}

double area_difference(std::span<const double> e, std::span<const double> p) {
  if (e.size() != p.size()) throw UsageError("area_difference: length mismatch");
  check_mass_vector(e, "area_difference");
  check_mass_vector(p, "area_difference");
  double acc = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) acc += std::abs(e[i] - p[i]);
  return acc;
}

double chi_square_sf(double x, int df) {
  if (df <= 0) throw UsageError("chi_square_sf: df must be positive");
  if (x < 0.0) throw UsageError("chi_square_sf: x must be non-negative");
  return special::gamma_q(0.5 * static_cast<double>(df), 0.5 * x);
}

LrtResult likelihood_ratio_test(const FitResult& null_fit, const FitResult& alt_fit,
                                std::span<const double> samples) {
  if (alt_fit.family != ModelFamily::lgm) {
    throw UsageError("likelihood_ratio_test: alternative must be the LGM fit");
  }
  if (null_fit.family != ModelFamily::sg && null_fit.family != ModelFamily::sl) {
    throw UsageError("likelihood_ratio_test: null must be SG or SL");
  }
  if (null_fit.n != alt_fit.n || null_fit.n != samples.size()) {
    throw UsageError("likelihood_ratio_test: fits were not made on the same sample set");
  }
  if (null_fit.zero_mean != alt_fit.zero_mean) {
    throw UsageError("likelihood_ratio_test: fits mix zero-mean modes");
  }

  LrtResult r;
  r.statistic = 2.0 * (alt_fit.loglik - null_fit.loglik);
  if (r.statistic < -kNegativeStatSlack) {
    throw FitError("likelihood_ratio_test: alternative fit worse than null; "
                   "refit with more restarts");
  }
  r.df = alt_fit.free_parameter_count() - null_fit.free_parameter_count();
  r.p_value = chi_square_sf(std::max(r.statistic, 0.0), r.df);
  r.reject_null_at_05 = r.p_value < 0.05;
  return r;
}

}  // namespace emgfit

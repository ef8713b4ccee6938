#pragma once

#include <span>

#include "emgfit/models.hpp"

namespace emgfit {

/// KL divergence sum_l p1(l) ln(p1(l)/p2(l)) over binned masses, in nats.
/// Both vectors are floored at 1e-12 and renormalized so empty bins stay on
/// a shared support. Inputs must each sum to 1 within 1e-9.
double kl_divergence(std::span<const double> p1, std::span<const double> p2);

/// Area difference sum_l |E(l) - P(l)|; equals twice the total-variation
/// distance, so the range is [0, 2].
double area_difference(std::span<const double> e, std::span<const double> p);

/// Upper-tail chi-square probability via the regularized incomplete gamma.
double chi_square_sf(double x, int df);

struct LrtResult {
  double statistic = 0.0;  // 2 * (loglik_alt - loglik_null), nats
  int df = 0;
  double p_value = 1.0;
  bool reject_null_at_05 = false;
};

/// Likelihood-ratio test of a standalone null (SG or SL) against the LGM
/// alternative fitted on the same samples.
LrtResult likelihood_ratio_test(const FitResult& null_fit, const FitResult& alt_fit,
                                std::span<const double> samples);

}  // namespace emgfit

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace emgfit {

enum class ModelFamily { lgm, sg, sl, sm };

const char* to_string(ModelFamily f);
ModelFamily parse_family(const std::string& s);

/// Laplacian-Gaussian mixture. Both components are parameterized by their
/// standard deviation; the Laplacian scale b = sigma1 / sqrt(2) is internal.
struct LgmParams {
  double lambda1 = 0.5;  // Laplacian mixing weight; lambda2 = 1 - lambda1
  double mu1 = 0.0;
  double sigma1 = 1.0;
  double mu2 = 0.0;
  double sigma2 = 1.0;

  double lambda2() const { return 1.0 - lambda1; }
  void validate() const;
};

struct GaussianParams {
  double mu = 0.0;
  double sigma = 1.0;
  void validate() const;
};

struct LaplacianParams {
  double mu = 0.0;
  double sigma = 1.0;  // standard deviation; scale b = sigma / sqrt(2)
  double scale_b() const;
  void validate() const;
};

/// Gaussian with inverse-gamma random variance, i.e. Student-t marginal.
struct ScaleMixtureParams {
  double mu = 0.0;
  double scale = 1.0;
  double nu = 10.0;  // degrees of freedom
  void validate() const;
};

using FitParams = std::variant<LgmParams, GaussianParams, LaplacianParams, ScaleMixtureParams>;

struct EmConfig {
  double tol = 1e-8;   // relative log-likelihood change
  int max_iter = 500;
  int n_restarts = 3;
  bool zero_mean = false;
  std::uint64_t seed = 0;  // drives sigma jitter for restarts beyond the fixed set
};

struct FitResult {
  ModelFamily family = ModelFamily::sg;
  FitParams params;
  double loglik = 0.0;  // nats
  std::vector<double> loglik_trace;
  int iterations = 0;
  bool converged = false;
  std::size_t n = 0;
  bool zero_mean = false;
  std::uint64_t seed = 0;

  const LgmParams& lgm() const;
  const GaussianParams& gaussian() const;
  const LaplacianParams& laplacian() const;
  const ScaleMixtureParams& scale_mixture() const;

  /// Free parameters of the fitted family under the fit's mean mode;
  /// used by the likelihood-ratio test dof convention.
  int free_parameter_count() const;
};

// Scalar densities (valid params assumed).
double normal_pdf(double z, double mu, double sigma);
double normal_logpdf(double z, double mu, double sigma);
double laplace_pdf(double z, double mu, double scale_b);
double laplace_logpdf(double z, double mu, double scale_b);

double lgm_pdf(double z, const LgmParams& p);
double lgm_logpdf(double z, const LgmParams& p);
double gaussian_pdf(double z, const GaussianParams& p);
double laplacian_pdf(double z, const LaplacianParams& p);
double sm_pdf(double z, const ScaleMixtureParams& p);
double sm_logpdf(double z, const ScaleMixtureParams& p);

/// Density of any fitted parameter set at z.
double model_pdf(double z, const FitParams& params);
double model_logpdf(double z, const FitParams& params);

/// Points where the density is not smooth (Laplacian locations); quadrature
/// over bins should split there.
std::vector<double> density_breakpoints(const FitParams& params);

/// Maximum-likelihood fits. The EM fitters return the best of
/// cfg.n_restarts runs plus the two standalone boundary candidates
/// (lambda1 = 0 and lambda1 = 1), judged by final log-likelihood.
FitResult fit_lgm_em(std::span<const double> samples, const EmConfig& cfg = {});
FitResult fit_sm_em(std::span<const double> samples, const EmConfig& cfg = {});
FitResult fit_gaussian_mle(std::span<const double> samples, bool zero_mean = false);
FitResult fit_laplacian_mle(std::span<const double> samples, bool zero_mean = false);

/// Sum of per-sample log densities under the fitted model.
double log_likelihood(std::span<const double> samples, const FitResult& fit);

// Robust helpers shared by fitters and the histogram grid.
double median_of(std::span<const double> samples);
double mad_sigma(std::span<const double> samples);  // 1.4826 * MAD, stddev fallback

}  // namespace emgfit

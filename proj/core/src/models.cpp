#include "emgfit/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "emgfit/error.hpp"
#include "emgfit/rng.hpp"
#include "emgfit/special.hpp"

namespace emgfit {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)
constexpr double kLambdaClamp = 1e-10;
constexpr double kNuMin = 1e-2;
constexpr double kNuMax = 1e6;

double softplus_of(double t, double e_abs) {
  // log1p(exp(t)) given e_abs = exp(-|t|).
  return t > 0.0 ? t + std::log1p(e_abs) : std::log1p(e_abs);
}

void require_samples(std::span<const double> samples, std::size_t min_n, const char* who) {
  if (samples.size() < min_n) {
    throw DataError(std::string(who) + ": needs at least " + std::to_string(min_n) + " samples");
  }
  const double first = samples.front();
  const bool distinct = std::any_of(samples.begin(), samples.end(),
                                    [&](double z) { return z != first; });
  if (!distinct) {
    throw DataError(std::string(who) + ": degenerate samples (all values identical)");
  }
}

double mean_of(std::span<const double> samples) {
  double acc = 0.0;
  for (double z : samples) acc += z;
  return acc / static_cast<double>(samples.size());
}

}  // namespace

const char* to_string(ModelFamily f) {
  switch (f) {
    case ModelFamily::lgm: return "lgm";
    case ModelFamily::sg: return "sg";
    case ModelFamily::sl: return "sl";
    case ModelFamily::sm: return "sm";
  }
  return "sg";
}

ModelFamily parse_family(const std::string& s) {
  if (s == "lgm") return ModelFamily::lgm;
  if (s == "sg") return ModelFamily::sg;
  if (s == "sl") return ModelFamily::sl;
  if (s == "sm") return ModelFamily::sm;
  throw ConfigError("unknown model family: '" + s + "'");
}

void LgmParams::validate() const {
  if (!(lambda1 >= 0.0 && lambda1 <= 1.0)) throw UsageError("LgmParams: lambda1 outside [0, 1]");
  if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) throw UsageError("LgmParams: sigmas must be positive");
}

void GaussianParams::validate() const {
  if (!(sigma > 0.0)) throw UsageError("GaussianParams: sigma must be positive");
}

double LaplacianParams::scale_b() const { return sigma / kSqrt2; }

void LaplacianParams::validate() const {
  if (!(sigma > 0.0)) throw UsageError("LaplacianParams: sigma must be positive");
}

void ScaleMixtureParams::validate() const {
  if (!(scale > 0.0) || !(nu > 0.0)) throw UsageError("ScaleMixtureParams: scale and nu must be positive");
}

const LgmParams& FitResult::lgm() const {
  if (family != ModelFamily::lgm) throw UsageError("FitResult: not an LGM fit");
  return std::get<LgmParams>(params);
}
const GaussianParams& FitResult::gaussian() const {
  if (family != ModelFamily::sg) throw UsageError("FitResult: not a Gaussian fit");
  return std::get<GaussianParams>(params);
}
const LaplacianParams& FitResult::laplacian() const {
  if (family != ModelFamily::sl) throw UsageError("FitResult: not a Laplacian fit");
  return std::get<LaplacianParams>(params);
}
const ScaleMixtureParams& FitResult::scale_mixture() const {
  if (family != ModelFamily::sm) throw UsageError("FitResult: not a scale-mixture fit");
  return std::get<ScaleMixtureParams>(params);
}

int FitResult::free_parameter_count() const {
  switch (family) {
    case ModelFamily::lgm: return zero_mean ? 3 : 5;
    case ModelFamily::sg:
    case ModelFamily::sl: return zero_mean ? 1 : 2;
    case ModelFamily::sm: return zero_mean ? 2 : 3;
  }
  return 0;
}

double normal_pdf(double z, double mu, double sigma) {
  const double d = (z - mu) / sigma;
  return std::exp(-0.5 * d * d) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

double normal_logpdf(double z, double mu, double sigma) {
  const double d = (z - mu) / sigma;
  return -0.5 * (kLog2Pi + d * d) - std::log(sigma);
}

double laplace_pdf(double z, double mu, double scale_b) {
  return std::exp(-std::abs(z - mu) / scale_b) / (2.0 * scale_b);
}

double laplace_logpdf(double z, double mu, double scale_b) {
  return -std::abs(z - mu) / scale_b - std::log(2.0 * scale_b);
}

double lgm_pdf(double z, const LgmParams& p) {
  const double b = p.sigma1 / kSqrt2;
  double acc = 0.0;
  if (p.lambda1 > 0.0) acc += p.lambda1 * laplace_pdf(z, p.mu1, b);
  if (p.lambda1 < 1.0) acc += p.lambda2() * normal_pdf(z, p.mu2, p.sigma2);
  return acc;
}

double lgm_logpdf(double z, const LgmParams& p) {
  const double b = p.sigma1 / kSqrt2;
  if (p.lambda1 <= 0.0) return normal_logpdf(z, p.mu2, p.sigma2);
  if (p.lambda1 >= 1.0) return laplace_logpdf(z, p.mu1, b);
  const double l1 = std::log(p.lambda1) + laplace_logpdf(z, p.mu1, b);
  const double l2 = std::log(p.lambda2()) + normal_logpdf(z, p.mu2, p.sigma2);
  const double t = l2 - l1;
  return l1 + softplus_of(t, std::exp(-std::abs(t)));
}

double gaussian_pdf(double z, const GaussianParams& p) { return normal_pdf(z, p.mu, p.sigma); }

double laplacian_pdf(double z, const LaplacianParams& p) {
  return laplace_pdf(z, p.mu, p.scale_b());
}

double sm_logpdf(double z, const ScaleMixtureParams& p) {
  const double d = (z - p.mu) / p.scale;
  return std::lgamma(0.5 * (p.nu + 1.0)) - std::lgamma(0.5 * p.nu) -
         0.5 * std::log(p.nu * std::numbers::pi) - std::log(p.scale) -
         0.5 * (p.nu + 1.0) * std::log1p(d * d / p.nu);
}

double sm_pdf(double z, const ScaleMixtureParams& p) { return std::exp(sm_logpdf(z, p)); }

double model_pdf(double z, const FitParams& params) {
  return std::visit([z](const auto& p) -> double {
    using T = std::decay_t<decltype(p)>;
    if constexpr (std::is_same_v<T, LgmParams>) return lgm_pdf(z, p);
    else if constexpr (std::is_same_v<T, GaussianParams>) return gaussian_pdf(z, p);
    else if constexpr (std::is_same_v<T, LaplacianParams>) return laplacian_pdf(z, p);
    else return sm_pdf(z, p);
  }, params);
}

double model_logpdf(double z, const FitParams& params) {
  return std::visit([z](const auto& p) -> double {
    using T = std::decay_t<decltype(p)>;
    if constexpr (std::is_same_v<T, LgmParams>) return lgm_logpdf(z, p);
    else if constexpr (std::is_same_v<T, GaussianParams>) return normal_logpdf(z, p.mu, p.sigma);
    else if constexpr (std::is_same_v<T, LaplacianParams>) return laplace_logpdf(z, p.mu, p.scale_b());
    else return sm_logpdf(z, p);
  }, params);
}

std::vector<double> density_breakpoints(const FitParams& params) {
  if (const auto* lgm = std::get_if<LgmParams>(&params)) {
    return lgm->lambda1 > 0.0 ? std::vector<double>{lgm->mu1} : std::vector<double>{};
  }
  if (const auto* lap = std::get_if<LaplacianParams>(&params)) return {lap->mu};
  return {};
}

double median_of(std::span<const double> samples) {
  std::vector<double> buf(samples.begin(), samples.end());
  const std::size_t n = buf.size();
  const std::size_t mid = n / 2;
  std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(mid), buf.end());
  const double hi = buf[mid];
  if (n % 2 == 1) return hi;
  const double lo = *std::max_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

double mad_sigma(std::span<const double> samples) {
  const double med = median_of(samples);
  std::vector<double> dev(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) dev[i] = std::abs(samples[i] - med);
  const double mad = median_of(dev);
  if (mad > 0.0) return 1.4826 * mad;
  // More than half the samples sit on the median; fall back to the stddev.
  const double mean = mean_of(samples);
  double acc = 0.0;
  for (double z : samples) acc += (z - mean) * (z - mean);
  return std::sqrt(acc / static_cast<double>(samples.size()));
}

FitResult fit_gaussian_mle(std::span<const double> samples, bool zero_mean) {
  require_samples(samples, 2, "fit_gaussian_mle");
  const std::size_t n = samples.size();
  const double mu = zero_mean ? 0.0 : mean_of(samples);
  double acc = 0.0;
  for (double z : samples) acc += (z - mu) * (z - mu);
  const double sigma = std::sqrt(acc / static_cast<double>(n));
  if (!(sigma > 0.0)) throw DataError("fit_gaussian_mle: zero variance");

  FitResult fit;
  fit.family = ModelFamily::sg;
  fit.params = GaussianParams{mu, sigma};
  fit.loglik = -0.5 * static_cast<double>(n) * (kLog2Pi + 1.0) -
               static_cast<double>(n) * std::log(sigma);
  fit.loglik_trace = {fit.loglik};
  fit.iterations = 0;
  fit.converged = true;
  fit.n = n;
  fit.zero_mean = zero_mean;
  return fit;
}

FitResult fit_laplacian_mle(std::span<const double> samples, bool zero_mean) {
  require_samples(samples, 2, "fit_laplacian_mle");
  const std::size_t n = samples.size();
  const double mu = zero_mean ? 0.0 : median_of(samples);
  double acc = 0.0;
  for (double z : samples) acc += std::abs(z - mu);
  const double b = acc / static_cast<double>(n);
  if (!(b > 0.0)) throw DataError("fit_laplacian_mle: zero spread about the median");

  FitResult fit;
  fit.family = ModelFamily::sl;
  fit.params = LaplacianParams{mu, b * kSqrt2};
  fit.loglik = -static_cast<double>(n) * (std::log(2.0 * b) + 1.0);
  fit.loglik_trace = {fit.loglik};
  fit.iterations = 0;
  fit.converged = true;
  fit.n = n;
  fit.zero_mean = zero_mean;
  return fit;
}

namespace {

struct EmRun {
  LgmParams params;
  double loglik = -std::numeric_limits<double>::infinity();
  std::vector<double> trace;
  bool converged = false;
};

// Weighted median over ascending values; weights need not be normalized.
double weighted_median(const std::vector<double>& sorted_z, const std::vector<double>& w,
                       double w_total) {
  const double half = 0.5 * w_total;
  double cum = 0.0;
  for (std::size_t i = 0; i < sorted_z.size(); ++i) {
    cum += w[i];
    if (cum >= half) {
      if (std::abs(cum - half) <= 1e-12 * w_total && i + 1 < sorted_z.size()) {
        return 0.5 * (sorted_z[i] + sorted_z[i + 1]);
      }
      return sorted_z[i];
    }
  }
  return sorted_z.back();
}

EmRun run_lgm_em(const std::vector<double>& zs, const std::vector<double>& az0,
                 const std::vector<double>& z2, const LgmParams& init, const EmConfig& cfg,
                 double robust_sigma) {
  const std::size_t n = zs.size();
  const double nd = static_cast<double>(n);
  const double sigma_floor = 1e-6 * robust_sigma;

  LgmParams p = init;
  std::vector<double> r1(cfg.zero_mean ? 0 : n);
  std::vector<double> abs_dev;
  if (!cfg.zero_mean) abs_dev.resize(n);

  EmRun run;
  double ll_prev = -std::numeric_limits<double>::infinity();
  bool reinit1 = false, reinit2 = false;

  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    const double b = p.sigma1 / kSqrt2;
    const double inv_b = 1.0 / b;
    const double lc1 = std::log(p.lambda1) - std::log(2.0 * b);
    const double lc2 = std::log(p.lambda2()) - 0.5 * kLog2Pi - std::log(p.sigma2);
    const double inv_2s2 = 0.5 / (p.sigma2 * p.sigma2);

    double ll = 0.0;
    double sum_r1 = 0.0, sum_r1_abs = 0.0, sum_r2_z = 0.0, sum_r2_z2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double a1 = cfg.zero_mean ? az0[i] : std::abs(zs[i] - p.mu1);
      const double d2 = cfg.zero_mean ? z2[i]
                                      : (zs[i] - p.mu2) * (zs[i] - p.mu2);
      const double l1 = lc1 - a1 * inv_b;
      const double l2 = lc2 - d2 * inv_2s2;
      const double t = l2 - l1;
      const double e = std::exp(-std::abs(t));
      const double resp1 = t > 0.0 ? e / (1.0 + e) : 1.0 / (1.0 + e);
      ll += l1 + softplus_of(t, e);
      sum_r1 += resp1;
      if (cfg.zero_mean) {
        sum_r1_abs += resp1 * az0[i];
        sum_r2_z2 += (1.0 - resp1) * z2[i];
      } else {
        r1[i] = resp1;
        sum_r2_z += (1.0 - resp1) * zs[i];
        sum_r2_z2 += (1.0 - resp1) * z2[i];
      }
    }

    run.trace.push_back(ll);
    run.loglik = ll;
    run.params = p;
    if (std::abs(ll - ll_prev) < cfg.tol * (1.0 + std::abs(ll))) {
      run.converged = true;
      break;
    }
    ll_prev = ll;

    // M-step.
    const double sum_r2 = nd - sum_r1;
    p.lambda1 = std::clamp(sum_r1 / nd, kLambdaClamp, 1.0 - kLambdaClamp);
    double new_b, new_sigma2;
    if (cfg.zero_mean) {
      new_b = sum_r1_abs / std::max(sum_r1, 1e-300);
      new_sigma2 = std::sqrt(sum_r2_z2 / std::max(sum_r2, 1e-300));
    } else {
      p.mu1 = weighted_median(zs, r1, sum_r1);
      double acc_abs = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc_abs += r1[i] * std::abs(zs[i] - p.mu1);
      new_b = acc_abs / std::max(sum_r1, 1e-300);
      p.mu2 = sum_r2_z / std::max(sum_r2, 1e-300);
      const double var2 = sum_r2_z2 / std::max(sum_r2, 1e-300) - p.mu2 * p.mu2;
      new_sigma2 = std::sqrt(std::max(var2, 0.0));
    }
    p.sigma1 = new_b * kSqrt2;
    p.sigma2 = new_sigma2;

    if (p.sigma1 < sigma_floor) {
      if (reinit1) throw FitError("fit_lgm_em: Laplacian component variance collapsed");
      p.sigma1 = robust_sigma;
      reinit1 = true;
    }
    if (p.sigma2 < sigma_floor) {
      if (reinit2) throw FitError("fit_lgm_em: Gaussian component variance collapsed");
      p.sigma2 = robust_sigma;
      reinit2 = true;
    }
  }
  return run;
}

}  // namespace

FitResult fit_lgm_em(std::span<const double> samples, const EmConfig& cfg) {
  require_samples(samples, 10, "fit_lgm_em");
  if (cfg.n_restarts < 1) throw ConfigError("fit_lgm_em: n_restarts must be >= 1");
  const std::size_t n = samples.size();

  std::vector<double> zs(samples.begin(), samples.end());
  std::sort(zs.begin(), zs.end());
  std::vector<double> az0(n), z2(n);
  for (std::size_t i = 0; i < n; ++i) {
    az0[i] = std::abs(zs[i]);
    z2[i] = zs[i] * zs[i];
  }

  const double med = cfg.zero_mean ? 0.0 : median_of(zs);
  const double rob = mad_sigma(zs);
  if (!(rob > 0.0)) throw DataError("fit_lgm_em: degenerate samples (zero spread)");

  // Fixed asymmetric sigma factors break the label-swap symmetry; further
  // restarts jitter within +/-30%.
  static constexpr double kFixedFactors[][2] = {{1.0, 1.0}, {0.7, 1.3}, {1.3, 0.7}};
  Rng jitter(Rng::derive_seed(cfg.seed, 0x1a6d));

  std::optional<EmRun> best;
  std::optional<FitError> first_error;
  for (int k = 0; k < cfg.n_restarts; ++k) {
    double f1, f2;
    if (k < 3) {
      f1 = kFixedFactors[k][0];
      f2 = kFixedFactors[k][1];
    } else {
      f1 = jitter.uniform(0.7, 1.3);
      f2 = jitter.uniform(0.7, 1.3);
    }
    LgmParams init{0.5, med, f1 * rob, med, f2 * rob};
    try {
      EmRun run = run_lgm_em(zs, az0, z2, init, cfg, rob);
      if (!best || run.loglik > best->loglik) best = std::move(run);
    } catch (const FitError& e) {
      if (!first_error) first_error = e;
    }
  }
  if (!best) throw *first_error;

  FitResult fit;
  fit.family = ModelFamily::lgm;
  fit.n = n;
  fit.zero_mean = cfg.zero_mean;
  fit.seed = cfg.seed;

  // The standalone fits are boundary points of the mixture family; taking
  // them as candidates keeps the nesting inequality exact when EM stalls
  // in a worse local optimum.
  const FitResult sg = fit_gaussian_mle(samples, cfg.zero_mean);
  const FitResult sl = fit_laplacian_mle(samples, cfg.zero_mean);
  const double best_boundary = std::max(sg.loglik, sl.loglik);
  if (best->loglik >= best_boundary) {
    fit.params = best->params;
    fit.loglik = best->loglik;
    fit.loglik_trace = std::move(best->trace);
    fit.iterations = static_cast<int>(fit.loglik_trace.size());
    fit.converged = best->converged;
  } else if (sg.loglik >= sl.loglik) {
    const auto& g = sg.gaussian();
    fit.params = LgmParams{0.0, g.mu, g.sigma, g.mu, g.sigma};
    fit.loglik = sg.loglik;
    fit.loglik_trace = {sg.loglik};
    fit.iterations = 0;
    fit.converged = true;
  } else {
    const auto& l = sl.laplacian();
    fit.params = LgmParams{1.0, l.mu, l.sigma, l.mu, l.sigma};
    fit.loglik = sl.loglik;
    fit.loglik_trace = {sl.loglik};
    fit.iterations = 0;
    fit.converged = true;
  }
  return fit;
}

namespace {

struct SmRun {
  ScaleMixtureParams params;
  double loglik = -std::numeric_limits<double>::infinity();
  std::vector<double> trace;
  bool converged = false;
};

// Solves log(nu/2) - digamma(nu/2) + c = 0; the left side decreases from
// +inf to c, so a root exists iff c < 0. c >= 0 means the Gaussian limit.
double solve_nu(double c) {
  auto g = [c](double nu) { return std::log(0.5 * nu) - special::digamma(0.5 * nu) + c; };
  if (g(kNuMax) > 0.0) return kNuMax;
  if (g(kNuMin) < 0.0) throw FitError("fit_sm_em: nu solver bracket failure");
  double lo = kNuMin, hi = kNuMax;
  for (int i = 0; i < 200 && hi / lo > 1.0 + 1e-13; ++i) {
    const double mid = std::sqrt(lo * hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

SmRun run_sm_em(std::span<const double> z, const ScaleMixtureParams& init, const EmConfig& cfg,
                double robust_sigma) {
  const std::size_t n = z.size();
  const double nd = static_cast<double>(n);
  const double sigma_floor = 1e-6 * robust_sigma;

  ScaleMixtureParams p = init;
  SmRun run;
  double ll_prev = -std::numeric_limits<double>::infinity();
  bool reinit = false;

  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    const double inv_s2 = 1.0 / (p.scale * p.scale);
    double sum_log1p = 0.0, sum_w = 0.0, sum_wz = 0.0, sum_wz2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d2 = (z[i] - p.mu) * (z[i] - p.mu) * inv_s2;
      const double w = (p.nu + 1.0) / (p.nu + d2);
      sum_log1p += std::log1p(d2 / p.nu);
      sum_w += w;
      sum_wz += w * z[i];
      sum_wz2 += w * z[i] * z[i];
    }

    const double ll = nd * (std::lgamma(0.5 * (p.nu + 1.0)) - std::lgamma(0.5 * p.nu) -
                            0.5 * std::log(p.nu * std::numbers::pi) - std::log(p.scale)) -
                      0.5 * (p.nu + 1.0) * sum_log1p;
    run.trace.push_back(ll);
    run.loglik = ll;
    run.params = p;
    if (std::abs(ll - ll_prev) < cfg.tol * (1.0 + std::abs(ll))) {
      run.converged = true;
      break;
    }
    ll_prev = ll;

    // M-step: location and scale in closed form, then the dof equation.
    // mean(log w) reuses the accumulated log1p terms.
    const double mean_log_w = std::log(p.nu + 1.0) - std::log(p.nu) - sum_log1p / nd;
    const double c = 1.0 + mean_log_w - sum_w / nd +
                     special::digamma(0.5 * (p.nu + 1.0)) - std::log(0.5 * (p.nu + 1.0));

    const double mu_new = cfg.zero_mean ? 0.0 : sum_wz / sum_w;
    const double ss = sum_wz2 - 2.0 * mu_new * sum_wz + mu_new * mu_new * sum_w;
    p.mu = mu_new;
    p.scale = std::sqrt(std::max(ss, 0.0) / nd);
    if (p.scale < sigma_floor) {
      if (reinit) throw FitError("fit_sm_em: scale collapsed");
      p.scale = robust_sigma;
      reinit = true;
    }
    p.nu = solve_nu(c);
  }
  return run;
}

}  // namespace

FitResult fit_sm_em(std::span<const double> samples, const EmConfig& cfg) {
  require_samples(samples, 10, "fit_sm_em");
  if (cfg.n_restarts < 1) throw ConfigError("fit_sm_em: n_restarts must be >= 1");

  const double med = cfg.zero_mean ? 0.0 : median_of(samples);
  const double rob = mad_sigma(samples);
  if (!(rob > 0.0)) throw DataError("fit_sm_em: degenerate samples (zero spread)");

  static constexpr double kFixedInits[][2] = {{1.0, 10.0}, {0.7, 4.0}, {1.3, 30.0}};
  Rng jitter(Rng::derive_seed(cfg.seed, 0x5c0f));

  std::optional<SmRun> best;
  std::optional<FitError> first_error;
  for (int k = 0; k < cfg.n_restarts; ++k) {
    double sf, nu0;
    if (k < 3) {
      sf = kFixedInits[k][0];
      nu0 = kFixedInits[k][1];
    } else {
      sf = jitter.uniform(0.7, 1.3);
      nu0 = std::exp(jitter.uniform(std::log(2.0), std::log(50.0)));
    }
    try {
      SmRun run = run_sm_em(samples, ScaleMixtureParams{med, sf * rob, nu0}, cfg, rob);
      if (!best || run.loglik > best->loglik) best = std::move(run);
    } catch (const FitError& e) {
      if (!first_error) first_error = e;
    }
  }
  if (!best) throw *first_error;

  FitResult fit;
  fit.family = ModelFamily::sm;
  fit.params = best->params;
  fit.loglik = best->loglik;
  fit.loglik_trace = std::move(best->trace);
  fit.iterations = static_cast<int>(fit.loglik_trace.size());
  fit.converged = best->converged;
  fit.n = samples.size();
  fit.zero_mean = cfg.zero_mean;
  fit.seed = cfg.seed;
  return fit;
}

double log_likelihood(std::span<const double> samples, const FitResult& fit) {
  double acc = 0.0;
  for (double z : samples) acc += model_logpdf(z, fit.params);
  if (!std::isfinite(acc)) throw FitError("log_likelihood: non-finite accumulation");
  return acc;
}

}  // namespace emgfit

#include "emgfit/serialize.hpp"

#include <fstream>

#include "emgfit/error.hpp"
#include "emgfit/format.hpp"

namespace emgfit {

namespace {

double r12(double x) { return round_sig(x, 12); }

nlohmann::json params_to_json(const FitParams& params) {
  nlohmann::json j;
  std::visit([&](const auto& p) {
    using T = std::decay_t<decltype(p)>;
    if constexpr (std::is_same_v<T, LgmParams>) {
      j = {{"lambda1", r12(p.lambda1)}, {"mu1", r12(p.mu1)}, {"sigma1", r12(p.sigma1)},
           {"mu2", r12(p.mu2)},         {"sigma2", r12(p.sigma2)}};
    } else if constexpr (std::is_same_v<T, GaussianParams>) {
      j = {{"mu", r12(p.mu)}, {"sigma", r12(p.sigma)}};
    } else if constexpr (std::is_same_v<T, LaplacianParams>) {
      j = {{"mu", r12(p.mu)}, {"sigma", r12(p.sigma)}};
    } else {
      j = {{"mu", r12(p.mu)}, {"scale", r12(p.scale)}, {"nu", r12(p.nu)}};
    }
  }, params);
  return j;
}

}  // namespace

nlohmann::json fit_result_to_json(const FitResult& fit, const EmConfig* config) {
  nlohmann::json j;
  j["family"] = to_string(fit.family);
  j["params"] = params_to_json(fit.params);
  j["loglik"] = r12(fit.loglik);
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  j["n"] = fit.n;
  j["zero_mean"] = fit.zero_mean;
  j["seed"] = fit.seed;
  if (config) {
    j["config"] = {{"tol", r12(config->tol)},
                   {"max_iter", config->max_iter},
                   {"restarts", config->n_restarts}};
  } else {
    j["config"] = nullptr;
  }
  return j;
}

FitParams fit_params_from_json(ModelFamily family, const nlohmann::json& j) {
  switch (family) {
    case ModelFamily::lgm:
      return LgmParams{j.at("lambda1").get<double>(), j.at("mu1").get<double>(),
                       j.at("sigma1").get<double>(), j.at("mu2").get<double>(),
                       j.at("sigma2").get<double>()};
    case ModelFamily::sg:
      return GaussianParams{j.at("mu").get<double>(), j.at("sigma").get<double>()};
    case ModelFamily::sl:
      return LaplacianParams{j.at("mu").get<double>(), j.at("sigma").get<double>()};
    case ModelFamily::sm:
      return ScaleMixtureParams{j.at("mu").get<double>(), j.at("scale").get<double>(),
                                j.at("nu").get<double>()};
  }
  throw UsageError("fit_params_from_json: bad family");
}

void write_json_file(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("write_json_file: cannot open " + path.string());
  out << j.dump(2) << '\n';
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("read_json_file: cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("read_json_file: " + path.string() + ": " + e.what());
  }
  return j;
}

}  // namespace emgfit

#pragma once

#include <filesystem>

#include <json.hpp>

#include "emgfit/models.hpp"

namespace emgfit {

/// nlohmann::json value with every number passed through round_sig(12) so
/// re-serialization is byte-stable.
nlohmann::json fit_result_to_json(const FitResult& fit, const EmConfig* config = nullptr);

FitParams fit_params_from_json(ModelFamily family, const nlohmann::json& j);

/// Writes compact JSON with a trailing newline (the on-disk convention for
/// every JSON artifact the tool emits).
void write_json_file(const nlohmann::json& j, const std::filesystem::path& path);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace emgfit

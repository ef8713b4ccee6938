#pragma once

#include <stdexcept>
#include <string>

namespace emgfit {

/// Coarse error taxonomy. Each category maps to a distinct process exit
/// code in the CLI (config/usage -> 2, data -> 3, fit -> 4).
enum class ErrorCategory {
  config,
  usage,
  data,
  fit,
};

inline const char* to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::config: return "config";
    case ErrorCategory::usage: return "usage";
    case ErrorCategory::data: return "data";
    case ErrorCategory::fit: return "fit";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

  int exit_code() const noexcept {
    switch (category_) {
      case ErrorCategory::config:
      case ErrorCategory::usage: return 2;
      case ErrorCategory::data: return 3;
      case ErrorCategory::fit: return 4;
    }
    return 1;
  }

 private:
  ErrorCategory category_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& m) : Error(ErrorCategory::config, m) {}
};
struct UsageError : Error {
  explicit UsageError(const std::string& m) : Error(ErrorCategory::usage, m) {}
};
struct DataError : Error {
  explicit DataError(const std::string& m) : Error(ErrorCategory::data, m) {}
};
struct FitError : Error {
  explicit FitError(const std::string& m) : Error(ErrorCategory::fit, m) {}
};

}  // namespace emgfit

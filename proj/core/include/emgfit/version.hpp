#pragma once

namespace emgfit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace emgfit

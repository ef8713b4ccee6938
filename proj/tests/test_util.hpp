#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "emgfit/rng.hpp"

namespace testutil {

/// Composite Simpson quadrature; independent of the Gauss-Legendre path used
/// inside the library.
inline double simpson(const std::function<double(double)>& f, double lo, double hi,
                      int panels = 2000) {
  const double h = (hi - lo) / (2.0 * panels);
  double acc = f(lo) + f(hi);
  for (int i = 1; i < 2 * panels; ++i) {
    acc += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return acc * h / 3.0;
}

/// Random probability vector of length k.
inline std::vector<double> random_simplex(emgfit::Rng& rng, std::size_t k) {
  std::vector<double> p(k);
  double sum = 0.0;
  for (auto& v : p) {
    v = -std::log(rng.uniform_pos());
    sum += v;
  }
  for (auto& v : p) v /= sum;
  return p;
}

inline double mean(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc / static_cast<double>(v.size());
}

inline double kurtosis(const std::vector<double>& v) {
  const double m = mean(v);
  double m2 = 0.0, m4 = 0.0;
  for (double x : v) {
    const double d = (x - m) * (x - m);
    m2 += d;
    m4 += d * d;
  }
  m2 /= static_cast<double>(v.size());
  m4 /= static_cast<double>(v.size());
  return m4 / (m2 * m2);
}

}  // namespace testutil

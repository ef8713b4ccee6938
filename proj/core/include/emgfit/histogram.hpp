#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace emgfit {

/// Binned probability masses over an amplitude grid (the empirical pdf).
struct EmpiricalPdf {
  std::vector<double> edges;  // K+1 strictly increasing edges (mV)
  std::vector<double> mass;   // K non-negative masses summing to 1
  std::size_t n = 0;          // sample count behind the estimate

  std::size_t bins() const { return mass.size(); }
};

struct HistogramConfig {
  int bins = 100;
  // Explicit span override; default is the robust span
  // median +/- 4 * 1.4826 * MAD.
  std::optional<double> span_lo;
  std::optional<double> span_hi;
};

/// Builds the empirical pdf. Samples outside the span clip into the edge
/// bins, so masses always sum to 1.
EmpiricalPdf build_histogram(std::span<const double> samples, const HistogramConfig& cfg = {});

/// Integrates a model density over each bin (adaptive 5-point
/// Gauss-Legendre); tail mass beyond the outer edges folds into the edge
/// bins. `breakpoints` lists non-smooth density points (e.g. a Laplacian
/// location) where bins are pre-split so the quadrature sees smooth pieces.
std::vector<double> bin_model(const std::function<double(double)>& pdf,
                              std::span<const double> edges,
                              std::span<const double> breakpoints = {});

void write_pdf_csv(const EmpiricalPdf& pdf, const std::filesystem::path& path);
EmpiricalPdf read_pdf_csv(const std::filesystem::path& path);

}  // namespace emgfit

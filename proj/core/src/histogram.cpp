#include "emgfit/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "emgfit/error.hpp"
#include "emgfit/models.hpp"

namespace emgfit {

namespace {

// 5-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGlNode[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                               0.5384693101056831, 0.9061798459386640};
constexpr double kGlWeight[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                 0.4786286704993665, 0.2369268850561891};

double gl5(const std::function<double(double)>& f, double lo, double hi) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  double acc = 0.0;
  for (int k = 0; k < 5; ++k) acc += kGlWeight[k] * f(c + h * kGlNode[k]);
  return acc * h;
}

// Adaptive 5-point Gauss-Legendre: the halved estimate doubles as the error
// check, recursing only where the coarse pass disagrees.
double bin_integral(const std::function<double(double)>& f, double lo, double hi,
                    int depth = 0) {
  const double mid = 0.5 * (lo + hi);
  const double coarse = gl5(f, lo, hi);
  const double fine = gl5(f, lo, mid) + gl5(f, mid, hi);
  if (depth >= 24 || std::abs(fine - coarse) <= 1e-14 + 1e-12 * std::abs(fine)) {
    return fine;
  }
  return bin_integral(f, lo, mid, depth + 1) + bin_integral(f, mid, hi, depth + 1);
}

// Integral over [lo, hi] split at any interior breakpoints.
double piecewise_integral(const std::function<double(double)>& f, double lo, double hi,
                          std::span<const double> breakpoints) {
  double acc = 0.0;
  double start = lo;
  for (double bp : breakpoints) {
    if (bp > start && bp < hi) {
      acc += bin_integral(f, start, bp);
      start = bp;
    }
  }
  return acc + bin_integral(f, start, hi);
}

// Tail integral of a density from `edge` out to +/- infinity over
// geometrically widening segments; handles power-law tails to ~1e-12.
double tail_integral(const std::function<double(double)>& f, double edge, bool upper,
                     double first_width, std::span<const double> breakpoints) {
  const double dir = upper ? 1.0 : -1.0;
  double offset = 0.0;
  double width = std::max(first_width, 1e-12);
  double acc = 0.0;
  int quiet = 0;
  for (int k = 0; k < 220 && quiet < 3; ++k) {
    const double a = edge + dir * offset;
    const double b = edge + dir * (offset + width);
    const double piece =
        piecewise_integral(f, std::min(a, b), std::max(a, b), breakpoints);
    if (std::isfinite(piece)) acc += piece;
    quiet = std::abs(piece) < 1e-16 * std::max(acc, 1e-300) ? quiet + 1 : 0;
    offset += width;
    width *= 2.0;
  }
  return acc;
}

}  // namespace

EmpiricalPdf build_histogram(std::span<const double> samples, const HistogramConfig& cfg) {
  if (cfg.bins < 1) throw ConfigError("build_histogram: bins must be >= 1");
  if (samples.size() < 2) throw DataError("build_histogram: needs at least 2 samples");
  const double first = samples.front();
  if (std::all_of(samples.begin(), samples.end(), [&](double z) { return z == first; })) {
    throw DataError("build_histogram: degenerate samples (zero spread)");
  }

  double lo, hi;
  if (cfg.span_lo || cfg.span_hi) {
    if (!cfg.span_lo || !cfg.span_hi) {
      throw ConfigError("build_histogram: explicit span needs both bounds");
    }
    lo = *cfg.span_lo;
    hi = *cfg.span_hi;
  } else {
    const double center = median_of(samples);
    const double spread = mad_sigma(samples);
    if (!(spread > 0.0)) throw DataError("build_histogram: degenerate samples (zero spread)");
    lo = center - 4.0 * spread;
    hi = center + 4.0 * spread;
  }
  if (!(hi > lo)) throw ConfigError("build_histogram: span_hi must exceed span_lo");

  const std::size_t bins = static_cast<std::size_t>(cfg.bins);
  EmpiricalPdf pdf;
  pdf.n = samples.size();
  pdf.edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) {
    pdf.edges[i] = lo + width * static_cast<double>(i);
  }
  pdf.edges.back() = hi;

  std::vector<std::size_t> counts(bins, 0);
  const double inv_width = static_cast<double>(bins) / (hi - lo);
  for (double z : samples) {
    auto idx = static_cast<std::ptrdiff_t>(std::floor((z - lo) * inv_width));
    idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(bins) - 1);
    ++counts[static_cast<std::size_t>(idx)];
  }
  pdf.mass.resize(bins);
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  for (std::size_t i = 0; i < bins; ++i) {
    pdf.mass[i] = static_cast<double>(counts[i]) * inv_n;
  }
  return pdf;
}

std::vector<double> bin_model(const std::function<double(double)>& pdf,
                              std::span<const double> edges,
                              std::span<const double> breakpoints) {
  if (edges.size() < 2) throw UsageError("bin_model: needs at least 2 edges");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw UsageError("bin_model: edges must be strictly increasing");
  }
  std::vector<double> sorted_bp(breakpoints.begin(), breakpoints.end());
  std::sort(sorted_bp.begin(), sorted_bp.end());

  const std::size_t bins = edges.size() - 1;
  std::vector<double> mass(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    mass[i] = piecewise_integral(pdf, edges[i], edges[i + 1], sorted_bp);
  }
  const double mean_width = (edges.back() - edges.front()) / static_cast<double>(bins);
  mass.front() += tail_integral(pdf, edges.front(), /*upper=*/false, mean_width, sorted_bp);
  mass.back() += tail_integral(pdf, edges.back(), /*upper=*/true, mean_width, sorted_bp);
  for (double m : mass) {
    if (!std::isfinite(m)) throw FitError("bin_model: non-finite quadrature result");
  }
  return mass;
}

void write_pdf_csv(const EmpiricalPdf& pdf, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("write_pdf_csv: cannot open " + path.string());
  out << "# n=" << pdf.n << "\n";
  out << "edge_lo,edge_hi,mass\n";
  char buf[96];
  for (std::size_t i = 0; i < pdf.bins(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", pdf.edges[i], pdf.edges[i + 1],
                  pdf.mass[i]);
    out << buf;
  }
}

EmpiricalPdf read_pdf_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("read_pdf_csv: cannot open " + path.string());
  EmpiricalPdf pdf;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("n=");
      if (pos != std::string::npos) pdf.n = std::stoull(line.substr(pos + 2));
      continue;
    }
    if (!header_seen) {
      header_seen = true;  // column header
      continue;
    }
    std::istringstream ss(line);
    std::string lo_s, hi_s, mass_s;
    if (!std::getline(ss, lo_s, ',') || !std::getline(ss, hi_s, ',') ||
        !std::getline(ss, mass_s)) {
      throw DataError("read_pdf_csv: malformed row at line " + std::to_string(line_no));
    }
    const double lo = std::stod(lo_s);
    const double hi = std::stod(hi_s);
    const double m = std::stod(mass_s);
    if (pdf.edges.empty()) {
      pdf.edges.push_back(lo);
    } else if (pdf.edges.back() != lo) {
      throw DataError("read_pdf_csv: non-contiguous bins at line " + std::to_string(line_no));
    }
    pdf.edges.push_back(hi);
    pdf.mass.push_back(m);
  }
  if (pdf.mass.empty()) throw DataError("read_pdf_csv: no bins in " + path.string());
  return pdf;
}

}  // namespace emgfit

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace vegplan::numeric {

struct SimplexOptions {
  int max_evals = 20000;
  double x_tol = 1e-12;  // relative simplex diameter
  double f_tol = 1e-16;  // relative spread of vertex values
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int evals = 0;
};

/// Nelder-Mead minimisation. Non-finite objective values are treated as +inf,
/// which lets callers encode hard constraints as barriers.
SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                          std::vector<double> start, std::vector<double> step,
                          const SimplexOptions& options = {});

struct GoldenResult {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section maximisation of a unimodal function on [lo, hi]; stops when
/// the bracket is narrower than `tol`. Both endpoints are also compared, so a
/// monotone function returns the better endpoint.
GoldenResult golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                                double tol = 1e-6);

/// Ordinary least squares for y = slope * x + intercept. Returns false when x
/// has no spread.
bool fit_line(std::span<const double> x, std::span<const double> y, double& slope, double& intercept);

std::uint64_t splitmix64(std::uint64_t& state);
/// Stable per-stage seed: FNV-1a of `stage` mixed with the root seed.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stage);
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace vegplan::numeric

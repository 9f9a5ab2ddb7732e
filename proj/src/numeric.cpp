#include "vegplan/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace vegplan::numeric {

namespace {

double sanitize(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::infinity(); }

}  // namespace

SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                          std::vector<double> start, std::vector<double> step,
                          const SimplexOptions& options) {
  const std::size_t n = start.size();
  SimplexResult result;
  auto eval = [&](const std::vector<double>& x) {
    ++result.evals;
    return sanitize(objective(x));
  };
  if (n == 0) {
    result.x = start;
    result.value = eval(start);
    return result;
  }

  std::vector<std::vector<double>> simplex(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step[i];
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;

  while (result.evals < options.max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

    double diameter = 0.0, scale = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        diameter = std::max(diameter, std::abs(simplex[i][k] - simplex[best][k]));
        scale = std::max(scale, std::abs(simplex[best][k]));
      }
    const double spread = std::abs(values[worst] - values[best]);
    if (std::isfinite(values[worst]) && diameter <= options.x_tol * std::max(1.0, scale) &&
        spread <= options.f_tol * std::max(1e-300, std::abs(values[best])) + 1e-300)
      break;
    if (diameter <= 1e-15 * std::max(1.0, scale)) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i)
      if (i != worst)
        for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / static_cast<double>(n);

    for (std::size_t k = 0; k < n; ++k) trial[k] = centroid[k] + kReflect * (centroid[k] - simplex[worst][k]);
    const double f_reflect = eval(trial);
    if (f_reflect < values[best]) {
      for (std::size_t k = 0; k < n; ++k) trial2[k] = centroid[k] + kExpand * (trial[k] - centroid[k]);
      const double f_expand = eval(trial2);
      if (f_expand < f_reflect) {
        simplex[worst] = trial2;
        values[worst] = f_expand;
      } else {
        simplex[worst] = trial;
        values[worst] = f_reflect;
      }
      continue;
    }
    if (f_reflect < values[second]) {
      simplex[worst] = trial;
      values[worst] = f_reflect;
      continue;
    }
    const bool outside = f_reflect < values[worst];
    for (std::size_t k = 0; k < n; ++k) {
      const double target = outside ? trial[k] : simplex[worst][k];
      trial2[k] = centroid[k] + kContract * (target - centroid[k]);
    }
    const double f_contract = eval(trial2);
    if (f_contract < (outside ? f_reflect : values[worst])) {
      simplex[worst] = trial2;
      values[worst] = f_contract;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < n; ++k)
        simplex[i][k] = simplex[best][k] + kShrink * (simplex[i][k] - simplex[best][k]);
      values[i] = eval(simplex[i]);
    }
  }

  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  result.x = simplex[best];
  result.value = values[best];
  return result;
}

GoldenResult golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                                double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  GoldenResult best{(a + b) / 2.0, 0.0};
  best.value = f(best.x);
  for (double x : {lo, hi}) {
    const double v = f(x);
    if (v > best.value) best = {x, v};
  }
  return best;
}

bool fit_line(std::span<const double> x, std::span<const double> y, double& slope, double& intercept) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return false;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !std::isfinite(sxx)) return false;
  slope = sxy / sxx;
  intercept = my - slope * mx;
  return std::isfinite(slope) && std::isfinite(intercept);
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view stage) {
  std::uint64_t state = root ^ fnv1a(stage);
  return splitmix64(state);
}

}  // namespace vegplan::numeric

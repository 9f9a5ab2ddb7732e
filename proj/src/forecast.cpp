#include "vegplan/forecast.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <random>

#include "vegplan/error.hpp"
#include "vegplan/numeric.hpp"

namespace vegplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double mean_of(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

std::vector<double> PriceSeries::values() const {
  std::vector<double> out;
  out.reserve(observations.size());
  for (const auto& o : observations) out.push_back(o.price);
  return out;
}

PriceSeries category_wholesale_series(const Dataset& dataset, std::string_view category,
                                      Granularity granularity, std::optional<Date> before) {
  const Category* cat = dataset.find_category(category);
  if (!cat) throw Error(Errc::NoData, "unknown category " + std::string(category));

  // Sold kg per (day, item) first so each item-day is weighted once.
  std::map<std::pair<Date, std::string>, double> sold;
  for (const auto& tx : dataset.transactions()) {
    if (tx.is_return || (before && tx.date >= *before)) continue;
    if (dataset.item(tx.item_code).category_code != cat->code) continue;
    sold[{tx.date, tx.item_code}] += tx.quantity_kg;
  }
  std::map<std::int32_t, std::pair<double, double>> periods;  // weighted price sum, weight sum
  for (const auto& [key, kg] : sold) {
    const auto& [date, item] = key;
    const auto w = dataset.wholesale_resolved(item, date);
    const auto loss = dataset.loss_rate(item);
    if (!w || !loss || !(kg > 0)) continue;
    const double weight = (1.0 + *loss) * kg;
    auto& acc = periods[PeriodKey::of(date, granularity).index];
    acc.first += weight * *w;
    acc.second += weight;
  }
  PriceSeries series{cat->name, {}};
  for (const auto& [index, acc] : periods)
    series.observations.push_back({PeriodKey{granularity, index}.start(), acc.first / acc.second});
  if (series.observations.empty()) throw Error(Errc::NoData, cat->name + ": no wholesale data");
  return series;
}

PriceSeries item_wholesale_series(const Dataset& dataset, std::string_view item_code,
                                  std::optional<Date> before) {
  PriceSeries series{dataset.item(item_code).item_name, {}};
  for (const auto& q : dataset.wholesale())
    if (q.item_code == item_code && (!before || q.date < *before))
      series.observations.push_back({q.date, q.wholesale_price});
  std::sort(series.observations.begin(), series.observations.end(),
            [](const PriceObservation& a, const PriceObservation& b) { return a.date < b.date; });
  return series;
}

std::vector<double> difference(std::span<const double> values, int degree) {
  if (degree < 0 || values.size() <= static_cast<std::size_t>(degree))
    throw Error(Errc::SeriesTooShort, std::to_string(values.size()) + " value(s) for d=" +
                                          std::to_string(degree));
  std::vector<double> out(values.begin(), values.end());
  for (int k = 0; k < degree; ++k) {
    for (std::size_t i = 0; i + 1 < out.size(); ++i) out[i] = out[i + 1] - out[i];
    out.pop_back();
  }
  return out;
}

std::vector<double> undifference(std::span<const double> differenced, std::span<const double> head) {
  const int d = static_cast<int>(head.size());
  // Level k (k differences applied) starts with the k-th difference of head.
  std::vector<double> current(differenced.begin(), differenced.end());
  for (int k = d - 1; k >= 0; --k) {
    const double first = difference(head.first(static_cast<std::size_t>(k) + 1), k).front();
    std::vector<double> next;
    next.reserve(current.size() + 1);
    next.push_back(first);
    for (double v : current) next.push_back(next.back() + v);
    current = std::move(next);
  }
  return current;
}

std::string ArimaOrder::str() const {
  return std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q);
}

std::optional<ArimaOrder> ArimaOrder::parse(std::string_view text) {
  ArimaOrder o;
  int* fields[] = {&o.p, &o.d, &o.q};
  for (int i = 0; i < 3; ++i) {
    const std::size_t comma = text.find(',');
    if ((i < 2) == (comma == std::string_view::npos)) return std::nullopt;
    std::string_view part = text.substr(0, comma);
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), *fields[i]);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size() || *fields[i] < 0)
      return std::nullopt;
    text = i < 2 ? text.substr(comma + 1) : std::string_view{};
  }
  return o;
}

bool is_stable(std::span<const double> coefficients) { return roots_within(coefficients, 1.0 - kRootTolerance); }

bool roots_within(std::span<const double> coefficients, double r) {
  // Scale so that radius r maps to the unit circle, then step down through
  // the reflection coefficients.
  std::vector<double> a(coefficients.begin(), coefficients.end());
  double scale = 1.0;
  for (double& c : a) {
    scale /= r;
    c *= scale;
  }
  for (std::size_t k = a.size(); k > 0; --k) {
    const double kappa = a[k - 1];
    if (!std::isfinite(kappa) || std::abs(kappa) >= 1.0) return false;
    const double denom = 1.0 - kappa * kappa;
    std::vector<double> next(k - 1);
    for (std::size_t j = 0; j + 1 < k; ++j) next[j] = (a[j] + kappa * a[k - 2 - j]) / denom;
    a = std::move(next);
  }
  return true;
}

namespace {

struct CssModel {
  std::span<const double> ar;
  std::span<const double> ma;
  double mu = 0.0;
};

// Residual recursion; returns the SSR and optionally the residuals.
double css(std::span<const double> y, double presample, const CssModel& m, std::vector<double>* residuals) {
  const std::size_t n = y.size();
  std::vector<double> e(n, 0.0);
  double ssr = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    double pred = m.mu;
    for (std::size_t i = 0; i < m.ar.size(); ++i) {
      const double lag = t > i ? y[t - i - 1] : presample;
      pred += m.ar[i] * (lag - m.mu);
    }
    for (std::size_t j = 0; j < m.ma.size(); ++j)
      if (t > j) pred += m.ma[j] * e[t - j - 1];
    e[t] = y[t] - pred;
    ssr += e[t] * e[t];
  }
  if (residuals) *residuals = std::move(e);
  return ssr;
}

// Coefficients from partial autocorrelations (always stable when |pacf| < 1).
std::vector<double> from_pacf(std::span<const double> pacf) {
  std::vector<double> a;
  for (std::size_t k = 0; k < pacf.size(); ++k) {
    std::vector<double> next(k + 1);
    for (std::size_t j = 0; j < k; ++j) next[j] = a[j] - pacf[k] * a[k - 1 - j];
    next[k] = pacf[k];
    a = std::move(next);
  }
  return a;
}

}  // namespace

double log_likelihood(std::size_t n_eff, double sigma2) {
  const double s2 = std::max(sigma2, std::numeric_limits<double>::min());
  return -0.5 * static_cast<double>(n_eff) * (std::log(2.0 * std::numbers::pi * s2) + 1.0);
}

double aic(std::size_t k, double log_likelihood) { return 2.0 * static_cast<double>(k) - 2.0 * log_likelihood; }

double aic(const ArimaFit& fit) {
  const std::size_t k = static_cast<std::size_t>(fit.order.p + fit.order.q + 1) + (fit.has_intercept ? 1 : 0);
  return aic(k, log_likelihood(fit.n_eff, fit.sigma2));
}

ArimaFit fit_arima(std::span<const double> series, ArimaOrder order, const ArimaOptions& options) {
  if (order.p < 0 || order.d < 0 || order.q < 0)
    throw Error(Errc::InvalidConfig, "negative ARIMA order");
  const std::size_t min_len = static_cast<std::size_t>(10 + order.p + order.d + order.q);
  if (series.size() < min_len)
    throw Error(Errc::SeriesTooShort, std::to_string(series.size()) + " observation(s), need " +
                                          std::to_string(min_len) + " for (" + order.str() + ")");

  const std::vector<double> y = difference(series, order.d);
  const double ybar = mean_of(y);
  const std::size_t p = static_cast<std::size_t>(order.p), q = static_cast<std::size_t>(order.q);
  const bool has_intercept = order.d == 0;
  const std::size_t dim = p + q + (has_intercept ? 1 : 0);

  auto unpack = [&](std::span<const double> theta) {
    return CssModel{theta.subspan(0, p), theta.subspan(p, q), has_intercept ? theta[p + q] : 0.0};
  };
  auto objective = [&](std::span<const double> theta) {
    const CssModel m = unpack(theta);
    if (!is_stable(m.ar)) return kInf;
    std::vector<double> neg_ma(m.ma.begin(), m.ma.end());
    for (double& c : neg_ma) c = -c;
    if (!is_stable(neg_ma)) return kInf;
    return css(y, ybar, m, nullptr);
  };

  double spread = 0.0;
  for (double v : y) spread += (v - ybar) * (v - ybar);
  spread = std::sqrt(spread / static_cast<double>(y.size()));

  std::vector<double> best_theta(dim, 0.0);
  if (has_intercept) best_theta[p + q] = ybar;
  double best = objective(best_theta);

  if (dim > 0) {
    std::mt19937_64 rng(numeric::derive_seed(options.seed, "arima:" + order.str()));
    std::uniform_real_distribution<double> pacf(-0.5, 0.5);
    std::vector<double> step(dim, 0.1);
    if (has_intercept) step[p + q] = 0.1 * spread + 1e-3 * std::max(1.0, std::abs(ybar));
    numeric::SimplexOptions opts;
    opts.max_evals = options.max_evals;
    opts.x_tol = 1e-10;
    opts.f_tol = 1e-14;
    for (int s = 0; s < std::max(1, options.starts); ++s) {
      std::vector<double> start(dim, 0.0);
      if (s > 0) {
        std::vector<double> r(p), u(q);
        for (auto& v : r) v = pacf(rng);
        for (auto& v : u) v = pacf(rng);
        auto a = from_pacf(r);
        auto b = from_pacf(u);
        std::copy(a.begin(), a.end(), start.begin());
        for (std::size_t j = 0; j < q; ++j) start[p + j] = -b[j];
      }
      if (has_intercept) start[p + q] = ybar;
      auto result = numeric::nelder_mead(objective, start, step, opts);
      // One restart from the optimum guards against a collapsed simplex.
      result = numeric::nelder_mead(objective, result.x, step, opts);
      if (result.value < best) {
        best = result.value;
        best_theta = result.x;
      }
    }
  }
  if (!std::isfinite(best)) throw Error(Errc::NonStationaryFit, "no admissible parameters for (" + order.str() + ")");

  ArimaFit fit;
  fit.order = order;
  const CssModel m = unpack(best_theta);
  fit.ar.assign(m.ar.begin(), m.ar.end());
  fit.ma.assign(m.ma.begin(), m.ma.end());
  fit.intercept = m.mu;
  fit.has_intercept = has_intercept;
  fit.ssr = css(y, ybar, m, &fit.residuals);
  fit.n_obs = series.size();
  fit.n_eff = y.size();
  fit.sigma2 = fit.ssr / static_cast<double>(fit.n_eff);
  fit.series.assign(series.begin(), series.end());
  fit.aic = aic(fit);
  return fit;
}

ArimaOrder select_order(std::span<const double> series, const OrderGrid& grid, const ArimaOptions& options) {
  std::optional<ArimaOrder> best;
  double best_aic = kInf;
  auto key = [](const ArimaOrder& o) { return std::tuple(o.p + o.q, o.d, o.p); };
  for (int d = 0; d <= grid.d_max; ++d)
    for (int p = 0; p <= grid.p_max; ++p)
      for (int q = 0; q <= grid.q_max; ++q) {
        const ArimaOrder order{p, d, q};
        double value = kInf;
        try {
          const ArimaFit fit = fit_arima(series, order, options);
          std::vector<double> neg_ma(fit.ma);
          for (double& c : neg_ma) c = -c;
          if (!roots_within(fit.ar, kSelectionRootRadius) || !roots_within(neg_ma, kSelectionRootRadius)) continue;
          value = fit.aic;
        } catch (const Error&) {
          continue;
        }
        if (!std::isfinite(value)) continue;
        const double tol = 1e-9 * std::max(1.0, std::abs(best_aic));
        if (!best || value < best_aic - tol ||
            (std::abs(value - best_aic) <= tol && key(order) < key(*best))) {
          best = order;
          best_aic = value;
        }
      }
  if (!best) throw Error(Errc::NoConvergentFit, "no order in the grid could be fitted");
  return *best;
}

std::vector<double> forecast(const ArimaFit& fit, int horizon, double floor) {
  if (horizon < 1) return {};
  const std::size_t H = static_cast<std::size_t>(horizon);
  std::vector<double> y = difference(fit.series, fit.order.d);
  const double presample = mean_of(y);
  std::vector<double> e = fit.residuals;
  e.resize(y.size(), 0.0);
  const std::size_t m = y.size();
  for (std::size_t h = 0; h < H; ++h) {
    const std::size_t t = m + h;
    double pred = fit.intercept;
    for (std::size_t i = 0; i < fit.ar.size(); ++i)
      pred += fit.ar[i] * ((t > i ? y[t - i - 1] : presample) - fit.intercept);
    for (std::size_t j = 0; j < fit.ma.size(); ++j)
      if (t > j) pred += fit.ma[j] * e[t - j - 1];
    y.push_back(pred);
    e.push_back(0.0);
  }
  std::vector<double> path(y.end() - static_cast<std::ptrdiff_t>(H), y.end());
  for (int k = fit.order.d - 1; k >= 0; --k) {
    double level = difference(fit.series, k).back();
    for (double& v : path) {
      level += v;
      v = level;
    }
  }
  for (double& v : path) v = std::max(v, floor);
  return path;
}

double mean_forecast(const PriceSeries& series, std::size_t window) {
  const auto& obs = series.observations;
  if (obs.empty() || window == 0) throw Error(Errc::NoData, series.label + ": no observations");
  const std::size_t n = std::min(window, obs.size());
  double sum = 0.0;
  for (std::size_t i = obs.size() - n; i < obs.size(); ++i) sum += obs[i].price;
  return sum / static_cast<double>(n);
}

nlohmann::json to_json(const ArimaFit& fit) {
  return {{"order", {fit.order.p, fit.order.d, fit.order.q}},
          {"ar", fit.ar},
          {"ma", fit.ma},
          {"intercept", fit.intercept},
          {"sigma2", fit.sigma2},
          {"aic", fit.aic},
          {"n_obs", fit.n_obs},
          {"n_eff", fit.n_eff}};
}

}  // namespace vegplan

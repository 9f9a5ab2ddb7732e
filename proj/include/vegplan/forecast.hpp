#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vegplan/analytics.hpp"
#include "vegplan/dataio.hpp"

namespace vegplan {

struct PriceObservation {
  Date date;
  double price = 0.0;
};

struct PriceSeries {
  std::string label;
  std::vector<PriceObservation> observations;  // strictly increasing dates

  std::vector<double> values() const;
};

/// Loss-weighted category wholesale price per day (or month):
/// sum (1+loss_j) kg_j w_j / sum (1+loss_j) kg_j over the items sold.
/// Quotes are forward filled; items without a quote or loss rate are skipped.
PriceSeries category_wholesale_series(const Dataset& dataset, std::string_view category,
                                      Granularity granularity = Granularity::Day,
                                      std::optional<Date> before = std::nullopt);

/// Raw wholesale quotes of one item, optionally only those before `before`.
PriceSeries item_wholesale_series(const Dataset& dataset, std::string_view item_code,
                                  std::optional<Date> before = std::nullopt);

std::vector<double> difference(std::span<const double> values, int degree);
/// Inverse of `difference`: rebuilds the series from its d-th differences and
/// its first d values.
std::vector<double> undifference(std::span<const double> differenced, std::span<const double> head);

struct ArimaOrder {
  int p = 0;
  int d = 0;
  int q = 0;

  std::string str() const;
  static std::optional<ArimaOrder> parse(std::string_view text);  // "p,d,q"
  friend auto operator<=>(const ArimaOrder&, const ArimaOrder&) = default;
};

struct ArimaFit {
  ArimaOrder order;
  std::vector<double> ar;
  std::vector<double> ma;
  double intercept = 0.0;  // mean of the differenced series; estimated only when d == 0
  bool has_intercept = false;
  double ssr = 0.0;
  double sigma2 = 0.0;
  double aic = 0.0;
  std::size_t n_obs = 0;
  std::size_t n_eff = 0;
  std::vector<double> series;     // observations the model was fitted on
  std::vector<double> residuals;  // one-step residuals on the differenced scale
};

struct ArimaOptions {
  std::uint64_t seed = 0;
  int starts = 4;
  int max_evals = 4000;
};

/// Root-radius bound for the AR (stationarity) and MA (invertibility) parts.
inline constexpr double kRootTolerance = 1e-6;

/// True when every root of z^k - c1 z^(k-1) - ... - ck lies strictly inside
/// radius 1 - kRootTolerance.
bool is_stable(std::span<const double> coefficients);
/// Same test against an arbitrary radius.
bool roots_within(std::span<const double> coefficients, double radius);

/// Order search skips fits with an AR or MA root closer than 1.01 to the unit
/// circle (radius above 1/1.01): such boundary optima are artefacts of the
/// conditional likelihood rather than converged interior fits.
inline constexpr double kSelectionRootRadius = 1.0 / 1.01;

/// Conditional sum of squares over the differenced series. Pre-sample values
/// are the differenced-series mean and pre-sample residuals are zero, so all
/// n - d residuals enter the SSR.
ArimaFit fit_arima(std::span<const double> series, ArimaOrder order, const ArimaOptions& options = {});

double log_likelihood(std::size_t n_eff, double sigma2);
double aic(std::size_t k, double log_likelihood);
/// 2k - 2 lnL with k = p + q + 1 (+1 with an intercept).
double aic(const ArimaFit& fit);

struct OrderGrid {
  int p_max = 3;
  int d_max = 2;
  int q_max = 3;
};

/// Minimum-AIC order among fits whose roots respect kSelectionRootRadius;
/// ties go to smaller p+q, then smaller d, then smaller p.
ArimaOrder select_order(std::span<const double> series, const OrderGrid& grid = {},
                        const ArimaOptions& options = {});

inline constexpr double kForecastFloor = 0.01;

/// Recursive mean forecasts with future residuals at zero, integrated back d
/// times. Values are clamped below at `floor`.
std::vector<double> forecast(const ArimaFit& fit, int horizon,
                             double floor = -std::numeric_limits<double>::infinity());

/// Mean of the last `window` observations.
double mean_forecast(const PriceSeries& series, std::size_t window = 7);

nlohmann::json to_json(const ArimaFit& fit);

}  // namespace vegplan

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vegplan/dataio.hpp"

namespace vegplan {

/// Price -> daily quantity curve families.
///   Linear(a, b):      Q = a*p + b
///   LogShift(A, B, C): Q = A*ln(p - B) + C, defined for p > B
///   Power(a, b, c):    Q = a*p^b + c, defined for p > 0
enum class Family { Linear, LogShift, Power };

std::string_view to_string(Family f) noexcept;  // "linear", "log", "power"
std::optional<Family> parse_family(std::string_view text);
std::size_t param_count(Family f) noexcept;

struct PricePoint {
  double price = 0.0;     // daily revenue-weighted average sale price
  double quantity = 0.0;  // daily sold kg
};

struct DemandModel {
  Family family = Family::Linear;
  std::vector<double> params;
  double sse = 0.0;
  std::size_t n_points = 0;
  // Observed price range of the fitted data; zero when the model was built
  // from literal parameters.
  double price_min = 0.0;
  double price_max = 0.0;

  static DemandModel linear(double a, double b);
  static DemandModel log_shift(double A, double B, double C);
  static DemandModel power(double a, double b, double c);

  /// Formula value without clamping; throws Errc::DomainViolation outside
  /// the domain.
  double raw(double price) const;
  double slope(double price) const;
  /// Exclusive lower bound of the price domain.
  double domain_lower() const;
};

/// One point per day with category sales, returns excluded. Only days before
/// `before` are used when it is set. Throws Errc::TooFewPoints below 4 days.
std::vector<PricePoint> build_price_points(const Dataset& dataset, std::string_view category,
                                           std::optional<Date> before = std::nullopt);

struct FitOptions {
  std::uint64_t seed = 0;
  int random_starts = 4;  // on top of the fixed start grid of 8
};

/// Least-squares fit. Linear is solved in closed form; LogShift and Power
/// profile out their two linear coefficients and run a multi-start simplex
/// over the remaining shape parameter (B or the exponent).
DemandModel fit(std::span<const PricePoint> points, Family family, const FitOptions& options = {});

/// Minimum-SSE family; near-ties go to fewer parameters, then Linear <
/// LogShift < Power.
DemandModel select_best(std::span<const PricePoint> points, const FitOptions& options = {});

double sum_squared_error(const DemandModel& model, std::span<const PricePoint> points);

/// Predicted quantity, truncated below at 0.
double eval(const DemandModel& model, double price);

/// Smallest price with zero predicted demand, in closed form for all three
/// families. Empty when demand stays positive (or beyond 10x the observed max
/// price). Throws Errc::NotDecreasing for models that do not fall with price.
std::optional<double> zero_demand_price(const DemandModel& model);

nlohmann::json to_json(const DemandModel& model);
DemandModel demand_model_from_json(const nlohmann::json& j);

}  // namespace vegplan

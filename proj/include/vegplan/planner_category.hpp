#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vegplan/demand.hpp"

namespace vegplan {

/// Margin that realises the strict inequalities price > wholesale and
/// price inside the open demand domain.
inline constexpr double kPriceMargin = 1e-3;
/// Absolute price tolerance of the golden-section search.
inline constexpr double kPriceTolerance = 1e-6;

/// Cost per kilogram actually sold: wholesale / (1 - loss).
double effective_unit_cost(double wholesale, double loss);

struct PriceInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Searchable prices: [max(floor, domain lower + margin), zero-demand price -
/// margin]. Models without a zero-demand price are capped at 10x their
/// observed maximum price. Throws Errc::EmptyInterval or Errc::NotDecreasing.
PriceInterval price_interval(const DemandModel& demand, double price_floor);

struct PriceOptimum {
  double price = 0.0;
  double quantity = 0.0;  // predicted sales at `price`
  double profit = 0.0;    // (price - cost) * quantity
};

/// Maximises (p - cost) * Q(p) over price_interval(demand, price_floor) by
/// golden-section search. Throws Errc::NoProfitablePrice when the best margin
/// is not positive.
PriceOptimum optimal_price(const DemandModel& demand, double cost, double price_floor);

struct CategoryInputs {
  std::string category;  // display name
  DemandModel demand;
  double loss_rate = 0.0;
  std::vector<double> wholesale_forecasts;  // one per planned day
};

enum class PlanStatus { Planned, NoProfitablePrice, EmptyInterval, NotDecreasing, InvalidInput };

std::string_view to_string(PlanStatus status) noexcept;

struct CategoryPlanRow {
  int day_index = 0;  // 1-based
  std::string category;
  double supply_kg = 0.0;
  double price = 0.0;
  double predicted_sales_kg = 0.0;
  double expected_profit = 0.0;
  double wholesale = 0.0;
  double loss_rate = 0.0;
  PlanStatus status = PlanStatus::Planned;  // anything else is a flagged all-zero row
};

/// Independent (category, day) solves, ordered by (day, category name).
/// Failures never abort the plan; they become flagged zero rows.
std::vector<CategoryPlanRow> plan_category_week(std::span<const CategoryInputs> inputs, int horizon = 7);

}  // namespace vegplan

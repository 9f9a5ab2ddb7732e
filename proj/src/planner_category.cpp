#include "vegplan/planner_category.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "vegplan/error.hpp"
#include "vegplan/numeric.hpp"

namespace vegplan {

double effective_unit_cost(double wholesale, double loss) {
  if (!(loss >= 0.0 && loss < 1.0)) throw Error(Errc::LossOutOfRange, "loss rate " + std::to_string(loss));
  if (!(wholesale > 0.0)) throw Error(Errc::NonpositivePrice, "wholesale " + std::to_string(wholesale));
  return wholesale / (1.0 - loss);
}

PriceInterval price_interval(const DemandModel& demand, double price_floor) {
  const auto zero = zero_demand_price(demand);
  double hi = 0.0;
  if (zero) {
    hi = *zero - kPriceMargin;
  } else if (demand.price_max > 0) {
    hi = 10.0 * demand.price_max;
  } else {
    throw Error(Errc::EmptyInterval, "demand never reaches zero and no observed price range");
  }
  const double lo = std::max(price_floor, demand.domain_lower() + kPriceMargin);
  if (!(lo < hi))
    throw Error(Errc::EmptyInterval, "price floor " + std::to_string(lo) + " >= ceiling " + std::to_string(hi));
  return {lo, hi};
}

PriceOptimum optimal_price(const DemandModel& demand, double cost, double price_floor) {
  const PriceInterval interval = price_interval(demand, price_floor);
  auto profit = [&](double p) { return (p - cost) * eval(demand, p); };
  const auto best = numeric::golden_section_max(profit, interval.lo, interval.hi, kPriceTolerance);

#ifndef NDEBUG
  // Unimodality cross-check on a 100-point grid.
  for (int i = 0; i <= 100; ++i) {
    const double p = interval.lo + (interval.hi - interval.lo) * i / 100.0;
    assert(profit(p) <= best.value + 1e-6 * (1.0 + std::abs(best.value)));
  }
#endif

  if (!(best.value > 0.0))
    throw Error(Errc::NoProfitablePrice, "best margin " + std::to_string(best.value) + " at cost " + std::to_string(cost));
  return {best.x, eval(demand, best.x), best.value};
}

std::string_view to_string(PlanStatus status) noexcept {
  switch (status) {
    case PlanStatus::Planned: return "planned";
    case PlanStatus::NoProfitablePrice: return "no_profitable_price";
    case PlanStatus::EmptyInterval: return "empty_interval";
    case PlanStatus::NotDecreasing: return "not_decreasing";
    case PlanStatus::InvalidInput: return "invalid_input";
  }
  return "planned";
}

namespace {

CategoryPlanRow solve_day(const CategoryInputs& in, int day) {
  CategoryPlanRow row;
  row.day_index = day;
  row.category = in.category;
  row.loss_rate = in.loss_rate;
  row.wholesale = static_cast<std::size_t>(day) <= in.wholesale_forecasts.size()
                      ? in.wholesale_forecasts[static_cast<std::size_t>(day - 1)]
                      : 0.0;
  try {
    const double cost = effective_unit_cost(row.wholesale, in.loss_rate);
    const auto opt = optimal_price(in.demand, cost, row.wholesale * (1.0 + kPriceMargin));
    row.price = opt.price;
    row.predicted_sales_kg = opt.quantity;
    row.supply_kg = opt.quantity / (1.0 - in.loss_rate);
    row.expected_profit = row.price * row.predicted_sales_kg - row.wholesale * row.supply_kg;
    if (!(row.supply_kg > 0.0)) throw Error(Errc::NoProfitablePrice, "zero supply at optimum");
  } catch (const Error& e) {
    switch (e.code()) {
      case Errc::NoProfitablePrice: row.status = PlanStatus::NoProfitablePrice; break;
      case Errc::EmptyInterval: row.status = PlanStatus::EmptyInterval; break;
      case Errc::NotDecreasing: row.status = PlanStatus::NotDecreasing; break;
      default: row.status = PlanStatus::InvalidInput; break;
    }
    row.supply_kg = row.price = row.predicted_sales_kg = row.expected_profit = 0.0;
  }
  return row;
}

}  // namespace

std::vector<CategoryPlanRow> plan_category_week(std::span<const CategoryInputs> inputs, int horizon) {
  std::vector<const CategoryInputs*> ordered;
  for (const auto& in : inputs) ordered.push_back(&in);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const CategoryInputs* a, const CategoryInputs* b) { return a->category < b->category; });
  std::vector<CategoryPlanRow> rows;
  rows.reserve(ordered.size() * static_cast<std::size_t>(std::max(horizon, 0)));
  for (int day = 1; day <= horizon; ++day)
    for (const auto* in : ordered) rows.push_back(solve_day(*in, day));
  return rows;
}

}  // namespace vegplan

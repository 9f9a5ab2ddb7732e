#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vegplan/dataio.hpp"

namespace vegplan {

enum class Granularity { Day, Month, Quarter };
enum class Level { Category, Item };

std::string_view to_string(Granularity g) noexcept;
std::optional<Granularity> parse_granularity(std::string_view text);

/// Calendar period. Quarters are Jan-Mar, Apr-Jun, Jul-Sep, Oct-Dec.
struct PeriodKey {
  Granularity granularity = Granularity::Day;
  std::int32_t index = 0;  // day: days since epoch; month: year*12+m-1; quarter: year*4+q-1

  static PeriodKey of(Date date, Granularity granularity);
  Date start() const;
  PeriodKey next() const { return {granularity, index + 1}; }
  /// 2023-07-01, 2023-07 or 2023Q3.
  std::string label() const;

  friend auto operator<=>(const PeriodKey&, const PeriodKey&) = default;
};

/// Every period from the first to the last dataset date, inclusive.
std::vector<PeriodKey> period_range(Date first, Date last, Granularity granularity);

struct SalesAggregate {
  PeriodKey period;
  std::string group;  // category code or item code
  std::string label;  // category or item name
  double total_kg = 0.0;     // sold minus returned
  double sold_kg = 0.0;
  double returned_kg = 0.0;
  double revenue = 0.0;      // sum of price * kg over sale rows
  std::optional<double> avg_unit_price;  // revenue / sold_kg; absent when nothing sold
};

/// Dense aggregate: one entry per (period, group) over the dataset span.
/// Category level covers every catalog category; item level every item with
/// at least one transaction. Ordered by (period, group label, group).
std::vector<SalesAggregate> aggregate_sales(const Dataset& dataset, Granularity granularity,
                                            Level level);

struct ProfitRow {
  PeriodKey period;
  std::string category_code;
  std::string category_name;
  double revenue = 0.0;       // sale price * sold kg
  double returns_value = 0.0; // sale price * returned kg
  double cost = 0.0;          // wholesale * (1 + loss) * sold kg
  double profit = 0.0;
};

struct ProfitReport {
  std::vector<ProfitRow> rows;
  std::size_t excluded_rows = 0;  // sale rows with no resolvable wholesale quote or loss rate
  std::vector<std::string> excluded_items;
};

/// revenue - returns - sum wholesale*(1+loss)*kg per category and period.
/// Wholesale quotes are forward filled; unresolvable sale rows are excluded
/// and counted.
ProfitReport category_profit(const Dataset& dataset, Granularity granularity);

double pearson(std::span<const double> x, std::span<const double> y);

struct CorrelationMatrix {
  std::vector<std::string> groups;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> values;
  std::vector<std::string> dropped;  // labels of zero-variance series
  std::size_t periods = 0;

  double at(std::size_t i, std::size_t j) const { return values[i][j]; }
};

struct LabeledSeries {
  std::string group;
  std::string label;
  std::vector<double> values;
};

/// Pairwise pearson over the given series; zero-variance series are dropped
/// into `dropped`. Output keeps the input order.
CorrelationMatrix correlation_matrix(std::span<const LabeledSeries> series);
/// Matrix over per-period total_kg series, labels sorted by name. `top_n`
/// keeps only the highest-volume groups.
CorrelationMatrix correlation_matrix(const Dataset& dataset, Level level, Granularity granularity,
                                     std::optional<std::size_t> top_n = std::nullopt);

struct SellerTotal {
  std::string item_code;
  std::string item_name;
  double total_kg = 0.0;
};

/// Highest net volume first; ties by item code.
std::vector<SellerTotal> top_sellers(const Dataset& dataset, std::size_t n);

}  // namespace vegplan

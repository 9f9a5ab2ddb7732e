#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vegplan/dataio.hpp"
#include "vegplan/demand.hpp"

namespace vegplan {

struct ItemCandidate {
  std::string item_code;
  std::string item_name;
  std::string category;       // category code
  std::string category_name;
  double wholesale_forecast = 0.0;
  double loss_rate = 0.0;
  double share = 0.0;  // item kg / category kg over the lookback window
};

/// How an item's demand is derived from its category curve.
///   ShareScaled:  share * Q_category(p)
///   Literal:      Q_category(p), every item gets the whole category curve
enum class DemandMode { ShareScaled, Literal };

std::string_view to_string(DemandMode mode) noexcept;  // "share", "literal"
std::optional<DemandMode> parse_demand_mode(std::string_view text);

struct SelectionConfig {
  std::size_t min_items = 27;
  std::size_t max_items = 33;
  double min_display_kg = 2.5;
  std::size_t required_categories = 6;
  DemandMode demand_mode = DemandMode::ShareScaled;
  int restarts = 32;
  std::uint64_t seed = 0;
  int max_stale_moves = 2000;
  // An item may be stocked at a loss down to -factor * min_display_kg * wholesale.
  double stocking_loss_factor = 1.0;
};

/// Items with at least one sale row in [first, last]. Wholesale is the mean
/// of the last `mean_window` quotes up to `last`. Items lacking a quote or a
/// loss rate are skipped and listed in `skipped`. Ordered by item code.
std::vector<ItemCandidate> candidate_pool(const Dataset& dataset, Date first, Date last,
                                          std::size_t mean_window = 7,
                                          std::vector<std::string>* skipped = nullptr);

double item_demand(const DemandModel& category_model, const ItemCandidate& candidate, double price,
                   DemandMode mode);

struct ItemOptimum {
  bool feasible = false;
  double price = 0.0;
  double supply_kg = 0.0;  // max(min display, sales / (1 - loss))
  double predicted_sales_kg = 0.0;
  double profit = 0.0;     // price * sales - wholesale * supply
  bool display_bound = false;  // supply sits at the display minimum
};

/// Best single-item price with supply = max(min_display, Q/(1-loss)). Both
/// sides of the kink are searched. Throws Errc::EmptyFeasibleInterval when no
/// price clears the wholesale floor below the zero-demand price.
ItemOptimum optimal_item_price(const ItemCandidate& candidate, const DemandModel& category_model,
                               const SelectionConfig& config);

/// Total profit of a 0/1 selection, or empty when it breaks the count,
/// coverage or per-item feasibility constraints.
std::optional<double> evaluate_selection(std::span<const char> selection,
                                         std::span<const ItemOptimum> optima,
                                         std::span<const ItemCandidate> pool,
                                         const SelectionConfig& config);

struct ItemPlanRow {
  std::string item_code;
  std::string item_name;
  std::string category;
  bool selected = false;
  double supply_kg = 0.0;  // 0 when not selected
  double price = 0.0;      // 0 when not selected
  double predicted_sales_kg = 0.0;
  double expected_profit = 0.0;
};

struct AssortmentPlan {
  std::vector<ItemPlanRow> rows;  // one per pool candidate, pool order
  double total_profit = 0.0;
  std::size_t selected_count = 0;
  std::size_t categories_covered = 0;
};

using CategoryModels = std::map<std::string, DemandModel>;  // by category code

/// Randomised-restart local search. Restart 0 starts from the greedy plan
/// (best item per category, then by descending profit up to min_items); the
/// others from a random 0/1 vector repaired to feasibility. Each restart
/// hill-climbs over add/drop/swap moves until `max_stale_moves` consecutive
/// non-improving moves, then sweeps all moves to a local optimum.
/// Throws Errc::PoolTooSmall, Errc::CategoryUncoverable or
/// Errc::NoFeasibleAssortment.
AssortmentPlan optimize_assortment(std::span<const ItemCandidate> pool, const CategoryModels& models,
                                   const SelectionConfig& config);

/// The greedy starting plan alone (no local search).
AssortmentPlan greedy_assortment(std::span<const ItemCandidate> pool, const CategoryModels& models,
                                 const SelectionConfig& config);

/// Exact optimum by enumerating every 0/1 vector; pools above 16 items throw
/// Errc::PoolTooLarge. Same preconditions and errors as optimize_assortment.
AssortmentPlan brute_force_assortment(std::span<const ItemCandidate> pool, const CategoryModels& models,
                                      const SelectionConfig& config);

}  // namespace vegplan

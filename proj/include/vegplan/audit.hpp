#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vegplan/planner_category.hpp"
#include "vegplan/planner_items.hpp"

namespace vegplan {

/// Relative tolerance for the equality constraints (supply balance, demand
/// curve, profit identity).
inline constexpr double kAuditTolerance = 1e-6;

struct AuditCheck {
  std::string plan;        // "category" or "item"
  std::string constraint;  // e.g. "c2_price_above_wholesale"
  std::string row;         // row id, or "plan" for whole-plan checks
  bool passed = true;
  std::string detail;
};

struct AuditReport {
  std::vector<AuditCheck> checks;

  std::size_t failures() const;
  bool passed() const { return failures() == 0; }
  void append(const AuditReport& other);
  nlohmann::json to_json() const;
};

/// Category plan constraints:
///   c1 supply*(1-loss) = predicted sales    c2 price > wholesale
///   c3 supply > 0 and price > 0             c4 predicted sales = Q(price)
/// plus the profit identity and one row per (category, day). Rows with zero
/// supply and zero price are flagged non-plans and only checked for being
/// all zero.
AuditReport audit_category_plan(std::span<const CategoryPlanRow> rows, std::span<const CategoryInputs> inputs);

/// Item plan constraints, numbered as in the item model:
///   i1 supply*(1-loss) >= predicted sales   i2 price > wholesale
///   i3 supply >= min display                i4 min_items <= count <= max_items
///   i5 unselected supply = 0                i6 unselected price = 0
///   i7 sales and profit follow the curve    i8 category coverage
///   i9 one 0/1 row per candidate
/// In share mode the per-category allocated demand is also checked against
/// the category curve; in literal mode the overshoot is only reported.
AuditReport audit_item_plan(std::span<const ItemPlanRow> rows, std::span<const ItemCandidate> pool,
                            const CategoryModels& models, const SelectionConfig& config);

/// Re-audits the plan files in `dir` (whichever of the category and item
/// plans are present). Throws Errc::MalformedPlanFile.
AuditReport audit_plan(const std::filesystem::path& dir);

}  // namespace vegplan

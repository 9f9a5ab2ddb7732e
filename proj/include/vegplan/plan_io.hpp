#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vegplan/planner_category.hpp"
#include "vegplan/planner_items.hpp"

namespace vegplan {

// File names inside an output directory.
inline constexpr const char* kCategoryPlanFile = "category_plan.csv";
inline constexpr const char* kCategoryContextFile = "category_plan_context.json";
inline constexpr const char* kItemPlanFile = "item_plan.csv";
inline constexpr const char* kItemAuditFile = "item_plan_audit.json";

/// `# key=value ...` line placed above CSV headers and skipped by readers.
std::string provenance_comment(const nlohmann::json& provenance);

void write_category_plan(const std::filesystem::path& path, std::span<const CategoryPlanRow> rows,
                         const nlohmann::json& provenance);
/// Reads day_index, category, supply_kg, price, predicted_sales_kg and
/// expected_profit; wholesale, loss and status are left default.
std::vector<CategoryPlanRow> read_category_plan(const std::filesystem::path& path);

void write_item_plan(const std::filesystem::path& path, std::span<const ItemPlanRow> rows,
                     const nlohmann::json& provenance);
std::vector<ItemPlanRow> read_item_plan(const std::filesystem::path& path);

nlohmann::json category_context_json(std::span<const CategoryInputs> inputs);
std::vector<CategoryInputs> category_inputs_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SelectionConfig& config);
SelectionConfig selection_config_from_json(const nlohmann::json& j, SelectionConfig defaults = {});
nlohmann::json to_json(const ItemCandidate& candidate);
ItemCandidate item_candidate_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CategoryModels& models);
CategoryModels category_models_from_json(const nlohmann::json& j);

}  // namespace vegplan

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vegplan/analytics.hpp"
#include "vegplan/audit.hpp"
#include "vegplan/dataio.hpp"
#include "vegplan/demand.hpp"
#include "vegplan/forecast.hpp"
#include "vegplan/planner_category.hpp"
#include "vegplan/planner_items.hpp"

namespace vegplan {

struct RunConfig {
  DatasetPaths inputs;
  std::filesystem::path output_dir = "out";
  int horizon = 7;
  std::optional<Date> plan_start;      // default: day after the last sale
  std::optional<Date> item_plan_date;  // default: plan_start
  int item_window_days = 7;
  std::uint64_t seed = 0;
  SelectionConfig selection;
  std::optional<Family> demand_family;     // default: best of all three
  std::optional<ArimaOrder> arima_order;   // default: AIC order search
  Granularity correlation_granularity = Granularity::Quarter;
  std::size_t top_items = 15;
  std::size_t expected_categories = kCategoryCount;
};

nlohmann::json to_json(const RunConfig& config);
/// Overlays the keys present in `j` on `base`. Throws Errc::InvalidConfig.
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});
/// FNV-1a of the serialised config without the output directory, as 16 hex digits.
std::string config_hash(const RunConfig& config);

// Artifact names inside the output directory.
inline constexpr const char* kDatasetReportFile = "dataset_report.json";
inline constexpr const char* kAnalyticsSummaryFile = "analytics_summary.json";
inline constexpr const char* kDemandModelsFile = "demand_models.json";
inline constexpr const char* kWholesaleForecastFile = "wholesale_forecast.json";
inline constexpr const char* kAuditReportFile = "audit_report.json";
inline constexpr const char* kErrorFile = "error.json";

enum class Stage { Ingest, Analyze, FitDemand, ForecastWholesale, PlanCategories, PlanItems, Audit };

std::string_view to_string(Stage stage) noexcept;  // "ingest", "fit-demand", ...

/// Sales-weighted mean loss rate of the category's items over sales before
/// `before`; the plain mean of known item losses when nothing sold.
std::optional<double> category_loss_rate(const Dataset& dataset, std::string_view category_code,
                                         std::optional<Date> before = std::nullopt);

struct CategoryForecast {
  std::string code;
  std::string name;
  std::optional<ArimaFit> fit;  // empty when the mean fallback was used
  std::vector<double> values;
  std::string note;
};

class StageError : public std::runtime_error {
 public:
  StageError(Stage stage, std::string code, const std::string& message)
      : std::runtime_error(message), stage_(stage), code_(std::move(code)) {}

  Stage stage() const noexcept { return stage_; }
  const std::string& code() const noexcept { return code_; }

 private:
  Stage stage_;
  std::string code_;
};

/// Stage runner. Each stage runs its prerequisites on demand, once, and
/// writes its artifacts to the output directory.
class Pipeline {
 public:
  explicit Pipeline(RunConfig config);

  const RunConfig& config() const noexcept { return config_; }
  nlohmann::json provenance(Stage stage) const;

  const Dataset& ingest();
  void analyze();
  const std::map<std::string, DemandModel>& fit_demand();
  const std::vector<CategoryForecast>& forecast_wholesale();
  const std::vector<CategoryPlanRow>& plan_categories();
  const AssortmentPlan& plan_items();
  const AuditReport& audit();
  /// Every stage in order.
  void run();

  Date plan_start();
  Date item_plan_date();

 private:
  template <typename F>
  decltype(auto) guarded(Stage stage, F&& body);
  void write_json(const std::string& name, const nlohmann::json& j) const;

  RunConfig config_;
  std::string hash_;
  std::optional<Dataset> dataset_;
  bool analyzed_ = false;
  std::optional<std::map<std::string, DemandModel>> models_;
  std::optional<std::vector<CategoryForecast>> forecasts_;
  std::optional<std::vector<CategoryPlanRow>> category_plan_;
  std::optional<AssortmentPlan> item_plan_;
  std::optional<AuditReport> audit_;
};

/// Writes error.json {stage, code, message} into `dir` (best effort).
void write_error_json(const std::filesystem::path& dir, const StageError& error);

}  // namespace vegplan

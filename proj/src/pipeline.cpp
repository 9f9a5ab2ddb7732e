#include "vegplan/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include "vegplan/csv.hpp"
#include "vegplan/error.hpp"
#include "vegplan/numeric.hpp"
#include "vegplan/plan_io.hpp"

namespace vegplan {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Stage stage) noexcept {
  switch (stage) {
    case Stage::Ingest: return "ingest";
    case Stage::Analyze: return "analyze";
    case Stage::FitDemand: return "fit-demand";
    case Stage::ForecastWholesale: return "forecast-wholesale";
    case Stage::PlanCategories: return "plan-categories";
    case Stage::PlanItems: return "plan-items";
    case Stage::Audit: return "audit";
  }
  return "unknown";
}

// ---- configuration ----------------------------------------------------------

json to_json(const RunConfig& c) {
  json sel = to_json(c.selection);
  sel.erase("seed");
  return {{"inputs",
           {{"catalog", c.inputs.catalog.generic_string()},
            {"transactions", c.inputs.transactions.generic_string()},
            {"wholesale", c.inputs.wholesale.generic_string()},
            {"loss", c.inputs.loss.generic_string()}}},
          {"output_dir", c.output_dir.generic_string()},
          {"horizon", c.horizon},
          {"plan_start", c.plan_start ? json(c.plan_start->str()) : json(nullptr)},
          {"item_plan_date", c.item_plan_date ? json(c.item_plan_date->str()) : json(nullptr)},
          {"item_window_days", c.item_window_days},
          {"seed", c.seed},
          {"selection", sel},
          {"demand_family", c.demand_family ? std::string(to_string(*c.demand_family)) : "auto"},
          {"arima_order", c.arima_order ? c.arima_order->str() : "auto"},
          {"correlation_granularity", std::string(to_string(c.correlation_granularity))},
          {"top_items", c.top_items},
          {"expected_categories", c.expected_categories}};
}

namespace {

std::optional<Date> optional_date(const json& j, const char* key, std::optional<Date> fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  auto d = Date::parse(v.get<std::string>());
  if (!d) throw Error(Errc::InvalidConfig, std::string(key) + " must be YYYY-MM-DD");
  return d;
}

}  // namespace

RunConfig run_config_from_json(const json& j, RunConfig c) {
  try {
    if (!j.is_object()) throw Error(Errc::InvalidConfig, "config must be a JSON object");
    if (j.contains("data_dir")) c.inputs = DatasetPaths::in_directory(j.at("data_dir").get<std::string>());
    if (j.contains("inputs")) {
      const auto& in = j.at("inputs");
      if (in.contains("catalog")) c.inputs.catalog = in.at("catalog").get<std::string>();
      if (in.contains("transactions")) c.inputs.transactions = in.at("transactions").get<std::string>();
      if (in.contains("wholesale")) c.inputs.wholesale = in.at("wholesale").get<std::string>();
      if (in.contains("loss")) c.inputs.loss = in.at("loss").get<std::string>();
    }
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    c.horizon = j.value("horizon", c.horizon);
    c.plan_start = optional_date(j, "plan_start", c.plan_start);
    c.item_plan_date = optional_date(j, "item_plan_date", c.item_plan_date);
    c.item_window_days = j.value("item_window_days", c.item_window_days);
    c.seed = j.value("seed", c.seed);
    if (j.contains("selection")) c.selection = selection_config_from_json(j.at("selection"), c.selection);
    if (j.contains("demand_family")) {
      const auto text = j.at("demand_family").get<std::string>();
      if (text == "auto") {
        c.demand_family.reset();
      } else if (auto f = parse_family(text)) {
        c.demand_family = *f;
      } else {
        throw Error(Errc::InvalidConfig, "demand_family must be auto, linear, log or power");
      }
    }
    if (j.contains("arima_order")) {
      const auto text = j.at("arima_order").get<std::string>();
      if (text == "auto") {
        c.arima_order.reset();
      } else if (auto o = ArimaOrder::parse(text)) {
        c.arima_order = *o;
      } else {
        throw Error(Errc::InvalidConfig, "arima_order must be auto or p,d,q");
      }
    }
    if (j.contains("correlation_granularity")) {
      auto g = parse_granularity(j.at("correlation_granularity").get<std::string>());
      if (!g) throw Error(Errc::InvalidConfig, "correlation_granularity must be day, month or quarter");
      c.correlation_granularity = *g;
    }
    c.top_items = j.value("top_items", c.top_items);
    c.expected_categories = j.value("expected_categories", c.expected_categories);
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, e.what());
  }
  if (c.horizon < 1) throw Error(Errc::InvalidConfig, "horizon must be at least 1");
  if (c.item_window_days < 1) throw Error(Errc::InvalidConfig, "item_window_days must be at least 1");
  return c;
}

RunConfig load_run_config(const fs::path& path, RunConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::FileNotFound, path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, path.string() + ": " + e.what());
  }
  RunConfig c = run_config_from_json(j, std::move(base));
  // Relative paths in a config file are taken from the file's directory.
  const fs::path root = path.parent_path();
  auto anchor = [&](fs::path& p, bool present) {
    if (present && p.is_relative()) p = root / p;
  };
  const bool inputs = j.contains("inputs") || j.contains("data_dir");
  anchor(c.inputs.catalog, inputs);
  anchor(c.inputs.transactions, inputs);
  anchor(c.inputs.wholesale, inputs);
  anchor(c.inputs.loss, inputs);
  anchor(c.output_dir, j.contains("output_dir"));
  return c;
}

std::string config_hash(const RunConfig& config) {
  json j = to_json(config);
  j.erase("output_dir");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(numeric::fnv1a(j.dump())));
  return buf;
}

// ---- helpers ----------------------------------------------------------------

std::optional<double> category_loss_rate(const Dataset& dataset, std::string_view category_code,
                                         std::optional<Date> before) {
  std::map<std::string, double> kg;
  for (const auto& t : dataset.transactions()) {
    if (t.is_return || (before && t.date >= *before)) continue;
    const auto& item = dataset.item(t.item_code);
    if (item.category_code == category_code) kg[t.item_code] += t.quantity_kg;
  }
  double weighted = 0.0, total = 0.0, plain = 0.0;
  std::size_t known = 0;
  for (const auto& item : dataset.catalog()) {
    if (item.category_code != category_code) continue;
    auto loss = dataset.loss_rate(item.item_code);
    if (!loss) continue;
    plain += *loss;
    ++known;
    auto it = kg.find(item.item_code);
    if (it == kg.end()) continue;
    weighted += it->second * *loss;
    total += it->second;
  }
  if (total > 0.0) return weighted / total;
  if (known > 0) return plain / static_cast<double>(known);
  return std::nullopt;
}

void write_error_json(const fs::path& dir, const StageError& error) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::ofstream out(dir / kErrorFile, std::ios::binary);
  if (!out) return;
  out << json{{"stage", std::string(to_string(error.stage()))}, {"code", error.code()}, {"message", error.what()}}.dump(2)
      << '\n';
}

namespace {

std::string fmt(double v) { return csv::format_double(v); }

class CsvFile {
 public:
  CsvFile(const fs::path& path, const json& provenance, std::vector<std::string> header)
      : out_(path, std::ios::binary) {
    if (!out_) throw Error(Errc::FileNotFound, "cannot write " + path.string());
    out_ << provenance_comment(provenance) << '\n';
    csv::write_row(out_, header);
  }
  void row(const std::vector<std::string>& fields) { csv::write_row(out_, fields); }

 private:
  std::ofstream out_;
};

void write_aggregates(const fs::path& path, const json& prov, const std::vector<SalesAggregate>& rows,
                      const char* group_col, const char* label_col) {
  CsvFile f(path, prov, {"period", group_col, label_col, "total_kg", "sold_kg", "returned_kg", "revenue", "avg_unit_price"});
  for (const auto& a : rows)
    f.row({a.period.label(), a.group, a.label, fmt(a.total_kg), fmt(a.sold_kg), fmt(a.returned_kg), fmt(a.revenue),
           a.avg_unit_price ? fmt(*a.avg_unit_price) : ""});
}

void write_correlation(const fs::path& path, const json& prov, const CorrelationMatrix& m) {
  std::vector<std::string> header{"label"};
  header.insert(header.end(), m.labels.begin(), m.labels.end());
  CsvFile f(path, prov, header);
  for (std::size_t i = 0; i < m.labels.size(); ++i) {
    std::vector<std::string> row{m.labels[i]};
    for (std::size_t j = 0; j < m.labels.size(); ++j) row.push_back(fmt(m.at(i, j)));
    f.row(row);
  }
}

}  // namespace

// ---- pipeline ---------------------------------------------------------------

Pipeline::Pipeline(RunConfig config) : config_(std::move(config)), hash_(config_hash(config_)) {}

json Pipeline::provenance(Stage stage) const {
  return {{"config_hash", hash_}, {"seed", config_.seed}, {"stage", std::string(to_string(stage))}};
}

template <typename F>
decltype(auto) Pipeline::guarded(Stage stage, F&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, std::string(to_string(e.code())), e.what());
  } catch (const json::exception& e) {
    throw StageError(stage, "MalformedJson", e.what());
  } catch (const fs::filesystem_error& e) {
    throw StageError(stage, "FileSystem", e.what());
  }
}

void Pipeline::write_json(const std::string& name, const json& j) const {
  fs::create_directories(config_.output_dir);
  std::ofstream out(config_.output_dir / name, std::ios::binary);
  if (!out) throw Error(Errc::FileNotFound, "cannot write " + (config_.output_dir / name).string());
  out << j.dump(2) << '\n';
}

const Dataset& Pipeline::ingest() {
  if (dataset_) return *dataset_;
  return guarded(Stage::Ingest, [&]() -> const Dataset& {
    Dataset ds = load_dataset(config_.inputs, config_.expected_categories);
    if (ds.empty()) throw Error(Errc::EmptyDataset, "no transactions");
    json report = to_json(validate_dataset(ds));
    report["provenance"] = provenance(Stage::Ingest);
    write_json(kDatasetReportFile, report);
    dataset_ = std::move(ds);
    return *dataset_;
  });
}

Date Pipeline::plan_start() {
  if (config_.plan_start) return *config_.plan_start;
  return ingest().last_date() + 1;
}

Date Pipeline::item_plan_date() {
  if (config_.item_plan_date) return *config_.item_plan_date;
  return plan_start();
}

void Pipeline::analyze() {
  if (analyzed_) return;
  const Dataset& ds = ingest();
  guarded(Stage::Analyze, [&] {
    const json prov = provenance(Stage::Analyze);
    const fs::path dir = config_.output_dir;
    fs::create_directories(dir);
    json summary{{"provenance", prov}};

    write_aggregates(dir / "sales_category_daily.csv", prov, aggregate_sales(ds, Granularity::Day, Level::Category),
                     "category_code", "category");
    write_aggregates(dir / "sales_category_monthly.csv", prov,
                     aggregate_sales(ds, Granularity::Month, Level::Category), "category_code", "category");
    write_aggregates(dir / "sales_item_monthly.csv", prov, aggregate_sales(ds, Granularity::Month, Level::Item),
                     "item_code", "item");

    const ProfitReport profit = category_profit(ds, Granularity::Month);
    {
      CsvFile f(dir / "profit_category_monthly.csv", prov,
                {"period", "category_code", "category", "revenue", "returns_value", "cost", "profit"});
      for (const auto& r : profit.rows)
        f.row({r.period.label(), r.category_code, r.category_name, fmt(r.revenue), fmt(r.returns_value), fmt(r.cost),
               fmt(r.profit)});
    }
    summary["profit"] = {{"excluded_rows", profit.excluded_rows}, {"excluded_items", profit.excluded_items}};

    auto correlate = [&](Level level, std::optional<std::size_t> top, const char* file, const char* key) {
      std::vector<Granularity> order{config_.correlation_granularity};
      if (config_.correlation_granularity == Granularity::Quarter) order.push_back(Granularity::Month);
      if (config_.correlation_granularity != Granularity::Day) order.push_back(Granularity::Day);
      for (Granularity g : order) {
        try {
          const CorrelationMatrix m = correlation_matrix(ds, level, g, top);
          write_correlation(dir / file, prov, m);
          summary[key] = {{"granularity", std::string(to_string(g))},
                          {"periods", m.periods},
                          {"labels", m.labels},
                          {"dropped", m.dropped}};
          return;
        } catch (const Error& e) {
          if (e.code() != Errc::InsufficientPeriods) {
            summary[key] = {{"error", e.what()}};
            return;
          }
        }
      }
      summary[key] = {{"error", "fewer than two periods at every granularity"}};
    };
    correlate(Level::Category, std::nullopt, "correlation_categories.csv", "category_correlation");
    correlate(Level::Item, config_.top_items, "correlation_items.csv", "item_correlation");

    {
      CsvFile f(dir / "top_sellers.csv", prov, {"rank", "item_code", "item_name", "total_kg"});
      const auto top = top_sellers(ds, config_.top_items);
      for (std::size_t i = 0; i < top.size(); ++i)
        f.row({std::to_string(i + 1), top[i].item_code, top[i].item_name, fmt(top[i].total_kg)});
    }
    summary["files"] = {"sales_category_daily.csv", "sales_category_monthly.csv", "sales_item_monthly.csv",
                        "profit_category_monthly.csv", "correlation_categories.csv", "correlation_items.csv",
                        "top_sellers.csv"};
    write_json(kAnalyticsSummaryFile, summary);
  });
  analyzed_ = true;
}

const std::map<std::string, DemandModel>& Pipeline::fit_demand() {
  if (models_) return *models_;
  const Dataset& ds = ingest();
  const Date before = plan_start();
  return guarded(Stage::FitDemand, [&]() -> const std::map<std::string, DemandModel>& {
    std::map<std::string, DemandModel> models;
    json entries = json::array();
    for (const auto& cat : ds.categories()) {
      json e{{"category_code", cat.code}, {"category", cat.name}};
      try {
        const auto points = build_price_points(ds, cat.code, before);
        FitOptions opts{numeric::derive_seed(config_.seed, "fit-demand/" + cat.code)};
        DemandModel m = config_.demand_family ? fit(points, *config_.demand_family, opts) : select_best(points, opts);
        e["model"] = to_json(m);
        if (auto z = zero_demand_price(m)) e["zero_demand_price"] = *z;
        models.emplace(cat.code, std::move(m));
      } catch (const Error& err) {
        e["error"] = {{"code", std::string(to_string(err.code()))}, {"message", err.what()}};
      }
      entries.push_back(std::move(e));
    }
    write_json(kDemandModelsFile,
               {{"provenance", provenance(Stage::FitDemand)}, {"fit_before", before.str()}, {"categories", entries}});
    models_ = std::move(models);
    return *models_;
  });
}

const std::vector<CategoryForecast>& Pipeline::forecast_wholesale() {
  if (forecasts_) return *forecasts_;
  const Dataset& ds = ingest();
  const Date before = plan_start();
  return guarded(Stage::ForecastWholesale, [&]() -> const std::vector<CategoryForecast>& {
    std::vector<CategoryForecast> out;
    json entries = json::array();
    for (const auto& cat : ds.categories()) {
      CategoryForecast f{cat.code, cat.name, std::nullopt, {}, {}};
      const PriceSeries series = category_wholesale_series(ds, cat.code, Granularity::Day, before);
      const auto values = series.values();
      ArimaOptions opts{numeric::derive_seed(config_.seed, "forecast-wholesale/" + cat.code)};
      try {
        const ArimaOrder order = config_.arima_order ? *config_.arima_order : select_order(values, {}, opts);
        ArimaFit fit = fit_arima(values, order, opts);
        f.values = forecast(fit, config_.horizon, kForecastFloor);
        f.fit = std::move(fit);
      } catch (const Error& e) {
        f.note = std::string("mean fallback: ") + e.what();
        try {
          f.values.assign(static_cast<std::size_t>(config_.horizon), std::max(kForecastFloor, mean_forecast(series)));
        } catch (const Error& e2) {
          f.note = std::string("no forecast: ") + e2.what();
        }
      }
      json e{{"category_code", f.code},
             {"category", f.name},
             {"observations", values.size()},
             {"method", f.fit ? "arima" : (f.values.empty() ? "none" : "mean")},
             {"forecast", f.values}};
      if (f.fit) e["model"] = to_json(*f.fit);
      if (!f.note.empty()) e["note"] = f.note;
      entries.push_back(std::move(e));
      out.push_back(std::move(f));
    }
    json dates = json::array();
    for (int d = 0; d < config_.horizon; ++d) dates.push_back((before + d).str());
    write_json(kWholesaleForecastFile, {{"provenance", provenance(Stage::ForecastWholesale)},
                                        {"dates", dates},
                                        {"categories", entries}});
    forecasts_ = std::move(out);
    return *forecasts_;
  });
}

const std::vector<CategoryPlanRow>& Pipeline::plan_categories() {
  if (category_plan_) return *category_plan_;
  const Dataset& ds = ingest();
  const auto& models = fit_demand();
  const auto& forecasts = forecast_wholesale();
  const Date start = plan_start();
  return guarded(Stage::PlanCategories, [&]() -> const std::vector<CategoryPlanRow>& {
    std::vector<CategoryInputs> inputs;
    json skipped = json::array();
    for (const auto& f : forecasts) {
      auto m = models.find(f.code);
      auto loss = category_loss_rate(ds, f.code, start);
      if (m == models.end() || !loss || f.values.size() != static_cast<std::size_t>(config_.horizon)) {
        skipped.push_back({{"category", f.name},
                           {"reason", m == models.end() ? "no demand model" : !loss ? "no loss rate" : "no forecast"}});
        continue;
      }
      inputs.push_back({f.name, m->second, *loss, f.values});
    }
    std::sort(inputs.begin(), inputs.end(), [](const auto& a, const auto& b) { return a.category < b.category; });
    auto rows = plan_category_week(inputs, config_.horizon);
    const json prov = provenance(Stage::PlanCategories);
    write_category_plan(config_.output_dir / kCategoryPlanFile, rows, prov);
    json status = json::array();
    for (const auto& r : rows)
      if (r.status != PlanStatus::Planned)
        status.push_back({{"category", r.category}, {"day_index", r.day_index}, {"status", std::string(to_string(r.status))}});
    write_json(kCategoryContextFile, {{"provenance", prov},
                                      {"start", start.str()},
                                      {"horizon", config_.horizon},
                                      {"categories", category_context_json(inputs)},
                                      {"flagged", status},
                                      {"skipped", skipped}});
    category_plan_ = std::move(rows);
    return *category_plan_;
  });
}

const AssortmentPlan& Pipeline::plan_items() {
  if (item_plan_) return *item_plan_;
  const Dataset& ds = ingest();
  const auto& models = fit_demand();
  const Date date = item_plan_date();
  return guarded(Stage::PlanItems, [&]() -> const AssortmentPlan& {
    const Date first = date - config_.item_window_days;
    const Date last = date - 1;
    std::vector<std::string> skipped;
    const auto pool = candidate_pool(ds, first, last, 7, &skipped);
    SelectionConfig sel = config_.selection;
    sel.seed = numeric::derive_seed(config_.seed, "plan-items");
    AssortmentPlan plan = optimize_assortment(pool, models, sel);

    CategoryModels used;
    std::set<std::string> codes;
    for (const auto& c : pool) codes.insert(c.category);
    for (const auto& code : codes)
      if (auto it = models.find(code); it != models.end()) used.emplace(code, it->second);

    const json prov = provenance(Stage::PlanItems);
    write_item_plan(config_.output_dir / kItemPlanFile, plan.rows, prov);
    json candidates = json::array();
    for (const auto& c : pool) candidates.push_back(to_json(c));
    write_json(kItemAuditFile, {{"provenance", prov},
                                {"date", date.str()},
                                {"window", {{"first", first.str()}, {"last", last.str()}}},
                                {"config", to_json(sel)},
                                {"candidates", candidates},
                                {"skipped", skipped},
                                {"models", to_json(used)},
                                {"total_profit", plan.total_profit},
                                {"selected_count", plan.selected_count},
                                {"categories_covered", plan.categories_covered},
                                {"audit", audit_item_plan(plan.rows, pool, used, sel).to_json()}});
    item_plan_ = std::move(plan);
    return *item_plan_;
  });
}

const AuditReport& Pipeline::audit() {
  if (audit_) return *audit_;
  return guarded(Stage::Audit, [&]() -> const AuditReport& {
    AuditReport report = audit_plan(config_.output_dir);
    json j = report.to_json();
    j["provenance"] = provenance(Stage::Audit);
    write_json(kAuditReportFile, j);
    audit_ = std::move(report);
    if (!audit_->passed())
      throw StageError(Stage::Audit, "AuditFailed", std::to_string(audit_->failures()) + " constraint check(s) failed");
    return *audit_;
  });
}

void Pipeline::run() {
  ingest();
  analyze();
  fit_demand();
  forecast_wholesale();
  plan_categories();
  plan_items();
  audit();
}

}  // namespace vegplan

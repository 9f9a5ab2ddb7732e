#include "vegplan/plan_io.hpp"

#include <fstream>

#include "vegplan/csv.hpp"
#include "vegplan/error.hpp"

namespace vegplan {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::FileNotFound, "cannot write " + path.string());
  return out;
}

template <typename F>
auto plan_field(const std::string& path, std::size_t line, F&& parse) {
  try {
    return parse();
  } catch (const Error& e) {
    throw Error(Errc::MalformedPlanFile, path + ":" + std::to_string(line) + ": " + e.what());
  }
}

}  // namespace

std::string provenance_comment(const nlohmann::json& provenance) {
  std::string line = "#";
  for (const auto& [key, value] : provenance.items())
    line += " " + key + "=" + (value.is_string() ? value.get<std::string>() : value.dump());
  return line;
}

void write_category_plan(const std::filesystem::path& path, std::span<const CategoryPlanRow> rows,
                         const nlohmann::json& provenance) {
  auto out = open_output(path);
  out << provenance_comment(provenance) << '\n';
  csv::write_row(out, std::vector<std::string>{"day_index", "category", "supply_kg", "price",
                                               "predicted_sales_kg", "expected_profit"});
  for (const auto& r : rows)
    csv::write_row(out, std::vector<std::string>{std::to_string(r.day_index), r.category,
                                                 csv::format_double(r.supply_kg), csv::format_double(r.price),
                                                 csv::format_double(r.predicted_sales_kg),
                                                 csv::format_double(r.expected_profit)});
}

std::vector<CategoryPlanRow> read_category_plan(const std::filesystem::path& path) {
  const std::string name = path.string();
  const csv::Table t = plan_field(name, 0, [&] { return csv::read_file(path); });
  const auto col = [&](const char* c) { return plan_field(name, 1, [&] { return t.column(c); }); };
  const std::size_t c_day = col("day_index"), c_cat = col("category"), c_supply = col("supply_kg"),
                    c_price = col("price"), c_sales = col("predicted_sales_kg"), c_profit = col("expected_profit");
  std::vector<CategoryPlanRow> rows;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& f = t.rows[r];
    const std::size_t line = t.line_numbers[r];
    CategoryPlanRow row;
    row.day_index = plan_field(name, line, [&] {
      const double d = csv::parse_double(f[c_day], "day_index");
      if (d != static_cast<int>(d) || d < 1) throw Error(Errc::MalformedField, "day_index " + f[c_day]);
      return static_cast<int>(d);
    });
    row.category = f[c_cat];
    row.supply_kg = plan_field(name, line, [&] { return csv::parse_double(f[c_supply], "supply_kg"); });
    row.price = plan_field(name, line, [&] { return csv::parse_double(f[c_price], "price"); });
    row.predicted_sales_kg = plan_field(name, line, [&] { return csv::parse_double(f[c_sales], "predicted_sales_kg"); });
    row.expected_profit = plan_field(name, line, [&] { return csv::parse_double(f[c_profit], "expected_profit"); });
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_item_plan(const std::filesystem::path& path, std::span<const ItemPlanRow> rows,
                     const nlohmann::json& provenance) {
  auto out = open_output(path);
  out << provenance_comment(provenance) << '\n';
  csv::write_row(out, std::vector<std::string>{"item_code", "item_name", "selected", "supply_kg", "price",
                                               "expected_profit"});
  for (const auto& r : rows)
    csv::write_row(out, std::vector<std::string>{r.item_code, r.item_name, r.selected ? "1" : "0",
                                                 csv::format_double(r.supply_kg), csv::format_double(r.price),
                                                 csv::format_double(r.expected_profit)});
}

std::vector<ItemPlanRow> read_item_plan(const std::filesystem::path& path) {
  const std::string name = path.string();
  const csv::Table t = plan_field(name, 0, [&] { return csv::read_file(path); });
  const auto col = [&](const char* c) { return plan_field(name, 1, [&] { return t.column(c); }); };
  const std::size_t c_code = col("item_code"), c_name = col("item_name"), c_sel = col("selected"),
                    c_supply = col("supply_kg"), c_price = col("price"), c_profit = col("expected_profit");
  std::vector<ItemPlanRow> rows;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& f = t.rows[r];
    const std::size_t line = t.line_numbers[r];
    ItemPlanRow row;
    row.item_code = f[c_code];
    row.item_name = f[c_name];
    row.selected = plan_field(name, line, [&] { return csv::parse_flag(f[c_sel], "selected"); });
    row.supply_kg = plan_field(name, line, [&] { return csv::parse_double(f[c_supply], "supply_kg"); });
    row.price = plan_field(name, line, [&] { return csv::parse_double(f[c_price], "price"); });
    row.expected_profit = plan_field(name, line, [&] { return csv::parse_double(f[c_profit], "expected_profit"); });
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json category_context_json(std::span<const CategoryInputs> inputs) {
  auto arr = nlohmann::json::array();
  for (const auto& in : inputs)
    arr.push_back({{"category", in.category},
                   {"demand", to_json(in.demand)},
                   {"loss_rate", in.loss_rate},
                   {"wholesale_forecasts", in.wholesale_forecasts}});
  return arr;
}

std::vector<CategoryInputs> category_inputs_from_json(const nlohmann::json& j) {
  std::vector<CategoryInputs> out;
  for (const auto& e : j) {
    CategoryInputs in;
    in.category = e.at("category").get<std::string>();
    in.demand = demand_model_from_json(e.at("demand"));
    in.loss_rate = e.at("loss_rate").get<double>();
    in.wholesale_forecasts = e.at("wholesale_forecasts").get<std::vector<double>>();
    out.push_back(std::move(in));
  }
  return out;
}

nlohmann::json to_json(const SelectionConfig& c) {
  return {{"min_items", c.min_items},
          {"max_items", c.max_items},
          {"min_display_kg", c.min_display_kg},
          {"required_categories", c.required_categories},
          {"demand_mode", std::string(to_string(c.demand_mode))},
          {"restarts", c.restarts},
          {"seed", c.seed},
          {"max_stale_moves", c.max_stale_moves},
          {"stocking_loss_factor", c.stocking_loss_factor}};
}

SelectionConfig selection_config_from_json(const nlohmann::json& j, SelectionConfig c) {
  c.min_items = j.value("min_items", c.min_items);
  c.max_items = j.value("max_items", c.max_items);
  c.min_display_kg = j.value("min_display_kg", c.min_display_kg);
  c.required_categories = j.value("required_categories", c.required_categories);
  if (j.contains("demand_mode")) {
    auto mode = parse_demand_mode(j.at("demand_mode").get<std::string>());
    if (!mode) throw Error(Errc::InvalidConfig, "demand_mode must be share or literal");
    c.demand_mode = *mode;
  }
  c.restarts = j.value("restarts", c.restarts);
  c.seed = j.value("seed", c.seed);
  c.max_stale_moves = j.value("max_stale_moves", c.max_stale_moves);
  c.stocking_loss_factor = j.value("stocking_loss_factor", c.stocking_loss_factor);
  if (c.min_items > c.max_items) throw Error(Errc::InvalidConfig, "min_items exceeds max_items");
  if (!(c.min_display_kg > 0)) throw Error(Errc::InvalidConfig, "min_display_kg must be positive");
  return c;
}

nlohmann::json to_json(const ItemCandidate& c) {
  return {{"item_code", c.item_code},         {"item_name", c.item_name},
          {"category", c.category},           {"category_name", c.category_name},
          {"wholesale_forecast", c.wholesale_forecast}, {"loss_rate", c.loss_rate},
          {"share", c.share}};
}

ItemCandidate item_candidate_from_json(const nlohmann::json& j) {
  return {j.at("item_code").get<std::string>(),   j.at("item_name").get<std::string>(),
          j.at("category").get<std::string>(),    j.value("category_name", std::string{}),
          j.at("wholesale_forecast").get<double>(), j.at("loss_rate").get<double>(),
          j.at("share").get<double>()};
}

nlohmann::json to_json(const CategoryModels& models) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [code, model] : models) j[code] = to_json(model);
  return j;
}

CategoryModels category_models_from_json(const nlohmann::json& j) {
  CategoryModels models;
  for (const auto& [code, model] : j.items()) models.emplace(code, demand_model_from_json(model));
  return models;
}

}  // namespace vegplan

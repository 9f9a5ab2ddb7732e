#include "vegplan/audit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "vegplan/error.hpp"
#include "vegplan/plan_io.hpp"

namespace vegplan {

std::size_t AuditReport::failures() const {
  return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const AuditCheck& c) { return !c.passed; }));
}

void AuditReport::append(const AuditReport& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

nlohmann::json AuditReport::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& c : checks)
    arr.push_back({{"plan", c.plan}, {"constraint", c.constraint}, {"row", c.row}, {"passed", c.passed}, {"detail", c.detail}});
  return {{"passed", passed()}, {"checks", checks.size()}, {"failures", failures()}, {"results", arr}};
}

namespace {

bool close(double a, double b) {
  return std::abs(a - b) <= kAuditTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

class Recorder {
 public:
  explicit Recorder(std::string plan) : plan_(std::move(plan)) {}

  void check(const std::string& constraint, const std::string& row, bool ok, std::string detail = {}) {
    report_.checks.push_back({plan_, constraint, row, ok, std::move(detail)});
  }

  AuditReport take() { return std::move(report_); }

 private:
  std::string plan_;
  AuditReport report_;
};

}  // namespace

AuditReport audit_category_plan(std::span<const CategoryPlanRow> rows, std::span<const CategoryInputs> inputs) {
  Recorder rec("category");
  std::map<std::string, const CategoryInputs*> by_name;
  for (const auto& in : inputs) by_name.emplace(in.category, &in);

  std::map<std::pair<std::string, int>, int> seen;

  for (const auto& r : rows) {
    const std::string id = r.category + "/day" + std::to_string(r.day_index);
    ++seen[{r.category, r.day_index}];
    auto it = by_name.find(r.category);
    if (it == by_name.end()) {
      rec.check("known_category", id, false, "no inputs for category");
      continue;
    }
    const CategoryInputs& in = *it->second;
    if (r.day_index < 1 || r.day_index > static_cast<int>(in.wholesale_forecasts.size())) {
      rec.check("day_in_horizon", id, false, "day outside forecast horizon");
      continue;
    }
    const bool flagged = r.supply_kg == 0.0 && r.price == 0.0;
    if (flagged) {
      rec.check("flagged_row_zero", id, r.predicted_sales_kg == 0.0 && r.expected_profit == 0.0,
                "sales " + num(r.predicted_sales_kg) + " profit " + num(r.expected_profit));
      continue;
    }
    const double w = in.wholesale_forecasts[static_cast<std::size_t>(r.day_index - 1)];
    const double loss = in.loss_rate;
    rec.check("c1_supply_covers_sales_and_loss", id, close(r.supply_kg * (1.0 - loss), r.predicted_sales_kg),
              "supply*(1-loss) " + num(r.supply_kg * (1.0 - loss)) + " sales " + num(r.predicted_sales_kg));
    rec.check("c2_price_above_wholesale", id, r.price > w, "price " + num(r.price) + " wholesale " + num(w));
    rec.check("c3_positive", id, r.supply_kg > 0.0 && r.price > 0.0,
              "supply " + num(r.supply_kg) + " price " + num(r.price));
    double q = 0.0;
    bool q_ok = true;
    try {
      q = eval(in.demand, r.price);
    } catch (const Error&) {
      q_ok = false;
    }
    rec.check("c4_sales_on_curve", id, q_ok && close(q, r.predicted_sales_kg),
              "Q(price) " + (q_ok ? num(q) : std::string("undefined")) + " sales " + num(r.predicted_sales_kg));
    const double profit = r.price * r.predicted_sales_kg - w * r.supply_kg;
    rec.check("profit_identity", id, close(profit, r.expected_profit),
              "recomputed " + num(profit) + " reported " + num(r.expected_profit));
  }

  bool covered = true;
  std::string missing;
  for (const auto& in : inputs)
    for (int d = 1; d <= static_cast<int>(in.wholesale_forecasts.size()); ++d) {
      auto it = seen.find({in.category, d});
      if (it == seen.end() || it->second != 1) {
        covered = false;
        missing += (missing.empty() ? "" : ", ") + in.category + "/day" + std::to_string(d);
      }
    }
  rec.check("one_row_per_category_day", "plan", covered, missing);
  return rec.take();
}

AuditReport audit_item_plan(std::span<const ItemPlanRow> rows, std::span<const ItemCandidate> pool,
                            const CategoryModels& models, const SelectionConfig& config) {
  Recorder rec("item");
  std::map<std::string, const ItemCandidate*> by_code;
  for (const auto& c : pool) by_code.emplace(c.item_code, &c);

  std::map<std::string, int> seen;
  std::set<std::string> categories;
  std::size_t count = 0;
  // Per category: summed allocated sales and the cheapest selected price.
  std::map<std::string, std::pair<double, double>> allocation;

  for (const auto& r : rows) {
    const std::string& id = r.item_code;
    ++seen[id];
    auto it = by_code.find(id);
    if (it == by_code.end()) {
      rec.check("i9_row_per_candidate", id, false, "item not in candidate pool");
      continue;
    }
    const ItemCandidate& c = *it->second;
    if (!r.selected) {
      rec.check("i5_unselected_supply_zero", id, r.supply_kg == 0.0, "supply " + num(r.supply_kg));
      rec.check("i6_unselected_price_zero", id, r.price == 0.0, "price " + num(r.price));
      continue;
    }
    ++count;
    categories.insert(c.category);
    const double keep = 1.0 - c.loss_rate;
    rec.check("i1_supply_covers_sales", id,
              r.supply_kg * keep >= r.predicted_sales_kg - kAuditTolerance * std::max(1.0, r.predicted_sales_kg),
              "supply*(1-loss) " + num(r.supply_kg * keep) + " sales " + num(r.predicted_sales_kg));
    rec.check("i2_price_above_wholesale", id, r.price > c.wholesale_forecast,
              "price " + num(r.price) + " wholesale " + num(c.wholesale_forecast));
    rec.check("i3_min_display", id, r.supply_kg >= config.min_display_kg * (1.0 - 1e-12),
              "supply " + num(r.supply_kg) + " minimum " + num(config.min_display_kg));
    auto m = models.find(c.category);
    double q = 0.0;
    bool q_ok = m != models.end();
    if (q_ok) {
      try {
        q = item_demand(m->second, c, r.price, config.demand_mode);
      } catch (const Error&) {
        q_ok = false;
      }
    }
    const double profit = r.price * r.predicted_sales_kg - c.wholesale_forecast * r.supply_kg;
    rec.check("i7_sales_follow_curve", id,
              q_ok && close(q, r.predicted_sales_kg) && close(profit, r.expected_profit),
              "Q(price) " + (q_ok ? num(q) : std::string("undefined")) + " sales " + num(r.predicted_sales_kg) +
                  " profit " + num(profit) + " reported " + num(r.expected_profit));
    auto [pos, fresh] = allocation.try_emplace(c.category, 0.0, r.price);
    pos->second.first += r.predicted_sales_kg;
    if (!fresh) pos->second.second = std::min(pos->second.second, r.price);
  }

  rec.check("i4_item_count", "plan", count >= config.min_items && count <= config.max_items,
            std::to_string(count) + " selected, range [" + std::to_string(config.min_items) + ", " +
                std::to_string(config.max_items) + "]");
  rec.check("i8_category_coverage", "plan", categories.size() >= config.required_categories,
            std::to_string(categories.size()) + " categories, need " + std::to_string(config.required_categories));
  bool one_each = true;
  std::string bad;
  for (const auto& c : pool) {
    auto it = seen.find(c.item_code);
    if (it == seen.end() || it->second != 1) {
      one_each = false;
      bad += (bad.empty() ? "" : ", ") + c.item_code;
    }
  }
  rec.check("i9_row_per_candidate", "plan", one_each, bad);

  for (const auto& [code, alloc] : allocation) {
    auto m = models.find(code);
    if (m == models.end()) continue;
    const double cap = eval(m->second, alloc.second);
    const double scale = std::max({1.0, cap, eval(m->second, m->second.price_min)});
    const std::string detail = "allocated " + num(alloc.first) + " curve at cheapest price " + num(cap) +
                               " overshoot " + num(std::max(0.0, alloc.first - cap));
    if (config.demand_mode == DemandMode::ShareScaled)
      rec.check("share_allocation_within_curve", code, alloc.first <= cap + 1e-9 * scale, detail);
    else
      rec.check("literal_allocation_overshoot", code, true, detail);
  }
  return rec.take();
}

namespace {

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::MalformedPlanFile, "cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedPlanFile, path.string() + ": " + e.what());
  }
}

template <typename F>
auto from_plan_json(const std::filesystem::path& path, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedPlanFile, path.string() + ": " + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::MalformedPlanFile) throw;
    throw Error(Errc::MalformedPlanFile, path.string() + ": " + e.what());
  }
}

}  // namespace

AuditReport audit_plan(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  AuditReport report;
  const fs::path cat_plan = dir / kCategoryPlanFile;
  const fs::path item_plan = dir / kItemPlanFile;
  bool any = false;

  if (fs::exists(cat_plan)) {
    any = true;
    const fs::path ctx = dir / kCategoryContextFile;
    const auto rows = read_category_plan(cat_plan);
    const auto inputs = from_plan_json(ctx, [&] {
      const auto j = read_json(ctx);
      return category_inputs_from_json(j.contains("categories") ? j.at("categories") : j);
    });
    report.append(audit_category_plan(rows, inputs));
  }

  if (fs::exists(item_plan)) {
    any = true;
    const fs::path ctx = dir / kItemAuditFile;
    auto rows = read_item_plan(item_plan);
    const auto j = read_json(ctx);
    const auto [pool, models, config] = from_plan_json(ctx, [&] {
      std::vector<ItemCandidate> pool;
      for (const auto& c : j.at("candidates")) pool.push_back(item_candidate_from_json(c));
      return std::tuple{pool, category_models_from_json(j.at("models")), selection_config_from_json(j.at("config"))};
    });
    // The CSV carries no sales column; sales follow from the curve at the
    // emitted price, and i1/i7 then test supply and profit against them.
    std::map<std::string, const ItemCandidate*> by_code;
    for (const auto& c : pool) by_code.emplace(c.item_code, &c);
    for (auto& r : rows) {
      if (!r.selected) continue;
      auto c = by_code.find(r.item_code);
      if (c == by_code.end()) continue;
      auto m = models.find(c->second->category);
      if (m == models.end()) continue;
      try {
        r.predicted_sales_kg = item_demand(m->second, *c->second, r.price, config.demand_mode);
      } catch (const Error&) {
        r.predicted_sales_kg = 0.0;
      }
    }
    report.append(audit_item_plan(rows, pool, models, config));
  }

  if (!any) throw Error(Errc::MalformedPlanFile, "no plan files in " + dir.string());
  return report;
}

}  // namespace vegplan

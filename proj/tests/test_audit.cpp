#include <fstream>
#include <sstream>

#include "support.hpp"
#include "vegplan/audit.hpp"
#include "vegplan/plan_io.hpp"

using namespace vegplan;
using namespace testing;

namespace {

std::vector<CategoryInputs> two_categories() {
  return {{"花叶类", DemandModel::linear(-3, 60), 0.1, {5.0, 5.5}},
          {"茄类", DemandModel::log_shift(-8.16177241, 1.62367199, 36.4701182), 0.05, {6.0, 6.2}}};
}

const AuditCheck* first_failure(const AuditReport& r, const std::string& constraint) {
  for (const auto& c : r.checks)
    if (!c.passed && c.constraint == constraint) return &c;
  return nullptr;
}

struct ItemFixture {
  std::vector<ItemCandidate> pool;
  CategoryModels models;
  SelectionConfig config;
  AssortmentPlan plan;

  ItemFixture() {
    const char* cats[] = {"K1", "K2", "K3", "K4", "K5", "K6"};
    for (int c = 0; c < 6; ++c) {
      models[cats[c]] = DemandModel::linear(-2.5, 70.0 + 5 * c);
      for (int k = 0; k < 6; ++k)
        pool.push_back({std::string(cats[c]) + "-" + std::to_string(k), "item", cats[c], "cat", 3.0 + 0.3 * k,
                        0.05 + 0.01 * k, 1.0 / 6});
    }
    config.restarts = 4;
    plan = optimize_assortment(pool, models, config);
  }
};

}  // namespace

TEST_CASE("planner output passes the category audit") {
  const auto inputs = two_categories();
  const auto rows = plan_category_week(inputs, 2);
  const auto report = audit_category_plan(rows, inputs);
  CHECK(report.passed());
  CHECK(report.checks.size() > 8);
}

TEST_CASE("price below wholesale is reported with its row id") {
  const auto inputs = two_categories();
  auto rows = plan_category_week(inputs, 2);
  rows[1].price = 1.0;
  const auto report = audit_category_plan(rows, inputs);
  CHECK_FALSE(report.passed());
  const auto* f = first_failure(report, "c2_price_above_wholesale");
  REQUIRE(f);
  CHECK(f->row == rows[1].category + "/day1");
}

TEST_CASE("category audit detects broken balances and coverage") {
  const auto inputs = two_categories();
  auto rows = plan_category_week(inputs, 2);
  rows[0].supply_kg *= 1.01;
  CHECK(first_failure(audit_category_plan(rows, inputs), "c1_supply_covers_sales_and_loss"));
  rows = plan_category_week(inputs, 2);
  rows[0].predicted_sales_kg += 0.5;
  CHECK(first_failure(audit_category_plan(rows, inputs), "c4_sales_on_curve"));
  rows = plan_category_week(inputs, 2);
  rows.pop_back();
  CHECK(first_failure(audit_category_plan(rows, inputs), "one_row_per_category_day"));
  rows = plan_category_week(inputs, 2);
  rows[2].supply_kg = rows[2].price = 0.0;
  CHECK(first_failure(audit_category_plan(rows, inputs), "flagged_row_zero"));
}

TEST_CASE("optimizer output passes the item audit") {
  ItemFixture fx;
  const auto report = audit_item_plan(fx.plan.rows, fx.pool, fx.models, fx.config);
  for (const auto& c : report.checks) CHECK_MESSAGE(c.passed, c.constraint << " " << c.row << " " << c.detail);
}

TEST_CASE("26 selected items break the count constraint") {
  ItemFixture fx;
  auto rows = fx.plan.rows;
  std::size_t selected = fx.plan.selected_count;
  for (auto& r : rows) {
    if (selected <= 26) break;
    if (r.selected) {
      r = ItemPlanRow{r.item_code, r.item_name, r.category};
      --selected;
    }
  }
  const auto report = audit_item_plan(rows, fx.pool, fx.models, fx.config);
  REQUIRE(first_failure(report, "i4_item_count"));
  CHECK(first_failure(report, "i4_item_count")->detail.find("26 selected") != std::string::npos);
}

TEST_CASE("item audit catches each row constraint") {
  ItemFixture fx;
  auto selected = std::find_if(fx.plan.rows.begin(), fx.plan.rows.end(), [](const auto& r) { return r.selected; });
  auto unselected = std::find_if(fx.plan.rows.begin(), fx.plan.rows.end(), [](const auto& r) { return !r.selected; });
  REQUIRE(selected != fx.plan.rows.end());
  REQUIRE(unselected != fx.plan.rows.end());
  const auto audit = [&](const std::vector<ItemPlanRow>& rows) {
    return audit_item_plan(rows, fx.pool, fx.models, fx.config);
  };
  const std::size_t s = static_cast<std::size_t>(selected - fx.plan.rows.begin());
  const std::size_t u = static_cast<std::size_t>(unselected - fx.plan.rows.begin());

  auto rows = fx.plan.rows;
  rows[s].supply_kg = 2.0;
  CHECK(first_failure(audit(rows), "i3_min_display"));
  rows = fx.plan.rows;
  rows[s].price = 1.0;
  CHECK(first_failure(audit(rows), "i2_price_above_wholesale"));
  rows = fx.plan.rows;
  rows[s].supply_kg = rows[s].predicted_sales_kg * 0.5;
  CHECK(first_failure(audit(rows), "i1_supply_covers_sales"));
  rows = fx.plan.rows;
  rows[u].supply_kg = 1.0;
  CHECK(first_failure(audit(rows), "i5_unselected_supply_zero"));
  rows = fx.plan.rows;
  rows[u].price = 1.0;
  CHECK(first_failure(audit(rows), "i6_unselected_price_zero"));
  rows = fx.plan.rows;
  rows[s].expected_profit += 1.0;
  CHECK(first_failure(audit(rows), "i7_sales_follow_curve"));
  rows = fx.plan.rows;
  rows.push_back(rows[u]);
  CHECK(first_failure(audit(rows), "i9_row_per_candidate"));
  rows = fx.plan.rows;
  for (auto& r : rows)
    if (r.category == "K1") r = ItemPlanRow{r.item_code, r.item_name, r.category};
  CHECK(first_failure(audit(rows), "i8_category_coverage"));
}

TEST_CASE("share allocation stays under the category curve; literal only reports") {
  ItemFixture fx;
  const auto report = audit_item_plan(fx.plan.rows, fx.pool, fx.models, fx.config);
  std::size_t share_checks = 0;
  for (const auto& c : report.checks) share_checks += c.constraint == "share_allocation_within_curve";
  CHECK(share_checks == 6);

  auto literal = fx.config;
  literal.demand_mode = DemandMode::Literal;
  const auto plan = optimize_assortment(fx.pool, fx.models, literal);
  const auto lr = audit_item_plan(plan.rows, fx.pool, fx.models, literal);
  CHECK(lr.passed());
  bool overshoot = false;
  for (const auto& c : lr.checks)
    if (c.constraint == "literal_allocation_overshoot" && c.detail.find("overshoot 0") == std::string::npos)
      overshoot = true;
  CHECK(overshoot);
}

TEST_CASE("plan files round trip and re-audit from disk") {
  const auto dir = scratch_dir("audit_files");
  const auto inputs = two_categories();
  const auto rows = plan_category_week(inputs, 2);
  const nlohmann::json prov{{"config_hash", "abc"}, {"seed", 1}};
  write_category_plan(dir / kCategoryPlanFile, rows, prov);
  {
    std::ofstream(dir / kCategoryContextFile) << nlohmann::json{{"categories", category_context_json(inputs)}}.dump();
  }
  const auto back = read_category_plan(dir / kCategoryPlanFile);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].category == rows[i].category);
    CHECK(back[i].price == rows[i].price);
    CHECK(back[i].supply_kg == rows[i].supply_kg);
  }

  ItemFixture fx;
  write_item_plan(dir / kItemPlanFile, fx.plan.rows, prov);
  nlohmann::json cands = nlohmann::json::array();
  for (const auto& c : fx.pool) cands.push_back(to_json(c));
  {
    std::ofstream(dir / kItemAuditFile)
        << nlohmann::json{{"candidates", cands}, {"models", to_json(fx.models)}, {"config", to_json(fx.config)}}.dump();
  }
  const auto items = read_item_plan(dir / kItemPlanFile);
  REQUIRE(items.size() == fx.plan.rows.size());
  CHECK(items[0].item_code == fx.plan.rows[0].item_code);
  CHECK(items[0].selected == fx.plan.rows[0].selected);

  const auto report = audit_plan(dir);
  for (const auto& c : report.checks) CHECK_MESSAGE(c.passed, c.constraint << " " << c.row << " " << c.detail);

  // hand edit: a price below wholesale on the first category row
  std::ifstream in(dir / kCategoryPlanFile);
  std::stringstream text;
  text << in.rdbuf();
  in.close();
  std::string s = text.str();
  const auto line = s.find("\n1,");
  const auto field = s.find(',', s.find(',', line + 3) + 1) + 1;  // after supply_kg
  s.replace(field, s.find(',', field) - field, "0.5");
  std::ofstream(dir / kCategoryPlanFile) << s;
  const auto edited = audit_plan(dir);
  REQUIRE(first_failure(edited, "c2_price_above_wholesale"));
  CHECK(first_failure(edited, "c2_price_above_wholesale")->row == rows[0].category + "/day1");
}

TEST_CASE("malformed plan files") {
  const auto dir = scratch_dir("audit_bad");
  CHECK_ERRC(audit_plan(dir), Errc::MalformedPlanFile);
  std::ofstream(dir / kCategoryPlanFile) << "day_index,category,supply_kg,price,predicted_sales_kg,expected_profit\n"
                                            "x,a,1,2,3,4\n";
  CHECK_ERRC(read_category_plan(dir / kCategoryPlanFile), Errc::MalformedPlanFile);
  std::ofstream(dir / kCategoryPlanFile) << "day_index,category\n1,a\n";
  CHECK_ERRC(read_category_plan(dir / kCategoryPlanFile), Errc::MalformedPlanFile);
  std::ofstream(dir / kCategoryPlanFile) << "day_index,category,supply_kg,price,predicted_sales_kg,expected_profit\n";
  std::ofstream(dir / kCategoryContextFile) << "{ not json";
  CHECK_ERRC(audit_plan(dir), Errc::MalformedPlanFile);
}

TEST_CASE("selection config json") {
  SelectionConfig c;
  c.min_items = 3;
  c.demand_mode = DemandMode::Literal;
  const auto back = selection_config_from_json(to_json(c));
  CHECK(back.min_items == 3);
  CHECK(back.demand_mode == DemandMode::Literal);
  CHECK_ERRC(selection_config_from_json({{"min_items", 40}}), Errc::InvalidConfig);
  CHECK_ERRC(selection_config_from_json({{"demand_mode", "half"}}), Errc::InvalidConfig);
}

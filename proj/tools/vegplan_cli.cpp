// vegplan: replenishment and pricing pipeline for a fresh-produce store.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vegplan/audit.hpp"
#include "vegplan/error.hpp"
#include "vegplan/pipeline.hpp"
#include "vegplan/synthetic.hpp"

namespace fs = std::filesystem;
using namespace vegplan;

namespace {

struct Flags {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  bool verbose = false;
  std::string data;
  std::string catalog, transactions, wholesale, loss;
};

Date parse_date_flag(const std::string& text, const char* flag) {
  auto d = Date::parse(text);
  if (!d) throw Error(Errc::InvalidConfig, std::string(flag) + " must be YYYY-MM-DD");
  return *d;
}

void note(bool verbose, const std::string& msg) {
  if (verbose) std::cerr << "vegplan: " << msg << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Category and item replenishment planning from sales, wholesale and loss data"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags g;
  auto* o_config = app.add_option("--config", g.config, "JSON run configuration");
  auto* o_seed = app.add_option("--seed", g.seed, "root random seed");
  auto* o_out = app.add_option("--out", g.out, "output directory");
  app.add_flag("-v,--verbose", g.verbose, "progress on stderr");
  auto* o_data = app.add_option("--data", g.data, "directory with catalog.csv, transactions.csv, wholesale.csv, loss.csv");
  auto* o_catalog = app.add_option("--catalog", g.catalog, "item catalog CSV");
  auto* o_tx = app.add_option("--transactions", g.transactions, "sales log CSV");
  auto* o_ws = app.add_option("--wholesale", g.wholesale, "wholesale quotes CSV");
  auto* o_loss = app.add_option("--loss", g.loss, "loss rate CSV");

  auto* c_ingest = app.add_subcommand("ingest", "load and validate the inputs");
  auto* c_analyze = app.add_subcommand("analyze", "aggregates, profit, correlations and top sellers");

  auto* c_fit = app.add_subcommand("fit-demand", "fit a price-demand curve per category");
  std::string family = "auto";
  c_fit->add_option("--family", family, "auto|linear|log|power")
      ->check(CLI::IsMember({"auto", "linear", "log", "power"}));

  auto* c_fc = app.add_subcommand("forecast-wholesale", "ARIMA wholesale forecasts per category");
  std::string fc_category, order = "auto";
  int horizon = 7;
  c_fc->add_option("--category", fc_category, "print only this category (code or name)");
  auto* o_horizon = c_fc->add_option("--horizon", horizon, "days to forecast")->check(CLI::PositiveNumber);
  c_fc->add_option("--order", order, "auto or p,d,q");

  auto* c_pc = app.add_subcommand("plan-categories", "daily supply and price per category");
  std::string start;
  int days = 7;
  c_pc->add_option("--start", start, "first planned day, YYYY-MM-DD");
  auto* o_days = c_pc->add_option("--days", days, "planning horizon")->check(CLI::PositiveNumber);

  auto* c_pi = app.add_subcommand("plan-items", "item assortment for one day");
  std::string item_date, mode;
  int window = 7, restarts = 32;
  std::size_t min_items = 27, max_items = 33;
  double min_display = 2.5;
  c_pi->add_option("--date", item_date, "planned day, YYYY-MM-DD");
  auto* o_window = c_pi->add_option("--window", window, "lookback days for candidates")->check(CLI::PositiveNumber);
  auto* o_min = c_pi->add_option("--min-items", min_items, "fewest items to stock");
  auto* o_max = c_pi->add_option("--max-items", max_items, "most items to stock");
  auto* o_display = c_pi->add_option("--min-display", min_display, "minimum display kg")->check(CLI::PositiveNumber);
  c_pi->add_option("--mode", mode, "share|literal")->check(CLI::IsMember({"share", "literal"}));
  auto* o_restarts = c_pi->add_option("--restarts", restarts, "local search restarts")->check(CLI::PositiveNumber);

  auto* c_audit = app.add_subcommand("audit", "re-check the plan files in a directory");
  std::string audit_dir;
  c_audit->add_option("--dir", audit_dir, "plan directory (default: --out)");

  auto* c_run = app.add_subcommand("run", "every stage in order");

  auto* c_synth = app.add_subcommand("synth", "write a synthetic dataset");
  int synth_days = 120;
  std::size_t per_category = 8;
  double noise = 0.05;
  c_synth->add_option("--days", synth_days, "days of history")->check(CLI::PositiveNumber);
  c_synth->add_option("--items-per-category", per_category, "items per category")->check(CLI::PositiveNumber);
  c_synth->add_option("--noise", noise, "relative volume noise");

  CLI11_PARSE(app, argc, argv);

  RunConfig config;
  try {
    if (*c_synth) {
      SyntheticOptions opts;
      opts.seed = g.seed;
      opts.days = synth_days;
      opts.items_per_category = per_category;
      opts.noise = noise;
      const fs::path dir = *o_data ? g.data : (*o_out ? g.out : "synthetic");
      fs::create_directories(dir);
      write_dataset(synthetic_dataset(opts), DatasetPaths::in_directory(dir));
      std::cout << "wrote synthetic dataset to " << dir.string() << '\n';
      return 0;
    }
    if (*c_audit) {
      const fs::path dir = !audit_dir.empty() ? fs::path(audit_dir) : (*o_out ? fs::path(g.out) : fs::path("out"));
      const AuditReport report = audit_plan(dir);
      for (const auto& c : report.checks)
        if (!c.passed || g.verbose)
          std::cout << (c.passed ? "PASS " : "FAIL ") << c.plan << ' ' << c.constraint << ' ' << c.row
                    << (c.detail.empty() ? "" : ": " + c.detail) << '\n';
      std::cout << report.checks.size() - report.failures() << '/' << report.checks.size() << " checks passed\n";
      return report.passed() ? 0 : 1;
    }

    if (*o_config) config = load_run_config(g.config);
    if (*o_data) config.inputs = DatasetPaths::in_directory(g.data);
    if (*o_catalog) config.inputs.catalog = g.catalog;
    if (*o_tx) config.inputs.transactions = g.transactions;
    if (*o_ws) config.inputs.wholesale = g.wholesale;
    if (*o_loss) config.inputs.loss = g.loss;
    if (*o_out) config.output_dir = g.out;
    if (*o_seed) config.seed = g.seed;
    if (family != "auto") config.demand_family = parse_family(family);
    if (order != "auto") {
      config.arima_order = ArimaOrder::parse(order);
      if (!config.arima_order) throw Error(Errc::InvalidConfig, "--order must be auto or p,d,q");
    }
    if (*o_horizon) config.horizon = horizon;
    if (*o_days) config.horizon = days;
    if (!start.empty()) config.plan_start = parse_date_flag(start, "--start");
    if (!item_date.empty()) config.item_plan_date = parse_date_flag(item_date, "--date");
    if (*o_window) config.item_window_days = window;
    if (*o_min) config.selection.min_items = min_items;
    if (*o_max) config.selection.max_items = max_items;
    if (*o_display) config.selection.min_display_kg = min_display;
    if (!mode.empty()) config.selection.demand_mode = *parse_demand_mode(mode);
    if (*o_restarts) config.selection.restarts = restarts;
    if (config.selection.min_items > config.selection.max_items)
      throw Error(Errc::InvalidConfig, "--min-items exceeds --max-items");
  } catch (const Error& e) {
    std::cerr << "vegplan: " << e.what() << '\n';
    return 2;
  }

  Pipeline pipeline(config);
  const bool v = g.verbose;
  try {
    if (*c_ingest) {
      const Dataset& ds = pipeline.ingest();
      std::cout << ds.catalog().size() << " items, " << ds.categories().size() << " categories, "
                << ds.transactions().size() << " transactions, " << ds.first_date().str() << " to "
                << ds.last_date().str() << '\n';
    } else if (*c_analyze) {
      pipeline.analyze();
      std::cout << "analytics written to " << config.output_dir.string() << '\n';
    } else if (*c_fit) {
      for (const auto& [code, m] : pipeline.fit_demand()) {
        std::cout << code << ' ' << to_string(m.family);
        for (double p : m.params) std::cout << ' ' << p;
        std::cout << " sse=" << m.sse << '\n';
      }
    } else if (*c_fc) {
      const auto& forecasts = pipeline.forecast_wholesale();
      bool found = fc_category.empty();
      for (const auto& f : forecasts) {
        if (!fc_category.empty() && f.code != fc_category && f.name != fc_category) continue;
        found = true;
        std::cout << f.name << ' ' << (f.fit ? f.fit->order.str() : "mean");
        for (double x : f.values) std::cout << ' ' << x;
        std::cout << '\n';
      }
      if (!found) throw StageError(Stage::ForecastWholesale, "NoData", "unknown category " + fc_category);
    } else if (*c_pc) {
      note(v, "planning from " + pipeline.plan_start().str());
      for (const auto& r : pipeline.plan_categories())
        std::cout << r.day_index << ' ' << r.category << " supply=" << r.supply_kg << " price=" << r.price << ' '
                  << to_string(r.status) << '\n';
    } else if (*c_pi) {
      const auto& plan = pipeline.plan_items();
      std::cout << plan.selected_count << " items over " << plan.categories_covered
                << " categories, expected profit " << plan.total_profit << '\n';
    } else if (*c_run) {
      for (auto step : {Stage::Ingest, Stage::Analyze, Stage::FitDemand, Stage::ForecastWholesale,
                        Stage::PlanCategories, Stage::PlanItems, Stage::Audit}) {
        note(v, std::string("stage ") + std::string(to_string(step)));
        switch (step) {
          case Stage::Ingest: pipeline.ingest(); break;
          case Stage::Analyze: pipeline.analyze(); break;
          case Stage::FitDemand: pipeline.fit_demand(); break;
          case Stage::ForecastWholesale: pipeline.forecast_wholesale(); break;
          case Stage::PlanCategories: pipeline.plan_categories(); break;
          case Stage::PlanItems: pipeline.plan_items(); break;
          case Stage::Audit: pipeline.audit(); break;
        }
      }
      const auto& report = pipeline.audit();
      std::cout << "artifacts in " << config.output_dir.string() << "; audit " << report.checks.size()
                << " checks passed\n";
    }
  } catch (const StageError& e) {
    write_error_json(config.output_dir, e);
    std::cerr << "vegplan: " << to_string(e.stage()) << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}

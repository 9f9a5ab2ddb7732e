#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "support.hpp"
#include "vegplan/planner_category.hpp"
#include "vegplan/planner_items.hpp"

using namespace vegplan;
using namespace testing;

namespace {

ItemCandidate candidate(const std::string& code, const std::string& cat, double w, double loss, double share) {
  return {code, "item " + code, cat, "category " + cat, w, loss, share};
}

// `per_category` items in each of `categories` categories with varied costs.
std::vector<ItemCandidate> make_pool(int categories, int per_category, std::uint64_t seed, CategoryModels& models) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<ItemCandidate> pool;
  for (int c = 0; c < categories; ++c) {
    const std::string cat = "K" + std::to_string(c);
    models[cat] = DemandModel::linear(-2.0 - u(rng), 40.0 + 40.0 * u(rng));
    for (int k = 0; k < per_category; ++k) {
      char code[16];
      std::snprintf(code, sizeof code, "I%02d%02d", c, k);
      pool.push_back(candidate(code, cat, 2.0 + 8.0 * u(rng), 0.02 + 0.1 * u(rng), 1.0 / per_category));
    }
  }
  return pool;
}

SelectionConfig small_config() {
  SelectionConfig c;
  c.min_items = 3;
  c.max_items = 5;
  c.required_categories = 3;
  c.restarts = 8;
  c.max_stale_moves = 200;
  return c;
}

}  // namespace

TEST_CASE("candidate pool from a window") {
  const auto ds = dataset_from_text(std::string(kCatalogHeader) + "A,a,C1,花叶类\nB,b,C1,花叶类\nD,d,C2,茄类\nE,e,C2,茄类\n",
                                    std::string(kTransactionsHeader) +
                                        "2023-06-01,09:00:00,A,3,5,0,0\n2023-06-02,09:00:00,B,1,5,0,0\n"
                                        "2023-06-02,09:00:00,D,2,5,0,0\n2023-05-20,09:00:00,E,2,5,0,0\n",
                                    std::string(kWholesaleHeader) +
                                        "2023-05-30,A,2\n2023-06-01,A,4\n2023-06-02,B,3\n2023-06-02,D,3\n"
                                        "2023-05-20,E,1\n",
                                    std::string(kLossHeader) + "A,a,10\nB,b,10\nD,d,5\nE,e,5\n");
  const auto pool = candidate_pool(ds, *Date::parse("2023-06-01"), *Date::parse("2023-06-02"));
  REQUIRE(pool.size() == 3);  // E sold only outside the window
  CHECK(pool[0].item_code == "A");
  CHECK(pool[0].share == doctest::Approx(0.75));
  CHECK(pool[1].share == doctest::Approx(0.25));
  CHECK(pool[2].share == doctest::Approx(1.0));
  CHECK(pool[0].wholesale_forecast == doctest::Approx(3.0));  // mean of the quotes up to the window end
  CHECK(pool[0].loss_rate == doctest::Approx(0.1));
  CHECK_ERRC(candidate_pool(ds, *Date::parse("2023-07-01"), *Date::parse("2023-07-02")), Errc::EmptyWindow);
}

TEST_CASE("item demand modes") {
  const auto m = DemandModel::linear(-2, 10);
  auto c = candidate("x", "K", 1, 0, 0.25);
  CHECK(item_demand(m, c, 3, DemandMode::Literal) == 4.0);
  CHECK(item_demand(m, c, 3, DemandMode::ShareScaled) == 1.0);
  c.share = 0;
  for (double p : {0.5, 2.0, 4.0}) CHECK(item_demand(m, c, p, DemandMode::ShareScaled) == 0.0);
  CHECK(parse_demand_mode("literal") == DemandMode::Literal);
  CHECK(to_string(DemandMode::ShareScaled) == "share");
}

TEST_CASE("high demand item matches the category planner") {
  const auto m = DemandModel::linear(-2.89165146, 64.2021206);
  const auto c = candidate("x", "K", 7.0, 0.1, 1.0);
  SelectionConfig cfg;
  const auto opt = optimal_item_price(c, m, cfg);
  REQUIRE(opt.feasible);
  CHECK_FALSE(opt.display_bound);
  const auto ref = optimal_price(m, effective_unit_cost(7.0, 0.1), 7.0 * (1 + kPriceMargin));
  CHECK(opt.price == doctest::Approx(ref.price).epsilon(1e-6));
  CHECK(opt.supply_kg == doctest::Approx(ref.quantity / 0.9));
}

TEST_CASE("tiny demand item lands on the display minimum") {
  const auto m = DemandModel::log_shift(-26.11035516, 2.51727164, 83.60511972);
  const auto c = candidate("x", "K", 8.0, 0.1, 0.05);
  SelectionConfig cfg;
  const auto opt = optimal_item_price(c, m, cfg);
  CHECK(opt.display_bound);
  CHECK(opt.supply_kg == 2.5);
  CHECK(opt.profit == doctest::Approx(opt.price * opt.predicted_sales_kg - 2.5 * 8.0));
  // dense grid over both branches
  double best = -1e300;
  const double hi = *zero_demand_price(m);
  for (int i = 0; i <= 200000; ++i) {
    const double p = 8.0 * (1 + kPriceMargin) + (hi - 8.0 * 1.001) * i / 200000.0;
    const double q = 0.05 * eval(m, p);
    best = std::max(best, p * q - 8.0 * std::max(2.5, q / 0.9));
  }
  CHECK(opt.profit >= best - 1e-6);
  CHECK(opt.profit <= best + 1e-3);
}

TEST_CASE("wholesale above the zero demand price") {
  CHECK_ERRC(optimal_item_price(candidate("x", "K", 6.0, 0.1, 1.0), DemandModel::linear(-2, 10), SelectionConfig{}),
             Errc::EmptyFeasibleInterval);
}

TEST_CASE("evaluate_selection") {
  CategoryModels models;
  const auto pool = make_pool(6, 6, 4, models);
  SelectionConfig cfg;
  cfg.min_items = 27;
  cfg.max_items = 33;
  std::vector<ItemOptimum> optima;
  for (const auto& c : pool) optima.push_back(optimal_item_price(c, models.at(c.category), cfg));

  std::vector<char> none(pool.size(), 0);
  CHECK_FALSE(evaluate_selection(none, optima, pool, cfg));

  std::vector<char> thirty(pool.size(), 0);
  double expected = 0;
  for (std::size_t i = 0; i < pool.size(); ++i)
    if (i % 6 != 5) {
      thirty[i] = 1;
      expected += optima[i].profit;
    }
  auto v = evaluate_selection(thirty, optima, pool, cfg);
  REQUIRE(v);
  CHECK(*v == doctest::Approx(expected));

  // 30 items drawn from five categories only
  std::vector<char> five(pool.size(), 0);
  for (std::size_t i = 0; i < 30; ++i) five[i] = 1;
  CHECK_FALSE(evaluate_selection(five, optima, pool, cfg));
}

TEST_CASE("local search keeps the greedy plan when it is already optimal") {
  CategoryModels models;
  auto pool = make_pool(6, 6, 12, models);
  SelectionConfig cfg;
  cfg.min_items = 6;
  cfg.max_items = 36;
  cfg.restarts = 4;
  const auto greedy = greedy_assortment(pool, models, cfg);
  const auto best = optimize_assortment(pool, models, cfg);
  // every profitable item is taken, which also covers all categories
  std::vector<ItemOptimum> optima;
  double top = 0;
  std::size_t positive = 0;
  for (const auto& c : pool) {
    const auto o = optimal_item_price(c, models.at(c.category), cfg);
    if (o.feasible && o.profit > 0) {
      top += o.profit;
      ++positive;
    }
  }
  REQUIRE(positive >= 6);
  REQUIRE(positive <= 36);
  CHECK(best.total_profit == doctest::Approx(top));
  CHECK(best.total_profit >= greedy.total_profit - 1e-9);
}

TEST_CASE("optimize matches brute force on small pools") {
  int matched = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CategoryModels models;
    const auto pool = make_pool(3, 4, 100 + seed, models);
    std::vector<ItemCandidate> ten(pool.begin(), pool.begin() + 10);
    const auto cfg = small_config();
    const auto exact = brute_force_assortment(ten, models, cfg);
    const auto found = optimize_assortment(ten, models, cfg);
    CHECK(found.selected_count >= 3);
    CHECK(found.selected_count <= 5);
    CHECK(found.categories_covered == 3);
    if (std::abs(found.total_profit - exact.total_profit) <= 1e-9 * std::max(1.0, std::abs(exact.total_profit)))
      ++matched;
  }
  CHECK(matched >= 19);
}

TEST_CASE("assortment errors") {
  CategoryModels models;
  auto pool = make_pool(2, 5, 3, models);
  auto cfg = small_config();
  CHECK_ERRC(optimize_assortment(pool, models, cfg), Errc::CategoryUncoverable);
  CHECK_ERRC(brute_force_assortment(pool, models, cfg), Errc::CategoryUncoverable);
  cfg.required_categories = 2;
  cfg.min_items = 20;
  cfg.max_items = 25;
  CHECK_ERRC(optimize_assortment(pool, models, cfg), Errc::PoolTooSmall);
  cfg.min_items = 6;
  cfg.max_items = 5;
  CHECK_ERRC(optimize_assortment(pool, models, cfg), Errc::InvalidConfig);

  CategoryModels big_models;
  const auto big = make_pool(3, 6, 1, big_models);
  CHECK_ERRC(brute_force_assortment(big, big_models, small_config()), Errc::PoolTooLarge);
}

TEST_CASE("no feasible vector and a single feasible vector") {
  CategoryModels models{{"K0", DemandModel::linear(-2, 40)}, {"K1", DemandModel::linear(-2, 40)},
                        {"K2", DemandModel::linear(-2, 40)}};
  std::vector<ItemCandidate> pool{candidate("a", "K0", 3, 0.1, 1), candidate("b", "K1", 3, 0.1, 1),
                                  candidate("c", "K2", 3, 0.1, 1)};
  auto cfg = small_config();
  cfg.min_items = 4;
  CHECK_ERRC(brute_force_assortment(pool, models, cfg), Errc::PoolTooSmall);

  pool.push_back(candidate("d", "K2", 3, 0.1, 1));
  // count range 4..4 leaves exactly one vector
  cfg.max_items = 4;
  const auto only = brute_force_assortment(pool, models, cfg);
  CHECK(only.selected_count == 4);
  const auto found = optimize_assortment(pool, models, cfg);
  CHECK(found.selected_count == 4);

  // coverage needs three items but at most two may be stocked
  cfg.min_items = 1;
  cfg.max_items = 2;
  CHECK_ERRC(brute_force_assortment(pool, models, cfg), Errc::NoFeasibleAssortment);
  CHECK_ERRC(optimize_assortment(pool, models, cfg), Errc::NoFeasibleAssortment);

  // a category whose only item loses more than the stocking allowance
  CategoryModels tight = models;
  tight["K2"] = DemandModel::linear(-2, 7);
  std::vector<ItemCandidate> losing{candidate("a", "K0", 3, 0.1, 1), candidate("b", "K1", 3, 0.1, 1),
                                    candidate("c", "K2", 3.4, 0.1, 0.01)};
  auto strict = small_config();
  strict.stocking_loss_factor = 0.0;
  CHECK_ERRC(optimize_assortment(losing, tight, strict), Errc::CategoryUncoverable);
}

TEST_CASE("assortment is deterministic and rows follow the zero convention") {
  CategoryModels models;
  const auto pool = make_pool(6, 8, 77, models);
  SelectionConfig cfg;
  cfg.seed = 5;
  cfg.restarts = 6;
  const auto a = optimize_assortment(pool, models, cfg);
  const auto b = optimize_assortment(pool, models, cfg);
  REQUIRE(a.rows.size() == pool.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].selected == b.rows[i].selected);
    CHECK(a.rows[i].price == b.rows[i].price);
    if (!a.rows[i].selected) {
      CHECK(a.rows[i].supply_kg == 0.0);
      CHECK(a.rows[i].price == 0.0);
    } else {
      CHECK(a.rows[i].supply_kg >= 2.5);
      CHECK(a.rows[i].price > pool[i].wholesale_forecast);
    }
  }
  CHECK(a.selected_count >= 27);
  CHECK(a.selected_count <= 33);
  CHECK(a.categories_covered == 6);
}

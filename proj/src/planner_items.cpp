#include "vegplan/planner_items.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "vegplan/error.hpp"
#include "vegplan/forecast.hpp"
#include "vegplan/numeric.hpp"
#include "vegplan/planner_category.hpp"

namespace vegplan {

std::string_view to_string(DemandMode mode) noexcept {
  return mode == DemandMode::ShareScaled ? "share" : "literal";
}

std::optional<DemandMode> parse_demand_mode(std::string_view text) {
  if (text == "share") return DemandMode::ShareScaled;
  if (text == "literal") return DemandMode::Literal;
  return std::nullopt;
}

std::vector<ItemCandidate> candidate_pool(const Dataset& dataset, Date first, Date last,
                                          std::size_t mean_window, std::vector<std::string>* skipped) {
  if (last < first) throw Error(Errc::EmptyWindow, first.str() + " > " + last.str());
  std::map<std::string, double> item_kg;
  std::map<std::string, double> category_kg;
  for (const auto& tx : dataset.transactions()) {
    if (tx.is_return || tx.date < first || tx.date > last) continue;
    item_kg[tx.item_code] += tx.quantity_kg;
    category_kg[dataset.item(tx.item_code).category_code] += tx.quantity_kg;
  }
  if (item_kg.empty()) throw Error(Errc::EmptyWindow, "no sales between " + first.str() + " and " + last.str());

  std::vector<ItemCandidate> pool;
  for (const auto& [code, kg] : item_kg) {
    const auto& item = dataset.item(code);
    const auto loss = dataset.loss_rate(code);
    const auto quotes = item_wholesale_series(dataset, code, last + 1);
    if (!loss || quotes.observations.empty()) {
      if (skipped) skipped->push_back(code);
      continue;
    }
    const double total = category_kg[item.category_code];
    pool.push_back({code, item.item_name, item.category_code, item.category_name,
                    mean_forecast(quotes, mean_window), *loss, total > 0 ? kg / total : 0.0});
  }
  return pool;
}

double item_demand(const DemandModel& category_model, const ItemCandidate& candidate, double price,
                   DemandMode mode) {
  const double q = eval(category_model, price);
  return mode == DemandMode::ShareScaled ? candidate.share * q : q;
}

ItemOptimum optimal_item_price(const ItemCandidate& candidate, const DemandModel& category_model,
                               const SelectionConfig& config) {
  const double w = candidate.wholesale_forecast;
  const double keep = 1.0 - candidate.loss_rate;
  if (!(keep > 0.0 && keep <= 1.0)) throw Error(Errc::LossOutOfRange, candidate.item_code);
  PriceInterval interval;
  try {
    interval = price_interval(category_model, w * (1.0 + kPriceMargin));
  } catch (const Error& e) {
    throw Error(Errc::EmptyFeasibleInterval, candidate.item_code + ": " + e.what());
  }

  const double display = config.min_display_kg;
  auto demand = [&](double p) { return item_demand(category_model, candidate, p, config.demand_mode); };
  auto supply = [&](double p) { return std::max(display, demand(p) / keep); };
  auto profit = [&](double p) { return p * demand(p) - w * supply(p); };

  // Kink: below p_kink supply follows demand, above it the display minimum binds.
  double kink = interval.hi;
  if (demand(interval.lo) / keep <= display) {
    kink = interval.lo;
  } else if (demand(interval.hi) / keep < display) {
    double a = interval.lo, b = interval.hi;
    for (int i = 0; i < 200 && b - a > 1e-12 * std::max(1.0, b); ++i) {
      const double m = 0.5 * (a + b);
      (demand(m) / keep > display ? a : b) = m;
    }
    kink = 0.5 * (a + b);
  }

  numeric::GoldenResult best{interval.lo, profit(interval.lo)};
  if (kink > interval.lo) {
    auto r = numeric::golden_section_max(profit, interval.lo, kink, kPriceTolerance);
    if (r.value > best.value) best = r;
  }
  if (kink < interval.hi) {
    auto r = numeric::golden_section_max(profit, kink, interval.hi, kPriceTolerance);
    if (r.value > best.value) best = r;
  }

  ItemOptimum out;
  out.price = best.x;
  out.predicted_sales_kg = demand(best.x);
  out.supply_kg = supply(best.x);
  out.profit = best.value;
  out.display_bound = out.supply_kg == display;
  out.feasible = out.profit >= -config.stocking_loss_factor * display * w;
  return out;
}

namespace {

struct Indexed {
  std::vector<int> category;  // per candidate, dense category index
  std::size_t categories = 0;
};

Indexed index_categories(std::span<const ItemCandidate> pool) {
  Indexed ix;
  std::map<std::string, int> ids;
  for (const auto& c : pool) ids.emplace(c.category, 0);
  int next = 0;
  for (auto& [code, id] : ids) id = next++;
  for (const auto& c : pool) ix.category.push_back(ids.at(c.category));
  ix.categories = ids.size();
  return ix;
}

double tie_tolerance(double a, double b) { return 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); }

std::vector<std::string> selected_codes(std::span<const char> sel, std::span<const ItemCandidate> pool) {
  std::vector<std::string> codes;
  for (std::size_t i = 0; i < sel.size(); ++i)
    if (sel[i]) codes.push_back(pool[i].item_code);
  std::sort(codes.begin(), codes.end());
  return codes;
}

// Higher profit wins; near-equal profits go to the lexicographically smaller
// set of selected item codes.
bool better_plan(double profit_a, std::span<const char> a, double profit_b, std::span<const char> b,
                 std::span<const ItemCandidate> pool) {
  if (std::abs(profit_a - profit_b) > tie_tolerance(profit_a, profit_b)) return profit_a > profit_b;
  return selected_codes(a, pool) < selected_codes(b, pool);
}

struct Prepared {
  std::vector<ItemOptimum> optima;
  Indexed ix;
};

Prepared prepare(std::span<const ItemCandidate> pool, const CategoryModels& models, const SelectionConfig& config) {
  if (config.min_items > config.max_items)
    throw Error(Errc::InvalidConfig, "min_items exceeds max_items");
  if (pool.size() < config.min_items)
    throw Error(Errc::PoolTooSmall, std::to_string(pool.size()) + " candidate(s), need " + std::to_string(config.min_items));
  Prepared prep;
  prep.ix = index_categories(pool);
  if (prep.ix.categories < config.required_categories)
    throw Error(Errc::CategoryUncoverable, "pool spans " + std::to_string(prep.ix.categories) + " categories, need " +
                                               std::to_string(config.required_categories));
  prep.optima.resize(pool.size());
  std::set<int> priceable;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    auto it = models.find(pool[i].category);
    if (it == models.end()) continue;
    try {
      prep.optima[i] = optimal_item_price(pool[i], it->second, config);
    } catch (const Error&) {
      prep.optima[i] = ItemOptimum{};
    }
    if (prep.optima[i].feasible) priceable.insert(prep.ix.category[i]);
  }
  if (priceable.size() < config.required_categories)
    throw Error(Errc::CategoryUncoverable, "only " + std::to_string(priceable.size()) +
                                               " categories have a stockable item");
  return prep;
}

AssortmentPlan build_plan(std::span<const char> sel, std::span<const ItemCandidate> pool, const Prepared& prep) {
  AssortmentPlan plan;
  std::set<int> covered;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    ItemPlanRow row{pool[i].item_code, pool[i].item_name, pool[i].category};
    if (sel[i]) {
      const auto& o = prep.optima[i];
      row.selected = true;
      row.supply_kg = o.supply_kg;
      row.price = o.price;
      row.predicted_sales_kg = o.predicted_sales_kg;
      row.expected_profit = o.profit;
      plan.total_profit += o.profit;
      ++plan.selected_count;
      covered.insert(prep.ix.category[i]);
    }
    plan.rows.push_back(std::move(row));
  }
  plan.categories_covered = covered.size();
  return plan;
}

class LocalSearch {
 public:
  LocalSearch(std::span<const ItemCandidate> pool, const Prepared& prep, const SelectionConfig& config)
      : pool_(pool), prep_(prep), config_(config) {
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (prep.optima[i].feasible) feasible_.push_back(i);
    // Descending profit, pool order on ties.
    by_profit_ = feasible_;
    std::stable_sort(by_profit_.begin(), by_profit_.end(),
                     [&](std::size_t a, std::size_t b) { return prep.optima[a].profit > prep.optima[b].profit; });
  }

  std::optional<double> value(std::span<const char> sel) const {
    return evaluate_selection(sel, prep_.optima, pool_, config_);
  }

  std::vector<char> greedy() const {
    std::vector<char> sel(pool_.size(), 0);
    std::vector<char> seen(prep_.ix.categories, 0);
    for (std::size_t i : by_profit_) {
      const int c = prep_.ix.category[i];
      if (seen[c] || count(sel) >= config_.max_items) continue;
      seen[c] = 1;
      sel[i] = 1;
    }
    repair(sel);
    return sel;
  }

  std::vector<char> random_start(std::mt19937_64& rng) const {
    std::vector<char> sel(pool_.size(), 0);
    std::bernoulli_distribution coin(0.5);
    for (std::size_t i : feasible_) sel[i] = coin(rng) ? 1 : 0;
    repair(sel);
    return sel;
  }

  // Random add/drop/swap moves until `max_stale_moves` consecutive failures,
  // then exhaustive first-improvement sweeps.
  double climb(std::vector<char>& sel, std::mt19937_64& rng) const {
    auto current = value(sel);
    if (!current) return -std::numeric_limits<double>::infinity();
    if (feasible_.empty()) return *current;
    std::uniform_int_distribution<std::size_t> pick(0, feasible_.size() - 1);
    std::uniform_int_distribution<int> kind(0, 2);
    int stale = 0;
    while (stale < config_.max_stale_moves) {
      const std::size_t a = feasible_[pick(rng)], b = feasible_[pick(rng)];
      const int k = kind(rng);
      std::vector<char> trial = sel;
      if (k == 0) {
        if (trial[a]) { ++stale; continue; }
        trial[a] = 1;
      } else if (k == 1) {
        if (!trial[a]) { ++stale; continue; }
        trial[a] = 0;
      } else {
        if (trial[a] == trial[b]) { ++stale; continue; }
        std::swap(trial[a], trial[b]);
      }
      const auto v = value(trial);
      if (v && *v > *current + tie_tolerance(*v, *current)) {
        sel = std::move(trial);
        current = v;
        stale = 0;
      } else {
        ++stale;
      }
    }
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t a : feasible_) {
        for (std::size_t b : feasible_) {
          std::vector<char> trial = sel;
          if (a == b) trial[a] = !trial[a];
          else if (trial[a] != trial[b]) std::swap(trial[a], trial[b]);
          else continue;
          const auto v = value(trial);
          if (v && *v > *current + tie_tolerance(*v, *current)) {
            sel = std::move(trial);
            current = v;
            improved = true;
          }
        }
      }
    }
    return *current;
  }

 private:
  static std::size_t count(std::span<const char> sel) {
    return static_cast<std::size_t>(std::count(sel.begin(), sel.end(), 1));
  }

  std::size_t covered(std::span<const char> sel) const {
    std::set<int> cats;
    for (std::size_t i = 0; i < sel.size(); ++i)
      if (sel[i]) cats.insert(prep_.ix.category[i]);
    return cats.size();
  }

  void repair(std::vector<char>& sel) const {
    for (std::size_t i = 0; i < sel.size(); ++i)
      if (!prep_.optima[i].feasible) sel[i] = 0;
    while (covered(sel) < config_.required_categories) {
      std::vector<char> have(prep_.ix.categories, 0);
      for (std::size_t i = 0; i < sel.size(); ++i)
        if (sel[i]) have[prep_.ix.category[i]] = 1;
      bool added = false;
      for (std::size_t i : by_profit_)
        if (!have[prep_.ix.category[i]]) {
          sel[i] = 1;
          added = true;
          break;
        }
      if (!added) return;
    }
    for (std::size_t i : by_profit_) {
      if (count(sel) >= config_.min_items) break;
      sel[i] = 1;
    }
    while (count(sel) > config_.max_items) {
      bool dropped = false;
      for (auto it = by_profit_.rbegin(); it != by_profit_.rend(); ++it) {
        if (!sel[*it]) continue;
        sel[*it] = 0;
        if (covered(sel) >= config_.required_categories) {
          dropped = true;
          break;
        }
        sel[*it] = 1;
      }
      if (!dropped) return;
    }
  }

  std::span<const ItemCandidate> pool_;
  const Prepared& prep_;
  const SelectionConfig& config_;
  std::vector<std::size_t> feasible_;
  std::vector<std::size_t> by_profit_;
};

}  // namespace

std::optional<double> evaluate_selection(std::span<const char> selection, std::span<const ItemOptimum> optima,
                                         std::span<const ItemCandidate> pool, const SelectionConfig& config) {
  if (selection.size() != optima.size() || selection.size() != pool.size()) return std::nullopt;
  std::size_t count = 0;
  std::set<std::string_view> categories;
  double total = 0.0;
  for (std::size_t i = 0; i < selection.size(); ++i) {
    if (!selection[i]) continue;
    if (!optima[i].feasible) return std::nullopt;
    ++count;
    categories.insert(pool[i].category);
    total += optima[i].profit;
  }
  if (count < config.min_items || count > config.max_items) return std::nullopt;
  if (categories.size() < config.required_categories) return std::nullopt;
  return total;
}

AssortmentPlan greedy_assortment(std::span<const ItemCandidate> pool, const CategoryModels& models,
                                 const SelectionConfig& config) {
  const Prepared prep = prepare(pool, models, config);
  LocalSearch search(pool, prep, config);
  auto sel = search.greedy();
  if (!search.value(sel)) throw Error(Errc::NoFeasibleAssortment, "greedy start violates the constraints");
  return build_plan(sel, pool, prep);
}

AssortmentPlan optimize_assortment(std::span<const ItemCandidate> pool, const CategoryModels& models,
                                   const SelectionConfig& config) {
  const Prepared prep = prepare(pool, models, config);
  LocalSearch search(pool, prep, config);

  std::optional<std::vector<char>> best;
  double best_value = -std::numeric_limits<double>::infinity();
  const int restarts = std::max(1, config.restarts);
  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(numeric::derive_seed(config.seed, "restart:" + std::to_string(r)));
    std::vector<char> sel = r == 0 ? search.greedy() : search.random_start(rng);
    if (!search.value(sel)) continue;
    const double v = search.climb(sel, rng);
    if (!best || better_plan(v, sel, best_value, *best, pool)) {
      best = std::move(sel);
      best_value = v;
    }
  }
  if (!best) throw Error(Errc::NoFeasibleAssortment, "no selection satisfies count and coverage");
  return build_plan(*best, pool, prep);
}

AssortmentPlan brute_force_assortment(std::span<const ItemCandidate> pool, const CategoryModels& models,
                                      const SelectionConfig& config) {
  if (pool.size() > 16) throw Error(Errc::PoolTooLarge, std::to_string(pool.size()) + " candidates");
  const Prepared prep = prepare(pool, models, config);
  std::optional<std::vector<char>> best;
  double best_value = 0.0;
  std::vector<char> sel(pool.size());
  for (std::uint32_t mask = 0; mask < (1u << pool.size()); ++mask) {
    for (std::size_t i = 0; i < pool.size(); ++i) sel[i] = (mask >> i) & 1u;
    const auto v = evaluate_selection(sel, prep.optima, pool, config);
    if (v && (!best || better_plan(*v, sel, best_value, *best, pool))) {
      best = sel;
      best_value = *v;
    }
  }
  if (!best) throw Error(Errc::NoFeasibleAssortment, "no selection satisfies count and coverage");
  return build_plan(*best, pool, prep);
}

}  // namespace vegplan

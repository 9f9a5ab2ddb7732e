#include "vegplan/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "vegplan/numeric.hpp"

namespace vegplan {

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  double uniform() { return static_cast<double>(numeric::splitmix64(state_) >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(uniform() * (hi - lo + 1)); }
  double normal() {
    const double u = std::max(uniform(), 1e-300);
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * uniform());
  }

 private:
  std::uint64_t state_;
};

double round_to(double v, double step) { return std::round(v / step) * step; }

}  // namespace

std::vector<SyntheticCategory> synthetic_categories() {
  return {
      {"1011010101", "花叶类", DemandModel::log_shift(-36.00775817, 2.35435122, 209.756959), 9.44},
      {"1011010201", "花菜类", DemandModel::linear(-2.89165146, 64.2021206), 15.75},
      {"1011010402", "水生根茎类", DemandModel::log_shift(-26.11035516, 2.51727164, 83.60511972), 19.63},
      {"1011010501", "茄类", DemandModel::log_shift(-8.16177241, 1.62367199, 36.4701182), 14.01},
      {"1011010504", "辣椒类", DemandModel::log_shift(-17.07560033, 3.10816607, 105.16379865), 11.02},
      {"1011010801", "食用菌", DemandModel::linear(-3.28878025, 92.53732638), 13.20},
  };
}

Dataset synthetic_dataset(const SyntheticOptions& options) {
  Rng rng(numeric::derive_seed(options.seed, "synthetic"));
  const auto categories = synthetic_categories();

  Catalog catalog;
  LossTable losses;
  std::vector<WholesaleQuote> wholesale;
  std::vector<Transaction> transactions;

  struct Item {
    std::string code;
    std::size_t category;
    double share;
    double price_factor;
    double wholesale_base;
  };
  std::vector<Item> items;

  for (std::size_t c = 0; c < categories.size(); ++c) {
    const auto& cat = categories[c];
    std::vector<double> weights(options.items_per_category);
    for (auto& w : weights) w = rng.uniform(0.5, 1.5);
    double total = 0.0;
    for (double w : weights) total += w;
    for (std::size_t k = 0; k < options.items_per_category; ++k) {
      char code[32];
      std::snprintf(code, sizeof code, "1029000%02zu%04zu", c + 1, k + 1);
      char suffix[24];
      std::snprintf(suffix, sizeof suffix, "%02zu", k + 1);
      const std::string name = cat.name + "单品" + suffix;
      catalog.push_back({code, name, cat.code, cat.name});
      losses.emplace(code, LossEntry{code, name, round_to(rng.uniform(3.0, 15.0), 0.01) / 100.0});
      items.push_back({code, c, weights[k] / total, rng.uniform(0.92, 1.08), cat.reference_price * rng.uniform(0.45, 0.6)});
    }
  }

  for (int day = 0; day < options.days; ++day) {
    const Date date = options.start + day;
    std::vector<double> price(categories.size()), volume(categories.size());
    for (std::size_t c = 0; c < categories.size(); ++c) {
      const double ref = categories[c].reference_price;
      price[c] = ref * rng.uniform(1.0 - options.price_spread, 1.0 + options.price_spread);
      volume[c] = eval(categories[c].curve, price[c]) * std::max(0.0, 1.0 + options.noise * rng.normal());
    }
    for (auto& item : items) {
      if (day == 0 || rng.uniform() >= options.quote_gap_probability) {
        const double w = item.wholesale_base * (1.0 + 0.05 * rng.normal());
        wholesale.push_back({date, item.code, round_to(std::max(0.05, w), 0.01)});
      }
      const double kg = item.share * volume[item.category];
      if (kg <= 0.0) continue;
      const double unit = round_to(price[item.category] * item.price_factor, 0.01);
      const int pieces = rng.integer(1, 3);
      int minute = 9 * 60 + rng.integer(0, 59);
      for (int k = 0; k < pieces; ++k) {
        const double q = round_to(kg / pieces, 0.001);
        if (q <= 0.0) continue;
        const TimeOfDay time((minute * 60 + rng.integer(0, 59)) * 1000);
        transactions.push_back({date, time, item.code, q, unit, false, rng.uniform() < 0.05});
        minute += rng.integer(5, 90);
        minute = std::min(minute, 22 * 60);
      }
      if (rng.uniform() < options.return_probability) {
        const double q = round_to(std::min(0.5, kg / pieces), 0.001);
        if (q > 0.0) transactions.push_back({date, TimeOfDay(81000000), item.code, q, unit, true, false});
      }
    }
  }
  return Dataset::build(std::move(catalog), std::move(transactions), std::move(wholesale), std::move(losses));
}

}  // namespace vegplan

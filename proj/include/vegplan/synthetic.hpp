#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "vegplan/dataio.hpp"
#include "vegplan/demand.hpp"

namespace vegplan {

struct SyntheticOptions {
  std::uint64_t seed = 0;
  Date start = Date::from_ymd(2023, 1, 1);
  int days = 120;
  std::size_t items_per_category = 8;
  double noise = 0.05;          // relative sd of daily category volume
  double price_spread = 0.25;   // daily price drawn from ref * [1 - s, 1 + s]
  double return_probability = 0.01;
  double quote_gap_probability = 0.02;  // chance a day has no wholesale quote
};

struct SyntheticCategory {
  std::string code;
  std::string name;
  DemandModel curve;        // true daily category demand
  double reference_price = 0.0;
};

/// The six vegetable categories with their generating curves.
std::vector<SyntheticCategory> synthetic_categories();

/// Seeded store history: every item sells every day, with prices scattered
/// around the category reference price and volume following the category
/// curve split by fixed item shares.
Dataset synthetic_dataset(const SyntheticOptions& options = {});

}  // namespace vegplan

#pragma once

#include <filesystem>
#include <random>
#include <string>

#include <doctest.h>

#include "vegplan/dataio.hpp"
#include "vegplan/error.hpp"

// Checks that `expr` throws vegplan::Error carrying `errc`.
#define CHECK_ERRC(expr, errc)                                        \
  do {                                                                \
    bool thrown_ = false;                                             \
    try {                                                             \
      (void)(expr);                                                   \
    } catch (const vegplan::Error& e_) {                              \
      thrown_ = true;                                                 \
      CHECK_MESSAGE(e_.code() == (errc), e_.what());                  \
    }                                                                 \
    CHECK_MESSAGE(thrown_, "expected " #errc " from " #expr);         \
  } while (0)

namespace testing {

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("vegplan_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline vegplan::Dataset dataset_from_text(const std::string& catalog, const std::string& transactions,
                                          const std::string& wholesale, const std::string& loss,
                                          std::size_t expected_categories = 0) {
  auto cat = vegplan::parse_catalog_text(catalog, expected_categories);
  auto tx = vegplan::parse_transactions_text(transactions, cat);
  return vegplan::Dataset::build(cat, std::move(tx), vegplan::parse_wholesale_text(wholesale),
                                 vegplan::parse_loss_rates_text(loss));
}

inline const char* kCatalogHeader = "item_code,item_name,category_code,category_name\n";
inline const char* kTransactionsHeader = "date,time,item_code,quantity_kg,unit_price,is_return,is_discount\n";
inline const char* kWholesaleHeader = "date,item_code,wholesale_price\n";
inline const char* kLossHeader = "item_code,item_name,loss_rate_percent\n";

}  // namespace testing

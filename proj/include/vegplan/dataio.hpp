#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "vegplan/date.hpp"

namespace vegplan {

inline constexpr std::size_t kCategoryCount = 6;

struct CatalogEntry {
  std::string item_code;
  std::string item_name;
  std::string category_code;
  std::string category_name;

  friend bool operator==(const CatalogEntry&, const CatalogEntry&) = default;
};

/// One scan line of the sales log. Returns are separate rows with a positive
/// quantity and `is_return` set; they are never netted at parse time.
struct Transaction {
  Date date;
  TimeOfDay time;
  std::string item_code;
  double quantity_kg = 0.0;
  double unit_price = 0.0;
  bool is_return = false;
  bool is_discount = false;

  friend bool operator==(const Transaction&, const Transaction&) = default;
};

struct WholesaleQuote {
  Date date;
  std::string item_code;
  double wholesale_price = 0.0;

  friend bool operator==(const WholesaleQuote&, const WholesaleQuote&) = default;
};

struct LossEntry {
  std::string item_code;
  std::string item_name;
  double loss_rate = 0.0;  // fraction in [0, 1)

  friend bool operator==(const LossEntry&, const LossEntry&) = default;
};

struct Category {
  std::string code;
  std::string name;

  friend bool operator==(const Category&, const Category&) = default;
};

using Catalog = std::vector<CatalogEntry>;
using LossTable = std::map<std::string, LossEntry>;

// Parsers. `expected_categories == 0` disables the category-count check.
Catalog parse_catalog(const std::filesystem::path& path,
                      std::size_t expected_categories = kCategoryCount);
Catalog parse_catalog_text(std::string_view text,
                           std::size_t expected_categories = kCategoryCount);
std::vector<Transaction> parse_transactions(const std::filesystem::path& path, const Catalog& catalog);
std::vector<Transaction> parse_transactions_text(std::string_view text, const Catalog& catalog);
std::vector<WholesaleQuote> parse_wholesale(const std::filesystem::path& path);
std::vector<WholesaleQuote> parse_wholesale_text(std::string_view text);
LossTable parse_loss_rates(const std::filesystem::path& path);
LossTable parse_loss_rates_text(std::string_view text);

/// Immutable, cross-referenced view over the four inputs. Transactions are
/// ordered by (date, time, input position).
class Dataset {
 public:
  /// Validates foreign keys (Errc::UnknownItemCode) and sorts transactions.
  static Dataset build(Catalog catalog, std::vector<Transaction> transactions,
                       std::vector<WholesaleQuote> wholesale, LossTable losses);

  const Catalog& catalog() const noexcept { return catalog_; }
  const std::vector<Transaction>& transactions() const noexcept { return transactions_; }
  const std::vector<WholesaleQuote>& wholesale() const noexcept { return wholesale_; }
  const LossTable& losses() const noexcept { return losses_; }

  bool empty() const noexcept { return transactions_.empty(); }
  Date first_date() const;
  Date last_date() const;

  const CatalogEntry* find_item(std::string_view item_code) const;
  const CatalogEntry& item(std::string_view item_code) const;
  /// Distinct categories ordered by name.
  const std::vector<Category>& categories() const noexcept { return categories_; }
  const Category* find_category(std::string_view code_or_name) const;

  /// Quote for exactly that day.
  std::optional<double> wholesale_on(std::string_view item_code, Date date) const;
  /// Most recent quote on or before `date` (forward fill).
  std::optional<double> wholesale_resolved(std::string_view item_code, Date date) const;
  std::optional<double> loss_rate(std::string_view item_code) const;

 private:
  Catalog catalog_;
  std::vector<Transaction> transactions_;
  std::vector<WholesaleQuote> wholesale_;
  LossTable losses_;
  std::vector<Category> categories_;
  std::unordered_map<std::string, std::size_t> item_index_;
  std::unordered_map<std::string, std::vector<std::pair<Date, double>>> quotes_;
};

struct MissingQuote {
  Date date;
  std::string item_code;
  bool forward_filled = false;  // resolvable from an earlier quote
};

/// Informational cross-reference report; never fatal.
struct DatasetReport {
  std::optional<Date> first_date;
  std::optional<Date> last_date;
  std::size_t items = 0;
  std::size_t categories = 0;
  std::size_t transactions = 0;
  std::size_t returns = 0;
  std::vector<std::string> missing_loss;
  std::vector<MissingQuote> missing_wholesale;

  bool clean() const { return missing_loss.empty() && missing_wholesale.empty(); }
};

DatasetReport validate_dataset(const Dataset& dataset);
nlohmann::json to_json(const DatasetReport& report);

struct DatasetPaths {
  std::filesystem::path catalog;
  std::filesystem::path transactions;
  std::filesystem::path wholesale;
  std::filesystem::path loss;

  /// catalog.csv, transactions.csv, wholesale.csv and loss.csv under `dir`.
  static DatasetPaths in_directory(const std::filesystem::path& dir);
};

Dataset load_dataset(const DatasetPaths& paths, std::size_t expected_categories = kCategoryCount);
/// Writes the four CSV files; parsing them back yields an equal dataset.
void write_dataset(const Dataset& dataset, const DatasetPaths& paths);

}  // namespace vegplan

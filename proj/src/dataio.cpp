#include "vegplan/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "vegplan/csv.hpp"
#include "vegplan/error.hpp"

namespace vegplan {

namespace {

std::string where(const std::string& source, const csv::Table& t, std::size_t row) {
  return source + ":" + std::to_string(t.line_numbers[row]);
}

Date parse_date_field(std::string_view text, const std::string& context) {
  auto d = Date::parse(text);
  if (!d) throw Error(Errc::MalformedDate, context + ": bad date '" + std::string(text) + "'");
  return *d;
}

Catalog catalog_from_table(const csv::Table& t, const std::string& source,
                           std::size_t expected_categories) {
  const std::size_t c_code = t.column("item_code");
  const std::size_t c_name = t.column("item_name");
  const std::size_t c_cat = t.column("category_code");
  const std::size_t c_catname = t.column("category_name");
  if (t.rows.empty()) throw Error(Errc::EmptyFile, source + ": catalog has no rows");

  Catalog out;
  std::set<std::string> seen;
  std::map<std::string, std::string> category_names;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    CatalogEntry e{row[c_code], row[c_name], row[c_cat], row[c_catname]};
    if (e.item_code.empty()) throw Error(Errc::MalformedField, where(source, t, r) + ": empty item_code");
    if (!seen.insert(e.item_code).second)
      throw Error(Errc::DuplicateItemCode, where(source, t, r) + ": " + e.item_code);
    auto [it, fresh] = category_names.emplace(e.category_code, e.category_name);
    if (!fresh && it->second != e.category_name)
      throw Error(Errc::MalformedField, where(source, t, r) + ": category " + e.category_code +
                                            " has two names");
    out.push_back(std::move(e));
  }
  std::set<std::string> distinct_names;
  for (const auto& [code, name] : category_names) distinct_names.insert(name);
  if (expected_categories != 0 &&
      (distinct_names.size() != expected_categories || category_names.size() != expected_categories))
    throw Error(Errc::CategoryCountMismatch, source + ": expected " +
                                                 std::to_string(expected_categories) +
                                                 " categories, found " +
                                                 std::to_string(distinct_names.size()));
  return out;
}

std::vector<Transaction> transactions_from_table(const csv::Table& t, const std::string& source,
                                                 const Catalog& catalog) {
  const std::size_t c_date = t.column("date");
  const std::size_t c_time = t.column("time");
  const std::size_t c_item = t.column("item_code");
  const std::size_t c_qty = t.column("quantity_kg");
  const std::size_t c_price = t.column("unit_price");
  const std::size_t c_ret = t.column("is_return");
  const std::size_t c_disc = t.column("is_discount");

  std::set<std::string_view> known;
  for (const auto& e : catalog) known.insert(e.item_code);

  std::vector<Transaction> out;
  out.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::string ctx = where(source, t, r);
    Transaction tx;
    tx.date = parse_date_field(row[c_date], ctx);
    auto tod = TimeOfDay::parse(row[c_time]);
    if (!tod) throw Error(Errc::MalformedDate, ctx + ": bad time '" + row[c_time] + "'");
    tx.time = *tod;
    tx.item_code = row[c_item];
    if (!known.contains(tx.item_code)) throw Error(Errc::UnknownItemCode, ctx + ": " + tx.item_code);
    tx.quantity_kg = csv::parse_double(row[c_qty], ctx);
    tx.unit_price = csv::parse_double(row[c_price], ctx);
    if (tx.quantity_kg < 0) throw Error(Errc::NegativeQuantity, ctx + ": quantity " + row[c_qty]);
    if (!(tx.unit_price > 0)) throw Error(Errc::NegativePrice, ctx + ": unit price " + row[c_price]);
    tx.is_return = csv::parse_flag(row[c_ret], ctx);
    tx.is_discount = csv::parse_flag(row[c_disc], ctx);
    out.push_back(std::move(tx));
  }
  std::stable_sort(out.begin(), out.end(), [](const Transaction& a, const Transaction& b) {
    return std::tie(a.date, a.time) < std::tie(b.date, b.time);
  });
  return out;
}

std::vector<WholesaleQuote> wholesale_from_table(const csv::Table& t, const std::string& source) {
  const std::size_t c_date = t.column("date");
  const std::size_t c_item = t.column("item_code");
  const std::size_t c_price = t.column("wholesale_price");
  std::vector<WholesaleQuote> out;
  std::set<std::pair<Date, std::string>> keys;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::string ctx = where(source, t, r);
    WholesaleQuote q{parse_date_field(row[c_date], ctx), row[c_item],
                     csv::parse_double(row[c_price], ctx)};
    if (!(q.wholesale_price > 0)) throw Error(Errc::NonpositivePrice, ctx + ": " + row[c_price]);
    if (!keys.emplace(q.date, q.item_code).second)
      throw Error(Errc::DuplicateQuote, ctx + ": " + q.date.str() + " " + q.item_code);
    out.push_back(std::move(q));
  }
  return out;
}

LossTable losses_from_table(const csv::Table& t, const std::string& source) {
  const std::size_t c_item = t.column("item_code");
  const std::size_t c_name = t.column("item_name");
  const std::size_t c_loss = t.column("loss_rate_percent");
  LossTable out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::string ctx = where(source, t, r);
    const double percent = csv::parse_double(row[c_loss], ctx);
    if (percent < 0 || percent >= 100)
      throw Error(Errc::OutOfRangeLoss, ctx + ": " + row[c_loss] + "%");
    if (out.contains(row[c_item])) throw Error(Errc::DuplicateItemCode, ctx + ": " + row[c_item]);
    out.emplace(row[c_item], LossEntry{row[c_item], row[c_name], percent / 100.0});
  }
  return out;
}

// Decimal percent text that converts back to exactly `fraction`. The naive
// fraction * 100 can land one ulp off, so search a few neighbours.
std::string format_percent(double fraction) {
  const double target = fraction * 100.0;
  double up = target, down = target;
  for (int i = 0; i < 64; ++i) {
    for (double c : {up, down}) {
      std::string text = csv::format_double(c);
      if (csv::parse_double(text, "loss") / 100.0 == fraction) return text;
    }
    up = std::nextafter(up, 1e300);
    down = std::nextafter(down, -1e300);
  }
  return csv::format_double(target);
}

void open_for_write(std::ofstream& out, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out.open(path, std::ios::binary);
  if (!out) throw Error(Errc::FileNotFound, "cannot write " + path.string());
}

}  // namespace

Catalog parse_catalog(const std::filesystem::path& path, std::size_t expected_categories) {
  return catalog_from_table(csv::read_file(path), path.string(), expected_categories);
}
Catalog parse_catalog_text(std::string_view text, std::size_t expected_categories) {
  return catalog_from_table(csv::parse(text, "catalog"), "catalog", expected_categories);
}
std::vector<Transaction> parse_transactions(const std::filesystem::path& path, const Catalog& catalog) {
  return transactions_from_table(csv::read_file(path), path.string(), catalog);
}
std::vector<Transaction> parse_transactions_text(std::string_view text, const Catalog& catalog) {
  return transactions_from_table(csv::parse(text, "transactions"), "transactions", catalog);
}
std::vector<WholesaleQuote> parse_wholesale(const std::filesystem::path& path) {
  return wholesale_from_table(csv::read_file(path), path.string());
}
std::vector<WholesaleQuote> parse_wholesale_text(std::string_view text) {
  return wholesale_from_table(csv::parse(text, "wholesale"), "wholesale");
}
LossTable parse_loss_rates(const std::filesystem::path& path) {
  return losses_from_table(csv::read_file(path), path.string());
}
LossTable parse_loss_rates_text(std::string_view text) {
  return losses_from_table(csv::parse(text, "loss"), "loss");
}

Dataset Dataset::build(Catalog catalog, std::vector<Transaction> transactions,
                       std::vector<WholesaleQuote> wholesale, LossTable losses) {
  Dataset ds;
  ds.catalog_ = std::move(catalog);
  for (std::size_t i = 0; i < ds.catalog_.size(); ++i) {
    if (!ds.item_index_.emplace(ds.catalog_[i].item_code, i).second)
      throw Error(Errc::DuplicateItemCode, ds.catalog_[i].item_code);
  }
  std::map<std::string, std::string> by_name;
  for (const auto& e : ds.catalog_) by_name.emplace(e.category_name, e.category_code);
  for (const auto& [name, code] : by_name) ds.categories_.push_back({code, name});

  for (const auto& tx : transactions)
    if (!ds.item_index_.contains(tx.item_code))
      throw Error(Errc::UnknownItemCode, "transaction references " + tx.item_code);
  for (const auto& q : wholesale)
    if (!ds.item_index_.contains(q.item_code))
      throw Error(Errc::UnknownItemCode, "wholesale quote references " + q.item_code);
  for (const auto& [code, entry] : losses)
    if (!ds.item_index_.contains(code))
      throw Error(Errc::UnknownItemCode, "loss entry references " + code);

  std::stable_sort(transactions.begin(), transactions.end(),
                   [](const Transaction& a, const Transaction& b) {
                     return std::tie(a.date, a.time) < std::tie(b.date, b.time);
                   });
  ds.transactions_ = std::move(transactions);

  for (const auto& q : wholesale) ds.quotes_[q.item_code].emplace_back(q.date, q.wholesale_price);
  for (auto& [item, quotes] : ds.quotes_) {
    std::sort(quotes.begin(), quotes.end());
    for (std::size_t i = 1; i < quotes.size(); ++i)
      if (quotes[i].first == quotes[i - 1].first)
        throw Error(Errc::DuplicateQuote, quotes[i].first.str() + " " + item);
  }
  ds.wholesale_ = std::move(wholesale);
  ds.losses_ = std::move(losses);
  return ds;
}

Date Dataset::first_date() const {
  if (transactions_.empty()) throw Error(Errc::EmptyDataset, "no transactions");
  return transactions_.front().date;
}

Date Dataset::last_date() const {
  if (transactions_.empty()) throw Error(Errc::EmptyDataset, "no transactions");
  return transactions_.back().date;
}

const CatalogEntry* Dataset::find_item(std::string_view item_code) const {
  auto it = item_index_.find(std::string(item_code));
  return it == item_index_.end() ? nullptr : &catalog_[it->second];
}

const CatalogEntry& Dataset::item(std::string_view item_code) const {
  const CatalogEntry* e = find_item(item_code);
  if (!e) throw Error(Errc::UnknownItemCode, std::string(item_code));
  return *e;
}

const Category* Dataset::find_category(std::string_view code_or_name) const {
  for (const auto& c : categories_)
    if (c.code == code_or_name || c.name == code_or_name) return &c;
  return nullptr;
}

std::optional<double> Dataset::wholesale_on(std::string_view item_code, Date date) const {
  auto it = quotes_.find(std::string(item_code));
  if (it == quotes_.end()) return std::nullopt;
  const auto& q = it->second;
  auto pos = std::lower_bound(q.begin(), q.end(), date,
                              [](const auto& entry, Date d) { return entry.first < d; });
  if (pos == q.end() || pos->first != date) return std::nullopt;
  return pos->second;
}

std::optional<double> Dataset::wholesale_resolved(std::string_view item_code, Date date) const {
  auto it = quotes_.find(std::string(item_code));
  if (it == quotes_.end()) return std::nullopt;
  const auto& q = it->second;
  auto pos = std::upper_bound(q.begin(), q.end(), date,
                              [](Date d, const auto& entry) { return d < entry.first; });
  if (pos == q.begin()) return std::nullopt;
  return std::prev(pos)->second;
}

std::optional<double> Dataset::loss_rate(std::string_view item_code) const {
  auto it = losses_.find(std::string(item_code));
  if (it == losses_.end()) return std::nullopt;
  return it->second.loss_rate;
}

DatasetReport validate_dataset(const Dataset& dataset) {
  DatasetReport report;
  report.items = dataset.catalog().size();
  report.categories = dataset.categories().size();
  report.transactions = dataset.transactions().size();
  if (!dataset.empty()) {
    report.first_date = dataset.first_date();
    report.last_date = dataset.last_date();
  }
  std::set<std::string> sold_items;
  std::set<std::pair<Date, std::string>> sale_days;
  for (const auto& tx : dataset.transactions()) {
    if (tx.is_return) {
      ++report.returns;
      continue;
    }
    sold_items.insert(tx.item_code);
    sale_days.emplace(tx.date, tx.item_code);
  }
  for (const auto& item : sold_items)
    if (!dataset.loss_rate(item)) report.missing_loss.push_back(item);
  for (const auto& [date, item] : sale_days) {
    if (dataset.wholesale_on(item, date)) continue;
    report.missing_wholesale.push_back(
        {date, item, dataset.wholesale_resolved(item, date).has_value()});
  }
  return report;
}

nlohmann::json to_json(const DatasetReport& report) {
  nlohmann::json j;
  j["first_date"] = report.first_date ? nlohmann::json(report.first_date->str()) : nlohmann::json();
  j["last_date"] = report.last_date ? nlohmann::json(report.last_date->str()) : nlohmann::json();
  j["items"] = report.items;
  j["categories"] = report.categories;
  j["transactions"] = report.transactions;
  j["returns"] = report.returns;
  j["missing_loss"] = report.missing_loss;
  auto missing = nlohmann::json::array();
  for (const auto& m : report.missing_wholesale)
    missing.push_back({{"date", m.date.str()}, {"item_code", m.item_code},
                       {"forward_filled", m.forward_filled}});
  j["missing_wholesale"] = std::move(missing);
  return j;
}

DatasetPaths DatasetPaths::in_directory(const std::filesystem::path& dir) {
  return {dir / "catalog.csv", dir / "transactions.csv", dir / "wholesale.csv", dir / "loss.csv"};
}

Dataset load_dataset(const DatasetPaths& paths, std::size_t expected_categories) {
  Catalog catalog = parse_catalog(paths.catalog, expected_categories);
  auto transactions = parse_transactions(paths.transactions, catalog);
  auto wholesale = parse_wholesale(paths.wholesale);
  auto losses = parse_loss_rates(paths.loss);
  return Dataset::build(std::move(catalog), std::move(transactions), std::move(wholesale),
                        std::move(losses));
}

void write_dataset(const Dataset& dataset, const DatasetPaths& paths) {
  {
    std::ofstream out;
    open_for_write(out, paths.catalog);
    csv::write_row(out, std::vector<std::string>{"item_code", "item_name", "category_code",
                                                 "category_name"});
    for (const auto& e : dataset.catalog())
      csv::write_row(out, std::vector<std::string>{e.item_code, e.item_name, e.category_code,
                                                   e.category_name});
  }
  {
    std::ofstream out;
    open_for_write(out, paths.transactions);
    csv::write_row(out, std::vector<std::string>{"date", "time", "item_code", "quantity_kg",
                                                 "unit_price", "is_return", "is_discount"});
    for (const auto& tx : dataset.transactions())
      csv::write_row(out, std::vector<std::string>{
                              tx.date.str(), tx.time.str(), tx.item_code,
                              csv::format_double(tx.quantity_kg), csv::format_double(tx.unit_price),
                              tx.is_return ? "1" : "0", tx.is_discount ? "1" : "0"});
  }
  {
    std::ofstream out;
    open_for_write(out, paths.wholesale);
    csv::write_row(out, std::vector<std::string>{"date", "item_code", "wholesale_price"});
    for (const auto& q : dataset.wholesale())
      csv::write_row(out, std::vector<std::string>{q.date.str(), q.item_code,
                                                   csv::format_double(q.wholesale_price)});
  }
  {
    std::ofstream out;
    open_for_write(out, paths.loss);
    csv::write_row(out, std::vector<std::string>{"item_code", "item_name", "loss_rate_percent"});
    for (const auto& [code, e] : dataset.losses())
      csv::write_row(out, std::vector<std::string>{e.item_code, e.item_name,
                                                   format_percent(e.loss_rate)});
  }
}

}  // namespace vegplan

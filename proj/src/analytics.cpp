#include "vegplan/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>

#include "vegplan/error.hpp"

namespace vegplan {

std::string_view to_string(Granularity g) noexcept {
  switch (g) {
    case Granularity::Day: return "day";
    case Granularity::Month: return "month";
    case Granularity::Quarter: return "quarter";
  }
  return "day";
}

std::optional<Granularity> parse_granularity(std::string_view text) {
  if (text == "day") return Granularity::Day;
  if (text == "month") return Granularity::Month;
  if (text == "quarter") return Granularity::Quarter;
  return std::nullopt;
}

PeriodKey PeriodKey::of(Date date, Granularity granularity) {
  switch (granularity) {
    case Granularity::Day: return {granularity, date.days()};
    case Granularity::Month:
      return {granularity, date.year() * 12 + static_cast<std::int32_t>(date.month()) - 1};
    case Granularity::Quarter:
      return {granularity, date.year() * 4 + static_cast<std::int32_t>(date.month() - 1) / 3};
  }
  return {granularity, date.days()};
}

namespace {

int floor_div(int a, int b) { return a / b - (a % b != 0 && (a < 0) != (b < 0)); }

}  // namespace

Date PeriodKey::start() const {
  switch (granularity) {
    case Granularity::Day: return Date(index);
    case Granularity::Month: {
      const int y = floor_div(index, 12);
      return Date::from_ymd(y, static_cast<unsigned>(index - y * 12 + 1), 1);
    }
    case Granularity::Quarter: {
      const int y = floor_div(index, 4);
      return Date::from_ymd(y, static_cast<unsigned>((index - y * 4) * 3 + 1), 1);
    }
  }
  return Date(index);
}

std::string PeriodKey::label() const {
  const Date s = start();
  char buf[16];
  switch (granularity) {
    case Granularity::Day: return s.str();
    case Granularity::Month: std::snprintf(buf, sizeof buf, "%04d-%02u", s.year(), s.month()); return buf;
    case Granularity::Quarter:
      std::snprintf(buf, sizeof buf, "%04dQ%u", s.year(), (s.month() - 1) / 3 + 1);
      return buf;
  }
  return s.str();
}

std::vector<PeriodKey> period_range(Date first, Date last, Granularity granularity) {
  std::vector<PeriodKey> out;
  const PeriodKey end = PeriodKey::of(last, granularity);
  for (PeriodKey k = PeriodKey::of(first, granularity); k <= end; k = k.next()) out.push_back(k);
  return out;
}

namespace {

struct GroupInfo {
  std::string code;
  std::string label;
};

std::vector<GroupInfo> groups_for(const Dataset& ds, Level level) {
  std::vector<GroupInfo> groups;
  if (level == Level::Category) {
    for (const auto& c : ds.categories()) groups.push_back({c.code, c.name});
    return groups;
  }
  std::set<std::string> active;
  for (const auto& tx : ds.transactions()) active.insert(tx.item_code);
  for (const auto& code : active) groups.push_back({code, ds.item(code).item_name});
  std::sort(groups.begin(), groups.end(), [](const GroupInfo& a, const GroupInfo& b) {
    return std::tie(a.label, a.code) < std::tie(b.label, b.code);
  });
  return groups;
}

const std::string& group_of(const Dataset& ds, const Transaction& tx, Level level) {
  return level == Level::Category ? ds.item(tx.item_code).category_code : tx.item_code;
}

}  // namespace

std::vector<SalesAggregate> aggregate_sales(const Dataset& dataset, Granularity granularity,
                                            Level level) {
  if (dataset.empty()) throw Error(Errc::EmptyDataset, "no transactions to aggregate");
  const auto periods = period_range(dataset.first_date(), dataset.last_date(), granularity);
  const auto groups = groups_for(dataset, level);
  std::map<std::string, std::size_t> group_pos;
  for (std::size_t g = 0; g < groups.size(); ++g) group_pos.emplace(groups[g].code, g);

  const PeriodKey first = periods.front();
  std::vector<SalesAggregate> out(periods.size() * groups.size());
  for (std::size_t p = 0; p < periods.size(); ++p)
    for (std::size_t g = 0; g < groups.size(); ++g) {
      auto& a = out[p * groups.size() + g];
      a.period = periods[p];
      a.group = groups[g].code;
      a.label = groups[g].label;
    }

  for (const auto& tx : dataset.transactions()) {
    const auto p = static_cast<std::size_t>(PeriodKey::of(tx.date, granularity).index - first.index);
    auto& a = out[p * groups.size() + group_pos.at(group_of(dataset, tx, level))];
    if (tx.is_return) {
      a.returned_kg += tx.quantity_kg;
    } else {
      a.sold_kg += tx.quantity_kg;
      a.revenue += tx.unit_price * tx.quantity_kg;
    }
  }
  for (auto& a : out) {
    a.total_kg = a.sold_kg - a.returned_kg;
    if (a.sold_kg > 0) a.avg_unit_price = a.revenue / a.sold_kg;
  }
  return out;
}

ProfitReport category_profit(const Dataset& dataset, Granularity granularity) {
  if (dataset.empty()) throw Error(Errc::EmptyDataset, "no transactions");
  const auto periods = period_range(dataset.first_date(), dataset.last_date(), granularity);
  const auto& cats = dataset.categories();
  std::map<std::string, std::size_t> cat_pos;
  for (std::size_t c = 0; c < cats.size(); ++c) cat_pos.emplace(cats[c].code, c);

  ProfitReport report;
  report.rows.resize(periods.size() * cats.size());
  for (std::size_t p = 0; p < periods.size(); ++p)
    for (std::size_t c = 0; c < cats.size(); ++c) {
      auto& r = report.rows[p * cats.size() + c];
      r.period = periods[p];
      r.category_code = cats[c].code;
      r.category_name = cats[c].name;
    }

  std::set<std::string> excluded;
  for (const auto& tx : dataset.transactions()) {
    const auto& item = dataset.item(tx.item_code);
    const auto p = static_cast<std::size_t>(PeriodKey::of(tx.date, granularity).index - periods.front().index);
    auto& r = report.rows[p * cats.size() + cat_pos.at(item.category_code)];
    if (tx.is_return) {
      r.returns_value += tx.unit_price * tx.quantity_kg;
      continue;
    }
    const auto wholesale = dataset.wholesale_resolved(tx.item_code, tx.date);
    const auto loss = dataset.loss_rate(tx.item_code);
    if (!wholesale || !loss) {
      ++report.excluded_rows;
      excluded.insert(tx.item_code);
      continue;
    }
    r.revenue += tx.unit_price * tx.quantity_kg;
    r.cost += *wholesale * (1.0 + *loss) * tx.quantity_kg;
  }
  for (auto& r : report.rows) r.profit = r.revenue - r.returns_value - r.cost;
  report.excluded_items.assign(excluded.begin(), excluded.end());
  return report;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw Error(Errc::LengthMismatch, std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  const std::size_t n = x.size();
  if (n < 2) throw Error(Errc::TooFewObservations, "pearson needs at least 2 observations");
  auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
  auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
  if (*xmin == *xmax || *ymin == *ymax) throw Error(Errc::ZeroVariance, "constant series");

  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationMatrix correlation_matrix(std::span<const LabeledSeries> series) {
  CorrelationMatrix m;
  std::vector<const LabeledSeries*> kept;
  for (const auto& s : series) {
    m.periods = std::max(m.periods, s.values.size());
    auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
    if (s.values.size() < 2 || *lo == *hi) {
      m.dropped.push_back(s.label);
      continue;
    }
    kept.push_back(&s);
  }
  const std::size_t n = kept.size();
  m.values.assign(n, std::vector<double>(n, 1.0));
  for (std::size_t i = 0; i < n; ++i) {
    m.groups.push_back(kept[i]->group);
    m.labels.push_back(kept[i]->label);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r = pearson(kept[i]->values, kept[j]->values);
      m.values[i][j] = r;
      m.values[j][i] = r;
    }
  }
  return m;
}

CorrelationMatrix correlation_matrix(const Dataset& dataset, Level level, Granularity granularity,
                                     std::optional<std::size_t> top_n) {
  const auto aggregates = aggregate_sales(dataset, granularity, level);
  std::vector<LabeledSeries> series;
  std::map<std::string, std::size_t> pos;
  std::vector<double> volume;
  for (const auto& a : aggregates) {
    auto [it, fresh] = pos.emplace(a.group, series.size());
    if (fresh) {
      series.push_back({a.group, a.label, {}});
      volume.push_back(0.0);
    }
    series[it->second].values.push_back(a.total_kg);
    volume[it->second] += a.total_kg;
  }
  const std::size_t periods = series.empty() ? 0 : series.front().values.size();
  if (periods < 2)
    throw Error(Errc::InsufficientPeriods,
                std::to_string(periods) + " " + std::string(to_string(granularity)) + " period(s)");

  if (top_n && *top_n < series.size()) {
    std::vector<std::size_t> idx(series.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      if (volume[a] != volume[b]) return volume[a] > volume[b];
      return series[a].group < series[b].group;
    });
    idx.resize(*top_n);
    std::vector<LabeledSeries> kept;
    for (std::size_t i : idx) kept.push_back(std::move(series[i]));
    series = std::move(kept);
  }
  std::sort(series.begin(), series.end(), [](const LabeledSeries& a, const LabeledSeries& b) {
    return std::tie(a.label, a.group) < std::tie(b.label, b.group);
  });
  auto m = correlation_matrix(series);
  m.periods = periods;
  return m;
}

std::vector<SellerTotal> top_sellers(const Dataset& dataset, std::size_t n) {
  std::map<std::string, double> totals;
  for (const auto& tx : dataset.transactions())
    totals[tx.item_code] += tx.is_return ? -tx.quantity_kg : tx.quantity_kg;
  std::vector<SellerTotal> out;
  for (const auto& [code, kg] : totals) out.push_back({code, dataset.item(code).item_name, kg});
  std::sort(out.begin(), out.end(), [](const SellerTotal& a, const SellerTotal& b) {
    if (a.total_kg != b.total_kg) return a.total_kg > b.total_kg;
    return a.item_code < b.item_code;
  });
  if (out.size() > n) out.resize(n);
  return out;
}

}  // namespace vegplan

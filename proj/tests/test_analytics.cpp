#include <cmath>
#include <map>
#include <random>

#include "support.hpp"
#include "vegplan/analytics.hpp"
#include "vegplan/synthetic.hpp"

using namespace vegplan;
using namespace testing;

namespace {

const std::string kCatalog = std::string(kCatalogHeader) +
                             "A1,青菜,C1,花叶类\n"
                             "A2,菠菜,C1,花叶类\n"
                             "B1,西兰花,C2,花菜类\n";
const std::string kLoss = std::string(kLossHeader) + "A1,青菜,0\nA2,菠菜,25\nB1,西兰花,0\n";

Dataset with_rows(const std::string& rows, const std::string& wholesale = "") {
  return dataset_from_text(kCatalog, std::string(kTransactionsHeader) + rows,
                           std::string(kWholesaleHeader) + wholesale, kLoss);
}

const SalesAggregate& find(const std::vector<SalesAggregate>& v, const std::string& group, const std::string& period) {
  for (const auto& a : v)
    if (a.group == group && a.period.label() == period) return a;
  FAIL("no aggregate for " << group << " " << period);
  return v.front();
}

}  // namespace

TEST_CASE("period keys") {
  const Date d = *Date::parse("2023-08-15");
  CHECK(PeriodKey::of(d, Granularity::Quarter).label() == "2023Q3");
  CHECK(PeriodKey::of(d, Granularity::Month).label() == "2023-08");
  CHECK(PeriodKey::of(d, Granularity::Day).label() == "2023-08-15");
  CHECK(PeriodKey::of(d, Granularity::Quarter).start().str() == "2023-07-01");
  CHECK(PeriodKey::of(*Date::parse("2023-12-31"), Granularity::Quarter).next().label() == "2024Q1");
  CHECK(PeriodKey::of(*Date::parse("2023-03-31"), Granularity::Quarter) ==
        PeriodKey::of(*Date::parse("2023-01-01"), Granularity::Quarter));
  CHECK(period_range(*Date::parse("2023-01-20"), *Date::parse("2023-04-02"), Granularity::Month).size() == 4);
  CHECK(parse_granularity("quarter") == Granularity::Quarter);
  CHECK_FALSE(parse_granularity("week"));
}

TEST_CASE("daily aggregate averages price by weight") {
  const auto ds = with_rows("2023-06-01,09:00:00,A1,2,4,0,0\n2023-06-01,10:00:00,A1,2,6,0,0\n");
  const auto agg = aggregate_sales(ds, Granularity::Day, Level::Item);
  const auto& a = find(agg, "A1", "2023-06-01");
  CHECK(a.total_kg == 4.0);
  REQUIRE(a.avg_unit_price);
  CHECK(*a.avg_unit_price == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(a.revenue == 20.0);
}

TEST_CASE("returns are subtracted from volume") {
  const auto ds = with_rows("2023-06-01,09:00:00,A1,3,4,0,0\n2023-06-01,10:00:00,A1,1,4,1,0\n");
  const auto& a = find(aggregate_sales(ds, Granularity::Day, Level::Item), "A1", "2023-06-01");
  CHECK(a.total_kg == 2.0);
  CHECK(a.sold_kg == 3.0);
  CHECK(a.returned_kg == 1.0);
}

TEST_CASE("single row average is the row price") {
  const auto ds = with_rows("2023-06-01,09:00:00,B1,1,7,0,0\n");
  const auto& a = find(aggregate_sales(ds, Granularity::Day, Level::Category), "C2", "2023-06-01");
  CHECK(*a.avg_unit_price == 7.0);
}

TEST_CASE("category aggregates are dense over the span") {
  const auto ds = with_rows("2023-06-01,09:00:00,B1,1,7,0,0\n2023-06-03,09:00:00,A1,1,7,0,0\n");
  const auto agg = aggregate_sales(ds, Granularity::Day, Level::Category);
  CHECK(agg.size() == 6);  // 3 days x 2 categories
  const auto& empty = find(agg, "C1", "2023-06-02");
  CHECK(empty.total_kg == 0.0);
  CHECK_FALSE(empty.avg_unit_price);
}

TEST_CASE("category profit substitution examples") {
  SUBCASE("plain sale") {
    const auto ds = with_rows("2023-06-01,09:00:00,A1,2,10,0,0\n", "2023-06-01,A1,4\n");
    const auto r = category_profit(ds, Granularity::Day);
    CHECK(r.rows.at(0).profit == 12.0);
  }
  SUBCASE("with a return") {
    const auto ds = with_rows("2023-06-01,09:00:00,A1,2,10,0,0\n2023-06-01,11:00:00,A1,1,10,1,0\n",
                              "2023-06-01,A1,4\n");
    CHECK(category_profit(ds, Granularity::Day).rows.at(0).profit == 2.0);
  }
  SUBCASE("loss inflates cost") {
    const auto ds = with_rows("2023-06-01,09:00:00,A2,2,10,0,0\n", "2023-06-01,A2,4\n");
    CHECK(category_profit(ds, Granularity::Day).rows.at(0).profit == 10.0);
  }
  SUBCASE("unresolvable rows are excluded and counted") {
    const auto ds = with_rows("2023-06-01,09:00:00,A1,2,10,0,0\n2023-06-01,09:00:00,A2,2,10,0,0\n",
                              "2023-06-01,A1,4\n");
    const auto r = category_profit(ds, Granularity::Day);
    CHECK(r.excluded_rows == 1);
    REQUIRE(r.excluded_items.size() == 1);
    CHECK(r.excluded_items[0] == "A2");
    CHECK(r.rows.at(0).profit == 12.0);
  }
}

TEST_CASE("pearson hand examples") {
  const std::vector<double> x{1, 2, 3};
  CHECK(std::abs(pearson(x, std::vector<double>{2, 4, 6}) - 1.0) <= 1e-12);
  CHECK(std::abs(pearson(x, std::vector<double>{3, 2, 1}) + 1.0) <= 1e-12);
  CHECK(std::abs(pearson(x, std::vector<double>{1, 3, 2}) - 0.5) <= 1e-12);
  CHECK_ERRC(pearson(x, std::vector<double>{1, 2}), Errc::LengthMismatch);
  CHECK_ERRC(pearson(std::vector<double>{1}, std::vector<double>{1}), Errc::TooFewObservations);
  CHECK_ERRC(pearson(x, std::vector<double>{2, 2, 2}), Errc::ZeroVariance);
}

TEST_CASE("pearson properties") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(20), y(20), ya(20);
    for (int i = 0; i < 20; ++i) {
      x[i] = n(rng);
      y[i] = 0.3 * x[i] + n(rng);
      ya[i] = 2.5 * y[i] - 7.0;  // positive affine map
    }
    const double r = pearson(x, y);
    CHECK(r >= -1.0);
    CHECK(r <= 1.0);
    CHECK(pearson(y, x) == doctest::Approx(r).epsilon(1e-12));
    CHECK(pearson(x, ya) == doctest::Approx(r).epsilon(1e-10));
    std::vector<double> neg(ya);
    for (auto& v : neg) v = -v;
    CHECK(pearson(x, neg) == doctest::Approx(-r).epsilon(1e-10));
  }
}

TEST_CASE("correlation matrix composes pairwise pearson") {
  const std::vector<LabeledSeries> s{{"a", "甲", {1, 2, 3, 4}}, {"b", "乙", {2, 1, 4, 3}}, {"c", "丙", {5, 3, 2, 0}}};
  const auto m = correlation_matrix(s);
  REQUIRE(m.labels.size() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == j)
        CHECK(m.at(i, j) == 1.0);
      else
        CHECK(m.at(i, j) == doctest::Approx(pearson(s[i].values, s[j].values)).epsilon(1e-14));
      CHECK(m.at(i, j) == m.at(j, i));
    }
}

TEST_CASE("identical series correlate at one and flat series are dropped") {
  const std::vector<LabeledSeries> s{{"a", "a", {1, 5, 2}}, {"b", "b", {1, 5, 2}}, {"c", "c", {4, 4, 4}}};
  const auto m = correlation_matrix(s);
  REQUIRE(m.labels.size() == 2);
  CHECK(m.at(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  REQUIRE(m.dropped.size() == 1);
  CHECK(m.dropped[0] == "c");
}

TEST_CASE("dataset correlation needs two periods") {
  const auto ds = with_rows("2023-06-01,09:00:00,A1,1,7,0,0\n2023-06-02,09:00:00,B1,1,7,0,0\n");
  CHECK_ERRC(correlation_matrix(ds, Level::Category, Granularity::Quarter), Errc::InsufficientPeriods);
  const auto m = correlation_matrix(ds, Level::Category, Granularity::Day);
  CHECK(m.periods == 2);
  CHECK(m.at(0, 1) == doctest::Approx(-1.0));
}

TEST_CASE("top sellers") {
  const auto ds = with_rows("2023-06-01,09:00:00,A1,3,1,0,0\n2023-06-01,09:00:00,A2,5,1,0,0\n"
                            "2023-06-01,09:00:00,B1,1,1,0,0\n");
  const auto top = top_sellers(ds, 10);
  REQUIRE(top.size() == 3);
  CHECK(top[0].item_code == "A2");
  CHECK(top[1].item_code == "A1");
  CHECK(top[2].item_code == "B1");
  CHECK(top_sellers(ds, 1).size() == 1);
}

TEST_CASE("item aggregates add up to category aggregates") {
  SyntheticOptions opts;
  opts.days = 40;
  opts.seed = 5;
  opts.return_probability = 0.1;
  const Dataset ds = synthetic_dataset(opts);
  for (auto g : {Granularity::Day, Granularity::Month, Granularity::Quarter}) {
    std::map<std::pair<PeriodKey, std::string>, std::pair<double, double>> sums;
    for (const auto& a : aggregate_sales(ds, g, Level::Item)) {
      auto& s = sums[{a.period, ds.item(a.group).category_code}];
      s.first += a.total_kg;
      s.second += a.revenue;
    }
    for (const auto& a : aggregate_sales(ds, g, Level::Category)) {
      const auto& s = sums[{a.period, a.group}];
      CHECK(std::abs(s.first - a.total_kg) <= 1e-9 * std::max(1.0, std::abs(a.total_kg)));
      CHECK(std::abs(s.second - a.revenue) <= 1e-9 * std::max(1.0, std::abs(a.revenue)));
      if (a.avg_unit_price)
        CHECK(std::abs(*a.avg_unit_price * a.sold_kg - a.revenue) <= 1e-9 * std::max(1.0, a.revenue));
    }
  }
}

#include <cmath>
#include <sstream>

#include "support.hpp"
#include "vegplan/csv.hpp"
#include "vegplan/date.hpp"
#include "vegplan/numeric.hpp"

using namespace vegplan;

TEST_CASE("date parse and format") {
  auto d = Date::parse("2023-06-30");
  REQUIRE(d);
  CHECK(d->year() == 2023);
  CHECK(d->month() == 6u);
  CHECK(d->day() == 30u);
  CHECK(d->str() == "2023-06-30");
  CHECK((*d + 1).str() == "2023-07-01");
  CHECK(Date::from_ymd(2024, 3, 1) - Date::from_ymd(2024, 2, 1) == 29);
  CHECK(Date::from_ymd(1970, 1, 1).days() == 0);
  CHECK_FALSE(Date::parse("2023-02-30"));
  CHECK_FALSE(Date::parse("2023-2-3"));
  CHECK_FALSE(Date::parse("2023-06-30x"));
}

TEST_CASE("date round trip over several years") {
  for (Date d = Date::from_ymd(1999, 12, 25); d < Date::from_ymd(2004, 3, 5); d = d + 1) {
    auto back = Date::parse(d.str());
    REQUIRE(back);
    CHECK(*back == d);
  }
}

TEST_CASE("time of day") {
  CHECK(TimeOfDay::parse("09:15:55")->str() == "09:15:55");
  CHECK(TimeOfDay::parse("09:15")->str() == "09:15:00");
  CHECK(TimeOfDay::parse("09:15:55.250")->str() == "09:15:55.250");
  CHECK(TimeOfDay::parse("09:15:55.250")->milliseconds() == ((9 * 60 + 15) * 60 + 55) * 1000 + 250);
  CHECK_FALSE(TimeOfDay::parse("24:00:00"));
  CHECK_FALSE(TimeOfDay::parse("9:5"));
}

TEST_CASE("csv parse handles quotes, BOM, CRLF and comments") {
  const auto t = csv::parse("\xEF\xBB\xBF# provenance\r\na,b\r\n\"x,1\",\"say \"\"hi\"\"\"\r\n2,3\r\n");
  REQUIRE(t.header.size() == 2);
  CHECK(t.header[0] == "a");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][0] == "x,1");
  CHECK(t.rows[0][1] == "say \"hi\"");
  CHECK(t.line_numbers[1] == 4);
  CHECK(t.column("b") == 1);
  CHECK_ERRC(t.column("c"), Errc::MissingColumn);
  CHECK_ERRC(csv::parse("a,b\n1\n"), Errc::MalformedField);
  CHECK_ERRC(csv::parse("# only a comment\n"), Errc::EmptyFile);
}

TEST_CASE("csv write and escape round trip") {
  std::ostringstream os;
  const std::vector<std::string> fields{"plain", "with,comma", "quote\"d", "花叶类"};
  csv::write_row(os, fields);
  const auto t = csv::parse("h1,h2,h3,h4\n" + os.str());
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0] == fields);
}

TEST_CASE("format_double is shortest and exact") {
  CHECK(csv::format_double(0.1) == "0.1");
  CHECK(csv::format_double(-0.0) == "0");
  CHECK(csv::format_double(15.75169) == "15.75169");
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    CHECK(csv::parse_double(csv::format_double(v), "v") == v);
  }
  CHECK_ERRC(csv::parse_double("1.5kg", "q"), Errc::MalformedField);
  CHECK_ERRC(csv::parse_double("", "q"), Errc::MalformedField);
  CHECK_ERRC(csv::parse_flag("2", "f"), Errc::MalformedField);
}

TEST_CASE("golden section finds a parabola vertex and monotone endpoints") {
  auto r = numeric::golden_section_max([](double x) { return -(x - 1.3) * (x - 1.3); }, -4.0, 5.0, 1e-9);
  CHECK(r.x == doctest::Approx(1.3).epsilon(1e-8));
  auto up = numeric::golden_section_max([](double x) { return x; }, 0.0, 2.0, 1e-9);
  CHECK(up.x == 2.0);
}

TEST_CASE("nelder mead minimises a quadratic bowl") {
  auto r = numeric::nelder_mead(
      [](std::span<const double> x) { return (x[0] - 3) * (x[0] - 3) + 10 * (x[1] + 1) * (x[1] + 1); }, {0.0, 0.0},
      {1.0, 1.0});
  CHECK(r.x[0] == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("nelder mead treats non-finite values as barriers") {
  auto r = numeric::nelder_mead(
      [](std::span<const double> x) { return x[0] < 1.0 ? NAN : (x[0] - 0.5) * (x[0] - 0.5); }, {2.0}, {0.5});
  CHECK(r.x[0] >= 1.0);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("fit_line recovers an exact line") {
  std::vector<double> x{1, 2, 3, 4}, y{5, 3, 1, -1};
  double a = 0, b = 0;
  REQUIRE(numeric::fit_line(x, y, a, b));
  CHECK(a == doctest::Approx(-2.0));
  CHECK(b == doctest::Approx(7.0));
  std::vector<double> flat{2, 2, 2};
  CHECK_FALSE(numeric::fit_line(flat, std::span<const double>(y).first(3), a, b));
}

TEST_CASE("derived seeds are stable and stage specific") {
  CHECK(numeric::derive_seed(1, "fit") == numeric::derive_seed(1, "fit"));
  CHECK(numeric::derive_seed(1, "fit") != numeric::derive_seed(2, "fit"));
  CHECK(numeric::derive_seed(1, "fit") != numeric::derive_seed(1, "plan"));
  // FNV-1a 64-bit reference value for "a".
  CHECK(numeric::fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("error carries its code") {
  Error e(Errc::NoProfitablePrice, "cabbage");
  CHECK(e.code() == Errc::NoProfitablePrice);
  CHECK(std::string(e.what()).find("cabbage") != std::string::npos);
  CHECK(to_string(Errc::EmptyInterval) == "EmptyInterval");
}

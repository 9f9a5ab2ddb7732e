#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "support.hpp"
#include "vegplan/forecast.hpp"

using namespace vegplan;
using namespace testing;

namespace {

std::vector<double> white_noise(std::uint64_t seed, int n, double mean = 0.0, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> e(mean, sd);
  std::vector<double> x(n);
  for (auto& v : x) v = e(rng);
  return x;
}

std::vector<double> ar1(std::uint64_t seed, int n, double phi) {
  auto e = white_noise(seed, n + 100);
  std::vector<double> x;
  double prev = 0;
  for (int t = 0; t < n + 100; ++t) {
    prev = phi * prev + e[t];
    if (t >= 100) x.push_back(prev);
  }
  return x;
}

double spectral_radius(const std::vector<double>& c) {
  const int k = static_cast<int>(c.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) m(0, i) = c[i];
  for (int i = 1; i < k; ++i) m(i, i - 1) = 1.0;
  return m.eigenvalues().cwiseAbs().maxCoeff();
}

Dataset two_item_day(const std::string& loss_a, const std::string& loss_b) {
  return dataset_from_text(std::string(kCatalogHeader) + "A,a,C,花叶类\nB,b,C,花叶类\n",
                           std::string(kTransactionsHeader) +
                               "2023-06-01,09:00:00,A,2,9,0,0\n2023-06-01,09:00:00,B,2,9,0,0\n",
                           std::string(kWholesaleHeader) + "2023-06-01,A,4\n2023-06-01,B,6\n",
                           std::string(kLossHeader) + "A,a," + loss_a + "\nB,b," + loss_b + "\n");
}

}  // namespace

TEST_CASE("loss weighted category wholesale") {
  auto equal = category_wholesale_series(two_item_day("0", "0"), "花叶类");
  REQUIRE(equal.observations.size() == 1);
  CHECK(equal.observations[0].price == doctest::Approx(5.0));
  auto weighted = category_wholesale_series(two_item_day("50", "0"), "花叶类");
  CHECK(weighted.observations[0].price == doctest::Approx(4.8));

  const auto single = dataset_from_text(std::string(kCatalogHeader) + "A,a,C,花叶类\n",
                                        std::string(kTransactionsHeader) + "2023-06-01,09:00:00,A,2,9,0,0\n",
                                        std::string(kWholesaleHeader) + "2023-06-01,A,4.25\n",
                                        std::string(kLossHeader) + "A,a,3\n");
  CHECK(category_wholesale_series(single, "花叶类").observations[0].price == 4.25);
  CHECK(item_wholesale_series(single, "A").observations.size() == 1);
  CHECK(item_wholesale_series(single, "A", *Date::parse("2023-06-01")).observations.empty());
}

TEST_CASE("differencing") {
  const std::vector<double> x{1, 2, 4, 7};
  CHECK(difference(x, 1) == std::vector<double>{1, 2, 3});
  CHECK(difference(x, 2) == std::vector<double>{1, 1});
  const std::vector<double> c(6, 3.5);
  for (int d = 1; d <= 3; ++d)
    for (double v : difference(c, d)) CHECK(v == 0.0);
  const std::vector<double> head{1, 1};
  CHECK(undifference(difference(x, 2), std::span<const double>(x).first(2)) == x);
  CHECK(undifference(std::vector<double>{}, head) == head);
}

TEST_CASE("order parsing") {
  auto o = ArimaOrder::parse("2,2,2");
  REQUIRE(o);
  CHECK(o->p == 2);
  CHECK(o->str() == "2,2,2");
  CHECK_FALSE(ArimaOrder::parse("2,2"));
  CHECK_FALSE(ArimaOrder::parse("-1,0,0"));
}

TEST_CASE("stability test agrees with companion eigenvalues") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.6, 1.6);
  int compared = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> c(1 + trial % 3);
    for (auto& v : c) v = u(rng);
    const double rho = spectral_radius(c);
    if (std::abs(rho - (1 - kRootTolerance)) < 1e-9) continue;
    CHECK_MESSAGE(is_stable(c) == (rho < 1 - kRootTolerance), "radius " << rho);
    ++compared;
  }
  CHECK(compared > 1900);
  CHECK(is_stable(std::vector<double>{}));
}

TEST_CASE("AR(1) coefficient is recovered") {
  const auto x = ar1(2024, 500, 0.7);
  const auto fit = fit_arima(x, {1, 0, 0});
  REQUIRE(fit.ar.size() == 1);
  CHECK(std::abs(fit.ar[0] - 0.7) <= 0.1);
  CHECK(is_stable(fit.ar));
  CHECK(fit.n_eff == 500);
}

TEST_CASE("mean model matches sample moments") {
  const auto x = white_noise(77, 300, 10.0, 2.0);
  const auto fit = fit_arima(x, {0, 0, 0});
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  double var = 0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= x.size() - 1;
  CHECK(fit.has_intercept);
  CHECK(std::abs(fit.intercept - mean) <= 2 * std::sqrt(var / x.size()));
  CHECK(std::abs(fit.sigma2 - var) <= 0.2 * var);
}

TEST_CASE("constant series with one difference degenerates cleanly") {
  const std::vector<double> c(30, 4.2);
  const auto fit = fit_arima(c, {0, 1, 0});
  CHECK(fit.ssr == 0.0);
  for (double v : forecast(fit, 5)) CHECK(v == doctest::Approx(4.2).epsilon(1e-12));
}

TEST_CASE("series must be long enough") {
  CHECK_ERRC(fit_arima(std::vector<double>(12, 1.0), {2, 1, 1}), Errc::SeriesTooShort);
  CHECK_NOTHROW(fit_arima(white_noise(1, 14), {2, 1, 1}));
}

TEST_CASE("aic formula") {
  CHECK(aic(3, -10.0) == 26.0);
  CHECK(aic(2, -5.0) + 4 == aic(4, -5.0));
  const double a = aic(3, log_likelihood(100, 1.5));
  const double b = aic(3, log_likelihood(100, 3.0));
  CHECK(b - a == doctest::Approx(100 * std::log(2.0)).epsilon(1e-12));
  const auto fit = fit_arima(ar1(5, 200, 0.5), {1, 0, 1});
  CHECK(aic(fit) == doctest::Approx(2.0 * 4 - 2 * log_likelihood(fit.n_eff, fit.sigma2)));
  CHECK(fit.aic == aic(fit));
}

TEST_CASE("order selection on white noise stays small") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto o = select_order(white_noise(seed * 31, 300, 5.0, 1.0));
    CHECK_MESSAGE(o.p + o.q <= 1, "seed " << seed << " picked " << o.str());
    CHECK_MESSAGE(o.d == 0, "seed " << seed << " picked " << o.str());
  }
}

TEST_CASE("order selection differences a random walk") {
  auto e = white_noise(8, 300);
  std::partial_sum(e.begin(), e.end(), e.begin());
  CHECK(select_order(e).d >= 1);
}

TEST_CASE("order selection finds two differences in an integrated ARIMA(2,2,2)") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> n(0, 1);
  const int N = 500;
  std::vector<double> w(N + 50), e(N + 50);
  for (auto& v : e) v = n(rng);
  for (int t = 2; t < N + 50; ++t)
    w[t] = 0.5 * w[t - 1] - 0.3 * w[t - 2] + e[t] + 0.4 * e[t - 1] + 0.2 * e[t - 2];
  std::vector<double> once(N), twice(N);
  double level = 0, level2 = 0;
  for (int t = 0; t < N; ++t) {
    level += w[t + 50];
    once[t] = level;
    level2 += once[t];
    twice[t] = level2;
  }
  CHECK(select_order(twice).d == 2);
}

TEST_CASE("forecast recursions") {
  ArimaFit mean;
  mean.order = {0, 0, 0};
  mean.intercept = 3.25;
  mean.has_intercept = true;
  mean.series = {1, 5, 2, 4};
  mean.residuals = {0, 0, 0, 0};
  for (double v : forecast(mean, 4)) CHECK(v == 3.25);

  ArimaFit ar;
  ar.order = {1, 0, 0};
  ar.ar = {0.6};
  ar.has_intercept = true;
  ar.intercept = 0.0;
  ar.series = {0.3, -1.0, 2.0};
  ar.residuals = {0, 0, 0};
  const auto f = forecast(ar, 3);
  CHECK(f[0] == doctest::Approx(0.6 * 2.0));
  CHECK(f[1] == doctest::Approx(0.36 * 2.0));
  CHECK(f[2] == doctest::Approx(0.216 * 2.0));
  CHECK(forecast(ar, 3, 1.0)[2] == 1.0);
}

TEST_CASE("mean forecast window") {
  PriceSeries s{"x", {}};
  for (int i = 0; i < 9; ++i) s.observations.push_back({Date(i), i < 2 ? 100.0 : 4.0});
  CHECK(mean_forecast(s) == 4.0);
  PriceSeries two{"y", {{Date(0), 3.0}, {Date(1), 5.0}}};
  CHECK(mean_forecast(two) == 4.0);
  CHECK(mean_forecast(two, 30) == 4.0);
  CHECK_ERRC(mean_forecast(PriceSeries{"z", {}}), Errc::NoData);
}

TEST_CASE("fits are reproducible") {
  const auto x = ar1(3, 120, 0.4);
  const auto a = fit_arima(x, {2, 0, 1}, {5});
  const auto b = fit_arima(x, {2, 0, 1}, {5});
  CHECK(a.ar == b.ar);
  CHECK(a.ma == b.ma);
  CHECK(a.ssr == b.ssr);
}

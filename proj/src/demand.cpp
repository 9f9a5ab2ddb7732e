#include "vegplan/demand.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "vegplan/error.hpp"
#include "vegplan/numeric.hpp"

namespace vegplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative SSE gap treated as a tie between families, plus an absolute floor
// (relative to sum q^2) so two numerically exact fits also tie.
constexpr double kTieRelative = 1e-9;
constexpr double kTieFloor = 1e-12;

struct Profile {
  double sse = kInf;
  double slope = 0.0;
  double intercept = 0.0;
};

// OLS of quantity on transformed price.
Profile profile(std::span<const PricePoint> points, const std::vector<double>& x) {
  std::vector<double> q(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) q[i] = points[i].quantity;
  Profile out;
  for (double v : x)
    if (!std::isfinite(v)) return out;
  if (!numeric::fit_line(x, q, out.slope, out.intercept)) return out;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = q[i] - (out.slope * x[i] + out.intercept);
    sse += r * r;
  }
  out.sse = sse;
  return out;
}

struct ShapeSearch {
  double shape = 0.0;
  Profile fit;
};

// Multi-start 1-D simplex over an unconstrained coordinate `t`. `to_shape`
// maps t to the shape parameter; `transform` builds the regressor.
template <typename ToShape, typename Transform>
std::optional<ShapeSearch> search_shape(std::span<const PricePoint> points,
                                        const std::vector<double>& starts, double t_step,
                                        ToShape to_shape, Transform transform) {
  auto objective = [&](double t) {
    const double shape = to_shape(t);
    if (!std::isfinite(shape)) return kInf;
    std::vector<double> x(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) x[i] = transform(points[i].price, shape);
    return profile(points, x).sse;
  };
  std::optional<ShapeSearch> best;
  double best_sse = kInf;
  numeric::SimplexOptions opts;
  opts.max_evals = 4000;
  for (double t0 : starts) {
    auto r = numeric::nelder_mead([&](std::span<const double> v) { return objective(v[0]); }, {t0},
                                  {t_step}, opts);
    if (!(r.value < best_sse)) continue;
    best_sse = r.value;
    const double shape = to_shape(r.x[0]);
    std::vector<double> x(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) x[i] = transform(points[i].price, shape);
    best = ShapeSearch{shape, profile(points, x)};
  }
  return best;
}

void check_points(std::span<const PricePoint> points, Family family) {
  if (points.size() < param_count(family))
    throw Error(Errc::TooFewPoints, std::to_string(points.size()) + " point(s) for " +
                                        std::string(to_string(family)) + " fit");
  for (const auto& p : points)
    if (!(p.price > 0) || !(p.quantity >= 0) || !std::isfinite(p.price) || !std::isfinite(p.quantity))
      throw Error(Errc::DomainViolation, "price points need price > 0 and quantity >= 0");
}

}  // namespace

std::string_view to_string(Family f) noexcept {
  switch (f) {
    case Family::Linear: return "linear";
    case Family::LogShift: return "log";
    case Family::Power: return "power";
  }
  return "linear";
}

std::optional<Family> parse_family(std::string_view text) {
  if (text == "linear") return Family::Linear;
  if (text == "log") return Family::LogShift;
  if (text == "power") return Family::Power;
  return std::nullopt;
}

std::size_t param_count(Family f) noexcept { return f == Family::Linear ? 2 : 3; }

DemandModel DemandModel::linear(double a, double b) { return {Family::Linear, {a, b}}; }
DemandModel DemandModel::log_shift(double A, double B, double C) { return {Family::LogShift, {A, B, C}}; }
DemandModel DemandModel::power(double a, double b, double c) { return {Family::Power, {a, b, c}}; }

double DemandModel::raw(double price) const {
  switch (family) {
    case Family::Linear: return params[0] * price + params[1];
    case Family::LogShift:
      if (!(price > params[1]))
        throw Error(Errc::DomainViolation, "log model needs price > " + std::to_string(params[1]));
      return params[0] * std::log(price - params[1]) + params[2];
    case Family::Power:
      if (!(price > 0)) throw Error(Errc::DomainViolation, "power model needs price > 0");
      return params[0] * std::pow(price, params[1]) + params[2];
  }
  return 0.0;
}

double DemandModel::slope(double price) const {
  switch (family) {
    case Family::Linear: return params[0];
    case Family::LogShift:
      if (!(price > params[1])) throw Error(Errc::DomainViolation, "log model slope outside domain");
      return params[0] / (price - params[1]);
    case Family::Power:
      if (!(price > 0)) throw Error(Errc::DomainViolation, "power model slope outside domain");
      return params[0] * params[1] * std::pow(price, params[1] - 1.0);
  }
  return 0.0;
}

double DemandModel::domain_lower() const { return family == Family::LogShift ? params[1] : 0.0; }

double eval(const DemandModel& model, double price) { return std::max(0.0, model.raw(price)); }

double sum_squared_error(const DemandModel& model, std::span<const PricePoint> points) {
  double sse = 0.0;
  for (const auto& p : points) {
    const double r = p.quantity - model.raw(p.price);
    sse += r * r;
  }
  return sse;
}

std::vector<PricePoint> build_price_points(const Dataset& dataset, std::string_view category,
                                           std::optional<Date> before) {
  const Category* cat = dataset.find_category(category);
  if (!cat) throw Error(Errc::NoData, "unknown category " + std::string(category));
  std::map<Date, std::pair<double, double>> days;  // revenue, kg
  for (const auto& tx : dataset.transactions()) {
    if (tx.is_return || (before && tx.date >= *before)) continue;
    if (dataset.item(tx.item_code).category_code != cat->code) continue;
    auto& [revenue, kg] = days[tx.date];
    revenue += tx.unit_price * tx.quantity_kg;
    kg += tx.quantity_kg;
  }
  std::vector<PricePoint> points;
  for (const auto& [date, agg] : days)
    if (agg.second > 0) points.push_back({agg.first / agg.second, agg.second});
  if (points.size() < 4)
    throw Error(Errc::TooFewPoints, cat->name + ": " + std::to_string(points.size()) + " sale day(s)");
  return points;
}

DemandModel fit(std::span<const PricePoint> points, Family family, const FitOptions& options) {
  check_points(points, family);
  double pmin = kInf, pmax = 0.0;
  for (const auto& p : points) {
    pmin = std::min(pmin, p.price);
    pmax = std::max(pmax, p.price);
  }

  DemandModel model;
  model.family = family;
  model.n_points = points.size();
  model.price_min = pmin;
  model.price_max = pmax;

  std::mt19937_64 rng(options.seed ^ (0x5bd1e995ULL * (static_cast<std::uint64_t>(family) + 1)));

  switch (family) {
    case Family::Linear: {
      std::vector<double> x(points.size());
      for (std::size_t i = 0; i < points.size(); ++i) x[i] = points[i].price;
      const Profile f = profile(points, x);
      if (!std::isfinite(f.sse)) throw Error(Errc::FitDiverged, "linear fit needs price spread");
      model.params = {f.slope, f.intercept};
      break;
    }
    case Family::LogShift: {
      // B = (pmin - eps) - exp(t) keeps B strictly below every observed price.
      const double eps = 1e-6 * std::max(1.0, pmin);
      const double b_ceiling = pmin - eps;
      const double t_max = std::log(1e3 * std::max(1.0, pmax));
      auto to_b = [&](double t) { return t > t_max ? kInf : b_ceiling - std::exp(t); };
      auto to_t = [&](double b) { return std::log(std::max(b_ceiling - b, 1e-12)); };
      std::vector<double> starts;
      const double grid_hi = pmin - 0.1;
      for (int k = 0; k < 8; ++k)
        starts.push_back(to_t(grid_hi > 0 ? grid_hi * k / 7.0 : grid_hi - 7.0 + k));
      std::uniform_real_distribution<double> u(to_t(b_ceiling - 1e-6), t_max);
      for (int k = 0; k < options.random_starts; ++k) starts.push_back(u(rng));
      auto best = search_shape(points, starts, 0.5, to_b,
                               [](double p, double b) { return std::log(p - b); });
      if (!best || !std::isfinite(best->fit.sse))
        throw Error(Errc::FitDiverged, "no feasible shift for log model");
      model.params = {best->fit.slope, best->shape, best->fit.intercept};
      break;
    }
    case Family::Power: {
      constexpr double kMaxExponent = 10.0;
      auto to_b = [](double t) { return std::abs(t) > kMaxExponent ? kInf : t; };
      std::vector<double> starts = {-3.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0};
      std::uniform_real_distribution<double> u(-4.0, 4.0);
      for (int k = 0; k < options.random_starts; ++k) starts.push_back(u(rng));
      auto best = search_shape(points, starts, 0.25, to_b,
                               [](double p, double b) { return std::pow(p, b); });
      if (!best || !std::isfinite(best->fit.sse))
        throw Error(Errc::FitDiverged, "power fit did not converge");
      model.params = {best->fit.slope, best->shape, best->fit.intercept};
      break;
    }
  }
  model.sse = sum_squared_error(model, points);
  if (!std::isfinite(model.sse)) throw Error(Errc::FitDiverged, "non-finite SSE");
  return model;
}

DemandModel select_best(std::span<const PricePoint> points, const FitOptions& options) {
  std::vector<DemandModel> fits;
  for (Family f : {Family::Linear, Family::LogShift, Family::Power}) {
    try {
      fits.push_back(fit(points, f, options));
    } catch (const Error&) {
    }
  }
  if (fits.empty()) throw Error(Errc::AllFitsFailed, "no family could be fitted");

  double scale = 0.0;
  for (const auto& p : points) scale += p.quantity * p.quantity;
  double best_sse = kInf;
  for (const auto& m : fits) best_sse = std::min(best_sse, m.sse);
  const double cutoff = best_sse + std::max(kTieRelative * best_sse, kTieFloor * scale);

  const DemandModel* chosen = nullptr;
  for (const auto& m : fits) {
    if (m.sse > cutoff) continue;
    if (!chosen || param_count(m.family) < param_count(chosen->family)) chosen = &m;
  }
  return *chosen;
}

std::optional<double> zero_demand_price(const DemandModel& model) {
  const auto& k = model.params;
  std::optional<double> root;
  switch (model.family) {
    case Family::Linear:
      if (!(k[0] < 0)) throw Error(Errc::NotDecreasing, "linear slope is not negative");
      root = k[1] > 0 ? -k[1] / k[0] : 0.0;
      break;
    case Family::LogShift:
      if (!(k[0] < 0)) throw Error(Errc::NotDecreasing, "log coefficient is not negative");
      root = k[1] + std::exp(-k[2] / k[0]);
      break;
    case Family::Power:
      if (!(k[0] * k[1] < 0)) throw Error(Errc::NotDecreasing, "power curve is not decreasing");
      if (k[0] < 0) {
        root = k[2] > 0 ? std::pow(-k[2] / k[0], 1.0 / k[1]) : 0.0;
      } else if (k[2] < 0) {
        root = std::pow(-k[2] / k[0], 1.0 / k[1]);
      }
      break;
  }
  if (root && !std::isfinite(*root)) root.reset();
  if (root && model.price_max > 0 && *root > 10.0 * model.price_max) root.reset();
  return root;
}

nlohmann::json to_json(const DemandModel& model) {
  return {{"family", to_string(model.family)},
          {"params", model.params},
          {"sse", model.sse},
          {"n_points", model.n_points},
          {"price_min", model.price_min},
          {"price_max", model.price_max}};
}

DemandModel demand_model_from_json(const nlohmann::json& j) {
  DemandModel m;
  auto family = parse_family(j.at("family").get<std::string>());
  if (!family) throw Error(Errc::InvalidConfig, "unknown demand family");
  m.family = *family;
  m.params = j.at("params").get<std::vector<double>>();
  if (m.params.size() != param_count(m.family))
    throw Error(Errc::InvalidConfig, "wrong parameter count for demand model");
  m.sse = j.value("sse", 0.0);
  m.n_points = j.value("n_points", std::size_t{0});
  m.price_min = j.value("price_min", 0.0);
  m.price_max = j.value("price_max", 0.0);
  return m;
}

}  // namespace vegplan

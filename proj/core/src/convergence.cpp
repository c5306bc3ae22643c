#include "ana/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ana/errors.hpp"
#include "ana/roots.hpp"

namespace ana {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInversionTolerance = 1e-12;
constexpr double kProbes[] = {-1.0, -0.1, 0.0, 0.1, 1.0};

void validate_grid(std::span<const double> grid) {
  if (grid.empty()) throw ConfigError("lambda grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !std::isfinite(grid[i])) throw ConfigError("lambda grid values must be positive");
    if (i > 0 && !(grid[i] < grid[i - 1])) throw ConfigError("lambda grid must be strictly decreasing");
  }
}

bool invertible(NoiseFamily family) { return !has_compact_support(family); }

/// |σ⁻¹(y)|, or +∞ when y is outside (0, 1).
double abs_inverse(const RegularisedActivation& a, double y) {
  if (!(y > 0.0 && y < 1.0)) return kInf;
  return std::abs(invert_regulariser(a, y));
}

ConditionTrend make_trend(Condition c, std::size_t layer, std::vector<double> values, double tolerance) {
  ConditionTrend t;
  t.condition = c;
  t.layer = layer;
  t.values = std::move(values);
  t.pass = trend_vanishes(t.values, tolerance);
  return t;
}

ConditionTrend ineligible(Condition c, std::size_t layer, NoiseFamily family) {
  ConditionTrend t;
  t.condition = c;
  t.layer = layer;
  t.eligible = false;
  t.pass = false;
  t.note = std::string(to_string(family)) + " noise has compact support: regulariser is not strictly increasing";
  return t;
}

}  // namespace

double LambdaLaw::at(double lambda) const {
  if (exponent == 0.0) return 1.0;
  return std::pow(std::min(1.0, lambda / start), exponent);
}

NoiseParams RegulariserLaw::params_at(double lambda) const {
  const double l = layer_lambda(lambda);
  return {c_alpha * std::pow(l, alpha_power), c_beta * std::pow(l, beta_power)};
}

RegularisedActivation RegulariserLaw::activation_at(double lambda) const {
  return {Quantiser::heaviside(0.0), family, params_at(lambda), ForwardStrategy::expectation};
}

double ConvergenceRate::at(const RegulariserLaw& law, std::size_t layer, double lambda) const {
  return std::pow(law.layer_lambda(lambda), exponents.at(layer));
}

std::vector<double> dyadic_grid(int from, int to) {
  std::vector<double> grid;
  for (int k = from; k <= to; ++k) grid.push_back(std::ldexp(1.0, -k));
  return grid;
}

double invert_regulariser(const RegularisedActivation& a, double y) {
  if (!invertible(a.family) || a.params.is_dirac()) {
    throw UnsupportedFamilyError("inversion needs a strictly increasing regulariser (normal or logistic noise, beta > 0)");
  }
  const double lo_level = a.quantiser.lowest();
  const double hi_level = a.quantiser.highest();
  if (!(y > lo_level && y < hi_level)) throw DomainError("inversion target must lie strictly inside the level range");

  auto f = [&](double x) { return expectation_forward(a, x) - y; };
  const double centre = a.params.mean;
  double step = std::max(1.0, a.params.stddev);
  double lo = centre - step;
  double hi = centre + step;
  for (int i = 0; i < 200 && !(f(lo) < 0.0); ++i) {
    step *= 2.0;
    lo = centre - step;
  }
  step = std::max(1.0, a.params.stddev);
  for (int i = 0; i < 200 && !(f(hi) >= 0.0); ++i) {
    step *= 2.0;
    hi = centre + step;
  }
  return bisect(f, lo, hi, kInversionTolerance);
}

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::lambda_vanishes: return "lambda_vanishes";
    case Condition::pointwise: return "pointwise";
    case Condition::strictly_increasing: return "strictly_increasing";
    case Condition::unit_range: return "unit_range";
    case Condition::h_i: return "H_i";
    case Condition::h_ii: return "H_ii";
    case Condition::h_iii: return "H_iii";
    case Condition::h_iv: return "H_iv";
  }
  return "unknown";
}

const ConditionTrend* HypothesisReport::find(std::size_t layer, Condition c) const {
  for (const auto& t : trends)
    if (t.layer == layer && t.condition == c) return &t;
  return nullptr;
}

bool HypothesisReport::passed(Condition c) const {
  return std::all_of(trends.begin(), trends.end(), [c](const auto& t) { return t.condition != c || t.pass; });
}

bool HypothesisReport::passed() const {
  return std::all_of(trends.begin(), trends.end(), [](const auto& t) { return t.pass; });
}

bool trend_vanishes(std::span<const double> values, double tolerance) {
  if (values.empty()) return false;
  if (!(values.back() < tolerance)) return false;
  for (std::size_t i = values.size() / 2; i + 1 < values.size(); ++i) {
    if (!(values[i + 1] <= values[i] + 1e-12)) return false;
  }
  return true;
}

HypothesisReport check_hypotheses(std::span<const RegulariserLaw> laws, const ConvergenceRate& rates,
                                  std::span<const double> grid, const CheckOptions& options) {
  validate_grid(grid);
  if (laws.empty()) throw ConfigError("hypothesis check needs at least one regularised layer");
  if (rates.exponents.size() != laws.size()) throw ShapeError("one rate exponent per regularised layer is required");
  if (!(options.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  for (double p : rates.exponents)
    if (!(p > 0.0)) throw ConfigError("rate exponents must be positive");

  HypothesisReport report;
  report.grid.assign(grid.begin(), grid.end());
  report.epsilon = options.epsilon;
  report.tolerance = options.tolerance;
  const double eps = options.epsilon;
  const double tol = options.tolerance;

  for (std::size_t l = 0; l < laws.size(); ++l) {
    const auto& law = laws[l];
    std::vector<double> lam;
    std::vector<double> point;
    std::vector<double> beta;
    std::vector<double> range;
    for (double g : grid) {
      const auto a = law.activation_at(g);
      lam.push_back(law.layer_lambda(g));
      double worst = 0.0;
      double outside = 0.0;
      for (double s : kProbes) {
        const double v = expectation_forward(a, s);
        worst = std::max(worst, std::abs(v - heaviside(0.0, s)));
        outside = std::max({outside, -v, v - 1.0});
      }
      point.push_back(worst);
      beta.push_back(a.params.stddev);
      range.push_back(outside);
    }
    report.trends.push_back(make_trend(Condition::lambda_vanishes, l, std::move(lam), tol));
    report.trends.push_back(make_trend(Condition::pointwise, l, std::move(point), tol));

    ConditionTrend mono;
    mono.condition = Condition::strictly_increasing;
    mono.layer = l;
    mono.eligible = invertible(law.family);
    mono.pass = mono.eligible && std::all_of(beta.begin(), beta.end(), [](double b) { return b > 0.0; });
    if (!mono.eligible) mono.note = ineligible(Condition::strictly_increasing, l, law.family).note;
    mono.values = std::move(beta);
    report.trends.push_back(std::move(mono));

    ConditionTrend unit;
    unit.condition = Condition::unit_range;
    unit.layer = l;
    unit.pass = std::all_of(range.begin(), range.end(), [](double v) { return v <= 0.0; });
    unit.values = std::move(range);
    report.trends.push_back(std::move(unit));

    if (!invertible(law.family)) {
      for (auto c : {Condition::h_i, Condition::h_ii, Condition::h_iii}) report.trends.push_back(ineligible(c, l, law.family));
      if (l > 0) report.trends.push_back(ineligible(Condition::h_iv, l, law.family));
      continue;
    }

    std::vector<double> h1;
    std::vector<double> h2;
    std::vector<double> h3;
    std::vector<double> h4;
    for (double g : grid) {
      const auto a = law.activation_at(g);
      const double r = rates.at(law, l, g);
      const double upper = abs_inverse(a, 1.0 - eps * r);
      h1.push_back(abs_inverse(a, eps * r));
      h2.push_back(upper);
      h3.push_back(ccdf(a.family, a.params, 0.0) / r);
      if (l > 0) h4.push_back(rates.at(laws[l - 1], l - 1, g) / upper);
    }
    report.trends.push_back(make_trend(Condition::h_i, l, std::move(h1), tol));
    report.trends.push_back(make_trend(Condition::h_ii, l, std::move(h2), tol));
    report.trends.push_back(make_trend(Condition::h_iii, l, std::move(h3), tol));
    if (l > 0) report.trends.push_back(make_trend(Condition::h_iv, l, std::move(h4), tol));
  }
  return report;
}

std::optional<ConvergenceRate> search_rates(std::span<const RegulariserLaw> laws, std::span<const double> grid,
                                            const CheckOptions& options, std::span<const double> candidates) {
  static constexpr double kDefault[] = {0.25, 0.5, 1.0, 2.0};
  if (candidates.empty()) candidates = kDefault;
  const std::size_t n = laws.size();
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    ConvergenceRate rate;
    for (auto i : idx) rate.exponents.push_back(candidates[i]);
    if (check_hypotheses(laws, rate, grid, options).passed()) return rate;
    std::size_t k = n;
    while (k > 0) {
      --k;
      if (++idx[k] < candidates.size()) break;
      idx[k] = 0;
      if (k == 0) return std::nullopt;
    }
    if (n == 0) return std::nullopt;
  }
}

RatioMeasurement measure_ratio(const Network& net, const Vector& x0, std::span<const RegulariserLaw> laws,
                               const ConvergenceRate& rates, std::span<const double> grid) {
  validate_grid(grid);
  const auto quantised = net.quantised_layers();
  if (quantised.size() != laws.size()) throw ShapeError("one regulariser law per quantised layer is required");
  if (rates.exponents.size() != laws.size()) throw ShapeError("one rate exponent per quantised layer is required");
  if (static_cast<std::size_t>(x0.size()) != net.input_size()) throw ShapeError("input size mismatch");

  const Matrix input = x0;
  Network copy = net;
  for (std::size_t k = 0; k < quantised.size(); ++k) {
    auto& act = copy.layer(quantised[k]).activation;
    act->family = laws[k].family;
  }
  const auto exact = copy.evaluate(input, ForwardMode::quantised_map());

  RatioMeasurement m;
  m.grid.assign(grid.begin(), grid.end());
  for (double g : grid) {
    for (std::size_t k = 0; k < quantised.size(); ++k) copy.layer(quantised[k]).noise = laws[k].params_at(g);
    const auto smooth = copy.evaluate(input, ForwardMode::regularised(ForwardStrategy::expectation));
    std::vector<double> errors;
    for (std::size_t l = 0; l < smooth.size(); ++l) errors.push_back((smooth[l] - exact[l]).norm());
    std::vector<double> ratios;
    for (std::size_t k = 0; k < quantised.size(); ++k)
      ratios.push_back(errors[quantised[k]] / rates.at(laws[k], k, g));
    m.errors.push_back(std::move(errors));
    m.ratios.push_back(std::move(ratios));
  }
  return m;
}

}  // namespace ana

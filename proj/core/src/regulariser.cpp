#include "ana/regulariser.hpp"

#include <string>

#include "ana/errors.hpp"

namespace ana {

std::string_view to_string(ForwardStrategy strategy) {
  switch (strategy) {
    case ForwardStrategy::expectation: return "expectation";
    case ForwardStrategy::mode: return "mode";
    case ForwardStrategy::random: return "random";
  }
  return "unknown";
}

ForwardStrategy parse_forward_strategy(std::string_view name) {
  if (name == "expectation") return ForwardStrategy::expectation;
  if (name == "mode") return ForwardStrategy::mode;
  if (name == "random") return ForwardStrategy::random;
  throw ConfigError("unknown forward strategy '" + std::string(name) + "'");
}

double expectation_forward(const RegularisedActivation& a, double x) {
  const auto& q = a.quantiser;
  // Dirac: return the level itself so the annealed state matches the quantiser bit for bit.
  if (a.params.is_dirac()) return quantise(q, x - a.params.mean);
  const auto lv = q.levels();
  const auto th = q.thresholds();
  double y = lv[0];
  for (std::size_t k = 0; k < th.size(); ++k) y += (lv[k + 1] - lv[k]) * cdf(a.family, a.params, x - th[k]);
  return y;
}

double backward(const RegularisedActivation& a, double x) {
  if (a.params.is_dirac()) return 0.0;
  const auto lv = a.quantiser.levels();
  const auto th = a.quantiser.thresholds();
  double g = 0.0;
  for (std::size_t k = 0; k < th.size(); ++k) g += (lv[k + 1] - lv[k]) * pdf(a.family, a.params, x - th[k]);
  return g;
}

std::vector<double> level_probabilities(const RegularisedActivation& a, double x) {
  const auto& q = a.quantiser;
  std::vector<double> p(q.size(), 0.0);
  if (a.params.is_dirac()) {
    p[bin_index(q, x - a.params.mean)] = 1.0;
    return p;
  }
  const auto th = q.thresholds();
  double upper = 1.0;  // P(x − ν ≥ θ_k), with θ_0 = −∞
  for (std::size_t k = 0; k < q.size(); ++k) {
    const double lower = k < th.size() ? cdf(a.family, a.params, x - th[k]) : 0.0;
    p[k] = upper - lower;
    upper = lower;
  }
  return p;
}

double mode_forward(const RegularisedActivation& a, double x) {
  if (a.params.is_dirac()) return quantise(a.quantiser, x - a.params.mean);
  const auto p = level_probabilities(a, x);
  std::size_t best = 0;
  for (std::size_t k = 1; k < p.size(); ++k) {
    if (p[k] > p[best]) best = k;
  }
  return a.quantiser.levels()[best];
}

double random_forward(const RegularisedActivation& a, double x, Rng& rng) {
  if (a.params.is_dirac()) return quantise(a.quantiser, x - a.params.mean);
  const auto p = level_probabilities(a, x);
  const double u = uniform01(rng);
  double cumulative = 0.0;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    cumulative += p[k];
    if (u < cumulative) return a.quantiser.levels()[k];
  }
  return a.quantiser.highest();
}

double forward(const RegularisedActivation& a, double x, Rng* rng) {
  switch (a.strategy) {
    case ForwardStrategy::expectation: return expectation_forward(a, x);
    case ForwardStrategy::mode: return mode_forward(a, x);
    case ForwardStrategy::random:
      if (rng == nullptr) throw StateError("random forward strategy needs a generator");
      return random_forward(a, x, *rng);
  }
  return 0.0;
}

}  // namespace ana

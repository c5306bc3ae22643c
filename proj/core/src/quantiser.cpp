#include "ana/quantiser.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ana/errors.hpp"

namespace ana {

namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw DomainError(std::string(what) + ": non-finite input");
}

bool strictly_increasing(const std::vector<double>& v) {
  return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
}

}  // namespace

Quantiser::Quantiser(std::vector<double> levels, std::vector<double> thresholds)
    : levels_(std::move(levels)), thresholds_(std::move(thresholds)) {
  std::vector<std::string> errors;
  if (levels_.size() < 2) errors.emplace_back("quantiser needs at least two levels");
  if (thresholds_.size() + 1 != levels_.size())
    errors.emplace_back("quantiser needs exactly one threshold fewer than levels");
  auto finite = [](double x) { return std::isfinite(x); };
  if (!std::all_of(levels_.begin(), levels_.end(), finite) ||
      !std::all_of(thresholds_.begin(), thresholds_.end(), finite))
    errors.emplace_back("quantiser levels and thresholds must be finite");
  if (!strictly_increasing(levels_)) errors.emplace_back("quantiser levels must be strictly increasing");
  if (!strictly_increasing(thresholds_))
    errors.emplace_back("quantiser thresholds must be strictly increasing");
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

Quantiser Quantiser::heaviside(double threshold) { return Quantiser({0.0, 1.0}, {threshold}); }

Quantiser Quantiser::ternary(double quantum) {
  if (!(quantum > 0.0)) throw ConfigError("ternary quantum must be positive");
  return Quantiser({-quantum, 0.0, quantum}, {-0.5 * quantum, 0.5 * quantum});
}

Quantiser Quantiser::binary_sign(double quantum) {
  if (!(quantum > 0.0)) throw ConfigError("binary quantum must be positive");
  return Quantiser({-quantum, quantum}, {0.0});
}

int heaviside(double threshold, double x) {
  require_finite(threshold, "heaviside");
  require_finite(x, "heaviside");
  return threshold <= x ? 1 : 0;
}

std::size_t bin_index(const Quantiser& q, double x) {
  require_finite(x, "bin_index");
  const auto th = q.thresholds();
  return static_cast<std::size_t>(std::upper_bound(th.begin(), th.end(), x) - th.begin());
}

double quantise(const Quantiser& q, double x) { return q.levels()[bin_index(q, x)]; }

void LinearQuantiserSpec::validate() const {
  std::vector<std::string> errors;
  if (!(quantum > 0.0) || !std::isfinite(quantum)) errors.emplace_back("linear quantiser quantum must be positive");
  if (precision < 1 || precision > 24) errors.emplace_back("linear quantiser precision must be in [1, 24]");
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

Quantiser LinearQuantiserSpec::induced() const {
  validate();
  const auto k_count = static_cast<std::int64_t>(levels());
  std::vector<double> lv;
  std::vector<double> th;
  lv.reserve(k_count);
  th.reserve(k_count - 1);
  for (std::int64_t k = 0; k < k_count; ++k) {
    const double v = static_cast<double>(offset + k) * quantum;
    lv.push_back(v);
    if (k > 0) th.push_back(v);
  }
  return Quantiser(std::move(lv), std::move(th));
}

double linear_quantise(const LinearQuantiserSpec& spec, double x) {
  spec.validate();
  require_finite(x, "linear_quantise");
  const auto lo = spec.offset;
  const auto hi = spec.offset + static_cast<std::int64_t>(spec.levels()) - 1;
  const double m = std::clamp(std::floor(x / spec.quantum), static_cast<double>(lo), static_cast<double>(hi));
  auto k = static_cast<std::int64_t>(m);
  // x/ε and (z+k)·ε round independently; settle on the bin the products define.
  while (k < hi && static_cast<double>(k + 1) * spec.quantum <= x) ++k;
  while (k > lo && static_cast<double>(k) * spec.quantum > x) --k;
  return static_cast<double>(k) * spec.quantum;
}

}  // namespace ana

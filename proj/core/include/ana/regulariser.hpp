#pragma once

#include <string_view>
#include <vector>

#include "ana/noise.hpp"
#include "ana/quantiser.hpp"
#include "ana/rng.hpp"

namespace ana {

/// How a regularised activation produces its forward output.
enum class ForwardStrategy {
  expectation,  // E_ν[σ(x − ν)]
  mode,         // most probable level ("deterministic sampling")
  random,       // categorical draw over levels
};

std::string_view to_string(ForwardStrategy strategy);
ForwardStrategy parse_forward_strategy(std::string_view name);

/// A quantiser σ evaluated on noisy inputs x − ν, ν ~ μ(α, β).
struct RegularisedActivation {
  Quantiser quantiser = Quantiser::heaviside();
  NoiseFamily family = NoiseFamily::uniform;
  NoiseParams params{};
  ForwardStrategy strategy = ForwardStrategy::expectation;
};

/// q_0 + Σ_k (q_k − q_{k−1})·F(x − θ_k). With β = 0 this is exactly
/// quantise(q, x − α).
double expectation_forward(const RegularisedActivation& a, double x);

/// Σ_k (q_k − q_{k−1})·μ(x − θ_k), the derivative of expectation_forward.
/// Zero everywhere when β = 0.
double backward(const RegularisedActivation& a, double x);

/// p_k = F(x − θ_k) − F(x − θ_{k+1}).
std::vector<double> level_probabilities(const RegularisedActivation& a, double x);

/// levels[argmax p_k]; ties resolve to the lower index.
double mode_forward(const RegularisedActivation& a, double x);

/// Categorical draw with probabilities level_probabilities(a, x). Consumes no
/// engine state when β = 0.
double random_forward(const RegularisedActivation& a, double x, Rng& rng);

/// Dispatch on a.strategy. `rng` may be null unless the strategy is random.
double forward(const RegularisedActivation& a, double x, Rng* rng);

}  // namespace ana

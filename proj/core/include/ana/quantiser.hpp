#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ana {

/// K-level stair function. Bin k is [θ_k, θ_{k+1}) with θ_0 = −∞ and
/// θ_K = +∞: a threshold belongs to the bin above it.
class Quantiser {
 public:
  /// Throws ConfigError unless levels and thresholds are strictly increasing,
  /// finite, and |thresholds| = |levels| − 1 ≥ 1.
  Quantiser(std::vector<double> levels, std::vector<double> thresholds);

  /// H⁺_θ: levels {0, 1}, single threshold θ.
  static Quantiser heaviside(double threshold = 0.0);
  /// Levels {−q, 0, q}, thresholds {−q/2, q/2}.
  static Quantiser ternary(double quantum = 1.0);
  /// Levels {−q, q}, threshold 0.
  static Quantiser binary_sign(double quantum = 1.0);

  std::size_t size() const noexcept { return levels_.size(); }
  std::span<const double> levels() const noexcept { return levels_; }
  std::span<const double> thresholds() const noexcept { return thresholds_; }
  double lowest() const noexcept { return levels_.front(); }
  double highest() const noexcept { return levels_.back(); }

  friend bool operator==(const Quantiser&, const Quantiser&) = default;

 private:
  std::vector<double> levels_;
  std::vector<double> thresholds_;
};

/// 1 if θ ≤ x, else 0. Throws DomainError on non-finite input.
int heaviside(double threshold, double x);

/// Index k of the bin containing x. Throws DomainError on non-finite x.
std::size_t bin_index(const Quantiser& q, double x);

double quantise(const Quantiser& q, double x);

/// Hardware-style linear B-bit quantiser x ↦ ε·clip(⌊x/ε⌋, z, z + 2^B − 1).
struct LinearQuantiserSpec {
  std::int64_t offset = 0;  // z
  double quantum = 1.0;     // ε
  int precision = 1;        // B

  std::size_t levels() const { return std::size_t{1} << precision; }
  /// Throws ConfigError for ε ≤ 0, B < 1 or B > 24.
  void validate() const;
  /// Levels (z+k)ε, thresholds (z+k)ε for k ≥ 1.
  Quantiser induced() const;
};

double linear_quantise(const LinearQuantiserSpec& spec, double x);

}  // namespace ana

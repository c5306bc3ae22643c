#pragma once

#include <cmath>

#include "ana/errors.hpp"

namespace ana {

/// Bisection for an increasing-through-zero function: requires f(lo) < 0 and
/// f(hi) ≥ 0. Stops when hi − lo ≤ xtol or the interval cannot be split
/// further in double precision. Returns the midpoint of the final bracket.
template <class F>
double bisect(F&& f, double lo, double hi, double xtol, int max_iter = 2000) {
  if (!(lo < hi)) throw DomainError("bisect: empty bracket");
  if (!(f(lo) < 0.0) || !(f(hi) >= 0.0)) throw DomainError("bisect: bracket does not straddle a root");
  for (int i = 0; i < max_iter && hi - lo > xtol; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo + 0.5 * (hi - lo);
}

}  // namespace ana

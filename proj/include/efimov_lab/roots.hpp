#pragma once

// Bracketing and bracketed root polishing for scalar functions of one real
// variable. Polishing is delegated to Boost's TOMS 748 implementation.

#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "efimov_lab/error.hpp"

namespace efimov::roots {

/// Bracket expansion factor and the hard cap on expansion steps.
inline constexpr double expansion_factor = 2.0;
inline constexpr int max_expansions = 60;

struct Bracket {
  double lo;
  double hi;
  double f_lo;
  double f_hi;
};

inline bool opposite_signs(double a, double b) noexcept {
  return (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0);
}

namespace detail {

// Step from `current` a distance `dist` toward `limit` (possibly infinite),
// never reaching it: past the limit we halve the remaining gap instead.
inline double step_toward(double current, double limit, double dist) {
  const double dir = limit > current ? 1.0 : -1.0;
  if (std::isinf(limit)) return current + dir * dist;
  const double candidate = current + dir * dist;
  if ((dir > 0.0 && candidate >= limit) || (dir < 0.0 && candidate <= limit))
    return current + 0.5 * (limit - current);
  return candidate;
}

}  // namespace detail

/// Grows [seed - width, seed + width] inside the open interval
/// (lower_limit, upper_limit) until f changes sign. Each step doubles the
/// width on a side, or halves the gap to a finite limit.
template <typename F>
Bracket expand_bracket(F&& f, double seed, double width, double lower_limit,
                       double upper_limit) {
  if (!(seed > lower_limit && seed < upper_limit))
    throw numerical_error("bracket seed outside its admissible interval");
  double lo = detail::step_toward(seed, lower_limit, width);
  double hi = detail::step_toward(seed, upper_limit, width);
  double f_lo = f(lo);
  double f_hi = f(hi);
  double dist = width;
  for (int k = 0; k < max_expansions; ++k) {
    if (f_lo == 0.0 || f_hi == 0.0 || opposite_signs(f_lo, f_hi))
      return {lo, hi, f_lo, f_hi};
    dist *= expansion_factor;
    const double new_lo = detail::step_toward(lo, lower_limit, dist);
    const double new_hi = detail::step_toward(hi, upper_limit, dist);
    const double f_new_lo = f(new_lo);
    const double f_new_hi = f(new_hi);
    // Keep the innermost sign change, so a narrow bracket is preferred.
    if (opposite_signs(f_new_lo, f_lo) || f_new_lo == 0.0) return {new_lo, lo, f_new_lo, f_lo};
    if (opposite_signs(f_hi, f_new_hi) || f_new_hi == 0.0) return {hi, new_hi, f_hi, f_new_hi};
    lo = new_lo;
    hi = new_hi;
    f_lo = f_new_lo;
    f_hi = f_new_hi;
  }
  if (f_lo == 0.0 || f_hi == 0.0 || opposite_signs(f_lo, f_hi)) return {lo, hi, f_lo, f_hi};
  throw numerical_error("no bracket found after " + std::to_string(max_expansions) +
                        " expansions around seed " + std::to_string(seed));
}

/// Polishes a sign-changing bracket down to a few ulps and returns the
/// endpoint with the smaller |f|.
template <typename F>
double solve_bracketed(F&& f, const Bracket& b) {
  if (b.f_lo == 0.0) return b.lo;
  if (b.f_hi == 0.0) return b.hi;
  auto tight = [](double x, double y) {
    const double scale = std::max({1.0, std::abs(x), std::abs(y)});
    return std::abs(y - x) <= 4.0 * std::numeric_limits<double>::epsilon() * scale;
  };
  std::uintmax_t iterations = 400;
  const auto [a, c] = boost::math::tools::toms748_solve(f, b.lo, b.hi, b.f_lo, b.f_hi,
                                                        tight, iterations);
  const double fa = f(a);
  const double fc = f(c);
  return std::abs(fa) <= std::abs(fc) ? a : c;
}

}  // namespace efimov::roots

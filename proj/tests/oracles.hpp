#pragma once

// Reference computations that share no code with the library: brute-force
// scans, plain bisection and textbook integrators in extended precision.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

using ld = long double;
using cld = std::complex<long double>;

inline constexpr ld pi_l = 3.141592653589793238462643383279502884L;

/// (-nu cos(nu pi/2) + (8/sqrt3) sin(nu pi/6)) / sin(nu pi/2) with
/// nu = sqrt(s) taken in the complex plane; the result is real for real s.
inline ld lhs(ld s) {
  const cld nu = std::sqrt(cld(s, 0.0L));
  const cld num = -nu * std::cos(nu * pi_l / 2.0L) + (8.0L / std::sqrt(3.0L)) * std::sin(nu * pi_l / 6.0L);
  return (num / std::sin(nu * pi_l / 2.0L)).real();
}

inline ld bisect(const std::function<ld(ld)>& f, ld lo, ld hi, int iterations = 200) {
  ld flo = f(lo);
  for (int i = 0; i < iterations; ++i) {
    const ld mid = 0.5L * (lo + hi);
    const ld fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5L * (lo + hi);
}

/// Lowest root of lhs(s) = x below the pole at s = 4: uniform scan of
/// `cells` cells from well below -x^2 up to 4, then bisection on the first
/// sign change.
inline double branch0(double x, int cells = 200000) {
  const ld lo = -(std::fabs((ld)x) + 3.0L) * (std::fabs((ld)x) + 3.0L) - 10.0L;
  const ld hi = 4.0L - 1e-9L;
  auto f = [x](ld s) { return lhs(s) - (ld)x; };
  ld prev_s = lo, prev_f = f(lo);
  for (int i = 1; i <= cells; ++i) {
    const ld s = lo + (hi - lo) * (ld)i / (ld)cells;
    const ld fs = f(s);
    if ((fs < 0) != (prev_f < 0)) return (double)bisect(f, prev_s, s);
    prev_s = s;
    prev_f = fs;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

/// b from b cosh(b pi/2) = (8/sqrt3) sinh(b pi/6) by bisection on [0.5, 2].
inline double efimov_b() {
  auto f = [](ld b) { return b * std::cosh(b * pi_l / 2) - (8.0L / std::sqrt(3.0L)) * std::sinh(b * pi_l / 6); };
  return (double)bisect(f, 0.5L, 2.0L);
}

/// Sign changes of f on [rho0, rho1] for -f'' + 2 (V - E) f = 0, f(rho0) = 0,
/// integrated with classical RK4 on the substitution u = ln(rho). `V` is the
/// potential at rho.
inline int count_nodes_rk4(const std::function<ld(ld)>& V, ld E, ld rho0, ld rho1, ld du) {
  // y = (f, df/drho); dy/du = rho * dy/drho.
  auto deriv = [&](ld u, ld f, ld g, ld& df, ld& dg) {
    const ld rho = std::exp(u);
    df = rho * g;
    dg = rho * 2.0L * (V(rho) - E) * f;
  };
  ld u = std::log(rho0);
  const ld u1 = std::log(rho1);
  ld f = 0.0L, g = 1.0L;
  int nodes = 0;
  while (u < u1) {
    const ld h = std::min(du, u1 - u);
    ld k1f, k1g, k2f, k2g, k3f, k3g, k4f, k4g;
    deriv(u, f, g, k1f, k1g);
    deriv(u + h / 2, f + h / 2 * k1f, g + h / 2 * k1g, k2f, k2g);
    deriv(u + h / 2, f + h / 2 * k2f, g + h / 2 * k2g, k3f, k3g);
    deriv(u + h, f + h * k3f, g + h * k3g, k4f, k4g);
    const ld fn = f + h / 6 * (k1f + 2 * k2f + 2 * k3f + k4f);
    const ld gn = g + h / 6 * (k1g + 2 * k2g + 2 * k3g + k4g);
    if ((fn < 0) != (f < 0) && f != 0.0L) ++nodes;
    f = fn;
    g = gn;
    const ld scale = std::max(std::fabs(f), std::fabs(g));
    if (scale > 1e100L) {
      f /= scale;
      g /= scale;
    }
    u += h;
  }
  return nodes;
}

/// Saturation density by brute force: a log scan to find the basin, then
/// `points` equally spaced samples across [n/2, 2n]. Returns 0 when the
/// energy per particle never drops below zero.
inline double saturation_density(const std::function<double(double)>& per_particle,
                                 std::size_t points = 10'000'000) {
  double best_n = 0.0, best_e = 0.0;
  for (int i = 0; i <= 24000; ++i) {
    const double n = std::pow(10.0, -12.0 + 24.0 * i / 24000.0);
    const double e = per_particle(n);
    if (e < best_e) {
      best_e = e;
      best_n = n;
    }
  }
  if (best_n == 0.0) return 0.0;
  const double lo = 0.5 * best_n, hi = 2.0 * best_n;
  std::size_t best = 0;
  best_e = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points; ++i) {
    const double e = per_particle(lo + (hi - lo) * (double)i / (double)(points - 1));
    if (e < best_e) {
      best_e = e;
      best = i;
    }
  }
  return lo + (hi - lo) * (double)best / (double)(points - 1);
}

}  // namespace oracle

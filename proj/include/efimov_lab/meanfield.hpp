#pragma once

// Equation of state of homogeneous matter with a zero-range two-body force,
// optionally stabilized by a zero-range three-body or density-dependent term.
// Units hbar = m = 1; densities are particles per volume.

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace efimov {

enum class Statistics { Bose, Fermi };
enum class StabilizerKind { None, ThreeBody, DensityDependent };

inline std::string_view to_string(Statistics s) { return s == Statistics::Bose ? "bose" : "fermi"; }

inline std::string_view to_string(StabilizerKind k) {
  switch (k) {
    case StabilizerKind::None: return "none";
    case StabilizerKind::ThreeBody: return "three-body";
    case StabilizerKind::DensityDependent: return "density-dependent";
  }
  return "?";
}

/// Conventional prefactor of the stabilizing term when none is given:
/// 1/6 for the three-body contact (triplet counting), 1/16 for the
/// density-dependent form (symmetric-matter convention).
inline double default_c3(StabilizerKind kind) {
  return kind == StabilizerKind::DensityDependent ? 1.0 / 16.0 : 1.0 / 6.0;
}

struct MatterModel {
  Statistics statistics = Statistics::Fermi;
  double t0 = 0.0;
  StabilizerKind stabilizer = StabilizerKind::None;
  double t3 = 0.0;
  double alpha = 1.0;  ///< DensityDependent only
  double c3 = 1.0 / 6.0;

  /// Exponent of the stabilizing term in the energy density (3 or alpha + 2).
  double stabilizer_power() const {
    return stabilizer == StabilizerKind::DensityDependent ? alpha + 2.0 : 3.0;
  }
};

inline void validate(const MatterModel& m) {
  if (!std::isfinite(m.t0)) throw std::invalid_argument("t0 must be finite");
  if (m.stabilizer == StabilizerKind::None) return;
  if (!std::isfinite(m.t3) || m.t3 < 0.0)
    throw std::invalid_argument("t3 must be finite and non-negative (repulsive)");
  if (!std::isfinite(m.c3) || m.c3 <= 0.0)
    throw std::invalid_argument("c3 must be finite and positive");
  if (m.stabilizer == StabilizerKind::DensityDependent && !(m.alpha > 0.0 && std::isfinite(m.alpha)))
    throw std::invalid_argument(
        "density-dependent stabilizer needs alpha > 0 to dominate the n^2 attraction");
}

namespace meanfield {

/// (3/5) (3 pi^2 / 2)^(2/3): tau_F = kinetic_coefficient * n^(5/3) for
/// symmetric matter with k_F = (3 pi^2 n / 2)^(1/3).
inline const double kinetic_coefficient =
    0.6 * std::pow(1.5 * std::numbers::pi * std::numbers::pi, 2.0 / 3.0);

/// Energy density as A n^(5/3) + B n^2 + D n^p.
struct Coefficients {
  double A;
  double B;
  double D;
  double p;
};

inline Coefficients coefficients(const MatterModel& m) {
  Coefficients c{};
  // A uniform condensate has no gradient energy.
  c.A = m.statistics == Statistics::Fermi ? 0.5 * kinetic_coefficient : 0.0;
  c.B = m.statistics == Statistics::Fermi ? 0.375 * m.t0 : 0.5 * m.t0;
  c.D = m.stabilizer == StabilizerKind::None ? 0.0 : m.c3 * m.t3;
  c.p = m.stabilizer_power();
  return c;
}

inline double per_particle(const Coefficients& c, double n) {
  if (n == 0.0) return 0.0;
  return c.A * std::cbrt(n * n) + c.B * n + c.D * std::pow(n, c.p - 1.0);
}

inline double per_particle_slope(const Coefficients& c, double n) {
  return (2.0 / 3.0) * c.A / std::cbrt(n) + c.B + (c.p - 1.0) * c.D * std::pow(n, c.p - 2.0);
}

inline double per_particle_curvature(const Coefficients& c, double n) {
  return -(2.0 / 9.0) * c.A / std::cbrt(n) / n +
         (c.p - 1.0) * (c.p - 2.0) * c.D * std::pow(n, c.p - 3.0);
}

inline void check_density(double n) {
  if (!(n >= 0.0) || !std::isfinite(n)) throw std::invalid_argument("density must be >= 0");
}

}  // namespace meanfield

/// Fermi kinetic energy density tau_F(n) of symmetric matter.
inline double kinetic_density_fermi(double n) {
  meanfield::check_density(n);
  return meanfield::kinetic_coefficient * std::pow(n, 5.0 / 3.0);
}

/// Energy density: Bose (1/2) t0 n^2, Fermi (1/2) tau_F + (3/8) t0 n^2, plus
/// c3 t3 n^3 (three-body) or c3 t3 n^(alpha+2) (density-dependent).
inline double energy_density(const MatterModel& m, double n) {
  validate(m);
  meanfield::check_density(n);
  const auto c = meanfield::coefficients(m);
  const double kinetic = m.statistics == Statistics::Fermi ? 0.5 * kinetic_density_fermi(n) : 0.0;
  return kinetic + c.B * n * n + c.D * std::pow(n, c.p);
}

inline double energy_per_particle(const MatterModel& m, double n) {
  validate(m);
  meanfield::check_density(n);
  return meanfield::per_particle(meanfield::coefficients(m), n);
}

enum class Stability { CollapseUnboundedBelow, TrivialMinimumAtZero, Saturating };

inline std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::CollapseUnboundedBelow: return "CollapseUnboundedBelow";
    case Stability::TrivialMinimumAtZero: return "TrivialMinimumAtZero";
    case Stability::Saturating: return "Saturating";
  }
  return "?";
}

/// Every report carries this: mean-field saturation says nothing about the
/// three-body sector, which collapses for any zero-range force.
inline constexpr std::string_view correlational_collapse_caveat =
    "mean-field result only: with zero-range forces three particles can still "
    "collapse to a point (Thomas effect), and zero-range three-body or "
    "density-dependent terms act only at rho = 0, so they cannot stop it; the "
    "energy is bounded only within uncorrelated product states";

inline constexpr std::string_view stabilizer_prefactor_note =
    "the stabilizer prefactor c3 is a convention (default 1/6 three-body, "
    "1/16 density-dependent); only the power of n is fixed";

struct StabilityReport {
  Stability classification;
  std::optional<double> n_sat;               ///< density minimizing energy per particle
  std::optional<double> e_min;               ///< energy density at n_sat
  std::optional<double> energy_per_particle; ///< at n_sat
  std::string_view caveat = correlational_collapse_caveat;
};

/// Collapse when the highest power of n carries a negative coefficient.
/// Otherwise saturation means a minimum of the energy per particle at finite
/// density below its n -> 0 value of zero; with none the minimum sits at n = 0.
inline StabilityReport classify_stability(const MatterModel& m) {
  validate(m);
  const auto c = meanfield::coefficients(m);
  // Powers: stabilizer p > 2 > kinetic 5/3.
  if (c.D <= 0.0 && c.B < 0.0) return {Stability::CollapseUnboundedBelow, {}, {}, {}};
  if (c.B >= 0.0) return {Stability::TrivialMinimumAtZero, {}, {}, {}};

  // B < 0 < D: scan the energy per particle in ln(n) around the crossover scales.
  const double n_bd = std::pow(-c.B / c.D, 1.0 / (c.p - 2.0));
  double lo = n_bd, hi = n_bd;
  if (c.A > 0.0) {
    const double n_ab = std::pow(c.A / -c.B, 3.0);
    lo = std::min(lo, n_ab);
    hi = std::max(hi, n_ab);
  }
  const double log_lo = std::log(lo) - std::log(1e6);
  const double log_hi = std::log(hi) + std::log(1e6);
  constexpr int samples = 4000;
  const double dlog = (log_hi - log_lo) / samples;
  int best = 0;
  double best_e = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= samples; ++i) {
    const double e = meanfield::per_particle(c, std::exp(log_lo + dlog * i));
    if (e < best_e) {
      best_e = e;
      best = i;
    }
  }
  if (!(best_e < 0.0)) return {Stability::TrivialMinimumAtZero, {}, {}, {}};

  // Brent (golden section with parabolic steps) on the bracketing cells,
  // then Newton on d(e/n)/dn = 0.
  const double a = std::exp(log_lo + dlog * std::max(best - 1, 0));
  const double b = std::exp(log_lo + dlog * std::min(best + 1, samples));
  std::uintmax_t iterations = 200;
  auto [n, e] = boost::math::tools::brent_find_minima(
      [&](double x) { return meanfield::per_particle(c, x); }, a, b,
      std::numeric_limits<double>::digits / 2, iterations);
  (void)e;
  for (int it = 0; it < 50; ++it) {
    const double curvature = meanfield::per_particle_curvature(c, n);
    if (!(curvature > 0.0)) break;
    const double step = meanfield::per_particle_slope(c, n) / curvature;
    const double next = n - step;
    if (!(next > a && next < b)) break;
    n = next;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * n) break;
  }
  StabilityReport r{Stability::Saturating, n, energy_density(m, n),
                    meanfield::per_particle(c, n)};
  return r;
}

}  // namespace efimov

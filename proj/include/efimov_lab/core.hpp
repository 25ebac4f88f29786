#pragma once

// Shared conventions for the whole library.
//
// Internal units: hbar = m = 1, where m is the (arbitrary) mass scale of the
// hyperspherical coordinates. The hyper-radial equation is solved as
//
//     -f''(rho) + ((nu^2(rho) - 1/4) / rho^2) f(rho) = 2 E f(rho),
//
// so an energy E corresponds to a wave number kappa = sqrt(-2E).

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "efimov_lab/error.hpp"

namespace efimov {

inline constexpr double hbar = 1.0;
inline constexpr double mass_scale = 1.0;
inline constexpr double identical_reduced_mass = 0.5;

/// Unit in which hyper-radii and energies are reported.
enum class LengthUnit { R, abs_a };

inline std::string_view to_string(LengthUnit u) {
  return u == LengthUnit::R ? "R" : "abs_a";
}

/// Validated physical configuration. Immutable once built.
///
/// The scattering length is signed and stored as given. The convention of
/// the source analysis is k cot(delta_0) = +1/a, opposite to the common one;
/// nothing here infers bound or virtual character from its sign. Only the
/// signed ratio x = rho / (sqrt(mu) a) is ever used.
class SystemConfig {
 public:
  double scattering_length() const noexcept { return a_; }
  double reduced_mass() const noexcept { return mu_; }
  LengthUnit length_unit() const noexcept { return unit_; }

  /// 1/a, exactly zero at unitarity.
  double inverse_scattering_length() const noexcept { return inv_a_; }
  bool unitary() const noexcept { return inv_a_ == 0.0; }

  /// Right-hand side of the hyperangular eigenvalue equation.
  double x_of_rho(double rho) const noexcept {
    return rho * inv_a_ / std::sqrt(mu_);
  }

  /// Lowest breakup threshold in internal units: the two-body bound state
  /// -1/(2 mu a^2) when a < 0 (where the lowest branch behaves as
  /// nu^2 ~ -x^2 at large rho), otherwise zero.
  double dimer_energy() const noexcept {
    return inv_a_ < 0.0 ? -0.5 * inv_a_ * inv_a_ / mu_ : 0.0;
  }

  /// True when the lowest adiabatic branch ends in the two-body bound state.
  bool dimer_side() const noexcept { return inv_a_ < 0.0; }

  friend SystemConfig make_config(double a, double mu, LengthUnit unit);

 private:
  SystemConfig(double a, double mu, LengthUnit unit)
      : a_(a), mu_(mu), unit_(unit), inv_a_(std::isinf(a) ? 0.0 : 1.0 / a) {}

  double a_;
  double mu_;
  LengthUnit unit_;
  double inv_a_;
};

/// Unitarity is passed as a = +/-infinity.
inline SystemConfig make_config(double a, double mu = identical_reduced_mass,
                                LengthUnit unit = LengthUnit::R) {
  if (std::isnan(a)) throw std::invalid_argument("scattering length is NaN");
  if (a == 0.0) throw std::invalid_argument("zero scattering length");
  if (std::isnan(mu) || mu <= 0.0)
    throw std::invalid_argument("reduced mass must be positive");
  if (!std::isfinite(mu)) throw std::invalid_argument("reduced mass must be finite");
  if (unit == LengthUnit::abs_a && std::isinf(a))
    throw std::invalid_argument("length unit |a| requires a finite scattering length");
  return SystemConfig(a, mu, unit);
}

/// Conversion between report units (lengths in L, energies in hbar^2/(m L^2))
/// and internal units, for a length scale L given in internal lengths.
class UnitSystem {
 public:
  explicit UnitSystem(double length_scale) : scale_(length_scale) {
    if (!(length_scale > 0.0) || !std::isfinite(length_scale))
      throw std::invalid_argument("length scale must be positive and finite");
  }

  /// L = R or |a| depending on the config's reporting unit.
  static UnitSystem for_config(const SystemConfig& config, double R) {
    return UnitSystem(config.length_unit() == LengthUnit::R
                          ? R
                          : std::abs(config.scattering_length()));
  }

  double length_scale() const noexcept { return scale_; }
  double length_to_internal(double v) const noexcept { return v * scale_; }
  double length_from_internal(double v) const noexcept { return v / scale_; }
  double energy_to_internal(double e) const noexcept { return e / (scale_ * scale_); }
  double energy_from_internal(double e) const noexcept { return e * (scale_ * scale_); }

 private:
  double scale_;
};

/// Geometrically spaced hyper-radius grid; uniform in ln(rho).
class LogGrid {
 public:
  LogGrid(double rho_min, double rho_max, std::size_t points)
      : rho_min_(rho_min), rho_max_(rho_max) {
    if (!(rho_min > 0.0) || !(rho_max > rho_min) || !std::isfinite(rho_max))
      throw std::invalid_argument("log grid requires 0 < rho_min < rho_max");
    if (points < 2) throw std::invalid_argument("log grid requires at least 2 points");
    log_min_ = std::log(rho_min);
    log_step_ = (std::log(rho_max) - log_min_) / static_cast<double>(points - 1);
    values_.resize(points);
    for (std::size_t i = 0; i < points; ++i)
      values_[i] = std::exp(log_min_ + log_step_ * static_cast<double>(i));
    values_.front() = rho_min;
    values_.back() = rho_max;
  }

  /// Grid with a fixed number of points per e-fold (at least 2 points).
  static LogGrid with_density(double rho_min, double rho_max, double points_per_efold) {
    const double span = std::log(rho_max / rho_min);
    const auto n = static_cast<std::size_t>(std::ceil(span * points_per_efold)) + 1;
    return LogGrid(rho_min, rho_max, n < 2 ? 2 : n);
  }

  double rho_min() const noexcept { return rho_min_; }
  double rho_max() const noexcept { return rho_max_; }
  std::size_t size() const noexcept { return values_.size(); }
  double log_min() const noexcept { return log_min_; }
  double log_step() const noexcept { return log_step_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  double rho_min_;
  double rho_max_;
  double log_min_ = 0.0;
  double log_step_ = 0.0;
  std::vector<double> values_;
};

}  // namespace efimov

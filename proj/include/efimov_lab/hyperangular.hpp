#pragma once

// Hyperangular eigenvalue problem for three identical bosons with zero-range
// s-wave interactions.
//
// Solving the free Faddeev equations and imposing the zero-range boundary
// condition at alpha = 0 gives the transcendental equation
//
//     (-nu cos(nu pi/2) + (8/sqrt 3) sin(nu pi/6)) / sin(nu pi/2) = x,
//     x = rho / (sqrt(mu) a),
//
// whose roots nu(rho) define lambda = nu^2 - 4 and the adiabatic potential
// (nu^2 - 1/4) / rho^2. Everything here works with nu^2 as a single real
// number: nu^2 < 0 means nu = i b is imaginary.

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/special_functions/sin_pi.hpp>
#include <boost/math/special_functions/cos_pi.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "efimov_lab/core.hpp"
#include "efimov_lab/error.hpp"
#include "efimov_lab/parallel.hpp"
#include "efimov_lab/roots.hpp"

namespace efimov {

inline constexpr double default_tol = 1e-10;

/// Eigenvalue nu^2 on a given adiabatic branch (0 = lowest).
struct NuSquared {
  double value;
  int branch_index;
  double residual;  ///< |lhs(nu^2) - x| at the returned root

  double lambda() const noexcept { return value - 4.0; }
};

namespace hyperangular {

inline constexpr double coupling = 8.0 / std::numbers::sqrt3;  // 8/sqrt(3)

/// Value of the left-hand side as nu -> 0: (4 pi sqrt(3)/9 - 1) / (pi/2).
inline constexpr double lhs_at_zero =
    (4.0 * std::numbers::pi * std::numbers::sqrt3 / 9.0 - 1.0) / (std::numbers::pi / 2.0);

/// |sin(nu pi/2)| below this is treated as sitting on a pole.
inline constexpr double pole_tolerance = 1e-12;

/// Half-width around nu = 4, where numerator and denominator vanish together,
/// inside which a Taylor quotient replaces direct evaluation.
inline constexpr double removable_window = 1e-4;

/// Roots closer than this (in nu) to a pole are reported as misclassified.
inline constexpr double pole_guard = 1e-8;

/// nu of the k-th non-removable pole: 2, 6, 8, 10, ...
/// (nu = 4 is excluded: the numerator vanishes there as well.)
inline constexpr double pole_nu(int k) noexcept { return k == 0 ? 2.0 : 2.0 * k + 4.0; }

/// Open interval of nu^2 hosting branch j, between consecutive poles.
struct BranchInterval {
  double lo;
  double hi;
};

inline BranchInterval branch_interval(int j) {
  if (j < 0) throw std::invalid_argument("branch index must be non-negative");
  const double hi = pole_nu(j) * pole_nu(j);
  if (j == 0) return {-std::numeric_limits<double>::infinity(), hi};
  const double lo = pole_nu(j - 1) * pole_nu(j - 1);
  return {lo, hi};
}

namespace detail {

// Derivatives of numerator N and denominator D at nu = 4, for the Taylor
// quotient across the removable singularity.
struct RemovableSeries {
  double n1, n2, n3, d1, d3;
};

inline RemovableSeries removable_series() {
  using std::numbers::pi;
  const double k = pi / 2.0;
  const double q = pi / 6.0;
  const double nu = 4.0;
  // cos(k nu) = 1, sin(k nu) = 0, cos(q nu) = -1/2, sin(q nu) = sqrt(3)/2
  const double cq = -0.5;
  const double sq = std::numbers::sqrt3 / 2.0;
  RemovableSeries s{};
  s.n1 = -1.0 + coupling * q * cq;
  s.n2 = nu * k * k - coupling * q * q * sq;
  s.n3 = 3.0 * k * k - coupling * q * q * q * cq;
  s.d1 = k;
  s.d3 = -k * k * k;
  return s;
}

inline double lhs_near_four(double delta) {
  static const RemovableSeries s = removable_series();
  const double num = s.n1 + 0.5 * s.n2 * delta + s.n3 * delta * delta / 6.0;
  const double den = s.d1 + s.d3 * delta * delta / 6.0;
  return num / den;
}

}  // namespace detail

/// Left-hand side for real nu. Even in nu.
inline double lhs_real_nu(double nu) {
  nu = std::abs(nu);
  if (nu == 0.0) return lhs_at_zero;
  if (std::abs(nu - 4.0) < removable_window) return detail::lhs_near_four(nu - 4.0);
  const double s_half = boost::math::sin_pi(0.5 * nu);
  const double c_half = boost::math::cos_pi(0.5 * nu);
  if (std::abs(s_half) < pole_tolerance && nu > 1.0)
    throw pole_error("pole of the eigenvalue equation at nu = " + std::to_string(nu),
                     nu * nu);
  // Kept as one quotient: split into -nu cot + coupling / (3 - 4 sin^2), both
  // parts grow like 1/(nu - 4) and their cancellation costs ~8 digits.
  return (-nu * c_half + coupling * boost::math::sin_pi(nu / 6.0)) / s_half;
}

/// Left-hand side for nu = i b. Even in b and real-valued:
/// (-b cosh(b pi/2) + (8/sqrt 3) sinh(b pi/6)) / sinh(b pi/2).
inline double lhs_imag_nu(double b) {
  b = std::abs(b);
  if (b == 0.0) return lhs_at_zero;
  using std::numbers::pi;
  const double sh = std::sinh(b * pi / 6.0);
  // sinh(u)/sinh(3u) = 1/(3 + 4 sinh^2 u); tends to 0 without overflow.
  return -b / std::tanh(0.5 * pi * b) + coupling / (3.0 + 4.0 * sh * sh);
}

}  // namespace hyperangular

/// Left-hand side of the eigenvalue equation as a function of nu^2.
/// Throws pole_error on a non-removable pole.
inline double eigen_lhs(double nu_squared) {
  if (!std::isfinite(nu_squared)) throw std::invalid_argument("nu^2 must be finite");
  if (nu_squared > 0.0) return hyperangular::lhs_real_nu(std::sqrt(nu_squared));
  if (nu_squared < 0.0) return hyperangular::lhs_imag_nu(std::sqrt(-nu_squared));
  return hyperangular::lhs_at_zero;
}

namespace hyperangular {

// Root of eigen_lhs(s) = x inside branch j's interval, seeded near `seed`.
inline NuSquared solve_seeded(double x, int branch, double seed, double width, double tol) {
  const auto [lo, hi] = branch_interval(branch);
  auto f = [x](double s) { return eigen_lhs(s) - x; };
  const auto bracket = roots::expand_bracket(f, seed, width, lo, hi);
  const double s = roots::solve_bracketed(f, bracket);
  const double residual = std::abs(f(s));
  if (!(residual < tol))
    throw numerical_error("root residual " + std::to_string(residual) +
                          " exceeds tolerance at x = " + std::to_string(x));
  if (std::isfinite(lo) && std::sqrt(s) - std::sqrt(lo) < pole_guard)
    throw numerical_error("pole misclassification: root within tolerance of nu = " +
                          std::to_string(std::sqrt(lo)));
  if (std::sqrt(hi) - std::sqrt(std::max(s, 0.0)) < pole_guard)
    throw numerical_error("pole misclassification: root within tolerance of nu = " +
                          std::to_string(std::sqrt(hi)));
  return {s, branch, residual};
}

inline double default_seed(double x) { return x < -1.0 ? -x * x : 0.0; }

}  // namespace hyperangular

/// Lowest root nu^2(x), the one continuously connected to -b^2 at x = 0.
/// On this branch the left-hand side runs from -infinity (nu^2 -> -infinity)
/// to +infinity (nu -> 2), so the root exists for every finite x.
inline NuSquared solve_branch0(double x, double tol = default_tol) {
  if (!std::isfinite(x)) throw std::invalid_argument("x must be finite");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const double seed = hyperangular::default_seed(x);
  return hyperangular::solve_seeded(x, 0, seed, 1.0 + 0.01 * std::abs(seed), tol);
}

/// The universal constants: nu_0 = i b at x = 0 and C = b^2 + 1/4.
struct EfimovConstants {
  double b;
  double C;
  double residual;  ///< |lhs(-b^2)|
};

inline EfimovConstants efimov_constants(double tol = default_tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  // b cosh(b pi/2) = (8/sqrt 3) sinh(b pi/6) has exactly one root on b > 0,
  // and it lies in [0.5, 2].
  auto f = [](double b) { return hyperangular::lhs_imag_nu(b); };
  const roots::Bracket bracket{0.5, 2.0, f(0.5), f(2.0)};
  const double b = roots::solve_bracketed(f, bracket);
  const double residual = std::abs(f(b));
  if (!(residual < tol))
    throw numerical_error("constant b did not reach the requested residual");
  return {b, b * b + 0.25, residual};
}

/// The `count` lowest roots at fixed x, ascending. Branch j >= 1 is searched by
/// a dense scan between its bounding poles plus geometric refinement toward
/// each pole; several roots in one interval are all reported.
inline std::vector<NuSquared> solve_branches(double x, int count, double tol = default_tol) {
  if (count < 1) throw std::invalid_argument("count must be at least 1");
  if (!std::isfinite(x)) throw std::invalid_argument("x must be finite");
  std::vector<NuSquared> out;
  out.push_back(solve_branch0(x, tol));
  auto f = [x](double s) { return eigen_lhs(s) - x; };

  for (int j = 1; static_cast<int>(out.size()) < count; ++j) {
    if (j > 10000) throw numerical_error("branch search did not terminate");
    const double nu_lo = hyperangular::pole_nu(j - 1);
    const double nu_hi = hyperangular::pole_nu(j);
    const double span = nu_hi - nu_lo;
    // Uniform body plus geometric tails toward both poles, stopping ~2e-9
    // short of each pole (below the misclassification guard).
    constexpr int uniform = 512;
    constexpr int geometric = 22;
    const double cell = span / uniform;
    std::vector<double> nus;
    for (int k = geometric; k >= 1; --k) nus.push_back(nu_lo + cell * std::ldexp(1.0, -k));
    for (int k = 1; k < uniform; ++k) nus.push_back(nu_lo + cell * k);
    for (int k = 1; k <= geometric; ++k) nus.push_back(nu_hi - cell * std::ldexp(1.0, -k));

    double prev_s = nus.front() * nus.front();
    double prev_f = f(prev_s);
    std::size_t found = 0;
    for (std::size_t i = 1; i < nus.size(); ++i) {
      const double s = nus[i] * nus[i];
      const double fs = f(s);
      if (roots::opposite_signs(prev_f, fs) || fs == 0.0) {
        const double root = roots::solve_bracketed(f, {prev_s, s, prev_f, fs});
        const double nu = std::sqrt(root);
        if (nu - nu_lo < hyperangular::pole_guard || nu_hi - nu < hyperangular::pole_guard)
          throw numerical_error("pole misclassification near nu = " + std::to_string(nu));
        const double residual = std::abs(f(root));
        if (!(residual < tol))
          throw numerical_error("root residual exceeds tolerance on branch " +
                                std::to_string(j));
        out.push_back({root, static_cast<int>(out.size()), residual});
        ++found;
        if (static_cast<int>(out.size()) == count) break;
      }
      prev_s = s;
      prev_f = fs;
    }
    if (found == 0)
      throw numerical_error("no root found between poles nu = " + std::to_string(nu_lo) +
                            " and " + std::to_string(nu_hi) +
                            "; a root this close to a pole is a pole misclassification");
  }
  return out;
}

/// nu^2 tabulated along a hyper-radius grid for one branch.
struct AdiabaticBranch {
  LogGrid grid;
  std::vector<double> nu_squared;
  int branch_index = 0;

  /// Largest |nu^2(rho_{i+1}) - nu^2(rho_i)| along the grid.
  double max_step_change() const {
    double m = 0.0;
    for (std::size_t i = 1; i < nu_squared.size(); ++i)
      m = std::max(m, std::abs(nu_squared[i] - nu_squared[i - 1]));
    return m;
  }
};

/// Points per continuation chunk. Chunk boundaries depend only on the grid,
/// so results are identical for every thread count.
inline constexpr std::size_t continuation_chunk = 32;

/// Tabulates branch `branch_index` by continuation in rho. A serial coarse
/// pass solves the first point of every chunk, each seeded from the previous
/// chunk's; chunks are then filled independently, each point seeded from its
/// left neighbour.
inline AdiabaticBranch tabulate_branch(const SystemConfig& config, const LogGrid& grid,
                                       int branch_index, double tol = default_tol,
                                       unsigned threads = 1) {
  if (branch_index < 0) throw std::invalid_argument("branch index must be non-negative");
  const std::size_t n = grid.size();
  AdiabaticBranch out{grid, std::vector<double>(n), branch_index};

  auto annotate = [&](std::size_t i, auto&& fn) {
    try {
      return fn();
    } catch (const numerical_error& e) {
      throw numerical_error(std::string(e.what()) + " (branch " +
                            std::to_string(branch_index) + ", rho = " +
                            std::to_string(grid[i]) + ")");
    }
  };
  auto solve_first = [&](std::size_t i) {
    return annotate(i, [&] {
      const double x = config.x_of_rho(grid[i]);
      return solve_branches(x, branch_index + 1, tol).back().value;
    });
  };
  auto solve_from = [&](std::size_t i, double seed) {
    return annotate(i, [&] {
      const double x = config.x_of_rho(grid[i]);
      return hyperangular::solve_seeded(x, branch_index, seed, 1e-3 * (1.0 + std::abs(seed)),
                                        tol)
          .value;
    });
  };

  if (config.unitary()) {
    std::fill(out.nu_squared.begin(), out.nu_squared.end(), solve_first(0));
    return out;
  }

  const std::size_t chunks = (n + continuation_chunk - 1) / continuation_chunk;
  std::vector<double> heads(chunks);
  heads[0] = solve_first(0);
  for (std::size_t c = 1; c < chunks; ++c)
    heads[c] = solve_from(c * continuation_chunk, heads[c - 1]);

  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::size_t begin = c * continuation_chunk;
    const std::size_t end = std::min(n, begin + continuation_chunk);
    out.nu_squared[begin] = heads[c];
    for (std::size_t i = begin + 1; i < end; ++i)
      out.nu_squared[i] = solve_from(i, out.nu_squared[i - 1]);
  });
  return out;
}

/// Branch with a prescribed constant nu^2, for test potentials
/// (e.g. nu^2 = 4 is purely repulsive, nu^2 = -b^2 + epsilon is subcritical).
inline AdiabaticBranch constant_branch(const LogGrid& grid, double nu_squared) {
  return {grid, std::vector<double>(grid.size(), nu_squared), 0};
}

enum class Regularization { None, HardWall, Cap };

inline std::string_view to_string(Regularization r) {
  switch (r) {
    case Regularization::None: return "none";
    case Regularization::HardWall: return "hardwall";
    case Regularization::Cap: return "cap";
  }
  return "?";
}

/// V(rho) = (nu^2(rho) - 1/4) / (2 rho^2) in internal units, so that the
/// radial equation reads -f''/2 + V f = E f. Between grid points nu^2 is a
/// cubic B-spline in ln(rho); outside the grid it is held at the end values.
///
/// HardWall: the domain starts at rho = R. Cap: V(rho < R) = V(R).
class EffectivePotential {
 public:
  EffectivePotential(AdiabaticBranch branch, Regularization regularization, double R)
      : branch_(std::move(branch)), regularization_(regularization), R_(R) {
    if (branch_.nu_squared.size() != branch_.grid.size())
      throw std::invalid_argument("branch values do not match its grid");
    const auto& v = branch_.nu_squared;
    constant_ = std::all_of(v.begin(), v.end(), [&](double s) { return s == v.front(); });
    if (!constant_ && v.size() >= 5)
      spline_ = std::make_shared<const boost::math::interpolators::cardinal_cubic_b_spline<double>>(
          v.data(), v.size(), branch_.grid.log_min(), branch_.grid.log_step());
  }

  const AdiabaticBranch& branch() const noexcept { return branch_; }
  Regularization regularization() const noexcept { return regularization_; }
  double R() const noexcept { return R_; }

  /// Interpolated nu^2 at rho (unmodified by the regularization).
  double nu_squared_at(double rho) const {
    const auto& v = branch_.nu_squared;
    if (constant_) return v.front();
    const double t = std::clamp(std::log(rho), branch_.grid.log_min(),
                                branch_.grid.log_min() +
                                    branch_.grid.log_step() * static_cast<double>(v.size() - 1));
    if (spline_) return (*spline_)(t);
    const double u = (t - branch_.grid.log_min()) / branch_.grid.log_step();
    const auto i = std::min(static_cast<std::size_t>(u), v.size() - 2);
    const double w = u - static_cast<double>(i);
    return (1.0 - w) * v[i] + w * v[i + 1];
  }

  /// The unregularized potential (nu^2 - 1/4) / (2 rho^2).
  double bare(double rho) const { return (nu_squared_at(rho) - 0.25) / (2.0 * rho * rho); }

  double operator()(double rho) const {
    if (rho >= R_ || regularization_ == Regularization::None) return bare(rho);
    if (regularization_ == Regularization::HardWall)
      return std::numeric_limits<double>::infinity();
    return bare(R_);
  }

 private:
  AdiabaticBranch branch_;
  Regularization regularization_;
  double R_;
  bool constant_ = false;
  std::shared_ptr<const boost::math::interpolators::cardinal_cubic_b_spline<double>> spline_;
};

inline EffectivePotential effective_potential(AdiabaticBranch branch,
                                              Regularization regularization, double R) {
  if (!(R > 0.0) || !std::isfinite(R))
    throw std::invalid_argument("regularization scale R must be positive and finite");
  if (regularization != Regularization::None && R > branch.grid.rho_max())
    throw std::invalid_argument("regularization scale R lies above the tabulated range");
  return EffectivePotential(std::move(branch), regularization, R);
}

}  // namespace efimov

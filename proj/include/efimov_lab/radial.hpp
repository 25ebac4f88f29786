#pragma once

// Hyper-radial equation on a regularized adiabatic potential.
//
// With rho = rho_s e^t and f = sqrt(rho / rho_s) g the equation
// -f'' + ((nu^2 - 1/4)/rho^2) f = 2 E f becomes
//
//     g''(t) = (nu^2(rho) + kappa^2 rho^2) g(t),   kappa^2 = -2E,
//
// so an inverse-square core (constant nu^2 = -b^2) is a constant-coefficient
// oscillator in t and the geometric tower is resolved on a uniform t-grid.
// The recurrence is Numerov's.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "efimov_lab/core.hpp"
#include "efimov_lab/error.hpp"
#include "efimov_lab/hyperangular.hpp"
#include "efimov_lab/parallel.hpp"
#include "efimov_lab/stats.hpp"

namespace efimov {

struct RadialOptions {
  /// Target step in t = ln(rho / rho_start).
  double step = 0.005;
  /// Step-size control gives up beyond this many steps.
  std::size_t max_steps = 4'000'000;
  /// Inner hard wall for an unregularized potential (collapse probes only).
  double inner_cutoff = 0.0;
};

struct RadialSolution {
  double energy;  ///< internal units, negative
  double kappa;   ///< sqrt(-2E)
  int node_count;
  std::vector<double> rho;
  std::vector<double> f;  ///< normalized to max |f| = 1
  /// f(rho_max) / max|f| when the outer boundary was reached. When the
  /// integration stopped early in a classically forbidden region the
  /// solution can no longer vanish, and this is +/-1.
  double outer_mismatch;
  bool reached_outer;
};

namespace radial {

inline constexpr double renormalize_above = 1e150;
/// Stop once certified node-free and grown by this many e-folds.
inline constexpr double forbidden_growth_stop = 60.0;
/// Numerov needs h sqrt(|Q|) well below its stability limit.
inline constexpr double max_phase_per_step = 0.5;

struct Grid {
  double rho_start;
  double h;
  std::vector<double> rho;
  std::vector<double> nu_squared;
};

inline double start_radius(const EffectivePotential& pot, const RadialOptions& opt) {
  if (pot.regularization() == Regularization::None) {
    if (!(opt.inner_cutoff > 0.0))
      throw forbidden_request(
          "unregularized potential: the -C/rho^2 attraction has infinitely many nodes "
          "toward rho = 0 and no ground state (Thomas collapse); choose a regularization");
    return opt.inner_cutoff;
  }
  return pot.R();
}

inline Grid make_grid(const EffectivePotential& pot, double rho_start, double rho_max,
                      const RadialOptions& opt, double kappa_sq) {
  if (!(rho_max > rho_start))
    throw std::invalid_argument("rho_max must exceed the inner boundary");
  if (!(opt.step > 0.0)) throw std::invalid_argument("radial step must be positive");
  const double span = std::log(rho_max / rho_start);
  auto build = [&](std::size_t m) {
    Grid g{rho_start, span / static_cast<double>(m), {}, {}};
    g.rho.resize(m + 1);
    g.nu_squared.resize(m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
      g.rho[i] = rho_start * std::exp(g.h * static_cast<double>(i));
      g.nu_squared[i] = pot.nu_squared_at(g.rho[i]);
    }
    g.rho.back() = rho_max;
    return g;
  };
  auto m = static_cast<std::size_t>(std::ceil(span / opt.step));
  if (m < 4) m = 4;
  Grid g = build(m);
  // Step-size control: resolve the fastest oscillation, Q = nu^2 + kappa^2 rho^2 < 0.
  double worst = 0.0;
  for (std::size_t i = 0; i < g.rho.size(); ++i)
    worst = std::max(worst, -(g.nu_squared[i] + kappa_sq * g.rho[i] * g.rho[i]));
  if (worst > 0.0 && g.h * std::sqrt(worst) > max_phase_per_step) {
    const double needed = span * std::sqrt(worst) / max_phase_per_step;
    if (needed > static_cast<double>(opt.max_steps))
      throw numerical_error("step-size control did not converge: " +
                            std::to_string(needed) + " steps needed");
    g = build(static_cast<std::size_t>(std::ceil(needed)));
  }
  return g;
}

struct InnerState {
  double g0;
  double dg0;        ///< dg/dt at t = 0
  int inner_nodes;   ///< zeros of f in (0, R) for the Cap scheme
  double q_squared;  ///< Cap interior: f'' = -q^2 f
};

inline InnerState inner_state(const EffectivePotential& pot, const Grid& grid, double kappa_sq) {
  if (pot.regularization() != Regularization::Cap) return {0.0, 1.0, 0, 0.0};
  // Constant potential on [0, R] with f(0) = 0.
  const double R = pot.R();
  const double q2 = -((pot.nu_squared_at(R) - 0.25) / (R * R) + kappa_sq);
  double f = 0.0, df = 0.0;
  int nodes = 0;
  if (q2 > 0.0) {
    const double q = std::sqrt(q2);
    f = std::sin(q * R);
    df = q * std::cos(q * R);
    nodes = static_cast<int>(std::ceil(q * R / std::numbers::pi)) - 1;
  } else if (q2 < 0.0) {
    const double p = std::sqrt(-q2);
    f = std::sinh(p * R);
    df = p * std::cosh(p * R);
  } else {
    f = R;
    df = 1.0;
  }
  (void)grid;
  return {f, R * df - 0.5 * f, nodes, q2};
}

struct Integration {
  std::vector<double> g;
  std::vector<double> log_scale;
  int node_count = 0;
  std::size_t last = 0;  ///< index of the last integrated point
  bool reached_outer = false;
};

/// Numerov integration outward from t = 0. With `keep_samples` false only the
/// node count is tracked.
inline Integration integrate(const Grid& grid, double kappa_sq, const InnerState& start,
                             bool keep_samples) {
  const std::size_t n = grid.rho.size();
  const double h = grid.h;
  const double h2 = h * h;
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i)
    q[i] = grid.nu_squared[i] + kappa_sq * grid.rho[i] * grid.rho[i];
  // suffix_min[i] = min Q over [i, n): Q > 0 from here on means no more nodes
  // once |g| grows.
  std::vector<double> suffix_min(n);
  suffix_min[n - 1] = q[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) suffix_min[i] = std::min(q[i], suffix_min[i + 1]);

  Integration out;
  if (keep_samples) {
    out.g.reserve(n);
    out.log_scale.reserve(n);
  }
  double scale = 0.0;

  // Taylor start for g(h).
  const double dq = (q[1] - q[0]) / h;
  const double d2q = (q[2] - 2.0 * q[1] + q[0]) / h2;
  const double g0 = start.g0;
  const double v0 = start.dg0;
  double g_prev = g0;
  double g_cur = g0 + h * v0 + 0.5 * h2 * q[0] * g0 + h2 * h * (dq * g0 + q[0] * v0) / 6.0 +
                 h2 * h2 * (d2q * g0 + 2.0 * dq * v0 + q[0] * q[0] * g0) / 24.0;

  auto stable = [&](std::size_t i) {
    if (h2 * q[i] / 12.0 >= 0.5) return false;
    return true;
  };

  int sign = g0 > 0.0 ? 1 : (g0 < 0.0 ? -1 : 0);
  auto track = [&](double value) {
    const int s = value > 0.0 ? 1 : (value < 0.0 ? -1 : 0);
    if (s != 0) {
      if (sign != 0 && s != sign) ++out.node_count;
      sign = s;
    }
  };
  track(g_cur);
  if (keep_samples) {
    out.g.push_back(g_prev);
    out.log_scale.push_back(0.0);
    out.g.push_back(g_cur);
    out.log_scale.push_back(0.0);
  }

  double growth = 0.0;
  bool certified = false;
  out.last = 1;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!certified && suffix_min[i] > 0.0 && g_cur * (g_cur - g_prev) > 0.0) certified = true;
    if (certified) {
      growth += std::log(std::abs(g_cur / g_prev));
      if (growth > forbidden_growth_stop || !stable(i + 1)) return out;
    } else if (!stable(i + 1)) {
      throw numerical_error("step-size control did not converge at rho = " +
                            std::to_string(grid.rho[i + 1]));
    }
    const double w_prev = 1.0 - h2 * q[i - 1] / 12.0;
    const double w_cur = 1.0 - h2 * q[i] / 12.0;
    const double w_next = 1.0 - h2 * q[i + 1] / 12.0;
    double g_next = ((12.0 - 10.0 * w_cur) * g_cur - w_prev * g_prev) / w_next;
    g_prev = g_cur;
    g_cur = g_next;
    if (std::abs(g_cur) > renormalize_above) {
      g_prev /= renormalize_above;
      g_cur /= renormalize_above;
      scale += std::log(renormalize_above);
    }
    track(g_cur);
    out.last = i + 1;
    if (keep_samples) {
      out.g.push_back(g_cur);
      out.log_scale.push_back(scale);
    }
  }
  out.reached_outer = true;
  return out;
}

inline void check_energy(double E) {
  if (!(E < 0.0) || !std::isfinite(E))
    throw std::invalid_argument("radial integration requires a finite negative energy");
}

}  // namespace radial

/// Integrates the radial equation at energy E from the inner boundary
/// (f(R) = 0 for HardWall, the regular interior solution for Cap, or
/// f(inner_cutoff) = 0 for an unregularized probe) out to rho_max.
inline RadialSolution integrate_radial(const EffectivePotential& pot, double E, double rho_max,
                                       const RadialOptions& opt = {}) {
  radial::check_energy(E);
  const double kappa_sq = -2.0 * E;
  const double rho_start = radial::start_radius(pot, opt);
  const auto grid = radial::make_grid(pot, rho_start, rho_max, opt, kappa_sq);
  const auto start = radial::inner_state(pot, grid, kappa_sq);
  const auto run = radial::integrate(grid, kappa_sq, start, true);

  RadialSolution sol{E, std::sqrt(kappa_sq), 0, {}, {}, 0.0, run.reached_outer};

  // Interior of the Cap scheme, in the normalization where g(0) = f(R).
  std::vector<double> inner_rho, inner_f;
  if (pot.regularization() == Regularization::Cap) {
    const double R = pot.R();
    const double q2 = start.q_squared;
    const int m = std::max(64, 16 * (start.inner_nodes + 1));
    for (int j = 1; j < m; ++j) {
      const double r = R * j / m;
      double v;
      if (q2 > 0.0)
        v = std::sin(std::sqrt(q2) * r);
      else if (q2 < 0.0)
        v = std::sinh(std::sqrt(-q2) * r);
      else
        v = r;
      inner_rho.push_back(r);
      inner_f.push_back(v);
    }
  }

  // Assemble f = sqrt(rho / rho_start) g exp(scale) in log space, normalized
  // to max |f| = 1.
  const std::size_t count = run.g.size();
  std::vector<double> log_abs(count);
  double log_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) {
    log_abs[i] = run.g[i] == 0.0 ? -std::numeric_limits<double>::infinity()
                                 : 0.5 * std::log(grid.rho[i] / rho_start) +
                                       std::log(std::abs(run.g[i])) + run.log_scale[i];
    log_max = std::max(log_max, log_abs[i]);
  }
  for (double v : inner_f)
    if (v != 0.0) log_max = std::max(log_max, std::log(std::abs(v)));

  sol.rho.reserve(inner_rho.size() + count);
  sol.f.reserve(inner_rho.size() + count);
  for (std::size_t j = 0; j < inner_rho.size(); ++j) {
    sol.rho.push_back(inner_rho[j]);
    sol.f.push_back(inner_f[j] * std::exp(-log_max));
  }
  for (std::size_t i = 0; i < count; ++i) {
    sol.rho.push_back(grid.rho[i]);
    const double mag = std::exp(log_abs[i] - log_max);
    sol.f.push_back(run.g[i] < 0.0 ? -mag : mag);
  }
  sol.node_count = run.node_count + start.inner_nodes;
  sol.outer_mismatch = run.reached_outer ? sol.f.back() : (run.g.back() < 0.0 ? -1.0 : 1.0);
  return sol;
}

/// Nodes of the solution at energy E in (rho_start, rho_max); by Sturm
/// oscillation this is the number of eigenvalues below E.
inline int count_nodes(const EffectivePotential& pot, double E, double rho_max,
                       const RadialOptions& opt = {}) {
  radial::check_energy(E);
  const double kappa_sq = -2.0 * E;
  const double rho_start = radial::start_radius(pot, opt);
  const auto grid = radial::make_grid(pot, rho_start, rho_max, opt, kappa_sq);
  const auto start = radial::inner_state(pot, grid, kappa_sq);
  return radial::integrate(grid, kappa_sq, start, false).node_count + start.inner_nodes;
}

struct SpectrumOptions {
  double tol_E = 1e-9;      ///< relative
  /// Bound states lie below this threshold (0, or the dimer energy).
  double threshold = 0.0;
  RadialOptions radial{};
  unsigned threads = 1;
};

struct BoundState {
  RadialSolution solution;
  bool box_contaminated;
};

struct BoundStateSpectrum {
  std::vector<BoundState> states;  ///< most bound first
  double rho_max;
  double energy_floor;
  double threshold;
  int total_below_threshold;  ///< levels found below threshold before truncation to max_levels
};

namespace radial {

/// States with |E| below this many units of hbar^2/(2 m rho_max^2) feel the
/// outer wall.
inline constexpr double box_factor = 100.0;

inline double search_floor(const EffectivePotential& pot, double rho_max) {
  const double R = pot.R();
  double floor = -10.0 / (2.0 * R * R);
  // Never let the search start above the potential minimum.
  const auto grid = LogGrid::with_density(R, rho_max, 20.0);
  for (double rho : grid.values()) floor = std::min(floor, 1.01 * pot(rho));
  return floor;
}

}  // namespace radial

/// Bound states below `threshold` by node-counting bisection in ln|E|.
/// Level k is the energy at which the node count steps from k to k + 1.
inline BoundStateSpectrum find_spectrum(const EffectivePotential& pot, double rho_max,
                                        int max_levels, const SpectrumOptions& opt = {}) {
  if (pot.regularization() == Regularization::None)
    throw forbidden_request(
        "unregularized potential: the -C/rho^2 attraction supports infinitely many "
        "ever deeper states (Thomas collapse), so the spectrum has no lowest level");
  if (max_levels < 1) throw std::invalid_argument("max_levels must be at least 1");
  if (!(opt.tol_E > 0.0)) throw std::invalid_argument("energy tolerance must be positive");
  if (!(opt.threshold <= 0.0)) throw std::invalid_argument("threshold must be <= 0");
  if (!(rho_max > pot.R())) throw std::invalid_argument("rho_max must exceed R");

  const double box_unit = 1.0 / (2.0 * rho_max * rho_max);
  const double e_floor = std::min(radial::search_floor(pot, rho_max), opt.threshold * 1.5);
  const double e_top = opt.threshold - 1e-6 * box_unit;

  auto nodes_at = [&](double E) { return count_nodes(pot, E, rho_max, opt.radial); };
  const int below_floor = nodes_at(e_floor);
  if (below_floor != 0)
    throw numerical_error("bound states below the search floor " + std::to_string(e_floor));
  const int total = nodes_at(e_top);
  const int levels = std::min(total, max_levels);

  std::vector<double> energies(static_cast<std::size_t>(levels));
  parallel_for(energies.size(), opt.threads, [&](std::size_t k) {
    double deep = std::log(-e_floor);  // node count <= k here
    double shallow = std::log(-e_top);  // node count >= k + 1 here
    while (deep - shallow > opt.tol_E) {
      const double mid = 0.5 * (deep + shallow);
      if (nodes_at(-std::exp(mid)) > static_cast<int>(k))
        shallow = mid;
      else
        deep = mid;
    }
    // The deep end still has exactly k nodes; the eigenvalue is within tol_E.
    energies[k] = -std::exp(deep);
  });

  BoundStateSpectrum out{{}, rho_max, e_floor, opt.threshold, total};
  out.states.reserve(energies.size());
  for (std::size_t k = 0; k < energies.size(); ++k) {
    auto sol = integrate_radial(pot, energies[k], rho_max, opt.radial);
    if (sol.node_count != static_cast<int>(k))
      throw numerical_error("completeness violated: level " + std::to_string(k) + " has " +
                            std::to_string(sol.node_count) + " nodes");
    const bool box = std::abs(energies[k] - opt.threshold) < radial::box_factor * box_unit;
    out.states.push_back({std::move(sol), box});
  }
  return out;
}

/// Node positions of a sampled solution: sign changes, located by linear
/// interpolation in ln(rho).
inline std::vector<double> find_nodes(const RadialSolution& sol) {
  std::vector<double> nodes;
  std::size_t last = sol.f.size();
  for (std::size_t i = 0; i < sol.f.size(); ++i) {
    if (sol.f[i] == 0.0) continue;
    if (last != sol.f.size() && (sol.f[last] < 0.0) != (sol.f[i] < 0.0)) {
      const double t0 = std::log(sol.rho[last]);
      const double t1 = std::log(sol.rho[i]);
      const double w = sol.f[last] / (sol.f[last] - sol.f[i]);
      nodes.push_back(std::exp(t0 + w * (t1 - t0)));
    }
    last = i;
  }
  return nodes;
}

struct NodeAnalysis {
  std::vector<double> positions;  ///< all nodes
  std::vector<double> window;     ///< nodes inside (rho_lo, rho_hi)
  std::vector<double> ratios;     ///< window[k+1] / window[k]
  double mean_ratio;
  double stddev_ratio;
};

/// Geometric-ratio statistics of the nodes inside (rho_lo, rho_hi).
inline NodeAnalysis node_analysis(const RadialSolution& sol, double rho_lo, double rho_hi) {
  NodeAnalysis out;
  out.positions = find_nodes(sol);
  for (double r : out.positions)
    if (r > rho_lo && r < rho_hi) out.window.push_back(r);
  if (out.window.size() < 3)
    throw numerical_error("insufficient nodes: " + std::to_string(out.window.size()) +
                          " inside the scale window, need 3");
  for (std::size_t k = 1; k < out.window.size(); ++k)
    out.ratios.push_back(out.window[k] / out.window[k - 1]);
  const auto ms = stats::mean_std(out.ratios);
  out.mean_ratio = ms.mean;
  out.stddev_ratio = ms.stddev;
  return out;
}

/// Default window: above the regularization scale, below 0.1 min(|a|, 1/kappa).
inline NodeAnalysis interior_node_analysis(const RadialSolution& sol, double R,
                                           double abs_a = std::numeric_limits<double>::infinity()) {
  const double hi = 0.1 * std::min(abs_a, 1.0 / sol.kappa);
  return node_analysis(sol, R, hi);
}

struct ProbePoint {
  int decade;
  double cutoff;
  int node_count;
};

struct CollapseProbe {
  double energy;
  std::vector<ProbePoint> points;
  stats::LinearFit fit;  ///< node count against decade
};

/// Node counts at fixed energy for inner hard walls at R 10^-k, k = 0..decades.
/// For an attractive inverse-square core the count grows without bound, by
/// b ln(10)/pi per decade, whatever happens at the inner boundary.
inline CollapseProbe collapse_probe(const EffectivePotential& pot, double E, double R,
                                    int decades, double rho_max = 0.0,
                                    const RadialOptions& opt = {}, unsigned threads = 1) {
  if (pot.regularization() != Regularization::None)
    throw std::invalid_argument("collapse probe needs an unregularized potential");
  if (decades < 1) throw std::invalid_argument("collapse probe needs at least one decade");
  radial::check_energy(E);
  const double kappa = std::sqrt(-2.0 * E);
  if (rho_max <= 0.0) rho_max = std::max(R, 1.0 / kappa) * 1e4;

  CollapseProbe out{E, std::vector<ProbePoint>(static_cast<std::size_t>(decades) + 1), {}};
  parallel_for(out.points.size(), threads, [&](std::size_t k) {
    RadialOptions o = opt;
    o.inner_cutoff = R * std::pow(10.0, -static_cast<double>(k));
    out.points[k] = {static_cast<int>(k), o.inner_cutoff, count_nodes(pot, E, rho_max, o)};
  });
  std::vector<double> xs, ys;
  for (const auto& p : out.points) {
    xs.push_back(p.decade);
    ys.push_back(p.node_count);
  }
  out.fit = stats::linear_fit(xs, ys);
  return out;
}

}  // namespace efimov

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "efimov_lab/radial.hpp"
#include "oracles.hpp"

using namespace efimov;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

EffectivePotential unitary_potential(Regularization reg, double R, double rho_lo, double rho_hi) {
  const auto grid = LogGrid::with_density(rho_lo, rho_hi, 20.0);
  return effective_potential(tabulate_branch(make_config(inf), grid, 0), reg, R);
}

BoundStateSpectrum unitary_tower(Regularization reg, int levels = 6, unsigned threads = 1) {
  SpectrumOptions opt;
  opt.threads = threads;
  return find_spectrum(unitary_potential(reg, 1.0, 1.0, 1e8), 1e8, levels, opt);
}

// kappa R at the zeros of K_{ib}(kappa R), from a 30-digit evaluation.
constexpr double hardwall_kappa[] = {0.0653754971532035, 0.00287916498239508,
                                     0.000126866726213847};

}  // namespace

TEST(NodeCount, MatchesRk4InRho) {
  const auto pot = unitary_potential(Regularization::HardWall, 1.0, 1.0, 1e4);
  const auto V = [&](oracle::ld rho) { return static_cast<oracle::ld>(pot(static_cast<double>(rho))); };
  for (double E : {-1e-1, -2.1e-3, -1e-4, -3e-6, -1e-7}) {
    RadialOptions opt;
    EXPECT_EQ(count_nodes(pot, E, 1e4, opt), oracle::count_nodes_rk4(V, E, 1.0L, 1e4L, 1e-4L))
        << "E = " << E;
  }
}

TEST(NodeCount, MatchesRk4OffUnitarity) {
  const auto config = make_config(40.0);
  const auto grid = LogGrid::with_density(1.0, 1e4, 20.0);
  const auto pot = effective_potential(tabulate_branch(config, grid, 0), Regularization::HardWall, 1.0);
  const auto V = [&](oracle::ld rho) { return static_cast<oracle::ld>(pot(static_cast<double>(rho))); };
  for (double E : {-1e-1, -1e-3, -2e-5}) {
    EXPECT_EQ(count_nodes(pot, E, 1e4), oracle::count_nodes_rk4(V, E, 1.0L, 1e4L, 1e-4L))
        << "E = " << E;
  }
}

TEST(NodeCount, CapInteriorMatchesRk4) {
  const auto pot = unitary_potential(Regularization::Cap, 1.0, 1.0, 1e4);
  const auto V = [&](oracle::ld rho) { return static_cast<oracle::ld>(pot(static_cast<double>(rho))); };
  for (double E : {-1e-1, -1e-2, -5e-5}) {
    EXPECT_EQ(count_nodes(pot, E, 1e4), oracle::count_nodes_rk4(V, E, 1e-6L, 1e4L, 1e-4L))
        << "E = " << E;
  }
}

TEST(NodeCount, NeverDecreasesWithEnergy) {
  const auto pot = unitary_potential(Regularization::HardWall, 1.0, 1.0, 1e6);
  int prev = 0;
  for (double le = 0.0; le > -30.0; le -= 0.25) {
    const int n = count_nodes(pot, -std::exp(le), 1e6);
    EXPECT_GE(n, prev);
    prev = n;
  }
}

TEST(Spectrum, HardWallMatchesBesselZeros) {
  const auto s = unitary_tower(Regularization::HardWall, 3);
  ASSERT_EQ(s.states.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k)
    EXPECT_NEAR(s.states[k].solution.kappa / hardwall_kappa[k], 1.0, 1e-7);
}

TEST(Spectrum, LevelKHasKNodes) {
  for (auto reg : {Regularization::HardWall, Regularization::Cap}) {
    const auto s = unitary_tower(reg);
    for (std::size_t k = 0; k < s.states.size(); ++k) {
      EXPECT_EQ(s.states[k].solution.node_count, static_cast<int>(k));
      EXPECT_LT(s.states[k].solution.energy, s.threshold);
      if (k) {
        EXPECT_LT(s.states[k - 1].solution.energy, s.states[k].solution.energy);
      }
    }
  }
}

TEST(Spectrum, InteriorRatiosFollowBSpacing) {
  const double want = std::exp(2.0 * std::numbers::pi / efimov_constants().b);
  for (auto reg : {Regularization::HardWall, Regularization::Cap}) {
    const auto s = unitary_tower(reg);
    for (std::size_t k = 1; k + 1 < s.states.size(); ++k) {
      if (s.states[k + 1].box_contaminated) continue;
      EXPECT_NEAR(s.states[k].solution.energy / s.states[k + 1].solution.energy / want, 1.0, 0.02);
    }
  }
}

TEST(Spectrum, ThreadCountDoesNotChangeBits) {
  const auto one = unitary_tower(Regularization::HardWall, 5, 1);
  const auto four = unitary_tower(Regularization::HardWall, 5, 4);
  ASSERT_EQ(one.states.size(), four.states.size());
  for (std::size_t k = 0; k < one.states.size(); ++k)
    EXPECT_EQ(one.states[k].solution.energy, four.states[k].solution.energy);
}

TEST(Spectrum, ScalesAsInverseSquareOfR) {
  SpectrumOptions opt;
  const auto a = find_spectrum(unitary_potential(Regularization::HardWall, 1.0, 1.0, 1e6), 1e6, 3, opt);
  const auto b = find_spectrum(unitary_potential(Regularization::HardWall, 3.0, 3.0, 3e6), 3e6, 3, opt);
  ASSERT_EQ(a.states.size(), b.states.size());
  for (std::size_t k = 0; k < a.states.size(); ++k)
    EXPECT_NEAR(b.states[k].solution.energy * 9.0 / a.states[k].solution.energy, 1.0, 1e-6);
}

TEST(Spectrum, UnregularizedIsForbidden) {
  const auto pot = unitary_potential(Regularization::None, 1.0, 1e-3, 1e3);
  EXPECT_THROW(find_spectrum(pot, 1e3, 3), forbidden_request);
}

TEST(Spectrum, NoTowerWithoutSupercriticalAttraction) {
  const auto grid = LogGrid::with_density(1.0, 1e6, 5.0);
  for (double nu2 : {4.0, 0.01}) {
    const auto pot = effective_potential(constant_branch(grid, nu2), Regularization::HardWall, 1.0);
    EXPECT_EQ(find_spectrum(pot, 1e6, 5).states.size(), 0u) << "nu^2 = " << nu2;
  }
}

TEST(Spectrum, DimerSideStaysBelowThreshold) {
  const auto config = make_config(-1e3);
  const auto grid = LogGrid::with_density(1.0, 1e5, 20.0);
  const auto pot = effective_potential(tabulate_branch(config, grid, 0), Regularization::HardWall, 1.0);
  SpectrumOptions opt;
  opt.threshold = config.dimer_energy();
  const auto s = find_spectrum(pot, 1e5, 10, opt);
  ASSERT_GE(s.states.size(), 2u);
  for (const auto& st : s.states) EXPECT_LT(st.solution.energy, config.dimer_energy());
}

TEST(Nodes, AnalyticLogPeriodicFunction) {
  const double b = efimov_constants().b;
  RadialSolution sol{-1.0, std::sqrt(2.0), 0, {}, {}, 0.0, true};
  const auto grid = LogGrid::with_density(1.0, 1e12, 4000.0);
  for (double rho : grid.values()) {
    sol.rho.push_back(rho);
    sol.f.push_back(std::sqrt(rho) * std::sin(b * std::log(rho)));
  }
  const auto a = node_analysis(sol, 1.0 + 1e-9, 1e12);
  EXPECT_NEAR(a.mean_ratio / std::exp(std::numbers::pi / b), 1.0, 1e-6);
  for (std::size_t k = 0; k < a.window.size(); ++k)
    EXPECT_NEAR(std::log(a.window[k]), (k + 1) * std::numbers::pi / b, 1e-6);
}

TEST(Nodes, TooFewNodesIsAnError) {
  RadialSolution sol{-1.0, std::sqrt(2.0), 0, {1, 2, 3, 4}, {1, -1, 1, 1}, 0.0, true};
  EXPECT_EQ(find_nodes(sol).size(), 2u);
  EXPECT_THROW(node_analysis(sol, 0.5, 10.0), numerical_error);
}

TEST(Nodes, DeepStateIsLogPeriodic) {
  const auto s = unitary_tower(Regularization::HardWall, 5);
  const auto a = interior_node_analysis(s.states[4].solution, 1.0);
  EXPECT_NEAR(a.mean_ratio / std::exp(std::numbers::pi / efimov_constants().b), 1.0, 0.01);
}

TEST(CollapseProbe, SlopeIsUniversal) {
  const double R = 1.0;
  const double want = efimov_constants().b * std::log(10.0) / std::numbers::pi;
  std::vector<double> slopes;
  for (double E : {-1e-4, -1e-3}) {
    const double rho_hi = 1e4 / std::sqrt(-2.0 * E);
    const auto pot = unitary_potential(Regularization::None, R, 1e-60, rho_hi);
    const auto probe = collapse_probe(pot, E, R, 60, rho_hi, {}, 4);
    EXPECT_NEAR(probe.fit.slope / want, 1.0, 0.05);
    EXPECT_GT(probe.fit.r_squared, 0.99);
    slopes.push_back(probe.fit.slope);
  }
  EXPECT_NEAR(slopes[0] / slopes[1], 1.0, 0.01);
}

TEST(CollapseProbe, NeedsUnregularizedPotential) {
  const auto pot = unitary_potential(Regularization::HardWall, 1.0, 1.0, 1e3);
  EXPECT_THROW(collapse_probe(pot, -1e-2, 1.0, 5), std::invalid_argument);
}

TEST(Radial, RejectsNonNegativeEnergy) {
  const auto pot = unitary_potential(Regularization::HardWall, 1.0, 1.0, 1e3);
  EXPECT_THROW(count_nodes(pot, 0.0, 1e3), std::invalid_argument);
  EXPECT_THROW(count_nodes(pot, 1.0, 1e3), std::invalid_argument);
}

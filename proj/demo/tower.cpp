// Efimov tower at unitarity with a hard wall at R = 1, printed next to the
// geometric ratio expected from the hyperangular constant b.

#include <cmath>
#include <cstdio>
#include <numbers>

#include "efimov_lab/efimov_lab.hpp"

int main() {
  using namespace efimov;
  const auto k = efimov_constants();
  std::printf("b = %.12f   C = %.12f\n", k.b, k.C);

  const auto config = make_config(std::numeric_limits<double>::infinity());
  const double R = 1.0, rho_max = 1e8;
  const auto grid = LogGrid::with_density(R, rho_max, 20.0);
  const auto pot = effective_potential(tabulate_branch(config, grid, 0), Regularization::HardWall, R);
  const auto spectrum = find_spectrum(pot, rho_max, 6);

  const double expected = std::exp(2.0 * std::numbers::pi / k.b);
  std::printf("%3s %18s %14s %s\n", "n", "E_n", "E_n/E_{n+1}", "flag");
  const auto& s = spectrum.states;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double e = s[i].solution.energy;
    if (i + 1 < s.size())
      std::printf("%3zu %18.10e %14.6f %s\n", i, e, e / s[i + 1].solution.energy,
                  s[i].box_contaminated ? "box" : "");
    else
      std::printf("%3zu %18.10e %14s %s\n", i, e, "", s[i].box_contaminated ? "box" : "");
  }
  std::printf("expected ratio exp(2 pi / b) = %.6f\n", expected);
}

// efimov-lab: command-line front end.
//
// Exit codes: 0 success, 2 numerical failure or invalid input,
// 3 physically forbidden request (e.g. the spectrum of an unregularized
// potential).

#include <CLI11.hpp>
#include <json.hpp>

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "efimov_lab/efimov_lab.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace efimov;

// ---------------------------------------------------------------------------
// Output plumbing

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.12g}", v);
}

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : columns_(header.size()) { row_strings(header); }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw std::logic_error("csv row width mismatch");
    row_strings(cells);
  }

  const std::string& str() const { return body_; }

 private:
  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) body_ += ',';
      body_ += cells[i];
    }
    body_ += '\n';
  }

  std::size_t columns_;
  std::string body_;
};

std::string timestamp() {
  std::time_t t;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"))
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  else
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Common {
  std::string format = "csv";
  double tol = default_tol;
  int threads = 0;  // 0: EFIMOV_LAB_THREADS or 1
  std::string output;
  std::string summary;
  std::string length_unit = "R";

  unsigned thread_count() const {
    return threads > 0 ? static_cast<unsigned>(threads) : threads_from_env();
  }
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app->add_option("--tol", c.tol, "Root residual tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--threads", c.threads,
                  "Worker threads (default: EFIMOV_LAB_THREADS, else 1)")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--output,-o", c.output, "Write the main output here instead of stdout");
  app->add_option("--summary", c.summary,
                  "CSV mode: write the JSON manifest/summary here (default: <output>.json, "
                  "or stderr)");
}

json manifest(const std::string& command, json parameters, const Common& c) {
  json m;
  m["command"] = command;
  m["parameters"] = std::move(parameters);
  m["tolerances"] = {{"tol", c.tol}};
  m["units"] = {{"hbar", 1}, {"m", 1}, {"length_unit", c.length_unit}};
  m["threads"] = c.thread_count();
  m["version"] = efimov::version;
  m["timestamp"] = timestamp();
  return m;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << text;
}

/// CSV body to --output/stdout; `side` (manifest + summary) to --summary,
/// <output>.json, or stderr. JSON mode: one document holding `data` and the
/// manifest.
void emit(const Common& c, const Csv& csv, json data, json side) {
  if (c.format == "json") {
    write_text(c.output, data.dump(2) + "\n");
    return;
  }
  write_text(c.output, csv.str());
  const std::string side_text = side.dump(2) + "\n";
  if (!c.summary.empty())
    write_text(c.summary, side_text);
  else if (!c.output.empty())
    write_text(c.output + ".json", side_text);
  else
    std::cerr << side_text;
}

// ---------------------------------------------------------------------------
// Shared parsing helpers

double parse_length(const std::string& s) {
  if (s == "inf" || s == "+inf" || s == "infinity" || s == "unitarity")
    return std::numeric_limits<double>::infinity();
  if (s == "-inf" || s == "-infinity") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("cannot parse length '" + s + "'");
  return v;
}

Regularization parse_regularization(const std::string& s) {
  if (s == "none") return Regularization::None;
  if (s == "hardwall") return Regularization::HardWall;
  return Regularization::Cap;
}

LengthUnit parse_unit(const std::string& s) { return s == "abs_a" ? LengthUnit::abs_a : LengthUnit::R; }

const auto regularization_names = CLI::IsMember({"none", "hardwall", "cap"});

struct PhysicsArgs {
  std::string a = "inf";
  double mu = identical_reduced_mass;
  double R = 1.0;
};

void add_physics(CLI::App* app, PhysicsArgs& p, Common& c) {
  app->add_option("--a", p.a, "Scattering length (number, or inf for unitarity)")
      ->capture_default_str();
  app->add_option("--mu", p.mu, "Pair reduced mass in units of m")->capture_default_str();
  app->add_option("--R", p.R, "Regularization scale")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--length-unit", c.length_unit, "Reporting unit for lengths and energies")
      ->check(CLI::IsMember({"R", "abs_a"}))
      ->capture_default_str();
}

json physics_json(const PhysicsArgs& p) {
  return {{"a", p.a}, {"mu", p.mu}, {"R", p.R}};
}

// ---------------------------------------------------------------------------
// constants

struct ConstantsCmd {
  Common common = [] {
    Common c;
    c.format = "json";
    return c;
  }();
};

int run_constants(const ConstantsCmd& cmd) {
  const auto k = efimov_constants(cmd.common.tol);
  const json m = manifest("constants", json::object(), cmd.common);
  json doc;
  doc["b"] = k.b;
  doc["C"] = k.C;
  doc["residual"] = k.residual;
  doc["manifest"] = m;
  Csv csv({"b", "C", "residual"});
  csv.row({num(k.b), num(k.C), num(k.residual)});
  emit(cmd.common, csv, doc, {{"manifest", m}});
  return 0;
}

// ---------------------------------------------------------------------------
// potential

struct PotentialCmd {
  Common common;
  PhysicsArgs phys;
  double rho_min = 1e-3;
  double rho_max = 1e3;
  std::size_t points = 200;
  int branch = 0;
  std::string regularization = "none";
};

int run_potential(const PotentialCmd& cmd) {
  const auto& c = cmd.common;
  const auto config = make_config(parse_length(cmd.phys.a), cmd.phys.mu, parse_unit(c.length_unit));
  const UnitSystem units = UnitSystem::for_config(config, cmd.phys.R);
  const LogGrid grid(cmd.rho_min, cmd.rho_max, cmd.points);
  auto branch = tabulate_branch(config, grid, cmd.branch, c.tol, c.thread_count());
  const auto pot = effective_potential(branch, parse_regularization(cmd.regularization), cmd.phys.R);

  Csv csv({"rho", "x", "nu_squared", "lambda", "v_eff"});
  json rows = json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double rho = grid[i];
    if (pot.regularization() == Regularization::HardWall && rho < pot.R()) continue;
    const double s = branch.nu_squared[i];
    const double x = config.x_of_rho(rho);
    const double v = pot(rho);
    const double rho_out = units.length_from_internal(rho);
    const double v_out = units.energy_from_internal(v);
    csv.row({num(rho_out), num(x), num(s), num(s - 4.0), num(v_out)});
    rows.push_back({{"rho", rho_out}, {"x", x}, {"nu_squared", s}, {"lambda", s - 4.0},
                    {"v_eff", v_out}});
  }
  json params = physics_json(cmd.phys);
  params["rho_min"] = cmd.rho_min;
  params["rho_max"] = cmd.rho_max;
  params["points"] = cmd.points;
  params["branch"] = cmd.branch;
  params["regularization"] = cmd.regularization;
  const json m = manifest("potential", params, c);
  emit(c, csv, {{"rows", rows}, {"manifest", m}}, {{"manifest", m}});
  return 0;
}

// ---------------------------------------------------------------------------
// spectrum

struct SpectrumCmd {
  Common common;
  PhysicsArgs phys;
  double rho_max = 1e8;
  int levels = 10;
  std::string regularization = "hardwall";
  double tol_e = 1e-9;
  double step = 0.005;
  double points_per_efold = 20.0;
};

struct SpectrumRun {
  SystemConfig config;
  BoundStateSpectrum spectrum;
};

EffectivePotential build_potential(const SystemConfig& config, double R, double rho_lo,
                                   double rho_hi, double points_per_efold, Regularization reg,
                                   double tol, unsigned threads) {
  const auto grid = LogGrid::with_density(rho_lo, rho_hi, points_per_efold);
  return effective_potential(tabulate_branch(config, grid, 0, tol, threads), reg, R);
}

SpectrumRun compute_spectrum(const SpectrumCmd& cmd) {
  const auto& c = cmd.common;
  const auto config = make_config(parse_length(cmd.phys.a), cmd.phys.mu, parse_unit(c.length_unit));
  const auto reg = parse_regularization(cmd.regularization);
  if (reg == Regularization::None)
    throw forbidden_request(
        "unregularized potential: at small rho the adiabatic potential is -C/rho^2 with "
        "C > 1/4, whose solutions oscillate as sqrt(rho) exp(+-i b ln rho) with infinitely "
        "many nodes toward rho = 0 at any energy. Infinitely many ever deeper three-body "
        "states exist (Thomas collapse); introduce a scale R with --regularization "
        "hardwall or cap.");
  const auto pot = build_potential(config, cmd.phys.R, cmd.phys.R, cmd.rho_max,
                                   cmd.points_per_efold, reg, c.tol, c.thread_count());
  SpectrumOptions opt;
  opt.tol_E = cmd.tol_e;
  opt.threshold = config.dimer_energy();
  opt.radial.step = cmd.step;
  opt.threads = c.thread_count();
  return {config, find_spectrum(pot, cmd.rho_max, cmd.levels, opt)};
}

json spectrum_params(const SpectrumCmd& cmd) {
  json params = physics_json(cmd.phys);
  params["rho_max"] = cmd.rho_max;
  params["levels"] = cmd.levels;
  params["regularization"] = cmd.regularization;
  params["tol_e"] = cmd.tol_e;
  params["step"] = cmd.step;
  params["points_per_efold"] = cmd.points_per_efold;
  return params;
}

int run_spectrum(const SpectrumCmd& cmd) {
  const auto& c = cmd.common;
  const auto run = compute_spectrum(cmd);
  const UnitSystem units = UnitSystem::for_config(run.config, cmd.phys.R);
  const auto& states = run.spectrum.states;

  Csv csv({"n", "E_n", "kappa_n", "node_count", "ratio_to_next", "flag"});
  json levels = json::array();
  std::vector<double> interior;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const auto& s = states[k];
    const double e = units.energy_from_internal(s.solution.energy);
    const double kappa = s.solution.kappa * units.length_scale();
    std::optional<double> ratio;
    if (k + 1 < states.size()) ratio = s.solution.energy / states[k + 1].solution.energy;
    const std::string flag = s.box_contaminated ? "box" : "ok";
    csv.row({std::to_string(k), num(e), num(kappa), std::to_string(s.solution.node_count),
             ratio ? num(*ratio) : std::string(), flag});
    json row = {{"n", k}, {"E_n", e}, {"kappa_n", kappa},
                {"node_count", s.solution.node_count}};
    row["ratio_to_next"] = ratio ? json(*ratio) : json(nullptr);
    row["flag"] = flag;
    levels.push_back(row);
    if (ratio && k >= 1 && !s.box_contaminated && !states[k + 1].box_contaminated)
      interior.push_back(*ratio);
  }
  const double b = efimov_constants().b;
  json summary = {{"levels_found", states.size()},
                  {"levels_below_threshold", run.spectrum.total_below_threshold},
                  {"threshold", units.energy_from_internal(run.spectrum.threshold)},
                  {"energy_floor", units.energy_from_internal(run.spectrum.energy_floor)},
                  {"reference_ratio", std::exp(2.0 * std::numbers::pi / b)}};
  summary["interior_ratio_mean"] =
      interior.empty() ? json(nullptr) : json(stats::mean_std(interior).mean);
  const json m = manifest("spectrum", spectrum_params(cmd), c);
  emit(c, csv, {{"levels", levels}, {"summary", summary}, {"manifest", m}},
       {{"summary", summary}, {"manifest", m}});
  return 0;
}

// ---------------------------------------------------------------------------
// nodes

struct NodesCmd {
  SpectrumCmd spectrum;
  int level = -1;  // -1: deepest level not touching the outer wall
  bool analytic = false;
  bool probe = false;
  std::vector<double> energies;
  int decades = 60;
};

int nodes_level(const NodesCmd& cmd) {
  const auto& c = cmd.spectrum.common;
  const double b = efimov_constants().b;
  const double reference = std::exp(std::numbers::pi / b);
  RadialSolution sol;
  double R = cmd.spectrum.phys.R;
  double abs_a = std::numeric_limits<double>::infinity();
  json params = spectrum_params(cmd.spectrum);

  if (cmd.analytic) {
    // f = sqrt(rho) sin(b ln rho) on a fine log grid over 8 periods.
    const LogGrid grid = LogGrid::with_density(1.0, std::exp(8.0 * std::numbers::pi / b) * 1.5, 4000);
    sol = {-1.0, std::sqrt(2.0), 0, {}, {}, 0.0, true};
    for (double rho : grid.values()) {
      sol.rho.push_back(rho);
      sol.f.push_back(std::sqrt(rho) * std::sin(b * std::log(rho)));
    }
    R = 1.0 + 1e-9;  // the zero at rho = 1 is the boundary, not a node
    params = {{"mode", "analytic"}};
  } else {
    const auto run = compute_spectrum(cmd.spectrum);
    const auto& states = run.spectrum.states;
    if (!run.config.unitary()) abs_a = std::abs(run.config.scattering_length());
    int level = cmd.level;
    if (level < 0) {
      for (std::size_t k = 0; k < states.size(); ++k)
        if (!states[k].box_contaminated) level = static_cast<int>(k);
    }
    if (level < 0 || level >= static_cast<int>(states.size()))
      throw numerical_error("requested level does not exist");
    sol = states[static_cast<std::size_t>(level)].solution;
    params["level"] = level;
  }

  NodeAnalysis analysis;
  if (cmd.analytic)
    analysis = node_analysis(sol, R, std::numeric_limits<double>::infinity());
  else
    analysis = interior_node_analysis(sol, R, abs_a);

  const UnitSystem units(cmd.analytic ? 1.0 : cmd.spectrum.phys.R);
  Csv csv({"k", "rho_k", "ratio"});
  json nodes = json::array();
  for (std::size_t k = 0; k < analysis.window.size(); ++k) {
    const double rho = units.length_from_internal(analysis.window[k]);
    std::optional<double> ratio;
    if (k > 0) ratio = analysis.ratios[k - 1];
    csv.row({std::to_string(k), num(rho), ratio ? num(*ratio) : std::string()});
    json row = {{"k", k}, {"rho_k", rho}};
    row["ratio"] = ratio ? json(*ratio) : json(nullptr);
    nodes.push_back(row);
  }
  json summary = {{"mode", cmd.analytic ? "analytic" : "level"},
                  {"nodes_total", analysis.positions.size()},
                  {"nodes_in_window", analysis.window.size()},
                  {"fitted_ratio", analysis.mean_ratio},
                  {"ratio_stddev", analysis.stddev_ratio},
                  {"reference_ratio", reference},
                  {"energy", sol.energy}};
  const json m = manifest("nodes", params, c);
  emit(c, csv, {{"nodes", nodes}, {"summary", summary}, {"manifest", m}},
       {{"summary", summary}, {"manifest", m}});
  return 0;
}

int nodes_probe(const NodesCmd& cmd) {
  const auto& c = cmd.spectrum.common;
  const auto config =
      make_config(parse_length(cmd.spectrum.phys.a), cmd.spectrum.phys.mu, parse_unit(c.length_unit));
  const double R = cmd.spectrum.phys.R;
  const double b = efimov_constants().b;
  std::vector<double> energies = cmd.energies;
  if (energies.empty()) energies = {-1e-4 / (R * R)};

  Csv csv({"k", "rho_cutoff", "energy", "node_count"});
  json probe = json::array();
  json fits = json::array();
  for (double E : energies) {
    const double kappa = std::sqrt(-2.0 * E);
    const double rho_hi = std::max(R, 1.0 / kappa) * 1e4;
    const double rho_lo = R * std::pow(10.0, -cmd.decades);
    auto pot = build_potential(config, R, rho_lo, rho_hi, cmd.spectrum.points_per_efold,
                               Regularization::None, c.tol, c.thread_count());
    RadialOptions opt;
    opt.step = cmd.spectrum.step;
    const auto result = collapse_probe(pot, E, R, cmd.decades, rho_hi, opt, c.thread_count());
    for (const auto& p : result.points) {
      csv.row({std::to_string(p.decade), num(p.cutoff / R), num(E * R * R),
               std::to_string(p.node_count)});
      probe.push_back({{"k", p.decade}, {"rho_cutoff", p.cutoff / R}, {"energy", E * R * R},
                       {"node_count", p.node_count}});
    }
    fits.push_back({{"energy", E * R * R}, {"slope_per_decade", result.fit.slope},
                    {"intercept", result.fit.intercept}, {"r_squared", result.fit.r_squared}});
  }
  json summary = {{"mode", "probe"},
                  {"fits", fits},
                  {"reference_slope", b * std::log(10.0) / std::numbers::pi}};
  json params = physics_json(cmd.spectrum.phys);
  params["energies"] = energies;
  params["decades"] = cmd.decades;
  params["step"] = cmd.spectrum.step;
  const json m = manifest("nodes", params, c);
  emit(c, csv, {{"probe", probe}, {"summary", summary}, {"manifest", m}},
       {{"summary", summary}, {"manifest", m}});
  return 0;
}

// ---------------------------------------------------------------------------
// meanfield

struct MeanfieldCmd {
  Common common;
  std::string statistics = "fermi";
  double t0 = -1.0;
  std::string stabilizer = "none";
  double t3 = 0.0;
  double alpha = 1.0;
  std::optional<double> c3;
  double n_max = 10.0;
  std::size_t points = 200;
};

int run_meanfield(const MeanfieldCmd& cmd) {
  const auto& c = cmd.common;
  MatterModel model;
  model.statistics = cmd.statistics == "bose" ? Statistics::Bose : Statistics::Fermi;
  model.t0 = cmd.t0;
  model.stabilizer = cmd.stabilizer == "three-body"          ? StabilizerKind::ThreeBody
                     : cmd.stabilizer == "density-dependent" ? StabilizerKind::DensityDependent
                                                              : StabilizerKind::None;
  model.t3 = cmd.t3;
  model.alpha = cmd.alpha;
  model.c3 = cmd.c3.value_or(default_c3(model.stabilizer));
  if (!(cmd.n_max > 0.0)) throw std::invalid_argument("n-max must be positive");
  if (cmd.points < 2) throw std::invalid_argument("points must be at least 2");

  const auto report = classify_stability(model);
  Csv csv({"n", "epsilon", "epsilon_per_particle"});
  json rows = json::array();
  for (std::size_t i = 1; i <= cmd.points; ++i) {
    const double n = cmd.n_max * static_cast<double>(i) / static_cast<double>(cmd.points);
    const double e = energy_density(model, n);
    const double epp = energy_per_particle(model, n);
    csv.row({num(n), num(e), num(epp)});
    rows.push_back({{"n", n}, {"epsilon", e}, {"epsilon_per_particle", epp}});
  }
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json rep = {{"classification", std::string(to_string(report.classification))},
              {"n_sat", opt(report.n_sat)},
              {"e_min", opt(report.e_min)},
              {"energy_per_particle", opt(report.energy_per_particle)},
              {"caveat", std::string(report.caveat)},
              {"note", std::string(stabilizer_prefactor_note)}};
  json params = {{"statistics", cmd.statistics}, {"t0", cmd.t0},
                 {"stabilizer", cmd.stabilizer}, {"t3", cmd.t3},
                 {"alpha", cmd.alpha},           {"c3", model.c3},
                 {"n_max", cmd.n_max},           {"points", cmd.points}};
  const json m = manifest("meanfield", params, c);
  emit(c, csv, {{"rows", rows}, {"report", rep}, {"manifest", m}},
       {{"report", rep}, {"manifest", m}});
  return 0;
}

// ---------------------------------------------------------------------------
// branches

struct BranchesCmd {
  Common common;
  PhysicsArgs phys;
  std::optional<double> x;
  double rho = 1.0;
  int count = 3;
};

int run_branches(const BranchesCmd& cmd) {
  const auto& c = cmd.common;
  double x;
  if (cmd.x) {
    x = *cmd.x;
  } else {
    const auto config = make_config(parse_length(cmd.phys.a), cmd.phys.mu);
    x = config.x_of_rho(cmd.rho);
  }
  const auto roots = solve_branches(x, cmd.count, c.tol);
  Csv csv({"branch", "nu_squared", "lambda", "residual"});
  json rows = json::array();
  for (const auto& r : roots) {
    csv.row({std::to_string(r.branch_index), num(r.value), num(r.lambda()), num(r.residual)});
    rows.push_back({{"branch", r.branch_index}, {"nu_squared", r.value},
                    {"lambda", r.lambda()}, {"residual", r.residual}});
  }
  json params = physics_json(cmd.phys);
  params["x"] = x;
  params["count"] = cmd.count;
  const json m = manifest("branches", params, c);
  emit(c, csv, {{"x", x}, {"branches", rows}, {"manifest", m}}, {{"manifest", m}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"efimov-lab: three-body zero-range collapse and mean-field stability"};
  app.set_version_flag("--version", std::string(efimov::version));
  app.require_subcommand(1);

  ConstantsCmd constants;
  auto* c_cmd = app.add_subcommand("constants", "Universal constants b and C = b^2 + 1/4");
  add_common(c_cmd, constants.common);

  PotentialCmd potential;
  auto* p_cmd = app.add_subcommand("potential", "Tabulate nu^2(rho) and the adiabatic potential");
  add_common(p_cmd, potential.common);
  add_physics(p_cmd, potential.phys, potential.common);
  p_cmd->add_option("--rho-min", potential.rho_min)->check(CLI::PositiveNumber)->capture_default_str();
  p_cmd->add_option("--rho-max", potential.rho_max)->check(CLI::PositiveNumber)->capture_default_str();
  p_cmd->add_option("--points", potential.points)->capture_default_str();
  p_cmd->add_option("--branch", potential.branch)->check(CLI::NonNegativeNumber)->capture_default_str();
  p_cmd->add_option("--regularization", potential.regularization)
      ->check(regularization_names)
      ->capture_default_str();

  SpectrumCmd spectrum;
  auto* s_cmd = app.add_subcommand("spectrum", "Bound-state tower of the regularized potential");
  auto add_spectrum_options = [](CLI::App* cmd, SpectrumCmd& s) {
    add_common(cmd, s.common);
    add_physics(cmd, s.phys, s.common);
    cmd->add_option("--rho-max", s.rho_max, "Outer wall")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--levels", s.levels)->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--regularization,--scheme", s.regularization)
        ->check(regularization_names)
        ->capture_default_str();
    cmd->add_option("--tol-e", s.tol_e, "Relative energy tolerance")->capture_default_str();
    cmd->add_option("--step", s.step, "Radial step in ln(rho)")->capture_default_str();
    cmd->add_option("--points-per-efold", s.points_per_efold, "Branch tabulation density")
        ->capture_default_str();
  };
  add_spectrum_options(s_cmd, spectrum);

  NodesCmd nodes;
  auto* n_cmd = app.add_subcommand("nodes", "Node positions and log-periodicity");
  add_spectrum_options(n_cmd, nodes.spectrum);
  n_cmd->add_option("--level", nodes.level, "Level to analyse (default: deepest clean level)");
  n_cmd->add_flag("--analytic", nodes.analytic, "Self-test on sqrt(rho) sin(b ln rho)");
  n_cmd->add_flag("--probe", nodes.probe, "Fixed-energy node counts vs inner cutoff");
  n_cmd->add_option("--energy", nodes.energies, "Probe energies (repeatable)");
  n_cmd->add_option("--decades", nodes.decades, "Probe cutoffs R 10^-k, k = 0..decades")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  MeanfieldCmd meanfield;
  auto* m_cmd = app.add_subcommand("meanfield", "Homogeneous-matter equation of state");
  add_common(m_cmd, meanfield.common);
  m_cmd->add_option("--statistics", meanfield.statistics)
      ->check(CLI::IsMember({"bose", "fermi"}))
      ->capture_default_str();
  m_cmd->add_option("--t0", meanfield.t0)->capture_default_str();
  m_cmd->add_option("--stabilizer", meanfield.stabilizer)
      ->check(CLI::IsMember({"none", "three-body", "density-dependent"}))
      ->capture_default_str();
  m_cmd->add_option("--t3", meanfield.t3)->capture_default_str();
  m_cmd->add_option("--alpha", meanfield.alpha)->capture_default_str();
  m_cmd->add_option("--c3", meanfield.c3, "Stabilizer prefactor (default 1/6 or 1/16)");
  m_cmd->add_option("--n-max", meanfield.n_max)->capture_default_str();
  m_cmd->add_option("--points", meanfield.points)->capture_default_str();

  BranchesCmd branches;
  auto* b_cmd = app.add_subcommand("branches", "Lowest roots nu^2 at fixed x");
  add_common(b_cmd, branches.common);
  add_physics(b_cmd, branches.phys, branches.common);
  b_cmd->add_option("--x", branches.x, "x = rho / (sqrt(mu) a); overrides --a/--rho");
  b_cmd->add_option("--rho", branches.rho)->check(CLI::PositiveNumber)->capture_default_str();
  b_cmd->add_option("--count", branches.count)->check(CLI::PositiveNumber)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_cmd->parsed()) return run_constants(constants);
    if (p_cmd->parsed()) return run_potential(potential);
    if (s_cmd->parsed()) return run_spectrum(spectrum);
    if (n_cmd->parsed()) return nodes.probe ? nodes_probe(nodes) : nodes_level(nodes);
    if (m_cmd->parsed()) return run_meanfield(meanfield);
    if (b_cmd->parsed()) return run_branches(branches);
  } catch (const forbidden_request& e) {
    std::cerr << "efimov-lab: " << e.what() << "\n";
    return 3;
  } catch (const numerical_error& e) {
    std::cerr << "efimov-lab: numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "efimov-lab: invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "efimov-lab: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

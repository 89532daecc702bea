#include "cavphase/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <locale>
#include <numbers>
#include <random>
#include <sstream>

#include "cavphase/protocol.hpp"

namespace cavphase::experiments {

namespace {

using protocol::GateAngles;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  in.imbue(std::locale::classic());
  double v = 0.0;
  in >> v;
  if (in.fail() || !in.eof() || !std::isfinite(v)) {
    throw ConfigError("config: " + key + ": not a number: '" + text + "'");
  }
  return v;
}

long long parse_integer(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw ConfigError("config: " + key + ": not an integer: '" + text + "'");
  }
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  const long long v = parse_integer(key, text);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError("config: " + key + ": out of range: '" + text + "'");
  }
  return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "on" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "off" || text == "no" || text == "0") return false;
  throw ConfigError("config: " + key + ": expected true or false, got '" + text + "'");
}

std::vector<double> parse_doubles(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const std::string& item : split_list(text)) out.push_back(parse_double(key, item));
  return out;
}

std::vector<int> parse_ints(const std::string& key, const std::string& text) {
  std::vector<int> out;
  for (const std::string& item : split_list(text)) out.push_back(parse_int(key, item));
  return out;
}

void check(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("config: " + what);
}

double rate(double lifetime) { return lifetime > 0.0 ? 1.0 / lifetime : 0.0; }

protocol::SimulationMode fig5_mode(const SweepConfig& cfg) {
  protocol::SimulationMode mode = protocol::SimulationMode::lossy();
  mode.include_transport_decay = cfg.transport_decay;
  mode.transport_event_count = cfg.transport_events;
  mode.evolution = cfg.evolution;
  return mode;
}

StateVector fig5_initial(const SweepConfig& cfg) {
  return protocol::uniform_superposition(cfg.targets, cfg.fock_cutoff);
}

StateVector fig5_ideal(const SweepConfig& cfg, const model::PhysicalParams& p) {
  const SpaceLayout q = protocol::qubit_layout(cfg.targets);
  const Vector plus =
      Vector::Constant(q.total_dim(), 1.0 / std::sqrt(static_cast<double>(q.total_dim())));
  const Operator gate = protocol::ideal_gate_operator(protocol::gate_angles(p), cfg.targets);
  return protocol::embed_qubits(gate.apply(StateVector(q, plus)), cfg.fock_cutoff);
}

std::string basis_label(const SpaceLayout& q, Eigen::Index i) {
  std::string s = "|";
  for (std::size_t k = 0; k < q.subsystem_count(); ++k) s += std::to_string(q.digit(i, k));
  return s + ">";
}

std::string angles_label(const GateAngles& a) {
  std::string s = "theta=(";
  for (int k = 0; k < a.size(); ++k) {
    if (k) s += ", ";
    s += format_number(a[static_cast<std::size_t>(k)]);
  }
  return s + ")";
}

// Gate check for one angle set: every computational basis input, one common
// global phase.
void check_angles(const GateAngles& angles, int n, double tol, GateCheckReport& report) {
  const model::PhysicalParams p = protocol::effective_parameters(angles, 1.0);
  const SpaceLayout q = protocol::qubit_layout(n);
  const Operator gate = protocol::ideal_gate_operator(angles, n);
  const Eigen::Index dim = q.total_dim();
  const Eigen::Index full = model::system_layout(n, p.fock_cutoff, true).total_dim();
  Vector expected(dim * full), got(dim * full);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const Vector basis = Vector::Unit(dim, i);
    const StateVector in = protocol::embed_qubits(StateVector(q, basis), p.fock_cutoff);
    const auto result =
        protocol::run_protocol(in, p, model::NoiseRates{}, protocol::SimulationMode::ideal());
    got.segment(i * full, full) = result.pure().amplitudes();
    expected.segment(i * full, full) =
        protocol::embed_qubits(StateVector(q, gate.matrix() * basis), p.fock_cutoff).amplitudes();
  }
  const double err = protocol::max_error_up_to_phase(expected, got);
  report.max_error = std::max(report.max_error, err);
  ++report.cases;
  if (!(err < tol)) {
    // Name the input with the largest deviation under the common phase.
    const Complex overlap = expected.dot(got);
    const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex(1.0);
    Eigen::Index worst = 0;
    double worst_err = -1.0;
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double e =
          (got.segment(i * full, full) - phase * expected.segment(i * full, full))
              .cwiseAbs()
              .maxCoeff();
      if (e > worst_err) {
        worst_err = e;
        worst = i;
      }
    }
    report.failures.push_back({"n=" + std::to_string(n) + " " + angles_label(angles), false,
                               "input " + basis_label(q, worst) + " error " +
                                   format_number(worst_err)});
  }
}

CheckResult pass_fail(std::string name, bool ok, std::string detail) {
  return {std::move(name), ok, std::move(detail)};
}

}  // namespace

Experiment parse_experiment(const std::string& name) {
  if (name == "fig4") return Experiment::kFig4;
  if (name == "fig5") return Experiment::kFig5;
  if (name == "gate-check") return Experiment::kGateCheck;
  if (name == "validate") return Experiment::kValidate;
  throw ConfigError("config: unknown experiment '" + name + "'");
}

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::kFig4: return "fig4";
    case Experiment::kFig5: return "fig5";
    case Experiment::kGateCheck: return "gate-check";
    case Experiment::kValidate: return "validate";
  }
  return "?";
}

void SweepConfig::validate() const {
  check(!n_values.empty(), "n_values must not be empty");
  for (int n : n_values) check(n >= 1, "n_values must be >= 1");
  check(theta_points >= 2, "theta_points must be >= 2");
  check(deviation > 0.0 && deviation < 2.0, "deviation must lie in (0, 2)");
  check(!b_values.empty(), "b_values must not be empty");
  for (double b : b_values) check(b > 0.0, "b_values must be > 0");
  check(targets >= 1 && targets <= 4, "targets must be between 1 and 4");
  check(fock_cutoff >= 2 && fock_cutoff <= 4, "fock_cutoff must be between 2 and 4");
  for (double l : {cavity_lifetime, level1_lifetime, level2_lifetime, level3_lifetime}) {
    check(l >= 0.0, "lifetimes must be >= 0 (0 disables the channel)");
  }
  check(tau_m >= 0.0, "tau_m must be >= 0");
  check(transport_events >= 0, "transport_events must be >= 0");
  try {
    evolution.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (double b : convergence_b) check(b > 0.0, "convergence_b must be > 0");
  check(!gate_n.empty(), "gate_n must not be empty");
  for (int n : gate_n) check(n >= 1 && n <= 3, "gate_n values must be between 1 and 3");
  check(draws >= 0, "draws must be >= 0");
  check(tolerance > 0.0, "tolerance must be > 0");
  check(validate_b > 0.0, "validate_b must be > 0");
}

void apply_setting(SweepConfig& cfg, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key == "experiment") {
    cfg.experiment = parse_experiment(value);
  } else if (key == "output") {
    cfg.output = value;
  } else if (key == "n_values") {
    cfg.n_values = parse_ints(key, value);
  } else if (key == "theta_points") {
    cfg.theta_points = parse_int(key, value);
  } else if (key == "deviation") {
    cfg.deviation = parse_double(key, value);
  } else if (key == "b_values") {
    cfg.b_values = parse_doubles(key, value);
  } else if (key == "targets") {
    cfg.targets = parse_int(key, value);
  } else if (key == "fock_cutoff") {
    cfg.fock_cutoff = parse_int(key, value);
  } else if (key == "cavity_lifetime") {
    cfg.cavity_lifetime = parse_double(key, value);
  } else if (key == "level1_lifetime") {
    cfg.level1_lifetime = parse_double(key, value);
  } else if (key == "level2_lifetime") {
    cfg.level2_lifetime = parse_double(key, value);
  } else if (key == "level3_lifetime") {
    cfg.level3_lifetime = parse_double(key, value);
  } else if (key == "tau_m") {
    cfg.tau_m = parse_double(key, value);
  } else if (key == "transport_decay") {
    cfg.transport_decay = parse_bool(key, value);
  } else if (key == "transport_events") {
    cfg.transport_events = parse_int(key, value);
  } else if (key == "integrator") {
    if (value == "rk4") {
      cfg.evolution = dynamics::EvolutionConfig{};
    } else if (value == "taylor") {
      cfg.evolution = dynamics::EvolutionConfig::taylor();
    } else {
      throw ConfigError("config: integrator: expected rk4 or taylor, got '" + value + "'");
    }
  } else if (key == "max_phase_per_step") {
    cfg.evolution.max_phase_per_step = parse_double(key, value);
  } else if (key == "dt") {
    cfg.evolution.dt = parse_double(key, value);
  } else if (key == "taylor_order") {
    cfg.evolution.taylor_order = parse_int(key, value);
  } else if (key == "convergence_b") {
    cfg.convergence_b = parse_doubles(key, value);
  } else if (key == "gate_n") {
    cfg.gate_n = parse_ints(key, value);
  } else if (key == "draws") {
    cfg.draws = parse_int(key, value);
  } else if (key == "seed") {
    const long long s = parse_integer(key, value);
    check(s >= 0, "seed must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(s);
  } else if (key == "tolerance") {
    cfg.tolerance = parse_double(key, value);
  } else if (key == "validate_b") {
    cfg.validate_b = parse_double(key, value);
  } else if (key == "validate_dissipative") {
    cfg.validate_dissipative = parse_bool(key, value);
  } else {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

void apply_config_text(SweepConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: line " + std::to_string(number) + ": expected key = value");
    }
    apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
}

void apply_config_file(SweepConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  apply_config_text(cfg, text.str());
}

model::PhysicalParams fig5_parameters(const SweepConfig& cfg, double b) {
  model::PhysicalParams p =
      model::reference_parameters(b, cfg.deviation, cfg.targets, cfg.fock_cutoff);
  p.tau_m = cfg.tau_m;
  return p;
}

model::NoiseRates fig5_noise(const SweepConfig& cfg) {
  model::NoiseRates r;
  r.kappa = rate(cfg.cavity_lifetime);
  for (model::DecayPath path : model::kDecayPaths) {
    switch (model::upper_level(path)) {
      case 3: r[path] = rate(cfg.level3_lifetime); break;
      case 2: r[path] = rate(cfg.level2_lifetime); break;
      default: r[path] = rate(cfg.level1_lifetime); break;
    }
  }
  return r;
}

std::string format_number(double v) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out.precision(12);
  out << v;
  return out.str();
}

void write_csv(const Table& table, std::ostream& out) {
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    out << (i ? "," : "") << table.header[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
}

std::vector<double> theta_grid(int points) {
  if (points < 2) throw ConfigError("theta grid needs at least 2 points");
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = kTwoPi * i / (points - 1);
  return out;
}

Table run_fig4(const SweepConfig& cfg) {
  cfg.validate();
  std::vector<int> ns = cfg.n_values;
  std::sort(ns.begin(), ns.end());
  const std::vector<double> thetas = theta_grid(cfg.theta_points);
  Table table{{"n", "theta", "fidelity"}, {}};
  for (int n : ns) {
    const protocol::ProductInput input = protocol::ProductInput::uniform(n);
    for (double theta : thetas) {
      const GateAngles angles = GateAngles::uniform(n, theta);
      const model::PhysicalParams p = protocol::effective_parameters(angles, cfg.deviation);
      const protocol::BranchProductState out =
          protocol::branch_product_final_state(p, angles, input);
      const protocol::BranchProductState ideal = protocol::ideal_branch_state(angles, input);
      const double f = std::norm(ideal.overlap(out)) /
                       (std::abs(ideal.overlap(ideal)) * std::abs(out.overlap(out)));
      table.rows.push_back({static_cast<double>(n), theta, f});
    }
  }
  return table;
}

Fig5Point fig5_point(const SweepConfig& cfg, double b, bool check_convergence) {
  const model::PhysicalParams p = fig5_parameters(cfg, b);
  const model::NoiseRates noise = fig5_noise(cfg);
  const StateVector initial = fig5_initial(cfg);
  const StateVector ideal = fig5_ideal(cfg, p);
  const protocol::SimulationMode mode = fig5_mode(cfg);

  const protocol::ProtocolResult result = protocol::run_protocol(initial, p, noise, mode);
  Fig5Point point;
  point.b = b;
  point.fidelity = fidelity_mixed(ideal, result.mixed());
  const DensityDiagnostics diag = result.mixed().diagnostics();
  point.max_trace_drift = std::abs(diag.trace - 1.0);
  for (const auto& s : result.lindblad_stats) {
    point.max_trace_drift = std::max(point.max_trace_drift, s.max_trace_drift);
    point.lindblad_steps += s.steps;
  }
  point.min_eigenvalue = diag.min_eigenvalue;
  for (const auto& entry : result.trace.entries) {
    const auto& rho = std::get<DensityMatrix>(entry.state);
    point.max_trace_drift = std::max(point.max_trace_drift, std::abs(rho.trace() - 1.0));
  }

  if (check_convergence) {
    protocol::SimulationMode halved = mode;
    halved.evolution.max_phase_per_step *= 0.5;
    halved.evolution.dt *= 0.5;
    const protocol::ProtocolResult fine = protocol::run_protocol(initial, p, noise, halved);
    point.convergence_checked = true;
    point.halved_fidelity = fidelity_mixed(ideal, fine.mixed());
    point.converged = std::abs(point.halved_fidelity - point.fidelity) < kConvergenceTolerance;
  }
  return point;
}

Table Fig5Result::table() const {
  Table t{{"b", "fidelity"}, {}};
  for (const auto& p : points) t.rows.push_back({p.b, p.fidelity});
  return t;
}

bool Fig5Result::all_converged() const {
  return std::all_of(points.begin(), points.end(), [](const Fig5Point& p) { return p.converged; });
}

Fig5Result run_fig5(const SweepConfig& cfg) {
  cfg.validate();
  Fig5Result out;
  for (double b : cfg.b_values) {
    const bool check_convergence =
        std::find(cfg.convergence_b.begin(), cfg.convergence_b.end(), b) !=
        cfg.convergence_b.end();
    out.points.push_back(fig5_point(cfg, b, check_convergence));
  }
  return out;
}

GateCheckReport run_gate_check(const SweepConfig& cfg) {
  cfg.validate();
  GateCheckReport report;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  for (int n : cfg.gate_n) {
    check_angles(GateAngles::qft(n), n, cfg.tolerance, report);
    check_angles(GateAngles::uniform(n, 0.0), n, cfg.tolerance, report);
    check_angles(GateAngles::uniform(n, std::numbers::pi), n, cfg.tolerance, report);
    for (int d = 0; d < cfg.draws; ++d) {
      std::vector<double> theta(static_cast<std::size_t>(n));
      for (double& t : theta) t = angle(rng);
      check_angles(GateAngles(theta), n, cfg.tolerance, report);
    }
  }
  return report;
}

std::vector<CheckResult> run_validate(const SweepConfig& cfg) {
  cfg.validate();
  std::vector<CheckResult> out;
  const model::PhysicalParams p = fig5_parameters(cfg, cfg.validate_b);
  const SpaceLayout full = model::system_layout(p.n, p.fock_cutoff, true);
  const SpaceLayout reduced = model::system_layout(p.n, p.fock_cutoff, false);

  // Hermiticity and unitarity of every Hamiltonian used by the protocol.
  {
    std::vector<std::pair<std::string, Operator>> hs;
    hs.emplace_back("dispersive_full", model::dispersive_hamiltonian_full(p, reduced));
    hs.emplace_back("dispersive_effective", model::dispersive_hamiltonian_effective(p, reduced));
    hs.emplace_back("exchange", model::resonant_jc_hamiltonian(p.g_r_actual, full));
    hs.emplace_back("pulse", model::resonant_pulse_hamiltonian(
                                 {model::Transition::k12, -std::numbers::pi / 2, p.omega_r, 0.0},
                                 model::target_subsystem(0), full));
    hs.emplace_back("stark", model::offresonant_pulse_hamiltonian(p.omega_k[0], p.delta,
                                                                  model::target_subsystem(0),
                                                                  reduced));
    double herm = 0.0, unit = 0.0;
    const double t = std::numbers::pi * p.delta_c / (p.g * p.g);
    for (const auto& [name, h] : hs) {
      herm = std::max(herm, h.hermiticity_error() / std::max(1.0, h.max_abs()));
      const Matrix u = dynamics::propagator(h, t).matrix();
      unit = std::max(unit, (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols()))
                                .cwiseAbs()
                                .maxCoeff());
    }
    out.push_back(pass_fail("hermiticity", herm <= kHermiticityTolerance,
                            "max relative error " + format_number(herm)));
    out.push_back(pass_fail("unitarity", unit < 1e-10, "max |U+U - I| " + format_number(unit)));

    Matrix bad = hs.front().second.matrix();
    bad(0, 1) += 1e3;
    bool rejected = false;
    try {
      (void)dynamics::propagator(Operator(reduced, bad), 1e-6);
    } catch (const std::invalid_argument&) {
      rejected = true;
    }
    out.push_back(pass_fail("non-hermitian input rejected", rejected,
                            rejected ? "propagator refused a perturbed Hamiltonian"
                                     : "perturbed Hamiltonian was accepted"));
  }

  // Gate equivalence on every basis input for a few angle sets.
  {
    SweepConfig small = cfg;
    small.draws = 3;
    const GateCheckReport g = run_gate_check(small);
    out.push_back(pass_fail("gate equivalence", g.passed(),
                            std::to_string(g.cases) + " angle sets, max error " +
                                format_number(g.max_error)));
  }

  // Effective dispersive model versus the full coupling on |2>|1>_c.
  {
    std::vector<double> infid;
    for (double b : {10.0, 20.0, 40.0, 80.0}) {
      model::PhysicalParams q = model::reference_parameters(b, 1.0, 1, 2);
      const SpaceLayout layout = model::system_layout(1, 2, false);
      const double t = std::numbers::pi * q.delta_c / (q.g * q.g);
      const std::array<int, 2> digits{1, 2};
      const StateVector psi = basis_state(layout, digits);
      const StateVector eff =
          dynamics::evolve_unitary(model::dispersive_hamiltonian_effective(q, layout), t, psi);
      StateVector fullpsi =
          dynamics::evolve_unitary(model::dispersive_hamiltonian_full(q, layout), t, psi);
      fullpsi = StateVector(layout, model::frame_phases(q.delta_c, t, layout).asDiagonal() *
                                        fullpsi.amplitudes());
      infid.push_back(1.0 - fidelity_pure(eff, fullpsi));
    }
    bool decreasing = true;
    std::string detail = "infidelity at b = 10, 20, 40, 80:";
    for (std::size_t i = 0; i < infid.size(); ++i) {
      detail += " " + format_number(infid[i]);
      if (i > 0 && !(infid[i] < infid[i - 1])) decreasing = false;
    }
    out.push_back(pass_fail("effective-model convergence", decreasing, detail));
  }

  // Single-mode decay locks the factor 2 of the dissipator.
  {
    const double kappa = rate(cfg.cavity_lifetime > 0.0 ? cfg.cavity_lifetime : 3e-2);
    const SpaceLayout cav({2});
    const std::array<int, 1> one{1};
    const DensityMatrix rho0 = DensityMatrix::from_pure(basis_state(cav, one));
    const std::vector<Operator> c{embed(std::sqrt(kappa) * annihilation(2), 0, cav)};
    const double t = 1.0 / kappa;
    const DensityMatrix rho =
        dynamics::evolve_lindblad(Operator::zero(cav), c, t, rho0, dynamics::EvolutionConfig{});
    const double err = std::abs(rho.matrix()(1, 1).real() - std::exp(-2.0 * kappa * t));
    out.push_back(pass_fail("cavity decay exp(-2 kappa t)", err < 1e-6,
                            "error " + format_number(err)));
  }

  // Branch-product evaluator against the dense protocol.
  {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi), dev(0.95, 1.05);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const int n = 1 + trial % 3;
      std::vector<double> theta(static_cast<std::size_t>(n));
      for (double& t : theta) t = angle(rng);
      const GateAngles a(theta);
      const model::PhysicalParams q = protocol::effective_parameters(a, dev(rng));
      const StateVector dense =
          protocol::run_protocol(protocol::uniform_superposition(n, q.fock_cutoff), q, {},
                                 protocol::SimulationMode::deviated())
              .pure();
      const StateVector branch =
          protocol::branch_product_final_state(q, a, protocol::ProductInput::uniform(n))
              .to_dense(q.fock_cutoff);
      worst = std::max(worst, (dense.amplitudes() - branch.amplitudes()).cwiseAbs().maxCoeff());
    }
    out.push_back(pass_fail("branch product vs dense", worst < 1e-10,
                            "max amplitude difference " + format_number(worst)));
  }

  if (!cfg.validate_dissipative) return out;

  // Dissipative run at validate_b: trace, positivity, dt convergence, cutoff.
  {
    const Fig5Point point = fig5_point(cfg, cfg.validate_b, true);
    out.push_back(pass_fail("trace preservation", point.max_trace_drift < 1e-8,
                            "max drift " + format_number(point.max_trace_drift)));
    out.push_back(pass_fail("positivity", point.min_eigenvalue >= -1e-8,
                            "min eigenvalue " + format_number(point.min_eigenvalue)));
    const double change = std::abs(point.halved_fidelity - point.fidelity);
    out.push_back(pass_fail("dt convergence", point.converged,
                            "F = " + format_number(point.fidelity) + ", halved step changes it by " +
                                format_number(change)));

    SweepConfig wider = cfg;
    wider.fock_cutoff = cfg.fock_cutoff + 1;
    const Fig5Point wide = fig5_point(wider, cfg.validate_b, false);
    const double diff = std::abs(wide.fidelity - point.fidelity);
    out.push_back(pass_fail("fock cutoff " + std::to_string(cfg.fock_cutoff) + " vs " +
                                std::to_string(wider.fock_cutoff),
                            diff < 1e-6, "fidelity difference " + format_number(diff)));
  }
  return out;
}

}  // namespace cavphase::experiments

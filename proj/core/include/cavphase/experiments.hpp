#pragma once

// Experiment drivers behind the cavphase tool: the fidelity-versus-theta
// sweep over target counts (fig4), the dissipative fidelity-versus-b sweep
// (fig5), the gate-equivalence check and the invariant suite.
//
// Configuration is a flat "key = value" file; '#' starts a comment and lists
// are comma separated. See configs/ for annotated examples.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cavphase/dynamics.hpp"
#include "cavphase/model.hpp"

namespace cavphase::experiments {

/// Bad configuration or input; the tool maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment { kFig4, kFig5, kGateCheck, kValidate };

Experiment parse_experiment(const std::string& name);
std::string to_string(Experiment e);

struct SweepConfig {
  Experiment experiment = Experiment::kFig4;
  std::string output;  ///< CSV path; empty writes to stdout

  // fig4
  std::vector<int> n_values{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15};
  int theta_points = 201;  ///< uniform grid on [0, 2 pi], ends included
  double deviation = 0.99;

  // fig5
  std::vector<double> b_values{4, 5, 6, 8, 10, 12, 15, 20, 25, 30, 40};
  int targets = 3;
  int fock_cutoff = 2;
  double cavity_lifetime = 3e-2;  ///< 1/kappa in s; 0 disables cavity decay
  double level1_lifetime = 3e-2;  ///< 1/gamma_1; 0 disables
  double level2_lifetime = 3e-2;
  double level3_lifetime = 3e-2;
  double tau_m = 1e-6;
  bool transport_decay = true;
  int transport_events = 10;
  dynamics::EvolutionConfig evolution = dynamics::EvolutionConfig::taylor();
  std::vector<double> convergence_b{10};  ///< points re-run with dt halved

  // gate-check
  std::vector<int> gate_n{1, 2, 3};
  int draws = 20;
  std::uint64_t seed = 20240601;
  double tolerance = 1e-10;

  // validate
  double validate_b = 10;
  bool validate_dissipative = true;  ///< include the Fig. 5-sized checks

  void validate() const;
};

/// Applies one key = value setting; throws ConfigError on unknown keys or
/// malformed values.
void apply_setting(SweepConfig& cfg, const std::string& key, const std::string& value);

/// Parses config text (key = value lines) on top of `cfg`.
void apply_config_text(SweepConfig& cfg, const std::string& text);

/// Reads and applies a config file.
void apply_config_file(SweepConfig& cfg, const std::string& path);

/// Reference parameters and noise for one b, honoring the config overrides.
model::PhysicalParams fig5_parameters(const SweepConfig& cfg, double b);
model::NoiseRates fig5_noise(const SweepConfig& cfg);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Header line plus one line per row; 12 significant digits, '\n' endings.
void write_csv(const Table& table, std::ostream& out);
std::string format_number(double v);

std::vector<double> theta_grid(int points);

Table run_fig4(const SweepConfig& cfg);

struct Fig5Point {
  double b = 0.0;
  double fidelity = 0.0;
  double max_trace_drift = 0.0;
  double min_eigenvalue = 0.0;
  long lindblad_steps = 0;
  bool convergence_checked = false;
  double halved_fidelity = 0.0;  ///< fidelity with every integrator step halved
  bool converged = true;
};

/// Fidelity of the dissipative protocol against the ideal gate output.
Fig5Point fig5_point(const SweepConfig& cfg, double b, bool check_convergence);

struct Fig5Result {
  std::vector<Fig5Point> points;
  [[nodiscard]] Table table() const;
  [[nodiscard]] bool all_converged() const;
};

Fig5Result run_fig5(const SweepConfig& cfg);

inline constexpr double kConvergenceTolerance = 1e-6;

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct GateCheckReport {
  double max_error = 0.0;
  int cases = 0;
  std::vector<CheckResult> failures;  ///< one per failing case, naming the basis input
  [[nodiscard]] bool passed() const { return failures.empty(); }
};

GateCheckReport run_gate_check(const SweepConfig& cfg);

std::vector<CheckResult> run_validate(const SweepConfig& cfg);

}  // namespace cavphase::experiments

// cavphase: fig4 | fig5 | gate-check | validate
//
// Exit codes: 0 success, 1 validation or equivalence failure (including a
// fig5 point that fails the step-halving check), 2 bad input.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cavphase/experiments.hpp"

namespace ex = cavphase::experiments;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::vector<std::string> sets;
  bool quiet = false;
};

ex::SweepConfig load(const Options& opt, ex::Experiment experiment) {
  ex::SweepConfig cfg;
  if (!opt.config.empty()) ex::apply_config_file(cfg, opt.config);
  for (const std::string& s : opt.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ex::ConfigError("--set expects key=value, got '" + s + "'");
    ex::apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  cfg.experiment = experiment;
  if (!opt.out.empty()) cfg.output = opt.out;
  cfg.validate();
  return cfg;
}

void emit(const ex::Table& table, const std::string& path) {
  if (path.empty()) {
    ex::write_csv(table, std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  ex::write_csv(table, out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing output file '" + path + "'");
}

int print_checks(const std::vector<ex::CheckResult>& checks, bool quiet) {
  bool ok = true;
  for (const auto& c : checks) {
    ok = ok && c.passed;
    if (!quiet || !c.passed) {
      std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << '\n';
    }
  }
  return ok ? 0 : 1;
}

int run(const Options& opt, ex::Experiment experiment) {
  const ex::SweepConfig cfg = load(opt, experiment);
  switch (experiment) {
    case ex::Experiment::kFig4:
      emit(ex::run_fig4(cfg), cfg.output);
      return 0;
    case ex::Experiment::kFig5: {
      const ex::Fig5Result result = ex::run_fig5(cfg);
      emit(result.table(), cfg.output);
      for (const auto& p : result.points) {
        if (p.convergence_checked && (!opt.quiet || !p.converged)) {
          std::cerr << (p.converged ? "converged" : "NOT CONVERGED") << " b=" << p.b
                    << " fidelity=" << ex::format_number(p.fidelity)
                    << " halved-step fidelity=" << ex::format_number(p.halved_fidelity) << '\n';
        }
      }
      return result.all_converged() ? 0 : 1;
    }
    case ex::Experiment::kGateCheck: {
      const ex::GateCheckReport report = ex::run_gate_check(cfg);
      for (const auto& f : report.failures) {
        std::cout << "[FAIL] " << f.name << ": " << f.detail << '\n';
      }
      if (!opt.quiet || !report.passed()) {
        std::cout << "gate-check: " << report.cases << " angle sets, max error "
                  << ex::format_number(report.max_error) << '\n';
      }
      return report.passed() ? 0 : 1;
    }
    case ex::Experiment::kValidate:
      return print_checks(ex::run_validate(cfg), opt.quiet);
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-target cavity phase gate simulator"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--config", opt.config, "Config file (key = value lines)");
  app.add_option("--out", opt.out, "Output CSV path (default: stdout)");
  app.add_option("--set", opt.sets, "Override a config key: --set key=value")->take_all()
      ->allow_extra_args(false);
  app.add_flag("--quiet", opt.quiet, "Only report failures");
  app.fallthrough();

  const std::vector<std::pair<const char*, ex::Experiment>> commands{
      {"fig4", ex::Experiment::kFig4},
      {"fig5", ex::Experiment::kFig5},
      {"gate-check", ex::Experiment::kGateCheck},
      {"validate", ex::Experiment::kValidate}};
  const std::vector<std::string> help{
      "Fidelity versus theta for n = 1..15 with deviated couplings",
      "Dissipative fidelity versus b for the four-qubit QFT gate",
      "Protocol versus ideal gate on all basis inputs",
      "Run the invariant suite"};
  ex::Experiment chosen = ex::Experiment::kFig4;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    auto* sub = app.add_subcommand(commands[i].first, help[i]);
    sub->callback([&chosen, e = commands[i].second] { chosen = e; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return run(opt, chosen);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

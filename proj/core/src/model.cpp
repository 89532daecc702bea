#include "cavphase/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cavphase::model {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

void require_target(const SpaceLayout& layout, std::size_t subsystem, const char* what) {
  const int n = target_count(layout);
  require(subsystem >= 1 && subsystem <= static_cast<std::size_t>(n),
          std::string(what) + ": subsystem " + std::to_string(subsystem) +
              " is not a target atom");
}

bool close_rel(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

Matrix number_op(int cutoff) {
  const Matrix a = annihilation(cutoff);
  return a.adjoint() * a;
}

}  // namespace

void PhysicalParams::validate() const {
  require(n >= 1, "PhysicalParams: n must be >= 1");
  require(g_k.size() == static_cast<std::size_t>(n), "PhysicalParams: g_k must have n entries");
  require(omega_k.size() == static_cast<std::size_t>(n),
          "PhysicalParams: omega_k must have n entries");
  require(fock_cutoff >= 2, "PhysicalParams: fock_cutoff must be >= 2");
  for (double v : {g, g_r, g_r_actual, delta_c, delta, omega_r, tau, tau_m, b}) {
    require(std::isfinite(v) && v >= 0.0, "PhysicalParams: rates and durations must be >= 0");
  }
  for (double v : g_k) require(std::isfinite(v) && v >= 0.0, "PhysicalParams: g_k must be >= 0");
  for (double v : omega_k) {
    require(std::isfinite(v) && v >= 0.0, "PhysicalParams: omega_k must be >= 0");
  }
  if (b > 0.0) {
    require(close_rel(delta_c, b * g), "PhysicalParams: delta_c must equal b * g");
    require(close_rel(delta, b * omega_k.front()), "PhysicalParams: delta must equal b * omega_2");
  }
}

PhysicalParams nominal(const PhysicalParams& p) {
  PhysicalParams out = p;
  out.g_k.assign(static_cast<std::size_t>(p.n), p.g);
  out.g_r_actual = p.g_r;
  return out;
}

int upper_level(DecayPath p) {
  switch (p) {
    case DecayPath::k32:
    case DecayPath::k31:
    case DecayPath::k30:
      return 3;
    case DecayPath::k21:
    case DecayPath::k20:
      return 2;
    case DecayPath::k10:
      return 1;
  }
  return -1;
}

int lower_level(DecayPath p) {
  switch (p) {
    case DecayPath::k32:
      return 2;
    case DecayPath::k31:
    case DecayPath::k21:
      return 1;
    case DecayPath::k30:
    case DecayPath::k20:
    case DecayPath::k10:
      return 0;
  }
  return -1;
}

std::string_view to_string(DecayPath p) {
  switch (p) {
    case DecayPath::k32: return "32";
    case DecayPath::k31: return "31";
    case DecayPath::k30: return "30";
    case DecayPath::k21: return "21";
    case DecayPath::k20: return "20";
    case DecayPath::k10: return "10";
  }
  return "?";
}

NoiseRates NoiseRates::from_lifetimes(double cavity_lifetime, double level1_lifetime,
                                      double level2_lifetime, double level3_lifetime) {
  auto rate = [](double lifetime) {
    require(lifetime > 0.0, "NoiseRates: lifetimes must be > 0");
    return 1.0 / lifetime;
  };
  NoiseRates r;
  r.kappa = rate(cavity_lifetime);
  for (DecayPath p : kDecayPaths) {
    switch (upper_level(p)) {
      case 3: r[p] = rate(level3_lifetime); break;
      case 2: r[p] = rate(level2_lifetime); break;
      default: r[p] = rate(level1_lifetime); break;
    }
  }
  return r;
}

bool NoiseRates::is_zero() const {
  if (kappa != 0.0) return false;
  for (double g : gamma) {
    if (g != 0.0) return false;
  }
  return true;
}

void NoiseRates::validate() const {
  require(std::isfinite(kappa) && kappa >= 0.0, "NoiseRates: kappa must be >= 0");
  for (DecayPath p : kDecayPaths) {
    require(std::isfinite((*this)[p]) && (*this)[p] >= 0.0,
            "NoiseRates: gamma_" + std::string(to_string(p)) + " must be >= 0");
  }
}

SpaceLayout system_layout(int n, int fock_cutoff, bool with_control) {
  require(n >= 1, "system_layout: n must be >= 1");
  std::vector<int> dims{fock_cutoff};
  dims.insert(dims.end(), static_cast<std::size_t>(n), kTargetLevels);
  if (with_control) dims.push_back(kControlLevels);
  return SpaceLayout(std::move(dims));
}

bool has_control(const SpaceLayout& layout) {
  return layout.subsystem_count() >= 2 &&
         layout.dims().back() == kControlLevels;
}

std::size_t control_subsystem(const SpaceLayout& layout) {
  require(has_control(layout), "layout has no control atom");
  return layout.subsystem_count() - 1;
}

int target_count(const SpaceLayout& layout) {
  int n = 0;
  const std::size_t end = layout.subsystem_count() - (has_control(layout) ? 1 : 0);
  for (std::size_t s = 1; s < end; ++s) {
    require(layout.dim(s) == kTargetLevels, "layout: target atoms must have 4 levels");
    ++n;
  }
  return n;
}

Operator dispersive_hamiltonian_full(const PhysicalParams& params, const SpaceLayout& layout) {
  params.validate();
  require(target_count(layout) == params.n,
          "dispersive_hamiltonian_full: layout does not hold n target atoms");
  const Matrix a = annihilation(layout.dim(0));
  const Operator a_full = embed(a, 0, layout);
  Operator h = Operator::zero(layout);
  for (int k = 0; k < params.n; ++k) {
    const std::size_t s = target_subsystem(k);
    h += Complex(params.delta_c) * embed(transition(kTargetLevels, 3, 3), s, layout);
    const Operator lower = embed(transition(kTargetLevels, 2, 3), s, layout);
    const Operator coupling = a_full.adjoint() * lower;
    h += Complex(params.g_k[static_cast<std::size_t>(k)]) * (coupling + coupling.adjoint());
  }
  return h;
}

Operator dispersive_hamiltonian_effective(const PhysicalParams& params,
                                          const SpaceLayout& layout) {
  params.validate();
  require(params.delta_c != 0.0, "dispersive_hamiltonian_effective: delta_c must be nonzero");
  require(target_count(layout) == params.n,
          "dispersive_hamiltonian_effective: layout does not hold n target atoms");
  const Operator photons = embed(number_op(layout.dim(0)), 0, layout);
  Operator h = Operator::zero(layout);
  for (int k = 0; k < params.n; ++k) {
    const double gk = params.g_k[static_cast<std::size_t>(k)];
    const Operator level2 = embed(transition(kTargetLevels, 2, 2), target_subsystem(k), layout);
    h += Complex(-gk * gk / params.delta_c) * (photons * level2);
  }
  return h;
}

Operator resonant_jc_hamiltonian(double g_r_actual, const SpaceLayout& layout) {
  const std::size_t c = control_subsystem(layout);
  const Operator a = embed(annihilation(layout.dim(0)), 0, layout);
  const Operator lower = embed(transition(kControlLevels, 0, 1), c, layout);
  const Operator term = a.adjoint() * lower;
  return Complex(g_r_actual) * (term + term.adjoint());
}

Operator resonant_pulse_hamiltonian(const PulseSpec& pulse, std::size_t atom_subsystem,
                                    const SpaceLayout& layout) {
  require(pulse.transition == Transition::k12,
          "resonant_pulse_hamiltonian: pulse must drive the 1<->2 transition");
  require_target(layout, atom_subsystem, "resonant_pulse_hamiltonian");
  Matrix local = Matrix::Zero(kTargetLevels, kTargetLevels);
  local(2, 1) = pulse.rabi * std::exp(-kI * pulse.phase);
  local(1, 2) = pulse.rabi * std::exp(kI * pulse.phase);
  return embed(local, atom_subsystem, layout);
}

Operator offresonant_pulse_hamiltonian(double omega, double delta, std::size_t atom_subsystem,
                                       const SpaceLayout& layout) {
  require_target(layout, atom_subsystem, "offresonant_pulse_hamiltonian");
  Matrix local = Matrix::Zero(kTargetLevels, kTargetLevels);
  local(3, 3) = delta;
  local(2, 3) = omega;
  local(3, 2) = omega;
  return embed(local, atom_subsystem, layout);
}

Operator stark_hamiltonian_effective(double omega, double delta, std::size_t atom_subsystem,
                                     const SpaceLayout& layout) {
  require(delta != 0.0, "stark_hamiltonian_effective: delta must be nonzero");
  require_target(layout, atom_subsystem, "stark_hamiltonian_effective");
  const double shift = omega * omega / delta;
  Matrix local = Matrix::Zero(kTargetLevels, kTargetLevels);
  local(3, 3) = shift;
  local(2, 2) = -shift;
  return embed(local, atom_subsystem, layout);
}

double stark_phase(double omega, double t, double delta, bool reduce) {
  require(delta != 0.0, "stark_phase: delta must be nonzero");
  const double theta = omega * omega * t / delta;
  if (!reduce) return theta;
  const double r = std::fmod(theta, 2.0 * std::numbers::pi);
  return r < 0.0 ? r + 2.0 * std::numbers::pi : r;
}

std::vector<Operator> collapse_operators(const NoiseRates& noise, const SpaceLayout& layout) {
  noise.validate();
  const int n = target_count(layout);
  std::vector<Operator> out;
  out.reserve(1 + 6 * static_cast<std::size_t>(n));
  out.push_back(embed(std::sqrt(noise.kappa) * annihilation(layout.dim(0)), 0, layout));
  for (int k = 0; k < n; ++k) {
    for (DecayPath p : kDecayPaths) {
      const Matrix local =
          std::sqrt(noise[p]) * transition(kTargetLevels, lower_level(p), upper_level(p));
      out.push_back(embed(local, target_subsystem(k), layout));
    }
  }
  return out;
}

Operator excitation_number(const SpaceLayout& layout) {
  Operator out = embed(number_op(layout.dim(0)), 0, layout);
  const int n = target_count(layout);
  for (int k = 0; k < n; ++k) {
    out += embed(transition(kTargetLevels, 3, 3), target_subsystem(k), layout);
  }
  return out;
}

Vector frame_phases(double delta, double t, const SpaceLayout& layout) {
  const int n = target_count(layout);
  Vector out(layout.total_dim());
  for (Eigen::Index i = 0; i < layout.total_dim(); ++i) {
    int excited = 0;
    for (int k = 0; k < n; ++k) {
      if (layout.digit(i, target_subsystem(k)) == 3) ++excited;
    }
    out(i) = std::exp(kI * (delta * t * excited));
  }
  return out;
}

QftParameters qft_parameters(int n, double omega_2, double delta) {
  require(n >= 1, "qft_parameters: n must be >= 1");
  require(omega_2 > 0.0 && delta > 0.0, "qft_parameters: omega_2 and delta must be > 0");
  QftParameters out;
  out.omega.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    out.omega[static_cast<std::size_t>(k)] = omega_2 * std::pow(2.0, -0.5 * k);
  }
  out.tau = (delta / (omega_2 * omega_2)) * (2.0 * std::numbers::pi / 4.0);
  return out;
}

double required_quality_factor(double omega_c, double kappa) {
  require(kappa > 0.0, "required_quality_factor: kappa must be > 0");
  return omega_c / kappa;
}

PhysicalParams reference_parameters(double b, double deviation, int n, int fock_cutoff) {
  require(b > 0.0, "reference_parameters: b must be > 0");
  require(deviation > 0.0 && deviation < 2.0, "reference_parameters: deviation must be in (0, 2)");
  PhysicalParams p;
  p.n = n;
  p.g = kReferenceCoupling;
  p.g_r = kReferenceCoupling;
  p.g_k.assign(static_cast<std::size_t>(n), deviation * p.g);
  p.g_r_actual = deviation * p.g_r;
  p.omega_r = p.g_r;
  p.b = b;
  p.delta_c = b * p.g;
  const double omega_2 = p.g;
  p.delta = b * omega_2;
  const QftParameters qft = qft_parameters(n, omega_2, p.delta);
  p.omega_k = qft.omega;
  p.tau = qft.tau;
  p.tau_m = 1.0e-6;
  p.fock_cutoff = fock_cutoff;
  p.validate();
  return p;
}

NoiseRates reference_noise() { return NoiseRates::from_lifetimes(3.0e-2, 3.0e-2, 3.0e-2, 3.0e-2); }

}  // namespace cavphase::model

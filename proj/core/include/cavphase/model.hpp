#pragma once

// Hamiltonians, collapse operators and parameter derivations for the
// atom-cavity system. Units: angular frequencies in rad/s, times in s, hbar = 1.
//
// Atomic levels of a target atom are |0>,|1>,|2>,|3>; the qubit lives in
// {|0>,|1>}. The control atom is a two-level system {|0>,|1>}.
//
// Rotating frames
// ---------------
// The atom-cavity coupling is naturally written in the interaction picture
// as g (e^{-i Dc t} a+ |2><3| + h.c.), which is explicitly time dependent.
// With H0 = Dc sum_k |3><3|_k and the static operator
//
//     Hs = H0 + g sum_k (a+ |2><3|_k + a |3><2|_k),
//
// the picture change |psi_I(t)> = exp(i H0 t) |psi_s(t)> gives
// i d/dt psi_I = exp(i H0 t) (Hs - H0) exp(-i H0 t) psi_I, and since
// exp(i H0 t) |2><3| exp(-i H0 t) = e^{-i Dc t} |2><3| this is exactly the
// time-dependent form. So a state is propagated under the static Hs and
// mapped back with exp(i H0 t) (see frame_phases) at the end of the step.
// The off-resonant Stark pulse works the same way with Dc replaced by the
// pulse detuning D. Collapse operators a and |i><j|_k only pick up phases
// under exp(i H0 t), so the Lindblad dissipators are frame invariant.

#include <array>
#include <cstddef>
#include <numbers>
#include <string_view>
#include <vector>

#include "cavphase/quantum_core.hpp"

namespace cavphase::model {

inline constexpr int kTargetLevels = 4;
inline constexpr int kControlLevels = 2;

struct PhysicalParams {
  int n = 1;                      ///< number of target atoms
  double g = 0.0;                 ///< nominal target-cavity coupling
  std::vector<double> g_k;        ///< actual per-target couplings (size n)
  double g_r = 0.0;               ///< nominal control-cavity coupling
  double g_r_actual = 0.0;        ///< actual control-cavity coupling
  double delta_c = 0.0;           ///< cavity detuning from the 2<->3 transition
  double delta = 0.0;             ///< Stark pulse detuning from the 2<->3 transition
  double omega_r = 0.0;           ///< resonant 1<->2 pulse Rabi frequency
  std::vector<double> omega_k;    ///< Stark pulse Rabi frequencies (size n)
  double tau = 0.0;               ///< Stark pulse duration
  double tau_m = 0.0;             ///< duration of one transport interval
  double b = 0.0;                 ///< delta_c / g; 0 when not set
  int fock_cutoff = 2;

  /// Throws std::invalid_argument if any invariant is violated.
  void validate() const;
};

/// Copy of `p` with every actual coupling replaced by its nominal value.
PhysicalParams nominal(const PhysicalParams& p);

enum class DecayPath { k32, k31, k30, k21, k20, k10 };
inline constexpr std::array<DecayPath, 6> kDecayPaths{DecayPath::k32, DecayPath::k31,
                                                      DecayPath::k30, DecayPath::k21,
                                                      DecayPath::k20, DecayPath::k10};

int upper_level(DecayPath p);
int lower_level(DecayPath p);
std::string_view to_string(DecayPath p);

struct NoiseRates {
  double kappa = 0.0;
  std::array<double, 6> gamma{};  ///< indexed by DecayPath

  double& operator[](DecayPath p) { return gamma[static_cast<std::size_t>(p)]; }
  double operator[](DecayPath p) const { return gamma[static_cast<std::size_t>(p)]; }

  /// Split where every path out of level j decays at 1/lifetime_j.
  static NoiseRates from_lifetimes(double cavity_lifetime, double level1_lifetime,
                                   double level2_lifetime, double level3_lifetime);

  [[nodiscard]] bool is_zero() const;
  void validate() const;
};

enum class Transition { k12, k23 };

struct PulseSpec {
  Transition transition = Transition::k12;
  double phase = 0.0;
  double rabi = 0.0;
  double duration = 0.0;
};

// Layout helpers. Subsystem 0 is always the cavity; targets follow; an
// optional trailing two-level subsystem is the control atom.

SpaceLayout system_layout(int n, int fock_cutoff, bool with_control);
inline std::size_t target_subsystem(int target) { return static_cast<std::size_t>(1 + target); }
std::size_t control_subsystem(const SpaceLayout& layout);
int target_count(const SpaceLayout& layout);
bool has_control(const SpaceLayout& layout);

/// Static-frame form of the dispersive atom-cavity coupling using the actual g_k.
Operator dispersive_hamiltonian_full(const PhysicalParams& params, const SpaceLayout& layout);

/// -sum_k (g_k^2 / delta_c) a+a |2><2|_k
Operator dispersive_hamiltonian_effective(const PhysicalParams& params,
                                          const SpaceLayout& layout);

/// g (a+ |0><1| + a |1><0|) on the control atom.
Operator resonant_jc_hamiltonian(double g_r_actual, const SpaceLayout& layout);

/// rabi (e^{-i phase} |2><1| + e^{i phase} |1><2|) on one target.
Operator resonant_pulse_hamiltonian(const PulseSpec& pulse, std::size_t atom_subsystem,
                                    const SpaceLayout& layout);

/// Static-frame Stark pulse: delta |3><3| + omega (|2><3| + |3><2|).
Operator offresonant_pulse_hamiltonian(double omega, double delta, std::size_t atom_subsystem,
                                       const SpaceLayout& layout);

/// Far-detuned limit of the Stark pulse: (omega^2/delta)(|3><3| - |2><2|).
Operator stark_hamiltonian_effective(double omega, double delta, std::size_t atom_subsystem,
                                     const SpaceLayout& layout);

double stark_phase(double omega, double t, double delta, bool reduce = false);

/// sqrt(kappa) a followed by sqrt(gamma_ji) |i><j|_k for every target k and path ji.
std::vector<Operator> collapse_operators(const NoiseRates& noise, const SpaceLayout& layout);

/// a+a + sum_k |3><3|_k
Operator excitation_number(const SpaceLayout& layout);

/// Diagonal of exp(i delta t sum_k |3><3|_k), the map from the static frame
/// back to the interaction picture.
Vector frame_phases(double delta, double t, const SpaceLayout& layout);

struct QftParameters {
  std::vector<double> omega;  ///< Rabi frequency per target, omega[0] = omega_2
  double tau = 0.0;
};

QftParameters qft_parameters(int n, double omega_2, double delta);

double required_quality_factor(double omega_c, double kappa);

/// Four-qubit QFT gate setup used for the dissipative fidelity study.
PhysicalParams reference_parameters(double b, double deviation = 0.99, int n = 3,
                                int fock_cutoff = 2);
NoiseRates reference_noise();

/// Nominal coupling g = 2 pi x 50 kHz.
inline constexpr double kReferenceCoupling = 2.0 * std::numbers::pi * 5.0e4;

}  // namespace cavphase::model

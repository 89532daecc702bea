#pragma once

// Time evolution: exact propagators for time-independent Hamiltonians and
// fixed-step integrators for the Lindblad master equation
//
//     d rho/dt = -i [H, rho] + sum_c (2 c rho c+ - c+ c rho - rho c+ c),
//
// where every collapse operator already carries the square root of its rate.
//
// Two fixed-step schemes are available. RK4 is the default. The Taylor
// scheme applies the truncated series of exp(L dt) per step and is exact to
// rounding for steps of a few radians, which makes long, weakly damped
// evolutions far cheaper.

#include <cstddef>
#include <span>
#include <vector>

#include "cavphase/quantum_core.hpp"

namespace cavphase::dynamics {

enum class Method { kRk4, kTaylor };

struct EvolutionConfig {
  Method method = Method::kRk4;
  /// Upper bound on the integrator step; 0 derives it from max_phase_per_step alone.
  double dt = 0.0;
  /// Largest phase any density-matrix element may accumulate in one step.
  double max_phase_per_step = 0.02;
  /// Highest power of (L dt) kept by the Taylor scheme; the series stops
  /// earlier once a term no longer changes the sum.
  int taylor_order = 60;

  /// Taylor scheme with 4 rad steps.
  static EvolutionConfig taylor() { return {Method::kTaylor, 0.0, 4.0, 60}; }

  void validate() const;
};

struct EvolutionStats {
  long steps = 0;
  double dt = 0.0;
  double frequency_scale = 0.0;
  Eigen::Index support_rows = 0;
  Eigen::Index support_cols = 0;
  double max_trace_drift = 0.0;
};

/// exp(-i H t) by Hermitian eigendecomposition (diagonal H is exponentiated directly).
Operator propagator(const Operator& h, double t);

StateVector evolve_unitary(const Operator& h, double t, const StateVector& psi);

/// U rho U+
DensityMatrix apply_unitary(const Operator& u, const DensityMatrix& rho);

DensityMatrix evolve_lindblad(const Operator& h, std::span<const Operator> collapse, double t,
                              const DensityMatrix& rho, const EvolutionConfig& cfg = {},
                              EvolutionStats* stats = nullptr);

/// Same generator applied to an arbitrary operator X (not necessarily
/// Hermitian); used for blocks of a larger density matrix. `hermitian`
/// enables the per-step re-symmetrization X <- (X + X+)/2.
Matrix evolve_lindblad_operator(const Operator& h, std::span<const Operator> collapse, double t,
                                const Matrix& x, bool hermitian, const EvolutionConfig& cfg = {},
                                EvolutionStats* stats = nullptr);

/// Lindblad evolution with H = 0 for a transport interval.
DensityMatrix free_decay(const DensityMatrix& rho, std::span<const Operator> collapse,
                         double tau_m, const EvolutionConfig& cfg = {});

/// The time-t map of a Lindblad generator that acts on one subsystem only,
/// stored as a d^2 x d^2 matrix on column-stacked vec(X).
struct LocalChannel {
  int dim = 0;
  Matrix superoperator;
};

LocalChannel local_channel(const Matrix& h, std::span<const Matrix> collapse, double t,
                           const EvolutionConfig& cfg = {});

/// X <- (channel on `subsystem`)(X) for X acting on `layout`.
void apply_local_channel(Matrix& x, const LocalChannel& channel, std::size_t subsystem,
                         const SpaceLayout& layout);

}  // namespace cavphase::dynamics

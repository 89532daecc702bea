#pragma once

// Seven-step controlled-phase gate: one control atom (two-level, qubit 1)
// imprints phases theta_k on the |1> states of n four-level target atoms
// through a single cavity photon.
//
//   (i)   targets: 1<->2 pulse, phase -pi/2, duration pi/(4 Omega_r);
//         control: resonant exchange with the cavity for pi/(2 g_r)
//   (ii)  targets dispersively coupled to the cavity for pi Delta_c / g^2
//   (iii) targets: 1<->2 pulse, phase +pi/2
//   (iv)  targets: off-resonant Stark pulses for tau
//   (v)   targets: 1<->2 pulse, phase -pi/2
//   (vi)  same as (ii)
//   (vii) targets: 1<->2 pulse, phase +pi/2; control: exchange for 3 pi/(2 g_r)
//
// Layout of the full system: cavity, targets 2..n+1, control atom (last).
// Qubit-register layout (ideal gate): control first, then targets.

#include <array>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "cavphase/dynamics.hpp"
#include "cavphase/model.hpp"
#include "cavphase/quantum_core.hpp"

namespace cavphase::protocol {

class GateAngles {
 public:
  /// Values are reduced into [0, 2 pi).
  explicit GateAngles(std::vector<double> theta);

  static GateAngles uniform(int n, double theta);
  /// theta_k = 2 pi / 2^k for k = 2..n+1.
  static GateAngles qft(int n);

  [[nodiscard]] const std::vector<double>& values() const { return theta_; }
  [[nodiscard]] int size() const { return static_cast<int>(theta_.size()); }
  [[nodiscard]] double operator[](std::size_t k) const { return theta_.at(k); }

 private:
  std::vector<double> theta_;
};

enum class ModeKind { IdealEffective, DeviatedEffective, LossyFull };

struct SimulationMode {
  ModeKind kind = ModeKind::IdealEffective;
  bool include_transport_decay = true;
  int transport_event_count = 10;
  dynamics::EvolutionConfig evolution{};

  static SimulationMode ideal() { return {ModeKind::IdealEffective}; }
  static SimulationMode deviated() { return {ModeKind::DeviatedEffective}; }
  static SimulationMode lossy() { return {ModeKind::LossyFull}; }
};

using QuantumState = std::variant<StateVector, DensityMatrix>;

struct TraceEntry {
  std::string label;
  QuantumState state;
  double elapsed = 0.0;
};

struct ProtocolTrace {
  std::vector<TraceEntry> entries;
};

struct ProtocolResult {
  QuantumState final_state;
  ProtocolTrace trace;
  /// One record per dissipative block evolution in LossyFull mode.
  std::vector<dynamics::EvolutionStats> lindblad_stats;

  [[nodiscard]] const StateVector& pure() const { return std::get<StateVector>(final_state); }
  [[nodiscard]] const DensityMatrix& mixed() const {
    return std::get<DensityMatrix>(final_state);
  }
};

/// Register of n+1 qubits, control first.
SpaceLayout qubit_layout(int n);

/// Diagonal gate |x1 x2 ... x_{n+1}> -> exp(i x1 sum_k theta_k x_k) |x1 ...>.
Operator ideal_gate_operator(const GateAngles& angles, int n);

/// Places a qubit-register state into the atom levels {|0>,|1>} of the full
/// system with the cavity in vacuum.
StateVector embed_qubits(const StateVector& qubits, int fock_cutoff);

/// Every atom in (|0> + |1>)/sqrt(2), cavity in vacuum.
StateVector uniform_superposition(int n, int fock_cutoff);

/// Stark phases Omega_k^2 tau / Delta, reduced into [0, 2 pi).
GateAngles gate_angles(const model::PhysicalParams& params);

/// Rabi frequencies chosen so that the Stark phases equal `angles`; clears b.
model::PhysicalParams with_gate_angles(model::PhysicalParams params, const GateAngles& angles);

/// Couplings and detunings at b = 10 with every coupling scaled by `deviation`.
model::PhysicalParams effective_parameters(const GateAngles& angles, double deviation = 1.0);

ProtocolResult run_protocol(const StateVector& initial, const model::PhysicalParams& params,
                            const model::NoiseRates& noise, const SimulationMode& mode);

/// Product of the seven step propagators (pure modes only).
Operator protocol_unitary(const model::PhysicalParams& params, const SimulationMode& mode);

/// max_i |out_i - e^{i phi} expected_i| minimised over the global phase phi.
double max_error_up_to_phase(const Vector& expected, const Vector& out);

/// Exact final state of the effective-model protocol for product inputs,
/// stored without the exponentially large dense space:
///
///   sum_{s in {00, 10, 01}} sum_{m in {0,1}} coeff[s][m] |s> (x)_k factor[m][k]
///
/// where s = (control level, photon number). Photon number is conserved from
/// step (ii) to step (vi), so each target evolves under a local unitary fixed
/// by the photon number m; steps (i) and (vii) only mix the s components.
class BranchProductState {
 public:
  static constexpr int kSectors = 3;  // |0>_1|0>_c, |1>_1|0>_c, |0>_1|1>_c

  BranchProductState(int n, std::array<std::array<Complex, 2>, kSectors> coeff,
                     std::array<std::vector<Vector>, 2> factors);

  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] Complex overlap(const BranchProductState& other) const;  // <this|other>
  [[nodiscard]] double norm() const { return std::sqrt(std::abs(overlap(*this))); }
  [[nodiscard]] StateVector to_dense(int fock_cutoff) const;

 private:
  int n_;
  std::array<std::array<Complex, 2>, kSectors> coeff_;
  std::array<std::vector<Vector>, 2> factors_;  // 4-level vectors per target
};

/// Product input: control qubit `control` (2-vector), one 2-vector per target.
struct ProductInput {
  Vector control;
  std::vector<Vector> targets;

  static ProductInput uniform(int n);
};

BranchProductState branch_product_final_state(const model::PhysicalParams& params,
                                              const GateAngles& angles,
                                              const ProductInput& input,
                                              ModeKind mode = ModeKind::DeviatedEffective);

/// Ideal gate output for a product input, in the same representation.
BranchProductState ideal_branch_state(const GateAngles& angles, const ProductInput& input);

}  // namespace cavphase::protocol

#include "cavphase/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace cavphase::protocol {

namespace {

using dynamics::propagator;
using model::PhysicalParams;

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kTransportSlots = 10;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

double reduce_angle(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r >= kTwoPi ? 0.0 : r;
}

// A unitary acting on a few subsystems of the full layout.
struct Factor {
  std::vector<std::size_t> subsystems;
  Matrix u;
};
using Step = std::vector<Factor>;

// The 4x4 atomic part of an operator built on the layout (cavity, one target),
// read off the block where the cavity is in vacuum.
Matrix atom_block(const Operator& op) {
  return op.matrix().topLeftCorner(model::kTargetLevels, model::kTargetLevels);
}

SpaceLayout single_target_layout(int fock_cutoff) {
  return model::system_layout(1, fock_cutoff, false);
}

PhysicalParams single_target_params(const PhysicalParams& p, int k) {
  PhysicalParams out = p;
  out.n = 1;
  out.g_k = {p.g_k[static_cast<std::size_t>(k)]};
  out.omega_k = {p.omega_k[static_cast<std::size_t>(k)]};
  out.b = 0.0;
  return out;
}

double pulse_time(const PhysicalParams& p) { return kPi / (4.0 * p.omega_r); }
double dispersive_time(const PhysicalParams& p) { return kPi * p.delta_c / (p.g * p.g); }
double first_exchange_time(const PhysicalParams& p) { return kPi / (2.0 * p.g_r); }
double last_exchange_time(const PhysicalParams& p) { return 3.0 * kPi / (2.0 * p.g_r); }

Matrix pulse_unitary(const PhysicalParams& p, double phase) {
  const SpaceLayout local = single_target_layout(2);
  const model::PulseSpec spec{model::Transition::k12, phase, p.omega_r, pulse_time(p)};
  const Matrix h = atom_block(model::resonant_pulse_hamiltonian(spec, 1, local));
  return propagator(Operator(SpaceLayout({model::kTargetLevels}), h), spec.duration).matrix();
}

// exp(-i H t) for the control-cavity exchange, on (cavity, control).
Matrix exchange_unitary(double g_r_actual, double t, int fock_cutoff) {
  const SpaceLayout local({fock_cutoff, model::kControlLevels});
  return propagator(model::resonant_jc_hamiltonian(g_r_actual, local), t).matrix();
}

// exp(-i H_eff t) of the dispersive step for target k, on (cavity, target k).
Matrix dispersive_unitary(const PhysicalParams& p, int k, double t) {
  const SpaceLayout local = single_target_layout(p.fock_cutoff);
  const Operator h = model::dispersive_hamiltonian_effective(single_target_params(p, k), local);
  return propagator(h, t).matrix();
}

Matrix stark_unitary(const PhysicalParams& p, int k) {
  const SpaceLayout local = single_target_layout(2);
  const Matrix h = atom_block(
      model::stark_hamiltonian_effective(p.omega_k[static_cast<std::size_t>(k)], p.delta, 1,
                                         local));
  return propagator(Operator(SpaceLayout({model::kTargetLevels}), h), p.tau).matrix();
}

Step pulse_step(const PhysicalParams& p, double phase) {
  const Matrix u = pulse_unitary(p, phase);
  Step step;
  for (int k = 0; k < p.n; ++k) step.push_back({{model::target_subsystem(k)}, u});
  return step;
}

Step with_exchange(Step step, const PhysicalParams& couplings, double t) {
  const auto control = static_cast<std::size_t>(couplings.n + 1);
  step.push_back({{0, control},
                  exchange_unitary(couplings.g_r_actual, t, couplings.fock_cutoff)});
  return step;
}

Step dispersive_step(const PhysicalParams& couplings, double t) {
  Step step;
  for (int k = 0; k < couplings.n; ++k) {
    step.push_back({{0, model::target_subsystem(k)}, dispersive_unitary(couplings, k, t)});
  }
  return step;
}

Step stark_step(const PhysicalParams& p) {
  Step step;
  for (int k = 0; k < p.n; ++k) step.push_back({{model::target_subsystem(k)}, stark_unitary(p, k)});
  return step;
}

void apply_step(Matrix& cols, const Step& step, const SpaceLayout& layout) {
  for (const Factor& f : step) apply_local(cols, f.u, f.subsystems, layout);
}

// rho <- U rho U+
void conjugate_step(Matrix& rho, const Step& step, const SpaceLayout& layout) {
  apply_step(rho, step, layout);
  Matrix half = rho.adjoint();
  apply_step(half, step, layout);
  rho = half.adjoint();
}

void apply_frame(Matrix& x, const Vector& v) {
  x = v.asDiagonal() * x * v.conjugate().asDiagonal();
}

void check_initial(const StateVector& initial, const PhysicalParams& p) {
  require(initial.layout() == model::system_layout(p.n, p.fock_cutoff, true),
          "run_protocol: initial state must live on (cavity, n targets, control)");
  const SpaceLayout& layout = initial.layout();
  double excited = 0.0;
  for (Eigen::Index i = 0; i < layout.total_dim(); ++i) {
    if (layout.digit(i, 0) != 0) excited += std::norm(initial.amplitudes()(i));
  }
  require(excited <= 1e-24, "run_protocol: cavity must start in the vacuum state");
}

void check_params(const PhysicalParams& p, const SimulationMode& mode) {
  p.validate();
  require(p.omega_r > 0.0 && p.g > 0.0 && p.g_r > 0.0,
          "run_protocol: g, g_r and omega_r must be > 0");
  require(p.delta_c > 0.0 && p.delta > 0.0, "run_protocol: delta_c and delta must be > 0");
  require(mode.transport_event_count >= 0, "run_protocol: transport_event_count must be >= 0");
  mode.evolution.validate();
}

const PhysicalParams& couplings_for(const PhysicalParams& p, const PhysicalParams& nominal,
                                    ModeKind kind) {
  return kind == ModeKind::IdealEffective ? nominal : p;
}

struct Schedule {
  std::array<double, 7> durations{};
  std::array<const char*, 7> labels{"i", "ii", "iii", "iv", "v", "vi", "vii"};
};

Schedule schedule(const PhysicalParams& p) {
  Schedule s;
  const double pulse = pulse_time(p);
  s.durations = {std::max(pulse, first_exchange_time(p)),
                 dispersive_time(p),
                 pulse,
                 p.tau,
                 pulse,
                 dispersive_time(p),
                 std::max(pulse, last_exchange_time(p))};
  return s;
}

// Transport slots, in protocol order: before (i), after (i), before (ii),
// after (ii), before (iv), between (iv) and (v), before (vi), after (vi),
// before (vii), after (vii). Slot s sits before step kSlotStep[s] when
// kSlotBefore[s] holds, otherwise after it.
constexpr std::array<int, kTransportSlots> kSlotStep{0, 0, 1, 1, 3, 3, 5, 5, 6, 6};
constexpr std::array<bool, kTransportSlots> kSlotBefore{true, false, true, false, true,
                                                        false, true, false, true, false};

std::array<int, kTransportSlots> slot_counts(const SimulationMode& mode) {
  std::array<int, kTransportSlots> counts{};
  if (!mode.include_transport_decay) return counts;
  for (int j = 0; j < mode.transport_event_count; ++j) ++counts[j % kTransportSlots];
  return counts;
}

// Dissipative pieces that factor into channels on single subsystems.
struct LocalChannels {
  dynamics::LocalChannel cavity;
  std::vector<dynamics::LocalChannel> targets;
};

std::vector<Matrix> atom_collapse(const model::NoiseRates& noise) {
  std::vector<Matrix> out;
  for (model::DecayPath path : model::kDecayPaths) {
    out.push_back(std::sqrt(noise[path]) *
                  transition(model::kTargetLevels, model::lower_level(path),
                             model::upper_level(path)));
  }
  return out;
}

dynamics::LocalChannel cavity_channel(const model::NoiseRates& noise, int cutoff, double t,
                                      const dynamics::EvolutionConfig& cfg) {
  const std::vector<Matrix> c{std::sqrt(noise.kappa) * annihilation(cutoff)};
  return dynamics::local_channel(Matrix::Zero(cutoff, cutoff), c, t, cfg);
}

LocalChannels transport_channels(const PhysicalParams& p, const model::NoiseRates& noise,
                                 const dynamics::EvolutionConfig& cfg) {
  LocalChannels out{cavity_channel(noise, p.fock_cutoff, p.tau_m, cfg), {}};
  const Matrix zero = Matrix::Zero(model::kTargetLevels, model::kTargetLevels);
  out.targets.assign(static_cast<std::size_t>(p.n),
                     dynamics::local_channel(zero, atom_collapse(noise), p.tau_m, cfg));
  return out;
}

LocalChannels stark_channels(const PhysicalParams& p, const model::NoiseRates& noise,
                             const dynamics::EvolutionConfig& cfg) {
  LocalChannels out{cavity_channel(noise, p.fock_cutoff, p.tau, cfg), {}};
  const SpaceLayout local = single_target_layout(2);
  const std::vector<Matrix> c = atom_collapse(noise);
  for (int k = 0; k < p.n; ++k) {
    const Matrix h = atom_block(model::offresonant_pulse_hamiltonian(
        p.omega_k[static_cast<std::size_t>(k)], p.delta, 1, local));
    out.targets.push_back(dynamics::local_channel(h, c, p.tau, cfg));
  }
  return out;
}

void apply_channels(Matrix& rho, const LocalChannels& ch, const SpaceLayout& layout) {
  dynamics::apply_local_channel(rho, ch.cavity, 0, layout);
  for (std::size_t k = 0; k < ch.targets.size(); ++k) {
    dynamics::apply_local_channel(rho, ch.targets[k], model::target_subsystem(static_cast<int>(k)),
                                  layout);
  }
}

using BlockMap = Eigen::Map<Matrix, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>>;

// Full dispersive step with dissipation. The control atom is idle here, so
// each control block rho_ab = <a|rho|b> evolves independently under the
// cavity-plus-targets generator; rho_10 = rho_01+.
void lossy_dispersive_step(Matrix& rho, const PhysicalParams& couplings,
                           const model::NoiseRates& noise, double t,
                           const dynamics::EvolutionConfig& cfg,
                           std::vector<dynamics::EvolutionStats>& stats) {
  const SpaceLayout reduced = model::system_layout(couplings.n, couplings.fock_cutoff, false);
  const std::vector<Operator> collapse = model::collapse_operators(noise, reduced);
  // H conserves the excitation number N and every collapse operator lowers N
  // by 0 or 1, so the generator is unchanged in the frame rotating at
  // delta_c N. There H - delta_c N has a spectral spread of about delta_c
  // instead of n delta_c. Undoing that frame and then returning to the
  // interaction picture multiplies by exp(-i delta_c t N) exp(i delta_c t n3).
  const Operator number = model::excitation_number(reduced);
  const Operator h = model::dispersive_hamiltonian_full(couplings, reduced) +
                     Complex(-couplings.delta_c) * number;
  Vector frame = model::frame_phases(couplings.delta_c, t, reduced);
  for (Eigen::Index i = 0; i < frame.size(); ++i) {
    frame(i) *= std::exp(-kI * (couplings.delta_c * t * number.matrix()(i, i).real()));
  }
  const Eigen::Index m = reduced.total_dim();
  const Eigen::Index full = rho.rows();
  const Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic> stride(2 * full, 2);

  auto block = [&](int a, int b) { return BlockMap(rho.data() + a + b * full, m, m, stride); };
  for (auto [a, b] : {std::pair{0, 0}, std::pair{1, 1}, std::pair{0, 1}}) {
    BlockMap view = block(a, b);
    Matrix x = view;
    if (x.cwiseAbs().maxCoeff() == 0.0) continue;
    dynamics::EvolutionStats s;
    x = dynamics::evolve_lindblad_operator(h, collapse, t, x, a == b, cfg, &s);
    apply_frame(x, frame);
    view = x;
    stats.push_back(s);
  }
  BlockMap lower = block(1, 0);
  lower = block(0, 1).adjoint();
}

}  // namespace

GateAngles::GateAngles(std::vector<double> theta) : theta_(std::move(theta)) {
  for (double& t : theta_) {
    require(std::isfinite(t), "GateAngles: angles must be finite");
    t = reduce_angle(t);
  }
}

GateAngles GateAngles::uniform(int n, double theta) {
  require(n >= 1, "GateAngles::uniform: n must be >= 1");
  return GateAngles(std::vector<double>(static_cast<std::size_t>(n), theta));
}

GateAngles GateAngles::qft(int n) {
  require(n >= 1, "GateAngles::qft: n must be >= 1");
  std::vector<double> theta;
  for (int k = 2; k <= n + 1; ++k) theta.push_back(kTwoPi / std::ldexp(1.0, k));
  return GateAngles(std::move(theta));
}

SpaceLayout qubit_layout(int n) {
  require(n >= 1, "qubit_layout: n must be >= 1");
  return SpaceLayout(std::vector<int>(static_cast<std::size_t>(n) + 1, 2));
}

Operator ideal_gate_operator(const GateAngles& angles, int n) {
  require(angles.size() == n, "ideal_gate_operator: need one angle per target");
  const SpaceLayout layout = qubit_layout(n);
  Vector diag(layout.total_dim());
  for (Eigen::Index i = 0; i < layout.total_dim(); ++i) {
    double phase = 0.0;
    if (layout.digit(i, 0) == 1) {
      for (int k = 0; k < n; ++k) {
        if (layout.digit(i, static_cast<std::size_t>(k) + 1) == 1) {
          phase += angles[static_cast<std::size_t>(k)];
        }
      }
    }
    diag(i) = std::exp(kI * phase);
  }
  return {layout, diag.asDiagonal().toDenseMatrix()};
}

StateVector embed_qubits(const StateVector& qubits, int fock_cutoff) {
  const SpaceLayout& q = qubits.layout();
  const int n = static_cast<int>(q.subsystem_count()) - 1;
  require(n >= 1, "embed_qubits: need a control and at least one target");
  for (int d : q.dims()) require(d == 2, "embed_qubits: register must consist of qubits");
  const SpaceLayout full = model::system_layout(n, fock_cutoff, true);
  Vector amps = Vector::Zero(full.total_dim());
  std::vector<int> digits(full.subsystem_count(), 0);
  for (Eigen::Index i = 0; i < q.total_dim(); ++i) {
    digits.back() = q.digit(i, 0);
    for (int k = 0; k < n; ++k) {
      digits[model::target_subsystem(k)] = q.digit(i, static_cast<std::size_t>(k) + 1);
    }
    amps(full.index(digits)) = qubits.amplitudes()(i);
  }
  return {full, std::move(amps)};
}

StateVector uniform_superposition(int n, int fock_cutoff) {
  const SpaceLayout q = qubit_layout(n);
  const Vector amps =
      Vector::Constant(q.total_dim(), 1.0 / std::sqrt(static_cast<double>(q.total_dim())));
  return embed_qubits(StateVector(q, amps), fock_cutoff);
}

GateAngles gate_angles(const PhysicalParams& params) {
  std::vector<double> theta;
  for (double omega : params.omega_k) {
    theta.push_back(model::stark_phase(omega, params.tau, params.delta, true));
  }
  return GateAngles(std::move(theta));
}

PhysicalParams with_gate_angles(PhysicalParams params, const GateAngles& angles) {
  require(angles.size() == params.n, "with_gate_angles: need one angle per target");
  require(params.tau > 0.0 && params.delta > 0.0, "with_gate_angles: tau and delta must be > 0");
  params.b = 0.0;
  for (int k = 0; k < params.n; ++k) {
    params.omega_k[static_cast<std::size_t>(k)] =
        std::sqrt(angles[static_cast<std::size_t>(k)] * params.delta / params.tau);
  }
  return params;
}

PhysicalParams effective_parameters(const GateAngles& angles, double deviation) {
  require(deviation > 0.0 && deviation < 2.0, "effective_parameters: deviation must be in (0, 2)");
  const int n = angles.size();
  PhysicalParams p;
  p.n = n;
  p.g = model::kReferenceCoupling;
  p.g_r = p.g;
  p.omega_r = p.g;
  p.delta_c = 10.0 * p.g;
  p.delta = 10.0 * p.g;
  p.tau = (p.delta / (p.g * p.g)) * (kPi / 2.0);
  p.g_k.assign(static_cast<std::size_t>(n), deviation * p.g);
  p.g_r_actual = deviation * p.g_r;
  p.omega_k.assign(static_cast<std::size_t>(n), 0.0);
  return with_gate_angles(std::move(p), angles);
}

ProtocolResult run_protocol(const StateVector& initial, const PhysicalParams& params,
                            const model::NoiseRates& noise, const SimulationMode& mode) {
  check_params(params, mode);
  check_initial(initial, params);
  if (mode.kind == ModeKind::LossyFull) noise.validate();

  const SpaceLayout& layout = initial.layout();
  const PhysicalParams nominal = model::nominal(params);
  const PhysicalParams& couplings = couplings_for(params, nominal, mode.kind);
  const Schedule sched = schedule(nominal);
  const double t_disp = dispersive_time(nominal);

  const std::array<Step, 4> pulses{
      with_exchange(pulse_step(nominal, -kPi / 2.0), couplings, first_exchange_time(nominal)),
      pulse_step(nominal, kPi / 2.0), pulse_step(nominal, -kPi / 2.0),
      with_exchange(pulse_step(nominal, kPi / 2.0), couplings, last_exchange_time(nominal))};

  ProtocolResult result{initial, {}, {}};
  double elapsed = 0.0;

  if (mode.kind != ModeKind::LossyFull) {
    const Step disp = dispersive_step(couplings, t_disp);
    const Step stark = stark_step(params);
    const std::array<const Step*, 7> steps{&pulses[0], &disp, &pulses[1], &stark,
                                           &pulses[2], &disp, &pulses[3]};
    Matrix psi = initial.amplitudes();
    for (std::size_t s = 0; s < steps.size(); ++s) {
      apply_step(psi, *steps[s], layout);
      elapsed += sched.durations[s];
      result.trace.entries.push_back(
          {sched.labels[s], StateVector(layout, psi.col(0)), elapsed});
    }
    result.final_state = StateVector(layout, psi.col(0));
    return result;
  }

  const dynamics::EvolutionConfig& cfg = mode.evolution;
  const std::array<int, kTransportSlots> counts = slot_counts(mode);
  const bool any_transport =
      std::any_of(counts.begin(), counts.end(), [](int c) { return c > 0; }) && params.tau_m > 0.0;
  const LocalChannels transport = any_transport ? transport_channels(params, noise, cfg)
                                                : LocalChannels{};
  const LocalChannels stark = stark_channels(params, noise, cfg);
  const Vector stark_frame = model::frame_phases(params.delta, params.tau, layout);

  Matrix rho = initial.amplitudes() * initial.amplitudes().adjoint();
  auto transport_at = [&](int step, bool before) {
    if (!any_transport) return;
    for (int slot = 0; slot < kTransportSlots; ++slot) {
      if (kSlotStep[slot] != step || kSlotBefore[slot] != before) continue;
      for (int e = 0; e < counts[slot]; ++e) {
        apply_channels(rho, transport, layout);
        elapsed += params.tau_m;
      }
    }
  };

  for (int s = 0; s < 7; ++s) {
    transport_at(s, true);
    switch (s) {
      case 0:
      case 2:
      case 4:
      case 6:
        conjugate_step(rho, pulses[static_cast<std::size_t>(s / 2)], layout);
        break;
      case 1:
      case 5:
        lossy_dispersive_step(rho, couplings, noise, t_disp, cfg, result.lindblad_stats);
        break;
      case 3:
        apply_channels(rho, stark, layout);
        apply_frame(rho, stark_frame);
        break;
    }
    rho = 0.5 * (rho + rho.adjoint()).eval();
    elapsed += sched.durations[static_cast<std::size_t>(s)];
    transport_at(s, false);
    result.trace.entries.push_back(
        {sched.labels[static_cast<std::size_t>(s)], DensityMatrix(layout, rho), elapsed});
  }
  result.final_state = DensityMatrix(layout, std::move(rho));
  return result;
}

Operator protocol_unitary(const PhysicalParams& params, const SimulationMode& mode) {
  require(mode.kind != ModeKind::LossyFull, "protocol_unitary: pure modes only");
  check_params(params, mode);
  const SpaceLayout layout = model::system_layout(params.n, params.fock_cutoff, true);
  const PhysicalParams nominal = model::nominal(params);
  const PhysicalParams& couplings = couplings_for(params, nominal, mode.kind);
  const double t_disp = dispersive_time(nominal);
  const Step disp = dispersive_step(couplings, t_disp);

  Matrix u = Matrix::Identity(layout.total_dim(), layout.total_dim());
  apply_step(u, with_exchange(pulse_step(nominal, -kPi / 2.0), couplings,
                              first_exchange_time(nominal)), layout);
  apply_step(u, disp, layout);
  apply_step(u, pulse_step(nominal, kPi / 2.0), layout);
  apply_step(u, stark_step(params), layout);
  apply_step(u, pulse_step(nominal, -kPi / 2.0), layout);
  apply_step(u, disp, layout);
  apply_step(u, with_exchange(pulse_step(nominal, kPi / 2.0), couplings,
                              last_exchange_time(nominal)), layout);
  return {layout, std::move(u)};
}

double max_error_up_to_phase(const Vector& expected, const Vector& out) {
  require(expected.size() == out.size(), "max_error_up_to_phase: size mismatch");
  // Least-squares phase.
  const Complex overlap = expected.dot(out);
  const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex(1.0);
  return (out - phase * expected).cwiseAbs().maxCoeff();
}

BranchProductState::BranchProductState(int n,
                                       std::array<std::array<Complex, 2>, kSectors> coeff,
                                       std::array<std::vector<Vector>, 2> factors)
    : n_(n), coeff_(coeff), factors_(std::move(factors)) {
  require(n_ >= 1, "BranchProductState: n must be >= 1");
  for (const auto& set : factors_) {
    require(set.size() == static_cast<std::size_t>(n_),
            "BranchProductState: need one factor per target");
    for (const Vector& f : set) {
      require(f.size() == model::kTargetLevels, "BranchProductState: factors must be 4-vectors");
    }
  }
}

Complex BranchProductState::overlap(const BranchProductState& other) const {
  require(n_ == other.n_, "BranchProductState::overlap: target counts differ");
  std::array<std::array<Complex, 2>, 2> products{};
  for (int m = 0; m < 2; ++m) {
    for (int mo = 0; mo < 2; ++mo) {
      Complex p{1.0};
      for (int k = 0; k < n_; ++k) {
        p *= factors_[m][static_cast<std::size_t>(k)].dot(
            other.factors_[mo][static_cast<std::size_t>(k)]);
      }
      products[m][mo] = p;
    }
  }
  Complex total{};
  for (int s = 0; s < kSectors; ++s) {
    for (int m = 0; m < 2; ++m) {
      for (int mo = 0; mo < 2; ++mo) {
        total += std::conj(coeff_[s][m]) * other.coeff_[s][mo] * products[m][mo];
      }
    }
  }
  return total;
}

StateVector BranchProductState::to_dense(int fock_cutoff) const {
  const SpaceLayout layout = model::system_layout(n_, fock_cutoff, true);
  constexpr std::array<std::pair<int, int>, kSectors> kSectorLevels{
      std::pair{0, 0}, std::pair{1, 0}, std::pair{0, 1}};  // (control, photons)
  Vector amps = Vector::Zero(layout.total_dim());
  for (int s = 0; s < kSectors; ++s) {
    for (int m = 0; m < 2; ++m) {
      if (coeff_[s][m] == Complex{}) continue;
      std::vector<Vector> parts;
      parts.push_back(Vector::Unit(fock_cutoff, kSectorLevels[s].second));
      for (const Vector& f : factors_[m]) parts.push_back(f);
      parts.push_back(Vector::Unit(model::kControlLevels, kSectorLevels[s].first));
      amps += coeff_[s][m] * product_state(layout, parts).amplitudes();
    }
  }
  return {layout, std::move(amps)};
}

ProductInput ProductInput::uniform(int n) {
  require(n >= 1, "ProductInput::uniform: n must be >= 1");
  const Vector plus = Vector::Constant(2, 1.0 / std::sqrt(2.0));
  return {plus, std::vector<Vector>(static_cast<std::size_t>(n), plus)};
}

namespace {

void check_input(const ProductInput& input, int n) {
  require(input.control.size() == 2, "product input: control must be a 2-vector");
  require(input.targets.size() == static_cast<std::size_t>(n),
          "product input: need one 2-vector per target");
  for (const Vector& t : input.targets) {
    require(t.size() == 2, "product input: targets must be 2-vectors");
  }
}

Vector lift(const Vector& qubit) {
  Vector v = Vector::Zero(model::kTargetLevels);
  v.head(2) = qubit;
  return v;
}

}  // namespace

BranchProductState branch_product_final_state(const PhysicalParams& params,
                                              const GateAngles& angles,
                                              const ProductInput& input, ModeKind mode) {
  require(mode != ModeKind::LossyFull,
          "branch_product_final_state: LossyFull needs the dense density-matrix simulation");
  const PhysicalParams p = with_gate_angles(params, angles);
  check_params(p, SimulationMode{mode});
  check_input(input, p.n);
  const PhysicalParams nominal = model::nominal(p);
  const PhysicalParams& couplings = couplings_for(p, nominal, mode);

  const Matrix p1 = pulse_unitary(nominal, -kPi / 2.0);
  const Matrix p3 = pulse_unitary(nominal, kPi / 2.0);
  const double t_disp = dispersive_time(nominal);

  std::array<std::vector<Vector>, 2> factors;
  for (int k = 0; k < p.n; ++k) {
    const Matrix stark = stark_unitary(p, k);
    // Photon-number blocks of the dispersive propagator on (cavity, target).
    const Matrix disp = dispersive_unitary(couplings, k, t_disp);
    for (int m = 0; m < 2; ++m) {
      const Matrix dm = disp.block(m * model::kTargetLevels, m * model::kTargetLevels,
                                   model::kTargetLevels, model::kTargetLevels);
      const Matrix u = p3 * dm * p1 * stark * p3 * dm * p1;
      factors[m].push_back(u * lift(input.targets[static_cast<std::size_t>(k)]));
    }
  }

  const double phi1 = couplings.g_r_actual * first_exchange_time(nominal);
  const double phi7 = couplings.g_r_actual * last_exchange_time(nominal);
  const Complex q0 = input.control(0), q1 = input.control(1);
  // After (i): |00> q0, |10> q1 cos(phi1), |01> -i q1 sin(phi1); (vii) mixes 10 and 01.
  const Complex c10 = q1 * std::cos(phi1);
  const Complex c01 = -kI * q1 * std::sin(phi1);
  const double c7 = std::cos(phi7), s7 = std::sin(phi7);
  std::array<std::array<Complex, 2>, BranchProductState::kSectors> coeff{};
  coeff[0][0] = q0;
  coeff[1][0] = c7 * c10;
  coeff[1][1] = -kI * s7 * c01;
  coeff[2][0] = -kI * s7 * c10;
  coeff[2][1] = c7 * c01;
  return {p.n, coeff, std::move(factors)};
}

BranchProductState ideal_branch_state(const GateAngles& angles, const ProductInput& input) {
  const int n = angles.size();
  check_input(input, n);
  std::array<std::vector<Vector>, 2> factors;
  for (int k = 0; k < n; ++k) {
    const Vector t = lift(input.targets[static_cast<std::size_t>(k)]);
    factors[0].push_back(t);
    Vector phased = t;
    phased(1) *= std::exp(kI * angles[static_cast<std::size_t>(k)]);
    factors[1].push_back(phased);
  }
  std::array<std::array<Complex, 2>, BranchProductState::kSectors> coeff{};
  coeff[0][0] = input.control(0);
  coeff[1][1] = input.control(1);
  return {n, coeff, std::move(factors)};
}

}  // namespace cavphase::protocol

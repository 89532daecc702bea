#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "cavphase/dynamics.hpp"
#include "cavphase/model.hpp"

namespace cavphase::model {
namespace {

constexpr double kPi = std::numbers::pi;

PhysicalParams one_target(double g, double delta_c) {
  PhysicalParams p;
  p.n = 1;
  p.g = g;
  p.g_k = {g};
  p.g_r = g;
  p.g_r_actual = g;
  p.delta_c = delta_c;
  p.delta = delta_c;
  p.omega_r = g;
  p.omega_k = {g};
  p.tau = 1.0;
  p.fock_cutoff = 2;
  return p;
}

TEST(Layout, OrderIsCavityTargetsControl) {
  const SpaceLayout l = system_layout(3, 2, true);
  EXPECT_EQ(l.dims(), (std::vector<int>{2, 4, 4, 4, 2}));
  EXPECT_EQ(control_subsystem(l), 4u);
  EXPECT_EQ(target_count(l), 3);
  EXPECT_FALSE(has_control(system_layout(2, 2, false)));
}

TEST(DispersiveFull, DecoupledLimitIsDiagonal) {
  PhysicalParams p = one_target(1.0, 7.0);
  p.n = 2;
  p.g_k = {0.0, 0.0};
  p.omega_k = {1.0, 1.0};
  const SpaceLayout l = system_layout(2, 2, false);
  const Matrix h = dispersive_hamiltonian_full(p, l).matrix();
  EXPECT_TRUE(h.isApprox(Matrix(h.diagonal().asDiagonal())));
  for (Eigen::Index i = 0; i < l.total_dim(); ++i) {
    const int excited = (l.digit(i, 1) == 3) + (l.digit(i, 2) == 3);
    EXPECT_EQ(h(i, i), Complex(7.0 * excited));
  }
}

TEST(DispersiveFull, HandIndexedCoupling) {
  const PhysicalParams p = one_target(0.3, 5.0);
  const SpaceLayout l = system_layout(1, 2, false);
  const Operator h = dispersive_hamiltonian_full(p, l);
  ASSERT_EQ(h.matrix().rows(), 8);
  EXPECT_EQ(h.hermiticity_error(), 0.0);
  // |1>_c|2> is index 1*4+2 = 6, |0>_c|3> is index 3.
  EXPECT_EQ(h.matrix()(6, 3), Complex(0.3));
  EXPECT_EQ(h.matrix()(3, 6), Complex(0.3));
  EXPECT_EQ((h.matrix().array() != Complex(0.0)).count(), 4);  // two couplings, two |3> levels
}

TEST(DispersiveFull, PiPulseAtLargeDetuning) {
  const double g = 1.0, b = 50.0;
  const PhysicalParams p = one_target(g, b * g);
  const SpaceLayout l = system_layout(1, 2, false);
  const double t = kPi * p.delta_c / (g * g);
  const std::array<int, 2> d{1, 2};
  const StateVector psi = basis_state(l, d);
  StateVector out = dynamics::evolve_unitary(dispersive_hamiltonian_full(p, l), t, psi);
  out = StateVector(l, frame_phases(p.delta_c, t, l).asDiagonal() * out.amplitudes());
  const Complex amp = out.amplitudes()(6);
  EXPECT_LT(std::abs(amp + 1.0), 5.0 / (b * b));
  EXPECT_LT(1.0 - fidelity_pure(StateVector(l, -psi.amplitudes()), out), 1.0 / (b * b));
}

TEST(DispersiveEffective, Spectrum) {
  const PhysicalParams p = one_target(0.4, 4.0);
  const SpaceLayout l = system_layout(1, 2, false);
  const Matrix h = dispersive_hamiltonian_effective(p, l).matrix();
  EXPECT_TRUE(h.isApprox(Matrix(h.diagonal().asDiagonal())));
  EXPECT_NEAR(h(6, 6).real(), -0.4 * 0.4 / 4.0, 1e-16);
  for (int level = 0; level < 4; ++level) EXPECT_EQ(h(level, level), Complex(0.0));
}

TEST(DispersiveEffective, PhaseFlipAtNominalTime) {
  const PhysicalParams p = one_target(2.0, 20.0);
  const SpaceLayout l = system_layout(1, 2, false);
  const Operator u = dynamics::propagator(dispersive_hamiltonian_effective(p, l),
                                          kPi * p.delta_c / (p.g * p.g));
  Matrix expected = Matrix::Identity(8, 8);
  expected(6, 6) = -1.0;
  EXPECT_NEAR((u.matrix() - expected).cwiseAbs().maxCoeff(), 0.0, 1e-14);
}

TEST(ResonantJc, ExchangeMappings) {
  const double gr = 3.0;
  const SpaceLayout l = system_layout(1, 2, true);
  const Operator h = resonant_jc_hamiltonian(gr, l);
  auto idx = [&](int c, int atom, int control) {
    const std::array<int, 3> d{c, atom, control};
    return l.index(d);
  };
  const Matrix u1 = dynamics::propagator(h, kPi / (2.0 * gr)).matrix();
  EXPECT_NEAR(std::abs(u1(idx(1, 0, 0), idx(0, 0, 1)) - (-kI)), 0.0, 1e-14);
  const Matrix u7 = dynamics::propagator(h, 3.0 * kPi / (2.0 * gr)).matrix();
  EXPECT_NEAR(std::abs(u7(idx(0, 0, 1), idx(1, 0, 0)) - kI), 0.0, 1e-14);
  for (double t : {0.1, 1.7, 5.0}) {
    const Matrix u = dynamics::propagator(h, t).matrix();
    EXPECT_NEAR(std::abs(u(idx(0, 2, 0), idx(0, 2, 0)) - 1.0), 0.0, 1e-14);
  }
}

TEST(ResonantPulse, StepMappings) {
  const double om = 2.5, t = kPi / (4.0 * om);
  const SpaceLayout l = system_layout(1, 2, false);
  const double r = 1.0 / std::sqrt(2.0);
  auto run = [&](double phase, const Vector& in) {
    const Operator h = resonant_pulse_hamiltonian({Transition::k12, phase, om, t}, 1, l);
    EXPECT_EQ(h.hermiticity_error(), 0.0);
    return Vector(dynamics::propagator(h, t).matrix().topLeftCorner(4, 4) * in);
  };
  Vector e1 = Vector::Zero(4), e2 = Vector::Zero(4);
  e1(1) = 1.0;
  e2(2) = 1.0;
  EXPECT_NEAR((run(-kPi / 2, e1) - r * (e1 + e2)).norm(), 0.0, 1e-14);
  EXPECT_NEAR((run(kPi / 2, r * (e1 - e2)) - (-e2)).norm(), 0.0, 1e-14);
  EXPECT_NEAR((run(-kPi / 2, e2) - (-r * (e1 - e2))).norm(), 0.0, 1e-14);
  EXPECT_NEAR((run(kPi / 2, r * (e1 + e2)) - e1).norm(), 0.0, 1e-14);
}

TEST(OffresonantPulse, ZeroRabiIsDiagonal) {
  const SpaceLayout l = system_layout(1, 2, false);
  const Matrix h = offresonant_pulse_hamiltonian(0.0, 3.0, 1, l).matrix();
  Matrix expected = Matrix::Zero(8, 8);
  expected(3, 3) = expected(7, 7) = 3.0;
  EXPECT_EQ(h, expected);
}

TEST(OffresonantPulse, StarkPhaseInFarDetunedLimit) {
  const double omega = 1.0, delta = 50.0, t = 40.0;
  const SpaceLayout l = system_layout(1, 2, false);
  const Operator h = offresonant_pulse_hamiltonian(omega, delta, 1, l);
  EXPECT_EQ(h.hermiticity_error(), 0.0);
  const Matrix u = dynamics::propagator(h, t).matrix().topLeftCorner(4, 4);
  const Complex expected = std::exp(kI * stark_phase(omega, t, delta));
  // Residual phase error from the fourth-order shift omega^4 t / delta^3.
  const double bound =
      2.0 * std::pow(omega / delta, 2) + t * std::pow(omega, 4) / std::pow(delta, 3);
  EXPECT_LT(std::abs(u(2, 2) - expected), bound);
}

TEST(StarkPhase, ReferenceValues) {
  const double om = 2.0, delta = 40.0;
  const double tau = (delta / (om * om)) * (2.0 * kPi / 4.0);
  EXPECT_NEAR(stark_phase(om, tau, delta), kPi / 2, 1e-15);
  EXPECT_NEAR(stark_phase(om / std::sqrt(2.0), tau, delta), kPi / 4, 1e-15);
  EXPECT_EQ(stark_phase(om, 0.0, delta), 0.0);
  EXPECT_NEAR(stark_phase(om, 5.0 * tau, delta, true), kPi / 2, 1e-13);
}

TEST(Collapse, ListShapeAndTracePreservation) {
  const NoiseRates noise = NoiseRates::from_lifetimes(1.0, 2.0, 3.0, 4.0);
  EXPECT_DOUBLE_EQ(noise[DecayPath::k32], 0.25);
  EXPECT_DOUBLE_EQ(noise[DecayPath::k20], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(noise[DecayPath::k10], 0.5);
  const SpaceLayout l1 = system_layout(1, 2, false);
  EXPECT_EQ(collapse_operators(noise, l1).size(), 7u);
  EXPECT_EQ(collapse_operators(noise, system_layout(3, 2, true)).size(), 19u);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> d;
  Matrix m(8, 8);
  for (Eigen::Index i = 0; i < 8; ++i)
    for (Eigen::Index j = 0; j < 8; ++j) m(i, j) = {d(rng), d(rng)};
  const Matrix rho = m * m.adjoint();
  for (const Operator& c : collapse_operators(noise, l1)) {
    const Matrix& cm = c.matrix();
    const Matrix cc = cm.adjoint() * cm;
    const Matrix dis = 2.0 * cm * rho * cm.adjoint() - cc * rho - rho * cc;
    EXPECT_NEAR(std::abs(dis.trace()), 0.0, 1e-12);
  }
}

TEST(Noise, ZeroDetection) {
  EXPECT_TRUE(NoiseRates{}.is_zero());
  EXPECT_FALSE(reference_noise().is_zero());
  NoiseRates bad;
  bad.kappa = -1.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Qft, AnglesAndRatios) {
  const double omega_2 = 3.0, delta = 30.0;
  const QftParameters one = qft_parameters(1, omega_2, delta);
  ASSERT_EQ(one.omega.size(), 1u);
  EXPECT_NEAR(stark_phase(one.omega[0], one.tau, delta), kPi / 2, 1e-15);

  const QftParameters q = qft_parameters(15, omega_2, delta);
  for (std::size_t i = 0; i < q.omega.size(); ++i) {
    const int k = static_cast<int>(i) + 2;
    EXPECT_NEAR(stark_phase(q.omega[i], q.tau, delta), 2.0 * kPi / std::pow(2.0, k), 1e-12);
    if (i > 0) EXPECT_NEAR(q.omega[i] / q.omega[i - 1], 1.0 / std::sqrt(2.0), 1e-15);
  }
}

TEST(QualityFactor, Values) {
  const double q = required_quality_factor(2.0 * kPi * 50.9995e9, 1.0 / 3.0e-2);
  EXPECT_NEAR(q / 9.6e9, 1.0, 0.02);
  EXPECT_DOUBLE_EQ(required_quality_factor(5.0, 5.0), 1.0);
  EXPECT_DOUBLE_EQ(required_quality_factor(5.0, 2.0), 2.0 * required_quality_factor(5.0, 4.0));
}

TEST(Reference, Preset) {
  const PhysicalParams p = reference_parameters(10.0);
  EXPECT_EQ(p.n, 3);
  EXPECT_DOUBLE_EQ(p.g, 2.0 * kPi * 5.0e4);
  EXPECT_DOUBLE_EQ(p.g_r, p.g);
  EXPECT_DOUBLE_EQ(p.omega_r, p.g_r);
  EXPECT_DOUBLE_EQ(p.g_r_actual, 0.99 * p.g_r);
  for (double gk : p.g_k) EXPECT_DOUBLE_EQ(gk, 0.99 * p.g);
  EXPECT_DOUBLE_EQ(p.delta_c, 10.0 * p.g);
  EXPECT_DOUBLE_EQ(p.delta, 10.0 * p.omega_k[0]);
  EXPECT_DOUBLE_EQ(p.tau, (p.delta / (p.omega_k[0] * p.omega_k[0])) * (2.0 * kPi / 4.0));
  EXPECT_DOUBLE_EQ(p.tau_m, 1e-6);
  const NoiseRates n = reference_noise();
  EXPECT_NEAR(n.kappa, 1.0 / 3.0e-2, 1e-9);
  for (double g : n.gamma) EXPECT_NEAR(g, 1.0 / 3.0e-2, 1e-9);
}

TEST(Params, ValidationRejectsMismatchedSizes) {
  PhysicalParams p = one_target(1.0, 10.0);
  p.g_k = {1.0, 1.0};
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Frame, ExcitationNumberCommutesWithFullHamiltonian) {
  PhysicalParams p = one_target(0.7, 6.0);
  p.n = 2;
  p.g_k = {0.7, 0.6};
  p.omega_k = {1.0, 1.0};
  const SpaceLayout l = system_layout(2, 3, false);
  const Matrix h = dispersive_hamiltonian_full(p, l).matrix();
  const Matrix n = excitation_number(l).matrix();
  EXPECT_NEAR((h * n - n * h).cwiseAbs().maxCoeff(), 0.0, 1e-14);
}

}  // namespace
}  // namespace cavphase::model

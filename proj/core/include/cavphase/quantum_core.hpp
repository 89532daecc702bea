#pragma once

// Dense complex linear algebra over tensor-product Hilbert spaces.
//
// Subsystem ordering is fixed: the cavity mode comes first, then the target
// atoms in ascending order, then (optionally) the control atom. Basis indices
// are row-major over that order, so the last subsystem varies fastest.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cavphase {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

class SpaceLayout {
 public:
  SpaceLayout() = default;
  explicit SpaceLayout(std::vector<int> subsystem_dims);

  [[nodiscard]] const std::vector<int>& dims() const { return dims_; }
  [[nodiscard]] int dim(std::size_t subsystem) const { return dims_.at(subsystem); }
  [[nodiscard]] std::size_t subsystem_count() const { return dims_.size(); }
  [[nodiscard]] Eigen::Index total_dim() const { return total_; }

  /// Stride of a subsystem digit in the row-major basis index.
  [[nodiscard]] Eigen::Index stride(std::size_t subsystem) const { return strides_.at(subsystem); }

  [[nodiscard]] std::vector<int> digits(Eigen::Index index) const;
  [[nodiscard]] Eigen::Index index(std::span<const int> digits) const;
  [[nodiscard]] int digit(Eigen::Index index, std::size_t subsystem) const {
    return static_cast<int>((index / strides_[subsystem]) % dims_[subsystem]);
  }

  friend bool operator==(const SpaceLayout&, const SpaceLayout&) = default;

 private:
  std::vector<int> dims_;
  std::vector<Eigen::Index> strides_;
  Eigen::Index total_ = 0;
};

class StateVector {
 public:
  StateVector(SpaceLayout layout, Vector amplitudes);

  [[nodiscard]] const SpaceLayout& layout() const { return layout_; }
  [[nodiscard]] const Vector& amplitudes() const { return amps_; }
  [[nodiscard]] double norm() const { return amps_.norm(); }
  [[nodiscard]] StateVector normalized() const;

 private:
  SpaceLayout layout_;
  Vector amps_;
};

class Operator {
 public:
  Operator(SpaceLayout layout, Matrix entries);

  static Operator identity(const SpaceLayout& layout);
  static Operator zero(const SpaceLayout& layout);

  [[nodiscard]] const SpaceLayout& layout() const { return layout_; }
  [[nodiscard]] const Matrix& matrix() const { return m_; }

  [[nodiscard]] Operator adjoint() const { return {layout_, m_.adjoint()}; }
  [[nodiscard]] StateVector apply(const StateVector& psi) const;

  /// max_ij |A_ij - conj(A_ji)|
  [[nodiscard]] double hermiticity_error() const;
  [[nodiscard]] double max_abs() const;

  Operator& operator+=(const Operator& other);
  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator*(const Operator& a, const Operator& b);
  friend Operator operator*(Complex s, const Operator& a) { return {a.layout_, s * a.m_}; }

 private:
  SpaceLayout layout_;
  Matrix m_;
};

struct DensityDiagnostics {
  double hermiticity_error = 0.0;
  Complex trace{};
  double min_eigenvalue = 0.0;
};

class DensityMatrix {
 public:
  DensityMatrix(SpaceLayout layout, Matrix entries);

  static DensityMatrix from_pure(const StateVector& psi);
  static DensityMatrix maximally_mixed(const SpaceLayout& layout);

  [[nodiscard]] const SpaceLayout& layout() const { return layout_; }
  [[nodiscard]] const Matrix& matrix() const { return m_; }
  [[nodiscard]] Complex trace() const { return m_.trace(); }

  /// Hermiticity error, trace and smallest eigenvalue of the Hermitian part.
  [[nodiscard]] DensityDiagnostics diagnostics() const;

 private:
  SpaceLayout layout_;
  Matrix m_;
};

/// Ladder operator of a Fock space truncated to `cutoff` levels.
Matrix annihilation(int cutoff);

/// |row><col| on a single subsystem of dimension `dim`.
Matrix transition(int dim, int row, int col);

/// I (x) ... (x) local_op (x) ... (x) I with local_op acting on `subsystem`.
Operator embed(const Matrix& local_op, std::size_t subsystem, const SpaceLayout& layout);

/// Embedding of an operator on several subsystems; its basis is row-major
/// over `subsystems` in the order given.
Operator embed(const Matrix& local_op, std::span<const std::size_t> subsystems,
               const SpaceLayout& layout);

/// rows <- embed(local_op, subsystems, layout) * rows, without forming the
/// embedded operator.
void apply_local(Matrix& rows, const Matrix& local_op, std::span<const std::size_t> subsystems,
                 const SpaceLayout& layout);

Matrix kron(const Matrix& a, const Matrix& b);

StateVector basis_state(const SpaceLayout& layout, std::span<const int> digits);
StateVector product_state(const SpaceLayout& layout, std::span<const Vector> factors);

/// |<psi_id|psi>|^2
double fidelity_pure(const StateVector& psi_id, const StateVector& psi);

/// Re <psi_id|rho|psi_id>
double fidelity_mixed(const StateVector& psi_id, const DensityMatrix& rho);

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep);

/// Tolerance used when validating Hermitian inputs, relative to max(1, ||A||_max).
inline constexpr double kHermiticityTolerance = 1e-10;

}  // namespace cavphase

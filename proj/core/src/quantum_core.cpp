#include "cavphase/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cavphase {

namespace {

void require_same_layout(const SpaceLayout& a, const SpaceLayout& b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": layout mismatch");
  }
}

void require_square(const Matrix& m, Eigen::Index dim, const char* what) {
  if (m.rows() != dim || m.cols() != dim) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(dim) + "x" +
                                std::to_string(dim) + " matrix, got " + std::to_string(m.rows()) +
                                "x" + std::to_string(m.cols()));
  }
}

double hermiticity_of(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace

SpaceLayout::SpaceLayout(std::vector<int> subsystem_dims) : dims_(std::move(subsystem_dims)) {
  if (dims_.empty()) {
    throw std::invalid_argument("SpaceLayout: at least one subsystem is required");
  }
  for (int d : dims_) {
    if (d < 2) {
      throw std::invalid_argument("SpaceLayout: subsystem dimension must be >= 2, got " +
                                  std::to_string(d));
    }
  }
  strides_.assign(dims_.size(), 1);
  total_ = 1;
  for (std::size_t i = dims_.size(); i-- > 0;) {
    strides_[i] = total_;
    total_ *= dims_[i];
  }
}

std::vector<int> SpaceLayout::digits(Eigen::Index index) const {
  std::vector<int> out(dims_.size());
  for (std::size_t i = 0; i < dims_.size(); ++i) out[i] = digit(index, i);
  return out;
}

Eigen::Index SpaceLayout::index(std::span<const int> digits) const {
  if (digits.size() != dims_.size()) {
    throw std::invalid_argument("SpaceLayout::index: wrong number of digits");
  }
  Eigen::Index idx = 0;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (digits[i] < 0 || digits[i] >= dims_[i]) {
      throw std::invalid_argument("SpaceLayout::index: digit out of range");
    }
    idx += digits[i] * strides_[i];
  }
  return idx;
}

StateVector::StateVector(SpaceLayout layout, Vector amplitudes)
    : layout_(std::move(layout)), amps_(std::move(amplitudes)) {
  if (amps_.size() != layout_.total_dim()) {
    throw std::invalid_argument("StateVector: amplitude count does not match layout");
  }
}

StateVector StateVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw std::invalid_argument("StateVector::normalized: zero vector");
  return {layout_, amps_ / n};
}

Operator::Operator(SpaceLayout layout, Matrix entries)
    : layout_(std::move(layout)), m_(std::move(entries)) {
  require_square(m_, layout_.total_dim(), "Operator");
}

Operator Operator::identity(const SpaceLayout& layout) {
  return {layout, Matrix::Identity(layout.total_dim(), layout.total_dim())};
}

Operator Operator::zero(const SpaceLayout& layout) {
  return {layout, Matrix::Zero(layout.total_dim(), layout.total_dim())};
}

StateVector Operator::apply(const StateVector& psi) const {
  require_same_layout(layout_, psi.layout(), "Operator::apply");
  return {layout_, m_ * psi.amplitudes()};
}

double Operator::hermiticity_error() const { return hermiticity_of(m_); }

double Operator::max_abs() const { return m_.size() == 0 ? 0.0 : m_.cwiseAbs().maxCoeff(); }

Operator& Operator::operator+=(const Operator& other) {
  require_same_layout(layout_, other.layout_, "Operator::operator+=");
  m_ += other.m_;
  return *this;
}

Operator operator*(const Operator& a, const Operator& b) {
  require_same_layout(a.layout_, b.layout_, "Operator::operator*");
  return {a.layout_, a.m_ * b.m_};
}

DensityMatrix::DensityMatrix(SpaceLayout layout, Matrix entries)
    : layout_(std::move(layout)), m_(std::move(entries)) {
  require_square(m_, layout_.total_dim(), "DensityMatrix");
}

DensityMatrix DensityMatrix::from_pure(const StateVector& psi) {
  const Vector& v = psi.amplitudes();
  return {psi.layout(), v * v.adjoint()};
}

DensityMatrix DensityMatrix::maximally_mixed(const SpaceLayout& layout) {
  const auto d = layout.total_dim();
  return {layout, Matrix::Identity(d, d) / static_cast<double>(d)};
}

DensityDiagnostics DensityMatrix::diagnostics() const {
  DensityDiagnostics out;
  out.hermiticity_error = hermiticity_of(m_);
  out.trace = m_.trace();
  const Matrix herm = 0.5 * (m_ + m_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = solver.eigenvalues().minCoeff();
  return out;
}

Matrix annihilation(int cutoff) {
  if (cutoff < 2) {
    throw std::invalid_argument("annihilation: cutoff must be >= 2, got " +
                                std::to_string(cutoff));
  }
  Matrix a = Matrix::Zero(cutoff, cutoff);
  for (int m = 1; m < cutoff; ++m) a(m - 1, m) = std::sqrt(static_cast<double>(m));
  return a;
}

Matrix transition(int dim, int row, int col) {
  if (row < 0 || row >= dim || col < 0 || col >= dim) {
    throw std::invalid_argument("transition: level out of range");
  }
  Matrix m = Matrix::Zero(dim, dim);
  m(row, col) = 1.0;
  return m;
}

Operator embed(const Matrix& local_op, std::size_t subsystem, const SpaceLayout& layout) {
  if (subsystem >= layout.subsystem_count()) {
    throw std::invalid_argument("embed: subsystem index out of range");
  }
  const int d = layout.dim(subsystem);
  if (local_op.rows() != d || local_op.cols() != d) {
    throw std::invalid_argument("embed: local operator is " + std::to_string(local_op.rows()) +
                                "x" + std::to_string(local_op.cols()) + " but subsystem " +
                                std::to_string(subsystem) + " has dimension " +
                                std::to_string(d));
  }
  const auto total = layout.total_dim();
  const auto stride = layout.stride(subsystem);
  Matrix out = Matrix::Zero(total, total);
  for (Eigen::Index row = 0; row < total; ++row) {
    const int r = layout.digit(row, subsystem);
    const Eigen::Index base = row - r * stride;
    for (int c = 0; c < d; ++c) {
      const Complex v = local_op(r, c);
      if (v != Complex{}) out(row, base + c * stride) = v;
    }
  }
  return {layout, std::move(out)};
}

namespace {

struct LocalIndexing {
  Eigen::Index local_dim = 1;
  std::vector<Eigen::Index> offsets;  // full-index offset of each local basis state
  std::vector<Eigen::Index> bases;    // full indices with every listed digit zero
};

LocalIndexing local_indexing(std::span<const std::size_t> subsystems, const SpaceLayout& layout) {
  if (subsystems.empty()) throw std::invalid_argument("embed: no subsystems given");
  std::vector<bool> used(layout.subsystem_count(), false);
  LocalIndexing out;
  for (auto s : subsystems) {
    if (s >= layout.subsystem_count() || used[s]) {
      throw std::invalid_argument("embed: invalid subsystem list");
    }
    used[s] = true;
    out.local_dim *= layout.dim(s);
  }
  out.offsets.assign(static_cast<std::size_t>(out.local_dim), 0);
  for (Eigen::Index j = 0; j < out.local_dim; ++j) {
    Eigen::Index rest = j, off = 0;
    for (std::size_t i = subsystems.size(); i-- > 0;) {
      const int d = layout.dim(subsystems[i]);
      off += (rest % d) * layout.stride(subsystems[i]);
      rest /= d;
    }
    out.offsets[static_cast<std::size_t>(j)] = off;
  }
  for (Eigen::Index i = 0; i < layout.total_dim(); ++i) {
    bool zero = true;
    for (auto s : subsystems) zero = zero && layout.digit(i, s) == 0;
    if (zero) out.bases.push_back(i);
  }
  return out;
}

}  // namespace

Operator embed(const Matrix& local_op, std::span<const std::size_t> subsystems,
               const SpaceLayout& layout) {
  const LocalIndexing ix = local_indexing(subsystems, layout);
  if (local_op.rows() != ix.local_dim || local_op.cols() != ix.local_dim) {
    throw std::invalid_argument("embed: local operator dimension does not match subsystems");
  }
  Matrix out = Matrix::Zero(layout.total_dim(), layout.total_dim());
  for (Eigen::Index base : ix.bases) {
    for (Eigen::Index c = 0; c < ix.local_dim; ++c) {
      for (Eigen::Index r = 0; r < ix.local_dim; ++r) {
        const Complex v = local_op(r, c);
        if (v != Complex{}) {
          out(base + ix.offsets[static_cast<std::size_t>(r)],
              base + ix.offsets[static_cast<std::size_t>(c)]) = v;
        }
      }
    }
  }
  return {layout, std::move(out)};
}

void apply_local(Matrix& rows, const Matrix& local_op, std::span<const std::size_t> subsystems,
                 const SpaceLayout& layout) {
  const LocalIndexing ix = local_indexing(subsystems, layout);
  if (local_op.rows() != ix.local_dim || local_op.cols() != ix.local_dim) {
    throw std::invalid_argument("apply_local: local operator dimension does not match subsystems");
  }
  if (rows.rows() != layout.total_dim()) {
    throw std::invalid_argument("apply_local: row count does not match layout");
  }
  Vector in(ix.local_dim), out(ix.local_dim);
  for (Eigen::Index c = 0; c < rows.cols(); ++c) {
    for (Eigen::Index base : ix.bases) {
      for (Eigen::Index j = 0; j < ix.local_dim; ++j) {
        in(j) = rows(base + ix.offsets[static_cast<std::size_t>(j)], c);
      }
      out.noalias() = local_op * in;
      for (Eigen::Index j = 0; j < ix.local_dim; ++j) {
        rows(base + ix.offsets[static_cast<std::size_t>(j)], c) = out(j);
      }
    }
  }
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

StateVector basis_state(const SpaceLayout& layout, std::span<const int> digits) {
  Vector v = Vector::Zero(layout.total_dim());
  v(layout.index(digits)) = 1.0;
  return {layout, std::move(v)};
}

StateVector product_state(const SpaceLayout& layout, std::span<const Vector> factors) {
  if (factors.size() != layout.subsystem_count()) {
    throw std::invalid_argument("product_state: one factor per subsystem is required");
  }
  Vector v = Vector::Ones(1);
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i].size() != layout.dim(i)) {
      throw std::invalid_argument("product_state: factor dimension mismatch");
    }
    Vector next(v.size() * factors[i].size());
    for (Eigen::Index a = 0; a < v.size(); ++a) {
      next.segment(a * factors[i].size(), factors[i].size()) = v(a) * factors[i];
    }
    v = std::move(next);
  }
  return {layout, std::move(v)};
}

double fidelity_pure(const StateVector& psi_id, const StateVector& psi) {
  require_same_layout(psi_id.layout(), psi.layout(), "fidelity_pure");
  return std::norm(psi_id.amplitudes().dot(psi.amplitudes()));
}

double fidelity_mixed(const StateVector& psi_id, const DensityMatrix& rho) {
  require_same_layout(psi_id.layout(), rho.layout(), "fidelity_mixed");
  const Matrix& m = rho.matrix();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (hermiticity_of(m) > kHermiticityTolerance * scale) {
    throw std::invalid_argument("fidelity_mixed: density matrix is not Hermitian");
  }
  const Vector& v = psi_id.amplitudes();
  const Complex f = v.dot(m * v);
  if (std::abs(f.imag()) >= 1e-10) {
    throw std::invalid_argument("fidelity_mixed: expectation value has an imaginary part");
  }
  return f.real();
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep) {
  const SpaceLayout& layout = rho.layout();
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
  std::vector<std::size_t> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  if (std::adjacent_find(kept.begin(), kept.end()) != kept.end() ||
      kept.back() >= layout.subsystem_count()) {
    throw std::invalid_argument("partial_trace: invalid keep set");
  }
  std::vector<int> kept_dims;
  std::vector<bool> is_kept(layout.subsystem_count(), false);
  for (auto k : kept) {
    kept_dims.push_back(layout.dim(k));
    is_kept[k] = true;
  }
  SpaceLayout reduced(kept_dims);

  // Map every full index to (kept index, traced index).
  const auto total = layout.total_dim();
  std::vector<Eigen::Index> kept_index(total), traced_index(total);
  for (Eigen::Index i = 0; i < total; ++i) {
    Eigen::Index ki = 0, ti = 0;
    for (std::size_t s = 0; s < layout.subsystem_count(); ++s) {
      const int dgt = layout.digit(i, s);
      if (is_kept[s]) {
        ki = ki * layout.dim(s) + dgt;
      } else {
        ti = ti * layout.dim(s) + dgt;
      }
    }
    kept_index[i] = ki;
    traced_index[i] = ti;
  }

  Matrix out = Matrix::Zero(reduced.total_dim(), reduced.total_dim());
  const Matrix& m = rho.matrix();
  for (Eigen::Index c = 0; c < total; ++c) {
    for (Eigen::Index r = 0; r < total; ++r) {
      if (traced_index[r] == traced_index[c]) out(kept_index[r], kept_index[c]) += m(r, c);
    }
  }
  return {reduced, std::move(out)};
}

}  // namespace cavphase

#include "cavphase/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>

#include <Eigen/Sparse>

namespace cavphase::dynamics {

namespace {

using Sparse = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;
using Index = Eigen::Index;

void require_hermitian(const Operator& h, const char* what) {
  const double scale = std::max(1.0, h.max_abs());
  if (h.hermiticity_error() > kHermiticityTolerance * scale) {
    throw std::invalid_argument(std::string(what) + ": Hamiltonian is not Hermitian");
  }
}

void require_duration(double t, const char* what) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument(std::string(what) + ": duration must be >= 0");
  }
}

Sparse to_sparse(const Matrix& m) {
  std::vector<Eigen::Triplet<Complex>> trips;
  for (Index c = 0; c < m.cols(); ++c) {
    for (Index r = 0; r < m.rows(); ++r) {
      if (m(r, c) != Complex{}) trips.emplace_back(r, c, m(r, c));
    }
  }
  Sparse s(m.rows(), m.cols());
  s.setFromTriplets(trips.begin(), trips.end());
  return s;
}

// Basis states reachable from `seed` under H (both directions) and the
// collapse operators (column -> row). Amplitudes outside this set stay zero.
std::vector<Index> reachable(const std::vector<bool>& seed, const Sparse& h,
                             const std::vector<Sparse>& jumps) {
  const Index n = h.rows();
  std::vector<std::vector<Index>> adj(static_cast<std::size_t>(n));
  for (Index r = 0; r < n; ++r) {
    for (Sparse::InnerIterator it(h, r); it; ++it) {
      if (it.col() != r) adj[static_cast<std::size_t>(r)].push_back(it.col());
    }
  }
  for (const Sparse& c : jumps) {
    for (Index r = 0; r < n; ++r) {
      for (Sparse::InnerIterator it(c, r); it; ++it) {
        if (it.col() != r) adj[static_cast<std::size_t>(it.col())].push_back(r);
      }
    }
  }
  std::vector<bool> seen = seed;
  std::deque<Index> queue;
  for (Index i = 0; i < n; ++i) {
    if (seen[static_cast<std::size_t>(i)]) queue.push_back(i);
  }
  while (!queue.empty()) {
    const Index i = queue.front();
    queue.pop_front();
    for (Index j : adj[static_cast<std::size_t>(i)]) {
      if (!seen[static_cast<std::size_t>(j)]) {
        seen[static_cast<std::size_t>(j)] = true;
        queue.push_back(j);
      }
    }
  }
  std::vector<Index> out;
  for (Index i = 0; i < n; ++i) {
    if (seen[static_cast<std::size_t>(i)]) out.push_back(i);
  }
  return out;
}

Sparse restrict(const Sparse& m, const std::vector<Index>& rows, const std::vector<Index>& cols) {
  std::vector<Index> col_pos(static_cast<std::size_t>(m.cols()), -1);
  for (std::size_t j = 0; j < cols.size(); ++j) col_pos[static_cast<std::size_t>(cols[j])] = static_cast<Index>(j);
  std::vector<Eigen::Triplet<Complex>> trips;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Sparse::InnerIterator it(m, rows[i]); it; ++it) {
      const Index j = col_pos[static_cast<std::size_t>(it.col())];
      if (j >= 0) trips.emplace_back(static_cast<Index>(i), j, it.value());
    }
  }
  Sparse out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

Matrix restrict_dense(const Matrix& m, const std::vector<Index>& rows,
                      const std::vector<Index>& cols) {
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out(static_cast<Index>(i), static_cast<Index>(j)) = m(rows[i], cols[j]);
    }
  }
  return out;
}

// One collapse operator restricted to the row and column supports.
struct Jump {
  bool monomial = true;
  // monomial form: at most one nonzero per row and per column
  std::vector<Index> row_src, row_dst, col_src, col_dst;
  std::vector<Complex> row_amp, col_amp;
  // general form
  Sparse on_rows, on_cols_adjoint;
};

bool is_monomial(const Sparse& c) {
  std::vector<int> per_col(static_cast<std::size_t>(c.cols()), 0);
  for (Index r = 0; r < c.rows(); ++r) {
    int per_row = 0;
    for (Sparse::InnerIterator it(c, r); it; ++it) {
      if (++per_row > 1) return false;
      if (++per_col[static_cast<std::size_t>(it.col())] > 1) return false;
    }
  }
  return true;
}

void monomial_pairs(const Sparse& c, std::vector<Index>& src, std::vector<Index>& dst,
                    std::vector<Complex>& amp) {
  for (Index r = 0; r < c.rows(); ++r) {
    for (Sparse::InnerIterator it(c, r); it; ++it) {
      dst.push_back(r);
      src.push_back(it.col());
      amp.push_back(it.value());
    }
  }
}

// The Lindblad generator restricted to a row support R and column support C:
// L(X) = -i (Hnh X - X Hnh+) + 2 sum_c c X c+ with Hnh = H - i sum_c c+ c.
class RestrictedGenerator {
 public:
  RestrictedGenerator(const Sparse& h, const std::vector<Sparse>& jumps,
                      const std::vector<Index>& rows, const std::vector<Index>& cols) {
    Sparse k(h.rows(), h.cols());
    for (const Sparse& c : jumps) k += Sparse(c.adjoint() * c);
    const Sparse h_nh = h - Complex(0.0, 1.0) * k;
    left_ = Complex(0.0, -1.0) * restrict(h_nh, rows, rows);
    right_ = Complex(0.0, 1.0) * Sparse(restrict(h_nh, cols, cols).adjoint());

    for (const Sparse& c : jumps) {
      Jump j;
      const Sparse cr = restrict(c, rows, rows);
      const Sparse cc = restrict(c, cols, cols);
      if (cr.nonZeros() == 0 || cc.nonZeros() == 0) continue;
      j.monomial = is_monomial(cr) && is_monomial(cc);
      if (j.monomial) {
        monomial_pairs(cr, j.row_src, j.row_dst, j.row_amp);
        monomial_pairs(cc, j.col_src, j.col_dst, j.col_amp);
        for (auto& a : j.col_amp) a = 2.0 * std::conj(a);
      } else {
        j.on_rows = 2.0 * cr;
        j.on_cols_adjoint = cc.adjoint();
      }
      jumps_.push_back(std::move(j));
    }
  }

  void operator()(const Matrix& x, Matrix& out) const {
    out.noalias() = left_ * x;
    out.noalias() += x * right_;
    for (const Jump& j : jumps_) {
      if (j.monomial) {
        for (std::size_t q = 0; q < j.col_src.size(); ++q) {
          const Complex wc = j.col_amp[q];
          const Complex* src = x.col(j.col_src[q]).data();
          Complex* dst = out.col(j.col_dst[q]).data();
          for (std::size_t p = 0; p < j.row_src.size(); ++p) {
            dst[j.row_dst[p]] += j.row_amp[p] * wc * src[j.row_src[p]];
          }
        }
      } else {
        out.noalias() += (j.on_rows * x) * j.on_cols_adjoint;
      }
    }
  }

 private:
  Sparse left_, right_;
  std::vector<Jump> jumps_;
};

double spectral_spread(const Matrix& h_rows, const Matrix& h_cols) {
  Eigen::SelfAdjointEigenSolver<Matrix> er(h_rows, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Matrix> ec(h_cols, Eigen::EigenvaluesOnly);
  const double hi = std::max(er.eigenvalues().maxCoeff(), ec.eigenvalues().maxCoeff());
  const double lo = std::min(er.eigenvalues().minCoeff(), ec.eigenvalues().minCoeff());
  return hi - lo;
}

}  // namespace

void EvolutionConfig::validate() const {
  if (!(dt >= 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("EvolutionConfig: dt must be >= 0");
  }
  if (!(max_phase_per_step > 0.0) || !std::isfinite(max_phase_per_step)) {
    throw std::invalid_argument("EvolutionConfig: max_phase_per_step must be > 0");
  }
  if (method == Method::kRk4 && max_phase_per_step > 2.5) {
    throw std::invalid_argument("EvolutionConfig: RK4 is unstable above 2.5 rad per step");
  }
  if (method == Method::kTaylor && (taylor_order < 4 || max_phase_per_step > 8.0)) {
    throw std::invalid_argument(
        "EvolutionConfig: Taylor scheme needs taylor_order >= 4 and at most 8 rad per step");
  }
}

Operator propagator(const Operator& h, double t) {
  require_hermitian(h, "propagator");
  require_duration(t, "propagator");
  const Matrix& m = h.matrix();
  const Index d = m.rows();
  const Vector diag = m.diagonal();
  const bool diagonal = (m - Matrix(diag.asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
  if (diagonal) {
    Vector phases(d);
    for (Index i = 0; i < d; ++i) phases(i) = std::exp(-kI * (diag(i).real() * t));
    return {h.layout(), Matrix(phases.asDiagonal())};
  }
  const Matrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(herm);
  const Matrix& v = solver.eigenvectors();
  Vector phases(d);
  for (Index i = 0; i < d; ++i) phases(i) = std::exp(-kI * (solver.eigenvalues()(i) * t));
  return {h.layout(), v * phases.asDiagonal() * v.adjoint()};
}

StateVector evolve_unitary(const Operator& h, double t, const StateVector& psi) {
  return propagator(h, t).apply(psi);
}

DensityMatrix apply_unitary(const Operator& u, const DensityMatrix& rho) {
  if (u.layout() != rho.layout()) throw std::invalid_argument("apply_unitary: layout mismatch");
  return {rho.layout(), u.matrix() * rho.matrix() * u.matrix().adjoint()};
}

Matrix evolve_lindblad_operator(const Operator& h, std::span<const Operator> collapse, double t,
                                const Matrix& x, bool hermitian, const EvolutionConfig& cfg,
                                EvolutionStats* stats) {
  require_hermitian(h, "evolve_lindblad");
  require_duration(t, "evolve_lindblad");
  cfg.validate();
  const Index dim = h.layout().total_dim();
  if (x.rows() != dim || x.cols() != dim) {
    throw std::invalid_argument("evolve_lindblad: operator dimension does not match Hamiltonian");
  }
  for (const Operator& c : collapse) {
    if (c.layout() != h.layout()) {
      throw std::invalid_argument("evolve_lindblad: collapse operator layout mismatch");
    }
  }
  if (stats) *stats = EvolutionStats{};
  if (t == 0.0) return x;

  const Sparse hs = to_sparse(h.matrix());
  std::vector<Sparse> jumps;
  for (const Operator& c : collapse) {
    Sparse s = to_sparse(c.matrix());
    if (s.nonZeros() > 0) jumps.push_back(std::move(s));
  }

  std::vector<bool> row_seed(static_cast<std::size_t>(dim), false);
  std::vector<bool> col_seed(static_cast<std::size_t>(dim), false);
  for (Index c = 0; c < dim; ++c) {
    for (Index r = 0; r < dim; ++r) {
      if (x(r, c) != Complex{}) {
        row_seed[static_cast<std::size_t>(r)] = true;
        col_seed[static_cast<std::size_t>(c)] = true;
      }
    }
  }
  const std::vector<Index> rows = reachable(row_seed, hs, jumps);
  const std::vector<Index> cols = reachable(col_seed, hs, jumps);
  if (rows.empty() || cols.empty()) return x;

  // Step size: the fastest coherence rotates at the spread of the spectrum on
  // the supports; dissipation adds its own rate.
  const double spread = spectral_spread(restrict_dense(h.matrix(), rows, rows),
                                        restrict_dense(h.matrix(), cols, cols));
  double decay = 0.0;
  {
    Sparse k(dim, dim);
    for (const Sparse& c : jumps) k += Sparse(c.adjoint() * c);
    for (Index r = 0; r < dim; ++r) {
      double row_sum = 0.0;
      for (Sparse::InnerIterator it(k, r); it; ++it) row_sum += std::abs(it.value());
      decay = std::max(decay, row_sum);
    }
  }
  const double frequency = spread + 2.0 * decay;
  long steps = 1;
  if (frequency > 0.0) {
    steps = std::max(steps, static_cast<long>(std::ceil(t * frequency / cfg.max_phase_per_step)));
  }
  if (cfg.dt > 0.0) steps = std::max(steps, static_cast<long>(std::ceil(t / cfg.dt)));
  const double dt = t / static_cast<double>(steps);

  const RestrictedGenerator gen(hs, jumps, rows, cols);
  Matrix y = restrict_dense(x, rows, cols);
  const Index nr = y.rows(), nc = y.cols();
  Matrix k1(nr, nc), k2(nr, nc), k3(nr, nc), k4(nr, nc), tmp(nr, nc);
  const bool square = hermitian && rows == cols;
  const Complex trace0 = square ? y.trace() : Complex{};
  double drift = 0.0;
  for (long s = 0; s < steps; ++s) {
    if (cfg.method == Method::kRk4) {
      gen(y, k1);
      tmp = y + (0.5 * dt) * k1;
      gen(tmp, k2);
      tmp = y + (0.5 * dt) * k2;
      gen(tmp, k3);
      tmp = y + dt * k3;
      gen(tmp, k4);
      y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } else {
      // k1 holds the current term (L dt)^k y / k!, k2 its image under L.
      k1 = y;
      const double scale = y.cwiseAbs().maxCoeff();
      for (int k = 1; k <= cfg.taylor_order; ++k) {
        gen(k1, k2);
        k1 = (dt / k) * k2;
        y += k1;
        if (k1.cwiseAbs().maxCoeff() <= 1e-17 * scale) break;
      }
    }
    if (square) {
      tmp = y.adjoint();
      y = 0.5 * (y + tmp);
      drift = std::max(drift, std::abs(y.trace() - trace0));
    }
  }

  Matrix out = Matrix::Zero(dim, dim);
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out(rows[i], cols[j]) = y(static_cast<Index>(i), static_cast<Index>(j));
    }
  }
  if (stats) {
    stats->steps = steps;
    stats->dt = dt;
    stats->frequency_scale = frequency;
    stats->support_rows = nr;
    stats->support_cols = nc;
    stats->max_trace_drift = drift;
  }
  return out;
}

DensityMatrix evolve_lindblad(const Operator& h, std::span<const Operator> collapse, double t,
                              const DensityMatrix& rho, const EvolutionConfig& cfg,
                              EvolutionStats* stats) {
  if (h.layout() != rho.layout()) {
    throw std::invalid_argument("evolve_lindblad: layout mismatch");
  }
  return {rho.layout(),
          evolve_lindblad_operator(h, collapse, t, rho.matrix(), true, cfg, stats)};
}

DensityMatrix free_decay(const DensityMatrix& rho, std::span<const Operator> collapse,
                         double tau_m, const EvolutionConfig& cfg) {
  return evolve_lindblad(Operator::zero(rho.layout()), collapse, tau_m, rho, cfg);
}

LocalChannel local_channel(const Matrix& h, std::span<const Matrix> collapse, double t,
                           const EvolutionConfig& cfg) {
  if (h.rows() != h.cols()) throw std::invalid_argument("local_channel: H must be square");
  const int d = static_cast<int>(h.rows());
  const SpaceLayout layout({d});
  const Operator h_op(layout, h);
  std::vector<Operator> c_ops;
  c_ops.reserve(collapse.size());
  for (const Matrix& c : collapse) c_ops.emplace_back(layout, c);

  LocalChannel out{d, Matrix::Zero(d * d, d * d)};
  for (int b = 0; b < d; ++b) {
    for (int a = 0; a < d; ++a) {
      Matrix unit = Matrix::Zero(d, d);
      unit(a, b) = 1.0;
      const Matrix img = evolve_lindblad_operator(h_op, c_ops, t, unit, false, cfg);
      out.superoperator.col(a + d * b) = Eigen::Map<const Vector>(img.data(), d * d);
    }
  }
  return out;
}

void apply_local_channel(Matrix& x, const LocalChannel& channel, std::size_t subsystem,
                         const SpaceLayout& layout) {
  const int d = channel.dim;
  if (layout.dim(subsystem) != d) {
    throw std::invalid_argument("apply_local_channel: channel dimension does not match subsystem");
  }
  const Index total = layout.total_dim();
  if (x.rows() != total || x.cols() != total) {
    throw std::invalid_argument("apply_local_channel: operator dimension does not match layout");
  }
  const Index stride = layout.stride(subsystem);
  std::vector<Index> bases;
  for (Index i = 0; i < total; ++i) {
    if (layout.digit(i, subsystem) == 0) bases.push_back(i);
  }
  Vector block(d * d), image(d * d);
  for (Index cb : bases) {
    for (Index rb : bases) {
      for (int b = 0; b < d; ++b) {
        for (int a = 0; a < d; ++a) block(a + d * b) = x(rb + a * stride, cb + b * stride);
      }
      image.noalias() = channel.superoperator * block;
      for (int b = 0; b < d; ++b) {
        for (int a = 0; a < d; ++a) x(rb + a * stride, cb + b * stride) = image(a + d * b);
      }
    }
  }
}

}  // namespace cavphase::dynamics

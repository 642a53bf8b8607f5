// Copyright 2026 The mpjc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MPJC_DYNAMICS_HPP
#define MPJC_DYNAMICS_HPP

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <compare>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "mpjc/error.hpp"
#include "mpjc/model.hpp"
#include "mpjc/ode.hpp"
#include "mpjc/tensor.hpp"

namespace mpjc {

/// Pure state vector or density matrix on the truncated space.
using QuantumState = std::variant<DenseVector, DenseMatrix>;

struct DressedLabel {
  int k = 0;
  int l = 0;
  DressedSign s = DressedSign::plus;

  auto operator<=>(const DressedLabel&) const = default;
};

inline std::string to_string(const DressedLabel& label) {
  std::ostringstream out;
  out << "P_" << label.k << "_" << label.l << "_" << to_string(label.s);
  return out.str();
}

struct EvolutionRecord {
  std::vector<double> times;
  std::vector<QuantumState> states;
  std::map<DressedLabel, std::vector<double>> populations;
};

/// Appends one sample of dressed populations to `record`.
template <typename State>
void append_populations(EvolutionRecord& record, const BasisLayout& layout,
                        const DressedRotation& rot, const State& state) {
  const std::vector<double> pops = dressed_populations(layout, rot, state);
  for (Index f = 0; f < layout.dim(); ++f) {
    const BasisIndex idx = layout.unflatten(f);
    const DressedLabel label{idx.k, idx.l, idx.s == 0 ? DressedSign::plus : DressedSign::minus};
    record.populations[label].push_back(pops[static_cast<std::size_t>(f)]);
  }
}

inline constexpr double kNormDriftTolerance = 1e-5;

/// i d|psi>/dt = H_int |psi>; populations are recorded in the dressed product basis.
inline EvolutionRecord evolve_schrodinger(const OperatorSet& ops, const ModelConfig& cfg,
                                          const DenseVector& psi0,
                                          const std::vector<double>& t_grid,
                                          const OdeControl& ctrl = {1e-10, 1e-12}) {
  if (psi0.size() != ops.dim) throw DimensionError("evolve_schrodinger: state dimension mismatch");
  if (std::abs(psi0.norm() - 1.0) > 1e-10) {
    throw NumericalError("evolve_schrodinger: initial state is not normalized");
  }
  const SparseOperator& h = ops.h_int;
  auto rhs = [&h](double, const DenseVector& y, DenseVector& dy) { dy.noalias() = -kI * (h * y); };
  const std::vector<DenseVector> states = integrate_ode(rhs, psi0, t_grid, ctrl);

  const BasisLayout layout(cfg);
  const DressedRotation rot = dressed_rotation(cfg);
  EvolutionRecord record;
  record.times = t_grid;
  record.states.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    const double drift = std::abs(states[i].squaredNorm() - 1.0);
    if (drift > kNormDriftTolerance) {
      std::ostringstream msg;
      msg << "evolve_schrodinger: norm drift " << drift << " at t = " << t_grid[i]
          << " exceeds integrator tolerance";
      throw NumericalError(msg.str());
    }
    append_populations(record, layout, rot, states[i]);
    record.states.emplace_back(states[i]);
  }
  return record;
}

// ---------------------------------------------------------------------------
// Liouvillian in column-stacking convention: vec(A rho B) = (B^T (x) A) vec(rho).

struct DecayChannel {
  double rate = 0.0;
  SparseOperator op;
};

struct Liouvillian {
  SparseOperator superop;
  Index dim = 0;
  std::optional<ModelConfig> source_cfg;
};

inline DenseVector vectorize(const DenseMatrix& rho) {
  return Eigen::Map<const DenseVector>(rho.data(), rho.size());
}

inline DenseMatrix unvectorize(const DenseVector& v, Index dim) {
  if (v.size() != dim * dim) throw DimensionError("unvectorize: size is not dim^2");
  return Eigen::Map<const DenseMatrix>(v.data(), dim, dim);
}

/// -i[H, .] + sum_o rate_o (o . o^dag - {o^dag o, .}/2).
inline Liouvillian build_liouvillian(const SparseOperator& h,
                                     const std::vector<DecayChannel>& channels) {
  if (h.rows() != h.cols()) throw DimensionError("build_liouvillian: Hamiltonian is not square");
  const Index d = h.rows();
  const SparseOperator id = identity(d);
  const SparseOperator h_t = h.transpose();
  SparseOperator l = Complex(0.0, -1.0) * kron(id, h) + Complex(0.0, 1.0) * kron(h_t, id);
  for (const DecayChannel& ch : channels) {
    if (ch.rate < 0.0) throw ConfigError("build_liouvillian: negative decay rate");
    if (ch.rate == 0.0) continue;
    if (ch.op.rows() != d || ch.op.cols() != d) {
      throw DimensionError("build_liouvillian: collapse operator dimension mismatch");
    }
    const SparseOperator od_o = adjoint(ch.op) * ch.op;
    const SparseOperator od_o_t = od_o.transpose();
    const SparseOperator o_conj = ch.op.conjugate();
    l += Complex(ch.rate) * kron(o_conj, ch.op);
    l -= Complex(0.5 * ch.rate) * kron(id, od_o);
    l -= Complex(0.5 * ch.rate) * kron(od_o_t, id);
  }
  purge(l);
  require_finite(l, "Liouvillian");
  return Liouvillian{std::move(l), d, std::nullopt};
}

inline Liouvillian build_liouvillian(const OperatorSet& ops, const ModelConfig& cfg) {
  Liouvillian liou = build_liouvillian(
      ops.h_int, {{cfg.kappa_a, ops.a}, {cfg.kappa_b, ops.b}, {cfg.gamma, ops.sigma_minus}});
  liou.source_cfg = cfg;
  return liou;
}

inline DenseMatrix apply(const Liouvillian& liou, const DenseMatrix& rho) {
  return unvectorize(matvec(liou.superop, vectorize(rho)), liou.dim);
}

inline double hermiticity_error(const DenseMatrix& rho) {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

inline double min_eigenvalue(const DenseMatrix& rho) {
  const DenseMatrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/// (1/2) ||a - b||_1 for Hermitian a, b.
inline double trace_distance(const DenseMatrix& a, const DenseMatrix& b) {
  const DenseMatrix diff = 0.5 * ((a - b) + (a - b).adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

inline constexpr double kTraceDriftTolerance = 1e-6;

inline EvolutionRecord evolve_master(const Liouvillian& liou, const DenseMatrix& rho0,
                                     const std::vector<double>& t_grid,
                                     const OdeControl& ctrl = {1e-8, 1e-11}) {
  if (rho0.rows() != liou.dim || rho0.cols() != liou.dim) {
    throw DimensionError("evolve_master: density matrix dimension mismatch");
  }
  if (std::abs(rho0.trace() - 1.0) > 1e-8) throw NumericalError("evolve_master: rho0 trace != 1");
  if (hermiticity_error(rho0) > 1e-10) throw NumericalError("evolve_master: rho0 not Hermitian");
  if (min_eigenvalue(rho0) < -1e-10) throw NumericalError("evolve_master: rho0 not positive");

  const SparseOperator& l = liou.superop;
  auto rhs = [&l](double, const DenseVector& y, DenseVector& dy) { dy.noalias() = l * y; };
  const std::vector<DenseVector> states = integrate_ode(rhs, vectorize(rho0), t_grid, ctrl);

  EvolutionRecord record;
  record.times = t_grid;
  record.states.reserve(states.size());
  std::optional<BasisLayout> layout;
  DressedRotation rot;
  if (liou.source_cfg) {
    layout.emplace(*liou.source_cfg);
    rot = dressed_rotation(*liou.source_cfg);
  }
  for (std::size_t i = 0; i < states.size(); ++i) {
    DenseMatrix rho = unvectorize(states[i], liou.dim);
    const double drift = std::abs(rho.trace() - 1.0);
    if (drift > kTraceDriftTolerance) {
      std::ostringstream msg;
      msg << "evolve_master: trace drift " << drift << " at t = " << t_grid[i];
      throw NumericalError(msg.str());
    }
    if (layout) append_populations(record, *layout, rot, rho);
    record.states.emplace_back(std::move(rho));
  }
  return record;
}

// ---------------------------------------------------------------------------
// Steady state

struct SteadyState {
  DenseMatrix rho;
  /// ||L vec(rho)||_2 of the returned (Hermitized, trace-normalized) state.
  double residual = 0.0;
};

struct SteadyStateOptions {
  /// Solve a second bordered system (different replaced row) and require the
  /// two candidates to agree; detects a degenerate kernel.
  bool verify_unique = false;
  double residual_tolerance = 1e-9;
  double uniqueness_tolerance = 1e-8;
};

namespace detail {

inline DenseMatrix bordered_steady_state(const Liouvillian& liou, Index replaced_row) {
  const Index d = liou.dim;
  const Index n = d * d;
  std::vector<Eigen::Triplet<Complex>> entries;
  entries.reserve(static_cast<std::size_t>(liou.superop.nonZeros() + d));
  for (Index r = 0; r < n; ++r) {
    if (r == replaced_row) continue;
    for (SparseOperator::InnerIterator it(liou.superop, r); it; ++it) {
      entries.emplace_back(r, it.col(), it.value());
    }
  }
  for (Index i = 0; i < d; ++i) entries.emplace_back(replaced_row, i * (d + 1), 1.0);
  const SparseOperator bordered = from_triplets(n, n, entries);
  DenseVector rhs = DenseVector::Zero(n);
  rhs[replaced_row] = 1.0;
  DenseMatrix rho = unvectorize(solve_sparse(bordered, rhs), d);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace().real();
  return rho;
}

}  // namespace detail

/// Null vector of the Liouvillian with unit trace, from the system in which
/// the equation for rho_00 is replaced by Tr(rho) = 1.
inline SteadyState solve_steady_state(const Liouvillian& liou, const SteadyStateOptions& opts = {}) {
  if (liou.dim <= 0) throw DimensionError("solve_steady_state: empty Liouvillian");
  SteadyState ss;
  try {
    ss.rho = detail::bordered_steady_state(liou, 0);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("solve_steady_state: bordered system failed (degenerate or "
                                     "ill-conditioned kernel): ") + e.what());
  }
  ss.residual = matvec(liou.superop, vectorize(ss.rho)).norm();
  if (!(ss.residual <= opts.residual_tolerance)) {
    std::ostringstream msg;
    msg << "solve_steady_state: residual " << ss.residual << " exceeds "
        << opts.residual_tolerance << " (||L||_max = " << max_abs(liou.superop)
        << ", dim = " << liou.dim << ")";
    throw NumericalError(msg.str());
  }
  if (opts.verify_unique && liou.dim > 1) {
    const Index last = liou.dim * liou.dim - 1;
    DenseMatrix second;
    try {
      second = detail::bordered_steady_state(liou, last);
    } catch (const NumericalError& e) {
      throw NumericalError(std::string("solve_steady_state: second candidate failed, kernel is "
                                       "likely degenerate: ") + e.what());
    }
    const double dist = trace_distance(ss.rho, second);
    if (dist > opts.uniqueness_tolerance) {
      std::ostringstream msg;
      msg << "solve_steady_state: multiple stationary states (candidates differ by trace "
             "distance "
          << dist << ")";
      throw NumericalError(msg.str());
    }
  }
  return ss;
}

// ---------------------------------------------------------------------------
// Two-time correlations via the quantum regression theorem

/// Tr(op * x) for sparse op and dense x.
inline Complex trace_product(const SparseOperator& op, const DenseMatrix& x) {
  Complex acc = 0.0;
  for (Index r = 0; r < op.outerSize(); ++r) {
    for (SparseOperator::InnerIterator it(op, r); it; ++it) acc += it.value() * x(it.col(), r);
  }
  return acc;
}

/// Tr[measure * exp(L tau)(collapse_left * rho_ss * collapse_left^dag)] on tau_grid.
/// Raw real parts; nothing is clamped.
inline std::vector<double> regression_correlator(const Liouvillian& liou, const SteadyState& ss,
                                                 const SparseOperator& collapse_left,
                                                 const SparseOperator& measure,
                                                 const std::vector<double>& tau_grid,
                                                 const OdeControl& ctrl = {1e-8, 1e-12}) {
  require_increasing(tau_grid, "regression_correlator: tau grid");
  if (tau_grid.front() < 0.0) throw DimensionError("regression_correlator: negative delay");
  if (collapse_left.rows() != liou.dim || measure.rows() != liou.dim) {
    throw DimensionError("regression_correlator: operator dimension mismatch");
  }
  const DenseMatrix x0 = collapse_left * (ss.rho * adjoint(collapse_left));

  std::vector<double> grid = tau_grid;
  const bool prepend = grid.front() > 0.0;
  if (prepend) grid.insert(grid.begin(), 0.0);
  const SparseOperator& l = liou.superop;
  auto rhs = [&l](double, const DenseVector& y, DenseVector& dy) { dy.noalias() = l * y; };
  const std::vector<DenseVector> states = integrate_ode(rhs, vectorize(x0), grid, ctrl);

  const double scale = std::max(std::abs(x0.trace()), 1e-300);
  std::vector<double> out;
  out.reserve(tau_grid.size());
  for (std::size_t i = prepend ? 1 : 0; i < states.size(); ++i) {
    const Complex value = trace_product(measure, unvectorize(states[i], liou.dim));
    const double tol = (i == 0 ? 1e-10 : 1e-6) * std::max(std::abs(value), scale);
    if (std::abs(value.imag()) > tol) {
      std::ostringstream msg;
      msg << "regression_correlator: imaginary residue " << value.imag() << " at tau = " << grid[i];
      throw NumericalError(msg.str());
    }
    out.push_back(value.real());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Truncation diagnostics

enum class TailStatus { ok, warning };

struct TailReport {
  /// Population in the top Fock level of each mode.
  double tail_a = 0.0;
  double tail_b = 0.0;
  TailStatus status = TailStatus::ok;
};

inline constexpr double kTailWarning = 1e-5;
inline constexpr double kTailError = 1e-3;

/// Throws NumericalError when either tail exceeds kTailError.
inline TailReport truncation_check(const QuantumState& state, const ModelConfig& cfg) {
  const BasisLayout layout(cfg);
  auto diag = [&](Index f) {
    return std::visit(
        [f](const auto& s) -> double {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, DenseVector>) return std::norm(s[f]);
          else return s(f, f).real();
        },
        state);
  };
  const Index size = std::visit([](const auto& s) { return static_cast<Index>(s.rows()); }, state);
  if (size != layout.dim()) throw DimensionError("truncation_check: state dimension mismatch");

  TailReport rep;
  for (int s = 0; s < 2; ++s) {
    for (int l = 0; l <= cfg.trunc_b; ++l) rep.tail_a += diag(layout.flat(cfg.trunc_a, l, s));
    for (int k = 0; k <= cfg.trunc_a; ++k) rep.tail_b += diag(layout.flat(k, cfg.trunc_b, s));
  }
  const double worst = std::max(rep.tail_a, rep.tail_b);
  if (worst > kTailError) {
    std::ostringstream msg;
    msg << "truncation_check: top Fock level holds population " << worst << " (> " << kTailError
        << "); increase trunc_a/trunc_b";
    throw NumericalError(msg.str());
  }
  if (worst > kTailWarning) rep.status = TailStatus::warning;
  return rep;
}

}  // namespace mpjc

#endif  // MPJC_DYNAMICS_HPP

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

#ifndef MPJC_OBSERVABLES_HPP
#define MPJC_OBSERVABLES_HPP

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mpjc/dynamics.hpp"
#include "mpjc/error.hpp"
#include "mpjc/model.hpp"
#include "mpjc/tensor.hpp"

namespace mpjc {

/// Joint photon-number distribution with the TLS traced out.
struct JointDistribution {
  Eigen::MatrixXd probs;  // (trunc_a + 1) x (trunc_b + 1)

  double operator()(int k, int l) const { return probs(k, l); }
  double total() const { return probs.sum(); }
  Eigen::VectorXd marginal_a() const { return probs.rowwise().sum(); }
  Eigen::VectorXd marginal_b() const { return probs.colwise().sum().transpose(); }
};

inline JointDistribution joint_distribution(const BasisLayout& layout, const DenseMatrix& rho) {
  if (rho.rows() != layout.dim() || rho.cols() != layout.dim()) {
    throw DimensionError("joint_distribution: density matrix dimension mismatch");
  }
  JointDistribution out;
  out.probs.resize(layout.levels_a(), layout.levels_b());
  for (int k = 0; k <= layout.trunc_a(); ++k) {
    for (int l = 0; l <= layout.trunc_b(); ++l) {
      out.probs(k, l) =
          rho(layout.flat(k, l, 0), layout.flat(k, l, 0)).real() +
          rho(layout.flat(k, l, 1), layout.flat(k, l, 1)).real();
    }
  }
  return out;
}

inline JointDistribution joint_distribution(const BasisLayout& layout, const SteadyState& ss) {
  return joint_distribution(layout, ss.rho);
}

/// Reporting helper: values in [-1e-12, 0) become 0, anything else is left alone.
inline double clamp_roundoff(double p) { return (p < 0.0 && p >= -1e-12) ? 0.0 : p; }

/// Imaginary part tolerated in an expectation value before it is an error.
inline constexpr double kImaginaryResidue = 1e-10;
/// Mean photon numbers at or below this make a normalized correlation undefined.
inline constexpr double kVanishingMoment = 1e-15;

inline double expectation(const SparseOperator& op, const DenseMatrix& rho, const char* what) {
  const Complex v = trace_product(op, rho);
  if (std::abs(v.imag()) > kImaginaryResidue * std::max(1.0, std::abs(v.real()))) {
    std::ostringstream msg;
    msg << what << ": imaginary residue " << v.imag();
    throw NumericalError(msg.str());
  }
  return v.real();
}

/// a^k b^l on the full space.
inline SparseOperator mode_product(const OperatorSet& ops, int k, int l) {
  if (k < 0 || l < 0) throw DimensionError("mode_product: negative order");
  SparseOperator out = power(ops.a, k) * power(ops.b, l);
  purge(out);
  return out;
}

/// Tr(a^dag^k b^dag^l b^l a^k rho) / (<a^dag a>^k <b^dag b>^l).
inline double g_equal_time(const OperatorSet& ops, const DenseMatrix& rho, int k, int l) {
  if (k < 0 || l < 0 || k + l == 0) throw DimensionError("g_equal_time: need k, l >= 0, k + l > 0");
  const double na = expectation(ops.a_dag * ops.a, rho, "g_equal_time");
  const double nb = expectation(ops.b_dag * ops.b, rho, "g_equal_time");
  if ((k > 0 && !(na > kVanishingMoment)) || (l > 0 && !(nb > kVanishingMoment))) {
    std::ostringstream msg;
    msg << "g_equal_time: undefined correlation, <a^dag a> = " << na << ", <b^dag b> = " << nb;
    throw NumericalError(msg.str());
  }
  const SparseOperator x = mode_product(ops, k, l);
  const SparseOperator moment = adjoint(x) * x;
  const double num = expectation(moment, rho, "g_equal_time");
  return num / (std::pow(na, k) * std::pow(nb, l));
}

enum class CorrelationKind { equal_time_kl, delayed_pair, delayed_bundle };
enum class Mode { a, b };

inline char to_char(Mode mode) { return mode == Mode::a ? 'a' : 'b'; }

struct CorrelationCurve {
  std::vector<double> abscissa;
  std::vector<double> values;
  CorrelationKind kind = CorrelationKind::delayed_pair;
  std::pair<int, int> orders{0, 0};
  /// Bundle curves only.
  std::optional<double> tau_min;

  bool below_tau_min(std::size_t i) const { return tau_min && abscissa.at(i) < *tau_min; }
};

inline double tau_min(int n_order, int m_order, double kappa_a, double kappa_b) {
  if (n_order < 0 || m_order < 0 || n_order + m_order == 0) {
    throw ConfigError("tau_min: need N, M >= 0 and N + M > 0");
  }
  if ((n_order > 0 && !(kappa_a > 0.0)) || (m_order > 0 && !(kappa_b > 0.0))) {
    throw ConfigError("tau_min: decay rates must be positive");
  }
  double out = 0.0;
  for (int k = 1; k <= n_order; ++k) out += 1.0 / (k * kappa_a);
  for (int l = 1; l <= m_order; ++l) out += 1.0 / (l * kappa_b);
  return out;
}

inline const SparseOperator& mode_operator(const OperatorSet& ops, Mode mode) {
  return mode == Mode::a ? ops.a : ops.b;
}

/// <i^dag(0) j^dag(tau) j(tau) i(0)> / (<i^dag i> <j^dag j>).
inline CorrelationCurve g2_delayed(const Liouvillian& liou, const SteadyState& ss,
                                   const OperatorSet& ops, Mode i, Mode j,
                                   const std::vector<double>& tau_grid) {
  const SparseOperator& oi = mode_operator(ops, i);
  const SparseOperator& oj = mode_operator(ops, j);
  const SparseOperator nj = adjoint(oj) * oj;
  const double ni_mean = expectation(adjoint(oi) * oi, ss.rho, "g2_delayed");
  const double nj_mean = expectation(nj, ss.rho, "g2_delayed");
  if (!(ni_mean > kVanishingMoment) || !(nj_mean > kVanishingMoment)) {
    throw NumericalError("g2_delayed: undefined correlation, vanishing mean photon number");
  }
  CorrelationCurve curve;
  curve.kind = CorrelationKind::delayed_pair;
  curve.orders = {i == Mode::a ? 0 : 1, j == Mode::a ? 0 : 1};
  curve.abscissa = tau_grid;
  curve.values = regression_correlator(liou, ss, oi, nj, tau_grid);
  for (double& v : curve.values) v /= ni_mean * nj_mean;
  return curve;
}

/// Generalized bundle correlation of a^N b^M with itself; flagged below tau_min.
inline CorrelationCurve g2_bundle(const Liouvillian& liou, const SteadyState& ss,
                                  const OperatorSet& ops, int n_order, int m_order,
                                  double kappa_a, double kappa_b,
                                  const std::vector<double>& tau_grid) {
  const SparseOperator x = mode_product(ops, n_order, m_order);
  const SparseOperator moment = adjoint(x) * x;
  const double g0 = expectation(moment, ss.rho, "g2_bundle");
  if (!(g0 > kVanishingMoment * kVanishingMoment)) {
    std::ostringstream msg;
    msg << "g2_bundle: undefined correlation, G(0) = " << g0;
    throw NumericalError(msg.str());
  }
  CorrelationCurve curve;
  curve.kind = CorrelationKind::delayed_bundle;
  curve.orders = {n_order, m_order};
  curve.tau_min = tau_min(n_order, m_order, kappa_a, kappa_b);
  curve.abscissa = tau_grid;
  curve.values = regression_correlator(liou, ss, x, moment, tau_grid);
  for (double& v : curve.values) v /= g0 * g0;
  return curve;
}

// ---------------------------------------------------------------------------
// Extremum detection on uniform sweeps

inline std::vector<std::size_t> strict_local_maxima(const std::vector<double>& values) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < values.size(); ++i) {
    if (values[i] > values[i - 1] && values[i] > values[i + 1]) out.push_back(i);
  }
  return out;
}

inline std::vector<std::size_t> strict_local_minima(const std::vector<double>& values) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < values.size(); ++i) {
    if (values[i] < values[i - 1] && values[i] < values[i + 1]) out.push_back(i);
  }
  return out;
}

/// Closest of the given extremum indices to `target`, or nullopt if none lies
/// within `window` of it.
inline std::optional<std::size_t> extremum_near(const std::vector<double>& grid,
                                                const std::vector<std::size_t>& extrema,
                                                double target, double window) {
  std::optional<std::size_t> best;
  for (std::size_t i : extrema) {
    const double d = std::abs(grid.at(i) - target);
    if (d <= window && (!best || d < std::abs(grid[*best] - target))) best = i;
  }
  return best;
}

}  // namespace mpjc

#endif  // MPJC_OBSERVABLES_HPP

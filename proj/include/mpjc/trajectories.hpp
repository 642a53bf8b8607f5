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

#ifndef MPJC_TRAJECTORIES_HPP
#define MPJC_TRAJECTORIES_HPP

// Monte-Carlo wave-function unraveling of the damped driven model.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <vector>

#include "mpjc/dynamics.hpp"
#include "mpjc/error.hpp"
#include "mpjc/model.hpp"
#include "mpjc/ode.hpp"
#include "mpjc/parallel.hpp"
#include "mpjc/tensor.hpp"

namespace mpjc {

enum class JumpChannel { mode_a = 0, mode_b = 1, tls = 2 };

inline const char* to_string(JumpChannel c) {
  switch (c) {
    case JumpChannel::mode_a: return "mode_a";
    case JumpChannel::mode_b: return "mode_b";
    case JumpChannel::tls: return "tls";
  }
  return "?";
}

struct JumpEvent {
  double time = 0.0;
  JumpChannel channel = JumpChannel::tls;
  /// Squared norm of the unnormalized state at the located jump time.
  double pre_jump_norm = 0.0;
  /// The uniform threshold that triggered the jump.
  double threshold = 0.0;
};

struct Trajectory {
  std::uint64_t seed = 0;
  std::vector<double> times;
  /// Dressed populations of the normalized state: one row per sample,
  /// columns indexed by BasisLayout::flat with s = 0 for |+>.
  Eigen::MatrixXd populations;
  /// Squared norm of the unnormalized state at each sample.
  std::vector<double> norm_squared;
  std::vector<JumpEvent> jumps;
};

/// Uniform variates in (0, 1) from the top 53 bits of a 64-bit Mersenne
/// Twister; the engine's output sequence is fixed by the standard, so
/// draws are identical across platforms.
class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : engine_(seed) {}

  double next() {
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

struct TrajectoryOptions {
  OdeControl ode{1e-8, 1e-12};
  /// Accepted |norm^2 - threshold| at a located jump.
  double bracket_tolerance = 1e-9;
  int max_bisections = 60;
};

namespace detail {

struct JumpOperators {
  std::array<SparseOperator, 3> ops;
  std::array<double, 3> rates{};
};

inline JumpOperators jump_operators(const OperatorSet& ops, const ModelConfig& cfg) {
  return {{ops.a, ops.b, ops.sigma_minus}, {cfg.kappa_a, cfg.kappa_b, cfg.gamma}};
}

}  // namespace detail

/// H_int - (i/2) sum_o rate_o o^dag o.
inline SparseOperator effective_hamiltonian(const OperatorSet& ops, const ModelConfig& cfg) {
  const detail::JumpOperators jumps = detail::jump_operators(ops, cfg);
  SparseOperator h = ops.h_int;
  for (std::size_t c = 0; c < 3; ++c) {
    if (jumps.rates[c] == 0.0) continue;
    h -= Complex(0.0, 0.5 * jumps.rates[c]) * SparseOperator(adjoint(jumps.ops[c]) * jumps.ops[c]);
  }
  purge(h);
  return h;
}

inline Trajectory run_trajectory(const OperatorSet& ops, const ModelConfig& cfg,
                                 const DenseVector& psi0, const std::vector<double>& t_grid,
                                 std::uint64_t seed, const TrajectoryOptions& opts = {}) {
  require_increasing(t_grid, "run_trajectory: time grid");
  if (psi0.size() != ops.dim) throw DimensionError("run_trajectory: state dimension mismatch");
  if (std::abs(psi0.norm() - 1.0) > 1e-10) {
    throw NumericalError("run_trajectory: initial state is not normalized");
  }
  const BasisLayout layout(cfg);
  const DressedRotation rot = dressed_rotation(cfg);
  const detail::JumpOperators jumps = detail::jump_operators(ops, cfg);
  const SparseOperator h_eff = effective_hamiltonian(ops, cfg);
  auto rhs = [&h_eff](double, const DenseVector& y, DenseVector& dy) {
    dy.noalias() = -kI * (h_eff * y);
  };

  Trajectory traj;
  traj.seed = seed;
  traj.times = t_grid;
  traj.populations.resize(static_cast<Index>(t_grid.size()), layout.dim());
  traj.norm_squared.reserve(t_grid.size());
  std::size_t next = 0;
  auto record = [&](const DenseVector& y) {
    const double n2 = y.squaredNorm();
    const std::vector<double> pops = dressed_populations(layout, rot, DenseVector(y / std::sqrt(n2)));
    for (Index f = 0; f < layout.dim(); ++f) {
      traj.populations(static_cast<Index>(next), f) = pops[static_cast<std::size_t>(f)];
    }
    traj.norm_squared.push_back(n2);
    ++next;
  };

  UniformSource rng(seed);
  double threshold = rng.next();
  Dopri5 stepper(rhs, t_grid.front(), psi0, opts.ode);
  record(psi0);
  const double t_end = t_grid.back();

  while (next < t_grid.size()) {
    stepper.step(t_end);
    if (stepper.y().squaredNorm() > threshold) {
      while (next < t_grid.size() && t_grid[next] <= stepper.t()) record(stepper.dense(t_grid[next]));
      continue;
    }

    // Locate the threshold crossing inside the last step.
    double lo = stepper.t_prev();
    double hi = stepper.t();
    double t_jump = hi;
    DenseVector psi = stepper.y();
    double gap = psi.squaredNorm() - threshold;
    int iter = 0;
    while (std::abs(gap) > opts.bracket_tolerance) {
      if (++iter > opts.max_bisections) {
        std::ostringstream msg;
        msg << "run_trajectory: jump-time bisection did not converge near t = " << t_jump
            << " (|norm^2 - threshold| = " << std::abs(gap) << ")";
        throw NumericalError(msg.str());
      }
      t_jump = 0.5 * (lo + hi);
      psi = stepper.dense(t_jump);
      gap = psi.squaredNorm() - threshold;
      (gap > 0.0 ? lo : hi) = t_jump;
    }
    while (next < t_grid.size() && t_grid[next] < t_jump) record(stepper.dense(t_grid[next]));

    std::array<double, 3> weight{};
    std::array<DenseVector, 3> collapsed;
    double total = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      if (jumps.rates[c] == 0.0) continue;
      collapsed[c] = jumps.ops[c] * psi;
      weight[c] = jumps.rates[c] * collapsed[c].squaredNorm();
      total += weight[c];
    }
    if (!(total > 0.0)) throw NumericalError("run_trajectory: norm decayed with no jump channel open");
    const double pick = rng.next() * total;
    std::size_t chosen = 0;
    double acc = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      if (weight[c] == 0.0) continue;
      chosen = c;
      acc += weight[c];
      if (pick < acc) break;
    }
    traj.jumps.push_back({t_jump, static_cast<JumpChannel>(chosen), psi.squaredNorm(), threshold});
    DenseVector after = collapsed[chosen] / collapsed[chosen].norm();
    stepper.reset(t_jump, std::move(after));
    threshold = rng.next();
    while (next < t_grid.size() && t_grid[next] == t_jump) record(stepper.y());
  }
  return traj;
}

/// Trajectory i uses seed base_seed + i, so the ensemble does not depend on `jobs`.
inline std::vector<Trajectory> run_ensemble(const OperatorSet& ops, const ModelConfig& cfg,
                                            const DenseVector& psi0,
                                            const std::vector<double>& t_grid,
                                            std::size_t n_traj, std::uint64_t base_seed,
                                            unsigned jobs = default_jobs(),
                                            const TrajectoryOptions& opts = {}) {
  if (n_traj == 0) throw ConfigError("run_ensemble: need at least one trajectory");
  std::vector<Trajectory> out(n_traj);
  parallel_for(n_traj, jobs, [&](std::size_t i) {
    out[i] = run_trajectory(ops, cfg, psi0, t_grid, base_seed + i, opts);
  });
  return out;
}

struct EnsembleAverage {
  std::vector<double> times;
  Eigen::MatrixXd mean;
  /// Sample standard deviation / sqrt(N); zero for a single trajectory.
  Eigen::MatrixXd std_error;
  std::size_t count = 0;
};

inline EnsembleAverage ensemble_average(const std::vector<Trajectory>& trajs) {
  if (trajs.empty()) throw ConfigError("ensemble_average: empty ensemble");
  const Trajectory& first = trajs.front();
  EnsembleAverage avg;
  avg.times = first.times;
  avg.count = trajs.size();
  avg.mean = Eigen::MatrixXd::Zero(first.populations.rows(), first.populations.cols());
  for (const Trajectory& t : trajs) {
    if (t.times != first.times || t.populations.rows() != avg.mean.rows() ||
        t.populations.cols() != avg.mean.cols()) {
      throw DimensionError("ensemble_average: trajectories do not share a grid");
    }
    avg.mean += t.populations;
  }
  const double n = static_cast<double>(trajs.size());
  avg.mean /= n;
  avg.std_error = Eigen::MatrixXd::Zero(avg.mean.rows(), avg.mean.cols());
  if (trajs.size() > 1) {
    for (const Trajectory& t : trajs) avg.std_error += (t.populations - avg.mean).array().square().matrix();
    avg.std_error = (avg.std_error / (n - 1.0)).array().sqrt() / std::sqrt(n);
  }
  return avg;
}

/// Mean populations keyed like EvolutionRecord::populations.
inline EvolutionRecord to_record(const EnsembleAverage& avg, const BasisLayout& layout) {
  EvolutionRecord rec;
  rec.times = avg.times;
  for (Index f = 0; f < layout.dim(); ++f) {
    const BasisIndex idx = layout.unflatten(f);
    const DressedLabel label{idx.k, idx.l, idx.s == 0 ? DressedSign::plus : DressedSign::minus};
    auto& series = rec.populations[label];
    series.assign(avg.mean.col(f).data(), avg.mean.col(f).data() + avg.mean.rows());
  }
  return rec;
}

}  // namespace mpjc

#endif  // MPJC_TRAJECTORIES_HPP

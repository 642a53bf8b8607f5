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


#ifndef MPJC_CLI_COMMANDS_HPP
#define MPJC_CLI_COMMANDS_HPP

// The five subcommands as library functions: RunConfig in, named tables out.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mpjc/cli/config.hpp"
#include "mpjc/cli/table.hpp"
#include "mpjc/dynamics.hpp"
#include "mpjc/model.hpp"
#include "mpjc/observables.hpp"
#include "mpjc/parallel.hpp"
#include "mpjc/trajectories.hpp"

#ifndef MPJC_VERSION
#define MPJC_VERSION "unknown"
#endif

namespace mpjc::cli {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct RunOptions {
  unsigned jobs = 1;
};

/// File name and table, in the order they should be written.
using CommandOutput = std::vector<std::pair<std::string, OutputTable>>;

namespace detail {

inline OutputTable new_table(const RunConfig& cfg) {
  OutputTable t;
  t.metadata.emplace_back("mpjc", MPJC_VERSION);
  t.metadata.emplace_back("command", to_string(cfg.scenario));
  t.metadata.emplace_back("seed", std::to_string(cfg.ensemble.base_seed));
  t.metadata.emplace_back("config", to_json(cfg).dump());
  return t;
}

inline OdeControl ode_control(const RunConfig& cfg) {
  OdeControl c;
  c.rel_tol = cfg.solver.rel_tol;
  c.abs_tol = cfg.solver.abs_tol;
  return c;
}

inline std::string order_name(const char* prefix, Order o) {
  return std::string(prefix) + std::to_string(o.first) + "_" + std::to_string(o.second);
}

inline std::vector<Order> default_distributions(const ModelConfig& m) {
  std::vector<Order> out;
  const int ka = std::min(2 * m.n + 1, m.trunc_a);
  const int kb = std::min(2 * m.m + 1, m.trunc_b);
  for (int k = 0; k <= ka; ++k) {
    for (int l = 0; l <= kb; ++l) out.emplace_back(k, l);
  }
  return out;
}

inline std::vector<Order> default_correlations(const ModelConfig& m) {
  std::vector<Order> out;
  const int ka = m.n > 0 ? std::min(3, m.trunc_a) : 0;
  const int kb = m.m > 0 ? std::min(3, m.trunc_b) : 0;
  for (int k = m.n > 0 ? 1 : 0; k <= ka; ++k) {
    for (int l = m.m > 0 ? 1 : 0; l <= kb; ++l) {
      if (k + l > 0) out.emplace_back(k, l);
    }
  }
  return out;
}

inline std::vector<Order> default_populations(const ModelConfig& m) {
  if (m.n == 0 && m.m == 0) return {{0, 0}};
  return {{0, 0}, {m.n, m.m}};
}

inline void append_error(std::string& errors, const std::string& what) {
  if (!errors.empty()) errors += "; ";
  errors += what;
}

inline std::string label(int k, int l, DressedSign s) { return to_string(DressedLabel{k, l, s}); }

}  // namespace detail

// ---------------------------------------------------------------------------

inline CommandOutput cmd_resonance(const RunConfig& cfg, const RunOptions& = {}) {
  const ModelConfig& m = cfg.model;
  OutputTable t = detail::new_table(cfg);
  t.header = {"n", "m", "delta_a", "delta_b", "delta_sigma", "detuning_sum", "omega", "omega_eff",
              "degenerate_delta_a"};
  for (int mu : {2, 3}) {
    for (const char* branch : {"plus", "minus"}) {
      const std::string tag = "mu" + std::to_string(mu) + "_" + branch;
      t.header.push_back(tag + "_sum");
      t.header.push_back(tag + "_delta_a");
    }
  }
  t.header.push_back("error");

  std::string errors;
  const double x = m.detuning_sum();
  const double omega = generalized_rabi_frequency(m.delta_sigma, m.omega_l);
  double w_eff = kNaN;
  try {
    w_eff = omega_eff(m);
  } catch (const std::exception& e) {
    detail::append_error(errors, e.what());
  }
  auto delta_a_of = [&](double sum) { return m.n > 0 ? delta_a_for_sum(sum, m.n, m.m, m.delta_b) : kNaN; };
  std::vector<Cell> row = {std::int64_t{m.n}, std::int64_t{m.m}, m.delta_a, m.delta_b, m.delta_sigma,
                           x, omega, w_eff, delta_a_of(0.0)};
  const double big_sum = m.delta_sigma - x;
  for (int mu : {2, 3}) {
    const auto [plus, minus] = higher_order_detuning_sums(big_sum, m.omega_l, mu);
    row.insert(row.end(), {plus, delta_a_of(plus), minus, delta_a_of(minus)});
  }
  row.emplace_back(errors);
  t.add_row(std::move(row));
  return {{"resonance.csv", std::move(t)}};
}

inline CommandOutput cmd_rabi(const RunConfig& cfg, const RunOptions& = {}) {
  const ModelConfig& m = cfg.model;
  const OperatorSet ops = build_operators(m);
  const BasisLayout layout(m);
  const DressedRotation rot = dressed_rotation(m);
  const DenseVector psi0 = dressed_state(layout, rot, cfg.initial.k, cfg.initial.l, cfg.initial.s);
  const std::vector<double> grid = cfg.time_grid.values();
  OdeControl ctrl = detail::ode_control(cfg);
  ctrl.rel_tol = std::min(ctrl.rel_tol, 1e-10);
  ctrl.abs_tol = std::min(ctrl.abs_tol, 1e-12);
  const EvolutionRecord rec = evolve_schrodinger(ops, m, psi0, grid, ctrl);

  OutputTable t = detail::new_table(cfg);
  std::vector<DressedLabel> columns = {{0, 0, DressedSign::plus}, {m.n, m.m, DressedSign::minus}};
  for (auto [k, l] : cfg.populations) {
    for (DressedSign s : {DressedSign::plus, DressedSign::minus}) {
      const DressedLabel lab{k, l, s};
      if (std::find(columns.begin(), columns.end(), lab) == columns.end()) columns.push_back(lab);
    }
  }
  t.header = {"t"};
  for (const DressedLabel& lab : columns) t.header.push_back(to_string(lab));
  t.header.push_back("analytic_sin2");

  double w_eff = kNaN;
  try {
    w_eff = omega_eff(m);
  } catch (const NumericalError& e) {
    t.metadata.emplace_back("warning", e.what());
  }
  t.metadata.emplace_back("omega_eff", format_double(w_eff));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<Cell> row = {grid[i]};
    for (const DressedLabel& lab : columns) row.emplace_back(rec.populations.at(lab)[i]);
    const double s = std::sin(w_eff * grid[i]);
    row.emplace_back(s * s);
    t.add_row(std::move(row));
  }
  return {{"rabi.csv", std::move(t)}};
}

/// Steady-state observables at one detuning; failures become NaN plus a message.
struct SweepPoint {
  double delta_a = 0.0;
  double delta_sigma = 0.0;
  std::vector<double> distribution;
  std::vector<double> correlation;
  double tail_a = kNaN;
  double tail_b = kNaN;
  std::string error;
};

inline SweepPoint sweep_point(const ModelConfig& base, double delta_a,
                              const std::vector<Order>& distributions,
                              const std::vector<Order>& correlations, const SolverSpec& solver) {
  SweepPoint p;
  p.delta_a = delta_a;
  p.distribution.assign(distributions.size(), kNaN);
  p.correlation.assign(correlations.size(), kNaN);
  try {
    const ModelConfig m = with_delta_a(base, delta_a);
    p.delta_sigma = m.delta_sigma;
    const OperatorSet ops = build_operators(m);
    const Liouvillian liou = build_liouvillian(ops, m);
    SteadyStateOptions opts;
    opts.verify_unique = solver.verify_unique;
    const SteadyState ss = solve_steady_state(liou, opts);
    const BasisLayout layout(m);
    const JointDistribution dist = joint_distribution(layout, ss);
    for (std::size_t i = 0; i < distributions.size(); ++i) {
      p.distribution[i] = clamp_roundoff(dist(distributions[i].first, distributions[i].second));
    }
    for (std::size_t i = 0; i < correlations.size(); ++i) {
      try {
        p.correlation[i] = g_equal_time(ops, ss.rho, correlations[i].first, correlations[i].second);
      } catch (const NumericalError& e) {
        detail::append_error(p.error, detail::order_name("g_", correlations[i]) + ": " + e.what());
      }
    }
    try {
      const TailReport tails = truncation_check(ss.rho, m);
      p.tail_a = tails.tail_a;
      p.tail_b = tails.tail_b;
      if (tails.status == TailStatus::warning) detail::append_error(p.error, "truncation tail above 1e-5");
    } catch (const NumericalError& e) {
      detail::append_error(p.error, e.what());
      std::fill(p.distribution.begin(), p.distribution.end(), kNaN);
      std::fill(p.correlation.begin(), p.correlation.end(), kNaN);
    }
  } catch (const NumericalError& e) {
    detail::append_error(p.error, e.what());
  }
  return p;
}

inline CommandOutput cmd_sweep(const RunConfig& cfg, const RunOptions& run = {}) {
  const ModelConfig& m = cfg.model;
  const std::vector<Order> dists =
      cfg.distributions.empty() ? detail::default_distributions(m) : cfg.distributions;
  const std::vector<Order> corrs =
      cfg.correlations.empty() ? detail::default_correlations(m) : cfg.correlations;
  const std::vector<double> grid = cfg.sweep.values();
  std::vector<SweepPoint> points(grid.size());
  parallel_for(grid.size(), run.jobs, [&](std::size_t i) {
    points[i] = sweep_point(m, grid[i], dists, corrs, cfg.solver);
  });

  OutputTable t = detail::new_table(cfg);
  t.header = {"delta_a", "delta_sigma"};
  for (Order o : dists) t.header.push_back(detail::order_name("P_", o));
  for (Order o : corrs) t.header.push_back(detail::order_name("g_", o));
  t.header.insert(t.header.end(), {"tail_a", "tail_b", "error"});
  for (const SweepPoint& p : points) {
    std::vector<Cell> row = {p.delta_a, p.delta_sigma};
    for (double v : p.distribution) row.emplace_back(v);
    for (double v : p.correlation) row.emplace_back(v);
    row.insert(row.end(), {p.tail_a, p.tail_b, p.error});
    t.add_row(std::move(row));
  }
  return {{"sweep.csv", std::move(t)}};
}

inline CommandOutput cmd_g2tau(const RunConfig& cfg, const RunOptions& run = {}) {
  const ModelConfig& m = cfg.model;
  const OperatorSet ops = build_operators(m);
  const Liouvillian liou = build_liouvillian(ops, m);
  SteadyStateOptions opts;
  opts.verify_unique = cfg.solver.verify_unique;
  const SteadyState ss = solve_steady_state(liou, opts);
  const TailReport tails = truncation_check(ss.rho, m);

  const Order bundle = cfg.bundle.value_or(Order{m.n, m.m});
  const double t_min = tau_min(bundle.first, bundle.second, m.kappa_a, m.kappa_b);
  std::vector<double> grid = cfg.delay_grid.values();
  if (std::find(grid.begin(), grid.end(), t_min) == grid.end() && t_min > grid.front() &&
      t_min < grid.back()) {
    grid.insert(std::upper_bound(grid.begin(), grid.end(), t_min), t_min);
  }

  OutputTable t = detail::new_table(cfg);
  t.metadata.emplace_back("tau_min", format_double(t_min));
  t.metadata.emplace_back("bundle", detail::order_name("", bundle));
  t.metadata.emplace_back("tail_a", format_double(tails.tail_a));
  t.metadata.emplace_back("tail_b", format_double(tails.tail_b));

  // Four independent regressions; each is one ODE solve.
  std::vector<std::vector<double>> columns(4, std::vector<double>(grid.size(), kNaN));
  std::vector<std::string> errors(4);
  const std::pair<Mode, Mode> pairs[3] = {{Mode::a, Mode::a}, {Mode::b, Mode::b}, {Mode::a, Mode::b}};
  parallel_for(4, run.jobs, [&](std::size_t c) {
    try {
      if (c < 3) {
        columns[c] = g2_delayed(liou, ss, ops, pairs[c].first, pairs[c].second, grid).values;
      } else {
        columns[c] = g2_bundle(liou, ss, ops, bundle.first, bundle.second, m.kappa_a, m.kappa_b, grid).values;
      }
    } catch (const NumericalError& e) {
      errors[c] = e.what();
    }
  });
  const char* names[4] = {"g2_aa", "g2_bb", "g2_ab", "g2_bundle"};
  for (std::size_t c = 0; c < 4; ++c) {
    if (!errors[c].empty()) t.metadata.emplace_back(std::string("error ") + names[c], errors[c]);
  }
  t.header = {"tau", "g2_aa", "g2_bb", "g2_ab", "g2_bundle", "below_tau_min"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    t.add_row({grid[i], columns[0][i], columns[1][i], columns[2][i], columns[3][i],
               std::int64_t{grid[i] < t_min ? 1 : 0}});
  }
  return {{"g2tau.csv", std::move(t)}};
}

inline CommandOutput cmd_trajectory(const RunConfig& cfg, const RunOptions& run = {}) {
  const ModelConfig& m = cfg.model;
  const OperatorSet ops = build_operators(m);
  const BasisLayout layout(m);
  const DressedRotation rot = dressed_rotation(m);
  const DenseVector psi0 = dressed_state(layout, rot, cfg.initial.k, cfg.initial.l, cfg.initial.s);
  const std::vector<double> grid = cfg.time_grid.values();
  TrajectoryOptions topts;
  topts.ode = detail::ode_control(cfg);
  const std::vector<Trajectory> trajs =
      run_ensemble(ops, m, psi0, grid, cfg.ensemble.n_traj, cfg.ensemble.base_seed, run.jobs, topts);
  const EnsembleAverage avg = ensemble_average(trajs);

  std::optional<EvolutionRecord> master;
  if (cfg.ensemble.compare_master) {
    const Liouvillian liou = build_liouvillian(ops, m);
    const DenseMatrix rho0 = psi0 * psi0.adjoint();
    master = evolve_master(liou, rho0, grid, detail::ode_control(cfg));
  }

  std::vector<DressedLabel> labels;
  for (auto [k, l] : cfg.populations.empty() ? detail::default_populations(m) : cfg.populations) {
    for (DressedSign s : {DressedSign::plus, DressedSign::minus}) labels.push_back({k, l, s});
  }
  const bool with_se = avg.count > 1;
  OutputTable pops = detail::new_table(cfg);
  pops.metadata.emplace_back("n_traj", std::to_string(avg.count));
  pops.header = {"t"};
  for (const DressedLabel& lab : labels) pops.header.push_back(to_string(lab));
  if (with_se) {
    for (const DressedLabel& lab : labels) pops.header.push_back("se_" + to_string(lab));
  }
  if (master) {
    for (const DressedLabel& lab : labels) pops.header.push_back("me_" + to_string(lab));
  }
  std::vector<Index> cols;
  for (const DressedLabel& lab : labels) cols.push_back(layout.flat(lab.k, lab.l, static_cast<int>(lab.s)));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Index r = static_cast<Index>(i);
    std::vector<Cell> row = {grid[i]};
    for (Index c : cols) row.emplace_back(avg.mean(r, c));
    if (with_se) {
      for (Index c : cols) row.emplace_back(avg.std_error(r, c));
    }
    if (master) {
      for (const DressedLabel& lab : labels) row.emplace_back(master->populations.at(lab)[i]);
    }
    pops.add_row(std::move(row));
  }

  OutputTable jumps = detail::new_table(cfg);
  jumps.header = {"trajectory", "seed", "time", "channel", "pre_jump_norm"};
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    for (const JumpEvent& j : trajs[i].jumps) {
      jumps.add_row({static_cast<std::int64_t>(i), static_cast<std::int64_t>(trajs[i].seed), j.time,
                     std::string(to_string(j.channel)), j.pre_jump_norm});
    }
  }
  return {{"trajectory_populations.csv", std::move(pops)}, {"trajectory_jumps.csv", std::move(jumps)}};
}

inline CommandOutput run_command(const RunConfig& cfg, const RunOptions& run = {}) {
  switch (cfg.scenario) {
    case Scenario::resonance: return cmd_resonance(cfg, run);
    case Scenario::rabi: return cmd_rabi(cfg, run);
    case Scenario::sweep: return cmd_sweep(cfg, run);
    case Scenario::g2tau: return cmd_g2tau(cfg, run);
    case Scenario::trajectory: return cmd_trajectory(cfg, run);
  }
  throw ConfigError("unknown scenario");
}

}  // namespace mpjc::cli

#endif  // MPJC_CLI_COMMANDS_HPP

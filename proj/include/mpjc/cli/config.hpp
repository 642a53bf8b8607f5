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


#ifndef MPJC_CLI_CONFIG_HPP
#define MPJC_CLI_CONFIG_HPP

// Run configuration: JSON in, validated RunConfig out, canonical JSON back.

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "mpjc/error.hpp"
#include "mpjc/model.hpp"
#include "mpjc/ode.hpp"

namespace mpjc::cli {

using Json = nlohmann::ordered_json;

enum class Scenario { resonance, rabi, sweep, g2tau, trajectory };

inline const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::resonance: return "resonance";
    case Scenario::rabi: return "rabi";
    case Scenario::sweep: return "sweep";
    case Scenario::g2tau: return "g2tau";
    case Scenario::trajectory: return "trajectory";
  }
  return "?";
}

struct GridSpec {
  double start = 0.0;
  double stop = 1.0;
  std::size_t points = 2;

  std::vector<double> values() const { return linspace(start, stop, points); }
  bool operator==(const GridSpec&) const = default;
};

struct EnsembleSpec {
  std::size_t n_traj = 1;
  std::uint64_t base_seed = 0;
  /// Add master-equation populations next to the ensemble means.
  bool compare_master = false;
  bool operator==(const EnsembleSpec&) const = default;
};

struct InitialState {
  int k = 0;
  int l = 0;
  DressedSign s = DressedSign::plus;
  bool operator==(const InitialState&) const = default;
};

struct SolverSpec {
  double rel_tol = 1e-8;
  double abs_tol = 1e-11;
  bool verify_unique = false;
  bool operator==(const SolverSpec&) const = default;
};

using Order = std::pair<int, int>;

struct RunConfig {
  Scenario scenario = Scenario::resonance;
  ModelConfig model;
  /// Set when the detunings were resolved from big deltas on a resonance branch.
  std::optional<ResonanceBranch> branch;
  GridSpec sweep{-10.0, 10.0, 81};
  GridSpec time_grid{0.0, 10.0, 201};
  GridSpec delay_grid{0.0, 10.0, 201};
  EnsembleSpec ensemble;
  InitialState initial;
  SolverSpec solver;
  std::vector<Order> distributions;
  std::vector<Order> correlations;
  std::vector<Order> populations;
  std::optional<Order> bundle;
  std::string output_dir;

  bool operator==(const RunConfig&) const = default;
};

// ---------------------------------------------------------------------------
// Reading

namespace detail {

class Reader {
 public:
  Reader(const Json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("config " + (path_.empty() ? std::string("/") : path_) + ": " + what);
  }

  bool has(const char* key) const { return node_.contains(key); }

  std::string at(const char* key) const { return path_ + "/" + key; }

  const Json& raw(const char* key) const {
    seen_.insert(key);
    if (!node_.contains(key)) fail(std::string("missing required key '") + key + "'");
    return node_.at(key);
  }

  double number(const char* key) const {
    const Json& v = raw(key);
    if (!v.is_number()) fail(std::string("'") + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(std::string("'") + key + "' must be finite");
    return d;
  }

  double number(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }

  std::optional<double> optional_number(const char* key) const {
    return has(key) ? std::optional<double>(number(key)) : std::nullopt;
  }

  long long integer(const char* key) const {
    const Json& v = raw(key);
    if (!v.is_number_integer()) fail(std::string("'") + key + "' must be an integer");
    return v.get<long long>();
  }

  long long integer(const char* key, long long fallback) const {
    return has(key) ? integer(key) : fallback;
  }

  std::uint64_t unsigned_integer(const char* key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const Json& v = raw(key);
    if (!v.is_number_unsigned()) fail(std::string("'") + key + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const Json& v = raw(key);
    if (!v.is_boolean()) fail(std::string("'") + key + "' must be true or false");
    return v.get<bool>();
  }

  std::string string(const char* key) const {
    const Json& v = raw(key);
    if (!v.is_string()) fail(std::string("'") + key + "' must be a string");
    return v.get<std::string>();
  }

  Reader child(const char* key) const { return Reader(raw(key), at(key)); }

  /// Rejects keys that were never read.
  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!seen_.count(it.key())) fail("unknown key '" + it.key() + "'");
    }
  }

 private:
  const Json& node_;
  std::string path_;
  mutable std::set<std::string, std::less<>> seen_;
};

inline GridSpec read_grid(const Reader& r) {
  GridSpec g;
  g.start = r.number("start");
  g.stop = r.number("stop");
  const long long points = r.integer("points");
  if (points < 1) r.fail("'points' must be >= 1");
  g.points = static_cast<std::size_t>(points);
  if (g.points > 1 && !(g.stop > g.start)) r.fail("'stop' must exceed 'start'");
  r.finish();
  return g;
}

inline std::vector<Order> read_orders(const Reader& r, const char* key) {
  std::vector<Order> out;
  if (!r.has(key)) return out;
  const Json& list = r.raw(key);
  if (!list.is_array()) r.fail(std::string("'") + key + "' must be an array of [k, l] pairs");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const Json& pair = list[i];
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
        !pair[1].is_number_integer()) {
      r.fail(std::string("'") + key + "'[" + std::to_string(i) + "] must be [k, l] integers");
    }
    const int k = pair[0].get<int>();
    const int l = pair[1].get<int>();
    if (k < 0 || l < 0) r.fail(std::string("'") + key + "' orders must be non-negative");
    out.emplace_back(k, l);
  }
  return out;
}

inline Scenario parse_scenario(const Reader& r, const std::string& s) {
  for (Scenario sc : {Scenario::resonance, Scenario::rabi, Scenario::sweep, Scenario::g2tau,
                      Scenario::trajectory}) {
    if (s == to_string(sc)) return sc;
  }
  r.fail("unknown scenario '" + s + "'");
}

inline ResonanceBranch parse_branch(const Reader& r, const std::string& s) {
  if (s == "plus") return ResonanceBranch::plus_state_start;
  if (s == "minus") return ResonanceBranch::minus_state_start;
  r.fail("'branch' must be \"plus\" or \"minus\"");
}

inline const char* branch_name(ResonanceBranch b) {
  return b == ResonanceBranch::plus_state_start ? "plus" : "minus";
}

inline DressedSign parse_sign(const Reader& r, const std::string& s) {
  if (s == "plus") return DressedSign::plus;
  if (s == "minus") return DressedSign::minus;
  r.fail("'s' must be \"plus\" or \"minus\"");
}

inline void read_model(const Reader& r, RunConfig& out) {
  ModelConfig& m = out.model;
  const long long n = r.integer("n");
  const long long mm = r.integer("m");
  if (n < 0 || mm < 0 || n > 12 || mm > 12) r.fail("'n' and 'm' must lie in [0, 12]");
  m.n = static_cast<int>(n);
  m.m = static_cast<int>(mm);
  if (m.n + m.m <= 0) r.fail("n + m must be positive");
  m.g = r.number("g");
  m.omega_l = r.number("omega_l");
  m.kappa_a = r.number("kappa_a");
  m.kappa_b = r.number("kappa_b");
  m.gamma = r.number("gamma");
  m.big_delta_a = r.optional_number("big_delta_a");
  m.big_delta_b = r.optional_number("big_delta_b");
  const bool has_branch = r.has("branch");
  const bool has_explicit = r.has("delta_a") || r.has("delta_b") || r.has("delta_sigma");
  if (has_branch && has_explicit) {
    r.fail("give either (big_delta_a, big_delta_b, branch) or (delta_a, delta_b, delta_sigma), not both");
  }
  if (has_branch) {
    if (!m.big_delta_a || !m.big_delta_b) r.fail("'branch' needs big_delta_a and big_delta_b");
    out.branch = parse_branch(r, r.string("branch"));
    std::tie(m.delta_a, m.delta_b) =
        resonance_detunings(m.n, m.m, *m.big_delta_a, *m.big_delta_b, m.omega_l, *out.branch);
    m.delta_sigma = sigma_detuning(*m.big_delta_a, *m.big_delta_b, m.n, m.m, m.delta_a, m.delta_b);
  } else if (has_explicit) {
    m.delta_a = r.number("delta_a");
    m.delta_b = r.number("delta_b");
    m.delta_sigma = r.number("delta_sigma");
  } else {
    r.fail("missing detunings: need (big_delta_a, big_delta_b, branch) or (delta_a, delta_b, delta_sigma)");
  }
  m.trunc_a = static_cast<int>(r.integer("trunc_a", default_truncation(m.n)));
  m.trunc_b = static_cast<int>(r.integer("trunc_b", default_truncation(m.m)));
  r.finish();
  try {
    validate(m);
  } catch (const ConfigError& e) {
    r.fail(e.what());
  }
}

inline void check_orders(const RunConfig& cfg) {
  auto within = [&](const std::vector<Order>& list, const char* what) {
    for (auto [k, l] : list) {
      if (k > cfg.model.trunc_a || l > cfg.model.trunc_b) {
        throw ConfigError(std::string("config /observables/") + what + ": order (" +
                          std::to_string(k) + ", " + std::to_string(l) + ") exceeds truncation");
      }
    }
  };
  within(cfg.distributions, "distributions");
  within(cfg.correlations, "correlations");
  within(cfg.populations, "populations");
  for (auto [k, l] : cfg.correlations) {
    if (k + l == 0) throw ConfigError("config /observables/correlations: order (0, 0) is undefined");
  }
  if (cfg.bundle) {
    within({*cfg.bundle}, "bundle");
    if (cfg.bundle->first + cfg.bundle->second == 0) {
      throw ConfigError("config /observables/bundle: order (0, 0) is undefined");
    }
  }
  if (cfg.initial.k > cfg.model.trunc_a || cfg.initial.l > cfg.model.trunc_b) {
    throw ConfigError("config /initial_state: Fock numbers exceed truncation");
  }
}

}  // namespace detail

inline RunConfig from_json(const Json& doc) {
  const detail::Reader root(doc, "");
  RunConfig cfg;
  cfg.scenario = detail::parse_scenario(root, root.string("scenario"));
  detail::read_model(root.child("model"), cfg);
  if (root.has("sweep")) {
    const detail::Reader s = root.child("sweep");
    const std::string parameter = s.has("parameter") ? s.string("parameter") : "delta_a";
    if (parameter != "delta_a") s.fail("only 'delta_a' can be swept");
    cfg.sweep.start = s.number("start");
    cfg.sweep.stop = s.number("stop");
    const long long points = s.integer("points");
    if (points < 2 && !(points == 1 && cfg.sweep.start == cfg.sweep.stop)) {
      s.fail("'points' must be >= 2 (or 1 with start == stop)");
    }
    if (points > 1 && !(cfg.sweep.stop > cfg.sweep.start)) s.fail("'stop' must exceed 'start'");
    cfg.sweep.points = static_cast<std::size_t>(points);
    s.finish();
    if (!cfg.model.big_delta_a) {
      s.fail("sweeping delta_a needs model big_delta_a and big_delta_b");
    }
  } else if (cfg.scenario == Scenario::sweep) {
    root.fail("scenario 'sweep' needs a 'sweep' section");
  }
  if (root.has("time_grid")) cfg.time_grid = detail::read_grid(root.child("time_grid"));
  if (root.has("delay_grid")) {
    cfg.delay_grid = detail::read_grid(root.child("delay_grid"));
    if (cfg.delay_grid.start < 0.0) root.fail("delay_grid must start at tau >= 0");
  }
  if (root.has("ensemble")) {
    const detail::Reader e = root.child("ensemble");
    const long long n = e.integer("n_traj", 1);
    if (n < 1) e.fail("'n_traj' must be >= 1");
    cfg.ensemble.n_traj = static_cast<std::size_t>(n);
    cfg.ensemble.base_seed = e.unsigned_integer("base_seed", 0);
    cfg.ensemble.compare_master = e.boolean("compare_master", false);
    e.finish();
  }
  if (root.has("initial_state")) {
    const detail::Reader s = root.child("initial_state");
    cfg.initial.k = static_cast<int>(s.integer("k", 0));
    cfg.initial.l = static_cast<int>(s.integer("l", 0));
    if (cfg.initial.k < 0 || cfg.initial.l < 0) s.fail("Fock numbers must be non-negative");
    cfg.initial.s = s.has("s") ? detail::parse_sign(s, s.string("s")) : DressedSign::plus;
    s.finish();
  }
  if (root.has("solver")) {
    const detail::Reader s = root.child("solver");
    cfg.solver.rel_tol = s.number("rel_tol", cfg.solver.rel_tol);
    cfg.solver.abs_tol = s.number("abs_tol", cfg.solver.abs_tol);
    cfg.solver.verify_unique = s.boolean("verify_unique", false);
    if (!(cfg.solver.rel_tol > 0.0) || !(cfg.solver.abs_tol > 0.0)) {
      s.fail("tolerances must be positive");
    }
    s.finish();
  }
  if (root.has("observables")) {
    const detail::Reader o = root.child("observables");
    cfg.distributions = detail::read_orders(o, "distributions");
    cfg.correlations = detail::read_orders(o, "correlations");
    cfg.populations = detail::read_orders(o, "populations");
    if (o.has("bundle")) {
      const std::vector<Order> b = detail::read_orders(o, "bundle");
      if (b.size() != 1) o.fail("'bundle' must hold exactly one [N, M] pair");
      cfg.bundle = b.front();
    }
    o.finish();
  }
  if (root.has("output_dir")) cfg.output_dir = root.string("output_dir");
  root.finish();
  detail::check_orders(cfg);
  return cfg;
}

/// "line L, column C" for a byte offset into text.
inline std::string describe_position(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline RunConfig parse_config(const std::string& text, const std::string& origin = "<string>") {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    throw ConfigError(origin + ": JSON syntax error at " + describe_position(text, at) + ": " +
                      e.what());
  }
  try {
    return from_json(doc);
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

inline constexpr const char* kConfigMarker = "# config: ";

/// Reads a JSON config, or the config embedded in a CSV written by this tool.
inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) {
    std::istringstream lines(text);
    std::string line;
    const std::string marker = kConfigMarker;
    while (std::getline(lines, line)) {
      if (line.rfind(marker, 0) == 0) return parse_config(line.substr(marker.size()), path);
    }
    throw ConfigError(path + ": no embedded '" + marker + "' line");
  }
  return parse_config(text, path);
}

// ---------------------------------------------------------------------------
// Writing

namespace detail {

inline Json grid_json(const GridSpec& g) {
  return Json{{"start", g.start}, {"stop", g.stop}, {"points", g.points}};
}

inline Json orders_json(const std::vector<Order>& list) {
  Json out = Json::array();
  for (auto [k, l] : list) out.push_back(Json::array({k, l}));
  return out;
}

}  // namespace detail

/// Canonical form: every section written out, so reloading gives an equal RunConfig.
inline Json to_json(const RunConfig& cfg) {
  const ModelConfig& m = cfg.model;
  Json model{{"n", m.n}, {"m", m.m}, {"g", m.g}, {"omega_l", m.omega_l}};
  if (m.big_delta_a) {
    model["big_delta_a"] = *m.big_delta_a;
    model["big_delta_b"] = *m.big_delta_b;
  }
  if (cfg.branch) {
    model["branch"] = detail::branch_name(*cfg.branch);
  } else {
    model["delta_a"] = m.delta_a;
    model["delta_b"] = m.delta_b;
    model["delta_sigma"] = m.delta_sigma;
  }
  model["kappa_a"] = m.kappa_a;
  model["kappa_b"] = m.kappa_b;
  model["gamma"] = m.gamma;
  model["trunc_a"] = m.trunc_a;
  model["trunc_b"] = m.trunc_b;

  Json doc{{"scenario", to_string(cfg.scenario)}, {"model", model}};
  if (m.big_delta_a) {
    doc["sweep"] = Json{{"parameter", "delta_a"}, {"start", cfg.sweep.start},
                        {"stop", cfg.sweep.stop}, {"points", cfg.sweep.points}};
  }
  doc["time_grid"] = detail::grid_json(cfg.time_grid);
  doc["delay_grid"] = detail::grid_json(cfg.delay_grid);
  doc["ensemble"] = Json{{"n_traj", cfg.ensemble.n_traj},
                         {"base_seed", cfg.ensemble.base_seed},
                         {"compare_master", cfg.ensemble.compare_master}};
  doc["initial_state"] =
      Json{{"k", cfg.initial.k}, {"l", cfg.initial.l}, {"s", to_string(cfg.initial.s)}};
  doc["solver"] = Json{{"rel_tol", cfg.solver.rel_tol},
                       {"abs_tol", cfg.solver.abs_tol},
                       {"verify_unique", cfg.solver.verify_unique}};
  Json obs{{"distributions", detail::orders_json(cfg.distributions)},
           {"correlations", detail::orders_json(cfg.correlations)},
           {"populations", detail::orders_json(cfg.populations)}};
  if (cfg.bundle) obs["bundle"] = detail::orders_json({*cfg.bundle});
  doc["observables"] = obs;
  if (!cfg.output_dir.empty()) doc["output_dir"] = cfg.output_dir;
  return doc;
}

}  // namespace mpjc::cli

#endif  // MPJC_CLI_CONFIG_HPP

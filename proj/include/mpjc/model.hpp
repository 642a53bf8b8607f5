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

#ifndef MPJC_MODEL_HPP
#define MPJC_MODEL_HPP

// Driven nondegenerate multiphoton Jaynes-Cummings model: a two-level system
// (TLS) exchanging n photons of mode a and m photons of mode b per flip,
// driven by a laser of amplitude omega_l, in the frame rotating with the
// drive. Hilbert space ordering is TLS (x) a (x) b.

#include <algorithm>
#include <cmath>
#include <compare>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mpjc/error.hpp"
#include "mpjc/tensor.hpp"

namespace mpjc {

/// Which dressed state the system starts from in the resonant transition
/// |0,0,start> <-> |n,m,other>.
enum class ResonanceBranch { plus_state_start, minus_state_start };

inline const char* to_string(ResonanceBranch b) {
  return b == ResonanceBranch::plus_state_start ? "plus" : "minus";
}

struct ModelConfig {
  int n = 1;
  int m = 1;
  double g = 0.0;
  double omega_l = 0.0;
  double delta_a = 0.0;
  double delta_b = 0.0;
  double delta_sigma = 0.0;
  /// Optional alternative parameterization; when present the relation
  /// delta_sigma = big_delta_a + big_delta_b + n*delta_a + m*delta_b must hold.
  std::optional<double> big_delta_a;
  std::optional<double> big_delta_b;
  double kappa_a = 0.0;
  double kappa_b = 0.0;
  double gamma = 0.0;
  int trunc_a = 6;
  int trunc_b = 6;

  bool operator==(const ModelConfig&) const = default;

  /// n*delta_a + m*delta_b, the detuning of the |k,l> -> |k+n,l+m> ladder.
  double detuning_sum() const { return n * delta_a + m * delta_b; }
};

/// Smallest truncation that still contains the 2(n+m)-photon sector.
inline int minimum_truncation(int photons) { return 2 * photons + 1; }

/// Default Fock cutoff: the mu = 2 sector plus one guard level, at least 6.
inline int default_truncation(int photons) { return std::max(2 * photons + 2, 6); }

inline double sigma_detuning(double big_delta_a, double big_delta_b, int n, int m, double delta_a,
                             double delta_b) {
  return big_delta_a + big_delta_b + n * delta_a + m * delta_b;
}

inline void validate(const ModelConfig& cfg) {
  auto fail = [](const std::string& what) { throw ConfigError("model: " + what); };
  if (cfg.n < 0 || cfg.m < 0) fail("photon numbers n and m must be natural numbers");
  if (cfg.n + cfg.m <= 0) fail("n + m must be positive");
  if (cfg.n > 12 || cfg.m > 12) fail("photon numbers above 12 are not supported");
  for (auto [name, value] :
       {std::pair{"g", cfg.g}, std::pair{"omega_l", cfg.omega_l}, std::pair{"delta_a", cfg.delta_a},
        std::pair{"delta_b", cfg.delta_b}, std::pair{"delta_sigma", cfg.delta_sigma},
        std::pair{"kappa_a", cfg.kappa_a}, std::pair{"kappa_b", cfg.kappa_b},
        std::pair{"gamma", cfg.gamma}}) {
    if (!std::isfinite(value)) fail(std::string(name) + " must be finite");
  }
  if (cfg.omega_l < 0.0) fail("omega_l must be non-negative");
  if (cfg.kappa_a < 0.0 || cfg.kappa_b < 0.0 || cfg.gamma < 0.0) fail("decay rates must be >= 0");
  if (cfg.trunc_a < minimum_truncation(cfg.n)) {
    fail("trunc_a = " + std::to_string(cfg.trunc_a) + " is below the minimum " +
         std::to_string(minimum_truncation(cfg.n)) + " (2n+1)");
  }
  if (cfg.trunc_b < minimum_truncation(cfg.m)) {
    fail("trunc_b = " + std::to_string(cfg.trunc_b) + " is below the minimum " +
         std::to_string(minimum_truncation(cfg.m)) + " (2m+1)");
  }
  if (cfg.big_delta_a.has_value() != cfg.big_delta_b.has_value()) {
    fail("big_delta_a and big_delta_b must be given together");
  }
  if (cfg.big_delta_a) {
    if (!std::isfinite(*cfg.big_delta_a) || !std::isfinite(*cfg.big_delta_b)) {
      fail("big_delta_a/big_delta_b must be finite");
    }
    const double expected = sigma_detuning(*cfg.big_delta_a, *cfg.big_delta_b, cfg.n, cfg.m,
                                           cfg.delta_a, cfg.delta_b);
    const double scale = std::max({1.0, std::abs(expected), std::abs(cfg.delta_sigma)});
    if (std::abs(expected - cfg.delta_sigma) > 1e-9 * scale) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "delta_sigma = " << cfg.delta_sigma
          << " is inconsistent with big_delta_a + big_delta_b + n*delta_a + m*delta_b = "
          << expected;
      fail(msg.str());
    }
  }
}

/// n! computed by floating-point accumulation; exact in double for n <= 18.
inline double factorial(int n) {
  double out = 1.0;
  for (int k = 2; k <= n; ++k) out *= k;
  return out;
}

// ---------------------------------------------------------------------------
// Basis indexing

enum class TlsLabel { e = 0, g = 1 };
enum class DressedSign { plus = 0, minus = 1 };

inline const char* to_string(DressedSign s) { return s == DressedSign::plus ? "plus" : "minus"; }
inline char symbol(DressedSign s) { return s == DressedSign::plus ? '+' : '-'; }

struct BasisIndex {
  int k = 0;
  int l = 0;
  int s = 0;
  Index flat = 0;
};

/// flat = s*(N_a+1)*(N_b+1) + k*(N_b+1) + l, with s = 0 for |e> (or |+>) and
/// s = 1 for |g> (or |->).
class BasisLayout {
 public:
  BasisLayout(int trunc_a, int trunc_b) : trunc_a_(trunc_a), trunc_b_(trunc_b) {
    if (trunc_a < 0 || trunc_b < 0) throw DimensionError("BasisLayout: negative truncation");
  }
  explicit BasisLayout(const ModelConfig& cfg) : BasisLayout(cfg.trunc_a, cfg.trunc_b) {}

  int trunc_a() const noexcept { return trunc_a_; }
  int trunc_b() const noexcept { return trunc_b_; }
  Index levels_a() const noexcept { return trunc_a_ + 1; }
  Index levels_b() const noexcept { return trunc_b_ + 1; }
  Index photon_block() const noexcept { return levels_a() * levels_b(); }
  Index dim() const noexcept { return 2 * photon_block(); }

  Index flat(int k, int l, int s) const {
    if (k < 0 || k > trunc_a_ || l < 0 || l > trunc_b_ || s < 0 || s > 1) {
      std::ostringstream msg;
      msg << "basis label (" << k << ", " << l << ", " << s << ") outside the truncated space";
      throw DimensionError(msg.str());
    }
    return s * photon_block() + k * levels_b() + l;
  }

  BasisIndex unflatten(Index flat) const {
    if (flat < 0 || flat >= dim()) throw DimensionError("flat index outside the truncated space");
    BasisIndex idx;
    idx.flat = flat;
    idx.s = static_cast<int>(flat / photon_block());
    const Index rest = flat % photon_block();
    idx.k = static_cast<int>(rest / levels_b());
    idx.l = static_cast<int>(rest % levels_b());
    return idx;
  }

  DenseVector basis_vector(int k, int l, int s) const {
    DenseVector v = DenseVector::Zero(dim());
    v[flat(k, l, s)] = 1.0;
    return v;
  }

 private:
  int trunc_a_;
  int trunc_b_;
};

// ---------------------------------------------------------------------------
// Dressed states of H_sigma = (delta_sigma/2) sigma_z + omega_l sigma_x

struct DressedBasis {
  double e_plus = 0.0;
  double e_minus = 0.0;
  double omega_gen = 0.0;
  double c_plus = 0.0;
  double c_minus = 0.0;
  // <s|sigma_-|r>
  double a_pp = 0.0;
  double a_pm = 0.0;
  double a_mp = 0.0;
  double a_mm = 0.0;
};

inline double generalized_rabi_frequency(double delta_sigma, double omega_l) {
  return std::sqrt(delta_sigma * delta_sigma + 4.0 * omega_l * omega_l);
}

/// Throws NumericalError when Omega = 0 (undriven, unsplit TLS).
inline DressedBasis dressed_basis(double delta_sigma, double omega_l) {
  const double omega = generalized_rabi_frequency(delta_sigma, omega_l);
  if (!(omega > 0.0)) {
    throw NumericalError("dressed basis is degenerate: omega_l = 0 and delta_sigma = 0");
  }
  DressedBasis d;
  d.omega_gen = omega;
  d.e_plus = 0.5 * omega;
  d.e_minus = -0.5 * omega;
  // c_pm^2 = 2 omega_l^2 / (Omega^2 -+ Omega delta_sigma) = (Omega +- delta_sigma) / (2 Omega);
  // the second form stays finite when omega_l -> 0.
  d.c_plus = std::sqrt(std::max(0.0, (omega + delta_sigma) / (2.0 * omega)));
  d.c_minus = std::sqrt(std::max(0.0, (omega - delta_sigma) / (2.0 * omega)));
  d.a_pp = d.c_plus * d.c_minus;
  d.a_pm = d.c_minus * d.c_minus;
  d.a_mp = -d.c_plus * d.c_plus;
  d.a_mm = -d.c_plus * d.c_minus;
  return d;
}

inline DressedBasis dressed_basis(const ModelConfig& cfg) {
  return dressed_basis(cfg.delta_sigma, cfg.omega_l);
}

/// Coefficients (c_+, c_-) used to project onto |+> = c_+|e> + c_-|g> and
/// |-> = c_-|e> - c_+|g>. For an undriven resonant TLS the dressed basis is
/// degenerate; its delta_sigma -> 0+ limit (|+> = |e>, |-> = -|g>) is used.
struct DressedRotation {
  double c_plus = 1.0;
  double c_minus = 0.0;
};

inline DressedRotation dressed_rotation(const ModelConfig& cfg) {
  if (generalized_rabi_frequency(cfg.delta_sigma, cfg.omega_l) > 0.0) {
    const DressedBasis d = dressed_basis(cfg);
    return {d.c_plus, d.c_minus};
  }
  return {};
}

/// Full-space vector |k>_a |l>_b |s>, s a dressed label.
inline DenseVector dressed_state(const BasisLayout& layout, const DressedRotation& rot, int k, int l,
                                 DressedSign s) {
  DenseVector v = DenseVector::Zero(layout.dim());
  const Index e = layout.flat(k, l, 0);
  const Index g = layout.flat(k, l, 1);
  if (s == DressedSign::plus) {
    v[e] = rot.c_plus;
    v[g] = rot.c_minus;
  } else {
    v[e] = rot.c_minus;
    v[g] = -rot.c_plus;
  }
  return v;
}

/// Populations P_{|k,l,s>} of a pure state, indexed by layout.flat(k, l, s)
/// with s = 0 for |+> and s = 1 for |->.
inline std::vector<double> dressed_populations(const BasisLayout& layout,
                                               const DressedRotation& rot,
                                               const DenseVector& psi) {
  std::vector<double> out(static_cast<std::size_t>(layout.dim()));
  for (int k = 0; k <= layout.trunc_a(); ++k) {
    for (int l = 0; l <= layout.trunc_b(); ++l) {
      const Complex ae = psi[layout.flat(k, l, 0)];
      const Complex ag = psi[layout.flat(k, l, 1)];
      out[layout.flat(k, l, 0)] = std::norm(rot.c_plus * ae + rot.c_minus * ag);
      out[layout.flat(k, l, 1)] = std::norm(rot.c_minus * ae - rot.c_plus * ag);
    }
  }
  return out;
}

inline std::vector<double> dressed_populations(const BasisLayout& layout,
                                               const DressedRotation& rot,
                                               const DenseMatrix& rho) {
  std::vector<double> out(static_cast<std::size_t>(layout.dim()));
  const double cp2 = rot.c_plus * rot.c_plus;
  const double cm2 = rot.c_minus * rot.c_minus;
  const double cross = 2.0 * rot.c_plus * rot.c_minus;
  for (int k = 0; k <= layout.trunc_a(); ++k) {
    for (int l = 0; l <= layout.trunc_b(); ++l) {
      const Index e = layout.flat(k, l, 0);
      const Index g = layout.flat(k, l, 1);
      const double ree = rho(e, e).real();
      const double rgg = rho(g, g).real();
      const double reg = rho(e, g).real();
      out[e] = cp2 * ree + cm2 * rgg + cross * reg;
      out[g] = cm2 * ree + cp2 * rgg - cross * reg;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Operators

struct OperatorSet {
  SparseOperator a, a_dag, b, b_dag;
  SparseOperator sigma_minus, sigma_plus, sigma_z, sigma_x;
  SparseOperator h_int;
  SparseOperator h0_prime;
  Index dim = 0;
};

/// Single-mode annihilator on levels 0..trunc.
inline SparseOperator annihilator(int trunc) {
  std::vector<Eigen::Triplet<Complex>> t;
  for (int k = 1; k <= trunc; ++k) t.emplace_back(k - 1, k, std::sqrt(static_cast<double>(k)));
  return from_triplets(trunc + 1, trunc + 1, t);
}

inline OperatorSet build_operators(const ModelConfig& cfg) {
  validate(cfg);
  const BasisLayout layout(cfg);
  const SparseOperator id_tls = identity(2);
  const SparseOperator id_a = identity(layout.levels_a());
  const SparseOperator id_b = identity(layout.levels_b());
  const SparseOperator id_photons = identity(layout.photon_block());

  // TLS index 0 = |e>, 1 = |g>.
  const SparseOperator sm = from_triplets(2, 2, {{1, 0, 1.0}});
  const SparseOperator sz = from_triplets(2, 2, {{0, 0, 1.0}, {1, 1, -1.0}});
  const SparseOperator sx = from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, 1.0}});

  OperatorSet ops;
  ops.dim = layout.dim();
  ops.a = kron(id_tls, kron(annihilator(cfg.trunc_a), id_b));
  ops.b = kron(id_tls, kron(id_a, annihilator(cfg.trunc_b)));
  ops.a_dag = adjoint(ops.a);
  ops.b_dag = adjoint(ops.b);
  ops.sigma_minus = kron(sm, id_photons);
  ops.sigma_plus = adjoint(ops.sigma_minus);
  ops.sigma_z = kron(sz, id_photons);
  ops.sigma_x = kron(sx, id_photons);

  SparseOperator num_a = ops.a_dag * ops.a;
  SparseOperator num_b = ops.b_dag * ops.b;
  ops.h0_prime = Complex(0.5 * cfg.delta_sigma) * ops.sigma_z + Complex(cfg.delta_a) * num_a +
                 Complex(cfg.delta_b) * num_b + Complex(cfg.omega_l) * ops.sigma_x;
  purge(ops.h0_prime);

  SparseOperator absorb = power(ops.a, cfg.n) * power(ops.b, cfg.m) * ops.sigma_plus;
  SparseOperator coupling = absorb + adjoint(absorb);
  ops.h_int = ops.h0_prime + Complex(cfg.g) * coupling;
  purge(ops.h_int);
  require_finite(ops.h_int, "H_int");
  return ops;
}

// ---------------------------------------------------------------------------
// Resonance conditions

/// Solves n*delta_a + m*delta_b = +-Omega together with
/// n*delta_a - m*delta_b = big_delta_b - big_delta_a. The sign of
/// big_delta_a + big_delta_b decides which branch is reachable; asking for the
/// other one is a ConfigError.
inline std::pair<double, double> resonance_detunings(int n, int m, double big_delta_a,
                                                     double big_delta_b, double omega_l,
                                                     ResonanceBranch branch) {
  if (n < 0 || m < 0 || n + m <= 0) throw ConfigError("resonance: need n, m >= 0 and n + m > 0");
  const double sum = big_delta_a + big_delta_b;
  const double scale = std::max({1.0, std::abs(big_delta_a), std::abs(big_delta_b)});
  if (std::abs(sum) <= 1e-14 * scale) {
    throw ConfigError("resonance: big_delta_a + big_delta_b = 0 makes the condition singular");
  }
  // With a single vanishing photon number the split of the sum between the
  // modes is fixed by that mode alone.
  const double ol2 = 4.0 * omega_l * omega_l;
  const double delta_a =
      n > 0 ? ((big_delta_b - 3.0 * big_delta_a) * sum - ol2) / (4.0 * n * sum) : 0.0;
  const double delta_b =
      m > 0 ? ((big_delta_a - 3.0 * big_delta_b) * sum - ol2) / (4.0 * m * sum) : 0.0;
  const bool plus_reachable = sum < 0.0;
  if ((branch == ResonanceBranch::plus_state_start) != plus_reachable) {
    std::ostringstream msg;
    msg << "resonance: the " << to_string(branch)
        << "-state branch needs big_delta_a + big_delta_b " << (plus_reachable ? "> 0" : "< 0")
        << ", got " << sum;
    throw ConfigError(msg.str());
  }
  return {delta_a, delta_b};
}

/// Both roots of mu*(n delta_a + m delta_b) = +-Omega for the sum
/// n*delta_a + m*delta_b, with delta_sigma following from the big-delta
/// relation. first: |0,0,+> <-> |mu n, mu m, ->; second: the minus start.
inline std::pair<double, double> higher_order_detuning_sums(double big_delta_sum, double omega_l,
                                                            int mu) {
  if (mu < 2) throw ConfigError("higher-order resonance needs mu >= 2");
  const double mu2 = static_cast<double>(mu) * mu;
  const double root = std::sqrt(mu2 * big_delta_sum * big_delta_sum +
                                4.0 * (mu2 - 1.0) * omega_l * omega_l);
  return {(big_delta_sum + root) / (mu2 - 1.0), (big_delta_sum - root) / (mu2 - 1.0)};
}

inline std::pair<double, double> higher_order_detuning_sums(int n, int m, double big_delta_a,
                                                            double big_delta_b, double omega_l,
                                                            int mu) {
  if (n < 0 || m < 0 || n + m <= 0) throw ConfigError("resonance: need n, m >= 0 and n + m > 0");
  return higher_order_detuning_sums(big_delta_a + big_delta_b, omega_l, mu);
}

/// delta_a that puts n*delta_a + m*delta_b at `sum` for a fixed delta_b.
inline double delta_a_for_sum(double sum, int n, int m, double delta_b) {
  if (n <= 0) throw ConfigError("delta_a_for_sum: n must be positive");
  return (sum - m * delta_b) / n;
}

// ---------------------------------------------------------------------------
// Effective super-Rabi dynamics between |0,0,+> and |n,m,->

struct EffectiveCoefficients {
  double nm_factorial = 1.0;
  double detuning_sum = 0.0;
  double pole = 0.0;  // L = g^2 n!m! c_-^4 - (x + E_+) E_-
  DressedBasis dressed;
};

inline EffectiveCoefficients effective_coefficients(const ModelConfig& cfg) {
  EffectiveCoefficients c;
  c.dressed = dressed_basis(cfg);
  c.nm_factorial = factorial(cfg.n) * factorial(cfg.m);
  c.detuning_sum = cfg.detuning_sum();
  const double cm4 = std::pow(c.dressed.c_minus, 4);
  const double first = c.nm_factorial * cfg.g * cfg.g * cm4;
  const double second = (c.detuning_sum + c.dressed.e_plus) * c.dressed.e_minus;
  c.pole = first - second;
  const double scale = std::max({std::abs(first), std::abs(second), 1e-300});
  if (std::abs(c.pole) <= 1e-12 * scale) {
    throw NumericalError("effective super-Rabi frequency has a pole (L = 0) at this configuration");
  }
  return c;
}

inline double omega_eff(const ModelConfig& cfg) {
  const EffectiveCoefficients c = effective_coefficients(cfg);
  const double cp2 = c.dressed.c_plus * c.dressed.c_plus;
  return std::sqrt(c.nm_factorial) * cfg.g * cp2 * (c.detuning_sum + c.dressed.e_plus) *
         c.dressed.e_minus / c.pole;
}

/// [[eps1, Omega_eff], [Omega_eff, eps2]] in the basis (|0,0,+>, |n,m,->).
inline DenseMatrix effective_two_level(const ModelConfig& cfg) {
  const EffectiveCoefficients c = effective_coefficients(cfg);
  const double cpcm2 = std::pow(c.dressed.c_plus * c.dressed.c_minus, 2);
  const double shift = c.nm_factorial * cfg.g * cfg.g * cpcm2 / c.pole;
  const double eps1 = shift * c.dressed.e_minus + c.dressed.e_plus;
  const double eps2 = shift * (c.detuning_sum + c.dressed.e_plus) + c.detuning_sum +
                      c.dressed.e_minus;
  const double coupling = omega_eff(cfg);
  DenseMatrix h(2, 2);
  h << eps1, coupling, coupling, eps2;
  return h;
}

/// Model configuration on the resonance of the requested branch, with
/// delta_sigma closed from the big-delta relation and default truncation.
inline ModelConfig resonant_config(int n, int m, double big_delta_a, double big_delta_b,
                                   double omega_l, double g, double kappa_a, double kappa_b,
                                   double gamma,
                                   ResonanceBranch branch = ResonanceBranch::plus_state_start) {
  ModelConfig cfg;
  cfg.n = n;
  cfg.m = m;
  cfg.g = g;
  cfg.omega_l = omega_l;
  cfg.kappa_a = kappa_a;
  cfg.kappa_b = kappa_b;
  cfg.gamma = gamma;
  cfg.big_delta_a = big_delta_a;
  cfg.big_delta_b = big_delta_b;
  std::tie(cfg.delta_a, cfg.delta_b) =
      resonance_detunings(n, m, big_delta_a, big_delta_b, omega_l, branch);
  cfg.delta_sigma = sigma_detuning(big_delta_a, big_delta_b, n, m, cfg.delta_a, cfg.delta_b);
  cfg.trunc_a = default_truncation(n);
  cfg.trunc_b = default_truncation(m);
  validate(cfg);
  return cfg;
}

/// Copy of cfg with delta_a replaced and delta_sigma recomputed from the
/// big-delta relation (the sweep protocol: delta_b and big deltas fixed).
inline ModelConfig with_delta_a(const ModelConfig& cfg, double delta_a) {
  if (!cfg.big_delta_a || !cfg.big_delta_b) {
    throw ConfigError("sweeping delta_a needs big_delta_a and big_delta_b");
  }
  ModelConfig out = cfg;
  out.delta_a = delta_a;
  out.delta_sigma =
      sigma_detuning(*cfg.big_delta_a, *cfg.big_delta_b, cfg.n, cfg.m, delta_a, cfg.delta_b);
  return out;
}

}  // namespace mpjc

#endif  // MPJC_MODEL_HPP

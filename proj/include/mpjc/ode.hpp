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

#ifndef MPJC_ODE_HPP
#define MPJC_ODE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

#include "mpjc/error.hpp"
#include "mpjc/tensor.hpp"

namespace mpjc {

struct OdeControl {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  /// Zero means unbounded.
  double max_step = 0.0;
  /// Zero selects an initial step automatically.
  double initial_step = 0.0;
  std::size_t max_steps = 100'000'000;
};

/// dy/dt = f(t, y), written into the third argument.
using OdeRhs = std::function<void(double, const DenseVector&, DenseVector&)>;

/// Dormand-Prince 5(4) pair with FSAL and the fourth-order continuous
/// extension. One call to step() advances by exactly one accepted step;
/// dense() interpolates anywhere inside the last accepted step.
class Dopri5 {
 public:
  Dopri5(OdeRhs f, double t0, DenseVector y0, OdeControl ctrl)
      : f_(std::move(f)), ctrl_(ctrl) {
    if (!(ctrl_.rel_tol > 0.0) || !(ctrl_.abs_tol > 0.0)) {
      throw NumericalError("ODE tolerances must be positive");
    }
    reset(t0, std::move(y0));
  }

  /// Restart from a new state (after a discontinuity such as a quantum jump).
  void reset(double t, DenseVector y) {
    t_ = t;
    t_prev_ = t;
    y_ = std::move(y);
    require_finite(y_, "ODE initial state");
    k1_.resize(y_.size());
    f_(t_, y_, k1_);
    h_ = ctrl_.initial_step > 0.0 ? ctrl_.initial_step : initial_step();
    y_prev_ = y_;
    have_step_ = false;
  }

  double t() const noexcept { return t_; }
  double t_prev() const noexcept { return t_prev_; }
  const DenseVector& y() const noexcept { return y_; }
  std::size_t accepted_steps() const noexcept { return accepted_; }

  /// Take one accepted step, never passing t_limit.
  void step(double t_limit = std::numeric_limits<double>::infinity()) {
    const double span = t_limit - t_;
    if (!(span > 0.0)) throw NumericalError("Dopri5::step: no room left before t_limit");
    for (;;) {
      double h = h_;
      if (ctrl_.max_step > 0.0) h = std::min(h, ctrl_.max_step);
      bool clipped = false;
      if (h >= span) {
        h = span;
        clipped = true;
      }
      const double min_h = 16.0 * std::numeric_limits<double>::epsilon() *
                           std::max(1.0, std::abs(t_));
      if (h < min_h) throw StepSizeUnderflow(t_, h);
      if (++attempts_ > ctrl_.max_steps) {
        std::ostringstream msg;
        msg << "ODE exceeded " << ctrl_.max_steps << " step attempts at t = " << t_;
        throw NumericalError(msg.str());
      }

      const double err = trial(h);
      if (err <= 1.0) {
        t_prev_ = t_;
        y_prev_.swap(y_);
        y_.swap(y_new_);
        h_last_ = h;
        t_ = clipped ? t_limit : t_ + h;
        k1_.swap(k7_);
        have_step_ = true;
        ++accepted_;
        const double fac = err == 0.0 ? kMaxGrow : std::min(kMaxGrow, kSafety * std::pow(err, -0.2));
        if (!clipped) h_ = h * std::max(1.0, fac);
        else h_ = std::max(h_, h * std::max(1.0, fac));
        return;
      }
      h_ = h * std::max(kMinShrink, kSafety * std::pow(err, -0.2));
    }
  }

  /// State at time t inside [t_prev(), t()] from the continuous extension.
  DenseVector dense(double t) const {
    if (!have_step_ || t >= t_) return y_;
    if (t <= t_prev_) return y_prev_;
    const double theta = (t - t_prev_) / h_last_;
    const double theta1 = 1.0 - theta;
    return rcont1_ + theta * (rcont2_ + theta1 * (rcont3_ + theta * (rcont4_ + theta1 * rcont5_)));
  }

 private:
  static constexpr double kSafety = 0.9;
  static constexpr double kMaxGrow = 5.0;
  static constexpr double kMinShrink = 0.2;

  double initial_step() {
    // Hairer-Norsett-Wanner starting step heuristic.
    const DenseVector scale = scale_of(y_, y_);
    const double d0 = rms(y_, scale);
    const double d1 = rms(k1_, scale);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    DenseVector y1 = y_ + h0 * k1_;
    DenseVector f1(y_.size());
    f_(t_ + h0, y1, f1);
    const double d2 = rms(f1 - k1_, scale) / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
    double h = std::min(100.0 * h0, h1);
    if (ctrl_.max_step > 0.0) h = std::min(h, ctrl_.max_step);
    return h;
  }

  DenseVector scale_of(const DenseVector& a, const DenseVector& b) const {
    return (ctrl_.abs_tol + ctrl_.rel_tol * a.cwiseAbs().cwiseMax(b.cwiseAbs()).array()).matrix()
        .cast<Complex>();
  }

  static double rms(const DenseVector& v, const DenseVector& scale) {
    if (v.size() == 0) return 0.0;
    double acc = 0.0;
    for (Index i = 0; i < v.size(); ++i) acc += std::norm(v[i]) / std::norm(scale[i]);
    return std::sqrt(acc / static_cast<double>(v.size()));
  }

  double trial(double h) {
    const Index n = y_.size();
    k2_.resize(n);
    k3_.resize(n);
    k4_.resize(n);
    k5_.resize(n);
    k6_.resize(n);
    k7_.resize(n);

    tmp_ = y_ + h * (a21 * k1_);
    f_(t_ + c2 * h, tmp_, k2_);
    tmp_ = y_ + h * (a31 * k1_ + a32 * k2_);
    f_(t_ + c3 * h, tmp_, k3_);
    tmp_ = y_ + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
    f_(t_ + c4 * h, tmp_, k4_);
    tmp_ = y_ + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
    f_(t_ + c5 * h, tmp_, k5_);
    tmp_ = y_ + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
    f_(t_ + h, tmp_, k6_);
    y_new_ = y_ + h * (a71 * k1_ + a73 * k3_ + a74 * k4_ + a75 * k5_ + a76 * k6_);
    f_(t_ + h, y_new_, k7_);

    err_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
    const double err = rms(err_, scale_of(y_, y_new_));
    if (!std::isfinite(err)) return std::numeric_limits<double>::max();

    if (err <= 1.0) {
      rcont1_ = y_;
      rcont2_ = y_new_ - y_;
      rcont3_ = h * k1_ - rcont2_;
      rcont4_ = rcont2_ - h * k7_ - rcont3_;
      rcont5_ = h * (d1 * k1_ + d3 * k3_ + d4 * k4_ + d5 * k5_ + d6 * k6_ + d7 * k7_);
    }
    return err;
  }

  static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                          a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                          a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  static constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                          a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
  static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                          e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
  static constexpr double d1 = -12715105075.0 / 11282082432.0,
                          d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0,
                          d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  OdeRhs f_;
  OdeControl ctrl_;
  double t_ = 0.0, t_prev_ = 0.0, h_ = 0.0, h_last_ = 0.0;
  std::size_t accepted_ = 0, attempts_ = 0;
  bool have_step_ = false;
  DenseVector y_, y_prev_, y_new_, tmp_, err_;
  DenseVector k1_, k2_, k3_, k4_, k5_, k6_, k7_;
  DenseVector rcont1_, rcont2_, rcont3_, rcont4_, rcont5_;
};

inline void require_increasing(const std::vector<double>& grid, const char* what) {
  if (grid.empty()) throw DimensionError(std::string(what) + " is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw DimensionError(std::string(what) + " has non-finite entries");
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw DimensionError(std::string(what) + " is not strictly increasing");
    }
  }
}

/// Solve y' = f(t, y) from y(t_grid[0]) = y0 and sample the solution at every
/// grid point (the first sample is y0 itself).
inline std::vector<DenseVector> integrate_ode(const OdeRhs& f, const DenseVector& y0,
                                              const std::vector<double>& t_grid,
                                              const OdeControl& ctrl = {}) {
  require_increasing(t_grid, "integrate_ode: time grid");
  std::vector<DenseVector> out;
  out.reserve(t_grid.size());
  out.push_back(y0);
  if (t_grid.size() == 1) return out;

  Dopri5 stepper(f, t_grid.front(), y0, ctrl);
  const double t_end = t_grid.back();
  std::size_t next = 1;
  while (next < t_grid.size()) {
    stepper.step(t_end);
    while (next < t_grid.size() && t_grid[next] <= stepper.t()) {
      out.push_back(t_grid[next] == stepper.t() ? stepper.y() : stepper.dense(t_grid[next]));
      ++next;
    }
  }
  return out;
}

/// Evenly spaced grid with both end points included.
inline std::vector<double> linspace(double start, double stop, std::size_t points) {
  if (points == 0) return {};
  if (points == 1) return {start};
  std::vector<double> grid(points);
  const double step = (stop - start) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = start + step * static_cast<double>(i);
  grid.back() = stop;
  return grid;
}

}  // namespace mpjc

#endif  // MPJC_ODE_HPP

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

#ifndef MPJC_ERROR_HPP
#define MPJC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mpjc {

/// Invalid physical parameters or malformed run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not fit, or a product space exceeds the size limit.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Any failure of a numerical kernel: singular factorization, tolerance
/// violation, step-size underflow, undefined correlation.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StepSizeUnderflow : public NumericalError {
 public:
  StepSizeUnderflow(double time, double step)
      : NumericalError("ODE step size underflow at t = " + std::to_string(time) +
                       " (h = " + std::to_string(step) + ")"),
        time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace mpjc

#endif  // MPJC_ERROR_HPP
